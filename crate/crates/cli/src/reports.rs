//! Report envelope and the three output formats.
//!
//! Identical command, flags, and seed must produce byte-identical json and
//! csv output, so every field is emitted in a fixed order and floats use
//! Rust's shortest round-trip formatting.

use serde::Serialize;

pub trait Render {
    fn human(&self) -> String;
    fn csv(&self) -> String;
}

#[derive(Debug, Serialize)]
pub struct Envelope<T> {
    pub command: &'static str,
    pub version: &'static str,
    pub seed: u64,
    pub config: serde_json::Value,
    pub results: T,
}

impl<T: Serialize + Render> Envelope<T> {
    pub fn new(command: &'static str, seed: u64, config: serde_json::Value, results: T) -> Self {
        Envelope {
            command,
            version: env!("CARGO_PKG_VERSION"),
            seed,
            config,
            results,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }

    pub fn to_csv(&self) -> String {
        format!(
            "# nlchan {} version={} seed={}\n{}",
            self.command, self.version, self.seed, self.results.csv()
        )
    }

    pub fn to_human(&self) -> String {
        format!(
            "nlchan {} (version {}, seed {})\n{}",
            self.command,
            self.version,
            self.seed,
            self.results.human()
        )
    }
}

pub fn csv_row(fields: &[String]) -> String {
    let mut row = fields.join(",");
    row.push('\n');
    row
}
