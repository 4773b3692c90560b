//! Property tests for the structural invariants.

use proptest::prelude::*;

use nlchan::bounds::live_cell_weights;
use nlchan::boxes::{deterministic_box, pr_box, tsirelson_box, CorrelationBox, DeterministicStrategy};
use nlchan::channels::{
    build_channel_two, entropy, ChannelSpec, LogBase, ProductDistribution,
};
use nlchan::optimizer::{tangent_project, AmplitudeVector};

fn distribution() -> impl Strategy<Value = [f64; 4]> {
    prop::array::uniform4(1e-6..1.0f64).prop_map(|raw| {
        let sum: f64 = raw.iter().sum();
        [raw[0] / sum, raw[1] / sum, raw[2] / sum, raw[3] / sum]
    })
}

fn unit_vector() -> impl Strategy<Value = AmplitudeVector> {
    prop::array::uniform4(-1.0..1.0f64)
        .prop_filter("nonzero", |v| v.iter().map(|x| x * x).sum::<f64>() > 1e-3)
        .prop_map(|v| {
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            AmplitudeVector::new([v[0] / norm, v[1] / norm, v[2] / norm, v[3] / norm])
                .expect("normalized")
        })
}

proptest! {
    #[test]
    fn tangent_projection_is_orthogonal(
        g in prop::array::uniform4(-10.0..10.0f64),
        x in unit_vector(),
    ) {
        let h = tangent_project(&g, &x);
        let dot: f64 = h.iter().zip(x.entries().iter()).map(|(a, b)| a * b).sum();
        prop_assert!(dot.abs() < 1e-12);
    }

    #[test]
    fn entropy_bounds_hold(d in distribution()) {
        let h = entropy(&d, LogBase::Bits);
        prop_assert!(h >= 0.0);
        prop_assert!(h <= 2.0 + 1e-12);
    }

    #[test]
    fn weight_decomposition_bound_and_reconstruction(
        d1 in distribution(),
        d2 in distribution(),
        eps in 0.0..1.0f64,
    ) {
        let dist = ProductDistribution::new(d1, d2).unwrap();
        let w = live_cell_weights(&dist).expect("sum bound");
        prop_assert!(w.weight_sum() <= 3.0 + 1e-9);
        // The decomposition reproduces the channel's non-erased output pmf.
        let ch = build_channel_two(eps).unwrap();
        let probs = w.output_probs(eps);
        let outputs = [(0usize, 0usize), (0, 1), (1, 0), (1, 1)];
        for (k, &(y1, y2)) in outputs.iter().enumerate() {
            let mut direct = 0.0;
            for a in nlchan::channels::InputSymbol::ALL {
                for b in nlchan::channels::InputSymbol::ALL {
                    direct += d1[a.index()] * d2[b.index()] * ch.prob(a, b, y1, y2);
                }
            }
            prop_assert!((probs[k] - direct).abs() < 1e-12);
        }
    }

    #[test]
    fn mixtures_of_nonsignaling_boxes_are_nonsignaling(
        w in prop::array::uniform3(1e-3..1.0f64),
        det_index in 0usize..16,
    ) {
        let det = deterministic_box(
            &DeterministicStrategy::all().nth(det_index).unwrap(),
        );
        let parts = [pr_box(), tsirelson_box(), det];
        let total: f64 = w.iter().sum();
        let weighted: Vec<(f64, &CorrelationBox)> = w
            .iter()
            .zip(parts.iter())
            .map(|(v, b)| (v / total, b))
            .collect();
        let mix = CorrelationBox::mixture(&weighted).unwrap();
        prop_assert!(mix.is_nonsignaling(1e-9));
    }

    #[test]
    fn channel_text_round_trip(rows in prop::collection::vec(
        prop::array::uniform9(1e-3..1.0f64), 16)
    ) {
        let out = 3;
        let mut pmf = Vec::with_capacity(16 * 9);
        for row in &rows {
            let sum: f64 = row.iter().sum();
            pmf.extend(row.iter().map(|v| v / sum));
        }
        let ch = ChannelSpec::new("random", out, out, pmf, Some(0.5)).unwrap();
        let back = ChannelSpec::from_text(&ch.to_text()).unwrap();
        for x1 in nlchan::channels::InputSymbol::ALL {
            for x2 in nlchan::channels::InputSymbol::ALL {
                for y1 in 0..out {
                    for y2 in 0..out {
                        let a = ch.prob(x1, x2, y1, y2);
                        let b = back.prob(x1, x2, y1, y2);
                        prop_assert!((a - b).abs() < 1e-11);
                    }
                }
            }
        }
    }
}
