fn main() {
    std::process::exit(nlchan_cli::run());
}
