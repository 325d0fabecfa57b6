fn main() {
    std::process::exit(isoclass::cli::run(std::env::args()));
}
