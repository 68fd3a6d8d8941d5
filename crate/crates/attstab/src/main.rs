fn main() {
    std::process::exit(attstab::cli::run(std::env::args()));
}
