fn main() {
    let code = compop::cli::run(std::env::args().collect());
    std::process::exit(code);
}
