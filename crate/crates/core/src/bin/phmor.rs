fn main() {
    std::process::exit(phmor::cli::run(std::env::args_os()));
}
