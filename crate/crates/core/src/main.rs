fn main() {
    std::process::exit(ramforge::cli::run(std::env::args_os()));
}
