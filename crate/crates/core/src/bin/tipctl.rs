fn main() {
    std::process::exit(tipctl::cli::run(std::env::args_os()));
}
