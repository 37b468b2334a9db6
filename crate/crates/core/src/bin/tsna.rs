fn main() {
    std::process::exit(tsna::cli::run(std::env::args_os()));
}
