fn main() {
    std::process::exit(rdito::cli::run(std::env::args_os()));
}
