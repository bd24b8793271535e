fn main() {
    std::process::exit(linkveil::cli::run(std::env::args_os()));
}
