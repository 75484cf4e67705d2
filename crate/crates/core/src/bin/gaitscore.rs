fn main() {
    std::process::exit(gaitscore::cli::run(std::env::args_os()));
}
