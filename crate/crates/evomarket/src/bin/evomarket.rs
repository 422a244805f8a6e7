fn main() {
    std::process::exit(evomarket::cli::run(std::env::args_os()));
}
