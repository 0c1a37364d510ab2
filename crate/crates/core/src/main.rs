fn main() {
    std::process::exit(beurzeta::cli::run(std::env::args_os()));
}
