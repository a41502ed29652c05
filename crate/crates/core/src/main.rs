fn main() {
    std::process::exit(eventrl::cli::run(std::env::args_os()));
}
