fn main() {
    std::process::exit(robin::cli::run(std::env::args_os()));
}
