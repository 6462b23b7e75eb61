fn main() {
    std::process::exit(zc::cli::run(std::env::args_os()));
}
