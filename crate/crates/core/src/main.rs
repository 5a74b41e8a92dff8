fn main() {
    std::process::exit(ridgeless::cli::run(std::env::args_os()));
}
