fn main() {
    std::process::exit(wpbailey::cli::run(std::env::args_os()));
}
