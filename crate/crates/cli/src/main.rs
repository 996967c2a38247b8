fn main() {
    std::process::exit(yoccoz_cli::run(std::env::args_os()));
}
