fn main() {
    std::process::exit(paretail::cli::run(std::env::args_os()));
}
