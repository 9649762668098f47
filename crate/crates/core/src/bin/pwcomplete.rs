fn main() {
    std::process::exit(pwcomplete::cli::run(std::env::args_os()));
}
