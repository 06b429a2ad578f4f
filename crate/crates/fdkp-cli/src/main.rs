fn main() {
    std::process::exit(fdkp_cli::run(std::env::args_os()));
}
