fn main() {
    std::process::exit(rbl_cli::run(std::env::args_os()));
}
