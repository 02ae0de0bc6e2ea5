fn main() {
    std::process::exit(ambc::cli::cli_main(std::env::args_os()));
}
