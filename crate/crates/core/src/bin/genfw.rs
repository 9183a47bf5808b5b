fn main() {
    std::process::exit(genfw::cli::cli_main(std::env::args_os()));
}
