fn main() {
    std::process::exit(wexplore_cli::cli_main(std::env::args_os()));
}
