fn main() {
    std::process::exit(safecov_cli::app::main_with_args(std::env::args_os()));
}
