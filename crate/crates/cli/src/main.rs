fn main() {
    std::process::exit(kuniform_cli::main_with_args(std::env::args_os()));
}
