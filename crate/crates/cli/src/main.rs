fn main() {
    let status = schwarz_cli::run_with_args(std::env::args_os());
    std::process::exit(status.code());
}
