fn main() {
    std::process::exit(pii_tau::cli::main_with_args(std::env::args_os()));
}
