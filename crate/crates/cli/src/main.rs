fn main() {
    std::process::exit(sir_exact_cli::run(std::env::args_os()));
}
