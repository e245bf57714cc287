fn main() {
    std::process::exit(sepcut::cli::main_with_args(std::env::args_os()));
}
