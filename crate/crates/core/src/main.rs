fn main() {
    std::process::exit(firstint::cli::main_with_args(std::env::args_os()));
}
