fn main() {
    std::process::exit(algconj::cli::main_with_args(std::env::args_os()));
}
