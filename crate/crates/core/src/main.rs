fn main() {
    std::process::exit(dlsfem::cli::main_with_args(std::env::args_os()));
}
