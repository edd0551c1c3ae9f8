fn main() {
    std::process::exit(ramflow::cli::main_with_args(std::env::args_os()));
}
