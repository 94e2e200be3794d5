fn main() {
    std::process::exit(bifree::cli::main_with_args(std::env::args_os()));
}
