fn main() {
    std::process::exit(impressionist::cli::main_with_args(std::env::args_os()));
}
