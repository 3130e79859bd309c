fn main() {
    std::process::exit(dfrelay::cli::main_with_args(std::env::args_os()));
}
