fn main() {
    std::process::exit(projlab::cli::main_with_args(std::env::args_os()));
}
