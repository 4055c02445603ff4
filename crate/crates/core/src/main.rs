fn main() {
    std::process::exit(girthforge::cli::main_with_args(std::env::args_os()));
}
