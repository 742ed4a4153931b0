fn main() {
    std::process::exit(slchi_cli::main_with_args(std::env::args_os()));
}
