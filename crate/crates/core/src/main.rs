fn main() {
    std::process::exit(dlw::cli::main_with_args(std::env::args_os()));
}
