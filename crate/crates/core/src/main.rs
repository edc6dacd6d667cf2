fn main() {
    std::process::exit(holoframe::cli::main_with_args(std::env::args_os()));
}
