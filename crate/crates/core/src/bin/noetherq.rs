fn main() {
    std::process::exit(noetherq::cli::main_with_args(std::env::args_os()));
}
