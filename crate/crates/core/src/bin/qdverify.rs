fn main() {
    std::process::exit(qdverify::cli::main_with_args(std::env::args_os()));
}
