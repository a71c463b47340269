fn main() {
    std::process::exit(smdg::cli::main_with_args(std::env::args_os()));
}
