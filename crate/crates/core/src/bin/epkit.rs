fn main() {
    std::process::exit(epkit::cli::main_from_args(std::env::args_os()));
}
