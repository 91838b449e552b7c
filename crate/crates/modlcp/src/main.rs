fn main() {
    std::process::exit(modlcp::cli::run(std::env::args_os()));
}
