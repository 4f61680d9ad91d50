fn main() {
    std::process::exit(wsreg_core::cli::run(std::env::args_os()));
}
