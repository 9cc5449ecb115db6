fn main() {
    std::process::exit(dockmpc::cli::run_cli(std::env::args_os()));
}
