fn main() {
    std::process::exit(qmodmul::cli::run_cli());
}
