fn main() {
    std::process::exit(bistatic_isac::harness::cli::run_from_args(std::env::args_os()));
}
