fn main() {
    std::process::exit(semiring_mxu::cli::run(std::env::args_os()));
}
