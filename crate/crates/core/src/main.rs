fn main() {
    std::process::exit(simplexforge::cli::run(std::env::args_os()));
}
