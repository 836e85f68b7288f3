fn main() {
    std::process::exit(parcave::cli::run(std::env::args_os()));
}
