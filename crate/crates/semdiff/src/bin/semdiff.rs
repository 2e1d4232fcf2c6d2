fn main() {
    std::process::exit(semdiff::cli::run_main());
}
