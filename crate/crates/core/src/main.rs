fn main() {
    std::process::exit(defectfield::cli::run(std::env::args_os()));
}
