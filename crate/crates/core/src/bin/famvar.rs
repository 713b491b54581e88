fn main() {
    std::process::exit(famvar::cli::run());
}
