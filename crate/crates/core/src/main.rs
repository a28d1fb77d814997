fn main() {
    std::process::exit(fbl_mimo::cli::run());
}
