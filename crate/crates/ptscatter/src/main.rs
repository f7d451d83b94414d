fn main() {
    std::process::exit(ptscatter::cli::run());
}
