fn main() {
    std::process::exit(kdt::cli::run());
}
