fn main() {
    std::process::exit(bertrand_core::cli::run());
}
