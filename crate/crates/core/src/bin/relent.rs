fn main() {
    std::process::exit(relent_core::cli::main_with_args());
}
