fn main() {
    std::process::exit(tscal_core::cli::main());
}
