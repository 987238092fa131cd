fn main() {
    std::process::exit(sfdi::cli::main());
}
