fn main() {
    std::process::exit(fr3sim::cli::main());
}
