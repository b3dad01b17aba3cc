fn main() {
    std::process::exit(foid::cli::main_with_std());
}
