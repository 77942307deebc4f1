fn main() {
    std::process::exit(micromag::cli::main_from_env());
}
