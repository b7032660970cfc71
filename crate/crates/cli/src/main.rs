fn main() {
    std::process::exit(loewner_cli::run());
}
