fn main() {
    std::process::exit(bochner_flow_cli::run());
}
