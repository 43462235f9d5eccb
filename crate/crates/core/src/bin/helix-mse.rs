fn main() {
    std::process::exit(helix_mse::cli::execute_command(std::env::args_os()));
}
