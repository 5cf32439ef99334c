fn main() {
    std::process::exit(recmin_cli::main_with(std::env::args_os()));
}
