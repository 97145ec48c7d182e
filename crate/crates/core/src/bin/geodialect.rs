fn main() {
    std::process::exit(geodialect::cli::main_exit_code());
}
