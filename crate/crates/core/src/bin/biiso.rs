fn main() {
    std::process::exit(biiso::cli::main_with_args(std::env::args_os()));
}
