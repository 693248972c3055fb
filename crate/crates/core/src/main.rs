fn main() { std::process::exit(navtest::cli::main_with_args(std::env::args_os())); }
