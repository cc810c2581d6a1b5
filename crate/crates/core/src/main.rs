fn main() {
    std::process::exit(nodal_lab::cli::main_with_args(std::env::args_os()));
}
