fn main() {
    std::process::exit(tp_stokes::cli::main_with_args(std::env::args_os()));
}
