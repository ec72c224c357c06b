fn main() {
    std::process::exit(gkp_qpc_cli::main_with_args(std::env::args_os()));
}
