fn main() {
    std::process::exit(lplab_cli::run_cli(std::env::args_os()));
}
