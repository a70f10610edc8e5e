fn main() {
    std::process::exit(mpverify_cli::app::main_with_args(std::env::args_os()));
}
