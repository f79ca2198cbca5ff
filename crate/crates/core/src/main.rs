fn main() -> std::process::ExitCode {
    vpnn::cli::main_with_args(std::env::args_os())
}
