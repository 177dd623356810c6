fn main() -> std::process::ExitCode {
    sharpmult::cli::run(std::env::args_os())
}
