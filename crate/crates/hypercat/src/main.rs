use std::process::ExitCode;

fn main() -> ExitCode {
    hypercat::cli::run(std::env::args_os())
}
