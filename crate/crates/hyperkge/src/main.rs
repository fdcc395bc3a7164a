use std::process::ExitCode;

fn main() -> ExitCode {
    hyperkge::cli::run(std::env::args_os())
}
