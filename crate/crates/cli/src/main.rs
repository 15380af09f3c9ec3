use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(turan_cli::run(std::env::args_os()))
}
