use std::process::ExitCode;

fn main() -> ExitCode {
    let code = translator_cli::run_from(std::env::args_os().collect());
    ExitCode::from(code as u8)
}
