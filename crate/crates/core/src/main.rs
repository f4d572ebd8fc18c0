use std::process::ExitCode;

fn main() -> ExitCode {
    eolcycle::cli::run(std::env::args_os())
}
