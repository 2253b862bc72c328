use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(epimc::cli::cli_main(std::env::args_os()))
}
