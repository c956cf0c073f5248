use std::process::ExitCode;

fn main() -> ExitCode {
    specfilter::cli::run_from(std::env::args_os())
}
