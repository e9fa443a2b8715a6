use std::process::ExitCode;

fn main() -> ExitCode {
    xnmr::cli::run()
}
