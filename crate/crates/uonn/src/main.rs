use std::process::ExitCode;

fn main() -> ExitCode {
    uonn::cli::run()
}
