use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    // panics are reported through the exit code, not the default hook
    std::panic::set_hook(Box::new(|_| {}));
    let outcome = sobolev_cli::run(std::env::args_os());
    let _ = std::io::stdout().write_all(outcome.stdout.as_bytes());
    let _ = std::io::stderr().write_all(outcome.stderr.as_bytes());
    ExitCode::from(outcome.code as u8)
}
