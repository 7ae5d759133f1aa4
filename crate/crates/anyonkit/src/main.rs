use std::io::{self, Write};
use std::process::ExitCode;

fn main() -> ExitCode {
    let out = anyonkit::cli::run(std::env::args_os(), &mut io::stdin().lock());
    let _ = io::stdout().lock().write_all(&out.stdout);
    let _ = io::stderr().lock().write_all(out.stderr.as_bytes());
    ExitCode::from(out.code as u8)
}
