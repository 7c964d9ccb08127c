use std::io::Write;

fn main() {
    let out = posetinv::cli::run_args(std::env::args_os());
    let mut stream: Box<dyn Write> =
        if out.code == posetinv::cli::EXIT_OK || out.code == posetinv::cli::EXIT_SUITE {
            Box::new(std::io::stdout())
        } else {
            Box::new(std::io::stderr())
        };
    let _ = stream.write_all(out.stdout.as_bytes());
    std::process::exit(out.code);
}
