use clap::Parser;
use mfleaders_cli::{run, Cli, EXIT_INVALID, EXIT_OK};

fn main() {
    let code = match Cli::try_parse() {
        Ok(cli) => run(cli),
        // Usage errors are validation errors; exit code 2 is reserved for failed verification.
        Err(e) => {
            let _ = e.print();
            if e.use_stderr() {
                EXIT_INVALID
            } else {
                EXIT_OK
            }
        }
    };
    std::process::exit(code);
}
