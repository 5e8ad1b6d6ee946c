use std::process::ExitCode;

use cgf_cli::{run, Cli};
use clap::Parser;

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = Cli::parse();
    match run(cli, argv) {
        Ok(out) if out.ok => {
            println!("{}", out.message);
            ExitCode::SUCCESS
        }
        Ok(out) => {
            eprintln!("{}", out.message);
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
