mod args;
mod commands;
mod output;

use clap::Parser;

use args::{expand_config, Cli, Command};
use commands::{Failure, EXIT_OK, EXIT_USAGE};

fn dispatch(cli: &Cli) -> Result<i32, Failure> {
    match &cli.command {
        Command::Tune(a) => commands::tune(a),
        Command::Ratios(a) => commands::ratios(a),
        Command::Verify(a) => commands::verify(a),
        Command::Classify(a) => commands::classify(a),
        Command::Curve(a) => commands::curve(a),
        Command::Dim(a) => commands::dim(a),
    }
}

fn main() {
    let argv = match expand_config(std::env::args().collect()) {
        Ok(v) => v,
        Err(e) => {
            eprintln!("cherry: {e}");
            std::process::exit(EXIT_USAGE);
        }
    };
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    let code = match dispatch(&cli) {
        Ok(c) => c,
        Err(f) => {
            eprintln!("cherry: {}", f.message);
            f.code
        }
    };
    std::process::exit(code);
}
