use clap::Parser;

use cooc_cli::args::{Cli, Command};
use cooc_cli::commands;

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    let result = match cli.command {
        Command::Build(a) => commands::run_build(&a),
        Command::Query(a) => commands::run_query(&a),
        Command::Stats(a) => commands::run_stats(&a),
        Command::Verify(a) => commands::run_verify(&a),
        Command::Oracle(a) => commands::run_oracle(&a),
        Command::Bench(a) => commands::run_bench(&a),
    };
    if let Err(e) = result {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
