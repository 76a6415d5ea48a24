use std::process::ExitCode;

use clap::Parser;
use spherecone_cli::{execute, load_job, summary, Cli, EXIT_USAGE};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = load_job(&cli.opts).and_then(|job| execute(cli.command, &job));
    match result {
        Ok(outcome) => {
            if cli.opts.json {
                println!("{}", serde_json::to_string_pretty(&outcome.report).expect("serializable"));
            } else {
                println!("{}", summary(&outcome.report));
            }
            ExitCode::from(outcome.code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
