mod args;
mod commands;
mod output;
mod parse;

use std::process::ExitCode;

use clap::Parser;

use args::Cli;

fn main() -> ExitCode {
    // clap exits with status 2 on usage errors
    let cli = Cli::parse();
    let run = cli.command.run_args();
    if let Some(n) = run.workers {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("error: cannot start {n} workers: {e}");
            return ExitCode::from(5);
        }
    }
    let result = commands::run(&cli.command).and_then(|outputs| {
        let config = serde_json::to_value(&cli.command).unwrap_or_default();
        outputs.commit(&run.out_dir, cli.command.name(), config, run.seed)
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
