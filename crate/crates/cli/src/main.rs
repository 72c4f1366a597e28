use std::process::ExitCode;

use clap::Parser;

use oaqec_cli::{run, Cli, JobSpec, Status};

fn main() -> ExitCode {
    let job = JobSpec::from(Cli::parse());
    let outcome = run(&job);
    let json = outcome.to_json();
    match &job.output {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &json) {
                eprintln!("error: {}: {e}", path.display());
                return ExitCode::from(Status::InputError.code());
            }
        }
        None => print!("{json}"),
    }
    eprintln!("{}", outcome.summary);
    ExitCode::from(outcome.status.code())
}
