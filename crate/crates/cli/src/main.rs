//! `lamtree`: batch front end for length functions, short-element
//! languages, L¹ rays and limit points of tree models.

mod commands;
mod config;
mod models;
mod report;

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use commands::{run_job, Env};
use config::{JobConfig, JobFile, Params, Task};
use report::{render_json, Bundle, Report, Status};

#[derive(Parser, Debug)]
#[command(name = "lamtree", version, about = "Dual laminations of free group actions on trees")]
struct Cli {
    #[command(flatten)]
    params: Params,
    /// Directory for cached automorphism iterates.
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
    /// Write the JSON report here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads; defaults to the number of cores.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    #[command(flatten)]
    Task(Task),
    /// Runs every job of a job file and writes one combined report.
    Report { config: PathBuf },
}

fn emit(json: &str, table: &str, out: Option<&PathBuf>) -> Result<()> {
    match out {
        Some(path) => {
            fs::write(path, json).with_context(|| format!("writing {}", path.display()))?;
            print!("{table}");
        }
        None => {
            print!("{json}");
            eprint!("{table}");
        }
    }
    std::io::stdout().flush()?;
    Ok(())
}

fn summary(r: &Report) -> String {
    let mut s = r.table.clone();
    for n in &r.notes {
        s.push_str(&format!("note: {n}\n"));
    }
    if r.status == Status::Flagged {
        s.push_str(&format!(
            "warning: {}\n",
            r.flags.iter().cloned().collect::<Vec<_>>().join(", ")
        ));
    }
    s
}

fn run(cli: Cli) -> Result<Status> {
    if let Some(n) = cli.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global()
            .context("starting the worker pool")?;
    }
    let env = Env {
        defaults: cli.params.clone(),
        cache_dir: cli.cache_dir.clone(),
    };
    match cli.command {
        Command::Task(task) => {
            let job = JobConfig {
                name: None,
                task,
                params: Params::default(),
            };
            let r = run_job(&job, &env)?;
            emit(&render_json(&r), &summary(&r), cli.out.as_ref())?;
            Ok(r.status)
        }
        Command::Report { config } => {
            let file = JobFile::load(&config)?;
            // flags on the command line win over the file
            let env = Env {
                defaults: file.params.overlay(&cli.params),
                ..env
            };
            let mut reports = Vec::new();
            let mut text = String::new();
            for (i, job) in file.jobs.iter().enumerate() {
                let job = JobConfig {
                    params: job.params.overlay(&env.defaults),
                    ..job.clone()
                };
                let r = run_job(&job, &env)
                    .with_context(|| format!("job {}", job.name.clone().unwrap_or_else(|| i.to_string())))?;
                text.push_str(&format!(
                    "== {} ({})\n{}",
                    job.name.as_deref().unwrap_or(job.task.name()),
                    job.task.name(),
                    summary(&r)
                ));
                reports.push(r);
            }
            let bundle = Bundle::new(reports);
            emit(&render_json(&bundle), &text, cli.out.as_ref())?;
            Ok(bundle.status)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(status) => ExitCode::from(status.exit_code()),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
