use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use lwqed::cli::{exit_code, load_config, run_and_write, validate_config, EXPERIMENTS};

#[derive(Parser)]
#[command(name = "lwqed", version, about = "Long-wavelength light-matter experiments with CSV output")]
struct Cli {
    /// Worker threads for scan points (default: all cores).
    #[arg(long, global = true, env = "LWQED_JOBS")]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a TOML config.
    Run {
        config: PathBuf,
        /// Overrides such as `modes.0.lambda=0.2` or `scan.values=[0.0,0.01]`.
        overrides: Vec<String>,
    },
    /// Check a config and print every schema violation.
    Validate { config: PathBuf },
    /// Print the experiment names.
    ListExperiments,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(j) = cli.jobs {
        if j == 0 {
            eprintln!("error: --jobs must be at least 1");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(j).build_global() {
            eprintln!("error: cannot size worker pool: {e}");
            return ExitCode::from(4);
        }
    }
    match cli.command {
        Command::ListExperiments => {
            for (name, about) in EXPERIMENTS {
                println!("{name:<20} {about}");
            }
            ExitCode::SUCCESS
        }
        Command::Validate { config } => match validate_config(&config) {
            Ok(d) if d.is_empty() => {
                println!("{}: ok", config.display());
                ExitCode::SUCCESS
            }
            Ok(d) => {
                for item in d {
                    eprintln!("{}: {item}", config.display());
                }
                ExitCode::from(2)
            }
            Err(e) => {
                eprintln!("error: {}: {e}", config.display());
                ExitCode::from(2)
            }
        },
        Command::Run { config, overrides } => {
            let cfg = match load_config(&config, &overrides) {
                Ok(Ok(cfg)) => cfg,
                Ok(Err(d)) => {
                    for item in d {
                        eprintln!("{}: {item}", config.display());
                    }
                    return ExitCode::from(2);
                }
                Err(e) => {
                    eprintln!("error: {}: {e}", config.display());
                    return ExitCode::from(exit_code(&e) as u8);
                }
            };
            match run_and_write(&cfg) {
                Ok(table) => {
                    let verdict = table.verdict.map_or("none", lwqed::cli::table::verdict_word);
                    println!("{} -> {} ({verdict})", cfg.experiment.name, cfg.output_path().display());
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("error: {}: {e}", cfg.experiment.name);
                    ExitCode::from(exit_code(&e) as u8)
                }
            }
        }
    }
}
