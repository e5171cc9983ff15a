//! Runs an experiment from an inline TOML configuration and prints the CSV
//! table to stdout.

use lwqed::cli::{parse_config, run_experiment};

const CONFIG: &str = r#"
[experiment]
name = "maxwell-eom"

[[modes]]
omega = 1.0
lambda = 0.1

[[modes]]
omega = 2.5
lambda = 0.3
epsilon_sign = -1.0

[scan]
n_electrons = 2
"#;

fn main() -> lwqed::error::Result<()> {
    let overrides = vec!["modes.0.lambda=0.2".to_string()];
    let cfg = match parse_config(CONFIG, &overrides)? {
        Ok(cfg) => cfg,
        Err(diagnostics) => {
            for d in diagnostics {
                eprintln!("{d}");
            }
            std::process::exit(2);
        }
    };
    let table = run_experiment(&cfg)?;
    table.write_to(std::io::stdout().lock())
}
