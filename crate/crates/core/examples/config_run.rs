//! Drive the whole check suite from a TOML config without the binary.
//!
//! ```bash
//! cargo run --release --example config_run -- path/to/experiment.toml
//! ```

use wedgeqft::cli::{execute, Command};
use wedgeqft::config::Config;

fn main() -> wedgeqft::Result<()> {
    let cfg = match std::env::args().nth(1) {
        Some(path) => Config::load(path.as_ref())?,
        None => Config::default_experiment(),
    };
    let outcome = execute(Command::All, &cfg, 7);
    for (command, section) in &outcome.sections {
        let worst = section
            .checks
            .iter()
            .filter(|c| c.relation == wedgeqft::report::Relation::AtMost && c.limit > 0.0)
            .map(|c| c.value / c.limit)
            .fold(0.0, f64::max);
        println!(
            "{:<13} {}  {} checks, worst residual/limit {:.2e}",
            command.name(),
            if section.passed() { "pass" } else { "FAIL" },
            section.checks.len(),
            worst
        );
    }
    Ok(())
}
