//! Batch front end: TOML run configurations in, CSV and plot scripts out.

pub mod config;
pub mod error;
pub mod output;
pub mod plot;
pub mod presets;
pub mod run;
pub mod verify;

use std::path::{Path, PathBuf};

pub use config::{Mode, RunConfig};
pub use error::CliError;

pub const RESOLVED_CONFIG: &str = "resolved_config.toml";

/// Options taken from the command line.
#[derive(Debug, Clone)]
pub struct Invocation {
    pub mode: Mode,
    pub config: PathBuf,
    pub out: Option<PathBuf>,
    pub preset: Option<String>,
    pub threads: Option<usize>,
}

/// Resolves the configuration, echoes it into the output directory and runs
/// the requested mode. Returns the artifacts written.
pub fn execute(inv: &Invocation) -> Result<Vec<PathBuf>, CliError> {
    let text = std::fs::read_to_string(&inv.config)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", inv.config.display())))?;
    let cfg = RunConfig::resolve(&text, inv.mode, inv.preset.as_deref(), inv.out.as_deref())?;

    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(k) = inv.threads {
        if k == 0 {
            return Err(CliError::Config("--threads must be at least 1".into()));
        }
        pool = pool.num_threads(k);
    }
    let pool = pool.build().map_err(|e| CliError::Config(format!("thread pool: {e}")))?;

    let echo = cfg.output.dir.join(RESOLVED_CONFIG);
    output::write_atomic(&echo, &cfg.to_toml())?;

    let mut written = pool.install(|| dispatch(&cfg))?;
    written.insert(0, echo);
    Ok(written)
}

fn dispatch(cfg: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    match cfg.mode() {
        Mode::Evolve => run::run_evolve(cfg),
        Mode::Steady => run::run_steady(cfg),
        Mode::Sweep => run::run_sweep(cfg),
        Mode::Verify => {
            let (report, path) = verify::run_verify(cfg)?;
            for c in report.checks.iter().filter(|c| !c.pass) {
                eprintln!(
                    "FAIL {} [{}]: observed {:?}, limit {}{}",
                    c.name,
                    c.scope,
                    c.observed,
                    c.limit,
                    c.note.as_deref().map(|n| format!(" ({n})")).unwrap_or_default()
                );
            }
            if report.pass {
                Ok(vec![path])
            } else {
                Err(CliError::Verification(format!(
                    "{} of {} checks failed; see {}",
                    report.failed,
                    report.checks.len(),
                    display(&path)
                )))
            }
        }
    }
}

fn display(p: &Path) -> String {
    p.display().to_string()
}
