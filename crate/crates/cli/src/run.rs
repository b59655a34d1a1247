use std::fs;
use std::path::PathBuf;

use anyhow::Context;
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::config::RunConfig;

pub const VERSION: &str = env!("HOSTLAB_VERSION");

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    /// Hard checks are invariants; soft ones are thresholds without a
    /// proven rate behind them.
    pub hard: bool,
    pub pass: bool,
    pub detail: String,
}

/// Output directory, report files and checks of one subcommand run.
pub struct Run {
    command: &'static str,
    config: RunConfig,
    dir: PathBuf,
    files: Vec<String>,
    checks: Vec<Check>,
    extra: Map<String, Value>,
}

#[derive(Debug, Default)]
pub struct Outcome {
    pub hard_failures: usize,
    pub soft_failures: usize,
}

impl Run {
    pub fn new(command: &'static str, config: &RunConfig) -> anyhow::Result<Self> {
        let dir = config.out_dir();
        fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
        Ok(Run { command, config: config.clone(), dir, files: Vec::new(), checks: Vec::new(), extra: Map::new() })
    }

    pub fn csv<R: Serialize>(&mut self, name: &str, rows: &[R]) -> anyhow::Result<()> {
        let path = self.dir.join(name);
        let file = fs::File::create(&path).with_context(|| format!("creating {}", path.display()))?;
        hostlab::report::write_csv(file, VERSION, &self.config.echo(), rows)?;
        self.files.push(name.to_string());
        Ok(())
    }

    pub fn text(&mut self, name: &str, content: &str) -> anyhow::Result<()> {
        let path = self.dir.join(name);
        fs::write(&path, content).with_context(|| format!("writing {}", path.display()))?;
        self.files.push(name.to_string());
        Ok(())
    }

    pub fn check(&mut self, name: impl Into<String>, hard: bool, pass: bool, detail: impl Into<String>) {
        self.checks.push(Check { name: name.into(), hard, pass, detail: detail.into() });
    }

    /// Extra key in the JSON summary.
    pub fn note(&mut self, key: &str, value: impl Serialize) {
        self.extra.insert(key.to_string(), serde_json::to_value(value).expect("summary value serializes"));
    }

    pub fn finish(mut self) -> anyhow::Result<Outcome> {
        let mut outcome = Outcome::default();
        for c in &self.checks {
            let tag = match (c.pass, c.hard) {
                (true, _) => "ok",
                (false, true) => "FAIL",
                (false, false) => "warn",
            };
            eprintln!("[{tag}] {}: {}", c.name, c.detail);
            if !c.pass {
                if c.hard {
                    outcome.hard_failures += 1;
                } else {
                    outcome.soft_failures += 1;
                }
            }
        }
        let summary_name = format!("{}_summary.json", self.command.replace('-', "_"));
        self.files.push(summary_name.clone());
        let mut summary = json!({
            "command": self.command,
            "version": VERSION,
            "config": self.config.echo(),
            "checks": self.checks,
            "files": self.files,
        });
        summary.as_object_mut().expect("object").extend(std::mem::take(&mut self.extra));
        let path = self.dir.join(&summary_name);
        let text = serde_json::to_string_pretty(&summary)? + "\n";
        fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
        Ok(outcome)
    }
}
