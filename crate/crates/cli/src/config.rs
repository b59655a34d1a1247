use std::fmt;
use std::path::{Path, PathBuf};

use clap::Args;
use hostlab::MeasureGen;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

/// Bad flags, config files or parameters (exit status 2).
#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

pub fn config_err(msg: impl Into<String>) -> anyhow::Error {
    ConfigError(msg.into()).into()
}

/// Run parameters. A flat JSON file with the same keys can be given with
/// `--config`; flags override it key by key.
#[derive(Args, Serialize, Deserialize, Clone, Debug, Default, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Generator: cantor3, uniformA, bernoulli:p0,p1,…, markov2, or a JSON spec.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gen: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a: Option<u32>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b: Option<u64>,
    /// Frequencies (comma separated).
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<Vec<i64>>,
    /// Orbit / average length.
    #[arg(long = "N")]
    #[serde(rename = "N", skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub checkpoints: Option<Vec<usize>>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<Vec<usize>>,
    /// Radius grid of the smoothing battery.
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r: Option<Vec<f64>>,
    /// Scale bases of the smoothing battery.
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b_grid: Option<Vec<f64>>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub level: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    /// controls: dependent, rational or all.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<u64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q: Option<u64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub battery: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub guard: Option<usize>,
    /// Monte Carlo cross-check rows of fourier-cert.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mc_rows: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mc_pairs: Option<usize>,
    /// Soft threshold on the final median |W_N(1)|.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub soft_weyl_median: Option<f64>,
    /// Soft tolerance of the negative controls.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub soft_control_tol: Option<f64>,
    /// Soft constant C in RMS ≤ C‖f‖/√N.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub soft_rms_c: Option<f64>,
    /// Soft band on RMS(4N)/RMS(N), as lo,hi.
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub soft_rms_ratio: Option<Vec<f64>>,
}

impl RunConfig {
    /// Overlay `flags` on the contents of `file` (if any).
    pub fn load(file: Option<&Path>, flags: &RunConfig) -> anyhow::Result<RunConfig> {
        let mut merged = match file {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| config_err(format!("reading {}: {e}", path.display())))?;
                match serde_json::from_str::<Value>(&text) {
                    Ok(Value::Object(map)) => map,
                    Ok(_) => return Err(config_err(format!("{}: expected a flat JSON object", path.display()))),
                    Err(e) => return Err(config_err(format!("{}: {e}", path.display()))),
                }
            }
            None => Map::new(),
        };
        if let Value::Object(over) = serde_json::to_value(flags)? {
            merged.extend(over);
        }
        serde_json::from_value(Value::Object(merged)).map_err(|e| config_err(format!("config: {e}")))
    }

    pub fn seed(&self) -> anyhow::Result<u64> {
        self.seed.ok_or_else(|| config_err("a seed is required (--seed or \"seed\" in the config file)"))
    }

    pub fn echo(&self) -> Value {
        serde_json::to_value(self).expect("config serializes")
    }

    pub fn out_dir(&self) -> PathBuf {
        self.out.clone().unwrap_or_else(|| PathBuf::from("hostlab-out"))
    }
}

/// Generator names understood on the command line.
pub fn parse_gen(name: &str) -> anyhow::Result<MeasureGen> {
    let name = name.trim();
    if name.starts_with('{') {
        return MeasureGen::from_json(name).map_err(|e| config_err(format!("generator spec: {e}")));
    }
    let gen = if name == "cantor3" || name == "cantor" {
        Ok(MeasureGen::cantor())
    } else if name == "markov2" {
        MeasureGen::markov(vec![vec![0.9, 0.1], vec![0.5, 0.5]])
    } else if let Some(a) = name.strip_prefix("uniform") {
        let a: u32 = a.parse().map_err(|_| config_err(format!("generator {name:?}: expected uniformA, e.g. uniform3")))?;
        MeasureGen::uniform(a)
    } else if let Some(ps) = name.strip_prefix("bernoulli:") {
        let p = ps
            .split(',')
            .map(|s| s.trim().parse::<f64>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| config_err(format!("generator {name:?}: {e}")))?;
        MeasureGen::bernoulli(p)
    } else {
        return Err(config_err(format!(
            "unknown generator {name:?} (cantor3, markov2, uniformA, bernoulli:p0,p1,…, or a JSON spec)"
        )));
    };
    gen.map_err(|e| config_err(format!("generator {name:?}: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.json");
        std::fs::write(&path, r#"{"seed": 3, "N": 500, "m": [1, 2], "gen": "cantor3"}"#).unwrap();
        let flags = RunConfig { n: Some(900), ..Default::default() };
        let c = RunConfig::load(Some(&path), &flags).unwrap();
        assert_eq!(c.seed, Some(3));
        assert_eq!(c.n, Some(900));
        assert_eq!(c.m, Some(vec![1, 2]));
        assert_eq!(c.echo(), serde_json::json!({"gen": "cantor3", "m": [1, 2], "N": 900, "seed": 3}));
    }

    #[test]
    fn unknown_keys_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.json");
        std::fs::write(&path, r#"{"seed": 3, "colour": "red"}"#).unwrap();
        assert!(RunConfig::load(Some(&path), &RunConfig::default()).unwrap_err().is::<ConfigError>());
    }

    #[test]
    fn generators() {
        assert_eq!(parse_gen("cantor3").unwrap(), MeasureGen::cantor());
        assert_eq!(parse_gen("uniform3").unwrap().base(), 3);
        assert!(parse_gen("bernoulli:0.25,0.75").unwrap().entropy() > 0.0);
        assert!(parse_gen(r#"{"kind":"bernoulli","a":2,"p":[0.5,0.5]}"#).is_ok());
        assert!(parse_gen("bernoulli:0.2,0.2").is_err());
        assert!(parse_gen("lebesgue").is_err());
    }
}
