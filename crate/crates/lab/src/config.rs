use crate::{Experiment, LabError};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

/// Environment variable naming the default output directory.
pub const OUT_ENV: &str = "BBM_LAB_OUT";
pub const DEFAULT_OUT: &str = "lab-out";
pub const DEFAULT_SEED: u64 = 1;

/// Contents of a TOML config file. Every field is optional.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub experiment: Option<String>,
    pub seed: Option<u64>,
    pub replicas: Option<usize>,
    pub t: Option<f64>,
    pub gamma: Option<f64>,
    pub x: Option<f64>,
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub thresholds: BTreeMap<String, f64>,
}

impl FileConfig {
    pub fn parse(text: &str) -> Result<Self, LabError> {
        toml::from_str(text).map_err(|e| LabError::Config(format!("config file: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self, LabError> {
        let text = std::fs::read_to_string(path).map_err(|e| LabError::io(path, e))?;
        Self::parse(&text)
    }
}

/// Values given on the command line. They take precedence over the file.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Overrides {
    pub experiment: Option<String>,
    pub seed: Option<u64>,
    pub replicas: Option<usize>,
    pub t: Option<f64>,
    pub gamma: Option<f64>,
    pub x: Option<f64>,
    pub output_dir: Option<PathBuf>,
}

/// A fully resolved, validated run request.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub seed: u64,
    pub replicas: usize,
    pub t: Option<f64>,
    pub gamma: Option<f64>,
    pub x: Option<f64>,
    pub output_dir: PathBuf,
    /// Tolerance overrides keyed by check name.
    pub thresholds: BTreeMap<String, f64>,
}

impl ExperimentConfig {
    /// The experiment at its default scale.
    pub fn new(experiment: Experiment, seed: u64) -> Self {
        let d = experiment.defaults();
        Self {
            experiment,
            seed,
            replicas: d.replicas,
            t: d.t,
            gamma: d.gamma,
            x: d.x,
            output_dir: PathBuf::from(DEFAULT_OUT),
            thresholds: BTreeMap::new(),
        }
    }

    /// Precedence: flags, then the file, then `env_out` for the directory,
    /// then the experiment defaults.
    pub fn resolve(file: FileConfig, flags: Overrides, env_out: Option<PathBuf>) -> Result<Self, LabError> {
        let name =
            flags.experiment.or(file.experiment).ok_or_else(|| LabError::Config("no experiment named".into()))?;
        let experiment = Experiment::from_name(&name).ok_or_else(|| {
            let known: Vec<&str> = Experiment::ALL.iter().map(|e| e.name()).collect();
            LabError::Config(format!("unknown experiment '{name}'; known: {}", known.join(", ")))
        })?;
        let mut cfg = Self::new(experiment, flags.seed.or(file.seed).unwrap_or(DEFAULT_SEED));
        if let Some(n) = flags.replicas.or(file.replicas) {
            cfg.replicas = n;
        }
        cfg.t = flags.t.or(file.t).or(cfg.t);
        cfg.gamma = flags.gamma.or(file.gamma).or(cfg.gamma);
        cfg.x = flags.x.or(file.x).or(cfg.x);
        if let Some(dir) = flags.output_dir.or(file.output_dir).or(env_out) {
            cfg.output_dir = dir;
        }
        cfg.thresholds = file.thresholds;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), LabError> {
        let bad = |m: String| Err(LabError::Config(m));
        if self.replicas == 0 {
            return bad("replicas must be at least 1".into());
        }
        for (name, v) in [("t", self.t), ("gamma", self.gamma), ("x", self.x)] {
            if let Some(v) = v {
                if !(v > 0.0 && v.is_finite()) {
                    return bad(format!("{name} must be positive and finite, got {v}"));
                }
            }
        }
        if let Some(g) = self.gamma {
            if g >= 0.25 {
                return bad(format!("gamma must be below 0.25, got {g}"));
            }
        }
        if let Some((k, v)) = self.thresholds.iter().find(|(_, v)| !(v.is_finite() && **v >= 0.0)) {
            return bad(format!("threshold {k} must be a nonnegative number, got {v}"));
        }
        Ok(())
    }

    pub fn t(&self) -> f64 {
        self.t.or(self.experiment.defaults().t).unwrap_or(1.0)
    }

    pub fn x(&self) -> f64 {
        self.x.or(self.experiment.defaults().x).unwrap_or(1.0)
    }

    pub fn gamma(&self) -> f64 {
        self.gamma.or(self.experiment.defaults().gamma).unwrap_or(1e-4)
    }

    /// Directory holding this experiment's files.
    pub fn experiment_dir(&self) -> PathBuf {
        self.output_dir.join(self.experiment.name())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_win_over_the_file_and_env_is_the_last_resort() {
        let file = FileConfig::parse(
            "experiment = \"many-to-one\"\nseed = 5\nreplicas = 10\nx = 2.0\n[thresholds]\nmean-within-3-sigma = 0.5\n",
        )
        .unwrap();
        let flags = Overrides { seed: Some(9), x: Some(1.5), ..Default::default() };
        let cfg = ExperimentConfig::resolve(file.clone(), flags, Some("env-dir".into())).unwrap();
        assert_eq!(cfg.experiment, Experiment::ManyToOne);
        assert_eq!((cfg.seed, cfg.replicas, cfg.x), (9, 10, Some(1.5)));
        assert_eq!(cfg.output_dir, PathBuf::from("env-dir"));
        assert_eq!(cfg.thresholds["mean-within-3-sigma"], 0.5);
        let with_dir = FileConfig { output_dir: Some("file-dir".into()), ..file };
        let cfg = ExperimentConfig::resolve(with_dir, Overrides::default(), Some("env-dir".into())).unwrap();
        assert_eq!(cfg.output_dir, PathBuf::from("file-dir"));
    }

    #[test]
    fn invalid_requests_are_config_errors() {
        let named = |n: &str| Overrides { experiment: Some(n.into()), ..Default::default() };
        let err = ExperimentConfig::resolve(FileConfig::default(), named("nope"), None).unwrap_err();
        assert_eq!(err.exit_code(), crate::exit::CONFIG);
        let zero = Overrides { replicas: Some(0), ..named("triangle-model") };
        assert!(ExperimentConfig::resolve(FileConfig::default(), zero, None).is_err());
        let gamma = Overrides { gamma: Some(0.3), ..named("lemma5-min") };
        assert!(ExperimentConfig::resolve(FileConfig::default(), gamma, None).is_err());
        assert!(FileConfig::parse("colour = 3").is_err());
        assert!(ExperimentConfig::resolve(FileConfig::default(), Overrides::default(), None).is_err());
    }
}
