//! Line-oriented experiment configuration.
//!
//! Files contain `section.key = value` lines, `#` comments, and blank lines.
//! Unknown keys are rejected with the offending line number so typos cannot
//! silently fall back to defaults.
//!
//! ```
//! use qreservoir::config::{ExperimentConfig, ExperimentKind};
//!
//! let text = "\
//! experiment.kind = timer
//! experiment.realizations = 10
//! task.c = 500
//! task.tau = 5, 20
//! spin.n_spins = 10
//! ";
//! let config = ExperimentConfig::parse(text)?;
//! assert_eq!(config.kind, ExperimentKind::Timer);
//! assert_eq!(config.task.tau, vec![5, 20]);
//! # Ok::<(), qreservoir::error::QrError>(())
//! ```

use std::fmt;
use std::path::Path;

use crate::error::{QrError, Result};
use crate::gaussian::GaussianConfig;
use crate::spin::{Encoding, ObservableSet, SpinConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentKind {
    /// Spin reservoir learning a delayed one-hot response to a step input.
    Timer,
    /// Oscillator network classifying the squeezing strength of its input.
    Classify,
    /// Information processing capacity sweep of the spin reservoir.
    Ipc,
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            ExperimentKind::Timer => "timer",
            ExperimentKind::Classify => "classify",
            ExperimentKind::Ipc => "ipc",
        };
        f.write_str(name)
    }
}

/// Task-level knobs; which fields matter depends on [`ExperimentKind`].
#[derive(Debug, Clone, PartialEq)]
pub struct TaskConfig {
    /// Timer: step position.
    pub c: usize,
    /// Timer: countdown lengths to evaluate.
    pub tau: Vec<usize>,
    /// Timer / ipc: sequence length.
    pub length: usize,
    /// Classify: class counts to sweep.
    pub n_classes: Vec<usize>,
    /// Classify: draw phases uniformly instead of fixing them to zero.
    pub random_phase: bool,
    pub n_train: usize,
    pub n_test: usize,
    /// Ipc: maximum total polynomial degree.
    pub d_max: usize,
    /// Ipc: delays run over `0..delay_max`.
    pub delay_max: usize,
    /// Ridge penalty for readout training (0 = plain least squares).
    pub ridge: f64,
}

impl Default for TaskConfig {
    fn default() -> Self {
        TaskConfig {
            c: 500,
            tau: vec![5, 20],
            length: 800,
            n_classes: vec![2, 3, 4, 5, 6, 7, 8],
            random_phase: false,
            n_train: 500,
            n_test: 200,
            d_max: 3,
            delay_max: 10,
            ridge: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    /// Independent coupling realizations to average over.
    pub realizations: usize,
    /// Base seed; realization `r` uses `seed + r`.
    pub seed: u64,
    /// Steps dropped before training (timer / ipc).
    pub washout: usize,
    pub spin: SpinConfig,
    pub gaussian: GaussianConfig,
    pub task: TaskConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            kind: ExperimentKind::Timer,
            realizations: 10,
            seed: 0,
            washout: 400,
            spin: SpinConfig::default(),
            gaussian: GaussianConfig::default(),
            task: TaskConfig::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut config = ExperimentConfig::default();
        let mut classify_realizations_set = false;
        for (index, raw_line) in text.lines().enumerate() {
            let line_no = index + 1;
            let line = match raw_line.find('#') {
                Some(pos) => &raw_line[..pos],
                None => raw_line,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| QrError::Config {
                line: line_no,
                msg: format!("expected `section.key = value`, got `{line}`"),
            })?;
            let key = key.trim();
            let value = value.trim();
            if key == "experiment.realizations" {
                classify_realizations_set = true;
            }
            config.apply(key, value, line_no)?;
        }
        // the classification benchmark defaults to a larger ensemble
        if config.kind == ExperimentKind::Classify && !classify_realizations_set {
            config.realizations = 100;
        }
        config.validate()?;
        Ok(config)
    }

    fn apply(&mut self, key: &str, value: &str, line: usize) -> Result<()> {
        let bad = |msg: String| QrError::Config { line, msg };
        macro_rules! parse {
            ($ty:ty) => {
                value
                    .parse::<$ty>()
                    .map_err(|_| bad(format!("cannot parse `{value}` for `{key}`")))?
            };
        }
        match key {
            "experiment.kind" => {
                self.kind = match value {
                    "timer" => ExperimentKind::Timer,
                    "classify" => ExperimentKind::Classify,
                    "ipc" => ExperimentKind::Ipc,
                    other => {
                        return Err(bad(format!(
                            "unknown experiment kind `{other}` (expected timer, classify, or ipc)"
                        )))
                    }
                }
            }
            "experiment.realizations" => self.realizations = parse!(usize),
            "experiment.seed" => self.seed = parse!(u64),
            "experiment.washout" => self.washout = parse!(usize),

            "spin.n_spins" => self.spin.n_spins = parse!(usize),
            "spin.field_h" => self.spin.field_h = parse!(f64),
            "spin.coupling_low" => self.spin.coupling_low = parse!(f64),
            "spin.coupling_high" => self.spin.coupling_high = parse!(f64),
            "spin.dt" => self.spin.dt = parse!(f64),
            "spin.multiplex_v" => self.spin.multiplex_v = parse!(usize),
            "spin.input_qubit" => self.spin.input_qubit = parse!(usize),
            "spin.encoding" => {
                self.spin.encoding = match value {
                    "pure" => Encoding::Pure,
                    "mixed" => Encoding::Mixed,
                    other => return Err(bad(format!("unknown encoding `{other}`"))),
                }
            }
            "spin.observables" => {
                self.spin.observable_set = match value {
                    "z" => ObservableSet::Z,
                    "xyz" => ObservableSet::Xyz,
                    "xyz_zz" => ObservableSet::XyzZz,
                    other => return Err(bad(format!("unknown observable set `{other}`"))),
                }
            }

            "gaussian.n_osc" => self.gaussian.n_osc = parse!(usize),
            "gaussian.omega0" => self.gaussian.omega0 = parse!(f64),
            "gaussian.coupling_low" => self.gaussian.coupling_low = parse!(f64),
            "gaussian.coupling_high" => self.gaussian.coupling_high = parse!(f64),
            "gaussian.dt" => self.gaussian.dt = parse!(f64),
            "gaussian.input_osc" => self.gaussian.input_osc = parse!(usize),

            "task.c" => self.task.c = parse!(usize),
            "task.tau" => self.task.tau = parse_list(value, line)?,
            "task.length" => self.task.length = parse!(usize),
            "task.n_classes" => self.task.n_classes = parse_list(value, line)?,
            "task.random_phase" => {
                self.task.random_phase = match value {
                    "true" => true,
                    "false" => false,
                    other => return Err(bad(format!("expected true/false, got `{other}`"))),
                }
            }
            "task.n_train" => self.task.n_train = parse!(usize),
            "task.n_test" => self.task.n_test = parse!(usize),
            "task.d_max" => self.task.d_max = parse!(usize),
            "task.delay_max" => self.task.delay_max = parse!(usize),
            "task.ridge" => self.task.ridge = parse!(f64),

            other => return Err(bad(format!("unknown key `{other}`"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.realizations == 0 {
            return Err(QrError::Domain("realizations must be at least 1".into()));
        }
        match self.kind {
            ExperimentKind::Timer => {
                self.spin.validate()?;
                if self.task.tau.is_empty() {
                    return Err(QrError::Domain("timer needs at least one tau".into()));
                }
                for &tau in &self.task.tau {
                    if self.task.c + tau >= self.task.length {
                        return Err(QrError::Domain(format!(
                            "timer needs c + tau < length (got {} + {tau} >= {})",
                            self.task.c, self.task.length
                        )));
                    }
                }
                if self.washout > self.task.c {
                    return Err(QrError::Domain(
                        "washout must not extend past the timer step c".into(),
                    ));
                }
            }
            ExperimentKind::Classify => {
                self.gaussian.validate()?;
                if self.task.n_classes.is_empty() {
                    return Err(QrError::Domain("classify needs at least one class count".into()));
                }
                if self.task.n_classes.iter().any(|&n| n < 2) {
                    return Err(QrError::Domain("class counts must be at least 2".into()));
                }
                if self.task.n_train == 0 || self.task.n_test == 0 {
                    return Err(QrError::Domain("train and test sets must be non-empty".into()));
                }
            }
            ExperimentKind::Ipc => {
                self.spin.validate()?;
                if self.task.d_max < 1 || self.task.delay_max < 1 {
                    return Err(QrError::Domain("ipc needs d_max >= 1 and delay_max >= 1".into()));
                }
                if self.washout < self.task.delay_max {
                    return Err(QrError::Domain(format!(
                        "washout {} must cover delay_max {}",
                        self.washout, self.task.delay_max
                    )));
                }
                if self.task.length <= self.washout {
                    return Err(QrError::Domain("length must exceed washout".into()));
                }
            }
        }
        if !(self.task.ridge >= 0.0) {
            return Err(QrError::Domain("ridge must be non-negative".into()));
        }
        Ok(())
    }
}

fn parse_list(value: &str, line: usize) -> Result<Vec<usize>> {
    value
        .split(',')
        .map(|part| {
            part.trim().parse::<usize>().map_err(|_| QrError::Config {
                line,
                msg: format!("cannot parse list entry `{}`", part.trim()),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip_through_empty_file() {
        let config = ExperimentConfig::parse("").unwrap();
        assert_eq!(config, ExperimentConfig::default());
        assert_eq!(config.spin.n_spins, 10);
        assert_eq!(config.spin.field_h, 10.0);
        assert_eq!(config.spin.dt, 10.0);
        assert_eq!(config.gaussian.n_osc, 4);
        assert_eq!(config.gaussian.omega0, 0.25);
        assert_eq!(config.task.c, 500);
        assert_eq!(config.washout, 400);
    }

    #[test]
    fn comments_and_blank_lines_are_ignored() {
        let text = "\n# full-line comment\nexperiment.seed = 7  # trailing comment\n\n";
        let config = ExperimentConfig::parse(text).unwrap();
        assert_eq!(config.seed, 7);
    }

    #[test]
    fn unknown_keys_name_their_line() {
        let text = "experiment.kind = timer\nspin.nspins = 10\n";
        match ExperimentConfig::parse(text) {
            Err(QrError::Config { line, msg }) => {
                assert_eq!(line, 2);
                assert!(msg.contains("spin.nspins"), "{msg}");
            }
            other => panic!("expected config error, got {other:?}"),
        }
    }

    #[test]
    fn malformed_lines_are_rejected() {
        assert!(matches!(
            ExperimentConfig::parse("experiment.kind timer"),
            Err(QrError::Config { line: 1, .. })
        ));
        assert!(matches!(
            ExperimentConfig::parse("experiment.seed = not_a_number"),
            Err(QrError::Config { line: 1, .. })
        ));
    }

    #[test]
    fn comma_lists_parse_with_whitespace() {
        let config =
            ExperimentConfig::parse("task.tau = 5 , 20\ntask.n_classes = 2,3,8\n").unwrap();
        assert_eq!(config.task.tau, vec![5, 20]);
        assert_eq!(config.task.n_classes, vec![2, 3, 8]);
    }

    #[test]
    fn oversized_register_is_rejected() {
        let text = "experiment.kind = timer\nspin.n_spins = 16\n";
        assert!(matches!(ExperimentConfig::parse(text), Err(QrError::Domain(_))));
    }

    #[test]
    fn classify_defaults_to_larger_ensemble() {
        let config = ExperimentConfig::parse("experiment.kind = classify\n").unwrap();
        assert_eq!(config.realizations, 100);
        let config =
            ExperimentConfig::parse("experiment.kind = classify\nexperiment.realizations = 5\n")
                .unwrap();
        assert_eq!(config.realizations, 5);
    }

    #[test]
    fn cross_field_validation_catches_inconsistency() {
        let text = "experiment.kind = timer\ntask.c = 790\ntask.tau = 20\ntask.length = 800\n";
        assert!(ExperimentConfig::parse(text).is_err());
        let text = "experiment.kind = ipc\nexperiment.washout = 5\ntask.delay_max = 10\n";
        assert!(ExperimentConfig::parse(text).is_err());
    }
}
