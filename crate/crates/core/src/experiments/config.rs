use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{KdnlsError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    L2law,
    SingleMode,
    PicardDemo,
    Nonuniform,
    Backward,
    GlobalDecay,
    HHalf,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 7] = [
        Self::L2law,
        Self::SingleMode,
        Self::PicardDemo,
        Self::Nonuniform,
        Self::Backward,
        Self::GlobalDecay,
        Self::HHalf,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::L2law => "l2law",
            Self::SingleMode => "single_mode",
            Self::PicardDemo => "picard_demo",
            Self::Nonuniform => "nonuniform",
            Self::Backward => "backward",
            Self::GlobalDecay => "global_decay",
            Self::HHalf => "h_half",
        }
    }

    /// Keys that must appear in the config file.
    pub fn required_keys(self) -> &'static [&'static str] {
        match self {
            Self::L2law | Self::SingleMode => &["K", "dt", "T"],
            Self::PicardDemo => &["K", "T"],
            Self::Nonuniform => &["N_list", "r"],
            Self::Backward => &["N_list", "T"],
            Self::GlobalDecay => &["s", "K", "T"],
            Self::HHalf => &["N_list"],
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExperimentKind {
    type Err = KdnlsError;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| KdnlsError::UnknownExperiment(s.to_string()))
    }
}

/// Experiment configuration as read from a flat TOML file.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub experiment: Option<ExperimentKind>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s: Option<f64>,
    #[serde(rename = "K", skip_serializing_if = "Option::is_none")]
    pub k_max: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    #[serde(rename = "T", skip_serializing_if = "Option::is_none")]
    pub t_final: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
    #[serde(rename = "N_list", skip_serializing_if = "Option::is_none")]
    pub n_list: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| KdnlsError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| KdnlsError::io(path, e))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| KdnlsError::Serialization(e.to_string()))
    }

    fn has(&self, key: &str) -> bool {
        match key {
            "alpha" => self.alpha.is_some(),
            "beta" => self.beta.is_some(),
            "s" => self.s.is_some(),
            "K" => self.k_max.is_some(),
            "dt" => self.dt.is_some(),
            "T" => self.t_final.is_some(),
            "r" => self.r.is_some(),
            "N_list" => self.n_list.is_some(),
            "seed" => self.seed.is_some(),
            "output_dir" => self.output_dir.is_some(),
            _ => false,
        }
    }

    /// Fixes the experiment kind (a command-line choice must agree with the file)
    /// and fills every unset key with the experiment default.
    pub fn resolve(&self, requested: Option<ExperimentKind>) -> Result<ResolvedConfig> {
        let kind = match (requested, self.experiment) {
            (Some(a), Some(b)) if a != b => {
                return Err(KdnlsError::Config(format!(
                    "config is for experiment `{b}` but `{a}` was requested"
                )))
            }
            (Some(a), _) => a,
            (None, Some(b)) => b,
            (None, None) => {
                return Err(KdnlsError::Config("no experiment named".into()));
            }
        };
        let missing: Vec<&str> = kind
            .required_keys()
            .iter()
            .copied()
            .filter(|k| !self.has(k))
            .collect();
        if !missing.is_empty() {
            return Err(KdnlsError::Config(format!(
                "experiment `{kind}` requires keys {missing:?}"
            )));
        }
        let d = ResolvedConfig::defaults(kind);
        let resolved = ResolvedConfig {
            experiment: kind,
            alpha: self.alpha.unwrap_or(d.alpha),
            beta: self.beta.unwrap_or(d.beta),
            s: self.s.unwrap_or(d.s),
            k_max: self.k_max.unwrap_or(d.k_max),
            dt: self.dt.unwrap_or(d.dt),
            t_final: self.t_final.unwrap_or(d.t_final),
            r: self.r.unwrap_or(d.r),
            n_list: self.n_list.clone().unwrap_or(d.n_list),
            seed: self.seed.unwrap_or(d.seed),
            output_dir: self.output_dir.clone().unwrap_or(d.output_dir),
        };
        resolved.validate()?;
        Ok(resolved)
    }
}

/// Fully specified configuration of one run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResolvedConfig {
    pub experiment: ExperimentKind,
    pub alpha: f64,
    pub beta: f64,
    pub s: f64,
    #[serde(rename = "K")]
    pub k_max: usize,
    pub dt: f64,
    #[serde(rename = "T")]
    pub t_final: f64,
    pub r: f64,
    #[serde(rename = "N_list")]
    pub n_list: Vec<usize>,
    pub seed: u64,
    pub output_dir: PathBuf,
}

impl ResolvedConfig {
    pub fn defaults(kind: ExperimentKind) -> Self {
        let base = Self {
            experiment: kind,
            alpha: 1.0,
            beta: -1.0,
            s: 1.0,
            k_max: 64,
            dt: 1e-3,
            t_final: 1.0,
            r: 0.05,
            n_list: Vec::new(),
            seed: 0,
            output_dir: PathBuf::from("runs").join(kind.name()),
        };
        match kind {
            ExperimentKind::L2law => base,
            ExperimentKind::SingleMode => Self {
                k_max: 8,
                r: 1.0,
                ..base
            },
            ExperimentKind::PicardDemo => Self { k_max: 32, ..base },
            ExperimentKind::Nonuniform => Self {
                r: 0.1,
                n_list: vec![16, 64, 256, 1024],
                ..base
            },
            ExperimentKind::Backward => Self {
                beta: -5.0,
                dt: 5e-4,
                t_final: 2.0,
                r: 0.3,
                n_list: vec![32, 64, 128],
                ..base
            },
            ExperimentKind::GlobalDecay => Self {
                s: 0.75,
                dt: 2e-3,
                t_final: 10.0,
                ..base
            },
            ExperimentKind::HHalf => Self {
                n_list: vec![16, 64, 256, 1024, 4096],
                ..base
            },
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(KdnlsError::Config(msg));
        for (name, v) in [
            ("alpha", self.alpha),
            ("beta", self.beta),
            ("s", self.s),
            ("dt", self.dt),
            ("T", self.t_final),
            ("r", self.r),
        ] {
            if !v.is_finite() {
                return bad(format!("{name} must be finite"));
            }
        }
        if self.k_max == 0 {
            return bad("K must be at least 1".into());
        }
        if self.dt <= 0.0 || self.t_final <= 0.0 || self.dt > self.t_final {
            return bad(format!("need 0 < dt <= T, got dt = {}, T = {}", self.dt, self.t_final));
        }
        if self.r <= 0.0 {
            return bad(format!("r must be positive, got {}", self.r));
        }
        use ExperimentKind::*;
        match self.experiment {
            PicardDemo | Nonuniform if self.s <= 0.5 => {
                return bad(format!("s must exceed 1/2, got {}", self.s));
            }
            GlobalDecay if !(self.s > 0.5 && self.s < 1.5) => {
                return bad(format!("global_decay needs 1/2 < s < 3/2, got {}", self.s));
            }
            _ => {}
        }
        match self.experiment {
            Nonuniform => {
                if self.beta >= 0.0 {
                    return bad("nonuniform needs beta < 0".into());
                }
                if self.r >= 1.0 {
                    return bad("nonuniform needs 0 < r < 1".into());
                }
                if self.n_list.iter().any(|&n| n < 2) {
                    return bad("nonuniform needs every N >= 2".into());
                }
            }
            Backward => {
                if self.beta == 0.0 {
                    return bad("backward needs beta != 0".into());
                }
                if self.n_list.len() < 2 || self.n_list.windows(2).any(|w| w[1] <= w[0]) {
                    return bad("backward needs an increasing list of at least two K".into());
                }
            }
            HHalf => {
                if self.n_list.is_empty() || self.n_list.windows(2).any(|w| w[1] <= w[0]) {
                    return bad("h_half needs an ascending n list".into());
                }
                if self.n_list[0] < 2 {
                    return bad("h_half needs n >= 2".into());
                }
            }
            PicardDemo if self.beta >= 0.0 => {
                return bad("picard_demo needs beta < 0".into());
            }
            SingleMode if self.k_max < 3 => {
                return bad("single_mode evolves mode 3 and needs K >= 3".into());
            }
            _ => {}
        }
        if matches!(self.experiment, Nonuniform | Backward | HHalf) && self.n_list.is_empty() {
            return bad("N_list must not be empty".into());
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_flat_keys() {
        let c = ExperimentConfig::from_toml_str(
            "experiment = \"l2law\"\nalpha = 1.0\nbeta = -1.0\nK = 32\ndt = 0.001\nT = 0.5\nN_list = [1, 2]\n",
        )
        .unwrap();
        assert_eq!(c.experiment, Some(ExperimentKind::L2law));
        assert_eq!(c.k_max, Some(32));
        assert_eq!(c.n_list, Some(vec![1, 2]));
        let r = c.resolve(None).unwrap();
        assert_eq!(r.t_final, 0.5);
        assert_eq!(r.r, 0.05);
    }

    #[test]
    fn rejects_unknown_keys() {
        assert!(ExperimentConfig::from_toml_str("K = 3\nfoo = 1\n").is_err());
        assert!(ExperimentConfig::from_toml_str("experiment = \"nope\"\n").is_err());
    }

    #[test]
    fn required_keys_and_conflicts() {
        let c = ExperimentConfig::from_toml_str("experiment = \"l2law\"\nK = 8\n").unwrap();
        assert!(matches!(c.resolve(None), Err(KdnlsError::Config(_))));
        let c = ExperimentConfig::from_toml_str("experiment = \"h_half\"\nN_list = [16]\n").unwrap();
        assert!(c.resolve(Some(ExperimentKind::Backward)).is_err());
        assert!(c.resolve(Some(ExperimentKind::HHalf)).is_ok());
        assert!(ExperimentConfig::default().resolve(None).is_err());
    }

    #[test]
    fn regime_checks() {
        let c = ExperimentConfig::from_toml_str("N_list = [16]\nr = 0.1\ns = 0.4\n").unwrap();
        assert!(c.resolve(Some(ExperimentKind::Nonuniform)).is_err());
        let c = ExperimentConfig::from_toml_str("N_list = [64, 32]\nT = 1.0\n").unwrap();
        assert!(c.resolve(Some(ExperimentKind::Backward)).is_err());
    }

    #[test]
    fn names_round_trip() {
        for k in ExperimentKind::ALL {
            assert_eq!(k.name().parse::<ExperimentKind>().unwrap(), k);
        }
        assert!(matches!(
            "bogus".parse::<ExperimentKind>(),
            Err(KdnlsError::UnknownExperiment(_))
        ));
    }
}
