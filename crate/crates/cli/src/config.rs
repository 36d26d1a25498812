//! JSON model and integrator configuration.

use std::path::Path;

use floquet_qa::models::{build_dual, build_generic, build_schwinger_rabi, build_two_tone, FourierTerm};
use floquet_qa::{
    CMatrix, Complex64, IntegratorConfig, PeriodicHamiltonian, Scheme, SchwingerRabiParams, TwoToneParams,
};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{AppError, AppResult};

/// `{"model": ..., "params": {...}}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", content = "params", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelSpec {
    #[serde(alias = "schwinger-rabi")]
    SchwingerRabi {
        omega0: f64,
        theta: f64,
        omega: f64,
    },
    Dual {
        omega0: f64,
        theta: f64,
        omega: f64,
    },
    #[serde(alias = "two-tone")]
    TwoTone {
        omega0: f64,
        v: f64,
        #[serde(default)]
        v_prime: f64,
        omega: f64,
        n_tone: u32,
        #[serde(default)]
        truncated: bool,
    },
    Generic {
        dimension: usize,
        period: f64,
        terms: Vec<TermSpec>,
    },
}

/// One Fourier harmonic; matrices are row lists whose entries are either a
/// real number or a `[re, im]` pair. A missing matrix is zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermSpec {
    pub harmonic: u32,
    #[serde(default)]
    pub cos: Option<Vec<Vec<Entry>>>,
    #[serde(default)]
    pub sin: Option<Vec<Vec<Entry>>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Entry {
    Real(f64),
    Complex([f64; 2]),
}

impl Entry {
    fn value(self) -> Complex64 {
        match self {
            Entry::Real(re) => Complex64::new(re, 0.0),
            Entry::Complex([re, im]) => Complex64::new(re, im),
        }
    }
}

fn matrix(rows: &Option<Vec<Vec<Entry>>>, n: usize, what: &str) -> AppResult<CMatrix> {
    let Some(rows) = rows else {
        return Ok(CMatrix::zeros(n, n));
    };
    if rows.len() != n || rows.iter().any(|r| r.len() != n) {
        return Err(AppError::config(format!("{what} must be a {n}x{n} matrix")));
    }
    Ok(CMatrix::from_fn(n, n, |i, j| rows[i][j].value()))
}

impl ModelSpec {
    pub fn from_json(text: &str) -> AppResult<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: &Path) -> AppResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| AppError::Io { path: path.to_path_buf(), source })?;
        Self::from_json(&text)
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            ModelSpec::SchwingerRabi { .. } => "schwinger_rabi",
            ModelSpec::Dual { .. } => "dual",
            ModelSpec::TwoTone { .. } => "two_tone",
            ModelSpec::Generic { .. } => "generic",
        }
    }

    /// Parameters of the driven two-level model underlying this spec, if any.
    pub fn driven_params(&self) -> Option<SchwingerRabiParams> {
        match *self {
            ModelSpec::SchwingerRabi { omega0, theta, omega } | ModelSpec::Dual { omega0, theta, omega } => {
                Some(SchwingerRabiParams { omega0, theta, omega })
            }
            _ => None,
        }
    }

    pub fn two_tone_params(&self) -> Option<(TwoToneParams, bool)> {
        match *self {
            ModelSpec::TwoTone { omega0, v, v_prime, omega, n_tone, truncated } => {
                Some((TwoToneParams { omega0, v, v_prime, omega, n_tone }, truncated))
            }
            _ => None,
        }
    }

    pub fn build(&self, cfg: &IntegratorConfig) -> AppResult<PeriodicHamiltonian> {
        let h = match self {
            ModelSpec::SchwingerRabi { .. } => build_schwinger_rabi(self.driven_params().expect("driven spec"))?,
            ModelSpec::Dual { .. } => {
                let base = build_schwinger_rabi(self.driven_params().expect("driven spec"))?;
                build_dual(&base, cfg)?
            }
            ModelSpec::TwoTone { .. } => {
                let (p, truncated) = self.two_tone_params().expect("two-tone spec");
                build_two_tone(p, truncated)?
            }
            ModelSpec::Generic { dimension, period, terms } => {
                let terms = terms
                    .iter()
                    .map(|t| {
                        Ok(FourierTerm {
                            harmonic: t.harmonic,
                            cos: matrix(&t.cos, *dimension, "cos coefficient")?,
                            sin: matrix(&t.sin, *dimension, "sin coefficient")?,
                        })
                    })
                    .collect::<AppResult<Vec<_>>>()?;
                build_generic(*dimension, *period, terms)?
            }
        };
        Ok(h)
    }

    /// Names accepted by [`ModelSpec::set_param`].
    pub fn param_names(&self) -> &'static [&'static str] {
        match self {
            ModelSpec::SchwingerRabi { .. } | ModelSpec::Dual { .. } => &["omega0", "theta", "omega"],
            ModelSpec::TwoTone { .. } => &["omega0", "v", "v_prime", "omega", "n_tone"],
            ModelSpec::Generic { .. } => &["period"],
        }
    }

    /// Overwrites one scalar parameter, as used by sweep axes.
    pub fn set_param(&mut self, name: &str, value: f64) -> AppResult<()> {
        let slot = match (self, name) {
            (ModelSpec::SchwingerRabi { omega0, .. } | ModelSpec::Dual { omega0, .. }, "omega0") => omega0,
            (ModelSpec::SchwingerRabi { theta, .. } | ModelSpec::Dual { theta, .. }, "theta") => theta,
            (ModelSpec::SchwingerRabi { omega, .. } | ModelSpec::Dual { omega, .. }, "omega") => omega,
            (ModelSpec::TwoTone { omega0, .. }, "omega0") => omega0,
            (ModelSpec::TwoTone { v, .. }, "v") => v,
            (ModelSpec::TwoTone { v_prime, .. }, "v_prime") => v_prime,
            (ModelSpec::TwoTone { omega, .. }, "omega") => omega,
            (ModelSpec::TwoTone { n_tone, .. }, "n_tone") => {
                if value < 1.0 || value.fract() != 0.0 || value > f64::from(u32::MAX) {
                    return Err(AppError::config(format!("n_tone must be a positive integer, got {value}")));
                }
                *n_tone = value as u32;
                return Ok(());
            }
            (ModelSpec::Generic { period, .. }, "period") => period,
            (spec, _) => {
                return Err(AppError::config(format!(
                    "model {} has no sweepable parameter {name:?} (expected one of {:?})",
                    spec.kind_name(),
                    spec.param_names()
                )))
            }
        };
        *slot = value;
        Ok(())
    }

    pub fn get_param(&self, name: &str) -> Option<f64> {
        match (self, name) {
            (ModelSpec::SchwingerRabi { omega0, .. } | ModelSpec::Dual { omega0, .. }, "omega0") => Some(*omega0),
            (ModelSpec::SchwingerRabi { theta, .. } | ModelSpec::Dual { theta, .. }, "theta") => Some(*theta),
            (ModelSpec::SchwingerRabi { omega, .. } | ModelSpec::Dual { omega, .. }, "omega") => Some(*omega),
            (ModelSpec::TwoTone { omega0, .. }, "omega0") => Some(*omega0),
            (ModelSpec::TwoTone { v, .. }, "v") => Some(*v),
            (ModelSpec::TwoTone { v_prime, .. }, "v_prime") => Some(*v_prime),
            (ModelSpec::TwoTone { omega, .. }, "omega") => Some(*omega),
            (ModelSpec::TwoTone { n_tone, .. }, "n_tone") => Some(f64::from(*n_tone)),
            (ModelSpec::Generic { period, .. }, "period") => Some(*period),
            _ => None,
        }
    }

    /// The `params` object as JSON.
    pub fn params_json(&self) -> Value {
        serde_json::to_value(self).ok().and_then(|v| v.get("params").cloned()).unwrap_or(Value::Null)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum SchemeName {
    #[default]
    Magnus4,
    #[value(alias = "midpoint_exponential")]
    MidpointExponential,
}

/// Serializable mirror of [`IntegratorConfig`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IntegratorSettings {
    pub steps_per_period: usize,
    pub scheme: SchemeName,
    pub unitarity_tol: f64,
}

impl Default for IntegratorSettings {
    fn default() -> Self {
        IntegratorSettings::from(IntegratorConfig::default())
    }
}

impl From<IntegratorConfig> for IntegratorSettings {
    fn from(cfg: IntegratorConfig) -> Self {
        IntegratorSettings {
            steps_per_period: cfg.steps_per_period,
            scheme: match cfg.scheme {
                Scheme::Magnus4 => SchemeName::Magnus4,
                Scheme::MidpointExponential => SchemeName::MidpointExponential,
            },
            unitarity_tol: cfg.unitarity_tol,
        }
    }
}

impl IntegratorSettings {
    pub fn to_config(self) -> AppResult<IntegratorConfig> {
        let cfg = IntegratorConfig {
            steps_per_period: self.steps_per_period,
            scheme: match self.scheme {
                SchemeName::Magnus4 => Scheme::Magnus4,
                SchemeName::MidpointExponential => Scheme::MidpointExponential,
            },
            unitarity_tol: self.unitarity_tol,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}
