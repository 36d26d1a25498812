//! Grid sweeps over model parameters.

use std::collections::BTreeSet;
use std::path::Path;

use floquet_qa::conditions::{analyze_with, min_overlaps, AnalysisOptions, ConditionReport, Threshold};
use floquet_qa::oracle;
use floquet_qa::{IntegratorConfig, PeriodicHamiltonian};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::config::{IntegratorSettings, ModelSpec};
use crate::error::{AppError, AppResult};
use crate::output::{Cell, Metadata, Table};

/// Horizon, in periods, for the direct evolution behind `overlap_min`.
pub const DEFAULT_EVOLUTION_PERIODS: f64 = 20.0;
/// Sweeps flag quasienergy degeneracy below this gap factor. Integrator
/// error leaves exact resonances at about 1e-11, above the library default.
pub const SWEEP_DEGENERACY_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    ExactPopulation,
    TwoDelta,
    Ratios,
    Verdicts,
    OverlapMin,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scale {
    #[default]
    Linear,
    Log,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Axis {
    pub param: String,
    pub min: f64,
    pub max: f64,
    pub points: usize,
    #[serde(default)]
    pub scale: Scale,
}

impl Axis {
    pub fn linear(param: &str, min: f64, max: f64, points: usize) -> Self {
        Axis { param: param.into(), min, max, points, scale: Scale::Linear }
    }

    pub fn validate(&self) -> AppResult<()> {
        if self.points < 2 {
            return Err(AppError::config(format!("axis {} needs at least 2 points", self.param)));
        }
        if !(self.min.is_finite() && self.max.is_finite() && self.min < self.max) {
            return Err(AppError::config(format!("axis {} needs finite min < max", self.param)));
        }
        if self.scale == Scale::Log && self.min <= 0.0 {
            return Err(AppError::config(format!("log axis {} needs a positive minimum", self.param)));
        }
        Ok(())
    }

    /// End points included.
    pub fn values(&self) -> Vec<f64> {
        let last = (self.points - 1) as f64;
        (0..self.points)
            .map(|k| {
                let f = k as f64 / last;
                match self.scale {
                    Scale::Linear => self.min + f * (self.max - self.min),
                    Scale::Log => (self.min.ln() + f * (self.max.ln() - self.min.ln())).exp(),
                }
            })
            .collect()
    }
}

fn default_quantities() -> Vec<Quantity> {
    vec![Quantity::ExactPopulation, Quantity::TwoDelta, Quantity::Ratios, Quantity::Verdicts]
}
fn default_periods() -> f64 {
    DEFAULT_EVOLUTION_PERIODS
}
fn default_delta_t() -> f64 {
    Threshold::default().delta_t
}
fn default_degeneracy_tol() -> f64 {
    SWEEP_DEGENERACY_TOL
}
fn default_profile_samples() -> usize {
    floquet_qa::spectrum::DEFAULT_PROFILE_SAMPLES
}

/// A sweep description, readable from JSON:
/// `{"model": ..., "params": {...}, "axes": [...], "quantities": [...], ...}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub model: String,
    pub params: Value,
    pub axes: Vec<Axis>,
    #[serde(default = "default_quantities")]
    pub quantities: Vec<Quantity>,
    #[serde(default = "default_periods")]
    pub evolution_periods: f64,
    /// Skip points where the closed-form gap factor marks a Floquet
    /// resonance; such rows carry the `masked` marker.
    #[serde(default)]
    pub resonance_mask: bool,
    #[serde(default = "default_delta_t")]
    pub delta_t: f64,
    #[serde(default = "default_degeneracy_tol")]
    pub degeneracy_tol: f64,
    #[serde(default = "default_profile_samples")]
    pub profile_samples: usize,
    #[serde(default)]
    pub integrator: IntegratorSettings,
}

impl SweepSpec {
    pub fn new(model: &ModelSpec, axes: Vec<Axis>, quantities: Vec<Quantity>) -> Self {
        SweepSpec {
            model: model.kind_name().into(),
            params: model.params_json(),
            axes,
            quantities,
            evolution_periods: DEFAULT_EVOLUTION_PERIODS,
            resonance_mask: false,
            delta_t: default_delta_t(),
            degeneracy_tol: SWEEP_DEGENERACY_TOL,
            profile_samples: default_profile_samples(),
            integrator: IntegratorSettings::default(),
        }
    }

    pub fn from_json(text: &str) -> AppResult<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: &Path) -> AppResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| AppError::Io { path: path.to_path_buf(), source })?;
        Self::from_json(&text)
    }

    pub fn base_model(&self) -> AppResult<ModelSpec> {
        Ok(serde_json::from_value(json!({ "model": self.model, "params": self.params }))?)
    }

    pub fn analysis_options(&self) -> AppResult<AnalysisOptions> {
        Ok(AnalysisOptions {
            integrator: self.integrator.to_config()?,
            threshold: Threshold::new(self.delta_t)?,
            profile_samples: self.profile_samples,
            degeneracy_tol: self.degeneracy_tol,
        })
    }

    fn wants(&self, q: Quantity) -> bool {
        self.quantities.contains(&q)
    }

    pub fn validate(&self) -> AppResult<()> {
        let base = self.base_model()?;
        if self.axes.is_empty() || self.axes.len() > 2 {
            return Err(AppError::config("a sweep takes one or two axes"));
        }
        for axis in &self.axes {
            axis.validate()?;
            if base.get_param(&axis.param).is_none() {
                return Err(AppError::config(format!(
                    "model {} has no sweepable parameter {:?} (expected one of {:?})",
                    base.kind_name(),
                    axis.param,
                    base.param_names()
                )));
            }
        }
        if self.axes.len() == 2 && self.axes[0].param == self.axes[1].param {
            return Err(AppError::config("the two axes must sweep different parameters"));
        }
        if !(self.evolution_periods > 0.0 && self.evolution_periods.is_finite()) {
            return Err(AppError::config("evolution_periods must be positive"));
        }
        let unique: BTreeSet<_> = self.quantities.iter().collect();
        if unique.len() != self.quantities.len() {
            return Err(AppError::config("quantities must not repeat"));
        }
        self.analysis_options()?;
        Ok(())
    }

    pub fn columns(&self) -> Vec<String> {
        let mut cols: Vec<String> = self.axes.iter().map(|a| a.param.clone()).collect();
        let mut add = |names: &[&str]| cols.extend(names.iter().map(|s| s.to_string()));
        if self.wants(Quantity::ExactPopulation) {
            add(&["exact_population_oracle", "exact_criterion_oracle"]);
        }
        if self.wants(Quantity::TwoDelta) {
            add(&["delta", "two_delta", "gap_factor", "bound_overlap"]);
        }
        if self.wants(Quantity::Ratios) {
            add(&["traditional_ratio", "frequency_ratio", "floquet_ratio", "arc", "domain_violation"]);
        }
        if self.wants(Quantity::Verdicts) {
            add(&["exact", "traditional", "frequency", "floquet"]);
        }
        if self.wants(Quantity::OverlapMin) {
            add(&["overlap_min", "overlap_min_oracle"]);
        }
        if !self.quantities.is_empty() {
            add(&["error"]);
        }
        cols
    }

    /// Parameter values of every grid point, row-major over the axes.
    pub fn grid(&self) -> Vec<Vec<f64>> {
        match self.axes.as_slice() {
            [a] => a.values().into_iter().map(|x| vec![x]).collect(),
            [a, b] => {
                let inner = b.values();
                a.values().into_iter().flat_map(|x| inner.iter().map(move |&y| vec![x, y])).collect()
            }
            _ => Vec::new(),
        }
    }
}

/// Closed-form results available for a model, used for `_oracle` columns.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct OracleValues {
    pub exact_population: Option<f64>,
    pub exact_criterion: Option<f64>,
    pub min_overlap: Option<f64>,
    pub gap_factor: Option<f64>,
}

pub fn oracle_values(model: &ModelSpec) -> OracleValues {
    match model {
        ModelSpec::SchwingerRabi { .. } => match model.driven_params().map(|p| oracle::example1(&p)) {
            Some(Ok(e)) => OracleValues {
                exact_population: Some(e.mixing),
                exact_criterion: Some(e.exact_criterion),
                min_overlap: Some(e.min_overlap()),
                gap_factor: Some(e.gap_factor()),
            },
            _ => OracleValues::default(),
        },
        ModelSpec::Dual { .. } => match model.driven_params().map(|p| oracle::example2(&p)) {
            Some(Ok(e)) => OracleValues {
                exact_population: Some(1.0 - e.min_overlap().powi(2)),
                exact_criterion: Some(e.exact_criterion),
                min_overlap: Some(e.min_overlap()),
                gap_factor: Some(e.gap_factor()),
            },
            _ => OracleValues::default(),
        },
        _ => OracleValues::default(),
    }
}

/// Everything computed at one grid point.
#[derive(Debug, Clone, Default)]
pub struct PointResult {
    pub oracle: OracleValues,
    pub report: Option<ConditionReport>,
    pub overlap_min: Option<f64>,
    pub exact: Option<bool>,
    pub error: Option<String>,
}

fn evolve_min(h: &PeriodicHamiltonian, periods: f64, cfg: &IntegratorConfig) -> floquet_qa::Result<f64> {
    let minima = min_overlaps(h, 0.0, periods * h.period(), cfg)?;
    Ok(minima.into_iter().fold(1.0, f64::min))
}

/// Runs the requested analyses for one model instance. Failures are
/// recorded in `error`, never propagated.
pub fn evaluate_point(spec: &SweepSpec, model: &ModelSpec, opts: &AnalysisOptions) -> PointResult {
    let oracle = oracle_values(model);
    let mut out = PointResult { oracle, ..PointResult::default() };
    if spec.quantities.is_empty() {
        return out;
    }
    if spec.resonance_mask && oracle.gap_factor.is_some_and(|g| g < spec.degeneracy_tol) {
        out.error = Some("masked".into());
        return out;
    }
    let needs_report = spec.wants(Quantity::TwoDelta) || spec.wants(Quantity::Ratios) || spec.wants(Quantity::Verdicts);
    let needs_evolution =
        spec.wants(Quantity::OverlapMin) || (spec.wants(Quantity::Verdicts) && oracle.exact_criterion.is_none());
    let h = match model.build(&opts.integrator) {
        Ok(h) => h,
        Err(e) => {
            out.error = Some(marker(&e));
            return out;
        }
    };
    if needs_report {
        match analyze_with(&h, 0.0, opts) {
            Ok(r) => {
                if r.degenerate_quasienergies {
                    out.error = Some("DegenerateQuasienergies".into());
                }
                out.report = Some(r);
            }
            Err(e) => out.error = Some(e.kind().into()),
        }
    }
    if needs_evolution {
        match evolve_min(&h, spec.evolution_periods, &opts.integrator) {
            Ok(d) => out.overlap_min = Some(d),
            Err(e) => out.error = out.error.take().or_else(|| Some(e.kind().into())),
        }
    }
    let thr = opts.threshold;
    out.exact = match (oracle.exact_criterion, out.overlap_min) {
        (Some(c), _) => Some(thr.passes(c)),
        (None, Some(d)) => Some(thr.passes((1.0 - d * d) / 2.0)),
        _ => None,
    };
    out
}

fn marker(e: &AppError) -> String {
    match e {
        AppError::Model(m) | AppError::AtPoint { source: m, .. } => m.kind().into(),
        _ => "InvalidConfig".into(),
    }
}

impl PointResult {
    pub fn cells(&self, spec: &SweepSpec) -> Vec<Cell> {
        let mut cells = Vec::new();
        let r = self.report.as_ref();
        if spec.wants(Quantity::ExactPopulation) {
            cells.push(Cell::opt(self.oracle.exact_population));
            cells.push(Cell::opt(self.oracle.exact_criterion));
        }
        if spec.wants(Quantity::TwoDelta) {
            let delta = r.and_then(|r| r.delta);
            cells.push(Cell::opt(delta));
            cells.push(Cell::opt(delta.map(|d| 2.0 * d)));
            cells.push(Cell::opt(r.map(|r| r.gap_factor)));
            cells.push(Cell::opt(r.filter(|r| r.delta.is_some()).map(|r| r.bound_overlap)));
        }
        if spec.wants(Quantity::Ratios) {
            cells.push(Cell::opt(r.map(|r| r.traditional_ratio)));
            cells.push(Cell::opt(r.map(|r| r.frequency_ratio)));
            cells.push(Cell::opt(r.and_then(|r| r.floquet_ratio)));
            cells.push(Cell::opt(r.map(|r| r.arc)));
            cells.push(r.map_or(Cell::Empty, |r| Cell::Bool(r.domain_violation)));
        }
        if spec.wants(Quantity::Verdicts) {
            cells.push(self.exact.map_or(Cell::Empty, Cell::Bool));
            cells.push(r.map_or(Cell::Empty, |r| Cell::Bool(r.verdicts.traditional)));
            cells.push(r.map_or(Cell::Empty, |r| Cell::Bool(r.verdicts.frequency)));
            cells.push(r.map_or(Cell::Empty, |r| Cell::Bool(r.verdicts.floquet)));
        }
        if spec.wants(Quantity::OverlapMin) {
            cells.push(Cell::opt(self.overlap_min));
            cells.push(Cell::opt(self.oracle.min_overlap));
        }
        if !spec.quantities.is_empty() {
            cells.push(Cell::text(self.error.clone().unwrap_or_default()));
        }
        cells
    }
}

#[derive(Debug, Clone)]
pub struct SweepResult {
    pub table: Table,
    pub metadata: Metadata,
}

/// Worker count: available parallelism, capped by `FLOQUET_THREADS`.
pub fn worker_count() -> usize {
    let available = std::thread::available_parallelism().map_or(1, |n| n.get());
    match std::env::var("FLOQUET_THREADS").ok().and_then(|s| s.trim().parse::<usize>().ok()) {
        Some(cap) if cap > 0 => cap.min(available),
        _ => available,
    }
}

/// `f(0..n)` on the worker pool, results in index order. Inside
/// [`with_threads`] the enclosing pool is used as is.
pub fn parallel_map<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    if rayon::current_thread_index().is_some() {
        return (0..n).into_par_iter().map(&f).collect();
    }
    with_threads(worker_count(), || (0..n).into_par_iter().map(&f).collect())
}

/// Runs `op` on a dedicated pool of `threads` workers.
pub fn with_threads<R: Send>(threads: usize, op: impl FnOnce() -> R + Send) -> R {
    match rayon::ThreadPoolBuilder::new().num_threads(threads.max(1)).build() {
        Ok(pool) => pool.install(op),
        Err(_) => op(),
    }
}

pub fn run_sweep(spec: &SweepSpec) -> AppResult<SweepResult> {
    spec.validate()?;
    let base = spec.base_model()?;
    let opts = spec.analysis_options()?;
    let grid = spec.grid();
    let rows = parallel_map(grid.len(), |i| -> AppResult<Vec<Cell>> {
        let mut model = base.clone();
        for (axis, &value) in spec.axes.iter().zip(&grid[i]) {
            model.set_param(&axis.param, value)?;
        }
        let mut row: Vec<Cell> = grid[i].iter().map(|&x| Cell::Float(x)).collect();
        let result = evaluate_point(spec, &model, &opts);
        if let Some(e) = &result.error {
            log::debug!("point {:?}: {e}", grid[i]);
        }
        row.extend(result.cells(spec));
        Ok(row)
    });
    let mut table = Table::new(spec.columns());
    for row in rows {
        table.push(row?);
    }
    let metadata = Metadata::new(serde_json::to_value(spec)?, table.rows.len());
    Ok(SweepResult { table, metadata })
}
