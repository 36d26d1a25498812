//! JSON and plain-text renderings of a condition report.

use floquet_qa::ConditionReport;
use serde::Serialize;
use serde_json::Value;

use crate::config::{IntegratorSettings, ModelSpec};

#[derive(Debug, Clone, Serialize)]
pub struct Ratios {
    pub traditional: f64,
    pub frequency: f64,
    pub floquet: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerdictsJson {
    pub traditional: bool,
    pub frequency: bool,
    pub floquet: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ReportJson {
    pub model: String,
    pub label: String,
    pub params: Value,
    pub quasienergies: Vec<f64>,
    pub max_coupling: f64,
    pub min_gap: f64,
    pub max_gap: f64,
    pub gap_factor: f64,
    pub delta: Option<f64>,
    pub ratios: Ratios,
    pub verdicts: VerdictsJson,
    pub bound_overlap: f64,
    pub arc: f64,
    pub domain_violation: bool,
    pub degenerate_quasienergies: bool,
    pub delta_t: f64,
    pub profile_resolution: f64,
    pub integrator: IntegratorSettings,
}

pub fn to_json(spec: &ModelSpec, report: &ConditionReport, integrator: IntegratorSettings) -> ReportJson {
    ReportJson {
        model: spec.kind_name().into(),
        label: report.label.clone(),
        params: spec.params_json(),
        quasienergies: report.quasienergies.clone(),
        max_coupling: report.max_coupling,
        min_gap: report.min_gap,
        max_gap: report.max_gap,
        gap_factor: report.gap_factor,
        delta: report.delta,
        ratios: Ratios {
            traditional: report.traditional_ratio,
            frequency: report.frequency_ratio,
            floquet: report.floquet_ratio,
        },
        verdicts: VerdictsJson {
            traditional: report.verdicts.traditional,
            frequency: report.verdicts.frequency,
            floquet: report.verdicts.floquet,
        },
        bound_overlap: report.bound_overlap,
        arc: report.arc,
        domain_violation: report.domain_violation,
        degenerate_quasienergies: report.degenerate_quasienergies,
        delta_t: report.threshold.delta_t,
        profile_resolution: report.profile_resolution,
        integrator,
    }
}

fn verdict(pass: bool) -> &'static str {
    if pass {
        "pass"
    } else {
        "fail"
    }
}

fn or_dash(x: Option<f64>) -> String {
    x.map_or_else(|| "-".into(), |v| format!("{v:.6}"))
}

pub fn to_text(report: &ConditionReport) -> String {
    let q: Vec<String> = report.quasienergies.iter().map(|e| format!("{e:.8}")).collect();
    let mut out = String::new();
    out.push_str(&format!("{}\n", report.label));
    out.push_str(&format!("  quasienergies   [{}]\n", q.join(", ")));
    out.push_str(&format!("  max coupling    {:.6}\n", report.max_coupling));
    out.push_str(&format!("  min gap         {:.6}\n", report.min_gap));
    out.push_str(&format!("  gap factor      {:.6}\n", report.gap_factor));
    out.push_str(&format!("  delta           {}\n", or_dash(report.delta)));
    out.push_str(&format!("  overlap bound   {:.6}\n", report.bound_overlap));
    let thr = report.threshold.delta_t;
    out.push_str(&format!(
        "  traditional     {:.6}  {}\n",
        report.traditional_ratio,
        verdict(report.verdicts.traditional)
    ));
    out.push_str(&format!("  frequency       {:.6}  {}\n", report.frequency_ratio, verdict(report.verdicts.frequency)));
    out.push_str(&format!(
        "  floquet         {}  {}\n",
        or_dash(report.floquet_ratio),
        verdict(report.verdicts.floquet)
    ));
    out.push_str(&format!("  threshold       {thr}\n"));
    if report.degenerate_quasienergies {
        out.push_str("  note: quasienergies are degenerate; delta is undefined\n");
    }
    if report.domain_violation {
        out.push_str(&format!("  note: arc {:.4} exceeds pi/2\n", report.arc));
    }
    out
}
