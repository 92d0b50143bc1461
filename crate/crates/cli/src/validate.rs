//! Oracle-triangle report: every published closed form against the
//! quadrature oracle, the quadrature oracle against Fock-basis
//! reconstruction, and the shared-state slice against a Fock trace. Known
//! printed-formula problems are whitelisted with their measured size; any
//! other flag makes the report fail.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use magtele::teleport::{
    self, chi_shared, chi_shared_fock_oracle, printed, Discrepancy, FLAG_THRESHOLD,
};
use magtele::fock::FockError;
use magtele::states::StateError;
use magtele::teleport::TeleportError;
use magtele::{derive_params, Channel, InputStateSpec, Resource};
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{ParamsConfig, RunConfig, SCHEMA_VERSION};
use crate::error::Result;
use crate::output::write_json;

/// Reconstructed and quadrature fidelities must agree this well.
pub const RECONSTRUCTION_THRESHOLD: f64 = 1e-3;
/// A candidate correction "tracks" the oracle within this bound.
pub const VARIANT_THRESHOLD: f64 = 1e-3;
pub const IDENTITY_THRESHOLD: f64 = 1e-12;

/// Printed forms known to disagree with the oracle.
pub const WHITELIST: [(&str, &str); 4] = [
    ("single_photon_tmsv", "printed denominator is missing its cube"),
    ("single_photon_nongaussian", "printed trailing bracket is missing its fifth power"),
    ("squeezed_nongaussian", "printed coefficients do not reproduce the oracle; no simple correction found"),
    ("nongaussian_shared_slice", "printed subtracted-state slice disagrees with the Fock trace when gamma < 1"),
];

pub fn is_whitelisted(formula: &str) -> bool {
    WHITELIST.iter().any(|(f, _)| *f == formula)
}

#[derive(Clone, Debug, Serialize)]
pub struct Context {
    pub check: &'static str,
    pub input: Option<InputStateSpec>,
    pub resource: Option<Resource>,
    pub g1_mhz: Option<f64>,
    pub gamma: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Entry {
    pub context: Context,
    #[serde(flatten)]
    pub discrepancy: Discrepancy,
    pub whitelisted: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct WhitelistSummary {
    pub formula: &'static str,
    pub reason: &'static str,
    pub occurrences: usize,
    pub max_difference: Option<f64>,
    pub variant: Option<&'static str>,
    pub variant_max_difference: Option<f64>,
    pub variant_tracks_oracle: Option<bool>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Summary {
    pub checks: usize,
    pub flagged: usize,
    pub whitelisted: usize,
    /// Checks that could not be evaluated.
    pub failed: usize,
    pub unexpected: usize,
    pub exit_status: i32,
}

#[derive(Clone, Debug, Serialize)]
pub struct ValidationReport {
    pub schema_version: u32,
    pub params: ParamsConfig,
    pub cutoff: usize,
    pub flag_threshold: f64,
    pub reconstruction_threshold: f64,
    pub summary: Summary,
    pub whitelist: Vec<WhitelistSummary>,
    /// Flagged entries only; the full list is in `entries`.
    pub discrepancies: Vec<Entry>,
    pub failures: Vec<Failure>,
    pub entries: Vec<Entry>,
}

impl ValidationReport {
    /// Names of the unexpected flags and failed checks.
    pub fn unexpected(&self) -> Vec<String> {
        let flags = self.discrepancies.iter().filter(|e| !e.whitelisted).map(|e| e.discrepancy.formula.to_string());
        flags.chain(self.failures.iter().map(|f| format!("{} ({})", f.check, f.message))).collect()
    }
}

fn entry(context: Context, d: Discrepancy) -> Entry {
    let whitelisted = d.flagged && is_whitelisted(d.formula);
    Entry { context, discrepancy: d, whitelisted }
}

/// A check that could not be carried out; counted as unexpected.
#[derive(Clone, Debug, Serialize)]
pub struct Failure {
    pub check: &'static str,
    pub input: Option<InputStateSpec>,
    pub resource: Option<Resource>,
    pub message: String,
}

type Outcome = std::result::Result<Entry, Failure>;

fn attempt(
    check: &'static str,
    input: Option<InputStateSpec>,
    resource: Option<Resource>,
    f: impl FnOnce() -> Result<Vec<Entry>>,
) -> Vec<Outcome> {
    match f() {
        Ok(entries) => entries.into_iter().map(Ok).collect(),
        Err(e) => vec![Err(Failure { check, input, resource, message: e.to_string() })],
    }
}

/// Printed formulas against quadrature along the G1 grid.
fn formula_sweep(cfg: &RunConfig) -> Vec<Outcome> {
    let v = &cfg.validation;
    let g1s: Vec<f64> = (0..v.g1_points)
        .map(|i| v.g1_start_mhz + (v.g1_stop_mhz - v.g1_start_mhz) * i as f64 / (v.g1_points - 1) as f64)
        .collect();
    let mut jobs: Vec<(InputStateSpec, Resource, f64)> = Vec::new();
    for input in v.inputs.iter().filter(|s| !matches!(s, InputStateSpec::Cat { .. })) {
        for resource in Resource::ALL {
            jobs.extend(g1s.iter().map(|&g| (*input, resource, g)));
        }
    }
    jobs.par_iter()
        .flat_map_iter(|&(input, resource, g1)| {
            attempt("formula_vs_quadrature", Some(input), Some(resource), || {
                let params = ParamsConfig { g1_mhz: g1, ..cfg.params.clone() };
                let d = derive_params(&params.to_physical())?;
                let channel = Channel::from_derived(&d, cfg.tmsv_uses_reduced_lambda);
                let result = teleport::fidelity_analytic(&input, &channel, resource, &cfg.quadrature)?;
                let ctx = Context { check: "formula_vs_quadrature", input: Some(input), resource: Some(resource), g1_mhz: Some(g1), gamma: d.gamma };
                Ok(vec![entry(ctx, result.diagnostics.into_iter().next().expect("oracle diagnostic"))])
            })
        })
        .collect()
}

/// Single photon through the vacuum channel, where the printed value is 4.
fn vacuum_single_photon(cfg: &RunConfig) -> Result<Vec<Entry>> {
    let spec = InputStateSpec::SinglePhoton;
    let ch = Channel::vacuum();
    let ctx = |check| Context { check, input: Some(spec), resource: Some(Resource::Tmsv), g1_mhz: None, gamma: 1.0 };
    let analytic = teleport::fidelity_analytic(&spec, &ch, Resource::Tmsv, &cfg.quadrature)?;
    let quad = teleport::fidelity_quadrature(&spec, &ch, Resource::Tmsv, &cfg.quadrature)?;
    let fock = teleport::fidelity_fock_oracle(&spec, &ch, Resource::Tmsv, cfg.cutoff, &cfg.quadrature)?;
    let mut recon = Discrepancy::new("fock_reconstruction", fock.fidelity, quad.fidelity, quad.error_estimate.unwrap_or(0.0));
    recon.flagged = !(recon.difference <= RECONSTRUCTION_THRESHOLD);
    Ok(vec![
        entry(ctx("vacuum_channel_single_photon"), analytic.diagnostics.into_iter().next().expect("oracle diagnostic")),
        entry(ctx("vacuum_channel_reconstruction"), recon),
    ])
}

/// The subtracted-resource coherent form at unit gain against its limit.
fn unit_gain_identity() -> Entry {
    let (worst_l, worst) = (0..50)
        .map(|i| {
            let l = 0.9 * i as f64 / 49.0;
            (l, (printed::coherent_nongaussian(l, 1.0) - printed::coherent_nongaussian_unit_gain(l)).abs())
        })
        .fold((0.0, 0.0), |acc, x| if x.1 > acc.1 { x } else { acc });
    let mut d = Discrepancy::new(
        "coherent_nongaussian_unit_gain",
        printed::coherent_nongaussian(worst_l, 1.0),
        printed::coherent_nongaussian_unit_gain(worst_l),
        0.0,
    );
    d.difference = worst;
    d.flagged = !(worst <= IDENTITY_THRESHOLD);
    Entry {
        context: Context { check: "unit_gain_identity", input: None, resource: Some(Resource::Nongaussian), g1_mhz: None, gamma: 1.0 },
        whitelisted: false,
        discrepancy: d,
    }
}

/// Closed-form shared-state slice against the partial trace of the
/// truncated resource state, at the configured gamma and at gamma = 1.
fn slice_checks(cfg: &RunConfig) -> Vec<Outcome> {
    let base = match derive_params(&cfg.params.to_physical()) {
        Ok(d) => Channel::from_derived(&d, cfg.tmsv_uses_reduced_lambda),
        Err(e) => return attempt("shared_slice_vs_fock_trace", None, None, || Err(e.into())),
    };
    let points = [C64::new(0.3, 0.0), C64::new(0.5, 0.4), C64::new(0.0, 0.8), C64::new(-1.0, 0.6), C64::new(1.2, -1.1)];
    let mut out = Vec::new();
    for gamma in [base.gamma, 1.0] {
        let ch = Channel { gamma, ..base };
        for resource in Resource::ALL {
            out.extend(attempt("shared_slice_vs_fock_trace", None, Some(resource), || {
                let mut worst = (0.0, 0.0, -1.0);
                for &a in &points {
                    let closed = chi_shared(&ch, resource, a).re;
                    let fock = chi_shared_fock_oracle(&ch, resource, a, cfg.cutoff)?.re;
                    let diff = (closed - fock).abs();
                    if diff > worst.2 {
                        worst = (closed, fock, diff);
                    }
                }
                let formula = match resource {
                    Resource::Tmsv => "tmsv_shared_slice",
                    Resource::Nongaussian => "nongaussian_shared_slice",
                };
                let ctx = Context { check: "shared_slice_vs_fock_trace", input: None, resource: Some(resource), g1_mhz: Some(cfg.params.g1_mhz), gamma };
                let mut e = entry(ctx, Discrepancy::new(formula, worst.0, worst.1, 0.0));
                // the known slice problem only appears below unit gain
                e.whitelisted &= gamma < 1.0;
                Ok(vec![e])
            }));
        }
    }
    out
}

fn suggested_cutoff(e: &TeleportError) -> Option<usize> {
    match e {
        TeleportError::State(StateError::Tail { suggested, .. })
        | TeleportError::State(StateError::Fock(FockError::Truncation { suggested, .. }))
        | TeleportError::Fock(FockError::Truncation { suggested, .. }) => Some(*suggested),
        _ => None,
    }
}

/// Quadrature fidelity against the overlap with the reconstructed state.
fn reconstruction_checks(cfg: &RunConfig) -> Vec<Outcome> {
    let d = match derive_params(&cfg.params.to_physical()) {
        Ok(d) => d,
        Err(e) => return attempt("quadrature_vs_reconstruction", None, None, || Err(e.into())),
    };
    let channel = Channel::from_derived(&d, cfg.tmsv_uses_reduced_lambda);
    let mut out = Vec::new();
    for input in &cfg.validation.inputs {
        for resource in Resource::ALL {
            out.extend(attempt("quadrature_vs_reconstruction", Some(*input), Some(resource), || {
                let quad = teleport::fidelity_quadrature(input, &channel, resource, &cfg.quadrature)?;
                let fock = match teleport::fidelity_fock_oracle(input, &channel, resource, cfg.cutoff, &cfg.quadrature) {
                    Err(e) => match suggested_cutoff(&e) {
                        // strongly squeezed inputs need more Fock levels than the configured cutoff
                        Some(c) => teleport::fidelity_fock_oracle(input, &channel, resource, c, &cfg.quadrature)?,
                        None => return Err(e.into()),
                    },
                    Ok(f) => f,
                };
                let mut dis = Discrepancy::new("fock_reconstruction", fock.fidelity, quad.fidelity, quad.error_estimate.unwrap_or(0.0));
                dis.flagged = !(dis.difference <= RECONSTRUCTION_THRESHOLD);
                let ctx = Context { check: "quadrature_vs_reconstruction", input: Some(*input), resource: Some(resource), g1_mhz: Some(cfg.params.g1_mhz), gamma: d.gamma };
                Ok(vec![entry(ctx, dis)])
            }));
        }
    }
    out
}

fn whitelist_summary(entries: &[Entry]) -> Vec<WhitelistSummary> {
    let mut by_formula: BTreeMap<&str, Vec<&Entry>> = BTreeMap::new();
    for e in entries {
        by_formula.entry(e.discrepancy.formula).or_default().push(e);
    }
    WHITELIST
        .iter()
        .map(|&(formula, reason)| {
            let all = by_formula.get(formula).map(Vec::as_slice).unwrap_or(&[]);
            let flagged: Vec<&&Entry> = all.iter().filter(|e| e.discrepancy.flagged).collect();
            let max = |v: &mut dyn Iterator<Item = f64>| v.fold(None, |m: Option<f64>, x| Some(m.map_or(x, |m| m.max(x))));
            let variants: Vec<_> = all.iter().filter_map(|e| e.discrepancy.variant.as_ref()).collect();
            let variant_max = max(&mut variants.iter().map(|v| v.difference));
            WhitelistSummary {
                formula,
                reason,
                occurrences: flagged.len(),
                max_difference: max(&mut flagged.iter().map(|e| e.discrepancy.difference)),
                variant: variants.first().map(|v| v.name),
                variant_max_difference: variant_max,
                variant_tracks_oracle: variant_max.map(|m| m <= VARIANT_THRESHOLD),
            }
        })
        .collect()
}

/// Runs every check. Numerical failures inside a check become report
/// content rather than errors.
pub fn validate_report(cfg: &RunConfig) -> ValidationReport {
    let mut outcomes = formula_sweep(cfg);
    if cfg.validation.inputs.contains(&InputStateSpec::SinglePhoton) {
        outcomes.extend(attempt("vacuum_channel_single_photon", Some(InputStateSpec::SinglePhoton), Some(Resource::Tmsv), || {
            vacuum_single_photon(cfg)
        }));
    }
    if cfg.validation.inputs.iter().any(|s| matches!(s, InputStateSpec::Coherent { .. })) {
        outcomes.push(Ok(unit_gain_identity()));
    }
    outcomes.extend(slice_checks(cfg));
    outcomes.extend(reconstruction_checks(cfg));
    let mut entries = Vec::new();
    let mut failures = Vec::new();
    for o in outcomes {
        match o {
            Ok(e) => entries.push(e),
            Err(f) => failures.push(f),
        }
    }
    let discrepancies: Vec<Entry> = entries.iter().filter(|e| e.discrepancy.flagged).cloned().collect();
    let whitelisted = discrepancies.iter().filter(|e| e.whitelisted).count();
    let unexpected = discrepancies.len() - whitelisted + failures.len();
    let summary = Summary {
        checks: entries.len() + failures.len(),
        flagged: discrepancies.len(),
        whitelisted,
        failed: failures.len(),
        unexpected,
        exit_status: if unexpected == 0 { 0 } else { 3 },
    };
    ValidationReport {
        schema_version: SCHEMA_VERSION,
        params: cfg.params.resolved(),
        cutoff: cfg.cutoff,
        flag_threshold: FLAG_THRESHOLD,
        reconstruction_threshold: RECONSTRUCTION_THRESHOLD,
        summary,
        whitelist: whitelist_summary(&entries),
        discrepancies,
        failures,
        entries,
    }
}

pub fn write_report(report: &ValidationReport, dir: &Path) -> Result<PathBuf> {
    let path = dir.join("validation_report.json");
    write_json(&path, report)?;
    Ok(path)
}
