//! Run configuration as read from JSON. Frequencies are `value / 2pi` in MHz
//! and durations are in ns; everything is converted to rad/s and s before it
//! reaches the core library.

use std::path::PathBuf;

use magtele::params::{mhz_to_rad, ns_to_s, rad_to_mhz, s_to_ns};
use magtele::{InputStateSpec, PhysicalParams, QuadratureSettings, Resource};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const SCHEMA_VERSION: u32 = 1;
pub const DEFAULT_CUTOFF: usize = 40;

/// Physical parameters in CLI units.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ParamsConfig {
    pub g1_mhz: f64,
    pub kappa1_mhz: f64,
    pub g_c_mhz: f64,
    pub kappa_c_mhz: f64,
    pub kappa_m_mhz: f64,
    pub tau_e_ns: f64,
    pub tau_s_ns: f64,
    pub tau_d_ns: f64,
    pub tau_r_ns: f64,
}

impl Default for ParamsConfig {
    /// The reference pulse set, written in CLI units.
    fn default() -> Self {
        ParamsConfig {
            g1_mhz: 10.0,
            kappa1_mhz: 100.0,
            g_c_mhz: 4.0,
            kappa_c_mhz: 40.0,
            kappa_m_mhz: 0.5,
            tau_e_ns: 50.0,
            tau_s_ns: 4.0,
            tau_d_ns: 10.0,
            tau_r_ns: 0.0,
        }
    }
}

impl ParamsConfig {
    pub fn to_physical(&self) -> PhysicalParams {
        PhysicalParams {
            g1: mhz_to_rad(self.g1_mhz),
            kappa1: mhz_to_rad(self.kappa1_mhz),
            g_c: mhz_to_rad(self.g_c_mhz),
            kappa_c: mhz_to_rad(self.kappa_c_mhz),
            kappa_m: mhz_to_rad(self.kappa_m_mhz),
            tau_e: ns_to_s(self.tau_e_ns),
            tau_s: ns_to_s(self.tau_s_ns),
            tau_d: ns_to_s(self.tau_d_ns),
            tau_r: ns_to_s(self.tau_r_ns),
        }
    }

    pub fn from_physical(p: &PhysicalParams) -> Self {
        ParamsConfig {
            g1_mhz: rad_to_mhz(p.g1),
            kappa1_mhz: rad_to_mhz(p.kappa1),
            g_c_mhz: rad_to_mhz(p.g_c),
            kappa_c_mhz: rad_to_mhz(p.kappa_c),
            kappa_m_mhz: rad_to_mhz(p.kappa_m),
            tau_e_ns: s_to_ns(p.tau_e),
            tau_s_ns: s_to_ns(p.tau_s),
            tau_d_ns: s_to_ns(p.tau_d),
            tau_r_ns: s_to_ns(p.tau_r),
        }
    }

    /// The same parameters after a round trip through internal units, as
    /// written into file headers.
    pub fn resolved(&self) -> Self {
        ParamsConfig::from_physical(&self.to_physical())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    #[default]
    Fidelity,
    Entanglement,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    G1Mhz,
    GCMhz,
    TauSNs,
    TauDNs,
    Xi,
    Alpha0,
    Varphi,
}

impl Axis {
    pub fn name(self) -> &'static str {
        match self {
            Axis::G1Mhz => "g1_mhz",
            Axis::GCMhz => "g_c_mhz",
            Axis::TauSNs => "tau_s_ns",
            Axis::TauDNs => "tau_d_ns",
            Axis::Xi => "xi",
            Axis::Alpha0 => "alpha0",
            Axis::Varphi => "varphi",
        }
    }

    pub fn unit(self) -> &'static str {
        match self {
            Axis::G1Mhz | Axis::GCMhz => "MHz (value/2pi)",
            Axis::TauSNs | Axis::TauDNs => "ns",
            Axis::Xi | Axis::Alpha0 => "dimensionless",
            Axis::Varphi => "rad",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub axis: Axis,
    pub start: f64,
    pub stop: f64,
    pub points: usize,
}

impl SweepConfig {
    pub fn values(&self) -> Vec<f64> {
        let n = self.points;
        (0..n).map(|i| self.start + (self.stop - self.start) * i as f64 / (n - 1) as f64).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
}

/// Grid used by the `validate` command.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ValidationConfig {
    pub inputs: Vec<InputStateSpec>,
    pub g1_start_mhz: f64,
    pub g1_stop_mhz: f64,
    pub g1_points: usize,
}

impl Default for ValidationConfig {
    fn default() -> Self {
        ValidationConfig {
            inputs: vec![
                InputStateSpec::Coherent { beta: C64::new(1.0, 0.0) },
                InputStateSpec::SinglePhoton,
                InputStateSpec::SqueezedVacuum { xi: 1.0 },
            ],
            g1_start_mhz: 2.0,
            g1_stop_mhz: 20.0,
            g1_points: 19,
        }
    }
}

/// Knobs used only by particular figure datasets.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FigureOptions {
    /// Points per axis of the Wigner grids.
    pub wigner_resolution: usize,
    /// Largest number shown in the joint number distributions.
    pub distribution_max: usize,
    /// Points of the phase sweep shown next to the amplitude sweep.
    pub inset_points: usize,
}

impl Default for FigureOptions {
    fn default() -> Self {
        FigureOptions { wigner_resolution: 161, distribution_max: 10, inset_points: 13 }
    }
}

fn default_input() -> InputStateSpec {
    InputStateSpec::Coherent { beta: C64::new(1.0, 0.0) }
}

fn default_resources() -> Vec<Resource> {
    Resource::ALL.to_vec()
}

fn default_cutoff() -> usize {
    DEFAULT_CUTOFF
}

fn default_formats() -> Vec<Format> {
    vec![Format::Csv, Format::Json]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub params: ParamsConfig,
    #[serde(default = "default_input")]
    pub input: InputStateSpec,
    #[serde(default)]
    pub quantity: Quantity,
    #[serde(default = "default_resources")]
    pub resources: Vec<Resource>,
    #[serde(default)]
    pub sweep: Option<SweepConfig>,
    #[serde(default = "default_cutoff")]
    pub cutoff: usize,
    #[serde(default)]
    pub quadrature: QuadratureSettings,
    /// Use the reduced amplitude for the Gaussian arm as well.
    #[serde(default)]
    pub tmsv_uses_reduced_lambda: bool,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    #[serde(default = "default_formats")]
    pub formats: Vec<Format>,
    #[serde(default)]
    pub validation: ValidationConfig,
    #[serde(default)]
    pub figure: FigureOptions,
    /// Free-form provenance copied verbatim into every output file.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metadata: Option<serde_json::Value>,
}

impl Default for RunConfig {
    fn default() -> Self {
        serde_json::from_str("{}").expect("empty config is valid")
    }
}

fn config_error(path: &str, msg: impl Into<String>) -> CliError {
    CliError::Config(format!("{path}: {}", msg.into()))
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let cfg: RunConfig = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            config_error(if path.is_empty() { "." } else { &path }, e.into_inner().to_string())
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Applies a partial JSON object on top of this configuration.
    pub fn merged(&self, overrides: &str) -> Result<Self, CliError> {
        let patch: serde_json::Value =
            serde_json::from_str(overrides).map_err(|e| config_error(".", e.to_string()))?;
        let mut base = serde_json::to_value(self).expect("config serializes");
        merge(&mut base, patch);
        RunConfig::from_json(&base.to_string())
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let p = &self.params;
        let fields = [
            ("params.g1_mhz", p.g1_mhz, false),
            ("params.kappa1_mhz", p.kappa1_mhz, true),
            ("params.g_c_mhz", p.g_c_mhz, false),
            ("params.kappa_c_mhz", p.kappa_c_mhz, true),
            ("params.kappa_m_mhz", p.kappa_m_mhz, true),
            ("params.tau_e_ns", p.tau_e_ns, false),
            ("params.tau_s_ns", p.tau_s_ns, false),
            ("params.tau_d_ns", p.tau_d_ns, false),
            ("params.tau_r_ns", p.tau_r_ns, false),
        ];
        for (path, v, strict) in fields {
            let ok = v.is_finite() && if strict { v > 0.0 } else { v >= 0.0 };
            if !ok {
                let req = if strict { "must be positive" } else { "must be non-negative" };
                return Err(config_error(path, format!("{req}, got {v}")));
            }
        }
        self.input.validate().map_err(|e| config_error("input", e.to_string()))?;
        if self.resources.is_empty() {
            return Err(config_error("resources", "at least one resource is required"));
        }
        if self.cutoff < 2 {
            return Err(config_error("cutoff", "must be at least 2"));
        }
        self.quadrature.validate().map_err(|e| config_error("quadrature", e.to_string()))?;
        if self.formats.is_empty() {
            return Err(config_error("formats", "at least one output format is required"));
        }
        let f = &self.figure;
        if f.wigner_resolution < 2 || f.inset_points < 2 {
            return Err(config_error("figure", "grids need at least 2 points"));
        }
        if f.distribution_max > self.cutoff {
            return Err(config_error("figure.distribution_max", "cannot exceed the cutoff"));
        }
        if let Some(s) = &self.sweep {
            self.validate_sweep(s)?;
        }
        let v = &self.validation;
        if v.g1_points < 2 || !(v.g1_start_mhz > 0.0) || !(v.g1_stop_mhz > v.g1_start_mhz) {
            return Err(config_error("validation", "needs 0 < g1_start_mhz < g1_stop_mhz and g1_points >= 2"));
        }
        for (i, spec) in v.inputs.iter().enumerate() {
            spec.validate().map_err(|e| config_error(&format!("validation.inputs[{i}]"), e.to_string()))?;
        }
        Ok(())
    }

    fn validate_sweep(&self, s: &SweepConfig) -> Result<(), CliError> {
        if s.points < 2 {
            return Err(config_error("sweep.points", format!("must be at least 2, got {}", s.points)));
        }
        if !(s.start.is_finite() && s.stop.is_finite()) {
            return Err(config_error("sweep", "bounds must be finite"));
        }
        if s.start == s.stop {
            return Err(config_error("sweep.stop", "must differ from sweep.start"));
        }
        let lo = s.start.min(s.stop);
        let positive = match s.axis {
            Axis::G1Mhz => lo > 0.0,
            Axis::GCMhz | Axis::TauSNs | Axis::TauDNs | Axis::Alpha0 => lo >= 0.0,
            Axis::Xi | Axis::Varphi => true,
        };
        if !positive {
            return Err(config_error("sweep.start", format!("{} cannot take the value {lo}", s.axis.name())));
        }
        let kind_ok = match s.axis {
            Axis::Xi => matches!(self.input, InputStateSpec::SqueezedVacuum { .. }),
            Axis::Alpha0 | Axis::Varphi => matches!(self.input, InputStateSpec::Cat { .. }),
            _ => true,
        };
        if !kind_ok {
            return Err(config_error(
                "sweep.axis",
                format!("{} does not apply to {} inputs", s.axis.name(), self.input.kind_name()),
            ));
        }
        Ok(())
    }

    /// Parameters and input state at one sweep value.
    pub fn at(&self, value: Option<f64>) -> (ParamsConfig, InputStateSpec) {
        let mut p = self.params.clone();
        let mut input = self.input;
        if let (Some(s), Some(v)) = (&self.sweep, value) {
            match s.axis {
                Axis::G1Mhz => p.g1_mhz = v,
                Axis::GCMhz => p.g_c_mhz = v,
                Axis::TauSNs => p.tau_s_ns = v,
                Axis::TauDNs => p.tau_d_ns = v,
                Axis::Xi => {
                    if let InputStateSpec::SqueezedVacuum { xi } = &mut input {
                        *xi = v;
                    }
                }
                Axis::Alpha0 => {
                    if let InputStateSpec::Cat { alpha0, .. } = &mut input {
                        *alpha0 = v;
                    }
                }
                Axis::Varphi => {
                    if let InputStateSpec::Cat { varphi, .. } = &mut input {
                        *varphi = v;
                    }
                }
            }
        }
        (p, input)
    }
}

fn merge(base: &mut serde_json::Value, patch: serde_json::Value) {
    match (base, patch) {
        (serde_json::Value::Object(b), serde_json::Value::Object(p)) => {
            for (k, v) in p {
                match b.get_mut(&k) {
                    // the input spec is replaced whole so its variant can change
                    Some(slot) if k != "input" => merge(slot, v),
                    _ => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (slot, v) => *slot = v,
    }
}
