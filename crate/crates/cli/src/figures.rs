//! Datasets behind each published figure. Paper parameter sets ship in
//! `defaults/figures.json`, keyed by figure id; user overrides are merged on
//! top of them.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use magtele::states::{self, joint_number_distribution};
use magtele::teleport::fidelity_cat;
use magtele::wigner::{wigner_map, wigner_negativity, Negativity, WignerSource};
use magtele::{derive_params, Channel, GridSpec, InputStateSpec, PhaseSpaceGrid, Resource};
use serde::Serialize;

use crate::config::{Axis, Format, RunConfig, SweepConfig, SCHEMA_VERSION};
use crate::error::{CliError, Result};
use crate::output::{common_header, fmt_f64, write_csv, write_json, CONVENTIONS, UNITS};
use crate::sweep::run_sweep;

pub const DEFAULTS: &str = include_str!("../defaults/figures.json");

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FigureId {
    Fig2a,
    Fig2b,
    Fig3a,
    Fig3b,
    Fig3c,
    Fig3d,
    Fig4,
    Fig5a,
    Fig5b,
}

impl FigureId {
    pub const ALL: [FigureId; 9] = [
        FigureId::Fig2a,
        FigureId::Fig2b,
        FigureId::Fig3a,
        FigureId::Fig3b,
        FigureId::Fig3c,
        FigureId::Fig3d,
        FigureId::Fig4,
        FigureId::Fig5a,
        FigureId::Fig5b,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FigureId::Fig2a => "fig2a",
            FigureId::Fig2b => "fig2b",
            FigureId::Fig3a => "fig3a",
            FigureId::Fig3b => "fig3b",
            FigureId::Fig3c => "fig3c",
            FigureId::Fig3d => "fig3d",
            FigureId::Fig4 => "fig4",
            FigureId::Fig5a => "fig5a",
            FigureId::Fig5b => "fig5b",
        }
    }
}

impl FromStr for FigureId {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        FigureId::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| CliError::Config(format!("figure: unknown figure id `{s}`")))
    }
}

/// Paper defaults for `id` with optional JSON overrides applied on top.
pub fn figure_config(id: FigureId, overrides: Option<&str>) -> Result<RunConfig> {
    let defaults: serde_json::Value = serde_json::from_str(DEFAULTS).expect("bundled defaults are valid JSON");
    let patch = defaults.get(id.name()).expect("every figure has defaults").to_string();
    let cfg = RunConfig::default().merged(&patch)?;
    match overrides {
        Some(text) => cfg.merged(text),
        None => Ok(cfg),
    }
}

/// Writes the dataset for `id` into `dir` and returns the files written.
pub fn emit_figure(id: FigureId, cfg: &RunConfig, dir: &Path) -> Result<Vec<PathBuf>> {
    match id {
        FigureId::Fig2b => emit_distributions(cfg, dir),
        FigureId::Fig4 => emit_wigner(cfg, dir),
        FigureId::Fig5b => {
            let mut files = crate::output::write_sweep(cfg, &run_sweep(cfg)?, dir, id.name())?;
            let mut inset = cfg.clone();
            inset.sweep = Some(SweepConfig {
                axis: Axis::Varphi,
                start: 0.0,
                stop: 2.0 * std::f64::consts::PI,
                points: cfg.figure.inset_points,
            });
            inset.validate()?;
            files.extend(crate::output::write_sweep(&inset, &run_sweep(&inset)?, dir, "fig5b_inset")?);
            Ok(files)
        }
        _ => crate::output::write_sweep(cfg, &run_sweep(cfg)?, dir, id.name()),
    }
}

#[derive(Serialize)]
struct Distribution {
    resource: Resource,
    lambda: f64,
    /// `probabilities[m][n]` for `m` magnons and `n` photons.
    probabilities: Vec<Vec<f64>>,
    shown_mass: f64,
}

#[derive(Serialize)]
struct DistributionDataset<'a> {
    schema_version: u32,
    dataset: &'static str,
    units: &'static str,
    params: crate::config::ParamsConfig,
    derived: crate::sweep::DerivedSummary,
    cutoff: usize,
    distribution_max: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    metadata: Option<&'a serde_json::Value>,
    main: Distribution,
    inset: Distribution,
}

fn emit_distributions(cfg: &RunConfig, dir: &Path) -> Result<Vec<PathBuf>> {
    let d = derive_params(&cfg.params.to_physical())?;
    let max = cfg.figure.distribution_max;
    let (sub, _) = states::subtracted_state(&d, cfg.cutoff)?;
    let tmsv_lambda = if cfg.tmsv_uses_reduced_lambda { d.lambda_prime } else { d.lambda };
    let tm = states::tmsv_state(tmsv_lambda, cfg.cutoff)?;
    let table = |state: &magtele::TruncatedState, resource, lambda| {
        let dist = joint_number_distribution(state);
        let probabilities: Vec<Vec<f64>> = (0..=max).map(|m| (0..=max).map(|n| dist.get2(m, n)).collect()).collect();
        let shown_mass = probabilities.iter().flatten().sum();
        Distribution { resource, lambda, probabilities, shown_mass }
    };
    let main = table(&sub, Resource::Nongaussian, d.lambda_prime);
    let inset = table(&tm, Resource::Tmsv, tmsv_lambda);
    let mut files = Vec::new();
    if cfg.formats.contains(&Format::Csv) {
        for (dist, role) in [(&main, "main"), (&inset, "inset")] {
            let path = dir.join(format!("fig2b_{}.csv", dist.resource.name()));
            let mut header = common_header(&format!("fig2b {role} panel"), cfg);
            header.push(format!("resource: {} (squeezing amplitude {})", dist.resource.name(), fmt_f64(dist.lambda)));
            header.push(format!("columns: magnon number, photon number, joint probability; shown mass {}", fmt_f64(dist.shown_mass)));
            let columns = vec!["n_magnon".to_string(), "n_photon".to_string(), "probability".to_string()];
            let rows: Vec<Vec<String>> = (0..=max)
                .flat_map(|m| (0..=max).map(move |n| (m, n)))
                .map(|(m, n)| vec![m.to_string(), n.to_string(), fmt_f64(dist.probabilities[m][n])])
                .collect();
            write_csv(&path, &header, &columns, &rows)?;
            files.push(path);
        }
    }
    if cfg.formats.contains(&Format::Json) {
        let path = dir.join("fig2b.json");
        let dataset = DistributionDataset {
            schema_version: SCHEMA_VERSION,
            dataset: "fig2b",
            units: UNITS,
            params: cfg.params.resolved(),
            derived: (&d).into(),
            cutoff: cfg.cutoff,
            distribution_max: max,
            metadata: cfg.metadata.as_ref(),
            main,
            inset,
        };
        write_json(&path, &dataset)?;
        files.push(path);
    }
    Ok(files)
}

#[derive(Serialize)]
struct WignerPanel {
    panel: &'static str,
    fidelity: Option<f64>,
    negativity: Negativity,
    normalization: f64,
    grid: PhaseSpaceGrid,
}

#[derive(Serialize)]
struct WignerDataset<'a> {
    schema_version: u32,
    dataset: &'static str,
    units: &'static str,
    conventions: &'static str,
    params: crate::config::ParamsConfig,
    derived: crate::sweep::DerivedSummary,
    input: InputStateSpec,
    cutoff: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    metadata: Option<&'a serde_json::Value>,
    panels: Vec<WignerPanel>,
}

/// Panel name, teleportation fidelity (none for the input) and grid.
pub type Panel = (&'static str, Option<f64>, PhaseSpaceGrid);

/// Wigner maps of the input cat and of its two teleported versions.
pub fn wigner_panels(cfg: &RunConfig) -> Result<(magtele::DerivedParams, Vec<Panel>)> {
    let InputStateSpec::Cat { alpha0, .. } = cfg.input else {
        return Err(CliError::Config(format!("input: fig4 needs a cat input, got {}", cfg.input.kind_name())));
    };
    let d = derive_params(&cfg.params.to_physical())?;
    let channel = Channel::from_derived(&d, cfg.tmsv_uses_reduced_lambda);
    let grid = GridSpec { resolution: cfg.figure.wigner_resolution, ..GridSpec::for_cat(alpha0) };
    let psi = states::input_state(&cfg.input, cfg.cutoff)?;
    let mut panels = vec![("input", None, wigner_map(WignerSource::Pure(&psi), &grid)?)];
    for resource in Resource::ALL {
        let tel = fidelity_cat(&cfg.input, &channel, resource, &cfg.quadrature, cfg.cutoff)?;
        let rho = tel.rho_tel.as_ref().expect("cat path reconstructs the state");
        let name = match resource {
            Resource::Tmsv => "teleported_tmsv",
            Resource::Nongaussian => "teleported_nongaussian",
        };
        panels.push((name, Some(tel.fidelity), wigner_map(WignerSource::Mixed(rho), &grid)?));
    }
    Ok((d, panels))
}

fn emit_wigner(cfg: &RunConfig, dir: &Path) -> Result<Vec<PathBuf>> {
    let (d, panels) = wigner_panels(cfg)?;
    let mut files = Vec::new();
    if cfg.formats.contains(&Format::Csv) {
        for (name, fidelity, grid) in &panels {
            let neg = wigner_negativity(grid);
            let path = dir.join(format!("fig4_{name}.csv"));
            let mut header = common_header(&format!("fig4 {name} Wigner function"), cfg);
            header.push(format!("grid: {} x {} points, x in [{}, {}], p in [{}, {}]", grid.resolution, grid.resolution,
                fmt_f64(grid.x_range.0), fmt_f64(grid.x_range.1), fmt_f64(grid.p_range.0), fmt_f64(grid.p_range.1)));
            header.push(format!(
                "min_W: {} (beta parametrization {}); negative_volume: {}; normalization: {}",
                fmt_f64(neg.min_value), fmt_f64(neg.min_value_beta), fmt_f64(neg.negative_volume), fmt_f64(grid.normalization())
            ));
            if let Some(f) = fidelity {
                header.push(format!("fidelity: {}", fmt_f64(*f)));
            }
            header.push("rows are x-major with p varying fastest".into());
            let columns = vec!["x".to_string(), "p".to_string(), "W".to_string()];
            let rows: Vec<Vec<String>> = (0..grid.resolution)
                .flat_map(|i| (0..grid.resolution).map(move |j| (i, j)))
                .map(|(i, j)| vec![fmt_f64(grid.xs[i]), fmt_f64(grid.ps[j]), fmt_f64(grid.get(i, j))])
                .collect();
            write_csv(&path, &header, &columns, &rows)?;
            files.push(path);
        }
    }
    if cfg.formats.contains(&Format::Json) {
        let path = dir.join("fig4.json");
        let dataset = WignerDataset {
            schema_version: SCHEMA_VERSION,
            dataset: "fig4",
            units: UNITS,
            conventions: CONVENTIONS,
            params: cfg.params.resolved(),
            derived: (&d).into(),
            input: cfg.input,
            cutoff: cfg.cutoff,
            metadata: cfg.metadata.as_ref(),
            panels: panels
                .into_iter()
                .map(|(panel, fidelity, grid)| WignerPanel {
                    panel,
                    fidelity,
                    negativity: wigner_negativity(&grid),
                    normalization: grid.normalization(),
                    grid,
                })
                .collect(),
        };
        write_json(&path, &dataset)?;
        files.push(path);
    }
    Ok(files)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_default_set_is_valid() {
        for id in FigureId::ALL {
            let cfg = figure_config(id, None).unwrap();
            assert_eq!(cfg.params.g1_mhz, 10.0, "{}", id.name());
            assert_eq!(id.name().parse::<FigureId>().unwrap(), id);
        }
        assert!("fig9".parse::<FigureId>().is_err());
        let cfg = figure_config(FigureId::Fig3d, None).unwrap();
        assert_eq!(cfg.input, InputStateSpec::SqueezedVacuum { xi: 1.0 });
        assert_eq!(cfg.sweep.unwrap().axis, Axis::Xi);
    }

    #[test]
    fn overrides_apply_after_defaults() {
        let cfg = figure_config(FigureId::Fig3a, Some(r#"{"sweep": {"points": 5}}"#)).unwrap();
        let s = cfg.sweep.unwrap();
        assert_eq!((s.start, s.stop, s.points), (2.0, 20.0, 5));
        assert!(figure_config(FigureId::Fig3a, Some(r#"{"sweep": {"axis": "alpha0"}}"#)).is_err());
    }

    #[test]
    fn distributions_match_the_states() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = figure_config(FigureId::Fig2b, Some(r#"{"formats": ["json"]}"#)).unwrap();
        let files = emit_figure(FigureId::Fig2b, &cfg, dir.path()).unwrap();
        let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&files[0]).unwrap()).unwrap();
        // P(0,0) = (1-x)^3/(1+x) with x = lambda_prime^2
        let p00 = v["main"]["probabilities"][0][0].as_f64().unwrap();
        assert!((p00 - 0.109_731_355_202_580_43).abs() < 1e-12);
        assert_eq!(v["main"]["probabilities"][0][1].as_f64().unwrap(), 0.0);
    }
}
