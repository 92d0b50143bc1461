//! Acceptance checks, one PASS/FAIL line per criterion. Runs without the
//! libtest harness so the lines always reach the terminal; exits nonzero if
//! any criterion fails.

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use magtele::entanglement::{logneg_numeric_with, logneg_subtracted_analytic, logneg_tmsv_analytic};
use magtele::fock::Tolerances;
use magtele::params::{
    covariance_ode_oracle, default_step, displacement_ode_oracle, magnon_mean_closed_form, solve_displacement_pulse,
};
use magtele::states::tmsv_state_with;
use magtele::teleport::{
    chi_teleported, fidelity_fock_oracle, fidelity_quadrature, printed, Channel, Resource,
};
use magtele::wigner::{cat_wigner_beta, wigner_map, wigner_negativity, WignerSource};
use magtele::{derive_params, InputStateSpec, PhysicalParams, QuadratureSettings, TruncatedState};
use magtele_cli::config::{Axis, SweepConfig};
use magtele_cli::figures::{figure_config, wigner_panels, FigureId};
use magtele_cli::{run_sweep, validate_report, RunConfig};
use num_complex::Complex64 as C64;

// Frozen from direct evaluation of the closed forms at the reference pulse set.
const LOGNEG_TMSV_REF: f64 = 1.669_494_290_437_365_6;
const LOGNEG_SUB_REF: f64 = 2.300_608_271_082_771;
const F_COHERENT_TMSV_REF: f64 = 0.844_227_814_105_794;
const F_COHERENT_SUB_REF: f64 = 0.896_230_080_673_918;
const F_UNIT_GAIN_AT_067618: f64 = 0.892_655_821_713_804_6;

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn coherent(re: f64) -> InputStateSpec {
    InputStateSpec::Coherent { beta: C64::new(re, 0.0) }
}

fn paper() -> PhysicalParams {
    PhysicalParams::reference()
}

fn c1_parameter_check() -> Outcome {
    let p = paper();
    let start = Instant::now();
    let d = derive_params(&p).unwrap();
    let elapsed = start.elapsed();
    let s = d.script_gc * p.tau_s;
    let pass = (s - 0.01005).abs() <= 1e-4 && elapsed < Duration::from_millis(1);
    outcome(pass, format!("script_gc * tau_s = {s:.6} (target 0.01005 +- 1e-4), derived in {elapsed:?}"))
}

fn c2_classical_boundary() -> Outcome {
    let exact = printed::coherent_tmsv(0.0, 1.0);
    let ch = Channel::new(0.0, 0.0, 1.0);
    let q = fidelity_quadrature(&coherent(1.0), &ch, Resource::Tmsv, &QuadratureSettings::default()).unwrap();
    let sq = [0.0, 0.3, 0.683, 0.9]
        .iter()
        .map(|&l| (printed::squeezed_tmsv(l, 1.0, 0.0) - (1.0 + l) / 2.0).abs())
        .fold(0.0, f64::max);
    let pass = exact == 0.5 && (q.fidelity - 0.5).abs() <= 1e-6 && sq <= 1e-12;
    outcome(pass, format!("closed form {exact}, quadrature {:.9}, squeezed xi=0 max dev {sq:.1e}", q.fidelity))
}

fn c3_unit_gain_identity() -> Outcome {
    let worst = (0..50)
        .map(|i| 0.9 * i as f64 / 49.0)
        .map(|l| (printed::coherent_nongaussian(l, 1.0) - printed::coherent_nongaussian_unit_gain(l)).abs())
        .fold(0.0, f64::max);
    let lp = 0.67618;
    let value = printed::coherent_nongaussian_unit_gain(lp);
    let ch = Channel::new(lp, lp, 1.0);
    let oracle = fidelity_quadrature(&coherent(1.0), &ch, Resource::Nongaussian, &QuadratureSettings::default()).unwrap();
    let pass = worst <= 1e-12 && (value - F_UNIT_GAIN_AT_067618).abs() <= 1e-5 && (value - oracle.fidelity).abs() <= 1e-5;
    outcome(
        pass,
        format!(
            "max |general - unit-gain| = {worst:.1e}; unit-gain value {value:.7} (frozen {F_UNIT_GAIN_AT_067618:.7}, quadrature {:.7})",
            oracle.fidelity
        ),
    )
}

/// Truncated, renormalized subtracted state `sum (k+1) l^k |k,k>`.
fn truncated_subtracted(l: f64, cutoff: usize) -> TruncatedState {
    let d = cutoff + 1;
    let mut amps = vec![C64::new(0.0, 0.0); d * d];
    for k in 0..d {
        amps[k * d + k] = C64::new((k + 1) as f64 * l.powi(k as i32), 0.0);
    }
    TruncatedState::two_mode(cutoff, amps).unwrap().normalize().unwrap().0
}

fn c4_entanglement_oracle() -> Outcome {
    let start = Instant::now();
    let cutoff = 40;
    let cos_theta = derive_params(&paper()).unwrap().cos_theta;
    let loose = Tolerances { tail: 1.0, ..Default::default() };
    let (mut sub_err, mut sub_at, mut tm_err, mut tm_at) = (0.0f64, 0.0, 0.0f64, 0.0);
    for i in 1..=12 {
        let r = 0.1 * i as f64;
        let lp = r.tanh() * cos_theta;
        // the tail guard is relaxed here so truncation error shows up as a number
        let sub = truncated_subtracted(lp, cutoff);
        let e = (logneg_numeric_with(&sub, 1.0).unwrap() - logneg_subtracted_analytic(lp).unwrap()).abs();
        if e > sub_err {
            (sub_err, sub_at) = (e, r);
        }
        let tm = tmsv_state_with(r.tanh(), cutoff, &loose).unwrap().normalize().unwrap().0;
        let e = (logneg_numeric_with(&tm, 1.0).unwrap() - logneg_tmsv_analytic(r)).abs();
        if e > tm_err {
            (tm_err, tm_at) = (e, r);
        }
    }
    let elapsed = start.elapsed();
    let pass = sub_err <= 1e-6 && tm_err <= 1e-6 && elapsed < Duration::from_secs(10);
    outcome(
        pass,
        format!(
            "cutoff {cutoff}: subtracted max err {sub_err:.2e} at r = {sub_at:.1}, tmsv max err {tm_err:.2e} at r = {tm_at:.1}, {elapsed:.2?}"
        ),
    )
}

fn g1_sweep(input: InputStateSpec) -> RunConfig {
    RunConfig {
        input,
        sweep: Some(SweepConfig { axis: Axis::G1Mhz, start: 2.0, stop: 20.0, points: 19 }),
        ..Default::default()
    }
}

fn c5_distillation_advantage() -> Outcome {
    let mut failures = Vec::new();
    let mut ent = g1_sweep(InputStateSpec::SinglePhoton);
    ent.quantity = magtele_cli::config::Quantity::Entanglement;
    let mut spot = None;
    for rec in run_sweep(&ent).unwrap() {
        let (t, n) = (rec.value(Resource::Tmsv).unwrap(), rec.value(Resource::Nongaussian).unwrap());
        if n.partial_cmp(&t) != Some(std::cmp::Ordering::Greater) {
            failures.push(format!("E_N at G1 {}", rec.sweep_value.unwrap()));
        }
        if rec.index == 8 {
            spot = Some((t, n));
        }
    }
    let (e_t, e_n) = spot.unwrap();
    let mut f_spot = (0.0, 0.0);
    for input in [coherent(1.0), InputStateSpec::SinglePhoton, InputStateSpec::SqueezedVacuum { xi: 1.0 }] {
        for rec in run_sweep(&g1_sweep(input)).unwrap() {
            let (t, n) = (rec.value(Resource::Tmsv).unwrap(), rec.value(Resource::Nongaussian).unwrap());
            if n.partial_cmp(&t) != Some(std::cmp::Ordering::Greater) {
                failures.push(format!("{} F at G1 {}", input.kind_name(), rec.sweep_value.unwrap()));
            }
            if rec.index == 8 && matches!(input, InputStateSpec::Coherent { .. }) {
                f_spot = (t, n);
            }
        }
    }
    let spots_ok = (e_t - LOGNEG_TMSV_REF).abs() <= 1e-4
        && (e_n - LOGNEG_SUB_REF).abs() <= 1e-4
        && (f_spot.0 - F_COHERENT_TMSV_REF).abs() <= 1e-4
        && (f_spot.1 - F_COHERENT_SUB_REF).abs() <= 1e-4;
    outcome(
        failures.is_empty() && spots_ok,
        format!(
            "19-point G1 grid, {} ordering violations; at 10 MHz E_N {e_t:.5} vs {e_n:.5}, F(coherent) {:.5} vs {:.5}",
            failures.len(),
            f_spot.0,
            f_spot.1
        ),
    )
}

fn c6_vacuum_channel() -> Outcome {
    let ch = Channel::vacuum();
    let settings = QuadratureSettings::default();
    let q = fidelity_quadrature(&InputStateSpec::SinglePhoton, &ch, Resource::Tmsv, &settings).unwrap();
    let f = fidelity_fock_oracle(&InputStateSpec::SinglePhoton, &ch, Resource::Tmsv, 40, &settings).unwrap();
    let pass = (q.fidelity - 0.25).abs() <= 1e-4 && (f.fidelity - 0.25).abs() <= 1e-4;
    outcome(pass, format!("quadrature {:.9}, Fock reconstruction {:.9} (exact 1/4)", q.fidelity, f.fidelity))
}

fn c7_appendix_adjudication() -> Outcome {
    let report = validate_report(&RunConfig::default());
    let vac = report
        .entries
        .iter()
        .find(|e| e.context.check == "vacuum_channel_single_photon")
        .expect("vacuum check present");
    let wl = report.whitelist.iter().find(|w| w.formula == "single_photon_tmsv").unwrap();
    let d = &vac.discrepancy;
    let pass = d.analytic == 4.0
        && (d.oracle - 0.25).abs() <= 1e-4
        && d.flagged
        && vac.whitelisted
        && wl.variant_tracks_oracle == Some(true)
        && report.summary.exit_status == 0;
    outcome(
        pass,
        format!(
            "printed {} vs oracle {:.6} (flagged, whitelisted); cubed variant max diff {:.1e} over the sweep; exit {}",
            d.analytic,
            d.oracle,
            wl.variant_max_difference.unwrap_or(f64::NAN),
            report.summary.exit_status
        ),
    )
}

fn column(cfg: &RunConfig, r: Resource) -> Vec<f64> {
    run_sweep(cfg).unwrap().iter().map(|rec| rec.value(r).unwrap()).collect()
}

fn strictly_decreasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] < w[0])
}

fn max_step(v: &[f64]) -> f64 {
    v.windows(2).map(|w| (w[1] - w[0]).abs()).fold(0.0, f64::max)
}

fn c8_monotonicity() -> Outcome {
    let xi = figure_config(FigureId::Fig3d, None).unwrap();
    let amp = figure_config(FigureId::Fig5b, None).unwrap();
    let (xt, xn) = (column(&xi, Resource::Tmsv), column(&xi, Resource::Nongaussian));
    let (at, an) = (column(&amp, Resource::Tmsv), column(&amp, Resource::Nongaussian));
    let crosses = at.first().unwrap() > &0.5 && at.last().unwrap() < &0.5;
    let smoother = max_step(&an) < max_step(&at);
    let cat = |alpha0: f64, varphi: f64, r: Resource| {
        let mut cfg = amp.clone();
        cfg.input = InputStateSpec::Cat { alpha0, varphi };
        cfg.sweep = None;
        run_sweep(&cfg).unwrap()[0].value(r).unwrap()
    };
    let mut phase_ok = true;
    let mut detail = String::new();
    for r in Resource::ALL {
        let phases: Vec<f64> = (0..13).map(|i| cat(1.5, 2.0 * std::f64::consts::PI * i as f64 / 12.0, r)).collect();
        let spread = phases.iter().cloned().fold(f64::MIN, f64::max) - phases.iter().cloned().fold(f64::MAX, f64::min);
        let drop = cat(1.0, 0.0, r) - cat(2.0, 0.0, r);
        phase_ok &= spread < drop;
        detail.push_str(&format!(" {}: phase spread {spread:.4} vs amplitude drop {drop:.4};", r.name()));
    }
    let pass = strictly_decreasing(&xt) && strictly_decreasing(&xn) && strictly_decreasing(&at) && strictly_decreasing(&an)
        && crosses
        && smoother
        && phase_ok;
    outcome(
        pass,
        format!(
            "xi and alpha0 sweeps strictly decreasing: {}; tmsv cat crosses 0.5: {crosses}; largest step {:.4} (nongaussian) vs {:.4} (tmsv);{detail}",
            strictly_decreasing(&xt) && strictly_decreasing(&xn) && strictly_decreasing(&at) && strictly_decreasing(&an),
            max_step(&an),
            max_step(&at)
        ),
    )
}

fn c9_wigner_negativity() -> Outcome {
    let start = Instant::now();
    let cfg = figure_config(FigureId::Fig4, None).unwrap();
    let (d, panels) = wigner_panels(&cfg).unwrap();
    let input = &panels[0].2;
    let analytic_min = input
        .xs
        .iter()
        .flat_map(|&x| input.ps.iter().map(move |&p| C64::new(x, p) / 2f64.sqrt()))
        .map(|b| cat_wigner_beta(1.5, 0.0, b))
        .fold(f64::MAX, f64::min);
    let numeric_min = wigner_negativity(input).min_value_beta;
    let mins: Vec<f64> = panels[1..].iter().map(|(_, _, g)| wigner_negativity(g).min_value).collect();
    // Fourier path from the teleported characteristic function on the same grid
    let ch = Channel::from_derived(&d, false);
    let grid = magtele::GridSpec { resolution: cfg.figure.wigner_resolution, ..magtele::GridSpec::for_cat(1.5) };
    let mut path_diff = 0.0f64;
    for (i, r) in Resource::ALL.into_iter().enumerate() {
        let chi = chi_teleported(&cfg.input, &ch, r);
        let fourier = wigner_map(WignerSource::Chi(&chi, &cfg.quadrature), &grid).unwrap();
        let parity = &panels[i + 1].2;
        for (a, b) in fourier.values.iter().zip(&parity.values) {
            path_diff = path_diff.max((a - b).abs());
        }
    }
    let elapsed = start.elapsed();
    let pass = (analytic_min + 0.36).abs() <= 0.02
        && (numeric_min - analytic_min).abs() <= 1e-6
        && mins.iter().all(|&m| m < 0.0)
        && path_diff <= 1e-4
        && elapsed < Duration::from_secs(60);
    outcome(
        pass,
        format!(
            "input cat min W(beta) {analytic_min:.4} (grid {numeric_min:.4}); teleported min W {:.4} (tmsv), {:.4} (nongaussian); parity vs Fourier {path_diff:.1e}; {} x {} in {elapsed:.1?}",
            mins[0], mins[1], grid.resolution, grid.resolution
        ),
    )
}

fn c10_dynamics() -> Outcome {
    // shrink the coupling-to-decay ratio at fixed script_gc (and script_g1)
    let scaled = |s: f64| {
        let mut p = paper();
        p.g_c *= s;
        p.kappa_c *= s * s;
        p.g1 *= s;
        p.kappa1 *= s * s;
        p
    };
    let displacement_err = |p: &PhysicalParams| {
        let alpha_d = C64::new(1.0, 0.0);
        let m0 = C64::new(0.5, 0.0);
        let pulse = solve_displacement_pulse(alpha_d, p).unwrap();
        let closed = magnon_mean_closed_form(m0, &pulse, p);
        let ode = displacement_ode_oracle(alpha_d, m0, p, default_step(p.kappa_c)).unwrap();
        (ode - closed).norm() / closed.norm()
    };
    let occupancy_err = |p: &PhysicalParams| {
        let target = derive_params(p).unwrap().r.sinh().powi(2);
        (covariance_ode_oracle(p, default_step(p.kappa1)).unwrap() - target).abs() / target
    };
    let (p1, p2) = (scaled(1.0), scaled(2.0));
    let (d1, d2) = (displacement_err(&p1), displacement_err(&p2));
    let (n1, n2) = (occupancy_err(&p1), occupancy_err(&p2));
    let pass = d1 <= 0.05 && d2 < 0.015 && n1 <= 0.10 && n2 < n1;
    outcome(
        pass,
        format!(
            "displacement rel err {:.2}% at g_c/kappa_c = {:.2}, {:.2}% at {:.3}; occupancy rel err {:.2}% at G1/kappa1 = {:.2}, {:.2}% at {:.3}",
            100.0 * d1,
            p1.g_c / p1.kappa_c,
            100.0 * d2,
            p2.g_c / p2.kappa_c,
            100.0 * n1,
            p1.g1 / p1.kappa1,
            100.0 * n2,
            p2.g1 / p2.kappa1
        ),
    )
}

fn run_all(dir: &Path, threads: usize) -> Vec<(String, Vec<u8>)> {
    let bin = env!("CARGO_BIN_EXE_magtele");
    let mut args: Vec<Vec<String>> = FigureId::ALL.iter().map(|f| vec!["figure".into(), f.name().into()]).collect();
    args.push(vec!["validate".into()]);
    for a in args {
        let status = Command::new(bin)
            .args(&a)
            .args(["--out", dir.to_str().unwrap(), "--threads", &threads.to_string()])
            .env_remove("MAGTELE_OUT_DIR")
            .output()
            .expect("binary runs");
        assert!(status.status.success(), "{a:?}: {}", String::from_utf8_lossy(&status.stderr));
    }
    let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap()))
        .collect();
    files.sort();
    files
}

fn c11_determinism() -> Outcome {
    let tmp = tempfile::tempdir().unwrap();
    let a = run_all(&tmp.path().join("a"), 4);
    let b = run_all(&tmp.path().join("b"), 4);
    let c = run_all(&tmp.path().join("c"), 1);
    let differing: Vec<&str> = a
        .iter()
        .zip(b.iter().zip(&c))
        .filter(|&(x, (y, z))| x != y || x != z)
        .map(|(x, _)| x.0.as_str())
        .collect();
    let pass = !a.is_empty() && a.len() == b.len() && a.len() == c.len() && differing.is_empty();
    outcome(pass, format!("{} files from every figure and the report, two runs at 4 threads and one at 1; differing: {differing:?}", a.len()))
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("paper parameter check", c1_parameter_check),
        ("classical boundary", c2_classical_boundary),
        ("unit-gain identity", c3_unit_gain_identity),
        ("entanglement oracle equivalence", c4_entanglement_oracle),
        ("distillation advantage", c5_distillation_advantage),
        ("vacuum-channel oracle self-check", c6_vacuum_channel),
        ("printed-formula adjudication", c7_appendix_adjudication),
        ("monotonicity", c8_monotonicity),
        ("Wigner negativity", c9_wigner_negativity),
        ("dynamics oracles", c10_dynamics),
        ("determinism", c11_determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let o = check();
        if !o.pass {
            failed += 1;
        }
        println!("{} criterion {:>2} {name}: {}", if o.pass { "PASS" } else { "FAIL" }, i + 1, o.detail);
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
