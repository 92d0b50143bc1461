//! Physical pulse and coupling parameters, the dimensionless channel
//! parameters derived from them, the displacement-pulse solver, and ODE
//! oracles for the adiabatically eliminated dynamics.
//!
//! All rates are angular frequencies in rad/s and all durations in seconds.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ode::rk4;

/// Converts a frequency given as `value / 2pi` in MHz to rad/s.
pub fn mhz_to_rad(f_mhz: f64) -> f64 {
    2.0 * PI * f_mhz * 1e6
}

pub fn rad_to_mhz(w: f64) -> f64 {
    w / (2.0 * PI * 1e6)
}

pub fn ns_to_s(t_ns: f64) -> f64 {
    t_ns * 1e-9
}

pub fn s_to_ns(t: f64) -> f64 {
    t * 1e9
}

/// Coupling ratio above which a warning is raised.
pub const COUPLING_WARN: f64 = 0.1;
/// Coupling ratio above which adiabatic elimination is rejected.
pub const COUPLING_ERROR: f64 = 0.3;
/// Fraction of the magnon lifetime the pulse train may use before warning.
pub const DISSIPATION_WARN: f64 = 0.1;
/// Single-subtraction probability above which a warning is raised.
pub const SUBTRACTION_WARN: f64 = 0.05;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParamError {
    #[error("{name} must be {requirement}, got {value}")]
    OutOfRange { name: &'static str, requirement: &'static str, value: f64 },
    #[error("{name}/{decay} = {ratio:.3} exceeds {limit}; adiabatic elimination does not hold")]
    StrongCoupling { name: &'static str, decay: &'static str, ratio: f64, limit: f64 },
    #[error("pulse train lasts {ratio:.3} magnon lifetimes; magnon dissipation cannot be neglected")]
    Dissipation { ratio: f64 },
    #[error("displacement unreachable: tau_d and g_c must be positive")]
    UnreachableDisplacement,
    #[error("step {dt:.3e} s exceeds the stability bound {max:.3e} s")]
    StepTooLarge { dt: f64, max: f64 },
    #[error("ODE integration diverged")]
    Unstable,
}

/// Guard conditions that hold loosely enough to proceed.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GuardWarning {
    OpticalCoupling { ratio: f64 },
    MicrowaveCoupling { ratio: f64 },
    Dissipation { ratio: f64 },
    SubtractionProbability { p_sub: f64 },
}

impl std::fmt::Display for GuardWarning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            GuardWarning::OpticalCoupling { ratio } => write!(f, "G1/kappa1 = {ratio:.3} above {COUPLING_WARN}"),
            GuardWarning::MicrowaveCoupling { ratio } => write!(f, "g_c/kappa_c = {ratio:.3} above {COUPLING_WARN}"),
            GuardWarning::Dissipation { ratio } => {
                write!(f, "pulse train is {ratio:.3} magnon lifetimes (above {DISSIPATION_WARN})")
            }
            GuardWarning::SubtractionProbability { p_sub } => {
                write!(f, "subtraction probability {p_sub:.4} above {SUBTRACTION_WARN}")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhysicalParams {
    /// Pump-enhanced optomagnonic coupling.
    pub g1: f64,
    /// Decay rate of the Stokes (TE) whispering-gallery mode.
    pub kappa1: f64,
    /// Cavity-magnon coupling.
    pub g_c: f64,
    /// Microwave cavity decay rate.
    pub kappa_c: f64,
    /// Magnon decay rate.
    pub kappa_m: f64,
    pub tau_e: f64,
    pub tau_s: f64,
    pub tau_d: f64,
    pub tau_r: f64,
}

impl PhysicalParams {
    /// The experimentally motivated reference set: G1/2pi = 10 MHz,
    /// kappa1/2pi = 100 MHz, g_c/2pi = 4 MHz, kappa_c/2pi = 40 MHz,
    /// kappa_m/2pi = 0.5 MHz, tau_e = 50 ns, tau_s = 4 ns, tau_d = 10 ns.
    pub fn reference() -> Self {
        Self {
            g1: mhz_to_rad(10.0),
            kappa1: mhz_to_rad(100.0),
            g_c: mhz_to_rad(4.0),
            kappa_c: mhz_to_rad(40.0),
            kappa_m: mhz_to_rad(0.5),
            tau_e: ns_to_s(50.0),
            tau_s: ns_to_s(4.0),
            tau_d: ns_to_s(10.0),
            tau_r: 0.0,
        }
    }

    pub fn with_g1(mut self, g1: f64) -> Self {
        self.g1 = g1;
        self
    }

    pub fn total_duration(&self) -> f64 {
        self.tau_e + self.tau_s + self.tau_d + self.tau_r
    }

    /// Checks the invariants and returns the soft guard warnings.
    pub fn validate(&self) -> Result<Vec<GuardWarning>, ParamError> {
        let positive = [("kappa1", self.kappa1), ("kappa_c", self.kappa_c), ("kappa_m", self.kappa_m)];
        for (name, value) in positive {
            if !(value > 0.0 && value.is_finite()) {
                return Err(ParamError::OutOfRange { name, requirement: "positive and finite", value });
            }
        }
        let non_negative = [
            ("g1", self.g1),
            ("g_c", self.g_c),
            ("tau_e", self.tau_e),
            ("tau_s", self.tau_s),
            ("tau_d", self.tau_d),
            ("tau_r", self.tau_r),
        ];
        for (name, value) in non_negative {
            if !(value >= 0.0 && value.is_finite()) {
                return Err(ParamError::OutOfRange { name, requirement: "non-negative and finite", value });
            }
        }
        let mut warnings = Vec::new();
        let optical = self.g1 / self.kappa1;
        if optical > COUPLING_ERROR {
            return Err(ParamError::StrongCoupling { name: "G1", decay: "kappa1", ratio: optical, limit: COUPLING_ERROR });
        }
        if optical > COUPLING_WARN + 1e-12 {
            warnings.push(GuardWarning::OpticalCoupling { ratio: optical });
        }
        let microwave = self.g_c / self.kappa_c;
        if microwave > COUPLING_ERROR {
            return Err(ParamError::StrongCoupling { name: "g_c", decay: "kappa_c", ratio: microwave, limit: COUPLING_ERROR });
        }
        if microwave > COUPLING_WARN + 1e-12 {
            warnings.push(GuardWarning::MicrowaveCoupling { ratio: microwave });
        }
        let lifetimes = self.total_duration() * self.kappa_m;
        if lifetimes > 1.0 {
            return Err(ParamError::Dissipation { ratio: lifetimes });
        }
        if lifetimes > DISSIPATION_WARN {
            warnings.push(GuardWarning::Dissipation { ratio: lifetimes });
        }
        Ok(warnings)
    }
}

/// Dimensionless channel parameters.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DerivedParams {
    /// G1^2 / kappa1.
    pub script_g1: f64,
    /// g_c^2 / kappa_c.
    pub script_gc: f64,
    /// Two-mode squeezing, cosh r = exp(script_g1 tau_e).
    pub r: f64,
    pub lambda: f64,
    /// Subtraction angle, cos theta = exp(-script_gc tau_s).
    pub theta: f64,
    pub cos_theta: f64,
    pub lambda_prime: f64,
    /// Residual magnon amplitude after the displacement pulse.
    pub gamma: f64,
    /// Heralding probability of the magnon subtraction, tan^2 theta.
    pub p_sub: f64,
    pub warnings: Vec<GuardWarning>,
}

pub fn derive_params(p: &PhysicalParams) -> Result<DerivedParams, ParamError> {
    let mut warnings = p.validate()?;
    let script_g1 = p.g1 * p.g1 / p.kappa1;
    let script_gc = p.g_c * p.g_c / p.kappa_c;
    let x = script_g1 * p.tau_e;
    // tanh r = sqrt(1 - e^{-2x}); r = acosh(e^x) written to stay accurate as x -> 0
    let lambda = (-(-2.0 * x).exp_m1()).sqrt();
    let r = x + (1.0 + lambda).ln();
    let s = script_gc * p.tau_s;
    let cos_theta = (-s).exp();
    let theta = (-(-2.0 * s).exp_m1()).sqrt().atan2(cos_theta);
    let p_sub = (2.0 * s).exp_m1();
    if p_sub > SUBTRACTION_WARN {
        warnings.push(GuardWarning::SubtractionProbability { p_sub });
    }
    Ok(DerivedParams {
        script_g1,
        script_gc,
        r,
        lambda,
        theta,
        cos_theta,
        lambda_prime: lambda * cos_theta,
        gamma: (-script_gc * p.tau_d).exp(),
        p_sub,
        warnings,
    })
}

/// Microwave drive realizing a target magnon displacement.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DisplacementPulse {
    /// Drive coupling strength (1/s).
    pub e_d: f64,
    /// Drive phase (rad).
    pub phi: f64,
    pub alpha_d: C64,
}

pub fn solve_displacement_pulse(alpha_d: C64, p: &PhysicalParams) -> Result<DisplacementPulse, ParamError> {
    if alpha_d == C64::new(0.0, 0.0) {
        return Ok(DisplacementPulse { e_d: 0.0, phi: 0.0, alpha_d });
    }
    if !(p.tau_d > 0.0 && p.g_c > 0.0) {
        return Err(ParamError::UnreachableDisplacement);
    }
    let one_minus_gamma = -(-p.g_c * p.g_c / p.kappa_c * p.tau_d).exp_m1();
    Ok(DisplacementPulse {
        e_d: alpha_d.norm() * p.g_c / one_minus_gamma,
        phi: alpha_d.arg() + PI / 2.0,
        alpha_d,
    })
}

/// Adiabatic closed form for the magnon mean at the end of the displacement
/// pulse: `gamma m0 + i (gamma - 1) E_d e^{i phi} / g_c`.
pub fn magnon_mean_closed_form(m0: C64, pulse: &DisplacementPulse, p: &PhysicalParams) -> C64 {
    let gamma = (-p.g_c * p.g_c / p.kappa_c * p.tau_d).exp();
    if pulse.e_d == 0.0 {
        return m0 * gamma;
    }
    m0 * gamma + C64::new(0.0, gamma - 1.0) * C64::from_polar(pulse.e_d, pulse.phi) / p.g_c
}

fn steps_for(duration: f64, dt: f64, max_dt: f64) -> Result<usize, ParamError> {
    if !(dt > 0.0) || dt > max_dt * (1.0 + 1e-12) {
        return Err(ParamError::StepTooLarge { dt, max: max_dt });
    }
    Ok((duration / dt).ceil() as usize)
}

/// Integrates the cavity and magnon mean-value equations under the pulse that
/// `solve_displacement_pulse` returns for `alpha_d`, starting from an empty
/// cavity, and returns the magnon mean after `tau_d`.
pub fn displacement_ode_oracle(alpha_d: C64, m0: C64, p: &PhysicalParams, dt: f64) -> Result<C64, ParamError> {
    let pulse = solve_displacement_pulse(alpha_d, p)?;
    let steps = steps_for(p.tau_d, dt, 0.01 / p.kappa_c)?;
    let drive = C64::from_polar(pulse.e_d, pulse.phi);
    let i = C64::new(0.0, 1.0);
    let (kc, gc) = (p.kappa_c, p.g_c);
    let bound = 1e6 * (m0.norm() + alpha_d.norm() + 1.0);
    let y = rk4(
        |y: &[C64; 2]| [-kc * y[0] - i * gc * y[1] + drive, -i * gc * y[0]],
        [C64::new(0.0, 0.0), m0],
        p.tau_d,
        steps,
        |y| y[1].norm().is_finite() && y[1].norm() < bound,
    )
    .ok_or(ParamError::Unstable)?;
    Ok(y[1])
}

/// Integrates the normally ordered second moments of the two-mode squeezing
/// interaction with decay on the optical mode only and vacuum input noise, and
/// returns the magnon occupancy after `tau_e`.
///
/// State: `[<a^dag a>, <m^dag m>, <a m>]`.
pub fn covariance_ode_oracle(p: &PhysicalParams, dt: f64) -> Result<f64, ParamError> {
    let steps = steps_for(p.tau_e, dt, 0.01 / p.kappa1)?;
    let (g, k) = (p.g1, p.kappa1);
    let i = C64::new(0.0, 1.0);
    let y = rk4(
        |y: &[C64; 3]| {
            let (na, nm, c) = (y[0], y[1], y[2]);
            let exchange = i * g * (c - c.conj());
            [-2.0 * k * na + exchange, exchange, -k * c - i * g * (nm + na + 1.0)]
        },
        [C64::new(0.0, 0.0); 3],
        p.tau_e,
        steps,
        |y| y[1].re.is_finite() && y[1].re < 1e12,
    )
    .ok_or(ParamError::Unstable)?;
    Ok(y[1].re)
}

/// Default integration step, `0.005 / kappa`.
pub fn default_step(kappa: f64) -> f64 {
    0.005 / kappa
}
