//! Construction of the protocol's states: the two-mode squeezed vacuum, its
//! reduced-squeezing variant after the subtraction pulse, the magnon- and
//! photon-subtracted non-Gaussian state, and the single-mode input families.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fock::{self, FockError, NumberDistribution, Tolerances, TruncatedState};
use crate::params::DerivedParams;

pub const MAGNON: usize = 0;
pub const PHOTON: usize = 1;

/// Default reflectivity of the low-reflectivity tap used for photon
/// subtraction. Enters only the heralding diagnostics.
pub const DEFAULT_REFLECTIVITY: f64 = 0.05;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StateError {
    #[error("squeezing amplitude {0} must lie in [0, 1)")]
    InvalidLambda(f64),
    #[error("geometric tail {tail:.3e} too large at cutoff {cutoff}; cutoff {suggested} or more is required")]
    Tail { tail: f64, cutoff: usize, suggested: usize },
    #[error("subtraction impossible: the reduced state is the vacuum")]
    SubtractionImpossible,
    #[error("amplitude^2 = {amp2} exceeds cutoff/4 = {limit}")]
    AmplitudeGuard { amp2: f64, limit: f64 },
    #[error("invalid input state: {0}")]
    InvalidSpec(String),
    #[error(transparent)]
    Fock(#[from] FockError),
}

pub type Result<T> = std::result::Result<T, StateError>;

/// `sqrt(1 - lambda^2) sum_n lambda^n |n, n>`, renormalized on the retained
/// subspace.
pub fn tmsv_state(lambda: f64, cutoff: usize) -> Result<TruncatedState> {
    tmsv_state_with(lambda, cutoff, &Tolerances::default())
}

pub fn tmsv_state_with(lambda: f64, cutoff: usize, tol: &Tolerances) -> Result<TruncatedState> {
    if !(0.0..1.0).contains(&lambda) {
        return Err(StateError::InvalidLambda(lambda));
    }
    if cutoff < 1 {
        return Err(FockError::InvalidCutoff(cutoff).into());
    }
    let q = lambda * lambda;
    let tail = q.powi(cutoff as i32);
    if tail > tol.tail {
        let suggested = (tol.tail.ln() / q.ln()).ceil() as usize;
        return Err(StateError::Tail { tail, cutoff, suggested });
    }
    let d = cutoff + 1;
    let head = (1.0 - q).sqrt();
    let mut amps = vec![C64::new(0.0, 0.0); d * d];
    let mut c = head;
    for n in 0..d {
        amps[n * d + n] = C64::new(c, 0.0);
        c *= lambda;
    }
    let (state, _) = TruncatedState::two_mode(cutoff, amps)?.normalize()?;
    Ok(state)
}

/// The squeezed vacuum after the subtraction pulse, with
/// `lambda' = tanh r cos theta`.
pub fn reduced_tmsv(derived: &DerivedParams, cutoff: usize) -> Result<TruncatedState> {
    tmsv_state(derived.lambda_prime, cutoff)
}

/// Subtracts one magnon, then one photon, from the reduced squeezed vacuum.
/// Returns the normalized state and the squared norm before normalization.
pub fn subtracted_state(derived: &DerivedParams, cutoff: usize) -> Result<(TruncatedState, f64)> {
    subtracted_from_lambda(derived.lambda_prime, cutoff)
}

pub fn subtracted_from_lambda(lambda_prime: f64, cutoff: usize) -> Result<(TruncatedState, f64)> {
    if lambda_prime == 0.0 {
        return Err(StateError::SubtractionImpossible);
    }
    let reduced = tmsv_state(lambda_prime, cutoff)?;
    let raw = reduced.apply_annihilation(MAGNON)?.apply_annihilation(PHOTON)?;
    let (state, norm) = raw.normalize().map_err(|e| match e {
        FockError::ZeroNorm => StateError::SubtractionImpossible,
        other => other.into(),
    })?;
    Ok((state, norm * norm))
}

/// Heralding probabilities of the two subtractions.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HeraldingReport {
    /// tan^2 theta, the single-microwave-photon click probability.
    pub magnon_probability: f64,
    /// Reflectivity of the optical tap.
    pub reflectivity: f64,
    /// Approximate click probability of the optical tap, `R <n_photon>` on the
    /// magnon-subtracted state; valid only for small `R`.
    pub photon_probability_approx: f64,
}

pub fn heralding_report(derived: &DerivedParams, reflectivity: f64, cutoff: usize) -> Result<HeraldingReport> {
    let reduced = reduced_tmsv(derived, cutoff)?;
    let (after_magnon, _) = reduced.apply_annihilation(MAGNON)?.normalize().map_err(|_| StateError::SubtractionImpossible)?;
    let n_photon: f64 = after_magnon.marginal(PHOTON).iter().enumerate().map(|(n, p)| n as f64 * p).sum();
    Ok(HeraldingReport {
        magnon_probability: derived.p_sub,
        reflectivity,
        photon_probability_approx: reflectivity * n_photon,
    })
}

/// Single-mode optical input to be teleported.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InputStateSpec {
    Coherent { beta: C64 },
    SinglePhoton,
    /// `S(xi)|0>` with `S(xi) = exp[(xi/2)(a^2 - a^dag^2)]`, real `xi`.
    SqueezedVacuum { xi: f64 },
    /// `N (|alpha0> + e^{i varphi} |-alpha0>)` with real `alpha0`.
    Cat { alpha0: f64, varphi: f64 },
}

impl InputStateSpec {
    pub fn kind_name(&self) -> &'static str {
        match self {
            InputStateSpec::Coherent { .. } => "coherent",
            InputStateSpec::SinglePhoton => "single_photon",
            InputStateSpec::SqueezedVacuum { .. } => "squeezed_vacuum",
            InputStateSpec::Cat { .. } => "cat",
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = match self {
            InputStateSpec::Coherent { beta } => beta.re.is_finite() && beta.im.is_finite(),
            InputStateSpec::SinglePhoton => true,
            InputStateSpec::SqueezedVacuum { xi } => xi.is_finite(),
            InputStateSpec::Cat { alpha0, varphi } => alpha0.is_finite() && varphi.is_finite(),
        };
        if !finite {
            return Err(StateError::InvalidSpec("non-finite parameter".into()));
        }
        if let InputStateSpec::Cat { alpha0, varphi } = self {
            if cat_norm_sqr(*alpha0, *varphi) <= 1e-300 {
                return Err(StateError::InvalidSpec("cat superposition has zero norm".into()));
            }
        }
        Ok(())
    }
}

/// `2 (1 + e^{-2 alpha0^2} cos varphi)`, the squared norm of the unnormalized
/// cat superposition.
pub fn cat_norm_sqr(alpha0: f64, varphi: f64) -> f64 {
    2.0 * (1.0 + (-2.0 * alpha0 * alpha0).exp() * varphi.cos())
}

fn coherent_amplitudes(beta: C64, cutoff: usize) -> Vec<C64> {
    let mut amps = Vec::with_capacity(cutoff + 1);
    let mut c = C64::new((-0.5 * beta.norm_sqr()).exp(), 0.0);
    for n in 0..=cutoff {
        amps.push(c);
        c = c * beta / ((n + 1) as f64).sqrt();
    }
    amps
}

fn amplitude_guard(amp2: f64, cutoff: usize) -> Result<()> {
    let limit = cutoff as f64 / 4.0;
    if amp2 > limit {
        return Err(StateError::AmplitudeGuard { amp2, limit });
    }
    Ok(())
}

/// Fock-basis amplitudes of an input state, normalized on the retained
/// subspace after the tail check.
pub fn input_state(spec: &InputStateSpec, cutoff: usize) -> Result<TruncatedState> {
    spec.validate()?;
    let amps = match *spec {
        InputStateSpec::Coherent { beta } => {
            amplitude_guard(beta.norm_sqr(), cutoff)?;
            coherent_amplitudes(beta, cutoff)
        }
        InputStateSpec::SinglePhoton => return Ok(TruncatedState::fock(cutoff, 1)?),
        InputStateSpec::SqueezedVacuum { xi } => {
            let t = xi.tanh();
            let mut amps = vec![C64::new(0.0, 0.0); cutoff + 1];
            let mut c = 1.0 / xi.cosh().sqrt();
            let mut n = 0;
            while 2 * n <= cutoff {
                amps[2 * n] = C64::new(c, 0.0);
                c *= -t * (((2 * n + 1) * (2 * n + 2)) as f64).sqrt() / (2 * (n + 1)) as f64;
                n += 1;
            }
            amps
        }
        InputStateSpec::Cat { alpha0, varphi } => {
            amplitude_guard(alpha0 * alpha0, cutoff)?;
            let plus = coherent_amplitudes(C64::new(alpha0, 0.0), cutoff);
            let rel = C64::from_polar(1.0, varphi);
            let norm = cat_norm_sqr(alpha0, varphi).sqrt();
            plus.iter()
                .enumerate()
                .map(|(n, c)| {
                    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
                    c * (C64::new(1.0, 0.0) + rel * sign) / norm
                })
                .collect()
        }
    };
    let raw = TruncatedState::single_mode(cutoff, amps)?;
    raw.check_tail(Tolerances::default().tail)?;
    let (state, _) = raw.normalize().map_err(|_| StateError::InvalidSpec("zero-norm input".into()))?;
    Ok(state)
}

/// `P(n_magnon, n_photon)` on the full retained grid.
pub fn joint_number_distribution(state: &TruncatedState) -> NumberDistribution {
    fock::number_distribution(state)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::{derive_params, PhysicalParams};
    use approx::assert_relative_eq;

    const LAMBDA: f64 = 0.683_016_770_591_247_5;
    const LAMBDA_PRIME: f64 = 0.676_184_736_181_490_2;

    #[test]
    fn tmsv_vacuum_limit() {
        let s = tmsv_state(0.0, 10).unwrap();
        assert_eq!(s.amplitude2(0, 0), C64::new(1.0, 0.0));
        assert!(s.is_normalized());
    }

    #[test]
    fn tmsv_populations() {
        let s = tmsv_state(LAMBDA, 40).unwrap();
        let p = joint_number_distribution(&s);
        assert_relative_eq!(p.get2(0, 0), 0.53348, epsilon = 1e-5);
        assert_relative_eq!(p.get2(1, 1), 0.24888, epsilon = 1e-5);
        for i in 0..=40 {
            for j in 0..=40 {
                if i != j {
                    assert_eq!(p.get2(i, j), 0.0);
                }
            }
        }
    }

    #[test]
    fn tmsv_tail_guard() {
        match tmsv_state(0.95, 40) {
            Err(StateError::Tail { suggested, .. }) => assert!(tmsv_state(0.95, suggested).is_ok()),
            other => panic!("{other:?}"),
        }
        assert!(matches!(tmsv_state(1.0, 40), Err(StateError::InvalidLambda(_))));
    }

    #[test]
    fn reduced_state_uses_lambda_prime() {
        let d = derive_params(&PhysicalParams::reference()).unwrap();
        assert_relative_eq!(d.lambda_prime, 0.67618, epsilon = 1e-5);
        let s = reduced_tmsv(&d, 40).unwrap();
        assert_relative_eq!(s.amplitude2(1, 1).re / s.amplitude2(0, 0).re, d.lambda_prime, epsilon = 1e-14);

        let mut no_pulse = PhysicalParams::reference();
        no_pulse.tau_s = 0.0;
        let d0 = derive_params(&no_pulse).unwrap();
        assert_eq!(reduced_tmsv(&d0, 40).unwrap(), tmsv_state(d0.lambda, 40).unwrap());

        let mut long = PhysicalParams::reference();
        long.tau_s = 1e-3;
        long.kappa_m = 1e-6;
        let d_long = derive_params(&long).unwrap();
        assert!(d_long.lambda_prime < 1e-12);
        assert!((reduced_tmsv(&d_long, 40).unwrap().amplitude2(0, 0).re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn subtracted_state_law() {
        let (s, weight) = subtracted_from_lambda(LAMBDA_PRIME, 40).unwrap();
        let x = LAMBDA_PRIME * LAMBDA_PRIME;
        let p = joint_number_distribution(&s);
        // normalized (k+1)^2 x^k law
        assert_relative_eq!(p.get2(0, 0), (1.0 - x).powi(3) / (1.0 + x), epsilon = 1e-12);
        assert_relative_eq!(p.get2(0, 0), 0.109_731_355_202_580_43, epsilon = 1e-12);
        assert_relative_eq!(p.get2(1, 1) / p.get2(0, 0), 4.0 * x, epsilon = 1e-12);
        assert_relative_eq!(4.0 * x, 1.8289, epsilon = 1e-4);
        for k in 0..40 {
            let law = (1.0 - x).powi(3) / (1.0 + x) * ((k + 1) as f64).powi(2) * x.powi(k as i32);
            assert!((p.get2(k, k) - law).abs() < 1e-10);
        }
        // sum n^2 (1 - x) x^n
        let geometric = x * (1.0 + x) / (1.0 - x).powi(2);
        assert_relative_eq!(weight, geometric, max_relative = 1e-10);
    }

    #[test]
    fn small_lambda_prime_is_near_vacuum() {
        let (s, _) = subtracted_from_lambda(0.01, 10).unwrap();
        assert!(joint_number_distribution(&s).get2(0, 0) >= 0.9996);
    }

    #[test]
    fn subtraction_of_vacuum_fails() {
        assert_eq!(subtracted_from_lambda(0.0, 10), Err(StateError::SubtractionImpossible));
    }

    #[test]
    fn subtraction_order_commutes() {
        let reduced = tmsv_state(LAMBDA_PRIME, 30).unwrap();
        let mp = reduced.apply_annihilation(MAGNON).unwrap().apply_annihilation(PHOTON).unwrap();
        let pm = reduced.apply_annihilation(PHOTON).unwrap().apply_annihilation(MAGNON).unwrap();
        for (a, b) in mp.amplitudes().iter().zip(pm.amplitudes()) {
            assert!((a - b).norm() < 1e-15);
        }
    }

    #[test]
    fn subtraction_raises_higher_order_weight() {
        let tm = joint_number_distribution(&tmsv_state(LAMBDA, 40).unwrap());
        let (s, _) = subtracted_from_lambda(LAMBDA_PRIME, 40).unwrap();
        let sub = joint_number_distribution(&s);
        let r_sub = sub.get2(1, 1) / sub.get2(0, 0);
        let r_tm = tm.get2(1, 1) / tm.get2(0, 0);
        assert_relative_eq!(r_tm, LAMBDA * LAMBDA, epsilon = 1e-12);
        assert!(r_sub > r_tm);
    }

    #[test]
    fn inputs() {
        let vac = input_state(&InputStateSpec::Coherent { beta: C64::new(0.0, 0.0) }, 20).unwrap();
        assert_eq!(vac.amplitude(0), C64::new(1.0, 0.0));

        let sq = input_state(&InputStateSpec::SqueezedVacuum { xi: 1.0 }, 80).unwrap();
        let p = fock::number_distribution(&sq);
        assert_relative_eq!(p.get(0), 1.0 / 1.0f64.cosh(), epsilon = 1e-10);
        assert_relative_eq!(p.get(0), 0.64805, epsilon = 1e-5);
        assert!((1..80).step_by(2).all(|n| p.get(n) == 0.0));
        let mean: f64 = (0..=80).map(|n| n as f64 * p.get(n)).sum();
        assert_relative_eq!(mean, 1.0f64.sinh().powi(2), epsilon = 1e-7);

        assert_relative_eq!(cat_norm_sqr(1.5, 0.0), 2.0 * (1.0 + (-4.5f64).exp()), epsilon = 1e-15);
        assert_relative_eq!(cat_norm_sqr(1.5, 0.0), 2.02222, epsilon = 1e-5);
        let even = input_state(&InputStateSpec::Cat { alpha0: 1.5, varphi: 0.0 }, 40).unwrap();
        assert!((1..40).step_by(2).all(|n| even.amplitude(n).norm() < 1e-15));
        let odd = input_state(&InputStateSpec::Cat { alpha0: 1.5, varphi: std::f64::consts::PI }, 40).unwrap();
        assert!((0..40).step_by(2).all(|n| odd.amplitude(n).norm() < 1e-15));
        // the analytic normalization already makes the truncated cat unit norm
        let raw: f64 = even.amplitudes().iter().map(|a| a.norm_sqr()).sum();
        assert_relative_eq!(raw, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn input_guards() {
        let r = input_state(&InputStateSpec::Cat { alpha0: 0.0, varphi: std::f64::consts::PI }, 20);
        assert!(matches!(r, Err(StateError::InvalidSpec(_))));
        let r = input_state(&InputStateSpec::Coherent { beta: C64::new(3.0, 0.0) }, 20);
        assert!(matches!(r, Err(StateError::AmplitudeGuard { .. })));
    }

    #[test]
    fn heralding() {
        let d = derive_params(&PhysicalParams::reference()).unwrap();
        let h = heralding_report(&d, DEFAULT_REFLECTIVITY, 40).unwrap();
        assert_eq!(h.magnon_probability, d.p_sub);
        // photon number of m|phi'> follows n x^n, whose mean is (1 + x)/(1 - x)
        let x = d.lambda_prime * d.lambda_prime;
        let n_after = (1.0 + x) / (1.0 - x);
        assert_relative_eq!(h.photon_probability_approx, DEFAULT_REFLECTIVITY * n_after, max_relative = 1e-8);
    }
}
