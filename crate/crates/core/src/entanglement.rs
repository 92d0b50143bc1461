//! Logarithmic negativity of the shared resource states.
//!
//! `E_N = ln(1 + 2 N)` with `N` the absolute sum of the negative eigenvalues
//! of the partial transpose. Natural logarithm throughout, so the squeezed
//! vacuum gives `E_N = 2r`.

use serde::Serialize;
use thiserror::Error;

use crate::fock::{self, DensityOperator, FockError, TruncatedState};
use crate::states::{self, StateError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EntanglementError {
    #[error("reduced squeezing amplitude {0} must lie in [0, 1)")]
    InvalidLambda(f64),
    #[error("logarithmic negativity needs a two-mode state, got {0} mode(s)")]
    NotTwoMode(usize),
    #[error(transparent)]
    Fock(#[from] FockError),
    #[error(transparent)]
    State(#[from] StateError),
}

pub type Result<T> = std::result::Result<T, EntanglementError>;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EntanglementResult {
    pub e_n_analytic: f64,
    pub e_n_numeric: f64,
    pub discrepancy: f64,
    pub cutoff_used: usize,
}

impl EntanglementResult {
    fn new(analytic: f64, numeric: f64, cutoff: usize) -> Self {
        EntanglementResult {
            e_n_analytic: analytic,
            e_n_numeric: numeric,
            discrepancy: (analytic - numeric).abs(),
            cutoff_used: cutoff,
        }
    }
}

pub fn logneg_tmsv_analytic(r: f64) -> f64 {
    2.0 * r
}

/// `ln[(1 + l)^3 / ((1 + l^2)(1 - l))]` for the magnon- and photon-subtracted
/// state.
pub fn logneg_subtracted_analytic(lambda_prime: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&lambda_prime) {
        return Err(EntanglementError::InvalidLambda(lambda_prime));
    }
    let l = lambda_prime;
    Ok(((1.0 + l).powi(3) / ((1.0 + l * l) * (1.0 - l))).ln())
}

/// `2 ln(sum c_n)` for a normalized Schmidt-diagonal state `sum c_n |n, n>`
/// with nonnegative coefficients.
pub fn logneg_schmidt(coeffs: &[f64]) -> f64 {
    let norm: f64 = coeffs.iter().map(|c| c * c).sum::<f64>().sqrt();
    2.0 * (coeffs.iter().sum::<f64>() / norm).ln()
}

/// Numeric log-negativity from the dense partial transpose of `|psi><psi|`.
pub fn logneg_numeric(state: &TruncatedState) -> Result<f64> {
    logneg_numeric_with(state, fock::Tolerances::default().tail)
}

/// As [`logneg_numeric`] with an explicit tail tolerance.
pub fn logneg_numeric_with(state: &TruncatedState, tail_tol: f64) -> Result<f64> {
    if state.modes() != 2 {
        return Err(EntanglementError::NotTwoMode(state.modes()));
    }
    state.check_tail(tail_tol)?;
    let rho = DensityOperator::from_pure(state);
    logneg_density(&rho)
}

pub fn logneg_density(rho: &DensityOperator) -> Result<f64> {
    let n = fock::partial_transpose_negativity(rho)?;
    Ok((1.0 + 2.0 * n).ln())
}

pub fn entanglement_tmsv(r: f64, cutoff: usize) -> Result<EntanglementResult> {
    let state = states::tmsv_state(r.tanh(), cutoff)?;
    Ok(EntanglementResult::new(logneg_tmsv_analytic(r), logneg_numeric(&state)?, cutoff))
}

pub fn entanglement_subtracted(lambda_prime: f64, cutoff: usize) -> Result<EntanglementResult> {
    let analytic = logneg_subtracted_analytic(lambda_prime)?;
    let (state, _) = states::subtracted_from_lambda(lambda_prime, cutoff)?;
    Ok(EntanglementResult::new(analytic, logneg_numeric(&state)?, cutoff))
}
