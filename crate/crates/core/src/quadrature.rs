//! Deterministic tensor-product trapezoid quadrature over a square in the
//! complex plane.
//!
//! Rows are evaluated in parallel, each row is summed sequentially, and row
//! sums are combined by a fixed pairwise tree, so results do not depend on
//! the number of threads.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuadratureSettings {
    /// Points per axis on the first pass. Must be odd so the origin is a node.
    pub initial_points: usize,
    /// Number of allowed doublings of the spacing.
    pub max_refinements: usize,
    /// Refinement stops once successive estimates differ by less than this.
    pub target_error: f64,
    /// Error bars above this are reported as non-convergence.
    pub fail_threshold: f64,
    pub min_half_width: f64,
    /// `L = max(min_half_width, width_factor * decay_scale)`.
    pub width_factor: f64,
}

impl Default for QuadratureSettings {
    fn default() -> Self {
        QuadratureSettings {
            initial_points: 201,
            max_refinements: 3,
            target_error: 1e-10,
            fail_threshold: 1e-4,
            min_half_width: 6.0,
            width_factor: 4.0,
        }
    }
}

impl QuadratureSettings {
    pub fn half_width(&self, decay_scale: f64) -> f64 {
        self.min_half_width.max(self.width_factor * decay_scale)
    }

    pub fn validate(&self) -> Result<(), QuadratureError> {
        if self.initial_points < 3 || self.initial_points.is_multiple_of(2) {
            return Err(QuadratureError::InvalidSettings("initial_points must be odd and at least 3"));
        }
        let positive = [self.target_error, self.fail_threshold, self.min_half_width, self.width_factor];
        if positive.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(QuadratureError::InvalidSettings("tolerances and widths must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuadratureError {
    #[error("quadrature did not converge: error estimate {error:.3e} at {points} points per axis")]
    NonConvergence { value: f64, error: f64, points: usize },
    #[error("non-finite integrand value")]
    NonFinite,
    #[error("invalid quadrature settings: {0}")]
    InvalidSettings(&'static str),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct QuadratureResult {
    pub value: f64,
    /// Difference between the last two resolutions.
    pub error: f64,
    pub points: usize,
    pub half_width: f64,
}

/// Sum with a fixed binary tree, independent of how the input was produced.
pub fn pairwise_sum(v: &[f64]) -> f64 {
    match v.len() {
        0 => 0.0,
        1 => v[0],
        n => pairwise_sum(&v[..n / 2]) + pairwise_sum(&v[n / 2..]),
    }
}

/// Nodes `-L..=L` of an `n`-point trapezoid rule and the uniform weight.
pub fn nodes(half_width: f64, n: usize) -> (Vec<f64>, f64) {
    let h = 2.0 * half_width / (n - 1) as f64;
    ((0..n).map(|i| -half_width + h * i as f64).collect(), h)
}

fn edge_weight(i: usize, n: usize) -> f64 {
    if i == 0 || i == n - 1 {
        0.5
    } else {
        1.0
    }
}

/// Trapezoid rule for `f(x, y)` on `[-L, L]^2` with `n` points per axis.
pub fn trapezoid_2d<F>(f: &F, half_width: f64, n: usize) -> f64
where
    F: Fn(f64, f64) -> f64 + Sync,
{
    let (xs, h) = nodes(half_width, n);
    let rows: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|i| {
            let x = xs[i];
            let mut s = 0.0;
            for (j, &y) in xs.iter().enumerate() {
                s += edge_weight(j, n) * f(x, y);
            }
            edge_weight(i, n) * s
        })
        .collect();
    pairwise_sum(&rows) * h * h
}

/// Refines the trapezoid rule by halving the spacing until successive values
/// agree to `target_error` or the refinement budget is spent.
pub fn integrate_2d<F>(f: F, decay_scale: f64, settings: &QuadratureSettings) -> Result<QuadratureResult, QuadratureError>
where
    F: Fn(f64, f64) -> f64 + Sync,
{
    settings.validate()?;
    let half_width = settings.half_width(decay_scale);
    let mut n = settings.initial_points;
    let mut prev = trapezoid_2d(&f, half_width, n);
    if !prev.is_finite() {
        return Err(QuadratureError::NonFinite);
    }
    let mut error = f64::INFINITY;
    for _ in 0..settings.max_refinements.max(1) {
        n = 2 * n - 1;
        let next = trapezoid_2d(&f, half_width, n);
        if !next.is_finite() {
            return Err(QuadratureError::NonFinite);
        }
        error = (next - prev).abs();
        prev = next;
        if error <= settings.target_error {
            break;
        }
    }
    if error > settings.fail_threshold {
        return Err(QuadratureError::NonConvergence { value: prev, error, points: n });
    }
    Ok(QuadratureResult { value: prev, error, points: n, half_width })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn gaussian_integral() {
        let r = integrate_2d(|x, y| (-(x * x + y * y)).exp(), 1.0, &QuadratureSettings::default()).unwrap();
        assert!((r.value - PI).abs() < 1e-12);
        assert!(r.error < 1e-10);
        assert_eq!(r.half_width, 6.0);
    }

    #[test]
    fn narrow_gaussian_needs_refinement() {
        let s = 2.0f64;
        let f = |x: f64, y: f64| (-(x * x * (2.0 * s).exp() + y * y * (-2.0 * s).exp())).exp();
        let r = integrate_2d(f, s.exp(), &QuadratureSettings::default()).unwrap();
        assert!(r.points > 201);
        assert!((r.value - PI).abs() < 1e-6, "{r:?}");
    }

    #[test]
    fn non_convergence_is_an_error() {
        let settings = QuadratureSettings { max_refinements: 1, ..Default::default() };
        let f = |x: f64, _y: f64| (-(x * x * 1e4)).exp();
        assert!(matches!(integrate_2d(f, 1.0, &settings), Err(QuadratureError::NonConvergence { .. })));
    }

    #[test]
    fn bit_stable_across_pools() {
        let f = |x: f64, y: f64| (x * 0.3).cos() * (-(x * x + 0.5 * y * y)).exp();
        let run = |threads| {
            rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap().install(|| trapezoid_2d(&f, 6.0, 401))
        };
        assert_eq!(run(1).to_bits(), run(4).to_bits());
    }

    #[test]
    fn pairwise_order_fixed() {
        assert_eq!(pairwise_sum(&[1.0, 2.0, 3.0]), 6.0);
        assert_eq!(pairwise_sum(&[]), 0.0);
    }
}
