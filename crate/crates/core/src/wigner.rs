//! Wigner functions on phase-space grids.
//!
//! Grids use `(x, p)` with `beta = (x + i p) / sqrt(2)` and are normalized so
//! that `Int W dx dp = 1`; the vacuum then peaks at `1/pi`. The
//! `beta`-parametrized function `W_beta` integrates to one against `d^2 beta`
//! and is twice as large, so the vacuum peaks at `2/pi` there.

use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fock::{self, DensityOperator, FockError, TruncatedState};
use crate::quadrature::{self, QuadratureError, QuadratureSettings};
use crate::states;
use crate::teleport::CharacteristicFunction;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WignerError {
    #[error("Wigner maps need a single-mode source, got {0} modes")]
    NotSingleMode(usize),
    #[error("grid needs at least 2 points per axis and increasing finite ranges")]
    InvalidGrid,
    #[error(transparent)]
    Fock(#[from] FockError),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
}

pub type Result<T> = std::result::Result<T, WignerError>;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub x_range: (f64, f64),
    pub p_range: (f64, f64),
    pub resolution: usize,
}

impl GridSpec {
    pub fn square(half_width: f64, resolution: usize) -> Self {
        GridSpec { x_range: (-half_width, half_width), p_range: (-half_width, half_width), resolution }
    }

    /// `+-(alpha0 sqrt 2 + 4)` at 161 points per axis.
    pub fn for_cat(alpha0: f64) -> Self {
        GridSpec::square(alpha0.abs() * SQRT_2 + 4.0, 161)
    }

    fn validate(&self) -> Result<()> {
        let ok = |r: (f64, f64)| r.0.is_finite() && r.1.is_finite() && r.1 > r.0;
        if self.resolution < 2 || !ok(self.x_range) || !ok(self.p_range) {
            return Err(WignerError::InvalidGrid);
        }
        Ok(())
    }

    fn axis(range: (f64, f64), n: usize) -> Vec<f64> {
        let h = (range.1 - range.0) / (n - 1) as f64;
        (0..n).map(|i| range.0 + h * i as f64).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PhaseSpaceGrid {
    pub x_range: (f64, f64),
    pub p_range: (f64, f64),
    pub resolution: usize,
    pub xs: Vec<f64>,
    pub ps: Vec<f64>,
    /// `W(x, p)` with `x` as the slow index.
    pub values: Vec<f64>,
}

impl PhaseSpaceGrid {
    pub fn get(&self, ix: usize, ip: usize) -> f64 {
        self.values[ix * self.resolution + ip]
    }

    fn cell(&self) -> f64 {
        let n = (self.resolution - 1) as f64;
        (self.x_range.1 - self.x_range.0) / n * (self.p_range.1 - self.p_range.0) / n
    }

    fn weight(&self, ix: usize, ip: usize) -> f64 {
        let e = |i: usize| if i == 0 || i == self.resolution - 1 { 0.5 } else { 1.0 };
        e(ix) * e(ip) * self.cell()
    }

    /// Trapezoid estimate of `Int W dx dp`.
    pub fn normalization(&self) -> f64 {
        let n = self.resolution;
        let rows: Vec<f64> = (0..n).map(|i| (0..n).map(|j| self.weight(i, j) * self.get(i, j)).sum()).collect();
        quadrature::pairwise_sum(&rows)
    }
}

/// What a Wigner map can be computed from.
#[derive(Clone, Copy, Debug)]
pub enum WignerSource<'a> {
    Pure(&'a TruncatedState),
    Mixed(&'a DensityOperator),
    Chi(&'a CharacteristicFunction, &'a QuadratureSettings),
}

fn single_mode_matrix(source: &WignerSource<'_>) -> Result<Option<DMatrix<C64>>> {
    match source {
        WignerSource::Pure(s) => {
            if s.modes() != 1 {
                return Err(WignerError::NotSingleMode(s.modes()));
            }
            Ok(Some(DensityOperator::from_pure(s).matrix().clone()))
        }
        WignerSource::Mixed(r) => {
            if r.modes() != 1 {
                return Err(WignerError::NotSingleMode(r.modes()));
            }
            Ok(Some(r.matrix().clone()))
        }
        WignerSource::Chi(..) => Ok(None),
    }
}

/// `W_beta(beta) = (2/pi) sum_{mn} rho_nm <m|D(2 beta)|n> (-1)^n`.
pub fn wigner_beta_parity(rho: &DMatrix<C64>, beta: C64) -> f64 {
    let d = rho.nrows();
    let disp = fock::displacement_elements(d, d, beta * 2.0);
    let mut s = C64::new(0.0, 0.0);
    for n in 0..d {
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        for m in 0..d {
            s += rho[(n, m)] * disp[(m, n)] * sign;
        }
    }
    2.0 / PI * s.re
}

/// `chi` enters the Fourier path linearly rather than squared as in the
/// fidelity overlap, so its domain extends further out.
pub const FOURIER_WIDTH_FACTOR: f64 = 6.5;

/// `W_beta` on a set of points from the Fourier relation
/// `W_beta(beta) = (1/pi^2) Int d^2a chi(a) exp(beta a* - beta* a)`.
///
/// With `a = u + iv` and `beta = s + it` the kernel is
/// `exp(2i (t u - s v))`, so a product grid reduces to two matrix products.
pub fn wigner_beta_fourier_grid(
    chi: &CharacteristicFunction,
    settings: &QuadratureSettings,
    s_axis: &[f64],
    t_axis: &[f64],
) -> Result<DMatrix<f64>> {
    settings.validate()?;
    let n = settings.initial_points;
    let half_width = settings.min_half_width.max(settings.width_factor.max(FOURIER_WIDTH_FACTOR) * chi.decay_scale);
    let (nodes, h) = quadrature::nodes(half_width, n);
    let edge = |i: usize| if i == 0 || i == n - 1 { 0.5 } else { 1.0 };
    let columns: Vec<Vec<C64>> = (0..n)
        .into_par_iter()
        .map(|iv| nodes.iter().enumerate().map(|(iu, &u)| chi.eval(C64::new(u, nodes[iv])) * (edge(iu) * edge(iv))).collect())
        .collect();
    // c[(v, u)]
    let c = DMatrix::from_fn(n, n, |iv, iu| columns[iv][iu]);
    let left = DMatrix::from_fn(s_axis.len(), n, |i, iv| C64::new(0.0, -2.0 * s_axis[i] * nodes[iv]).exp());
    let right = DMatrix::from_fn(n, t_axis.len(), |iu, j| C64::new(0.0, 2.0 * t_axis[j] * nodes[iu]).exp());
    let w = left * c * right;
    Ok(w.map(|z| z.re * h * h / (PI * PI)))
}

pub fn wigner_map(source: WignerSource<'_>, grid: &GridSpec) -> Result<PhaseSpaceGrid> {
    grid.validate()?;
    let n = grid.resolution;
    let xs = GridSpec::axis(grid.x_range, n);
    let ps = GridSpec::axis(grid.p_range, n);
    let values = match single_mode_matrix(&source)? {
        Some(rho) => {
            let rows: Vec<Vec<f64>> = xs
                .par_iter()
                .map(|&x| ps.iter().map(|&p| 0.5 * wigner_beta_parity(&rho, C64::new(x, p) * FRAC_1_SQRT_2)).collect())
                .collect();
            rows.concat()
        }
        None => {
            let WignerSource::Chi(chi, settings) = source else { unreachable!() };
            let s: Vec<f64> = xs.iter().map(|x| x * FRAC_1_SQRT_2).collect();
            let t: Vec<f64> = ps.iter().map(|p| p * FRAC_1_SQRT_2).collect();
            let w = wigner_beta_fourier_grid(chi, settings, &s, &t)?;
            (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| 0.5 * w[(i, j)]).collect()
        }
    };
    Ok(PhaseSpaceGrid { x_range: grid.x_range, p_range: grid.p_range, resolution: n, xs, ps, values })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Negativity {
    /// Minimum of `W(x, p)`.
    pub min_value: f64,
    /// The same minimum in the `beta` parametrization.
    pub min_value_beta: f64,
    /// `Int |W| dx dp` over the region where `W < 0`.
    pub negative_volume: f64,
}

pub fn wigner_negativity(grid: &PhaseSpaceGrid) -> Negativity {
    let n = grid.resolution;
    let min_value = grid.values.iter().copied().fold(f64::INFINITY, f64::min);
    let rows: Vec<f64> = (0..n)
        .map(|i| (0..n).map(|j| grid.get(i, j)).enumerate().filter(|(_, w)| *w < 0.0).map(|(j, w)| -w * grid.weight(i, j)).sum())
        .collect();
    Negativity { min_value, min_value_beta: 2.0 * min_value, negative_volume: quadrature::pairwise_sum(&rows) }
}

/// Closed-form `W_beta` of the cat `N(|a0> + e^{i phi}|-a0>)` with real `a0`.
pub fn cat_wigner_beta(alpha0: f64, varphi: f64, beta: C64) -> f64 {
    let a = alpha0;
    let gauss = |c: f64| (-2.0 * ((beta.re - c).powi(2) + beta.im * beta.im)).exp();
    let fringe = (-2.0 * beta.norm_sqr()).exp() * (4.0 * a * beta.im - varphi).cos();
    2.0 / PI * (gauss(a) + gauss(-a) + 2.0 * fringe) / states::cat_norm_sqr(a, varphi)
}
