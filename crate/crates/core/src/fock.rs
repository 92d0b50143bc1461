//! Truncated Fock-space linear algebra for one or two bosonic modes.
//!
//! States carry an explicit cutoff `N` per mode (dimension `N + 1`). Two-mode
//! amplitudes are stored row-major, `amp[n0 * (N + 1) + n1]`, with mode 0 the
//! magnon and mode 1 the optical (Stokes) mode throughout the crate.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use thiserror::Error;

pub const DEFAULT_CUTOFF: usize = 40;

/// Numerical tolerances used by the state and operator checks.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    pub hermiticity: f64,
    pub trace: f64,
    pub tail: f64,
    /// Slack allowed on negative eigenvalues of physical density operators.
    pub negative_eigen: f64,
    /// Probability allowed in the top two levels after a displacement.
    pub displacement_tail: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            hermiticity: 1e-12,
            trace: 1e-10,
            tail: 1e-10,
            negative_eigen: 1e-10,
            displacement_tail: 1e-8,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FockError {
    #[error("cutoff must be at least 1, got {0}")]
    InvalidCutoff(usize),
    #[error("only one- and two-mode states are supported, got {0} modes")]
    InvalidModes(usize),
    #[error("mode index {index} out of range for a {modes}-mode state")]
    InvalidModeIndex { index: usize, modes: usize },
    #[error("expected {expected} amplitudes, got {got}")]
    ShapeMismatch { expected: usize, got: usize },
    #[error("amplitudes contain NaN or infinite values")]
    NonFinite,
    #[error("state has zero norm")]
    ZeroNorm,
    #[error("state is not normalized (norm^2 = {0})")]
    NotNormalized(f64),
    #[error("truncation tail {tail:.3e} exceeds tolerance at cutoff {cutoff}; cutoff {suggested} or more is required")]
    Truncation { tail: f64, cutoff: usize, suggested: usize },
    #[error("operator is not Hermitian (max deviation {0:.3e})")]
    NotHermitian(f64),
    #[error("operator is not physical (trace {trace}, min eigenvalue {min_eigen:.3e})")]
    NotPhysical { trace: f64, min_eigen: f64 },
    #[error("incompatible operands: {0}")]
    Incompatible(String),
}

pub type Result<T> = std::result::Result<T, FockError>;

fn check_shape(modes: usize, cutoff: usize, len: usize) -> Result<()> {
    if cutoff < 1 {
        return Err(FockError::InvalidCutoff(cutoff));
    }
    if modes != 1 && modes != 2 {
        return Err(FockError::InvalidModes(modes));
    }
    let expected = (cutoff + 1).pow(modes as u32);
    if len != expected {
        return Err(FockError::ShapeMismatch { expected, got: len });
    }
    Ok(())
}

/// Pure state over one or two truncated modes.
#[derive(Clone, Debug, PartialEq)]
pub struct TruncatedState {
    modes: usize,
    cutoff: usize,
    amps: Vec<C64>,
    normalized: bool,
}

impl TruncatedState {
    /// Builds a state from raw amplitudes. The `normalized` flag is set only if
    /// the squared norm is one within 1e-12.
    pub fn new(modes: usize, cutoff: usize, amps: Vec<C64>) -> Result<Self> {
        check_shape(modes, cutoff, amps.len())?;
        if amps.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(FockError::NonFinite);
        }
        let normalized = (norm_sqr(&amps) - 1.0).abs() <= 1e-12;
        Ok(Self { modes, cutoff, amps, normalized })
    }

    pub fn single_mode(cutoff: usize, amps: Vec<C64>) -> Result<Self> {
        Self::new(1, cutoff, amps)
    }

    pub fn two_mode(cutoff: usize, amps: Vec<C64>) -> Result<Self> {
        Self::new(2, cutoff, amps)
    }

    /// Single-mode number state `|n>`.
    pub fn fock(cutoff: usize, n: usize) -> Result<Self> {
        if n > cutoff {
            return Err(FockError::Incompatible(format!("level {n} above cutoff {cutoff}")));
        }
        let mut amps = vec![C64::new(0.0, 0.0); cutoff + 1];
        amps[n] = C64::new(1.0, 0.0);
        Self::single_mode(cutoff, amps)
    }

    /// Two-mode number state `|n0, n1>`.
    pub fn fock2(cutoff: usize, n0: usize, n1: usize) -> Result<Self> {
        if n0 > cutoff || n1 > cutoff {
            return Err(FockError::Incompatible(format!("level above cutoff {cutoff}")));
        }
        let mut amps = vec![C64::new(0.0, 0.0); (cutoff + 1) * (cutoff + 1)];
        amps[n0 * (cutoff + 1) + n1] = C64::new(1.0, 0.0);
        Self::two_mode(cutoff, amps)
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn amplitude(&self, n: usize) -> C64 {
        debug_assert_eq!(self.modes, 1);
        self.amps[n]
    }

    pub fn amplitude2(&self, n0: usize, n1: usize) -> C64 {
        debug_assert_eq!(self.modes, 2);
        self.amps[n0 * (self.cutoff + 1) + n1]
    }

    pub fn norm_sqr(&self) -> f64 {
        norm_sqr(&self.amps)
    }

    /// Zero-norm marker, e.g. after annihilating the vacuum.
    pub fn is_zero(&self) -> bool {
        self.amps.iter().all(|a| a.norm_sqr() == 0.0)
    }

    /// Two-mode amplitudes as an `(N+1) x (N+1)` matrix indexed `[n0, n1]`.
    pub fn amplitude_matrix(&self) -> DMatrix<C64> {
        let d = self.cutoff + 1;
        match self.modes {
            1 => DMatrix::from_column_slice(d, 1, &self.amps),
            _ => DMatrix::from_row_slice(d, d, &self.amps),
        }
    }

    fn with_amplitude_matrix(&self, m: &DMatrix<C64>) -> Self {
        let amps = match self.modes {
            1 => m.iter().copied().collect(),
            _ => m.transpose().iter().copied().collect(),
        };
        Self { modes: self.modes, cutoff: self.cutoff, amps, normalized: false }
    }

    /// Probability (relative to the current norm) held in the top basis level
    /// of any mode.
    pub fn tail_mass(&self) -> f64 {
        let total = self.norm_sqr();
        if total == 0.0 {
            return 0.0;
        }
        let d = self.cutoff + 1;
        let top = self.cutoff;
        let tail: f64 = match self.modes {
            1 => self.amps[top].norm_sqr(),
            _ => (0..d)
                .flat_map(|i| (0..d).map(move |j| (i, j)))
                .filter(|&(i, j)| i == top || j == top)
                .map(|(i, j)| self.amps[i * d + j].norm_sqr())
                .sum(),
        };
        tail / total
    }

    /// Fails with a suggested cutoff if the tail mass exceeds `tol`.
    pub fn check_tail(&self, tol: f64) -> Result<()> {
        let tail = self.tail_mass();
        if tail <= tol {
            return Ok(());
        }
        Err(FockError::Truncation {
            tail,
            cutoff: self.cutoff,
            suggested: suggest_cutoff(&self.marginal(0), tol)
                .max(if self.modes == 2 { suggest_cutoff(&self.marginal(1), tol) } else { 0 }),
        })
    }

    /// Marginal number distribution of one mode.
    pub fn marginal(&self, mode: usize) -> Vec<f64> {
        let d = self.cutoff + 1;
        let mut p = vec![0.0; d];
        match self.modes {
            1 => {
                for (n, a) in self.amps.iter().enumerate() {
                    p[n] += a.norm_sqr();
                }
            }
            _ => {
                for i in 0..d {
                    for j in 0..d {
                        let w = self.amps[i * d + j].norm_sqr();
                        p[if mode == 0 { i } else { j }] += w;
                    }
                }
            }
        }
        p
    }

    fn check_mode(&self, mode: usize) -> Result<()> {
        if mode >= self.modes {
            return Err(FockError::InvalidModeIndex { index: mode, modes: self.modes });
        }
        Ok(())
    }

    /// Applies the annihilation operator of `mode`. The result is unnormalized;
    /// annihilating the vacuum returns the zero vector.
    pub fn apply_annihilation(&self, mode: usize) -> Result<Self> {
        self.check_mode(mode)?;
        let d = self.cutoff + 1;
        let mut out = vec![C64::new(0.0, 0.0); self.amps.len()];
        match (self.modes, mode) {
            (1, _) => {
                for n in 1..d {
                    out[n - 1] = self.amps[n] * (n as f64).sqrt();
                }
            }
            (_, 0) => {
                for i in 1..d {
                    let s = (i as f64).sqrt();
                    for j in 0..d {
                        out[(i - 1) * d + j] = self.amps[i * d + j] * s;
                    }
                }
            }
            _ => {
                for i in 0..d {
                    for j in 1..d {
                        out[i * d + j - 1] = self.amps[i * d + j] * (j as f64).sqrt();
                    }
                }
            }
        }
        Ok(Self { modes: self.modes, cutoff: self.cutoff, amps: out, normalized: false })
    }

    /// Applies the creation operator of `mode` on the retained subspace; weight
    /// pushed above the cutoff is discarded.
    pub fn apply_creation(&self, mode: usize) -> Result<Self> {
        self.check_mode(mode)?;
        let d = self.cutoff + 1;
        let mut out = vec![C64::new(0.0, 0.0); self.amps.len()];
        match (self.modes, mode) {
            (1, _) => {
                for n in 0..self.cutoff {
                    out[n + 1] = self.amps[n] * ((n + 1) as f64).sqrt();
                }
            }
            (_, 0) => {
                for i in 0..self.cutoff {
                    let s = ((i + 1) as f64).sqrt();
                    for j in 0..d {
                        out[(i + 1) * d + j] = self.amps[i * d + j] * s;
                    }
                }
            }
            _ => {
                for i in 0..d {
                    for j in 0..self.cutoff {
                        out[i * d + j + 1] = self.amps[i * d + j] * ((j + 1) as f64).sqrt();
                    }
                }
            }
        }
        Ok(Self { modes: self.modes, cutoff: self.cutoff, amps: out, normalized: false })
    }

    /// Returns the unit-norm state together with the norm before scaling.
    pub fn normalize(&self) -> Result<(Self, f64)> {
        let n2 = self.norm_sqr();
        if n2 == 0.0 || !n2.is_finite() {
            return Err(FockError::ZeroNorm);
        }
        let norm = n2.sqrt();
        let amps = self.amps.iter().map(|a| a / norm).collect();
        Ok((Self { modes: self.modes, cutoff: self.cutoff, amps, normalized: true }, norm))
    }

    /// Applies `D(alpha)` to `mode`, built from the truncated generator.
    pub fn displace(&self, mode: usize, alpha: C64) -> Result<Self> {
        self.displace_with(mode, alpha, &Tolerances::default())
    }

    pub fn displace_with(&self, mode: usize, alpha: C64, tol: &Tolerances) -> Result<Self> {
        self.check_mode(mode)?;
        if alpha == C64::new(0.0, 0.0) {
            return Ok(self.clone());
        }
        let d_op = displacement_operator(self.cutoff, alpha);
        let psi = self.amplitude_matrix();
        let out = match (self.modes, mode) {
            (1, _) | (_, 0) => &d_op * &psi,
            _ => &psi * d_op.transpose(),
        };
        let mut result = self.with_amplitude_matrix(&out);
        result.normalized = self.normalized;
        let marg = result.marginal(mode);
        let top2 = marg[self.cutoff] + marg[self.cutoff - 1];
        let total: f64 = marg.iter().sum();
        if total > 0.0 && top2 / total > tol.displacement_tail {
            return Err(FockError::Truncation {
                tail: top2 / total,
                cutoff: self.cutoff,
                suggested: displacement_cutoff(&self.marginal(mode), alpha, tol.displacement_tail),
            });
        }
        Ok(result)
    }

    /// Inner product `<self|other>`.
    pub fn inner(&self, other: &Self) -> Result<C64> {
        if self.modes != other.modes || self.cutoff != other.cutoff {
            return Err(FockError::Incompatible("mode count or cutoff differ".into()));
        }
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum())
    }

    pub fn is_finite(&self) -> bool {
        self.amps.iter().all(|a| a.re.is_finite() && a.im.is_finite())
    }
}

fn norm_sqr(a: &[C64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum()
}

/// Extrapolates the decay of a marginal distribution to estimate the cutoff at
/// which the top level drops below `tol`.
fn suggest_cutoff(marginal: &[f64], tol: f64) -> usize {
    let n = marginal.len() - 1;
    let total: f64 = marginal.iter().sum();
    if total == 0.0 || n < 2 {
        return 2 * n.max(1);
    }
    let top = marginal[n] / total;
    let prev = marginal[n - 1] / total;
    if top <= tol {
        return n;
    }
    let ratio = if prev > 0.0 { top / prev } else { 1.0 };
    if !(ratio > 0.0 && ratio < 1.0) {
        return 2 * n;
    }
    let extra = ((tol / top).ln() / ratio.ln()).ceil() as usize;
    (n + extra).max(n + 1)
}

/// Smallest cutoff at which the exact displaced distribution keeps at most
/// `tol` in its top two levels.
fn displacement_cutoff(input: &[f64], alpha: C64, tol: f64) -> usize {
    let n_in = input.len() - 1;
    let amp = alpha.norm();
    let n_max = 2 * (n_in + 1) + ((amp + 8.0).powi(2)).ceil() as usize;
    let elems = displacement_elements(n_max + 1, n_in + 1, alpha);
    // Incoherent upper bound on the output distribution.
    let mut p = vec![0.0; n_max + 1];
    for (m, pm) in p.iter_mut().enumerate() {
        for (n, w) in input.iter().enumerate() {
            *pm += w * elems[(m, n)].norm_sqr();
        }
    }
    let total: f64 = input.iter().sum();
    for c in n_in.max(1)..n_max {
        if (p[c] + p[c - 1]) / total <= tol {
            return c;
        }
    }
    n_max
}

/// Ladder operator `a` on a single truncated mode.
pub fn annihilation_matrix(cutoff: usize) -> DMatrix<C64> {
    let d = cutoff + 1;
    let mut a = DMatrix::zeros(d, d);
    for n in 1..d {
        a[(n - 1, n)] = C64::new((n as f64).sqrt(), 0.0);
    }
    a
}

/// `D(alpha) = exp(alpha a^dag - alpha^* a)` from the truncated generator.
///
/// The generator is anti-Hermitian, so `H = i G` is Hermitian and
/// `D = V exp(-i E) V^dag` from its eigendecomposition.
pub fn displacement_operator(cutoff: usize, alpha: C64) -> DMatrix<C64> {
    let a = annihilation_matrix(cutoff);
    let adag = a.adjoint();
    let gen = adag * alpha - a * alpha.conj();
    let h = gen * C64::new(0.0, 1.0);
    let h = (&h + h.adjoint()) * C64::new(0.5, 0.0);
    let eig = h.symmetric_eigen();
    let phases = DMatrix::from_diagonal(&eig.eigenvalues.map(|e| C64::new(0.0, -e).exp()));
    &eig.eigenvectors * phases * eig.eigenvectors.adjoint()
}

/// Exact (untruncated) matrix elements `<m|D(alpha)|n>` for `m < rows`,
/// `n < cols`.
///
/// Uses `<m|D|n> = sqrt(n!/m!) alpha^(m-n) e^{-|alpha|^2/2} L_n^(m-n)(|alpha|^2)`
/// for `m >= n` and the mirrored form with `-alpha^*` above the diagonal.
/// Each diagonal runs the three-term Laguerre recurrence in the degree, which
/// stays stable for large `|alpha|` where recurrences on the matrix elements
/// themselves lose all precision. Prefactors are combined in log space.
pub fn displacement_elements(rows: usize, cols: usize, alpha: C64) -> DMatrix<C64> {
    let mut d = DMatrix::zeros(rows, cols);
    let big = rows.max(cols);
    if big == 0 {
        return d;
    }
    let x = alpha.norm_sqr();
    let mut log_fact = vec![0.0f64; big + 1];
    for i in 1..=big {
        log_fact[i] = log_fact[i - 1] + (i as f64).ln();
    }
    let ln_abs = alpha.norm().ln();
    let lower_arg = alpha.arg();
    let upper_arg = (-alpha.conj()).arg();
    let mut lag = Vec::with_capacity(big);
    for k in 0..big {
        // degrees needed on the lower (m = j + k, n = j) and upper diagonals
        let lower = if k < rows { (rows - k).min(cols) } else { 0 };
        let upper = if k < cols { (cols - k).min(rows) } else { 0 };
        let count = lower.max(upper);
        if count == 0 {
            continue;
        }
        if k > 0 && x == 0.0 {
            continue;
        }
        let kf = k as f64;
        lag.clear();
        lag.push(1.0);
        if count > 1 {
            lag.push(1.0 + kf - x);
        }
        for j in 1..count.saturating_sub(1) {
            let jf = j as f64;
            let next = ((2.0 * jf + 1.0 + kf - x) * lag[j] - (jf + kf) * lag[j - 1]) / (jf + 1.0);
            lag.push(next);
        }
        let k_ln = if k == 0 { 0.0 } else { kf * ln_abs };
        let lower_phase = C64::from_polar(1.0, kf * lower_arg);
        let upper_phase = C64::from_polar(1.0, kf * upper_arg);
        // sqrt(j! / (j + k)!) e^{-x/2} |alpha|^k, advanced by a ratio per degree
        let mut mag = (-0.5 * log_fact[k] - 0.5 * x + k_ln).exp();
        for (j, l) in lag.iter().enumerate() {
            if j > 0 {
                mag *= (j as f64 / (j + k) as f64).sqrt();
            }
            let v = mag * l;
            if j < lower {
                d[(j + k, j)] = lower_phase * v;
            }
            if k > 0 && j < upper {
                d[(j, j + k)] = upper_phase * v;
            }
        }
    }
    d
}

/// Hermitian operator over one or two truncated modes.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityOperator {
    modes: usize,
    cutoff: usize,
    matrix: DMatrix<C64>,
}

impl DensityOperator {
    /// Wraps a matrix after checking its shape and Hermiticity.
    pub fn new(modes: usize, cutoff: usize, matrix: DMatrix<C64>) -> Result<Self> {
        Self::new_with(modes, cutoff, matrix, &Tolerances::default())
    }

    pub fn new_with(modes: usize, cutoff: usize, matrix: DMatrix<C64>, tol: &Tolerances) -> Result<Self> {
        if !matrix.is_square() {
            return Err(FockError::Incompatible("matrix is not square".into()));
        }
        check_shape(modes, cutoff, matrix.nrows())?;
        let dev = hermiticity_deviation(&matrix);
        if dev > tol.hermiticity {
            return Err(FockError::NotHermitian(dev));
        }
        Ok(Self { modes, cutoff, matrix })
    }

    pub fn from_pure(state: &TruncatedState) -> Self {
        let v = nalgebra::DVector::from_column_slice(&state.amps);
        Self { modes: state.modes, cutoff: state.cutoff, matrix: &v * v.adjoint() }
    }

    /// Single-mode thermal state with mean occupation `nbar`.
    pub fn thermal(cutoff: usize, nbar: f64) -> Result<Self> {
        if cutoff < 1 {
            return Err(FockError::InvalidCutoff(cutoff));
        }
        let d = cutoff + 1;
        let mut m = DMatrix::zeros(d, d);
        for n in 0..d {
            m[(n, n)] = C64::new(nbar.powi(n as i32) / (1.0 + nbar).powi(n as i32 + 1), 0.0);
        }
        Ok(Self { modes: 1, cutoff, matrix: m })
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    pub fn normalized(&self) -> Result<Self> {
        let t = self.trace();
        if t == 0.0 || !t.is_finite() {
            return Err(FockError::ZeroNorm);
        }
        Ok(Self { modes: self.modes, cutoff: self.cutoff, matrix: &self.matrix / C64::new(t, 0.0) })
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut e: Vec<f64> = self.matrix.clone().symmetric_eigen().eigenvalues.iter().copied().collect();
        e.sort_by(f64::total_cmp);
        e
    }

    /// Checks unit trace and eigenvalues above `-negative_eigen`.
    pub fn check_physical(&self, tol: &Tolerances) -> Result<()> {
        let trace = self.trace();
        let min_eigen = self.eigenvalues().first().copied().unwrap_or(0.0);
        if (trace - 1.0).abs() > tol.trace || min_eigen < -tol.negative_eigen {
            return Err(FockError::NotPhysical { trace, min_eigen });
        }
        Ok(())
    }

    /// Diagonal number distribution (single- or two-mode, flattened).
    pub fn populations(&self) -> Vec<f64> {
        (0..self.matrix.nrows()).map(|i| self.matrix[(i, i)].re).collect()
    }

    /// `D rho D^dag` on a single-mode operator.
    pub fn displace(&self, alpha: C64) -> Result<Self> {
        if self.modes != 1 {
            return Err(FockError::Incompatible("displacement of density operators is single-mode".into()));
        }
        let tol = Tolerances::default();
        let d = displacement_operator(self.cutoff, alpha);
        let out = &d * &self.matrix * d.adjoint();
        let pops: Vec<f64> = (0..out.nrows()).map(|i| out[(i, i)].re).collect();
        let total: f64 = pops.iter().sum();
        let top2 = pops[self.cutoff] + pops[self.cutoff - 1];
        if total > 0.0 && top2 / total > tol.displacement_tail {
            return Err(FockError::Truncation {
                tail: top2 / total,
                cutoff: self.cutoff,
                suggested: displacement_cutoff(&self.populations(), alpha, tol.displacement_tail),
            });
        }
        Ok(Self { modes: 1, cutoff: self.cutoff, matrix: out })
    }

    /// Partial transpose over `mode` of a two-mode operator. The result need not
    /// be positive, so it is returned as a bare matrix.
    pub fn partial_transpose(&self, mode: usize) -> Result<DMatrix<C64>> {
        if self.modes != 2 {
            return Err(FockError::Incompatible("partial transpose needs a two-mode operator".into()));
        }
        if mode > 1 {
            return Err(FockError::InvalidModeIndex { index: mode, modes: 2 });
        }
        let d = self.cutoff + 1;
        let dim = d * d;
        let mut out = DMatrix::zeros(dim, dim);
        for i0 in 0..d {
            for i1 in 0..d {
                for j0 in 0..d {
                    for j1 in 0..d {
                        let v = self.matrix[(i0 * d + i1, j0 * d + j1)];
                        let (r, c) = if mode == 1 {
                            (i0 * d + j1, j0 * d + i1)
                        } else {
                            (j0 * d + i1, i0 * d + j1)
                        };
                        out[(r, c)] = v;
                    }
                }
            }
        }
        Ok(out)
    }
}

fn hermiticity_deviation(m: &DMatrix<C64>) -> f64 {
    let n = m.nrows();
    let mut dev: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            dev = dev.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    dev
}

/// Either kind of state accepted by [`overlap_fidelity`].
#[derive(Clone, Copy, Debug)]
pub enum StateRef<'a> {
    Pure(&'a TruncatedState),
    Mixed(&'a DensityOperator),
}

impl<'a> From<&'a TruncatedState> for StateRef<'a> {
    fn from(s: &'a TruncatedState) -> Self {
        StateRef::Pure(s)
    }
}

impl<'a> From<&'a DensityOperator> for StateRef<'a> {
    fn from(s: &'a DensityOperator) -> Self {
        StateRef::Mixed(s)
    }
}

impl StateRef<'_> {
    fn shape(&self) -> (usize, usize) {
        match self {
            StateRef::Pure(s) => (s.modes, s.cutoff),
            StateRef::Mixed(r) => (r.modes, r.cutoff),
        }
    }
}

/// `|<a|b>|^2` for pure states, `<a|rho|a>` for pure against mixed and
/// `Tr(rho sigma)` for two mixed operators.
pub fn overlap_fidelity<'a, 'b>(a: impl Into<StateRef<'a>>, b: impl Into<StateRef<'b>>) -> Result<f64> {
    let (a, b) = (a.into(), b.into());
    if a.shape() != b.shape() {
        return Err(FockError::Incompatible(format!("shapes {:?} and {:?}", a.shape(), b.shape())));
    }
    for s in [&a, &b] {
        if let StateRef::Pure(p) = s {
            if !p.normalized {
                return Err(FockError::NotNormalized(p.norm_sqr()));
            }
        }
    }
    let expect = |psi: &TruncatedState, rho: &DensityOperator| {
        let v = nalgebra::DVector::from_column_slice(&psi.amps);
        (v.adjoint() * &rho.matrix * &v)[(0, 0)].re
    };
    let f = match (a, b) {
        (StateRef::Pure(x), StateRef::Pure(y)) => x.inner(y)?.norm_sqr(),
        (StateRef::Pure(x), StateRef::Mixed(r)) | (StateRef::Mixed(r), StateRef::Pure(x)) => expect(x, r),
        (StateRef::Mixed(r), StateRef::Mixed(s)) => (&r.matrix * &s.matrix).trace().re,
    };
    Ok(f)
}

/// Absolute sum of the negative eigenvalues of the partial transpose over the
/// second mode.
pub fn partial_transpose_negativity(rho: &DensityOperator) -> Result<f64> {
    partial_transpose_negativity_over(rho, 1)
}

pub fn partial_transpose_negativity_over(rho: &DensityOperator, mode: usize) -> Result<f64> {
    let dev = hermiticity_deviation(&rho.matrix);
    if dev > Tolerances::default().hermiticity {
        return Err(FockError::NotHermitian(dev));
    }
    let pt = rho.partial_transpose(mode)?;
    Ok(block_eigenvalues(&pt).into_iter().filter(|&e| e < 0.0).map(|e| -e).sum())
}

/// Eigenvalues of a Hermitian matrix, diagonalizing each block of its
/// sparsity pattern separately. Dense matrices form a single block.
pub fn block_eigenvalues(m: &DMatrix<C64>) -> Vec<f64> {
    let n = m.nrows();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if m[(i, j)] != C64::new(0.0, 0.0) || m[(j, i)] != C64::new(0.0, 0.0) {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[ri.max(rj)] = ri.min(rj);
                }
            }
        }
    }
    let mut blocks: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for i in 0..n {
        let r = find(&mut parent, i);
        blocks.entry(r).or_default().push(i);
    }
    let mut eig = Vec::with_capacity(n);
    for idx in blocks.values() {
        if idx.len() == 1 {
            eig.push(m[(idx[0], idx[0])].re);
            continue;
        }
        let b = DMatrix::from_fn(idx.len(), idx.len(), |r, c| m[(idx[r], idx[c])]);
        eig.extend(b.symmetric_eigen().eigenvalues.iter().copied());
    }
    eig
}

/// Number distribution `P(n)` or `P(n0, n1)` of a state.
#[derive(Clone, Debug, PartialEq)]
pub struct NumberDistribution {
    pub modes: usize,
    pub cutoff: usize,
    pub probs: Vec<f64>,
}

impl NumberDistribution {
    pub fn get(&self, n: usize) -> f64 {
        self.probs[n]
    }

    pub fn get2(&self, n0: usize, n1: usize) -> f64 {
        self.probs[n0 * (self.cutoff + 1) + n1]
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }
}

pub fn number_distribution(state: &TruncatedState) -> NumberDistribution {
    NumberDistribution {
        modes: state.modes,
        cutoff: state.cutoff,
        probs: state.amps.iter().map(|a| a.norm_sqr()).collect(),
    }
}
