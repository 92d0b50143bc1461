//! Python bindings for the `magtele` library. Frequencies are passed as
//! value/2pi in MHz and times in ns, as on the command line.

use magtele::entanglement;
use magtele::params::{self, mhz_to_rad, ns_to_s};
use magtele::states;
use magtele::teleport::{self, Resource};
use magtele::wigner::{self, WignerSource};
use num_complex::Complex64 as C64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

fn runtime(e: impl std::fmt::Display) -> PyErr {
    PyRuntimeError::new_err(e.to_string())
}

fn resource(name: &str) -> PyResult<Resource> {
    match name {
        "tmsv" => Ok(Resource::Tmsv),
        "nongaussian" => Ok(Resource::Nongaussian),
        other => Err(PyValueError::new_err(format!("resource must be 'tmsv' or 'nongaussian', got '{other}'"))),
    }
}

/// Pulse-sequence parameters in MHz (value/2pi) and ns.
#[pyclass(name = "PhysicalParams", from_py_object)]
#[derive(Clone)]
struct PyPhysicalParams {
    inner: params::PhysicalParams,
}

#[pymethods]
impl PyPhysicalParams {
    #[new]
    #[pyo3(signature = (g1_mhz=10.0, kappa1_mhz=100.0, g_c_mhz=4.0, kappa_c_mhz=40.0, kappa_m_mhz=0.5, tau_e_ns=50.0, tau_s_ns=4.0, tau_d_ns=10.0, tau_r_ns=0.0))]
    #[allow(clippy::too_many_arguments)]
    fn new(
        g1_mhz: f64,
        kappa1_mhz: f64,
        g_c_mhz: f64,
        kappa_c_mhz: f64,
        kappa_m_mhz: f64,
        tau_e_ns: f64,
        tau_s_ns: f64,
        tau_d_ns: f64,
        tau_r_ns: f64,
    ) -> Self {
        PyPhysicalParams {
            inner: params::PhysicalParams {
                g1: mhz_to_rad(g1_mhz),
                kappa1: mhz_to_rad(kappa1_mhz),
                g_c: mhz_to_rad(g_c_mhz),
                kappa_c: mhz_to_rad(kappa_c_mhz),
                kappa_m: mhz_to_rad(kappa_m_mhz),
                tau_e: ns_to_s(tau_e_ns),
                tau_s: ns_to_s(tau_s_ns),
                tau_d: ns_to_s(tau_d_ns),
                tau_r: ns_to_s(tau_r_ns),
            },
        }
    }

    fn derive(&self) -> PyResult<PyDerivedParams> {
        derive_params(self)
    }

    fn __repr__(&self) -> String {
        format!("{:?}", self.inner)
    }
}

#[pyclass(name = "DerivedParams", get_all, skip_from_py_object)]
#[derive(Clone)]
struct PyDerivedParams {
    r: f64,
    lambda_: f64,
    theta: f64,
    lambda_prime: f64,
    gamma: f64,
    p_sub: f64,
    script_gc_tau_s: f64,
    warnings: Vec<String>,
}

#[pymethods]
impl PyDerivedParams {
    fn channel(&self) -> PyChannel {
        PyChannel { inner: teleport::Channel::new(self.lambda_, self.lambda_prime, self.gamma) }
    }

    fn __repr__(&self) -> String {
        format!(
            "DerivedParams(r={}, lambda_={}, theta={}, lambda_prime={}, gamma={}, p_sub={})",
            self.r, self.lambda_, self.theta, self.lambda_prime, self.gamma, self.p_sub
        )
    }
}

#[pyfunction]
fn derive_params(params: &PyPhysicalParams) -> PyResult<PyDerivedParams> {
    let d = params::derive_params(&params.inner).map_err(|e| PyValueError::new_err(e.to_string()))?;
    Ok(PyDerivedParams {
        r: d.r,
        lambda_: d.lambda,
        theta: d.theta,
        lambda_prime: d.lambda_prime,
        gamma: d.gamma,
        p_sub: d.p_sub,
        script_gc_tau_s: d.script_gc * params.inner.tau_s,
        warnings: d.warnings.iter().map(|w| w.to_string()).collect(),
    })
}

/// State to be teleported.
#[pyclass(name = "InputState", from_py_object)]
#[derive(Clone)]
struct PyInputState {
    inner: states::InputStateSpec,
}

#[pymethods]
impl PyInputState {
    #[staticmethod]
    #[pyo3(signature = (re, im=0.0))]
    fn coherent(re: f64, im: f64) -> Self {
        PyInputState { inner: states::InputStateSpec::Coherent { beta: C64::new(re, im) } }
    }

    #[staticmethod]
    fn single_photon() -> Self {
        PyInputState { inner: states::InputStateSpec::SinglePhoton }
    }

    #[staticmethod]
    fn squeezed_vacuum(xi: f64) -> Self {
        PyInputState { inner: states::InputStateSpec::SqueezedVacuum { xi } }
    }

    #[staticmethod]
    #[pyo3(signature = (alpha0, varphi=0.0))]
    fn cat(alpha0: f64, varphi: f64) -> Self {
        PyInputState { inner: states::InputStateSpec::Cat { alpha0, varphi } }
    }

    #[getter]
    fn kind(&self) -> &'static str {
        self.inner.kind_name()
    }

    fn __repr__(&self) -> String {
        format!("InputState({:?})", self.inner)
    }
}

/// Effective teleportation channel.
#[pyclass(name = "Channel", from_py_object)]
#[derive(Clone)]
struct PyChannel {
    inner: teleport::Channel,
}

#[pymethods]
impl PyChannel {
    #[new]
    fn new(lambda_: f64, lambda_prime: f64, gamma: f64) -> Self {
        PyChannel { inner: teleport::Channel::new(lambda_, lambda_prime, gamma) }
    }

    #[staticmethod]
    fn vacuum() -> Self {
        PyChannel { inner: teleport::Channel::vacuum() }
    }

    #[getter]
    fn lambda_(&self) -> f64 {
        self.inner.lambda
    }

    #[getter]
    fn lambda_prime(&self) -> f64 {
        self.inner.lambda_prime
    }

    #[getter]
    fn gamma(&self) -> f64 {
        self.inner.gamma
    }

    fn __repr__(&self) -> String {
        let c = &self.inner;
        format!("Channel(lambda_={}, lambda_prime={}, gamma={})", c.lambda, c.lambda_prime, c.gamma)
    }
}

#[pyfunction]
fn logneg_tmsv(r: f64) -> f64 {
    entanglement::logneg_tmsv_analytic(r)
}

#[pyfunction]
fn logneg_subtracted(lambda_prime: f64) -> PyResult<f64> {
    entanglement::logneg_subtracted_analytic(lambda_prime).map_err(|e| PyValueError::new_err(e.to_string()))
}

/// Log-negativity from the partial transpose of the truncated state.
#[pyfunction]
#[pyo3(signature = (resource_name, lambda_, cutoff=40))]
fn logneg_numeric(resource_name: &str, lambda_: f64, cutoff: usize) -> PyResult<f64> {
    let state = match resource(resource_name)? {
        Resource::Tmsv => states::tmsv_state(lambda_, cutoff).map_err(runtime)?,
        Resource::Nongaussian => states::subtracted_from_lambda(lambda_, cutoff).map_err(runtime)?.0,
    };
    entanglement::logneg_numeric(&state).map_err(runtime)
}

/// Closed-form fidelity exactly as published.
#[pyfunction]
fn fidelity_printed(input: &PyInputState, channel: &PyChannel, resource_name: &str) -> PyResult<f64> {
    let r = resource(resource_name)?;
    Ok(teleport::printed_fidelity(&input.inner, &channel.inner, r).map_err(runtime)?.value)
}

/// Fidelity by phase-space quadrature; returns `(value, error_estimate)`.
#[pyfunction]
fn fidelity_quadrature(input: &PyInputState, channel: &PyChannel, resource_name: &str) -> PyResult<(f64, f64)> {
    let r = resource(resource_name)?;
    let q = teleport::fidelity_quadrature(&input.inner, &channel.inner, r, &Default::default()).map_err(runtime)?;
    Ok((q.fidelity, q.error_estimate.unwrap_or(0.0)))
}

/// Fidelity as the overlap with the reconstructed teleported state.
#[pyfunction]
#[pyo3(signature = (input, channel, resource_name, cutoff=40))]
fn fidelity_fock_oracle(input: &PyInputState, channel: &PyChannel, resource_name: &str, cutoff: usize) -> PyResult<f64> {
    let r = resource(resource_name)?;
    let f = teleport::fidelity_fock_oracle(&input.inner, &channel.inner, r, cutoff, &Default::default()).map_err(runtime)?;
    Ok(f.fidelity)
}

/// Joint magnon-photon number distribution `P[m][n]` of a resource state.
#[pyfunction]
#[pyo3(signature = (resource_name, lambda_, cutoff=40, max_number=10))]
fn joint_distribution(resource_name: &str, lambda_: f64, cutoff: usize, max_number: usize) -> PyResult<Vec<Vec<f64>>> {
    let state = match resource(resource_name)? {
        Resource::Tmsv => states::tmsv_state(lambda_, cutoff).map_err(runtime)?,
        Resource::Nongaussian => states::subtracted_from_lambda(lambda_, cutoff).map_err(runtime)?.0,
    };
    let dist = states::joint_number_distribution(&state);
    let top = max_number.min(cutoff);
    Ok((0..=top).map(|m| (0..=top).map(|n| dist.get2(m, n)).collect()).collect())
}

type Grid = (Vec<f64>, Vec<f64>, Vec<Vec<f64>>);

fn grid_rows(g: &magtele::PhaseSpaceGrid) -> Grid {
    let rows = (0..g.resolution).map(|i| (0..g.resolution).map(|j| g.get(i, j)).collect()).collect();
    (g.xs.clone(), g.ps.clone(), rows)
}

/// Wigner function of the input state on a square `(x, p)` grid; returns
/// `(xs, ps, W[x][p])`.
#[pyfunction]
#[pyo3(signature = (input, half_width=6.0, resolution=161, cutoff=40))]
fn wigner_input(input: &PyInputState, half_width: f64, resolution: usize, cutoff: usize) -> PyResult<Grid> {
    let psi = states::input_state(&input.inner, cutoff).map_err(runtime)?;
    let g = wigner::wigner_map(WignerSource::Pure(&psi), &wigner::GridSpec::square(half_width, resolution)).map_err(runtime)?;
    Ok(grid_rows(&g))
}

/// Wigner function of the teleported state, reconstructed in the Fock basis.
#[pyfunction]
#[pyo3(signature = (input, channel, resource_name, half_width=6.0, resolution=161, cutoff=40))]
fn wigner_teleported(
    input: &PyInputState,
    channel: &PyChannel,
    resource_name: &str,
    half_width: f64,
    resolution: usize,
    cutoff: usize,
) -> PyResult<Grid> {
    let r = resource(resource_name)?;
    let chi = teleport::chi_teleported(&input.inner, &channel.inner, r);
    let rho = teleport::density_from_chi_oracle(&chi, cutoff, &Default::default()).map_err(runtime)?;
    let g = wigner::wigner_map(WignerSource::Mixed(&rho), &wigner::GridSpec::square(half_width, resolution)).map_err(runtime)?;
    Ok(grid_rows(&g))
}

#[pymodule]
fn pymagtele(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyPhysicalParams>()?;
    m.add_class::<PyDerivedParams>()?;
    m.add_class::<PyInputState>()?;
    m.add_class::<PyChannel>()?;
    m.add_function(wrap_pyfunction!(derive_params, m)?)?;
    m.add_function(wrap_pyfunction!(logneg_tmsv, m)?)?;
    m.add_function(wrap_pyfunction!(logneg_subtracted, m)?)?;
    m.add_function(wrap_pyfunction!(logneg_numeric, m)?)?;
    m.add_function(wrap_pyfunction!(fidelity_printed, m)?)?;
    m.add_function(wrap_pyfunction!(fidelity_quadrature, m)?)?;
    m.add_function(wrap_pyfunction!(fidelity_fock_oracle, m)?)?;
    m.add_function(wrap_pyfunction!(joint_distribution, m)?)?;
    m.add_function(wrap_pyfunction!(wigner_input, m)?)?;
    m.add_function(wrap_pyfunction!(wigner_teleported, m)?)?;
    Ok(())
}
