//! Python bindings for `pii_tau`: Stokes parameters, the Fredholm
//! determinant, the logarithmic derivative of tau, the divisor scan and the
//! identity registry.

use num_complex::Complex64 as C64;
use pii_tau::cauchy;
use pii_tau::cli::{parse_map, parse_variant};
use pii_tau::monodromy::{params_from_pair, MonodromyParams};
use pii_tau::{fredholm, jump, registry, specialfn, tau, Error};
use pyo3::create_exception;
use pyo3::exceptions::{PyArithmeticError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

create_exception!(pii_tau_py, ValidationError, PyValueError);
create_exception!(pii_tau_py, NumericalError, PyArithmeticError);

fn to_py(e: Error) -> PyErr {
    if e.is_validation() {
        ValidationError::new_err(e.to_string())
    } else {
        NumericalError::new_err(e.to_string())
    }
}

/// Stokes data `(s1, s3)` with the derived monodromy parameters.
#[pyclass(frozen, name = "Params")]
struct PyParams {
    inner: MonodromyParams,
}

#[pymethods]
impl PyParams {
    #[new]
    fn new(s1: C64, s3: C64) -> PyResult<Self> {
        params_from_pair(s1, s3).map(|inner| Self { inner }).map_err(to_py)
    }

    #[getter]
    fn s1(&self) -> C64 {
        self.inner.stokes.s1
    }

    #[getter]
    fn s2(&self) -> C64 {
        self.inner.stokes.s2
    }

    #[getter]
    fn s3(&self) -> C64 {
        self.inner.stokes.s3
    }

    #[getter]
    fn nu(&self) -> C64 {
        self.inner.nu
    }

    #[getter]
    fn h0(&self) -> C64 {
        self.inner.h0
    }

    #[getter]
    fn h1(&self) -> C64 {
        self.inner.h1
    }

    #[getter]
    fn h_sq(&self) -> C64 {
        self.inner.h_sq
    }

    fn __repr__(&self) -> String {
        format!("Params(s1={}, s3={}, nu={})", self.inner.stokes.s1, self.inner.stokes.s3, self.inner.nu)
    }
}

/// Discretization settings.
#[pyclass(frozen, name = "Numerics")]
struct PyNumerics {
    inner: cauchy::Numerics,
}

#[pymethods]
impl PyNumerics {
    #[new]
    #[pyo3(signature = (nodes=200, scale=0.5, eps=0.1, map="sinh", variant="left-shift"))]
    fn new(nodes: usize, scale: f64, eps: f64, map: &str, variant: &str) -> PyResult<Self> {
        let inner = cauchy::Numerics {
            n_nodes: nodes,
            scale,
            eps,
            map: parse_map(map).map_err(to_py)?,
            variant: parse_variant(variant).map_err(to_py)?,
        };
        inner.validate().map_err(to_py)?;
        Ok(Self { inner })
    }

    #[getter]
    fn nodes(&self) -> usize {
        self.inner.n_nodes
    }

    #[getter]
    fn scale(&self) -> f64 {
        self.inner.scale
    }

    #[getter]
    fn eps(&self) -> f64 {
        self.inner.eps
    }

    fn __repr__(&self) -> String {
        let n = &self.inner;
        format!("Numerics(nodes={}, scale={}, eps={}, map={:?}, variant={:?})", n.n_nodes, n.scale, n.eps, n.map, n.variant)
    }
}

fn numerics_or_default(numerics: Option<PyRef<'_, PyNumerics>>) -> cauchy::Numerics {
    numerics.map(|n| n.inner).unwrap_or_default()
}

/// Parabolic cylinder function `D_nu(z)`.
#[pyfunction]
fn pcf_d(nu: C64, z: C64) -> C64 {
    specialfn::pcf_d(nu, z)
}

/// Complex Gamma function.
#[pyfunction]
fn gamma(z: C64) -> PyResult<C64> {
    specialfn::gamma_complex(z).map_err(to_py)
}

/// Jump matrix `[[A, B], [C, D]]` at a point `z` of the imaginary axis.
#[pyfunction]
fn jump_matrix(params: PyRef<'_, PyParams>, z: C64, t: C64) -> PyResult<[[C64; 2]; 2]> {
    let j = jump::jump_entries(z, t, &params.inner).map_err(to_py)?;
    Ok([[j.a, j.b], [j.c, j.d]])
}

/// Fredholm determinant; returns `(det, estimated_error)` where the error
/// is `|det(n) - det(2n)|` if requested and NaN otherwise.
#[pyfunction]
#[pyo3(signature = (params, t, numerics=None, estimate_error=false))]
fn det(py: Python<'_>, params: PyRef<'_, PyParams>, t: C64, numerics: Option<PyRef<'_, PyNumerics>>, estimate_error: bool) -> PyResult<(C64, f64)> {
    let (mp, num) = (params.inner, numerics_or_default(numerics));
    let r = py.detach(|| fredholm::fredholm_det(t, &mp, &num, estimate_error)).map_err(to_py)?;
    Ok((r.det, r.est_error))
}

/// Logarithmic derivative of tau with its components.
#[pyfunction]
#[pyo3(signature = (params, t, numerics=None))]
fn dlogtau<'py>(py: Python<'py>, params: PyRef<'_, PyParams>, t: C64, numerics: Option<PyRef<'_, PyNumerics>>) -> PyResult<Bound<'py, PyDict>> {
    let (mp, num) = (params.inner, numerics_or_default(numerics));
    let d = py.detach(|| tau::dlogtau(t, &mp, &num)).map_err(to_py)?;
    let out = PyDict::new(py);
    out.set_item("t", d.t)?;
    out.set_item("total", d.total)?;
    out.set_item("ddt_log_det", d.ddt_log_det)?;
    out.set_item("ddt_log_det_fd", d.ddt_log_det_fd)?;
    out.set_item("closed_form", d.closed_form)?;
    out.set_item("calf", d.calf)?;
    out.set_item("calf_est_error", d.corrections.est_error)?;
    out.set_item("det", d.det)?;
    out.set_item("kernel_norm", d.kernel_norm)?;
    Ok(out)
}

/// Integral of the logarithmic derivative of tau along the segment `t0 -> t1`.
#[pyfunction]
#[pyo3(signature = (params, t0, t1, numerics=None, tol=1e-9))]
fn logtau_path(py: Python<'_>, params: PyRef<'_, PyParams>, t0: C64, t1: C64, numerics: Option<PyRef<'_, PyNumerics>>, tol: f64) -> PyResult<C64> {
    let (mp, num) = (params.inner, numerics_or_default(numerics));
    py.detach(|| tau::logtau_path(t0, t1, &mp, &num, tol)).map(|p| p.value).map_err(to_py)
}

/// Zeros of the determinant in the rectangle `(re0, re1, im0, im1)`.
#[pyfunction]
#[pyo3(signature = (params, region, grid=(10, 10), numerics=None))]
fn divisor_scan<'py>(
    py: Python<'py>,
    params: PyRef<'_, PyParams>,
    region: (f64, f64, f64, f64),
    grid: (usize, usize),
    numerics: Option<PyRef<'_, PyNumerics>>,
) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let (mp, num) = (params.inner, numerics_or_default(numerics));
    let region = tau::Region { re0: region.0, re1: region.1, im0: region.2, im1: region.3 };
    let scan = py.detach(|| tau::divisor_scan(&region, grid.0, grid.1, &mp, &num)).map_err(to_py)?;
    scan.hits
        .iter()
        .map(|h| {
            let d = PyDict::new(py);
            d.set_item("t", h.t_root)?;
            d.set_item("abs_det", h.abs_det)?;
            d.set_item("winding", h.winding)?;
            d.set_item("iterations", h.iterations)?;
            Ok(d)
        })
        .collect()
}

/// Run the identity registry; returns `(passed, results)`.
#[pyfunction]
#[pyo3(signature = (filter=None))]
fn selftest<'py>(py: Python<'py>, filter: Option<String>) -> PyResult<(bool, Vec<Bound<'py, PyDict>>)> {
    let results = py.detach(|| registry::run_registry(filter.as_deref()));
    if results.is_empty() {
        return Err(ValidationError::new_err(format!("no registry case matches {filter:?}")));
    }
    let dicts = results
        .iter()
        .map(|r| {
            let d = PyDict::new(py);
            d.set_item("name", &r.name)?;
            d.set_item("passed", r.passed)?;
            d.set_item("advisory", r.advisory)?;
            d.set_item("residual", r.residual)?;
            d.set_item("tolerance", r.tolerance)?;
            d.set_item("error", &r.error)?;
            Ok(d)
        })
        .collect::<PyResult<Vec<_>>>()?;
    Ok((registry::all_required_pass(&results), dicts))
}

#[pymodule]
pub fn pii_tau_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyParams>()?;
    m.add_class::<PyNumerics>()?;
    m.add_function(wrap_pyfunction!(pcf_d, m)?)?;
    m.add_function(wrap_pyfunction!(gamma, m)?)?;
    m.add_function(wrap_pyfunction!(jump_matrix, m)?)?;
    m.add_function(wrap_pyfunction!(det, m)?)?;
    m.add_function(wrap_pyfunction!(dlogtau, m)?)?;
    m.add_function(wrap_pyfunction!(logtau_path, m)?)?;
    m.add_function(wrap_pyfunction!(divisor_scan, m)?)?;
    m.add_function(wrap_pyfunction!(selftest, m)?)?;
    m.add("ValidationError", m.py().get_type::<ValidationError>())?;
    m.add("NumericalError", m.py().get_type::<NumericalError>())?;
    Ok(())
}
