//! Python bindings: sampling, kernel fits, norms, witness bumps, risk
//! estimates and sweeps.

use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};

use ridgeless::bump::{self, BumpShape};
use ridgeless::experiments::{self, SweepGrid};
use ridgeless::geometry::{self, Domain, Points, TargetFunction};
use ridgeless::interpolant;
use ridgeless::kernel::{self, KernelConfig, KernelScale};
use ridgeless::{risk, sobolev, Error};

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Io { .. } => PyIOError::new_err(e.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn target(id: &str) -> PyResult<TargetFunction> {
    TargetFunction::from_id(id).ok_or_else(|| PyValueError::new_err(format!("unknown target function `{id}`")))
}

fn shape(id: &str) -> PyResult<BumpShape> {
    match id {
        "cutoff" => Ok(BumpShape::Cutoff),
        "smooth" => Ok(BumpShape::Smooth),
        other => Err(PyValueError::new_err(format!("unknown bump shape `{other}`"))),
    }
}

fn scale(id: &str) -> PyResult<KernelScale> {
    match id {
        "scaled" => Ok(KernelScale::Scaled),
        "unit" => Ok(KernelScale::Unit),
        other => Err(PyValueError::new_err(format!("unknown kernel scale `{other}`"))),
    }
}

fn points_from_rows(rows: Vec<Vec<f64>>) -> PyResult<Points> {
    let d = rows.first().map_or(0, Vec::len);
    Points::from_rows(d, &rows).map_err(to_py)
}

fn json_to_py<'py>(py: Python<'py>, v: &serde_json::Value) -> PyResult<Bound<'py, PyAny>> {
    use serde_json::Value;
    Ok(match v {
        Value::Null => py.None().into_bound(py),
        Value::Bool(b) => b.into_pyobject(py)?.to_owned().into_any(),
        Value::Number(n) => match n.as_u64() {
            Some(u) => u.into_pyobject(py)?.into_any(),
            None => n.as_f64().unwrap_or(f64::NAN).into_pyobject(py)?.into_any(),
        },
        Value::String(s) => s.into_pyobject(py)?.into_any(),
        Value::Array(xs) => {
            let list = PyList::empty(py);
            for x in xs {
                list.append(json_to_py(py, x)?)?;
            }
            list.into_any()
        }
        Value::Object(map) => {
            let dict = PyDict::new(py);
            for (k, x) in map {
                dict.set_item(k, json_to_py(py, x)?)?;
            }
            dict.into_any()
        }
    })
}

fn to_dict<'py>(py: Python<'py>, value: serde_json::Result<serde_json::Value>) -> PyResult<Bound<'py, PyAny>> {
    let v = value.map_err(|e| PyValueError::new_err(e.to_string()))?;
    json_to_py(py, &v)
}

/// Design points with noisy labels Y = f0(X) + ξ.
#[pyclass(name = "SampleSet", module = "ridgeless_py", frozen)]
struct PySampleSet {
    inner: geometry::SampleSet,
}

#[pymethods]
impl PySampleSet {
    /// Wrap explicit points and labels; `f0` names the target used for risks.
    #[new]
    #[pyo3(signature = (points, targets, f0 = "const_one"))]
    fn new(points: Vec<Vec<f64>>, targets: Vec<f64>, f0: &str) -> PyResult<Self> {
        let f0 = target(f0)?;
        let points = points_from_rows(points)?;
        let base = geometry::attach_labels(points, f0, 0);
        let noise = base.points.rows().zip(&targets).map(|(x, y)| y - f0.eval(x)).collect();
        let inner = base.with_targets(targets).map_err(to_py)?;
        Ok(PySampleSet {
            inner: geometry::SampleSet { noise, ..inner },
        })
    }

    #[getter]
    fn points(&self) -> Vec<Vec<f64>> {
        self.inner.points.rows().map(<[f64]>::to_vec).collect()
    }

    #[getter]
    fn targets(&self) -> Vec<f64> {
        self.inner.targets.clone()
    }

    #[getter]
    fn noise(&self) -> Vec<f64> {
        self.inner.noise.clone()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __repr__(&self) -> String {
        format!("SampleSet(n={}, d={}, f0={})", self.inner.len(), self.inner.dim(), self.inner.f0)
    }
}

/// n uniform points on the unit ball in R^d with labels f0(X) ± 1.
#[pyfunction]
#[pyo3(signature = (n, d, f0 = "const_one", seed = 0))]
fn sample_labeled(n: usize, d: usize, f0: &str, seed: u64) -> PyResult<PySampleSet> {
    let inner = geometry::sample_labeled(n, d, target(f0)?, seed).map_err(to_py)?;
    Ok(PySampleSet { inner })
}

/// Nearest-neighbour distances, capped by the distance to the boundary.
#[pyfunction]
#[pyo3(signature = (points, include_boundary = true))]
fn separation_radii(points: Vec<Vec<f64>>, include_boundary: bool) -> PyResult<Vec<f64>> {
    geometry::separation_radii(&points_from_rows(points)?, include_boundary).map_err(to_py)
}

#[pyfunction]
fn power_average(radii: Vec<f64>, k: f64) -> PyResult<f64> {
    geometry::power_average(&radii, k).map_err(to_py)
}

/// Laplace kernel value; "scaled" carries the c^d prefactor.
#[pyfunction]
#[pyo3(signature = (x, y, c, scale = "scaled"))]
fn kernel_value(x: Vec<f64>, y: Vec<f64>, c: f64, scale: &str) -> PyResult<f64> {
    let cfg = KernelConfig::new(x.len(), c, self::scale(scale)?).map_err(to_py)?;
    kernel::eval_kernel(&cfg, &x, &y).map_err(to_py)
}

/// Fourier transform of the scaled kernel at frequency |p|.
#[pyfunction]
fn lambda_eig(d: usize, c: f64, p: f64) -> PyResult<f64> {
    kernel::lambda_eig(&KernelConfig::scaled(d, c).map_err(to_py)?, p).map_err(to_py)
}

#[pyfunction]
fn lambda0(d: usize) -> f64 {
    kernel::lambda0(d)
}

/// Minimum-norm (ridge = 0) or ridge fit of the Laplace kernel.
#[pyclass(name = "Interpolant", module = "ridgeless_py", frozen)]
struct PyInterpolant {
    inner: interpolant::Interpolant,
}

#[pymethods]
impl PyInterpolant {
    #[staticmethod]
    #[pyo3(signature = (sample, c, ridge = 0.0, scale = "scaled"))]
    fn fit(sample: &PySampleSet, c: f64, ridge: f64, scale: &str) -> PyResult<Self> {
        let cfg = KernelConfig::new(sample.inner.dim(), c, self::scale(scale)?).map_err(to_py)?;
        let inner = if ridge == 0.0 {
            interpolant::fit_min_norm(&cfg, &sample.inner)
        } else {
            interpolant::fit_ridge(&cfg, &sample.inner, ridge)
        }
        .map_err(to_py)?;
        Ok(PyInterpolant { inner })
    }

    fn predict(&self, x: Vec<f64>) -> PyResult<f64> {
        self.inner.predict(&x).map_err(to_py)
    }

    fn predict_batch(&self, xs: Vec<Vec<f64>>) -> PyResult<Vec<f64>> {
        self.inner.predict_batch(&points_from_rows(xs)?).map_err(to_py)
    }

    /// Coefficients in the configured kernel scale.
    #[getter]
    fn coeffs(&self) -> Vec<f64> {
        self.inner.scaled_coeffs()
    }

    /// αᵀGα in the configured kernel scale.
    fn quadratic_form(&self) -> f64 {
        interpolant::rkhs_quadratic_form(&self.inner)
    }

    /// ∫|Ff|²(1 + |p|²/c²)^{(d+1)/2} dp.
    fn convention_norm(&self) -> f64 {
        interpolant::convention_norm(&self.inner)
    }

    #[getter]
    fn jitter_used(&self) -> f64 {
        self.inner.diagnostics().jitter_used
    }

    #[getter]
    fn residual_max(&self) -> f64 {
        self.inner.diagnostics().residual_max
    }

    /// Monte Carlo E_P (f̂ − f0)² as a dict.
    #[pyo3(signature = (f0 = "const_one", m = 20_000, seed = 0))]
    fn risk<'py>(&self, py: Python<'py>, f0: &str, m: usize, seed: u64) -> PyResult<Bound<'py, PyAny>> {
        let dom = Domain::unit_ball(self.inner.support().dim()).map_err(to_py)?;
        let est = risk::mc_l2_risk(&self.inner, target(f0)?, &dom, m, seed).map_err(to_py)?;
        to_dict(py, serde_json::to_value(est))
    }

    /// Monte Carlo ‖f̂‖² over the unit ball as a dict.
    #[pyo3(signature = (m = 20_000, seed = 0))]
    fn l2_norm_sq<'py>(&self, py: Python<'py>, m: usize, seed: u64) -> PyResult<Bound<'py, PyAny>> {
        let dom = Domain::unit_ball(self.inner.support().dim()).map_err(to_py)?;
        to_dict(py, serde_json::to_value(risk::mc_l2_norm_sq(&self.inner, &dom, m, seed).map_err(to_py)?))
    }
}

/// L² norm and Fourier moments of the bump profile; `moments[k]` is ⟨η⟩_k
/// for k = 0..=(d+1)/2 (inf where the profile is too rough).
#[pyfunction]
#[pyo3(signature = (d, shape = "smooth"))]
fn eta_moments<'py>(py: Python<'py>, d: usize, shape: &str) -> PyResult<Bound<'py, PyDict>> {
    let p = bump::eta_moments(self::shape(shape)?, d).map_err(to_py)?;
    let dict = PyDict::new(py);
    dict.set_item("l2_norm_sq", p.l2_norm_sq)?;
    dict.set_item("moments", p.fourier_moments.clone())?;
    Ok(dict)
}

fn witness(sample: &PySampleSet, alpha: f64, shape: &str) -> PyResult<bump::WitnessInterpolant> {
    let profile = bump::eta_moments(self::shape(shape)?, sample.inner.dim()).map_err(to_py)?;
    let radii = geometry::separation_radii(&sample.inner.points, true).map_err(to_py)?;
    bump::build_witness(&sample.inner, &radii, alpha, &profile).map_err(to_py)
}

/// Convention norm of the bump interpolant g_α of the sample.
#[pyfunction]
#[pyo3(signature = (sample, alpha, c, shape = "smooth"))]
fn witness_convention_norm(sample: &PySampleSet, alpha: f64, c: f64, shape: &str) -> PyResult<f64> {
    let w = witness(sample, alpha, shape)?;
    let cfg = KernelConfig::scaled(sample.inner.dim(), c).map_err(to_py)?;
    bump::witness_convention_norm(&w, &cfg).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (sample, alpha, shape = "smooth"))]
fn witness_l2_norm_sq(sample: &PySampleSet, alpha: f64, shape: &str) -> PyResult<f64> {
    Ok(bump::witness_l2_norm_sq(&witness(sample, alpha, shape)?))
}

/// Grid-FFT convention norm of the d = 1 min-norm fit against λ(0)·yᵀG⁻¹y.
#[pyfunction]
fn verify_kernel_norm<'py>(py: Python<'py>, sample: &PySampleSet, c: f64) -> PyResult<Bound<'py, PyDict>> {
    let r = sobolev::verify_kernel_norm(&sample.inner, c).map_err(to_py)?;
    let dict = PyDict::new(py);
    dict.set_item("fourier_side", r.fourier_side)?;
    dict.set_item("kernel_side", r.kernel_side)?;
    dict.set_item("ratio", r.ratio)?;
    dict.set_item("half_width", r.grid.half_width)?;
    dict.set_item("m", r.grid.m)?;
    dict.set_item("edge_magnitude", r.edge_magnitude)?;
    Ok(dict)
}

/// One sweep cell with absolute bandwidth `c`; returns the flat record.
#[pyfunction]
#[pyo3(signature = (d, n, c, seed, f0 = "const_one", m_test = 20_000, alpha_witness = 0.4))]
fn run_cell<'py>(
    py: Python<'py>,
    d: usize,
    n: usize,
    c: f64,
    seed: u64,
    f0: &str,
    m_test: usize,
    alpha_witness: f64,
) -> PyResult<Bound<'py, PyAny>> {
    let grid = SweepGrid {
        d_list: vec![d],
        n_list: vec![n],
        c_rule: experiments::CRule::Absolute,
        c_values: vec![c],
        seeds: vec![seed],
        f0: target(f0)?,
        m_test,
        alpha_witness,
    };
    grid.validate().map_err(to_py)?;
    let record = py.detach(|| experiments::run_cell(&grid, &grid.hash(), &grid.cells()[0]));
    to_dict(py, serde_json::to_value(&record))
}

/// Run a sweep from flat `key = value` config text; returns a list of records.
#[pyfunction]
#[pyo3(signature = (config, jobs = 1))]
fn run_sweep<'py>(py: Python<'py>, config: &str, jobs: usize) -> PyResult<Bound<'py, PyAny>> {
    let grid = SweepGrid::parse(config).map_err(to_py)?;
    let records = py.detach(|| experiments::run_sweep(&grid, jobs)).map_err(to_py)?;
    to_dict(py, serde_json::to_value(&records))
}

#[pymodule]
fn ridgeless_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySampleSet>()?;
    m.add_class::<PyInterpolant>()?;
    m.add_function(wrap_pyfunction!(sample_labeled, m)?)?;
    m.add_function(wrap_pyfunction!(separation_radii, m)?)?;
    m.add_function(wrap_pyfunction!(power_average, m)?)?;
    m.add_function(wrap_pyfunction!(kernel_value, m)?)?;
    m.add_function(wrap_pyfunction!(lambda_eig, m)?)?;
    m.add_function(wrap_pyfunction!(lambda0, m)?)?;
    m.add_function(wrap_pyfunction!(eta_moments, m)?)?;
    m.add_function(wrap_pyfunction!(witness_convention_norm, m)?)?;
    m.add_function(wrap_pyfunction!(witness_l2_norm_sq, m)?)?;
    m.add_function(wrap_pyfunction!(verify_kernel_norm, m)?)?;
    m.add_function(wrap_pyfunction!(run_cell, m)?)?;
    m.add_function(wrap_pyfunction!(run_sweep, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
