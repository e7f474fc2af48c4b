//! Python bindings for the `algconj` library.

use algconj::counting::{self, CountReport};
use algconj::density::{self, DensityQuery};
use algconj::lattice::{self, BoxRegion, LpBall};
use algconj::mcsim::{self, Source};
use algconj::numerics::IntegrationOptions;
use algconj::{Complex, Error, IntPoly, PNorm, RealPoly, Region, RngStream, RootConfiguration, WeightedHeight};
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Domain(_) | Error::Usage(_) | Error::Unsupported(_) | Error::Resource { .. } => {
            PyValueError::new_err(e.to_string())
        }
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

#[derive(FromPyObject)]
enum PArg {
    Number(f64),
    Text(String),
}

impl PArg {
    fn norm(&self) -> PyResult<PNorm> {
        match self {
            PArg::Number(p) => PNorm::finite(*p).map_err(to_py),
            PArg::Text(s) => s.parse().map_err(to_py),
        }
    }
}

#[derive(FromPyObject)]
enum WeightsArg {
    Named(String),
    List(Vec<f64>),
}

/// Weighted l_p height on degree-n polynomials.
#[pyclass(name = "Height", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyHeight {
    inner: WeightedHeight,
}

#[pymethods]
impl PyHeight {
    /// `weights` is "ones", "bombieri" or a list of n + 1 positive numbers;
    /// `p` is a number ≥ 1, `float("inf")` or "inf".
    #[new]
    #[pyo3(signature = (n, p = PArg::Text("inf".into()), weights = WeightsArg::Named("ones".into())))]
    fn new(n: usize, p: PArg, weights: WeightsArg) -> PyResult<Self> {
        let p = p.norm()?;
        let inner = match weights {
            WeightsArg::Named(s) if s == "ones" => WeightedHeight::unweighted(n, p),
            WeightsArg::Named(s) if s == "bombieri" => WeightedHeight::bombieri(n, p),
            WeightsArg::Named(s) => return Err(PyValueError::new_err(format!("unknown weights '{s}'"))),
            WeightsArg::List(w) => {
                if w.len() != n + 1 {
                    return Err(PyValueError::new_err(format!(
                        "expected {} weights, got {}",
                        n + 1,
                        w.len()
                    )));
                }
                WeightedHeight::new(w, p)
            }
        }
        .map_err(to_py)?;
        Ok(Self { inner })
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn p(&self) -> f64 {
        match self.inner.p() {
            PNorm::Finite(p) => p,
            PNorm::Infinity => f64::INFINITY,
        }
    }

    #[getter]
    fn weights(&self) -> Vec<f64> {
        self.inner.weights().to_vec()
    }

    /// Height of a polynomial given by coefficients a_0..a_n.
    fn norm(&self, coeffs: Vec<f64>) -> PyResult<f64> {
        self.inner.lp_norm(&coeffs).map_err(to_py)
    }

    fn ball_volume(&self) -> f64 {
        self.inner.ball_volume()
    }

    /// The constant c_{n,p,w} of the limiting density.
    fn limit_constant(&self) -> f64 {
        self.inner.limit_constant_c()
    }

    fn __repr__(&self) -> String {
        format!(
            "Height(n={}, p={}, weights={:?})",
            self.inner.n(),
            self.inner.p(),
            self.inner.weights()
        )
    }
}

fn options(budget: usize, seed: u64) -> IntegrationOptions {
    let mut o = IntegrationOptions::default().with_budget(budget);
    o.rng = RngStream::new(seed, 0);
    o
}

fn report_dict<'py>(py: Python<'py>, r: &CountReport) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("q", r.q)?;
    d.set_item("phi", r.phi)?;
    d.set_item("primes_scanned", r.primes_scanned)?;
    d.set_item("total_scanned", r.total_scanned)?;
    d.set_item("reducible_count", r.reducible_count)?;
    d.set_item("failures", r.failures)?;
    d.set_item("histogram", r.histogram.clone())?;
    Ok(d)
}

/// Φ(Q, B): ordered tuples of distinct conjugates of prime polynomials of
/// height ≤ Q lying in B. `boxes` lists, per box, `lo hi` for each real slot
/// then `re_lo re_hi im_lo im_hi` for each complex slot.
#[pyfunction]
#[pyo3(signature = (height, q, boxes, k = 1, l = 0))]
fn phi_count<'py>(
    py: Python<'py>,
    height: &PyHeight,
    q: f64,
    boxes: Vec<Vec<f64>>,
    k: usize,
    l: usize,
) -> PyResult<Bound<'py, PyDict>> {
    let region = Region::from_flat(k, l, &boxes.concat()).map_err(to_py)?;
    let r = py
        .detach(|| counting::phi_count(&height.inner, q, &region))
        .map_err(to_py)?;
    report_dict(py, &r)
}

/// (Q, Φ, Φ/Q^{n+1}, limit, deviation).
type TableRow = (f64, u64, f64, f64, f64);

/// Rows of Φ(Q, B)/Q^{n+1} against the limit for each Q in `q_list`.
#[pyfunction]
#[pyo3(signature = (height, boxes, q_list, k = 1, l = 0, budget = 1_000_000))]
fn convergence_table(
    py: Python<'_>,
    height: &PyHeight,
    boxes: Vec<Vec<f64>>,
    q_list: Vec<f64>,
    k: usize,
    l: usize,
    budget: usize,
) -> PyResult<Vec<TableRow>> {
    let region = Region::from_flat(k, l, &boxes.concat()).map_err(to_py)?;
    let t = py
        .detach(|| counting::convergence_table(&height.inner, &region, &q_list, &options(budget, 1)))
        .map_err(to_py)?;
    Ok(t.rows
        .iter()
        .map(|r| (r.q, r.phi, r.phi_over_qn1, r.limit, r.deviation))
        .collect())
}

/// ρ_{k,l} at real points `reals` and upper half-plane points `uppers`.
/// Returns (value, error estimate).
#[pyfunction]
#[pyo3(signature = (height, reals, uppers = Vec::new(), budget = 1_000_000, seed = 1))]
fn rho(
    py: Python<'_>,
    height: &PyHeight,
    reals: Vec<f64>,
    uppers: Vec<Complex>,
    budget: usize,
    seed: u64,
) -> PyResult<(f64, f64)> {
    let config = RootConfiguration::new(reals, uppers).map_err(to_py)?;
    let q = DensityQuery::new(height.inner.clone(), config).map_err(to_py)?;
    let r = py
        .detach(|| density::rho_general(&q, &options(budget, seed)))
        .map_err(to_py)?;
    Ok((r.value, r.error_estimate))
}

/// Probability that exactly n − 2l zeros of the random polynomial are real.
#[pyfunction]
#[pyo3(signature = (height, l, budget = 1_000_000))]
fn prob_real_count(py: Python<'_>, height: &PyHeight, l: usize, budget: usize) -> PyResult<(f64, f64)> {
    let r = py
        .detach(|| density::prob_real_count(&height.inner, l, &options(budget, 1)))
        .map_err(to_py)?;
    Ok((r.value, r.error_estimate))
}

/// Monte Carlo density of real zeros on `bins` equal bins of [lo, hi].
/// Returns (lo, hi, estimate, std_error) per bin.
#[pyfunction]
#[pyo3(signature = (height, lo, hi, bins = 20, draws = 100_000, seed = 1, source = "g"))]
#[allow(clippy::too_many_arguments)]
fn simulate_real_density(
    py: Python<'_>,
    height: &PyHeight,
    lo: f64,
    hi: f64,
    bins: usize,
    draws: u64,
    seed: u64,
    source: &str,
) -> PyResult<Vec<(f64, f64, f64, f64)>> {
    let source = match source {
        "g" => Source::G,
        "ball" => Source::Ball,
        other => {
            return Err(PyValueError::new_err(format!(
                "source must be 'g' or 'ball', got '{other}'"
            )))
        }
    };
    let intervals = mcsim::uniform_bins(lo, hi, bins).map_err(to_py)?;
    let rng = RngStream::new(seed, 1);
    let est = py
        .detach(|| mcsim::empirical_real_density(&height.inner, &intervals, draws, &rng, source))
        .map_err(to_py)?;
    Ok(est.iter().map(|b| (b.lo, b.hi, b.estimate, b.std_error)).collect())
}

/// (λ, λ*) for the cube [−half, half]^d scaled by Q.
#[pyfunction]
#[pyo3(signature = (d, q, half = 1.0))]
fn lattice_cube(py: Python<'_>, d: usize, q: f64, half: f64) -> PyResult<(u64, u64)> {
    let a = BoxRegion::cube(d, half);
    py.detach(|| {
        Ok((
            lattice::count_integer_points(&a, q)?,
            lattice::count_coprime_points(&a, q)?.count,
        ))
    })
    .map_err(to_py)
}

/// (λ, λ*) for the unit ball of `height` scaled by Q.
#[pyfunction]
fn lattice_ball(py: Python<'_>, height: &PyHeight, q: f64) -> PyResult<(u64, u64)> {
    let a = LpBall {
        height: height.inner.clone(),
    };
    py.detach(|| {
        Ok((
            lattice::count_integer_points(&a, q)?,
            lattice::count_coprime_points(&a, q)?.count,
        ))
    })
    .map_err(to_py)
}

/// Zeros of a real polynomial (coefficients a_0..a_n): (reals, upper half-plane).
#[pyfunction]
#[pyo3(signature = (coeffs, real_tol = 1e-10))]
fn find_roots(coeffs: Vec<f64>, real_tol: f64) -> PyResult<(Vec<f64>, Vec<Complex>)> {
    let q = RealPoly::new(coeffs).map_err(to_py)?;
    let r = algconj::roots::find_roots(&q, real_tol).map_err(to_py)?;
    Ok((r.reals, r.uppers))
}

/// Whether an integer polynomial is irreducible over Q.
#[pyfunction]
fn is_irreducible(coeffs: Vec<i64>) -> PyResult<bool> {
    let q = IntPoly::new(coeffs).map_err(to_py)?;
    algconj::intarith::is_irreducible(&q).map_err(to_py)
}

#[pymodule]
#[pyo3(name = "algconj")]
fn algconj_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyHeight>()?;
    m.add_function(wrap_pyfunction!(phi_count, m)?)?;
    m.add_function(wrap_pyfunction!(convergence_table, m)?)?;
    m.add_function(wrap_pyfunction!(rho, m)?)?;
    m.add_function(wrap_pyfunction!(prob_real_count, m)?)?;
    m.add_function(wrap_pyfunction!(simulate_real_density, m)?)?;
    m.add_function(wrap_pyfunction!(lattice_cube, m)?)?;
    m.add_function(wrap_pyfunction!(lattice_ball, m)?)?;
    m.add_function(wrap_pyfunction!(find_roots, m)?)?;
    m.add_function(wrap_pyfunction!(is_irreducible, m)?)?;
    Ok(())
}
