//! Special functions, multidimensional integration and seeded random streams.

mod adaptive;
mod qmc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Γ(x) for x > 0.
pub fn gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("gamma requires x > 0, got {x}")));
    }
    Ok(statrs::function::gamma::gamma(x))
}

/// ln Γ(x) for x > 0.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("ln_gamma requires x > 0, got {x}")));
    }
    Ok(statrs::function::gamma::ln_gamma(x))
}

// B_2, B_4, ..., B_20
const BERNOULLI_EVEN: [f64; 10] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
];

/// Riemann ζ(s) for integer s ≥ 2.
///
/// Sums the first terms directly and closes the tail with Euler–Maclaurin.
pub fn zeta(s: u32) -> Result<f64> {
    if s < 2 {
        return Err(Error::Domain(format!("zeta requires s >= 2, got {s}")));
    }
    const N: u32 = 16;
    let sf = f64::from(s);
    let head: f64 = (1..N).rev().map(|k| f64::from(k).powf(-sf)).sum();

    let nf = f64::from(N);
    let mut tail = nf.powf(1.0 - sf) / (sf - 1.0) + 0.5 * nf.powf(-sf);
    // rising factorial s(s+1)...(s+2j-2) / (2j)!
    let mut rising = sf;
    let mut fact = 2.0;
    let mut npow = nf.powf(-sf - 1.0);
    for (j, b) in BERNOULLI_EVEN.iter().enumerate() {
        let term = b / fact * rising * npow;
        tail += term;
        if term.abs() < 1e-18 * tail {
            break;
        }
        let jf = (j + 1) as f64;
        rising *= (sf + 2.0 * jf - 1.0) * (sf + 2.0 * jf);
        fact *= (2.0 * jf + 1.0) * (2.0 * jf + 2.0);
        npow /= nf * nf;
    }
    Ok(head + tail)
}

/// A reproducible random stream: identical `(seed, stream_id)` always yields
/// the same sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RngStream {
    pub seed: u64,
    pub stream_id: u64,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        Self { seed, stream_id }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream_id);
        rng
    }

    /// Independent substream for parallel worker `index`.
    pub fn substream(&self, index: u64) -> RngStream {
        RngStream {
            seed: splitmix64(self.seed ^ splitmix64(self.stream_id)),
            stream_id: index,
        }
    }
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegrationResult {
    pub value: f64,
    pub error_estimate: f64,
    pub evaluations: usize,
    /// False when the budget ran out before the tolerance was met.
    pub converged: bool,
}

impl IntegrationResult {
    pub fn exact(value: f64) -> Self {
        Self {
            value,
            error_estimate: 0.0,
            evaluations: 1,
            converged: true,
        }
    }

    pub fn scale(self, c: f64) -> Self {
        Self {
            value: self.value * c,
            error_estimate: self.error_estimate * c.abs(),
            ..self
        }
    }

    /// Sum of independent results; errors add.
    pub fn combine(self, other: Self) -> Self {
        Self {
            value: self.value + other.value,
            error_estimate: self.error_estimate + other.error_estimate,
            evaluations: self.evaluations + other.evaluations,
            converged: self.converged && other.converged,
        }
    }
}

/// An integrand over R^d. Returning `None` means the point is outside the
/// support, which lets the adaptive engine refine across the discontinuity.
pub trait Integrand: Sync {
    fn eval(&self, t: &[f64]) -> Option<f64>;
}

impl<F> Integrand for F
where
    F: Fn(&[f64]) -> Option<f64> + Sync,
{
    fn eval(&self, t: &[f64]) -> Option<f64> {
        self(t)
    }
}

/// Smooth integrand that is supported everywhere.
pub fn smooth<F>(f: F) -> impl Integrand
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    move |t: &[f64]| Some(f(t))
}

/// Domain of one coordinate, mapped onto (0, 1) by a smooth monotone change
/// of variables.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Axis {
    /// [lo, hi], linear map.
    Interval(f64, f64),
    /// The whole line, `t = scale * tan(π(u - 1/2))`.
    Line { scale: f64 },
    /// [lo, ∞), `t = lo + scale * u / (1 - u)`.
    HalfLine { lo: f64, scale: f64 },
}

impl Axis {
    /// Axis for an interval that may have infinite endpoints.
    pub fn from_bounds(lo: f64, hi: f64, scale: f64) -> Self {
        match (lo.is_finite(), hi.is_finite()) {
            (true, true) => Axis::Interval(lo, hi),
            (false, false) => Axis::Line { scale },
            (true, false) => Axis::HalfLine { lo, scale },
            // (-∞, hi] is handled by reflection in `map`.
            (false, true) => Axis::HalfLine { lo: -hi, scale: -scale },
        }
    }

    /// Returns (t, dt/du).
    #[inline]
    fn map(&self, u: f64) -> (f64, f64) {
        match *self {
            Axis::Interval(lo, hi) => (lo + (hi - lo) * u, hi - lo),
            Axis::Line { scale } => {
                let a = std::f64::consts::PI * (u - 0.5);
                let c = a.cos();
                (scale * a.tan(), scale * std::f64::consts::PI / (c * c))
            }
            Axis::HalfLine { lo, scale } => {
                let r = 1.0 - u;
                if scale < 0.0 {
                    // reflected: t in (-∞, -lo]
                    (-lo + scale * u / r, -scale / (r * r))
                } else {
                    (lo + scale * u / r, scale / (r * r))
                }
            }
        }
    }

    fn is_degenerate(&self) -> bool {
        matches!(*self, Axis::Interval(lo, hi) if lo == hi)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Adaptive subdivision for d ≤ 3, quasi-random otherwise.
    Auto,
    Adaptive,
    QuasiRandom,
}

#[derive(Debug, Clone, Copy)]
pub struct IntegrationOptions {
    pub mode: Mode,
    pub max_evals: usize,
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub rng: RngStream,
}

impl Default for IntegrationOptions {
    fn default() -> Self {
        Self {
            mode: Mode::Auto,
            max_evals: 1_000_000,
            abs_tol: 1e-9,
            rel_tol: 1e-7,
            rng: RngStream::new(0x5eed, 0),
        }
    }
}

impl IntegrationOptions {
    pub fn with_mode(mut self, mode: Mode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_budget(mut self, max_evals: usize) -> Self {
        self.max_evals = max_evals;
        self
    }

    pub fn with_tol(mut self, abs_tol: f64, rel_tol: f64) -> Self {
        self.abs_tol = abs_tol;
        self.rel_tol = rel_tol;
        self
    }
}

/// Integrand pulled back to the open unit cube.
struct Pullback<'a, F: ?Sized> {
    f: &'a F,
    axes: &'a [Axis],
}

impl<F: Integrand + ?Sized> Pullback<'_, F> {
    /// `Ok(None)` outside the support.
    fn eval(&self, u: &[f64], t: &mut [f64]) -> Result<Option<f64>> {
        let mut jac = 1.0;
        for ((ti, &ui), axis) in t.iter_mut().zip(u).zip(self.axes) {
            let (x, d) = axis.map(ui);
            *ti = x;
            jac *= d;
        }
        if !jac.is_finite() || t.iter().any(|x| !x.is_finite()) {
            // only reachable at the very edge of the cube
            return Ok(Some(0.0));
        }
        match self.f.eval(t) {
            None => Ok(None),
            Some(v) if v.is_nan() => Err(Error::Evaluation(t.to_vec())),
            Some(v) => {
                let r = v * jac;
                Ok(Some(if r.is_finite() { r } else { 0.0 }))
            }
        }
    }
}

/// Integrate `f` over the product domain described by `axes`.
pub fn integrate<F: Integrand + ?Sized>(f: &F, axes: &[Axis], opts: &IntegrationOptions) -> Result<IntegrationResult> {
    let d = axes.len();
    if d == 0 {
        return Err(Error::Domain("integration dimension must be >= 1".into()));
    }
    if axes.iter().any(Axis::is_degenerate) {
        return Ok(IntegrationResult::exact(0.0));
    }
    let pb = Pullback { f, axes };
    let mode = match opts.mode {
        Mode::Auto if d <= 3 => Mode::Adaptive,
        Mode::Auto => Mode::QuasiRandom,
        m => m,
    };
    match mode {
        Mode::Adaptive if d == 1 => adaptive::gauss_kronrod(&pb, opts),
        Mode::Adaptive => adaptive::genz_malik(&pb, d, opts),
        _ => qmc::sobol(&pb, d, opts),
    }
}
