//! Monte Carlo for the random polynomial G(z) = Σ (η_i / w_i) z^i and for
//! polynomials with coefficients uniform in the weighted unit ball.
//!
//! Draws are split into fixed-size chunks, each with its own substream, so
//! every estimate depends only on the seed and not on the thread count.

use std::io::Write;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, Gamma};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::heights::{PNorm, WeightedHeight};
use crate::numerics::RngStream;
use crate::poly::RealPoly;
use crate::region::{Interval, Rect};
use crate::roots::{find_roots, ClassifiedRoots, DEFAULT_REAL_TOL};

const CHUNK: u64 = 1 << 14;

/// Variates with density e^{−|t|^p} / (2Γ(1+1/p)), or uniform on [−1, 1].
#[derive(Debug, Clone)]
pub struct ExpPowerSampler {
    p: PNorm,
    gamma: Option<Gamma<f64>>,
}

impl ExpPowerSampler {
    pub fn new(p: PNorm) -> Self {
        let gamma = match p {
            PNorm::Infinity => None,
            PNorm::Finite(p) => Some(Gamma::new(1.0 / p, 1.0).expect("shape 1/p is positive")),
        };
        Self { p, gamma }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match (self.p, &self.gamma) {
            (PNorm::Finite(p), Some(g)) => {
                let m = g.sample(rng).powf(1.0 / p);
                if rng.random::<bool>() {
                    m
                } else {
                    -m
                }
            }
            _ => rng.random_range(-1.0..=1.0),
        }
    }
}

/// One variate of the coefficient law for exponent p.
pub fn sample_eta<R: Rng + ?Sized>(p: PNorm, rng: &mut R) -> f64 {
    ExpPowerSampler::new(p).sample(rng)
}

/// Coefficient source for the zero simulations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Source {
    /// G(z) = Σ (η_i / w_i) z^i.
    G,
    /// Coefficients uniform in the unit ball of l_{p,w}.
    Ball,
}

/// Reusable sampler for one height.
#[derive(Debug, Clone)]
pub struct PolySampler {
    h: WeightedHeight,
    eta: ExpPowerSampler,
}

impl PolySampler {
    pub fn new(h: &WeightedHeight) -> Self {
        Self {
            h: h.clone(),
            eta: ExpPowerSampler::new(h.p()),
        }
    }

    /// G's coefficients; a zero leading coefficient is redrawn.
    pub fn sample_g<R: Rng + ?Sized>(&self, rng: &mut R) -> RealPoly {
        loop {
            let c: Vec<f64> = self.h.weights().iter().map(|w| self.eta.sample(rng) / w).collect();
            if let Ok(q) = RealPoly::new(c) {
                return q;
            }
        }
    }

    /// A point uniform in {a : l_{p,w}(a) ≤ 1}: for p < ∞,
    /// (η_i / w_i) / (Σ|η_j|^p + Z)^{1/p} with Z standard exponential.
    pub fn sample_ball<R: Rng + ?Sized>(&self, rng: &mut R) -> BallSample {
        let w = self.h.weights();
        let coeffs = match self.h.p() {
            PNorm::Infinity => w.iter().map(|wi| rng.random_range(-1.0..=1.0) / wi).collect(),
            PNorm::Finite(p) => {
                let eta: Vec<f64> = w.iter().map(|_| self.eta.sample(rng)).collect();
                let z: f64 = Exp1.sample(rng);
                let s = (eta.iter().map(|e| e.abs().powf(p)).sum::<f64>() + z).powf(1.0 / p);
                eta.iter().zip(w).map(|(e, wi)| e / (wi * s)).collect()
            }
        };
        BallSample { coeffs }
    }

    /// A polynomial from the chosen source; degenerate draws are redrawn.
    pub fn sample<R: Rng + ?Sized>(&self, source: Source, rng: &mut R) -> RealPoly {
        match source {
            Source::G => self.sample_g(rng),
            Source::Ball => loop {
                if let Ok(q) = RealPoly::new(self.sample_ball(rng).coeffs) {
                    return q;
                }
            },
        }
    }
}

/// Coefficients uniform in the weighted unit ball.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BallSample {
    pub coeffs: Vec<f64>,
}

pub fn sample_g<R: Rng + ?Sized>(h: &WeightedHeight, rng: &mut R) -> RealPoly {
    PolySampler::new(h).sample_g(rng)
}

pub fn sample_uniform_ball<R: Rng + ?Sized>(h: &WeightedHeight, rng: &mut R) -> BallSample {
    PolySampler::new(h).sample_ball(rng)
}

/// Zeros of one draw.
pub type ZeroProcessSample = ClassifiedRoots;

/// Run `draws` simulations in fixed chunks and fold the per-draw zeros.
/// Returns the merged accumulator and the number of root-finder failures.
fn simulate<T, I, V, M>(
    h: &WeightedHeight,
    source: Source,
    draws: u64,
    rng: &RngStream,
    init: I,
    visit: V,
    merge: M,
) -> Result<(T, u64)>
where
    T: Send,
    I: Fn() -> T + Sync,
    V: Fn(&mut T, &ZeroProcessSample) + Sync,
    M: Fn(T, T) -> T,
{
    if draws == 0 {
        return Err(Error::Domain("need at least one draw".into()));
    }
    let sampler = PolySampler::new(h);
    let chunks = draws.div_ceil(CHUNK);
    let parts: Vec<(T, u64)> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut r: ChaCha8Rng = rng.substream(c).rng();
            let count = CHUNK.min(draws - c * CHUNK);
            let mut acc = init();
            let mut failures = 0;
            for _ in 0..count {
                let q = sampler.sample(source, &mut r);
                match find_roots(&q, DEFAULT_REAL_TOL) {
                    Ok(z) => visit(&mut acc, &z),
                    Err(_) => failures += 1,
                }
            }
            (acc, failures)
        })
        .collect();
    let mut failures = 0;
    let mut acc = init();
    for (part, f) in parts {
        acc = merge(acc, part);
        failures += f;
    }
    Ok((acc, failures))
}

/// Running sums of a vector of per-draw statistics.
#[derive(Debug, Clone)]
struct Moments {
    n: u64,
    sum: Vec<f64>,
    sum_sq: Vec<f64>,
}

impl Moments {
    fn new(len: usize) -> Self {
        Self {
            n: 0,
            sum: vec![0.0; len],
            sum_sq: vec![0.0; len],
        }
    }

    fn push(&mut self, x: &[f64]) {
        self.n += 1;
        for ((s, q), v) in self.sum.iter_mut().zip(&mut self.sum_sq).zip(x) {
            *s += v;
            *q += v * v;
        }
    }

    fn merge(mut self, o: Self) -> Self {
        self.n += o.n;
        for (a, b) in self.sum.iter_mut().zip(o.sum) {
            *a += b;
        }
        for (a, b) in self.sum_sq.iter_mut().zip(o.sum_sq) {
            *a += b;
        }
        self
    }

    /// (mean, standard error of the mean) per component.
    fn summary(&self) -> Vec<(f64, f64)> {
        let n = self.n.max(1) as f64;
        self.sum
            .iter()
            .zip(&self.sum_sq)
            .map(|(s, q)| {
                let mean = s / n;
                let var = ((q / n - mean * mean) * n / (n - 1.0).max(1.0)).max(0.0);
                (mean, (var / n).sqrt())
            })
            .collect()
    }
}

/// An estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub estimate: f64,
    pub std_error: f64,
}

/// Per-bin real-zero density estimate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BinEstimate {
    pub lo: f64,
    pub hi: f64,
    pub estimate: f64,
    pub std_error: f64,
}

fn check_bins(bins: &[Interval]) -> Result<()> {
    for (i, a) in bins.iter().enumerate() {
        if !(a.length() > 0.0) || !a.length().is_finite() {
            return Err(Error::Domain(format!(
                "bin [{}, {}] must have finite positive length",
                a.lo, a.hi
            )));
        }
        if bins[i + 1..].iter().any(|b| a.lo < b.hi && b.lo < a.hi) {
            return Err(Error::Domain("bins overlap".into()));
        }
    }
    Ok(())
}

/// Mean number of real zeros per unit length in each bin.
pub fn empirical_real_density(
    h: &WeightedHeight,
    bins: &[Interval],
    draws: u64,
    rng: &RngStream,
    source: Source,
) -> Result<Vec<BinEstimate>> {
    check_bins(bins)?;
    let (m, _) = simulate(
        h,
        source,
        draws,
        rng,
        || Moments::new(bins.len()),
        |acc, z| {
            let counts: Vec<f64> = bins
                .iter()
                .map(|b| z.reals.iter().filter(|x| b.contains(**x)).count() as f64)
                .collect();
            acc.push(&counts);
        },
        Moments::merge,
    )?;
    Ok(bins
        .iter()
        .zip(m.summary())
        .map(|(b, (mean, se))| BinEstimate {
            lo: b.lo,
            hi: b.hi,
            estimate: mean / b.length(),
            std_error: se / b.length(),
        })
        .collect())
}

/// E[∏ μ(B_i)] over the real intervals and upper rectangles.
pub fn empirical_mixed_moment(
    h: &WeightedHeight,
    reals: &[Interval],
    uppers: &[Rect],
    draws: u64,
    rng: &RngStream,
    source: Source,
) -> Result<Estimate> {
    if reals.len() + uppers.len() == 0 {
        return Err(Error::Domain("need at least one box".into()));
    }
    let overlap = |a: &Interval, b: &Interval| a.lo < b.hi && b.lo < a.hi;
    for (i, a) in reals.iter().enumerate() {
        if reals[i + 1..].iter().any(|b| overlap(a, b)) {
            return Err(Error::Domain("real boxes overlap".into()));
        }
    }
    for (i, a) in uppers.iter().enumerate() {
        if uppers[i + 1..]
            .iter()
            .any(|b| overlap(&a.re, &b.re) && overlap(&a.im, &b.im))
        {
            return Err(Error::Domain("complex boxes overlap".into()));
        }
    }
    let (m, _) = simulate(
        h,
        source,
        draws,
        rng,
        || Moments::new(1),
        |acc, z| {
            let mut prod = 1.0;
            for b in reals {
                prod *= z.reals.iter().filter(|x| b.contains(**x)).count() as f64;
            }
            for r in uppers {
                prod *= z.uppers.iter().filter(|w| r.contains(**w)).count() as f64;
            }
            acc.push(&[prod]);
        },
        Moments::merge,
    )?;
    let (estimate, std_error) = m.summary()[0];
    Ok(Estimate { estimate, std_error })
}

/// Frequencies of 0..=n real zeros with binomial standard errors.
pub fn empirical_real_count_dist(
    h: &WeightedHeight,
    draws: u64,
    rng: &RngStream,
    source: Source,
) -> Result<Vec<Estimate>> {
    let n = h.n();
    let (counts, failures) = simulate(
        h,
        source,
        draws,
        rng,
        || vec![0u64; n + 1],
        |acc, z| acc[z.reals.len().min(n)] += 1,
        |mut a, b| {
            for (x, y) in a.iter_mut().zip(b) {
                *x += y;
            }
            a
        },
    )?;
    let total = (draws - failures).max(1) as f64;
    Ok(counts
        .iter()
        .map(|&c| {
            let p = c as f64 / total;
            Estimate {
                estimate: p,
                std_error: (p * (1.0 - p) / total).sqrt(),
            }
        })
        .collect())
}

/// Two-sample comparison of zeros from ball-uniform coefficients and from G.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquivalenceReport {
    /// z-scores of the real-zero-count frequencies, indexed by count.
    pub count_z: Vec<f64>,
    /// z-scores of the binned real-zero densities.
    pub bin_z: Vec<f64>,
    pub max_abs_z: f64,
}

fn z_score(a: Estimate, b: Estimate) -> f64 {
    let se = (a.std_error.powi(2) + b.std_error.powi(2)).sqrt();
    if se == 0.0 {
        if a.estimate == b.estimate {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        (a.estimate - b.estimate) / se
    }
}

pub fn ball_vs_g_root_equivalence(
    h: &WeightedHeight,
    bins: &[Interval],
    draws: u64,
    rng: &RngStream,
) -> Result<EquivalenceReport> {
    let (rb, rg) = (rng.substream(u64::MAX), rng.substream(u64::MAX - 1));
    let cb = empirical_real_count_dist(h, draws, &rb, Source::Ball)?;
    let cg = empirical_real_count_dist(h, draws, &rg, Source::G)?;
    let db = empirical_real_density(h, bins, draws, &rb, Source::Ball)?;
    let dg = empirical_real_density(h, bins, draws, &rg, Source::G)?;
    // parity forbids some counts; those rows are exactly zero on both sides
    let count_z: Vec<f64> = cb.iter().zip(&cg).map(|(a, b)| z_score(*a, *b)).collect();
    let est = |b: &BinEstimate| Estimate {
        estimate: b.estimate,
        std_error: b.std_error,
    };
    let bin_z: Vec<f64> = db.iter().zip(&dg).map(|(a, b)| z_score(est(a), est(b))).collect();
    let max_abs_z = count_z.iter().chain(&bin_z).fold(0.0f64, |m, z| m.max(z.abs()));
    Ok(EquivalenceReport {
        count_z,
        bin_z,
        max_abs_z,
    })
}

/// Equal-width bins covering [lo, hi].
pub fn uniform_bins(lo: f64, hi: f64, count: usize) -> Result<Vec<Interval>> {
    if count == 0 || !(hi > lo) {
        return Err(Error::Domain(format!("cannot split [{lo}, {hi}] into {count} bins")));
    }
    (0..count)
        .map(|i| {
            let edge = |j: usize| lo + (hi - lo) * j as f64 / count as f64;
            let a = edge(i);
            let b = if i + 1 == count { hi } else { edge(i + 1) };
            Interval::new(a, b)
        })
        .collect()
}

/// One histogram row compared with theory.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HistogramRow {
    pub bin_lo: f64,
    pub bin_hi: f64,
    pub estimate: f64,
    pub std_error: f64,
    pub theory: f64,
    pub theory_err: f64,
    pub z: f64,
}

/// Pair bin estimates with theory given as (density, error estimate).
pub fn histogram_rows(est: &[BinEstimate], theory: &[(f64, f64)]) -> Vec<HistogramRow> {
    est.iter()
        .zip(theory)
        .map(|(e, &(t, terr))| HistogramRow {
            bin_lo: e.lo,
            bin_hi: e.hi,
            estimate: e.estimate,
            std_error: e.std_error,
            theory: t,
            theory_err: terr,
            z: if e.std_error > 0.0 {
                (e.estimate - t) / e.std_error
            } else {
                0.0
            },
        })
        .collect()
}

pub fn write_histogram_csv<W: Write>(rows: &[HistogramRow], mut w: W) -> Result<()> {
    writeln!(w, "bin_lo,bin_hi,estimate,std_error,theory,theory_err,z")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{:.10e},{:.4e},{:.10e},{:.2e},{:.4}",
            r.bin_lo, r.bin_hi, r.estimate, r.std_error, r.theory, r.theory_err, r.z
        )?;
    }
    Ok(())
}

/// Whether a z-score list passes: all within 3σ except one 4σ outlier per
/// 20 comparisons.
pub fn z_scores_pass(z: &[f64]) -> bool {
    let allowed = z.len().div_ceil(20);
    let over3 = z.iter().filter(|v| v.abs() > 3.0).count();
    over3 <= allowed && z.iter().all(|v| v.abs() <= 4.0)
}

/// Shorthand for an upper rectangle [re_lo, re_hi] × [im_lo, im_hi].
pub fn rect(re_lo: f64, re_hi: f64, im_lo: f64, im_hi: f64) -> Result<Rect> {
    Rect::new(Interval::new(re_lo, re_hi)?, Interval::new(im_lo, im_hi)?)
}
