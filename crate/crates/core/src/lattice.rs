//! Integer and coprime lattice points in dilated bounded regions.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::heights::WeightedHeight;

/// Scans above this many points are refused.
pub const MAX_SCAN: f64 = 1e11;
/// Direct gcd filtering is used while d·(2QN)^d stays below this.
pub const DIRECT_LIMIT: f64 = 1e8;

/// A bounded region A ⊆ [−N, N]^d with a membership test.
pub trait LatticeRegion: Sync {
    fn dim(&self) -> usize;

    /// N with A ⊆ [−N, N]^d.
    fn bound(&self) -> f64;

    fn contains(&self, x: &[f64]) -> bool;

    /// Bounds on coordinate `axis` given the earlier coordinates, for pruning.
    fn axis_range(&self, _prefix: &[f64], _axis: usize) -> (f64, f64) {
        (-self.bound(), self.bound())
    }

    /// Whether the origin belongs to A.
    fn contains_origin(&self) -> bool {
        self.contains(&vec![0.0; self.dim()])
    }
}

/// Axis-aligned box ∏ [lo_i, hi_i].
#[derive(Debug, Clone, PartialEq)]
pub struct BoxRegion {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl BoxRegion {
    pub fn cube(d: usize, half: f64) -> Self {
        Self {
            lo: vec![-half; d],
            hi: vec![half; d],
        }
    }

    pub fn volume(&self) -> f64 {
        self.lo.iter().zip(&self.hi).map(|(a, b)| b - a).product()
    }
}

impl LatticeRegion for BoxRegion {
    fn dim(&self) -> usize {
        self.lo.len()
    }

    fn bound(&self) -> f64 {
        self.lo.iter().chain(&self.hi).fold(0.0, |m, x| m.max(x.abs()))
    }

    fn contains(&self, x: &[f64]) -> bool {
        x.iter()
            .zip(self.lo.iter().zip(&self.hi))
            .all(|(v, (a, b))| *a <= *v && *v <= *b)
    }

    fn axis_range(&self, _prefix: &[f64], axis: usize) -> (f64, f64) {
        (self.lo[axis], self.hi[axis])
    }
}

/// The unit ball of a weighted l_p norm, viewed as a region in R^{n+1}.
#[derive(Debug, Clone)]
pub struct LpBall {
    pub height: WeightedHeight,
}

impl LatticeRegion for LpBall {
    fn dim(&self) -> usize {
        self.height.n() + 1
    }

    fn bound(&self) -> f64 {
        self.height.weights().iter().fold(0.0, |m, w| m.max(1.0 / w))
    }

    fn contains(&self, x: &[f64]) -> bool {
        self.height.norm_unchecked(x) <= 1.0 + 1e-12
    }

    fn axis_range(&self, prefix: &[f64], axis: usize) -> (f64, f64) {
        let w = self.height.weights();
        let r = match self.height.p() {
            crate::heights::PNorm::Infinity => 1.0 / w[axis],
            crate::heights::PNorm::Finite(p) => {
                let used: f64 = prefix.iter().zip(w).map(|(a, wi)| (a * wi).abs().powf(p)).sum();
                (1.0 - used).max(0.0).powf(1.0 / p) / w[axis]
            }
        };
        (-r, r)
    }
}

/// Region given by a closure, bounded by [−N, N]^d.
pub struct PredicateRegion<F> {
    pub dim: usize,
    pub bound: f64,
    pub predicate: F,
}

impl<F: Fn(&[f64]) -> bool + Sync> LatticeRegion for PredicateRegion<F> {
    fn dim(&self) -> usize {
        self.dim
    }

    fn bound(&self) -> f64 {
        self.bound
    }

    fn contains(&self, x: &[f64]) -> bool {
        (self.predicate)(x)
    }
}

fn check_scan<A: LatticeRegion + ?Sized>(a: &A, q: f64) -> Result<f64> {
    if !(q > 0.0) || !q.is_finite() {
        return Err(Error::Domain(format!("dilation must be positive, got {q}")));
    }
    let side = 2.0 * (q * a.bound()).ceil() + 1.0;
    let volume = side.powi(a.dim() as i32);
    if volume > MAX_SCAN {
        return Err(Error::Resource {
            volume,
            limit: MAX_SCAN,
        });
    }
    Ok(volume)
}

/// Integer range of `x` with `stride·x/q ∈ [lo, hi]`, padded by a little
/// slack; membership is decided by `contains` afterwards.
fn axis_ints(lo: f64, hi: f64, q: f64, stride: i64) -> std::ops::RangeInclusive<i64> {
    let s = stride as f64;
    let lo = (lo * q / s - 1e-9).ceil() as i64;
    let hi = (hi * q / s + 1e-9).floor() as i64;
    lo..=hi
}

/// Visit every lattice vector v ∈ stride·Z^d with v/Q ∈ A. Each worker owns
/// one value of the first coordinate and folds its own accumulator.
///
/// Scaled coordinates are always computed as `v as f64 / q` with the full
/// vector `v`, so strided scans see bit-identical membership tests.
fn scan<A, T, F>(a: &A, q: f64, stride: i64, init: T, visit: F) -> Result<T>
where
    A: LatticeRegion + ?Sized,
    T: Send + Sync + Clone + std::ops::Add<Output = T>,
    F: Fn(&mut T, &[i64]) + Sync,
{
    check_scan(a, q)?;
    let d = a.dim();
    let (lo, hi) = a.axis_range(&[], 0);
    let first: Vec<i64> = axis_ints(lo, hi, q, stride).collect();
    let parts: Vec<T> = first
        .into_par_iter()
        .map(|x0| {
            let mut acc = init.clone();
            let mut v = vec![0i64; d];
            let mut scaled = vec![0.0; d];
            v[0] = x0 * stride;
            scaled[0] = v[0] as f64 / q;
            recurse(a, q, stride, 1, &mut v, &mut scaled, &mut acc, &visit);
            acc
        })
        .collect();
    Ok(parts.into_iter().fold(init, |s, x| s + x))
}

#[allow(clippy::too_many_arguments)]
fn recurse<A, T, F>(a: &A, q: f64, stride: i64, axis: usize, v: &mut [i64], scaled: &mut [f64], acc: &mut T, visit: &F)
where
    A: LatticeRegion + ?Sized,
    F: Fn(&mut T, &[i64]),
{
    if axis == v.len() {
        if a.contains(scaled) {
            visit(acc, v);
        }
        return;
    }
    let (lo, hi) = a.axis_range(&scaled[..axis], axis);
    for x in axis_ints(lo, hi, q, stride) {
        v[axis] = x * stride;
        scaled[axis] = v[axis] as f64 / q;
        recurse(a, q, stride, axis + 1, v, scaled, acc, visit);
    }
}

/// λ(QA): the number of integer vectors v with v/Q ∈ A.
pub fn count_integer_points<A: LatticeRegion + ?Sized>(a: &A, q: f64) -> Result<u64> {
    scan(a, q, 1, 0u64, |acc, _| *acc += 1)
}

fn gcd(mut a: i64, mut b: i64) -> i64 {
    a = a.abs();
    b = b.abs();
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// λ*(QA) by scanning and filtering gcd = 1. The origin never counts.
pub fn count_coprime_direct<A: LatticeRegion + ?Sized>(a: &A, q: f64) -> Result<u64> {
    scan(a, q, 1, 0u64, |acc, v| {
        if v.iter().fold(0, |g, &x| gcd(g, x)) == 1 {
            *acc += 1;
        }
    })
}

/// λ*(QA) = Σ_{k=1}^{⌊QN⌋+1} μ(k) (λ(QA/k) − [0 ∈ A]).
///
/// λ(QA/k) counts integer u with ku/Q ∈ A and is evaluated as a strided scan
/// of QA, which keeps the membership tests identical to the direct route.
pub fn count_coprime_mobius<A: LatticeRegion + ?Sized>(a: &A, q: f64) -> Result<u64> {
    check_scan(a, q)?;
    let kmax = (q * a.bound()).floor() as usize + 1;
    let mu = mobius_table(kmax);
    let origin = i64::from(a.contains_origin());
    let mut total: i64 = 0;
    for (k, &m) in mu.iter().enumerate().skip(1) {
        if m == 0 {
            continue;
        }
        let lam = scan(a, q, k as i64, 0u64, |acc, _| *acc += 1)? as i64 - origin;
        total += i64::from(m) * lam;
    }
    u64::try_from(total).map_err(|_| Error::Domain("negative coprime count".into()))
}

/// Which routes produced a coprime count.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CoprimeCount {
    pub count: u64,
    pub direct: Option<u64>,
    pub mobius: Option<u64>,
}

/// λ*(QA): direct gcd filtering when the scan is small, Möbius inversion
/// otherwise.
pub fn count_coprime_points<A: LatticeRegion + ?Sized>(a: &A, q: f64) -> Result<CoprimeCount> {
    let d = a.dim() as f64;
    let work = d * (2.0 * q * a.bound()).powf(d);
    if work <= DIRECT_LIMIT {
        let c = count_coprime_direct(a, q)?;
        Ok(CoprimeCount {
            count: c,
            direct: Some(c),
            mobius: None,
        })
    } else {
        let c = count_coprime_mobius(a, q)?;
        Ok(CoprimeCount {
            count: c,
            direct: None,
            mobius: Some(c),
        })
    }
}

/// Möbius function values μ(0..=limit) from a linear sieve; μ(0) is unused.
pub fn mobius_table(limit: usize) -> Vec<i8> {
    let mut mu = vec![1i8; limit + 1];
    let mut is_comp = vec![false; limit + 1];
    let mut primes = Vec::new();
    for i in 2..=limit {
        if !is_comp[i] {
            primes.push(i);
            mu[i] = -1;
        }
        for &p in &primes {
            let ip = i * p;
            if ip > limit {
                break;
            }
            is_comp[ip] = true;
            if i % p == 0 {
                mu[ip] = 0;
                break;
            }
            mu[ip] = -mu[i];
        }
    }
    mu[0] = 0;
    mu
}

/// μ(k) for k ≥ 1.
pub fn mobius(k: u64) -> Result<i8> {
    if k == 0 {
        return Err(Error::Domain("mobius requires k >= 1".into()));
    }
    if k <= 1 << 16 {
        return Ok(mobius_table(k as usize)[k as usize]);
    }
    let mut n = k;
    let mut sign = 1i8;
    let mut p = 2u64;
    while p * p <= n {
        if n.is_multiple_of(p) {
            n /= p;
            if n.is_multiple_of(p) {
                return Ok(0);
            }
            sign = -sign;
        }
        p += 1;
    }
    if n > 1 {
        sign = -sign;
    }
    Ok(sign)
}
