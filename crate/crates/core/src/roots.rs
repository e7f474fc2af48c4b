//! All complex zeros of a real polynomial, classified into real zeros and
//! upper-half-plane representatives of conjugate pairs.

use crate::error::{Error, Result};
use crate::poly::{Complex, RealPoly};

/// Default relative tolerance for snapping a zero onto the real axis.
pub const DEFAULT_REAL_TOL: f64 = 1e-10;

const MAX_ITER: usize = 500;
/// A root is accepted when |q(z)| ≤ ACCEPT_TOL · Σ|a_i| · max(1,|z|)^n.
const ACCEPT_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct ClassifiedRoots {
    /// Ascending.
    pub reals: Vec<f64>,
    /// Im > 0, lexicographic by (re, im).
    pub uppers: Vec<Complex>,
    /// max |q(root)| over the returned roots and their conjugates.
    pub residual: f64,
}

impl ClassifiedRoots {
    pub fn count(&self) -> usize {
        self.reals.len() + 2 * self.uppers.len()
    }
}

fn root_scale(q: &RealPoly, z: Complex) -> f64 {
    let l1: f64 = q.coeffs().iter().map(|a| a.abs()).sum();
    l1 * z.norm().max(1.0).powi(q.degree() as i32)
}

/// Fujiwara's bound on the moduli of the zeros.
fn root_bound(q: &RealPoly) -> f64 {
    let n = q.degree();
    let c = q.coeffs();
    let lead = c[n].abs();
    (1..=n)
        .map(|j| {
            let a = (c[n - j] / lead).abs();
            let a = if j == n { a / 2.0 } else { a };
            2.0 * a.powf(1.0 / j as f64)
        })
        .fold(0.0, f64::max)
}

/// Aberth–Ehrlich iteration from perturbed scaled roots of unity.
fn aberth(q: &RealPoly) -> (Vec<Complex>, bool, usize) {
    let n = q.degree();
    let radius = root_bound(q).max(1e-3) * 0.5;
    // fixed angular offset breaks the symmetry about the real axis
    let mut z: Vec<Complex> = (0..n)
        .map(|k| {
            let theta = std::f64::consts::TAU * k as f64 / n as f64 + 0.4;
            Complex::from_polar(radius * (1.0 + 0.01 * k as f64), theta)
        })
        .collect();
    let mut done = vec![false; n];
    for iter in 0..MAX_ITER {
        let mut all_done = true;
        for i in 0..n {
            if done[i] {
                continue;
            }
            let (p, dp) = q.evaluate_with_derivative(z[i]);
            if p.norm() == 0.0 {
                done[i] = true;
                continue;
            }
            let ratio = p / dp;
            let repulsion: Complex = (0..n)
                .filter(|&j| j != i)
                .map(|j| {
                    let d = z[i] - z[j];
                    if d.norm() == 0.0 {
                        Complex::new(0.0, 0.0)
                    } else {
                        d.inv()
                    }
                })
                .sum();
            let denom = Complex::new(1.0, 0.0) - ratio * repulsion;
            let step = if denom.norm() == 0.0 || !denom.is_finite() {
                ratio
            } else {
                ratio / denom
            };
            if !step.is_finite() {
                continue;
            }
            z[i] -= step;
            if step.norm() <= 1e-15 * z[i].norm().max(1e-300) {
                done[i] = true;
            } else {
                all_done = false;
            }
        }
        if all_done {
            return (z, true, iter + 1);
        }
    }
    (z, false, MAX_ITER)
}

/// Newton steps on q, kept only while they reduce |q|.
fn polish(q: &RealPoly, z: Complex) -> Complex {
    let mut best = z;
    let mut best_res = q.evaluate(z).norm();
    for _ in 0..4 {
        let (p, dp) = q.evaluate_with_derivative(best);
        if dp.norm() == 0.0 {
            break;
        }
        let cand = best - p / dp;
        let r = q.evaluate(cand).norm();
        if r < best_res {
            best = cand;
            best_res = r;
        } else {
            break;
        }
    }
    best
}

/// Find and classify all zeros of `q`.
///
/// Zeros with |Im z| ≤ `real_tol`·(1 + |Re z|) become real. The others are
/// paired with their conjugates and the upper member is kept.
pub fn find_roots(q: &RealPoly, real_tol: f64) -> Result<ClassifiedRoots> {
    let n = q.degree();
    if n < 1 {
        return Err(Error::Domain("degree must be >= 1".into()));
    }
    let scale: f64 = q.coeffs().iter().map(|a| a.abs()).fold(0.0, f64::max);
    if q.leading().abs() <= 1e-14 * scale {
        return Err(Error::Domain("leading coefficient is numerically zero".into()));
    }

    let raw: Vec<Complex> = if n == 1 {
        vec![Complex::new(-q.coeffs()[0] / q.coeffs()[1], 0.0)]
    } else {
        let (z, converged, iters) = aberth(q);
        let z: Vec<Complex> = z.into_iter().map(|r| polish(q, r)).collect();
        let bad = z
            .iter()
            .map(|&r| q.evaluate(r).norm() / root_scale(q, r))
            .fold(0.0, f64::max);
        if !converged && !(bad <= ACCEPT_TOL) {
            return Err(Error::NonConvergence {
                iterations: iters,
                residual: bad,
                partial: z.iter().map(|r| (r.re, r.im)).collect(),
            });
        }
        z
    };

    classify(q, raw, real_tol)
}

fn classify(q: &RealPoly, raw: Vec<Complex>, real_tol: f64) -> Result<ClassifiedRoots> {
    let mut reals = Vec::new();
    let mut ups = Vec::new();
    let mut lows = Vec::new();
    for z in raw {
        if z.im.abs() <= real_tol * (1.0 + z.re.abs()) {
            reals.push(z.re);
        } else if z.im > 0.0 {
            ups.push(z);
        } else {
            lows.push(z);
        }
    }
    // An unmatched near-real zero is resolved toward the real axis.
    let by_im = |a: &Complex, b: &Complex| a.im.abs().total_cmp(&b.im.abs());
    while ups.len() > lows.len() {
        ups.sort_by(by_im);
        reals.push(ups.remove(0).re);
    }
    while lows.len() > ups.len() {
        lows.sort_by(by_im);
        reals.push(lows.remove(0).re);
    }

    let mut uppers = Vec::with_capacity(ups.len());
    for u in ups {
        let (idx, _) = lows
            .iter()
            .enumerate()
            .map(|(i, w)| (i, (w.conj() - u).norm()))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("balanced above");
        let w = lows.swap_remove(idx);
        uppers.push(Complex::new(0.5 * (u.re + w.re), 0.5 * (u.im - w.im)));
    }

    reals.sort_by(f64::total_cmp);
    uppers.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));

    let mut residual = 0.0f64;
    let mut worst = 0.0f64;
    for z in reals
        .iter()
        .map(|&x| Complex::new(x, 0.0))
        .chain(uppers.iter().copied())
    {
        let r = q.evaluate(z).norm();
        residual = residual.max(r);
        worst = worst.max(r / root_scale(q, z));
    }
    if !(worst <= ACCEPT_TOL) {
        return Err(Error::NonConvergence {
            iterations: MAX_ITER,
            residual,
            partial: reals
                .iter()
                .map(|&x| (x, 0.0))
                .chain(uppers.iter().map(|z| (z.re, z.im)))
                .collect(),
        });
    }
    Ok(ClassifiedRoots {
        reals,
        uppers,
        residual,
    })
}
