//! Enumeration of integer polynomials of bounded weighted height and the
//! counting function Φ(Q, B) of conjugate tuples landing in a region.

use std::io::Write;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::density;
use crate::error::{Error, Result};
use crate::heights::{PNorm, WeightedHeight};
use crate::intarith::{self, MAX_DEGREE};
use crate::numerics::{zeta, IntegrationOptions};
use crate::poly::{Complex, IntPoly};
use crate::region::Region;
use crate::roots::{find_roots, DEFAULT_REAL_TOL};

/// Relative slack on the height bound, so ties on the sphere are kept.
const HEIGHT_SLACK: f64 = 1e-12;
/// Scans of more polynomials than this are refused.
pub const MAX_SCAN: f64 = 1e11;
/// Materialised enumerations are capped at this many polynomials.
pub const MAX_COLLECT: f64 = 1e8;

/// Coefficient-range bookkeeping for the nested enumeration loops.
struct Budget<'a> {
    h: &'a WeightedHeight,
    /// Q^p for finite p, Q for p = ∞, inflated by the slack.
    cap: f64,
}

impl<'a> Budget<'a> {
    fn new(h: &'a WeightedHeight, q: f64) -> Self {
        let cap = match h.p() {
            PNorm::Infinity => q * (1.0 + HEIGHT_SLACK),
            PNorm::Finite(p) => q.powf(p) * (1.0 + HEIGHT_SLACK),
        };
        Self { h, cap }
    }

    /// Largest |a_i| allowed given the budget already used by earlier indices.
    fn max_abs(&self, i: usize, used: f64) -> i64 {
        let w = self.h.weights()[i];
        let r = match self.h.p() {
            PNorm::Infinity => self.cap / w,
            PNorm::Finite(p) => (self.cap - used).max(0.0).powf(1.0 / p) / w,
        };
        (r + 1e-9).floor() as i64
    }

    /// Budget consumed by coefficient `a` at index `i`.
    fn cost(&self, i: usize, a: i64) -> f64 {
        let x = (self.h.weights()[i] * a as f64).abs();
        match self.h.p() {
            PNorm::Infinity => 0.0,
            PNorm::Finite(1.0) => x,
            PNorm::Finite(2.0) => x * x,
            PNorm::Finite(p) => x.powf(p),
        }
    }

    fn admits(&self, used: f64) -> bool {
        match self.h.p() {
            PNorm::Infinity => true,
            PNorm::Finite(_) => used <= self.cap,
        }
    }
}

/// Upper bound on the number of integer points in the ball of radius Q:
/// the unit cubes around them fit in the ball of radius Q + ‖(1/2)‖.
fn scan_estimate(h: &WeightedHeight, q: f64) -> f64 {
    let half = vec![0.5; h.n() + 1];
    let r = q + h.lp_norm(&half).unwrap_or(0.0);
    h.ball_volume() * r.powi(h.n() as i32 + 1)
}

/// Visit every coefficient vector of `ball(h, Q)` whose leading pair is
/// `(a_n, a_{n-1})`, innermost index a_0 varying fastest.
fn visit_tail<F: FnMut(&[i64])>(budget: &Budget<'_>, coeffs: &mut [i64], idx: usize, used: f64, f: &mut F) {
    let m = budget.max_abs(idx, used);
    for a in -m..=m {
        let u = used + budget.cost(idx, a);
        if !budget.admits(u) {
            continue;
        }
        coeffs[idx] = a;
        if idx == 0 {
            f(coeffs);
        } else {
            visit_tail(budget, coeffs, idx - 1, u, f);
        }
    }
}

/// The admissible `(a_n, a_{n-1})` pairs in loop order, optionally only
/// with `a_n > 0`.
fn leading_pairs(budget: &Budget<'_>, n: usize, positive_only: bool) -> Vec<(i64, i64, f64)> {
    let mut out = Vec::new();
    let m = budget.max_abs(n, 0.0);
    let start = if positive_only { 1 } else { -m };
    for an in start..=m {
        if an == 0 {
            continue;
        }
        let u = budget.cost(n, an);
        if !budget.admits(u) {
            continue;
        }
        let m1 = budget.max_abs(n - 1, u);
        for an1 in -m1..=m1 {
            let u1 = u + budget.cost(n - 1, an1);
            if budget.admits(u1) {
                out.push((an, an1, u1));
            }
        }
    }
    out
}

/// Fold over the height ball in parallel; one worker per leading pair.
fn par_fold<T, I, V, M>(h: &WeightedHeight, q: f64, positive_only: bool, init: I, visit: V, merge: M) -> Result<T>
where
    T: Send,
    I: Fn() -> T + Sync + Send,
    V: Fn(&mut T, &[i64]) + Sync + Send,
    M: Fn(T, T) -> T + Sync + Send,
{
    let est = scan_estimate(h, q);
    if est > MAX_SCAN {
        return Err(Error::Resource {
            volume: est,
            limit: MAX_SCAN,
        });
    }
    let n = h.n();
    let budget = Budget::new(h, q);
    let pairs = leading_pairs(&budget, n, positive_only);
    let parts: Vec<T> = pairs
        .into_par_iter()
        .map(|(an, an1, used)| {
            let mut acc = init();
            let mut coeffs = vec![0i64; n + 1];
            coeffs[n] = an;
            coeffs[n - 1] = an1;
            if n == 1 {
                visit(&mut acc, &coeffs);
            } else {
                visit_tail(&budget, &mut coeffs, n - 2, used, &mut |c| visit(&mut acc, c));
            }
            acc
        })
        .collect();
    Ok(parts.into_iter().fold(init(), merge))
}

/// All integer polynomials of degree n with `l_{p,w} ≤ Q`, in loop order
/// (a_n outermost, ascending in every coefficient).
pub fn enumerate_height_ball(h: &WeightedHeight, q: f64) -> Result<Vec<IntPoly>> {
    let est = scan_estimate(h, q);
    if est > MAX_COLLECT {
        return Err(Error::Resource {
            volume: est,
            limit: MAX_COLLECT,
        });
    }
    par_fold(
        h,
        q,
        false,
        Vec::new,
        |acc: &mut Vec<IntPoly>, c| acc.push(IntPoly::new(c.to_vec()).expect("leading coefficient is non-zero")),
        |mut a, b| {
            a.extend(b);
            a
        },
    )
}

/// The prime polynomials of `enumerate_height_ball`.
pub fn enumerate_prime(h: &WeightedHeight, q: f64) -> Result<Vec<IntPoly>> {
    check_degree(h)?;
    let est = scan_estimate(h, q);
    if est > MAX_COLLECT {
        return Err(Error::Resource {
            volume: est,
            limit: MAX_COLLECT,
        });
    }
    par_fold(
        h,
        q,
        true,
        Vec::new,
        |acc: &mut Vec<IntPoly>, c| {
            let p = IntPoly::new(c.to_vec()).expect("leading coefficient is non-zero");
            if intarith::is_prime_poly(&p).map(|v| v.prime).unwrap_or(false) {
                acc.push(p);
            }
        },
        |mut a, b| {
            a.extend(b);
            a
        },
    )
}

fn check_degree(h: &WeightedHeight) -> Result<()> {
    if h.n() > MAX_DEGREE {
        return Err(Error::Unsupported(format!(
            "counting supports degree <= {MAX_DEGREE}, got {}",
            h.n()
        )));
    }
    Ok(())
}

/// Result of one Φ(Q, B) scan.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CountReport {
    pub q: f64,
    pub phi: u64,
    pub primes_scanned: u64,
    pub total_scanned: u64,
    pub reducible_count: u64,
    /// Prime polynomials skipped because root finding failed.
    pub failures: u64,
    /// `histogram[m]` = number of primes q with μ_q(B) = m.
    pub histogram: Vec<u64>,
    pub runtime_s: f64,
}

impl CountReport {
    fn empty(q: f64) -> Self {
        Self {
            q,
            phi: 0,
            primes_scanned: 0,
            total_scanned: 0,
            reducible_count: 0,
            failures: 0,
            histogram: Vec::new(),
            runtime_s: 0.0,
        }
    }

    fn merge(mut self, other: Self) -> Self {
        self.phi += other.phi;
        self.primes_scanned += other.primes_scanned;
        self.total_scanned += other.total_scanned;
        self.reducible_count += other.reducible_count;
        self.failures += other.failures;
        if self.histogram.len() < other.histogram.len() {
            self.histogram.resize(other.histogram.len(), 0);
        }
        for (a, b) in self.histogram.iter_mut().zip(other.histogram) {
            *a += b;
        }
        self
    }

    fn tally(&mut self, m: u64) {
        let m = m as usize;
        if self.histogram.len() <= m {
            self.histogram.resize(m + 1, 0);
        }
        self.histogram[m] += 1;
        self.phi += m as u64;
    }
}

/// Options for `phi_count_with`.
#[derive(Debug, Clone, Copy)]
pub struct CountOptions {
    /// Tolerance for snapping near-real zeros onto the axis.
    pub real_tol: f64,
}

impl Default for CountOptions {
    fn default() -> Self {
        Self {
            real_tol: DEFAULT_REAL_TOL,
        }
    }
}

/// Number of ordered tuples of distinct zeros (k real, l upper) in B.
pub fn tuple_count(reals: &[f64], uppers: &[Complex], b: &Region) -> u64 {
    let (k, l) = (b.k(), b.l());
    if reals.len() < k || uppers.len() < l {
        return 0;
    }
    let mut ri = vec![0usize; k];
    let mut ui = vec![0usize; l];
    let mut count = 0;
    choose_reals(reals, uppers, b, 0, &mut ri, &mut ui, &mut count);
    count
}

fn choose_reals(
    reals: &[f64],
    uppers: &[Complex],
    b: &Region,
    slot: usize,
    ri: &mut [usize],
    ui: &mut [usize],
    count: &mut u64,
) {
    if slot == ri.len() {
        choose_uppers(reals, uppers, b, 0, ri, ui, count);
        return;
    }
    for i in 0..reals.len() {
        if ri[..slot].contains(&i) {
            continue;
        }
        // prune on boxes whose slot interval holds this zero
        if !b.boxes().iter().any(|bx| bx.reals[slot].contains(reals[i])) {
            continue;
        }
        ri[slot] = i;
        choose_reals(reals, uppers, b, slot + 1, ri, ui, count);
    }
}

fn choose_uppers(
    reals: &[f64],
    uppers: &[Complex],
    b: &Region,
    slot: usize,
    ri: &[usize],
    ui: &mut [usize],
    count: &mut u64,
) {
    if slot == ui.len() {
        let hit = b.boxes().iter().any(|bx| {
            bx.reals.iter().zip(ri).all(|(iv, &i)| iv.contains(reals[i]))
                && bx.uppers.iter().zip(ui.iter()).all(|(r, &j)| r.contains(uppers[j]))
        });
        if hit {
            *count += 1;
        }
        return;
    }
    for j in 0..uppers.len() {
        if ui[..slot].contains(&j) {
            continue;
        }
        ui[slot] = j;
        choose_uppers(reals, uppers, b, slot + 1, ri, ui, count);
    }
}

/// Φ(Q, B) with default options.
pub fn phi_count(h: &WeightedHeight, q: f64, b: &Region) -> Result<CountReport> {
    phi_count_with(h, q, b, CountOptions::default())
}

/// Φ(Q, B): ordered tuples of distinct conjugates in B summed over the
/// prime polynomials of height at most Q.
///
/// Only a_n > 0 is scanned. Negation preserves reducibility and the height,
/// so the scanned and reducible tallies are doubled.
pub fn phi_count_with(h: &WeightedHeight, q: f64, b: &Region, opts: CountOptions) -> Result<CountReport> {
    check_degree(h)?;
    b.check_degree(h.n())?;
    let start = Instant::now();
    let n = h.n();
    let mut report = par_fold(
        h,
        q,
        true,
        || CountReport::empty(q),
        |acc, c| {
            acc.total_scanned += 1;
            let p = IntPoly::new(c.to_vec()).expect("leading coefficient is non-zero");
            let verdict = match intarith::is_prime_poly(&p) {
                Ok(v) => v,
                Err(_) => {
                    acc.failures += 1;
                    return;
                }
            };
            if !verdict.irreducible {
                acc.reducible_count += 1;
            }
            if !verdict.prime {
                return;
            }
            acc.primes_scanned += 1;
            match find_roots(&p.to_real(), opts.real_tol) {
                Ok(r) if r.count() == n => acc.tally(tuple_count(&r.reals, &r.uppers, b)),
                _ => acc.failures += 1,
            }
        },
        CountReport::merge,
    )?;
    report.total_scanned *= 2;
    report.reducible_count *= 2;
    report.runtime_s = start.elapsed().as_secs_f64();
    Ok(report)
}

/// χ_{n,l}: the power of log Q in the convergence-rate envelope.
pub fn chi(n: usize, l: usize) -> i32 {
    i32::from(n == 2 && l == 0)
}

/// One row of a convergence table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub q: f64,
    pub phi: u64,
    pub phi_over_qn1: f64,
    pub limit: f64,
    /// phi_over_qn1 − limit.
    pub deviation: f64,
    pub reducible_count: u64,
    pub runtime_s: f64,
    /// |deviation| · Q / log^χ Q.
    pub envelope_constant: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceTable {
    pub rows: Vec<ConvergenceRow>,
    pub limit: f64,
    pub limit_error: f64,
    pub chi: i32,
    /// Smallest C with |deviation| ≤ C log^χ Q / Q on every row.
    pub fitted_constant: f64,
}

/// Φ(Q, B)/Q^{n+1} against the limit Vol/(2ζ(n+1)) ∫_B ρ over a list of Q.
pub fn convergence_table(
    h: &WeightedHeight,
    b: &Region,
    q_list: &[f64],
    opts: &IntegrationOptions,
) -> Result<ConvergenceTable> {
    if q_list.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::Domain("Q list must be ascending".into()));
    }
    let lim = density::limit_integral(h, b, opts)?;
    let n = h.n();
    let chi = chi(n, b.l());
    let wmin = h.weights().iter().copied().fold(f64::INFINITY, f64::min);
    let mut rows = Vec::new();
    for &q in q_list.iter().filter(|&&q| q >= wmin) {
        let r = phi_count(h, q, b)?;
        if r.failures > 0 {
            return Err(Error::Domain(format!(
                "root finding failed on {} prime polynomials at Q = {q}",
                r.failures
            )));
        }
        let ratio = r.phi as f64 / q.powi(n as i32 + 1);
        let dev = ratio - lim.value;
        let envelope = q.ln().max(1.0).powi(chi) / q;
        rows.push(ConvergenceRow {
            q,
            phi: r.phi,
            phi_over_qn1: ratio,
            limit: lim.value,
            deviation: dev,
            reducible_count: r.reducible_count,
            runtime_s: r.runtime_s,
            envelope_constant: dev.abs() / envelope,
        });
    }
    let fitted = rows.iter().map(|r| r.envelope_constant).fold(0.0, f64::max);
    Ok(ConvergenceTable {
        rows,
        limit: lim.value,
        limit_error: lim.error_estimate,
        chi,
        fitted_constant: fitted,
    })
}

/// The limit value Vol(B_{p,w}) / (2ζ(n+1)) · ∫_B ρ, as used by the table.
pub fn limit_prefactor(h: &WeightedHeight) -> Result<f64> {
    Ok(h.ball_volume() / (2.0 * zeta(h.n() as u32 + 1)?))
}

/// Write a convergence table as CSV with a trailing metadata comment.
pub fn write_table_csv<W: Write>(t: &ConvergenceTable, mut w: W) -> Result<()> {
    writeln!(w, "Q,phi,phi_over_Qn1,limit,deviation,reducible_count,runtime_s")?;
    for r in &t.rows {
        writeln!(
            w,
            "{},{},{:.10e},{:.10e},{:.6e},{},{:.3}",
            r.q, r.phi, r.phi_over_qn1, r.limit, r.deviation, r.reducible_count, r.runtime_s
        )?;
    }
    writeln!(
        w,
        "# limit_error={:.3e} chi={} fitted_envelope_constant={:.6e}",
        t.limit_error, t.chi, t.fitted_constant
    )?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::region::{Interval, Rect, RegionBox};

    fn h(n: usize, p: PNorm) -> WeightedHeight {
        WeightedHeight::unweighted(n, p).unwrap()
    }

    #[test]
    fn height_ball_examples() {
        assert_eq!(enumerate_height_ball(&h(1, PNorm::Infinity), 1.0).unwrap().len(), 6);
        let l1 = enumerate_height_ball(&h(1, PNorm::Finite(1.0)), 1.0).unwrap();
        let c: Vec<_> = l1.iter().map(|p| p.coeffs().to_vec()).collect();
        assert_eq!(c, vec![vec![0, -1], vec![0, 1]]);
        assert_eq!(enumerate_height_ball(&h(2, PNorm::Infinity), 1.0).unwrap().len(), 18);
        // below the smallest weight nothing has a nonzero leading coefficient
        assert!(enumerate_height_ball(&h(2, PNorm::Infinity), 0.9).unwrap().is_empty());
    }

    /// Brute force over the enclosing box as the oracle.
    fn brute_ball(h: &WeightedHeight, q: f64) -> Vec<Vec<i64>> {
        let n = h.n();
        let r: Vec<i64> = h.weights().iter().map(|w| (q / w).floor() as i64).collect();
        let mut out = Vec::new();
        let mut c = vec![0i64; n + 1];
        fn rec(i: usize, r: &[i64], c: &mut Vec<i64>, h: &WeightedHeight, q: f64, out: &mut Vec<Vec<i64>>) {
            if i == c.len() {
                if c[c.len() - 1] != 0 && h.lp_norm_int(c).unwrap() <= q * (1.0 + 1e-12) {
                    out.push(c.clone());
                }
                return;
            }
            for a in -r[i]..=r[i] {
                c[i] = a;
                rec(i + 1, r, c, h, q, out);
            }
        }
        rec(0, &r, &mut c, h, q, &mut out);
        out.sort();
        out
    }

    #[test]
    fn height_ball_matches_brute_force() {
        let cases = [
            (WeightedHeight::unweighted(2, PNorm::Finite(1.0)).unwrap(), 4.0),
            (WeightedHeight::unweighted(2, PNorm::Finite(2.0)).unwrap(), 5.0),
            (WeightedHeight::unweighted(3, PNorm::Finite(3.0)).unwrap(), 3.0),
            (WeightedHeight::bombieri(3, PNorm::Finite(2.0)).unwrap(), 3.0),
            (WeightedHeight::new(vec![1.0, 0.5, 2.0], PNorm::Infinity).unwrap(), 3.0),
        ];
        for (h, q) in cases {
            let mut got: Vec<_> = enumerate_height_ball(&h, q)
                .unwrap()
                .iter()
                .map(|p| p.coeffs().to_vec())
                .collect();
            got.sort();
            assert_eq!(got, brute_ball(&h, q), "{h:?} Q={q}");
        }
    }

    #[test]
    fn prime_examples() {
        let pr = enumerate_prime(&h(1, PNorm::Infinity), 1.0).unwrap();
        let c: Vec<_> = pr.iter().map(|p| p.coeffs().to_vec()).collect();
        assert_eq!(c, vec![vec![-1, 1], vec![0, 1], vec![1, 1]]);
        // n = 2, Q = 1 by hand: z^2 ± z ± 1 except none factor, z^2 + 1;
        // z^2 - 1, z^2, z^2 ± z factor.
        let pr2 = enumerate_prime(&h(2, PNorm::Infinity), 1.0).unwrap();
        let mut c2: Vec<_> = pr2.iter().map(|p| p.coeffs().to_vec()).collect();
        c2.sort();
        assert_eq!(
            c2,
            vec![
                vec![-1, -1, 1],
                vec![-1, 1, 1],
                vec![1, -1, 1],
                vec![1, 0, 1],
                vec![1, 1, 1]
            ]
        );
    }

    #[test]
    fn degree_one_primes_are_primitive_positive() {
        let hh = h(1, PNorm::Infinity);
        for p in enumerate_height_ball(&hh, 6.0).unwrap() {
            let c = p.coeffs();
            let expect = c[1] > 0 && gcd(c[0], c[1]) == 1;
            assert_eq!(intarith::is_prime_poly(&p).unwrap().prime, expect, "{p}");
        }
    }

    fn gcd(a: i64, b: i64) -> i64 {
        if b == 0 {
            a.abs()
        } else {
            gcd(b, a % b)
        }
    }

    #[test]
    fn phi_examples() {
        let hh = h(1, PNorm::Infinity);
        let all = Region::interval(f64::NEG_INFINITY, f64::INFINITY).unwrap();
        let r = phi_count(&hh, 1.0, &all).unwrap();
        assert_eq!((r.phi, r.primes_scanned, r.total_scanned), (3, 3, 6));
        let unit = Region::interval(0.0, 1.0).unwrap();
        assert_eq!(phi_count(&hh, 1.0, &unit).unwrap().phi, 2);
    }

    #[test]
    fn quadratic_formula_oracle() {
        let hh = h(2, PNorm::Infinity);
        let b = Region::rect(-2.0, 2.0, 0.0, 2.0).unwrap();
        for q in [1.0, 2.0, 3.0, 5.0] {
            let r = q as i64;
            let mut expect = 0;
            for a in 1..=r {
                for bb in -r..=r {
                    for c in -r..=r {
                        let p = IntPoly::new(vec![c, bb, a]).unwrap();
                        if !intarith::is_prime_poly(&p).unwrap().prime {
                            continue;
                        }
                        let disc = bb * bb - 4 * a * c;
                        if disc < 0 {
                            let re = -(bb as f64) / (2.0 * a as f64);
                            let im = ((-disc) as f64).sqrt() / (2.0 * a as f64);
                            if re.abs() <= 2.0 && im <= 2.0 {
                                expect += 1;
                            }
                        }
                    }
                }
            }
            let got = phi_count(&hh, q, &b).unwrap();
            assert_eq!(got.phi, expect, "Q={q}");
            assert_eq!(got.failures, 0);
        }
    }

    #[test]
    fn exchange_identity() {
        let hh = h(2, PNorm::Infinity);
        let b = Region::interval(-1.0, 2.0).unwrap();
        for q in 1..=10 {
            let r = phi_count(&hh, q as f64, &b).unwrap();
            let s: u64 = r.histogram.iter().enumerate().map(|(m, c)| m as u64 * c).sum();
            assert_eq!(s, r.phi);
            assert_eq!(r.histogram.iter().sum::<u64>(), r.primes_scanned);
        }
    }

    #[test]
    fn monotone_and_additive() {
        let hh = h(2, PNorm::Finite(2.0));
        let left = Region::interval(-1.0, 0.0).unwrap();
        let right = Region::interval(0.0, 1.5).unwrap();
        let both = Region::interval(-1.0, 1.5).unwrap();
        let mut prev = 0;
        for q in [2.0, 4.0, 6.0, 8.0] {
            let a = phi_count(&hh, q, &left).unwrap().phi;
            let b = phi_count(&hh, q, &right).unwrap().phi;
            let c = phi_count(&hh, q, &both).unwrap().phi;
            // irrational zeros never sit on the shared endpoint 0
            assert_eq!(a + b, c);
            assert!(c >= prev);
            prev = c;
        }
        // a two-box region counts the union
        let two = Region::new(
            1,
            0,
            vec![
                RegionBox::new(vec![Interval::new(-1.0, 0.0).unwrap()], vec![]),
                RegionBox::new(vec![Interval::new(0.0, 1.5).unwrap()], vec![]),
            ],
        )
        .unwrap();
        assert_eq!(phi_count(&hh, 8.0, &two).unwrap().phi, prev);
    }

    #[test]
    fn conjugate_symmetry() {
        // upper zeros in B are in bijection with lower zeros in conj(B)
        let hh = h(3, PNorm::Infinity);
        let b = Region::rect(-0.5, 1.0, 0.2, 1.5).unwrap();
        let direct = phi_count(&hh, 4.0, &b).unwrap().phi;
        // count by hand over all zeros in the lower half box conj(B)
        let mut via_lower = 0;
        for p in enumerate_prime(&hh, 4.0).unwrap() {
            let r = crate::roots::find_roots(&p.to_real(), DEFAULT_REAL_TOL).unwrap();
            for z in &r.uppers {
                let w = z.conj();
                if (-0.5..=1.0).contains(&w.re) && (-1.5..=-0.2).contains(&w.im) {
                    via_lower += 1;
                }
            }
        }
        assert_eq!(direct, via_lower);
        assert!(direct > 0);
    }

    #[test]
    fn mixed_tuples() {
        // k = 1, l = 1 on cubics: each prime with one real zero in [−2, 2] and
        // its upper zero in the box contributes exactly one ordered tuple.
        let hh = h(3, PNorm::Infinity);
        let b = Region::new(
            1,
            1,
            vec![RegionBox::new(
                vec![Interval::new(-2.0, 2.0).unwrap()],
                vec![Rect::new(Interval::new(-2.0, 2.0).unwrap(), Interval::new(0.0, 2.0).unwrap()).unwrap()],
            )],
        )
        .unwrap();
        let r = phi_count(&hh, 3.0, &b).unwrap();
        assert!(r.histogram.len() <= 2);
        let mut expect = 0;
        for p in enumerate_prime(&hh, 3.0).unwrap() {
            let z = crate::roots::find_roots(&p.to_real(), DEFAULT_REAL_TOL).unwrap();
            if z.reals.len() == 1 && z.reals[0].abs() <= 2.0 && z.uppers[0].re.abs() <= 2.0 && z.uppers[0].im <= 2.0 {
                expect += 1;
            }
        }
        assert_eq!(r.phi, expect);
    }

    #[test]
    fn ordered_tuples_of_distinct_zeros() {
        let b = Region::new(
            2,
            0,
            vec![RegionBox::new(
                vec![Interval::real_line(), Interval::real_line()],
                vec![],
            )],
        )
        .unwrap();
        assert_eq!(tuple_count(&[0.0, 1.0, 2.0], &[], &b), 6);
        assert_eq!(tuple_count(&[0.0], &[], &b), 0);
    }

    #[test]
    fn reducible_census_bounded() {
        let hh = h(3, PNorm::Infinity);
        let b = Region::interval(0.0, 1.0).unwrap();
        let ratios: Vec<f64> = [4.0, 8.0, 12.0]
            .iter()
            .map(|&q| phi_count(&hh, q, &b).unwrap().reducible_count as f64 / q.powi(3))
            .collect();
        let max = ratios.iter().copied().fold(0.0, f64::max);
        let min = ratios.iter().copied().fold(f64::INFINITY, f64::min);
        assert!(max / min < 3.0, "{ratios:?}");
    }

    #[test]
    fn reducible_census_matches_brute_force() {
        let hh = h(2, PNorm::Finite(1.0));
        let b = Region::interval(0.0, 1.0).unwrap();
        let r = phi_count(&hh, 5.0, &b).unwrap();
        let all = enumerate_height_ball(&hh, 5.0).unwrap();
        let red = all.iter().filter(|p| !intarith::is_irreducible(p).unwrap()).count() as u64;
        assert_eq!(r.total_scanned, all.len() as u64);
        assert_eq!(r.reducible_count, red);
    }

    #[test]
    fn degree_guard() {
        let hh = h(7, PNorm::Infinity);
        let b = Region::interval(0.0, 1.0).unwrap();
        assert!(matches!(phi_count(&hh, 1.0, &b), Err(Error::Unsupported(_))));
        let big = h(3, PNorm::Infinity);
        assert!(matches!(enumerate_height_ball(&big, 1e3), Err(Error::Resource { .. })));
    }
}
