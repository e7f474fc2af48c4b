//! The acceptance suite A1–A9: each criterion runs end to end and reports a
//! single pass/fail line.

use std::f64::consts::PI;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::counting::{self, CountOptions};
use crate::density::{self, DensityQuery};
use crate::error::Result;
use crate::heights::{PNorm, WeightedHeight};
use crate::lattice::{self, BoxRegion};
use crate::mcsim::{self, Source};
use crate::numerics::{zeta, IntegrationOptions, RngStream};
use crate::poly::{Complex, RootConfiguration};
use crate::region::{Interval, Region, RegionBox};
use crate::roots::DEFAULT_REAL_TOL;

/// Work level for the suite.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Budget {
    /// The sizes the criteria are stated at.
    Full,
    /// Reduced draws and configuration counts for a fast smoke run.
    Quick,
}

impl Budget {
    fn pick<T>(self, full: T, quick: T) -> T {
        match self {
            Budget::Full => full,
            Budget::Quick => quick,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CriterionResult {
    pub id: &'static str,
    pub passed: bool,
    pub detail: String,
    pub runtime_s: f64,
    /// Runtime ceiling for the criterion at full budget.
    pub time_limit_s: f64,
}

impl CriterionResult {
    /// `A1 PASS ...` style summary.
    pub fn line(&self) -> String {
        format!(
            "{} {} {} [{:.1}s]",
            self.id,
            if self.passed { "PASS" } else { "FAIL" },
            self.detail,
            self.runtime_s
        )
    }
}

fn ones(n: usize, p: PNorm) -> WeightedHeight {
    WeightedHeight::unweighted(n, p).expect("valid height")
}

fn timed(
    id: &'static str,
    time_limit_s: f64,
    budget: Budget,
    f: impl FnOnce() -> Result<(bool, String)>,
) -> CriterionResult {
    let start = Instant::now();
    let (passed, detail) = match f() {
        Ok(r) => r,
        Err(e) => (false, format!("error: {e}")),
    };
    let runtime_s = start.elapsed().as_secs_f64();
    // time limits are stated for the full budget only
    let on_time = budget == Budget::Quick || runtime_s <= time_limit_s;
    CriterionResult {
        id,
        passed: passed && on_time,
        detail: if on_time {
            detail
        } else {
            format!("{detail}; over the {time_limit_s}s limit")
        },
        runtime_s,
        time_limit_s,
    }
}

/// Independent oracle for the n = 1 Farey case: pairs (a_0, a_1) with
/// a_1 > 0, gcd 1, max(|a_0|, a_1) ≤ Q and −a_0/a_1 ∈ [0, 1].
pub fn farey_oracle(q: i64) -> u64 {
    fn gcd(a: i64, b: i64) -> i64 {
        if b == 0 {
            a.abs()
        } else {
            gcd(b, a % b)
        }
    }
    let mut count = 0;
    for a1 in 1..=q {
        for a0 in -a1..=0 {
            if gcd(a0, a1) == 1 {
                count += 1;
            }
        }
    }
    count
}

/// A1: Φ(Q, [0, 1])/Q² against 3/π² for n = 1, p = ∞ at Q = 200.
pub fn a1(budget: Budget) -> CriterionResult {
    timed("A1", 5.0, budget, || {
        let h = ones(1, PNorm::Infinity);
        let b = Region::interval(0.0, 1.0)?;
        let q = 200.0;
        let r = counting::phi_count(&h, q, &b)?;
        let loose = counting::phi_count_with(
            &h,
            q,
            &b,
            CountOptions {
                real_tol: 10.0 * DEFAULT_REAL_TOL,
            },
        )?;
        let oracle = farey_oracle(200);
        let target = 3.0 / (PI * PI);
        let ratio = r.phi as f64 / (q * q);
        let rel = (ratio - target).abs() / target;
        let ok = rel <= 0.02 && r.phi == oracle && loose.phi == r.phi && r.failures == 0;
        Ok((
            ok,
            format!(
                "phi/Q^2={ratio:.5} limit={target:.5} rel={rel:.2e} (tol 2e-2); phi={} oracle={oracle}",
                r.phi
            ),
        ))
    })
}

/// A2: n = 2, p = ∞, B = [0, 1] at Q ∈ {10, …, 50} against the limit and the
/// C log Q / Q envelope.
pub fn a2(budget: Budget) -> CriterionResult {
    timed("A2", 600.0, budget, || {
        let h = ones(2, PNorm::Infinity);
        let b = Region::interval(0.0, 1.0)?;
        let qs = [10.0, 20.0, 30.0, 40.0, 50.0];
        let opts = IntegrationOptions::default().with_tol(1e-8, 1e-6);
        let t = counting::convergence_table(&h, &b, &qs, &opts)?;
        let last = t.rows.last().expect("non-empty table");
        let rel = last.deviation.abs() / t.limit;
        let loose = counting::phi_count_with(
            &h,
            50.0,
            &b,
            CountOptions {
                real_tol: 10.0 * DEFAULT_REAL_TOL,
            },
        )?;
        let tail: Vec<f64> = t.rows[2..].iter().map(|r| r.envelope_constant).collect();
        let cmax = tail.iter().copied().fold(0.0, f64::max);
        let cmin = tail.iter().copied().fold(f64::INFINITY, f64::min);
        let stable = cmax <= 2.0 * cmin;
        let ok = rel <= 0.05 && stable && loose.phi == last.phi;
        let cs: Vec<String> = t.rows.iter().map(|r| format!("{:.3}", r.envelope_constant)).collect();
        Ok((
            ok,
            format!(
                "phi/Q^3={:.5} limit={:.5} rel={rel:.2e} (tol 5e-2); C(Q)=[{}] tail ratio {:.2} (tol 2)",
                last.phi_over_qn1,
                t.limit,
                cs.join(", "),
                cmax / cmin
            ),
        ))
    })
}

/// Random configuration for the stratum (k, l).
fn random_config<R: Rng>(rng: &mut R, k: usize, l: usize) -> RootConfiguration {
    let reals = (0..k).map(|_| rng.random_range(-2.0..2.0)).collect();
    let uppers = (0..l)
        .map(|_| Complex::new(rng.random_range(-2.0..2.0), rng.random_range(0.1..2.0)))
        .collect();
    RootConfiguration::new(reals, uppers).expect("upper points have im > 0")
}

fn heights_grid(n: usize) -> Vec<WeightedHeight> {
    let mut out = Vec::new();
    for p in [PNorm::Finite(1.0), PNorm::Finite(2.0), PNorm::Infinity] {
        out.push(ones(n, p));
        out.push(WeightedHeight::bombieri(n, p).expect("valid height"));
    }
    out
}

/// A3: closed form against the one-dimensional quadrature on every top
/// stratum for n ≤ 3.
pub fn a3(budget: Budget) -> CriterionResult {
    timed("A3", 300.0, budget, || {
        let per = budget.pick(20, 5);
        let mut jobs = Vec::new();
        for n in 1..=3usize {
            for h in heights_grid(n) {
                for l in 0..=n / 2 {
                    jobs.push((h.clone(), n - 2 * l, l));
                }
            }
        }
        let opts = IntegrationOptions::default();
        let outcomes: Vec<Result<(usize, f64)>> = jobs
            .par_iter()
            .enumerate()
            .map(|(j, (h, k, l))| {
                let mut rng = ChaCha8Rng::seed_from_u64(1000 + j as u64);
                let mut bad = 0;
                let mut worst = 0.0f64;
                for _ in 0..per {
                    let q = DensityQuery::new(h.clone(), random_config(&mut rng, *k, *l))?;
                    let closed = density::rho_closed_top(&q)?;
                    let quad = density::rho_general(&q, &opts)?;
                    let diff = (quad.value - closed).abs();
                    worst = worst.max(diff);
                    if diff > 1e-6f64.max(3.0 * quad.error_estimate) {
                        bad += 1;
                    }
                }
                Ok((bad, worst))
            })
            .collect();
        let mut bad = 0;
        let mut worst = 0.0f64;
        for o in outcomes {
            let (b, w) = o?;
            bad += b;
            worst = worst.max(w);
        }
        let total = jobs.len() * per;
        Ok((
            bad == 0,
            format!("{total} configurations, {bad} outside max(1e-6, 3 err); worst |diff|={worst:.2e}"),
        ))
    })
}

/// A4: Edelman–Kostlan density √n/(π(1+x²)) for Bombieri weights, p = 2.
pub fn a4(budget: Budget) -> CriterionResult {
    timed("A4", 120.0, budget, || {
        let opts = IntegrationOptions::default();
        let mut worst = 0.0f64;
        let mut ok = true;
        for n in [2usize, 3] {
            let h = WeightedHeight::bombieri(n, PNorm::Finite(2.0))?;
            for x in [0.0, 0.5, 1.0, 2.0] {
                let q = DensityQuery::new(h.clone(), RootConfiguration::new(vec![x], vec![])?)?;
                let r = density::rho_general(&q, &opts)?;
                let exact = (n as f64).sqrt() / (PI * (1.0 + x * x));
                let rel = (r.value - exact).abs() / exact;
                worst = worst.max(rel);
                ok &= rel <= 1e-3;
            }
        }
        Ok((ok, format!("worst relative error {worst:.2e} (tol 1e-3)")))
    })
}

/// A5: binned real-zero density from G and from ball-uniform coefficients
/// against the quadrature density.
pub fn a5(budget: Budget) -> CriterionResult {
    timed("A5", 120.0, budget, || {
        let draws = budget.pick(100_000, 20_000);
        let bins = mcsim::uniform_bins(-3.0, 3.0, 20)?;
        let opts = IntegrationOptions::default().with_tol(1e-7, 1e-5);
        let mut ok = true;
        let mut parts = Vec::new();
        for (i, p) in [PNorm::Finite(2.0), PNorm::Infinity].into_iter().enumerate() {
            let h = ones(2, p);
            let theory: Vec<(f64, f64)> = bins
                .par_iter()
                .map(|b| -> Result<(f64, f64)> {
                    let r = density::integrate_over_region(&h, &Region::interval(b.lo, b.hi)?, &opts)?;
                    Ok((r.value / b.length(), r.error_estimate / b.length()))
                })
                .collect::<Result<_>>()?;
            for (j, source) in [Source::G, Source::Ball].into_iter().enumerate() {
                let rng = RngStream::new(500 + i as u64, j as u64);
                let est = mcsim::empirical_real_density(&h, &bins, draws, &rng, source)?;
                let rows = mcsim::histogram_rows(&est, &theory);
                let z: Vec<f64> = rows.iter().map(|r| r.z).collect();
                let pass = mcsim::z_scores_pass(&z);
                ok &= pass;
                let zmax = z.iter().fold(0.0f64, |m, v| m.max(v.abs()));
                parts.push(format!("p={p} {source:?} max|z|={zmax:.2}"));
            }
        }
        Ok((ok, format!("{} draws; {}", draws, parts.join("; "))))
    })
}

/// A6: probability of n real zeros for the uniform cube, n = 2, and total
/// probability for n ∈ {2, 3}.
pub fn a6(budget: Budget) -> CriterionResult {
    timed("A6", 300.0, budget, || {
        let draws = budget.pick(1_000_000, 200_000);
        let opts = IntegrationOptions::default();
        let h = ones(2, PNorm::Infinity);
        let p0 = density::prob_real_count(&h, 0, &opts)?;
        let mc = mcsim::empirical_real_count_dist(&h, draws, &RngStream::new(600, 0), Source::G)?;
        let freq = mc[2].estimate;
        let rel = (p0.value - freq).abs() / freq;
        let exact = 0.5 + 5.0 / 72.0 + 2f64.ln() / 12.0;
        let band = |v: f64| (v - 0.627).abs() <= 0.005;
        let mut ok = rel <= 0.01 && band(p0.value) && band(freq);
        let mut sums = Vec::new();
        for n in [2usize, 3] {
            for p in [PNorm::Finite(2.0), PNorm::Infinity] {
                let h = ones(n, p);
                let mut total = 0.0;
                let mut err = 0.0;
                for l in 0..=n / 2 {
                    let r = density::prob_real_count(&h, l, &opts)?;
                    total += r.value;
                    err += r.error_estimate;
                }
                let pass = (total - 1.0).abs() <= 1e-6f64.max(3.0 * err);
                ok &= pass;
                sums.push(format!("n={n} p={p}: {total:.7}"));
            }
        }
        Ok((
            ok,
            format!(
                "P(2 real)={:.6} (exact {exact:.6}) MC={freq:.5}±{:.5} rel={rel:.2e}; sums {}",
                p0.value,
                mc[2].std_error,
                sums.join(", ")
            ),
        ))
    })
}

/// A7: coprime points in the cube against 2^d/ζ(d), both counting routes.
pub fn a7(budget: Budget) -> CriterionResult {
    timed("A7", 60.0, budget, || {
        let mut ok = true;
        let mut parts = Vec::new();
        for d in [2usize, 3] {
            let a = BoxRegion::cube(d, 1.0);
            let q = 100.0;
            let direct = lattice::count_coprime_direct(&a, q)?;
            let mobius = lattice::count_coprime_mobius(&a, q)?;
            let target = 2f64.powi(d as i32) / zeta(d as u32)?;
            let ratio = direct as f64 / q.powi(d as i32);
            let rel = (ratio - target).abs() / target;
            ok &= rel <= 0.02 && direct == mobius;
            parts.push(format!(
                "d={d}: ratio={ratio:.5} limit={target:.5} rel={rel:.2e} direct={direct} mobius={mobius}"
            ));
        }
        Ok((ok, parts.join("; ")))
    })
}

/// Hit-rate estimate of the ball volume from a box 1.25 times the
/// enclosing one (so the p = ∞ ball does not fill it).
fn mc_volume(h: &WeightedHeight, points: u64, seed: u64) -> (f64, f64) {
    let half: Vec<f64> = h.weights().iter().map(|w| 1.25 / w).collect();
    let box_vol: f64 = half.iter().map(|r| 2.0 * r).product();
    let chunk = 1u64 << 14;
    let base = RngStream::new(seed, 0);
    let hits: u64 = (0..points.div_ceil(chunk))
        .into_par_iter()
        .map(|c| {
            let mut rng = base.substream(c).rng();
            let mut x = vec![0.0; half.len()];
            let mut k = 0u64;
            for _ in 0..chunk.min(points - c * chunk) {
                for (xi, r) in x.iter_mut().zip(&half) {
                    *xi = rng.random_range(-*r..*r);
                }
                if h.lp_norm(&x).unwrap_or(f64::INFINITY) <= 1.0 {
                    k += 1;
                }
            }
            k
        })
        .sum();
    let f = hits as f64 / points as f64;
    (box_vol * f, box_vol * (f * (1.0 - f) / points as f64).sqrt())
}

/// A8: closed-form ball volume against Monte Carlo.
pub fn a8(budget: Budget) -> CriterionResult {
    timed("A8", 60.0, budget, || {
        let points = budget.pick(1_000_000, 200_000);
        let cases = [
            ones(2, PNorm::Finite(2.0)),
            ones(2, PNorm::Infinity),
            ones(3, PNorm::Finite(1.0)),
            WeightedHeight::bombieri(2, PNorm::Finite(2.0))?,
        ];
        let mut ok = true;
        let mut parts = Vec::new();
        for (i, h) in cases.iter().enumerate() {
            let v = h.ball_volume();
            let (est, se) = mc_volume(h, points, 800 + i as u64);
            let z = (est - v) / se;
            ok &= z.abs() <= 3.0;
            parts.push(format!("n={} p={}: {v:.5} vs {est:.5} z={z:.2}", h.n(), h.p()));
        }
        Ok((ok, parts.join("; ")))
    })
}

/// A9: the identities ρ_{0,1}(z) = 2ρ_2(z, z̄) and ρ_{2,0}(x, y) = ρ_2(x, y),
/// then both against empirical mixed moments on disjoint boxes.
pub fn a9(budget: Budget) -> CriterionResult {
    timed("A9", 120.0, budget, || {
        let draws = budget.pick(400_000, 100_000);
        let h = ones(2, PNorm::Finite(2.0));
        let opts = IntegrationOptions::default();
        let mut ok = true;
        let mut parts = Vec::new();

        let mut rng = ChaCha8Rng::seed_from_u64(900);
        let mut worst = 0.0f64;
        for _ in 0..10 {
            let z = Complex::new(rng.random_range(-2.0..2.0), rng.random_range(0.1..2.0));
            let q = DensityQuery::new(h.clone(), RootConfiguration::new(vec![], vec![z])?)?;
            let lhs = density::rho_general(&q, &opts)?.value;
            let rhs = 2.0 * density::rho_points(&h, &[z, z.conj()])?;
            worst = worst.max((lhs - rhs).abs());
            let (x, y) = (rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
            let q = DensityQuery::new(h.clone(), RootConfiguration::new(vec![x, y], vec![])?)?;
            let lhs = density::rho_general(&q, &opts)?.value;
            let rhs = density::rho_points(&h, &[Complex::new(x, 0.0), Complex::new(y, 0.0)])?;
            worst = worst.max((lhs - rhs).abs());
        }
        ok &= worst <= 1e-8;
        parts.push(format!("identities worst |diff|={worst:.1e}"));

        // real pairs: E[μ(I)μ(J)] = ∫_I∫_J ρ_{2,0}
        let pairs = [((-1.5, -0.5), (0.0, 1.0)), ((-0.4, 0.4), (0.6, 2.5))];
        for (i, (a, b)) in pairs.iter().enumerate() {
            let (ia, ib) = (Interval::new(a.0, a.1)?, Interval::new(b.0, b.1)?);
            let region = Region::new(2, 0, vec![RegionBox::new(vec![ia, ib], vec![])])?;
            let th = density::integrate_over_region(&h, &region, &opts)?;
            let e =
                mcsim::empirical_mixed_moment(&h, &[ia, ib], &[], draws, &RngStream::new(901, i as u64), Source::G)?;
            let z = (e.estimate - th.value) / e.std_error;
            ok &= z.abs() <= 3.0;
            parts.push(format!("pair{i}: {:.5} vs {:.5} z={z:.2}", e.estimate, th.value));
        }
        // upper rectangles: E[μ(R)] = ∫_R ρ_{0,1}
        let rects = [(-1.0, 0.0, 0.2, 1.0), (0.0, 1.5, 0.5, 2.0)];
        for (i, r) in rects.iter().enumerate() {
            let rect = mcsim::rect(r.0, r.1, r.2, r.3)?;
            let th = density::integrate_over_region(&h, &Region::rect(r.0, r.1, r.2, r.3)?, &opts)?;
            let e = mcsim::empirical_mixed_moment(&h, &[], &[rect], draws, &RngStream::new(902, i as u64), Source::G)?;
            let z = (e.estimate - th.value) / e.std_error;
            ok &= z.abs() <= 3.0;
            parts.push(format!("rect{i}: {:.5} vs {:.5} z={z:.2}", e.estimate, th.value));
        }
        Ok((ok, parts.join("; ")))
    })
}

/// Run the criteria in order.
pub fn run_all(budget: Budget) -> Vec<CriterionResult> {
    let all: [fn(Budget) -> CriterionResult; 9] = [a1, a2, a3, a4, a5, a6, a7, a8, a9];
    all.iter().map(|f| f(budget)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn farey_oracle_small() {
        // Q = 1: 0/1 and 1/1
        assert_eq!(farey_oracle(1), 2);
        // Q = 3: 0, 1, 1/2, 1/3, 2/3
        assert_eq!(farey_oracle(3), 5);
    }

    #[test]
    fn mc_volume_disk() {
        let (v, se) = mc_volume(&ones(1, PNorm::Finite(2.0)), 200_000, 1);
        assert!((v - PI).abs() < 4.0 * se);
    }
}
