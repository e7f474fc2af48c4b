//! Limiting correlation densities of conjugate algebraic numbers, which are
//! the zero correlation functions of the random polynomial Σ (η_i / w_i) z^i.

use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::heights::{PNorm, WeightedHeight};
use crate::numerics::{gamma, integrate, Axis, IntegrationOptions, IntegrationResult, Mode};
use crate::poly::{discriminant_from_roots, elem_sym, vandermonde_abs, Complex, RootConfiguration};
use crate::region::{Region, RegionBox};

/// The coefficient laws f_i(t) = w_i/(2Γ(1+1/p)) e^{−|w_i t|^p}, or
/// (w_i/2) 1[|w_i t| ≤ 1] for p = ∞.
#[derive(Debug, Clone)]
pub struct CoefficientDensity {
    h: WeightedHeight,
    /// ∏_i of the normalising factors.
    joint_norm: f64,
}

impl CoefficientDensity {
    pub fn new(h: &WeightedHeight) -> Self {
        let c = match h.p() {
            PNorm::Infinity => 0.5,
            PNorm::Finite(p) => 0.5 / gamma(1.0 + 1.0 / p).expect("positive argument"),
        };
        let joint_norm = h.weights().iter().map(|w| w * c).product();
        Self {
            h: h.clone(),
            joint_norm,
        }
    }

    /// f_i(t).
    pub fn pdf(&self, i: usize, t: f64) -> f64 {
        let x = (self.h.weights()[i] * t).abs();
        let w = self.h.weights()[i];
        match self.h.p() {
            PNorm::Infinity => {
                if x <= 1.0 {
                    0.5 * w
                } else {
                    0.0
                }
            }
            PNorm::Finite(p) => w * 0.5 / gamma(1.0 + 1.0 / p).unwrap() * (-x.powf(p)).exp(),
        }
    }

    /// ∏_i f_i(a_i); `None` outside the support.
    #[inline]
    pub fn joint(&self, a: &[f64]) -> Option<f64> {
        let w = self.h.weights();
        match self.h.p() {
            PNorm::Infinity => {
                if a.iter().zip(w).all(|(x, wi)| (x * wi).abs() <= 1.0) {
                    Some(self.joint_norm)
                } else {
                    None
                }
            }
            PNorm::Finite(p) => {
                let s: f64 = a.iter().zip(w).map(|(x, wi)| (x * wi).abs().powf(p)).sum();
                Some(self.joint_norm * (-s).exp())
            }
        }
    }
}

/// Largest degree the evaluators accept.
pub const MAX_DENSITY_DEGREE: usize = 15;

fn check_n(h: &WeightedHeight) -> Result<()> {
    if h.n() > MAX_DENSITY_DEGREE {
        return Err(Error::Unsupported(format!(
            "density evaluation supports degree <= {MAX_DENSITY_DEGREE}, got {}",
            h.n()
        )));
    }
    Ok(())
}

/// A point at which to evaluate ρ_{k,l}.
#[derive(Debug, Clone)]
pub struct DensityQuery {
    pub h: WeightedHeight,
    pub config: RootConfiguration,
}

impl DensityQuery {
    pub fn new(h: WeightedHeight, config: RootConfiguration) -> Result<Self> {
        check_n(&h)?;
        let m = config.k() + 2 * config.l();
        if m == 0 || m > h.n() {
            return Err(Error::Domain(format!(
                "need 0 < k + 2l <= n, got k + 2l = {m} with n = {}",
                h.n()
            )));
        }
        Ok(Self { h, config })
    }

    pub fn k(&self) -> usize {
        self.config.k()
    }

    pub fn l(&self) -> usize {
        self.config.l()
    }

    fn m(&self) -> usize {
        self.k() + 2 * self.l()
    }
}

/// Coefficients c_0..c_m of ∏ (z − P_i), where c_i = (−1)^{m−i} σ_{m−i}.
fn monic_coeffs(points: &[Complex]) -> Result<Vec<f64>> {
    let sigma = elem_sym(points)?;
    let m = points.len();
    Ok((0..=m)
        .map(|i| {
            if (m - i).is_multiple_of(2) {
                sigma[m - i]
            } else {
                -sigma[m - i]
            }
        })
        .collect())
}

/// Per-axis bounds on t with T·Π inside the box |a_i| ≤ r_i, from dividing
/// by the monic Π from the top and, when Π(0) ≠ 0, from the bottom.
fn t_bounds(c: &[f64], r: &[f64]) -> Vec<f64> {
    let m = c.len() - 1;
    let d = r.len() - m;
    let mut top = vec![0.0; d];
    for j in (0..d).rev() {
        let mut b = r[j + m];
        for s in 1..=m.min(d - 1 - j) {
            b += c[m - s].abs() * top[j + s];
        }
        top[j] = b;
    }
    if c[0].abs() > 1e-300 {
        let mut bot = vec![0.0; d];
        for j in 0..d {
            let mut b = r[j];
            for s in 1..=m.min(j) {
                b += c[s].abs() * bot[j - s];
            }
            bot[j] = b / c[0].abs();
        }
        for (t, b) in top.iter_mut().zip(bot) {
            *t = t.min(b);
        }
    }
    top
}

/// Integration axes for the t variables given Π's coefficients.
fn t_axes(h: &WeightedHeight, c: &[f64]) -> Vec<Axis> {
    let r: Vec<f64> = h.weights().iter().map(|w| 1.0 / w).collect();
    let b = t_bounds(c, &r);
    match h.p() {
        PNorm::Infinity => b.into_iter().map(|x| Axis::Interval(-x, x)).collect(),
        PNorm::Finite(_) => b.into_iter().map(|x| Axis::Line { scale: x }).collect(),
    }
}

#[inline]
fn horner_real(t: &[f64], x: f64) -> f64 {
    t.iter().rev().fold(0.0, |acc, &a| acc * x + a)
}

#[inline]
fn horner_complex(t: &[f64], z: Complex) -> Complex {
    t.iter().rev().fold(Complex::new(0.0, 0.0), |acc, &a| acc * z + a)
}

/// ρ_n at a conjugate-closed set of n points: c_{n,p,w} √|D| / l_{p,w}[q]^{n+1}
/// for the monic q vanishing there.
pub fn rho_points(h: &WeightedHeight, points: &[Complex]) -> Result<f64> {
    check_n(h)?;
    let n = h.n();
    if points.len() != n {
        return Err(Error::Domain(format!("need {n} points, got {}", points.len())));
    }
    let disc = discriminant_from_roots(points)?;
    if disc == 0.0 {
        return Ok(0.0);
    }
    let c = monic_coeffs(points)?;
    let norm = h.lp_norm(&c)?;
    Ok(h.limit_constant_c() * disc.abs().sqrt() / norm.powi(n as i32 + 1))
}

/// The top-stratum closed form 2^l ρ_n(x, z, z̄).
pub fn rho_closed_top(q: &DensityQuery) -> Result<f64> {
    let n = q.h.n();
    if q.m() != n {
        return Err(Error::Domain(format!(
            "the closed form needs k + 2l = n, got {} with n = {n}",
            q.m()
        )));
    }
    Ok(2f64.powi(q.l() as i32) * rho_points(&q.h, &q.config.points())?)
}

/// Coefficient density at T·Π times ∏ |T(x_i)| ∏ |T(z_j)|², with T given by
/// its coefficients `t`; `None` outside the support.
fn cofactor_integrand(
    dens: &CoefficientDensity,
    c: &[f64],
    n: usize,
    config: &RootConfiguration,
    t: &[f64],
) -> Option<f64> {
    let mut a = [0.0f64; 16];
    let a = &mut a[..=n];
    for (j, tj) in t.iter().enumerate() {
        for (i, ci) in c.iter().enumerate() {
            a[i + j] += tj * ci;
        }
    }
    let base = dens.joint(a)?;
    let mut kernel = 1.0;
    for &x in &config.reals {
        kernel *= horner_real(t, x).abs();
    }
    for &z in &config.uppers {
        kernel *= horner_complex(t, z).norm_sqr();
    }
    Some(base * kernel)
}

/// ρ_{k,l} at the query point as 2^l V̄(x, z, z̄) times an integral over the
/// n − k − 2l + 1 coefficients of the cofactor T of ∏ (z − P_i).
pub fn rho_general(q: &DensityQuery, opts: &IntegrationOptions) -> Result<IntegrationResult> {
    let points = q.config.points();
    let v = vandermonde_abs(&points);
    if v == 0.0 {
        return Ok(IntegrationResult::exact(0.0));
    }
    let c = monic_coeffs(&points)?;
    let n = q.h.n();
    let m = q.m();
    let dens = CoefficientDensity::new(&q.h);
    let f = |t: &[f64]| cofactor_integrand(&dens, &c, n, &q.config, t);
    debug_assert_eq!(t_axes(&q.h, &c).len(), n - m + 1);
    let r = integrate(&f, &t_axes(&q.h, &c), opts)?;
    Ok(r.scale(2f64.powi(q.l() as i32) * v))
}

/// ρ_{1,0}(x) = ∫_{R^n} ∏_i f_i(t_{i−1} − x t_i) |Σ_j t_j x^j| dt, with
/// t_{−1} = t_n = 0.
pub fn rho_real_density(h: &WeightedHeight, x: f64, opts: &IntegrationOptions) -> Result<IntegrationResult> {
    check_n(h)?;
    let n = h.n();
    let dens = CoefficientDensity::new(h);
    let f = |t: &[f64]| -> Option<f64> {
        let at = |i: isize| if i < 0 || i as usize >= n { 0.0 } else { t[i as usize] };
        let mut a = [0.0f64; 16];
        for (i, ai) in a.iter_mut().enumerate().take(n + 1) {
            *ai = at(i as isize - 1) - x * at(i as isize);
        }
        Some(dens.joint(&a[..=n])? * horner_real(t, x).abs())
    };
    integrate(&f, &t_axes(h, &[-x, 1.0]), opts)
}

/// ρ_{0,1}(z) = 4 |Im z| ∫_{R^{n−1}} ∏_i f_i(t_{i−2} − 2 t_{i−1} Re z + t_i |z|²)
/// |Σ_j t_j z^j|² dt.
pub fn rho_complex_density(h: &WeightedHeight, z: Complex, opts: &IntegrationOptions) -> Result<IntegrationResult> {
    check_n(h)?;
    let n = h.n();
    if n < 2 {
        return Err(Error::Domain("complex zeros need degree >= 2".into()));
    }
    if z.im < 0.0 {
        return Err(Error::Domain(format!("{z} is not in the upper half-plane")));
    }
    if z.im == 0.0 {
        return Ok(IntegrationResult::exact(0.0));
    }
    let dens = CoefficientDensity::new(h);
    let (s1, s2) = (2.0 * z.re, z.norm_sqr());
    let f = |t: &[f64]| -> Option<f64> {
        let at = |i: isize| {
            if i < 0 || i as usize >= n - 1 {
                0.0
            } else {
                t[i as usize]
            }
        };
        let mut a = [0.0f64; 16];
        for i in 0..=n {
            let i = i as isize;
            a[i as usize] = at(i - 2) - s1 * at(i - 1) + s2 * at(i);
        }
        Some(dens.joint(&a[..=n])? * horner_complex(t, z).norm_sqr())
    };
    let r = integrate(&f, &t_axes(h, &[s2, -s1, 1.0]), opts)?;
    Ok(r.scale(4.0 * z.im))
}

/// Axes for the k real and l complex (re, im) coordinates of a box.
fn box_axes(b: &RegionBox) -> Vec<Axis> {
    let mut axes: Vec<Axis> = b.reals.iter().map(|iv| Axis::from_bounds(iv.lo, iv.hi, 1.0)).collect();
    for r in &b.uppers {
        axes.push(Axis::from_bounds(r.re.lo, r.re.hi, 1.0));
        axes.push(Axis::from_bounds(r.im.lo, r.im.hi, 1.0));
    }
    axes
}

/// Split flat box coordinates into a configuration; `None` when an upper
/// coordinate sits on the real axis, where ρ vanishes.
fn config_from(k: usize, coords: &[f64]) -> Option<RootConfiguration> {
    let reals = coords[..k].to_vec();
    let uppers: Vec<Complex> = coords[k..].chunks(2).map(|c| Complex::new(c[0], c[1])).collect();
    if uppers.iter().any(|z| z.im <= 0.0) {
        return None;
    }
    RootConfiguration::new(reals, uppers).ok()
}

/// ∫_B ρ_{k,l}. Top strata integrate the closed form; otherwise the box and
/// the cofactor coefficients form one (n + 1)-dimensional integral.
pub fn integrate_over_region(h: &WeightedHeight, b: &Region, opts: &IntegrationOptions) -> Result<IntegrationResult> {
    check_n(h)?;
    b.check_degree(h.n())?;
    let (k, l) = (b.k(), b.l());
    let dim = k + 2 * l;
    let top = dim == h.n();
    let dens = CoefficientDensity::new(h);
    let radii: Vec<f64> = h.weights().iter().map(|w| 1.0 / w).collect();
    let scale = 2f64.powi(l as i32);
    let mut total = IntegrationResult::exact(0.0);
    for bx in b.boxes() {
        let axes = box_axes(bx);
        let r = if top {
            let f = |x: &[f64]| -> Option<f64> {
                let Some(config) = config_from(k, x) else {
                    return Some(0.0);
                };
                let q = DensityQuery { h: h.clone(), config };
                rho_closed_top(&q).ok().or(Some(f64::NAN))
            };
            integrate(&f, &axes, opts)?
        } else {
            // t = s(P) ⊙ τ with s the per-point t bounds, so B × τ is one
            // fixed product domain
            let dt = h.n() - dim + 1;
            let tau = match h.p() {
                PNorm::Infinity => Axis::Interval(-1.0, 1.0),
                PNorm::Finite(_) => Axis::Line { scale: 1.0 },
            };
            let mut all = axes;
            all.extend(std::iter::repeat_n(tau, dt));
            let f = |y: &[f64]| -> Option<f64> {
                let Some(config) = config_from(k, &y[..dim]) else {
                    return Some(0.0);
                };
                let points = config.points();
                let v = vandermonde_abs(&points);
                if v == 0.0 {
                    return Some(0.0);
                }
                let Ok(c) = monic_coeffs(&points) else {
                    return Some(f64::NAN);
                };
                let s = t_bounds(&c, &radii);
                let mut t = [0.0f64; 16];
                for j in 0..dt {
                    t[j] = s[j] * y[dim + j];
                }
                let jac: f64 = s.iter().product();
                cofactor_integrand(&dens, &c, h.n(), &config, &t[..dt]).map(|g| scale * v * jac * g)
            };
            // the p = ∞ support edge cuts through the joint domain, where the
            // adaptive error floor is far more pessimistic than randomized QMC
            let mut o = *opts;
            if h.p().is_infinite() && matches!(o.mode, Mode::Auto) {
                o.mode = Mode::QuasiRandom;
            }
            integrate(&f, &all, &o)?
        };
        total = total.combine(r);
    }
    Ok(total)
}

/// Vol(B_{p,w}) / (2ζ(n+1)) · ∫_B ρ.
pub fn limit_integral(h: &WeightedHeight, b: &Region, opts: &IntegrationOptions) -> Result<IntegrationResult> {
    let pre = crate::counting::limit_prefactor(h)?;
    Ok(integrate_over_region(h, b, opts)?.scale(pre))
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

/// Probability that the random polynomial has exactly n − 2l real zeros:
/// the closed-form top-stratum density integrated over R^{n−2l} × C_+^l and
/// divided by l! (n−2l)!.
pub fn prob_real_count(h: &WeightedHeight, l: usize, opts: &IntegrationOptions) -> Result<IntegrationResult> {
    check_n(h)?;
    let n = h.n();
    if 2 * l > n {
        return Err(Error::Domain(format!("2l = {} exceeds n = {n}", 2 * l)));
    }
    let k = n - 2 * l;
    let mut axes = vec![Axis::Line { scale: 1.0 }; k];
    for _ in 0..l {
        axes.push(Axis::Line { scale: 1.0 });
        axes.push(Axis::HalfLine { lo: 0.0, scale: 1.0 });
    }
    let f = |x: &[f64]| -> Option<f64> {
        let Some(config) = config_from(k, x) else {
            return Some(0.0);
        };
        let q = DensityQuery { h: h.clone(), config };
        rho_closed_top(&q).ok().or(Some(f64::NAN))
    };
    Ok(integrate(&f, &axes, opts)?.scale(1.0 / (factorial(l) * factorial(k))))
}

/// One point of a density curve.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityRow {
    /// x for real densities, (re, im) for complex ones.
    pub at: Vec<f64>,
    pub rho: f64,
    pub err: f64,
    pub method: &'static str,
}

/// ρ_{1,0} on a grid of real points, or ρ_{0,1} on a grid of upper points.
pub fn density_curve(
    h: &WeightedHeight,
    k: usize,
    l: usize,
    grid: &[Vec<f64>],
    opts: &IntegrationOptions,
) -> Result<Vec<DensityRow>> {
    let n = h.n();
    grid.par_iter()
        .map(|pt| -> Result<DensityRow> {
            let config = match (k, l) {
                (1, 0) => RootConfiguration::new(vec![pt[0]], vec![])?,
                (0, 1) => {
                    let z = Complex::new(pt[0], pt[1]);
                    if z.im == 0.0 {
                        return Ok(DensityRow {
                            at: pt.clone(),
                            rho: 0.0,
                            err: 0.0,
                            method: "boundary",
                        });
                    }
                    RootConfiguration::new(vec![], vec![z])?
                }
                _ => return Err(Error::Usage("density curves support (k, l) = (1, 0) or (0, 1)".into())),
            };
            let q = DensityQuery::new(h.clone(), config)?;
            if k + 2 * l == n {
                Ok(DensityRow {
                    at: pt.clone(),
                    rho: rho_closed_top(&q)?,
                    err: 0.0,
                    method: "closed",
                })
            } else {
                let r = rho_general(&q, opts)?;
                Ok(DensityRow {
                    at: pt.clone(),
                    rho: r.value,
                    err: r.error_estimate,
                    method: if r.converged {
                        "quadrature"
                    } else {
                        "quadrature-unconverged"
                    },
                })
            }
        })
        .collect()
}

pub fn write_curve_csv<W: Write>(rows: &[DensityRow], complex: bool, mut w: W) -> Result<()> {
    if complex {
        writeln!(w, "re,im,rho,err,method")?;
    } else {
        writeln!(w, "x,rho,err,method")?;
    }
    for r in rows {
        let at: Vec<String> = r.at.iter().map(|v| format!("{v}")).collect();
        writeln!(w, "{},{:.12e},{:.3e},{}", at.join(","), r.rho, r.err, r.method)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::smooth;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn ones(n: usize, p: PNorm) -> WeightedHeight {
        WeightedHeight::unweighted(n, p).unwrap()
    }

    fn query(h: &WeightedHeight, reals: &[f64], uppers: &[(f64, f64)]) -> DensityQuery {
        let u = uppers.iter().map(|&(a, b)| Complex::new(a, b)).collect();
        DensityQuery::new(h.clone(), RootConfiguration::new(reals.to_vec(), u).unwrap()).unwrap()
    }

    fn opts() -> IntegrationOptions {
        IntegrationOptions::default()
    }

    #[test]
    fn coefficient_densities_normalised() {
        for p in [
            PNorm::Finite(1.0),
            PNorm::Finite(2.0),
            PNorm::Finite(3.5),
            PNorm::Infinity,
        ] {
            let h = WeightedHeight::new(vec![0.5, 1.0, 3.0], p).unwrap();
            let d = CoefficientDensity::new(&h);
            for i in 0..3 {
                let f = |t: &[f64]| {
                    if d.pdf(i, t[0]) > 0.0 {
                        Some(d.pdf(i, t[0]))
                    } else {
                        None
                    }
                };
                let r = integrate(
                    &f,
                    &[Axis::Line {
                        scale: 1.0 / h.weights()[i],
                    }],
                    &opts(),
                )
                .unwrap();
                assert!((r.value - 1.0).abs() < 1e-9, "{p} w_{i}: {r:?}");
            }
        }
    }

    #[test]
    fn closed_form_examples() {
        let h = ones(1, PNorm::Infinity);
        assert!((rho_closed_top(&query(&h, &[0.0], &[])).unwrap() - 0.25).abs() < 1e-15);
        assert!((rho_closed_top(&query(&h, &[3.0], &[])).unwrap() - 0.25 / 9.0).abs() < 1e-15);
        let h2 = ones(1, PNorm::Finite(2.0));
        for x in [-2.0, 0.0, 0.7, 5.0] {
            let v = rho_closed_top(&query(&h2, &[x], &[])).unwrap();
            assert!((v - 1.0 / (PI * (1.0 + x * x))).abs() < 1e-14);
        }
        let h3 = ones(2, PNorm::Finite(2.0));
        assert_eq!(rho_closed_top(&query(&h3, &[1.0, 1.0], &[])).unwrap(), 0.0);
        assert!(rho_closed_top(&query(&h3, &[1.0], &[])).is_err());
    }

    #[test]
    fn general_matches_closed_form_examples() {
        let h = ones(2, PNorm::Infinity);
        for q in [query(&h, &[0.0, 1.0], &[]), query(&h, &[], &[(0.0, 1.0)])] {
            let a = rho_general(&q, &opts()).unwrap();
            let b = rho_closed_top(&q).unwrap();
            assert!((a.value - b).abs() < 1e-8, "{a:?} vs {b}");
        }
    }

    #[test]
    fn edelman_kostlan_at_zero() {
        let h = WeightedHeight::bombieri(2, PNorm::Finite(2.0)).unwrap();
        let r = rho_general(&query(&h, &[0.0], &[]), &opts()).unwrap();
        assert!((r.value - 2f64.sqrt() / PI).abs() < 1e-6, "{r:?}");
        let r1 = rho_real_density(&h, 1.0, &opts()).unwrap();
        assert!((r1.value - 2f64.sqrt() / (2.0 * PI)).abs() < 1e-6, "{r1:?}");
    }

    #[test]
    fn reduced_forms_agree_with_general() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for (n, p) in [(2, PNorm::Infinity), (3, PNorm::Finite(2.0)), (3, PNorm::Finite(1.0))] {
            let h = ones(n, p);
            for _ in 0..4 {
                let x: f64 = rng.random_range(-2.0..2.0);
                let a = rho_real_density(&h, x, &opts()).unwrap();
                let b = rho_general(&query(&h, &[x], &[]), &opts()).unwrap();
                let tol = 3.0 * (a.error_estimate + b.error_estimate) + 1e-7;
                assert!((a.value - b.value).abs() <= tol, "n={n} {p} x={x}: {a:?} {b:?}");
                let z = Complex::new(rng.random_range(-1.5..1.5), rng.random_range(0.1..1.5));
                let a = rho_complex_density(&h, z, &opts()).unwrap();
                let b = rho_general(&query(&h, &[], &[(z.re, z.im)]), &opts()).unwrap();
                let tol = 3.0 * (a.error_estimate + b.error_estimate) + 1e-7;
                assert!((a.value - b.value).abs() <= tol, "n={n} {p} z={z}: {a:?} {b:?}");
            }
        }
    }

    #[test]
    fn degree_one_real_density_by_hand() {
        // ∫_{−1}^{1} (1/2)(1/2)|t| dt = 1/4
        let h = ones(1, PNorm::Infinity);
        let r = rho_real_density(&h, 0.0, &opts()).unwrap();
        assert!((r.value - 0.25).abs() < 1e-9, "{r:?}");
    }

    #[test]
    fn complex_density_vanishes_at_axis() {
        let h = ones(3, PNorm::Finite(2.0));
        let at = |im: f64| rho_complex_density(&h, Complex::new(0.3, im), &opts()).unwrap().value;
        assert_eq!(at(0.0), 0.0);
        assert!(at(1e-4) < 1e-3 * at(0.5));
        assert!(rho_complex_density(&h, Complex::new(0.3, -1.0), &opts()).is_err());
    }

    /// ρ_{1,0}(x) for the uniform cube quadratic: the a_0 constraint is
    /// solved for, the a_1 integral of |a_1 + 2 a_2 x| is exact and the a_2
    /// integral is composite Simpson.
    fn cube_quadratic_real_density(x: f64) -> f64 {
        let absint = |lo: f64, hi: f64, c: f64| {
            let g = |a: f64| 0.5 * (a + c) * (a + c).abs();
            g(hi) - g(lo)
        };
        let inner = |a2: f64| {
            let (p, q) = ((-1.0 - a2 * x * x) / x, (1.0 - a2 * x * x) / x);
            let (lo, hi) = (p.min(q).max(-1.0), p.max(q).min(1.0));
            if lo < hi {
                absint(lo, hi, 2.0 * a2 * x)
            } else {
                0.0
            }
        };
        let m = 4000;
        let step = 2.0 / m as f64;
        let mut acc = inner(-1.0) + inner(1.0);
        for i in 1..m {
            acc += inner(-1.0 + i as f64 * step) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        acc * step / 3.0 / 8.0
    }

    #[test]
    fn cube_quadratic_bin_masses() {
        let h = ones(2, PNorm::Infinity);
        let opts = IntegrationOptions::default().with_tol(1e-8, 1e-5);
        for (lo, hi) in [(0.1, 0.3), (-2.4, -2.1), (1.5, 2.5)] {
            let m = 2000;
            let step = (hi - lo) / m as f64;
            let mut oracle = cube_quadratic_real_density(lo) + cube_quadratic_real_density(hi);
            for i in 1..m {
                let w = if i % 2 == 1 { 4.0 } else { 2.0 };
                oracle += w * cube_quadratic_real_density(lo + i as f64 * step);
            }
            oracle *= step / 3.0;
            let r = integrate_over_region(&h, &Region::interval(lo, hi).unwrap(), &opts).unwrap();
            let diff = (r.value - oracle).abs();
            assert!(
                diff <= 4.0 * r.error_estimate + 1e-6 * oracle,
                "[{lo}, {hi}]: {} vs {oracle}",
                r.value
            );
            assert!(r.error_estimate <= 1e-3 * oracle);
        }
    }

    #[test]
    fn invariant_under_weight_scaling() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for p in [PNorm::Finite(1.0), PNorm::Finite(2.0), PNorm::Infinity] {
            let h = WeightedHeight::new(vec![1.0, 2.0, 0.5, 1.5], p).unwrap();
            for c in [0.5, 2.0] {
                let hc = h.scaled(c).unwrap();
                let x: f64 = rng.random_range(-2.0..2.0);
                let z = (rng.random_range(-1.0..1.0), rng.random_range(0.2..2.0));
                let a = rho_closed_top(&query(&h, &[x], &[z])).unwrap();
                let b = rho_closed_top(&query(&hc, &[x], &[z])).unwrap();
                // c_{n,p,w} and l_{p,w}^{n+1} both pick up c^{n+1}
                assert!((b - a).abs() < 1e-12 * b.abs(), "{p} c={c}");
            }
        }
    }

    #[test]
    fn permutation_symmetry() {
        let h = ones(3, PNorm::Finite(2.0));
        let a = rho_closed_top(&query(&h, &[0.1, -0.7, 1.3], &[])).unwrap();
        let b = rho_closed_top(&query(&h, &[1.3, 0.1, -0.7], &[])).unwrap();
        assert!((a - b).abs() < 1e-14 * a);
        let h4 = ones(4, PNorm::Infinity);
        let a = rho_closed_top(&query(&h4, &[], &[(0.2, 0.5), (-1.0, 1.2)])).unwrap();
        let b = rho_closed_top(&query(&h4, &[], &[(-1.0, 1.2), (0.2, 0.5)])).unwrap();
        assert!((a - b).abs() < 1e-14 * a);
        let a = rho_general(&query(&h4, &[0.3, -0.4], &[]), &opts()).unwrap();
        let b = rho_general(&query(&h4, &[-0.4, 0.3], &[]), &opts()).unwrap();
        assert!((a.value - b.value).abs() < 1e-9);
    }

    #[test]
    fn limit_integral_examples() {
        let h = ones(1, PNorm::Infinity);
        let r = limit_integral(&h, &Region::interval(0.0, 1.0).unwrap(), &opts()).unwrap();
        assert!((r.value - 3.0 / (PI * PI)).abs() < 1e-9, "{r:?}");
        let all = Region::interval(f64::NEG_INFINITY, f64::INFINITY).unwrap();
        let r = limit_integral(&h, &all, &opts()).unwrap();
        assert!((r.value - 12.0 / (PI * PI)).abs() < 1e-8, "{r:?}");
        let flat = Region::interval(0.5, 0.5).unwrap();
        assert_eq!(limit_integral(&h, &flat, &opts()).unwrap().value, 0.0);
    }

    #[test]
    fn joint_region_integral_matches_nesting() {
        let h = ones(2, PNorm::Finite(2.0));
        let b = Region::interval(-0.5, 0.5).unwrap();
        let r = integrate_over_region(&h, &b, &opts()).unwrap();
        let g = smooth(|x: &[f64]| rho_real_density(&h, x[0], &opts()).unwrap().value);
        let m = integrate(&g, &[Axis::Interval(-0.5, 0.5)], &opts()).unwrap();
        assert!(
            (r.value - m.value).abs() <= 3.0 * r.error_estimate + 1e-9,
            "{r:?} {m:?}"
        );
        assert!(r.error_estimate < 1e-5 * r.value);
    }

    #[test]
    fn probabilities() {
        let h = ones(1, PNorm::Finite(2.0));
        assert!((prob_real_count(&h, 0, &opts()).unwrap().value - 1.0).abs() < 1e-7);
        let h = ones(2, PNorm::Infinity);
        let p0 = prob_real_count(&h, 0, &opts()).unwrap();
        let p1 = prob_real_count(&h, 1, &opts()).unwrap();
        let exact = 0.5 + 5.0 / 72.0 + 2f64.ln() / 12.0;
        assert!((p0.value - exact).abs() < 1e-5, "{p0:?}");
        assert!((p0.value + p1.value - 1.0).abs() < 1e-5, "{p0:?} {p1:?}");
        assert!(prob_real_count(&h, 2, &opts()).is_err());
    }

    #[test]
    fn total_probability_quasi_random() {
        let h = ones(3, PNorm::Finite(2.0));
        let o = opts().with_mode(Mode::QuasiRandom);
        let s: f64 = (0..=1).map(|l| prob_real_count(&h, l, &o).unwrap().value).sum();
        assert!((s - 1.0).abs() < 5e-3, "{s}");
    }

    #[test]
    fn curve_rows() {
        let h = ones(2, PNorm::Finite(2.0));
        let grid: Vec<Vec<f64>> = (0..3).map(|i| vec![i as f64 * 0.5]).collect();
        let rows = density_curve(&h, 1, 0, &grid, &opts()).unwrap();
        assert_eq!(rows.len(), 3);
        assert!(rows.iter().all(|r| r.method == "quadrature" && r.rho > 0.0));
        let mut buf = Vec::new();
        write_curve_csv(&rows, false, &mut buf).unwrap();
        assert!(String::from_utf8(buf).unwrap().starts_with("x,rho,err,method\n"));
    }
}
