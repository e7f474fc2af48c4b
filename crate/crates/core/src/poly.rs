//! Polynomial types and root-side algebra: elementary symmetric functions,
//! Vandermonde products, discriminants, expansion from a root set.
//!
//! Coefficients are stored lowest power first: `coeffs[i]` multiplies `z^i`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Complex = num_complex::Complex64;

/// Relative tolerance for conjugate-closure checks.
pub const CONJ_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IntPoly {
    coeffs: Vec<i64>,
}

impl IntPoly {
    /// Fails unless the degree is at least 1 and the top coefficient is non-zero.
    pub fn new(coeffs: Vec<i64>) -> Result<Self> {
        if coeffs.len() < 2 {
            return Err(Error::Domain("integer polynomial must have degree >= 1".into()));
        }
        if *coeffs.last().unwrap() == 0 {
            return Err(Error::Domain("leading coefficient must be non-zero".into()));
        }
        Ok(Self { coeffs })
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn leading(&self) -> i64 {
        self.coeffs[self.degree()]
    }

    pub fn to_real(&self) -> RealPoly {
        RealPoly {
            coeffs: self.coeffs.iter().map(|&a| a as f64).collect(),
        }
    }

    pub fn mul(&self, other: &IntPoly) -> IntPoly {
        let mut out = vec![0i64; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        IntPoly { coeffs: out }
    }

    pub fn eval_int(&self, x: i64) -> i128 {
        self.coeffs
            .iter()
            .rev()
            .fold(0i128, |acc, &a| acc * i128::from(x) + i128::from(a))
    }
}

impl std::fmt::Display for IntPoly {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.coeffs.iter().map(|a| a.to_string()).collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RealPoly {
    coeffs: Vec<f64>,
}

impl RealPoly {
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        match coeffs.last() {
            None => Err(Error::Domain("empty coefficient list".into())),
            Some(&a) if a == 0.0 || !a.is_finite() => {
                Err(Error::Domain("leading coefficient must be finite and non-zero".into()))
            }
            _ => Ok(Self { coeffs }),
        }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn leading(&self) -> f64 {
        self.coeffs[self.degree()]
    }

    /// Horner evaluation at a complex point.
    pub fn evaluate(&self, z: Complex) -> Complex {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex::new(0.0, 0.0), |acc, &a| acc * z + a)
    }

    /// Value and first derivative in one Horner pass.
    pub fn evaluate_with_derivative(&self, z: Complex) -> (Complex, Complex) {
        let mut p = Complex::new(0.0, 0.0);
        let mut dp = Complex::new(0.0, 0.0);
        for &a in self.coeffs.iter().rev() {
            dp = dp * z + p;
            p = p * z + a;
        }
        (p, dp)
    }

    /// The derivative; a constant polynomial differentiates to the zero
    /// constant, which is returned as `[0.0]`.
    pub fn derivative(&self) -> RealPoly {
        if self.coeffs.len() == 1 {
            return RealPoly { coeffs: vec![0.0] };
        }
        RealPoly {
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &a)| i as f64 * a)
                .collect(),
        }
    }

    pub fn scale(&self, c: f64) -> RealPoly {
        RealPoly {
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }
}

/// k real points and l points in the open upper half-plane.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct RootConfiguration {
    pub reals: Vec<f64>,
    pub uppers: Vec<Complex>,
}

impl RootConfiguration {
    pub fn new(reals: Vec<f64>, uppers: Vec<Complex>) -> Result<Self> {
        if let Some(z) = uppers.iter().find(|z| !(z.im > 0.0)) {
            return Err(Error::Domain(format!("upper point {z} is not in the upper half-plane")));
        }
        Ok(Self { reals, uppers })
    }

    pub fn k(&self) -> usize {
        self.reals.len()
    }

    pub fn l(&self) -> usize {
        self.uppers.len()
    }

    /// `(x, z, z̄)` as one conjugate-closed list of `k + 2l` points.
    pub fn points(&self) -> Vec<Complex> {
        let mut pts: Vec<Complex> = self.reals.iter().map(|&x| Complex::new(x, 0.0)).collect();
        pts.extend(self.uppers.iter().copied());
        pts.extend(self.uppers.iter().map(|z| z.conj()));
        pts
    }
}

/// Multiply `acc` (monic, lowest power first) by `z - r`.
fn mul_linear(acc: &mut Vec<f64>, r: f64) {
    acc.push(0.0);
    for i in (1..acc.len()).rev() {
        acc[i] = acc[i - 1] - r * acc[i];
    }
    acc[0] *= -r;
}

/// Multiply `acc` by `z^2 + b z + c`.
fn mul_quadratic(acc: &mut Vec<f64>, b: f64, c: f64) {
    let n = acc.len();
    let mut out = vec![0.0; n + 2];
    for (i, &a) in acc.iter().enumerate() {
        out[i] += c * a;
        out[i + 1] += b * a;
        out[i + 2] += a;
    }
    *acc = out;
}

fn is_real(z: Complex) -> bool {
    z.im.abs() <= CONJ_TOL * (1.0 + z.norm())
}

/// Monic expansion of a conjugate-closed multiset, in real arithmetic.
fn monic_from_points(points: &[Complex]) -> Result<Vec<f64>> {
    let mut acc = vec![1.0];
    let mut lowers: Vec<Option<Complex>> = Vec::new();
    let mut uppers = Vec::new();
    for &z in points {
        if is_real(z) {
            mul_linear(&mut acc, z.re);
        } else if z.im > 0.0 {
            uppers.push(z);
        } else {
            lowers.push(Some(z));
        }
    }
    if uppers.len() != lowers.len() {
        return Err(Error::Domain("point set is not closed under conjugation".into()));
    }
    for z in uppers {
        let (idx, _) = lowers
            .iter()
            .enumerate()
            .filter_map(|(i, w)| w.map(|w| (i, (w.conj() - z).norm())))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .ok_or_else(|| Error::Domain("point set is not closed under conjugation".into()))?;
        let w = lowers[idx].take().unwrap();
        if (w.conj() - z).norm() > CONJ_TOL * (1.0 + z.norm()) {
            return Err(Error::Domain(format!("no conjugate partner for {z}")));
        }
        let re = 0.5 * (z.re + w.re);
        let im = 0.5 * (z.im - w.im);
        mul_quadratic(&mut acc, -2.0 * re, re * re + im * im);
    }
    Ok(acc)
}

/// Elementary symmetric functions σ_0..σ_m of a conjugate-closed multiset.
pub fn elem_sym(points: &[Complex]) -> Result<Vec<f64>> {
    if points.is_empty() {
        return Err(Error::Domain("elem_sym needs at least one point".into()));
    }
    let monic = monic_from_points(points)?;
    let m = points.len();
    // monic[r] = (-1)^(m-r) σ_{m-r}
    Ok((0..=m)
        .map(|i| {
            let c = monic[m - i];
            if i % 2 == 0 {
                c
            } else {
                -c
            }
        })
        .collect())
}

/// ∏_{i<j} |z_i − z_j|; 1 for a single point.
pub fn vandermonde_abs(points: &[Complex]) -> f64 {
    let mut prod = 1.0;
    for (i, &a) in points.iter().enumerate() {
        for &b in &points[i + 1..] {
            prod *= (a - b).norm();
        }
    }
    prod
}

/// ∏_{i<j} (z_i − z_j)², real for a conjugate-closed multiset.
pub fn discriminant_from_roots(points: &[Complex]) -> Result<f64> {
    monic_from_points(points)?;
    let mut prod = Complex::new(1.0, 0.0);
    for (i, &a) in points.iter().enumerate() {
        for &b in &points[i + 1..] {
            let d = a - b;
            prod *= d * d;
        }
    }
    // the imaginary part is round-off of a real quantity
    if prod.im.abs() > 1e-6 * (1.0 + prod.norm()) {
        return Err(Error::Domain("discriminant is not real".into()));
    }
    Ok(prod.re)
}

/// The monic real polynomial with the configuration (and the conjugates of
/// its upper points) as zeros.
pub fn expand_monic(config: &RootConfiguration) -> RealPoly {
    let mut acc = vec![1.0];
    for &x in &config.reals {
        mul_linear(&mut acc, x);
    }
    for z in &config.uppers {
        mul_quadratic(&mut acc, -2.0 * z.re, z.norm_sqr());
    }
    RealPoly { coeffs: acc }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    /// Schoolbook complex long multiplication, kept apart from the real
    /// pairing used by the implementation.
    fn long_multiply(points: &[Complex]) -> Vec<Complex> {
        let mut acc = vec![c(1.0, 0.0)];
        for &r in points {
            let mut next = vec![c(0.0, 0.0); acc.len() + 1];
            for (i, &a) in acc.iter().enumerate() {
                next[i + 1] += a;
                next[i] -= r * a;
            }
            acc = next;
        }
        acc
    }

    #[test]
    fn elem_sym_examples() {
        assert_eq!(elem_sym(&[c(1.0, 0.0), c(-1.0, 0.0)]).unwrap(), vec![1.0, 0.0, -1.0]);
        assert_eq!(elem_sym(&[c(0.0, 1.0), c(0.0, -1.0)]).unwrap(), vec![1.0, 0.0, 1.0]);
        let s = elem_sym(&[c(2.0, 0.0), c(1.0, 1.0), c(1.0, -1.0)]).unwrap();
        let oracle = long_multiply(&[c(2.0, 0.0), c(1.0, 1.0), c(1.0, -1.0)]);
        // oracle z^3 - 4z^2 + 6z - 4
        assert_eq!(
            oracle.iter().map(|z| z.re).collect::<Vec<_>>(),
            vec![-4.0, 6.0, -4.0, 1.0]
        );
        assert_eq!(s, vec![1.0, 4.0, 6.0, 4.0]);
    }

    #[test]
    fn elem_sym_rejects_non_closed() {
        assert!(matches!(elem_sym(&[c(1.0, 1.0)]), Err(Error::Domain(_))));
        assert!(matches!(elem_sym(&[c(1.0, 1.0), c(1.0, -1.1)]), Err(Error::Domain(_))));
        assert!(matches!(elem_sym(&[]), Err(Error::Domain(_))));
    }

    #[test]
    fn vandermonde_examples() {
        assert_eq!(vandermonde_abs(&[c(5.0, 0.0)]), 1.0);
        assert_eq!(vandermonde_abs(&[c(1.0, 0.0), c(-1.0, 0.0)]), 2.0);
        assert_eq!(vandermonde_abs(&[c(0.0, 0.0), c(1.0, 0.0), c(2.0, 0.0)]), 2.0);
    }

    #[test]
    fn discriminant_examples() {
        assert_eq!(discriminant_from_roots(&[c(1.0, 0.0), c(-1.0, 0.0)]).unwrap(), 4.0);
        assert_eq!(discriminant_from_roots(&[c(0.0, 1.0), c(0.0, -1.0)]).unwrap(), -4.0);
        assert_eq!(
            discriminant_from_roots(&[c(0.0, 0.0), c(1.0, 0.0), c(2.0, 0.0)]).unwrap(),
            4.0
        );
    }

    #[test]
    fn expand_monic_examples() {
        let q = expand_monic(&RootConfiguration::new(vec![1.0, -1.0], vec![]).unwrap());
        assert_eq!(q.coeffs(), &[-1.0, 0.0, 1.0]);
        let q = expand_monic(&RootConfiguration::new(vec![], vec![c(0.0, 1.0)]).unwrap());
        assert_eq!(q.coeffs(), &[1.0, 0.0, 1.0]);
        let q = expand_monic(&RootConfiguration::new(vec![2.0], vec![c(1.0, 1.0)]).unwrap());
        assert_eq!(q.coeffs(), &[-4.0, 6.0, -4.0, 1.0]);
    }

    #[test]
    fn evaluate_and_derivative() {
        let q = RealPoly::new(vec![-1.0, 0.0, 1.0]).unwrap();
        assert_eq!(q.evaluate(c(2.0, 0.0)), c(3.0, 0.0));
        assert_eq!(q.derivative().coeffs(), &[0.0, 2.0]);
        let q = RealPoly::new(vec![1.0, 0.0, 1.0]).unwrap();
        assert_eq!(q.evaluate(c(0.0, 1.0)), c(0.0, 0.0));
        let (v, dv) = q.evaluate_with_derivative(c(1.0, 1.0));
        assert_eq!(v, q.evaluate(c(1.0, 1.0)));
        assert_eq!(dv, q.derivative().evaluate(c(1.0, 1.0)));
    }

    #[test]
    fn constructors_validate() {
        assert!(IntPoly::new(vec![1]).is_err());
        assert!(IntPoly::new(vec![1, 0]).is_err());
        assert!(RealPoly::new(vec![1.0, 0.0]).is_err());
        assert!(RootConfiguration::new(vec![], vec![c(0.0, -1.0)]).is_err());
        assert!(RootConfiguration::new(vec![], vec![c(0.0, 0.0)]).is_err());
    }

    fn config_strategy() -> impl Strategy<Value = RootConfiguration> {
        (
            prop::collection::vec(-3.0f64..3.0, 0..4),
            prop::collection::vec((-3.0f64..3.0, 0.05f64..3.0), 0..3),
        )
            .prop_filter("non-empty", |(r, u)| !r.is_empty() || !u.is_empty())
            .prop_map(|(r, u)| RootConfiguration {
                reals: r,
                uppers: u.into_iter().map(|(a, b)| c(a, b)).collect(),
            })
    }

    proptest! {
        #[test]
        fn discriminant_matches_vandermonde_squared(cfg in config_strategy()) {
            let pts = cfg.points();
            let d = discriminant_from_roots(&pts).unwrap();
            let v = vandermonde_abs(&pts);
            prop_assert!((d.abs() - v * v).abs() <= 1e-12 * (v * v).max(1e-300));
        }

        #[test]
        fn vieta_residual(cfg in config_strategy()) {
            let pts = cfg.points();
            let q = expand_monic(&cfg);
            let sig = elem_sym(&pts).unwrap();
            let smax = sig.iter().fold(0.0f64, |m, s| m.max(s.abs()));
            for p in &pts {
                prop_assert!(q.evaluate(*p).norm() <= 1e-9 * (1.0 + smax));
            }
            // coefficients are (-1)^(m-i) σ_{m-i}
            let m = pts.len();
            for (i, a) in q.coeffs().iter().enumerate() {
                let sign = if (m - i) % 2 == 0 { 1.0 } else { -1.0 };
                prop_assert!((a - sign * sig[m - i]).abs() <= 1e-12 * (1.0 + smax));
            }
        }

        #[test]
        fn elem_sym_matches_complex_long_multiplication(cfg in config_strategy()) {
            let pts = cfg.points();
            let sig = elem_sym(&pts).unwrap();
            let oracle = long_multiply(&pts);
            let m = pts.len();
            for i in 0..=m {
                let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
                let o = oracle[m - i] * sign;
                prop_assert!(o.im.abs() <= 1e-9 * (1.0 + o.norm()));
                prop_assert!((o.re - sig[i]).abs() <= 1e-10 * (1.0 + o.norm()));
            }
        }
    }
}
