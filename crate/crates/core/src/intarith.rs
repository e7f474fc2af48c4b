//! Content, irreducibility over Q and the prime-polynomial predicate for
//! integer polynomials of small degree.
//!
//! Irreducibility is decided by an exhaustive search for an integer factor
//! `g` of degree `d ≤ n/2`. Any such factor satisfies `g(x) | q(x)` at every
//! integer `x` and `lead(g) | lead(q)`, so candidates are generated from the
//! divisors of `q` at the points ∞ (leading coefficient), 0, 1 and −1. Four
//! interpolation conditions determine a cubic, so the enumeration is complete
//! for `d ≤ 3`, i.e. for every degree up to the cap of 6. Each candidate is
//! then checked against the Mignotte coefficient bound and by exact division.

use crate::error::{Error, Result};
use crate::heights::binomial;
use crate::poly::IntPoly;

pub const MAX_DEGREE: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrimalityVerdict {
    pub primitive: bool,
    pub irreducible: bool,
    pub leading_positive: bool,
    pub prime: bool,
}

fn gcd(mut a: i64, mut b: i64) -> i64 {
    a = a.abs();
    b = b.abs();
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// gcd of the coefficients.
pub fn content(q: &IntPoly) -> i64 {
    q.coeffs().iter().fold(0, |g, &a| gcd(g, a))
}

/// Positive divisors of |x|, x ≠ 0.
fn divisors(x: i128) -> Vec<i128> {
    let x = x.abs();
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1i128;
    while d * d <= x {
        if x % d == 0 {
            small.push(d);
            if d * d != x {
                large.push(x / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

/// Exact division of `q` by `g` over Z; true when the remainder vanishes.
fn divides(g: &[i128], q: &[i128]) -> bool {
    let dg = g.len() - 1;
    let lead = g[dg];
    let mut rem: Vec<i128> = q.to_vec();
    for i in (dg..rem.len()).rev() {
        let c = rem[i];
        if c == 0 {
            continue;
        }
        if c % lead != 0 {
            return false;
        }
        let f = c / lead;
        for (j, &gj) in g.iter().enumerate() {
            rem[i - dg + j] -= f * gj;
        }
    }
    rem.iter().all(|&r| r == 0)
}

fn has_factor_of_degree(q: &[i128], d: usize, l2: f64) -> bool {
    let n = q.len() - 1;
    let lead = q[n];
    let q0 = q[0];
    let at = |x: i128| q.iter().rev().fold(0i128, |acc, &a| acc * x + a);
    let bound = |j: usize| binomial(d, j) * l2 + 1e-9;
    let lead_divs = divisors(lead);
    let signed = |v: Vec<i128>| -> Vec<i128> { v.iter().flat_map(|&x| [x, -x]).collect() };
    let const_divs = signed(divisors(q0));

    match d {
        1 => lead_divs
            .iter()
            .any(|&b1| const_divs.iter().any(|&b0| divides(&[b0, b1], q))),
        2 => {
            let q1 = at(1);
            let vals = signed(divisors(q1));
            lead_divs.iter().any(|&b2| {
                const_divs.iter().any(|&b0| {
                    vals.iter().any(|&v| {
                        let b1 = v - b2 - b0;
                        (b1 as f64).abs() <= bound(1) && divides(&[b0, b1, b2], q)
                    })
                })
            })
        }
        3 => {
            let up = signed(divisors(at(1)));
            let dn = signed(divisors(at(-1)));
            lead_divs.iter().any(|&b3| {
                const_divs.iter().any(|&b0| {
                    up.iter().any(|&u| {
                        dn.iter().any(|&v| {
                            if (u + v) % 2 != 0 {
                                return false;
                            }
                            let b2 = (u + v) / 2 - b0;
                            let b1 = (u - v) / 2 - b3;
                            (b1 as f64).abs() <= bound(1)
                                && (b2 as f64).abs() <= bound(2)
                                && divides(&[b0, b1, b2, b3], q)
                        })
                    })
                })
            })
        }
        _ => unreachable!("factor degree is at most 3 under the degree cap"),
    }
}

/// Whether `q` admits no factorisation over Q into factors of degree ≥ 1.
pub fn is_irreducible(q: &IntPoly) -> Result<bool> {
    let n = q.degree();
    if n > MAX_DEGREE {
        return Err(Error::Unsupported(format!(
            "irreducibility test supports degree <= {MAX_DEGREE}, got {n}"
        )));
    }
    if n == 1 {
        return Ok(true);
    }
    let c = content(q);
    let prim: Vec<i128> = q.coeffs().iter().map(|&a| i128::from(a / c)).collect();
    // z divides q, or q vanishes at ±1
    if prim[0] == 0 {
        return Ok(false);
    }
    let at = |x: i128| prim.iter().rev().fold(0i128, |acc, &a| acc * x + a);
    if at(1) == 0 || at(-1) == 0 {
        return Ok(false);
    }
    // Mignotte: |g_j| ≤ C(d, j) · M(q) ≤ C(d, j) · ‖q‖₂
    let l2 = prim.iter().map(|&a| (a as f64).powi(2)).sum::<f64>().sqrt();
    for d in 1..=n / 2 {
        if has_factor_of_degree(&prim, d, l2) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Primitive, irreducible over Q and with positive leading coefficient.
pub fn is_prime_poly(q: &IntPoly) -> Result<PrimalityVerdict> {
    let irreducible = is_irreducible(q)?;
    let primitive = content(q) == 1;
    let leading_positive = q.leading() > 0;
    Ok(PrimalityVerdict {
        primitive,
        irreducible,
        leading_positive,
        prime: primitive && irreducible && leading_positive,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn p(c: &[i64]) -> IntPoly {
        IntPoly::new(c.to_vec()).unwrap()
    }

    #[test]
    fn content_examples() {
        assert_eq!(content(&p(&[2, 2])), 2);
        assert_eq!(content(&p(&[1, -2, 3])), 1);
        assert_eq!(content(&p(&[0, 9, 0, 6])), 3);
        assert_eq!(content(&p(&[0, -4])), 4);
    }

    #[test]
    fn irreducible_examples() {
        assert!(is_irreducible(&p(&[-2, 0, 1])).unwrap());
        assert!(!is_irreducible(&p(&[-1, 0, 1])).unwrap());
        assert!(is_irreducible(&p(&[1, 0, 0, 0, 1])).unwrap());
        // z^4 + 4 = (z^2 + 2z + 2)(z^2 - 2z + 2): no rational root
        assert!(!is_irreducible(&p(&[4, 0, 0, 0, 1])).unwrap());
        // (z^3 + z + 1)(z^3 - z + 3)
        let g = p(&[1, 1, 0, 1]);
        let h = p(&[3, -1, 0, 1]);
        assert!(!is_irreducible(&g.mul(&h)).unwrap());
        assert!(is_irreducible(&g).unwrap());
        assert!(matches!(
            is_irreducible(&p(&[1, 0, 0, 0, 0, 0, 0, 1])),
            Err(Error::Unsupported(_))
        ));
        // non-primitive but irreducible over Q
        assert!(is_irreducible(&p(&[4, 0, 2])).unwrap());
    }

    #[test]
    fn prime_examples() {
        assert!(is_prime_poly(&p(&[-1, 1])).unwrap().prime);
        let v = is_prime_poly(&p(&[2, 2])).unwrap();
        assert!(!v.prime && !v.primitive && v.irreducible);
        let v = is_prime_poly(&p(&[-2, 0, -1])).unwrap();
        assert!(!v.prime && v.irreducible && !v.leading_positive);
    }

    /// Exhaustive small-coefficient search for a quadratic factor of a
    /// quartic: tries every (b0, b1, b2) in a box, independent of the
    /// divisor-driven enumeration.
    fn brute_quartic_has_quadratic_factor(q: &[i64], r: i64) -> bool {
        let qi: Vec<i128> = q.iter().map(|&a| a.into()).collect();
        for b2 in 1..=r {
            for b1 in -r..=r {
                for b0 in -r..=r {
                    if b0 == 0 {
                        continue;
                    }
                    if divides(&[b0.into(), b1.into(), b2.into()], &qi) {
                        return true;
                    }
                }
            }
        }
        false
    }

    /// Rational root test: some ±b0/b1 with b1 | lead, b0 | q(0) is a zero.
    fn rational_root(q: &[i64]) -> bool {
        let qi: Vec<i128> = q.iter().map(|&a| a.into()).collect();
        if qi[0] == 0 {
            return true;
        }
        let n = qi.len() - 1;
        for b1 in divisors(qi[n]) {
            for b0 in divisors(qi[0]) {
                for num in [b0, -b0] {
                    // b1^n q(num / b1)
                    let scaled: i128 = qi
                        .iter()
                        .enumerate()
                        .map(|(i, &a)| a * num.pow(i as u32) * b1.pow((n - i) as u32))
                        .sum();
                    if scaled == 0 {
                        return true;
                    }
                }
            }
        }
        false
    }

    fn is_square(x: i64) -> bool {
        if x < 0 {
            return false;
        }
        let r = (x as f64).sqrt().round() as i64;
        (r - 1..=r + 1).any(|s| s >= 0 && s * s == x)
    }

    #[test]
    fn quadratics_match_discriminant_oracle() {
        for a in 1..=12i64 {
            for b in -12..=12i64 {
                for c in -12..=12i64 {
                    let q = p(&[c, b, a]);
                    let reducible = is_square(b * b - 4 * a * c);
                    assert_eq!(is_irreducible(&q).unwrap(), !reducible, "{q}");
                }
            }
        }
    }

    #[test]
    fn cubics_match_rational_root_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..5_000 {
            let mut c: Vec<i64> = (0..4).map(|_| rng.random_range(-30..=30)).collect();
            if c[3] == 0 {
                c[3] = 1;
            }
            assert_eq!(is_irreducible(&p(&c)).unwrap(), !rational_root(&c), "{c:?}");
        }
    }

    #[test]
    fn quartics_match_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..300 {
            let mut c: Vec<i64> = (0..5).map(|_| rng.random_range(-6..=6)).collect();
            if c[4] == 0 {
                c[4] = 1;
            }
            let cnt = content(&IntPoly::new(c.clone()).unwrap());
            let prim: Vec<i64> = c.iter().map(|a| a / cnt).collect();
            let oracle = rational_root(&prim) || brute_quartic_has_quadratic_factor(&prim, 40);
            assert_eq!(is_irreducible(&p(&c)).unwrap(), !oracle, "{c:?}");
        }
    }

    #[test]
    fn products_are_reducible() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut rand_poly = |deg: usize| -> IntPoly {
            let mut c: Vec<i64> = (0..=deg).map(|_| rng.random_range(-9..=9)).collect();
            while c[deg] == 0 {
                c[deg] = rng.random_range(-9..=9);
            }
            IntPoly::new(c).unwrap()
        };
        for i in 0..1_000 {
            let dg = 1 + i % 3;
            let dh = 1 + (i / 3) % (MAX_DEGREE - dg).min(3);
            let g = rand_poly(dg);
            let h = rand_poly(dh);
            let q = g.mul(&h);
            assert!(!is_irreducible(&q).unwrap(), "{g} * {h}");
        }
    }

    #[test]
    fn integer_root_implies_reducible() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..1_000 {
            let n = rng.random_range(2..=MAX_DEGREE);
            let r = rng.random_range(-5..=5i64);
            let mut c: Vec<i64> = (0..n).map(|_| rng.random_range(-6..=6)).collect();
            // (z - r) * c(z), c of degree n-1
            if *c.last().unwrap() == 0 {
                *c.last_mut().unwrap() = 2;
            }
            let q = p(&[-r, 1]).mul(&p(&c));
            assert!(q.eval_int(r) == 0);
            assert!(!is_irreducible(&q).unwrap());
        }
    }
}
