//! Weighted `l_p` heights of polynomials and the volume of their unit balls.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{gamma, ln_gamma};

/// Exponent of the norm: a finite p ≥ 1 or ∞.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum PNorm {
    Finite(f64),
    Infinity,
}

impl PNorm {
    pub fn finite(p: f64) -> Result<Self> {
        if p.is_infinite() && p > 0.0 {
            return Ok(PNorm::Infinity);
        }
        if !(p >= 1.0) {
            return Err(Error::Domain(format!("p must be >= 1, got {p}")));
        }
        Ok(PNorm::Finite(p))
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, PNorm::Infinity)
    }
}

impl fmt::Display for PNorm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PNorm::Finite(p) => write!(f, "{p}"),
            PNorm::Infinity => f.write_str("inf"),
        }
    }
}

impl FromStr for PNorm {
    type Err = Error;

    /// `"inf"` is the spelling of p = ∞.
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" => Ok(PNorm::Infinity),
            other => other
                .parse::<f64>()
                .map_err(|_| Error::Usage(format!("invalid p '{other}'")))
                .and_then(|p| {
                    if p.is_infinite() {
                        Err(Error::Usage("spell p = ∞ as 'inf'".into()))
                    } else {
                        PNorm::finite(p).map_err(|e| Error::Usage(e.to_string()))
                    }
                }),
        }
    }
}

/// Degree n together with positive weights w_0..w_n and the exponent p.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedHeight {
    weights: Vec<f64>,
    p: PNorm,
}

impl WeightedHeight {
    pub fn new(weights: Vec<f64>, p: PNorm) -> Result<Self> {
        if weights.len() < 2 {
            return Err(Error::Domain("need n + 1 >= 2 weights".into()));
        }
        if let Some(w) = weights.iter().find(|w| !(**w > 0.0) || !w.is_finite()) {
            return Err(Error::Domain(format!("weights must be positive and finite, got {w}")));
        }
        if let PNorm::Finite(x) = p {
            PNorm::finite(x)?;
        }
        Ok(Self { weights, p })
    }

    /// All weights equal to one.
    pub fn unweighted(n: usize, p: PNorm) -> Result<Self> {
        Self::new(vec![1.0; n + 1], p)
    }

    pub fn bombieri(n: usize, p: PNorm) -> Result<Self> {
        Self::new(bombieri_weights(n)?, p)
    }

    pub fn n(&self) -> usize {
        self.weights.len() - 1
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn p(&self) -> PNorm {
        self.p
    }

    /// Copy with every weight multiplied by `c`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        Self::new(self.weights.iter().map(|w| w * c).collect(), self.p)
    }

    /// `l_{p,w}` norm of a coefficient vector, lowest power first.
    pub fn lp_norm(&self, coeffs: &[f64]) -> Result<f64> {
        if coeffs.len() != self.weights.len() {
            return Err(Error::Domain(format!(
                "polynomial of degree {} measured with a degree-{} height",
                coeffs.len() as isize - 1,
                self.n()
            )));
        }
        Ok(self.norm_unchecked(coeffs))
    }

    pub fn lp_norm_int(&self, coeffs: &[i64]) -> Result<f64> {
        let v: Vec<f64> = coeffs.iter().map(|&a| a as f64).collect();
        self.lp_norm(&v)
    }

    #[inline]
    pub(crate) fn norm_unchecked(&self, coeffs: &[f64]) -> f64 {
        let terms = self.weights.iter().zip(coeffs).map(|(w, a)| (w * a).abs());
        match self.p {
            PNorm::Infinity => terms.fold(0.0, f64::max),
            PNorm::Finite(1.0) => terms.sum(),
            PNorm::Finite(2.0) => terms.map(|x| x * x).sum::<f64>().sqrt(),
            PNorm::Finite(p) => terms.map(|x| x.powf(p)).sum::<f64>().powf(1.0 / p),
        }
    }

    /// Volume of the unit ball {a : l_{p,w}(a) ≤ 1} in R^{n+1}.
    pub fn ball_volume(&self) -> f64 {
        let d = self.weights.len() as f64;
        let wprod: f64 = self.weights.iter().product();
        match self.p {
            PNorm::Infinity => 2f64.powf(d) / wprod,
            PNorm::Finite(p) => {
                // log form keeps large n from overflowing
                let ln =
                    d * std::f64::consts::LN_2 + d * ln_gamma(1.0 + 1.0 / p).unwrap() - ln_gamma(1.0 + d / p).unwrap();
                ln.exp() / wprod
            }
        }
    }

    /// c_{n,p,w} = 2 / ((n+1) Vol(B_{p,w}^{n+1})).
    pub fn limit_constant_c(&self) -> f64 {
        2.0 / (self.weights.len() as f64 * self.ball_volume())
    }

    /// The Γ-function form of c_{n,p,w}, valid for finite p:
    /// w_0⋯w_n Γ((n+1)/p) / (2^n p Γ(1+1/p)^{n+1}).
    pub fn limit_constant_c_gamma_form(&self) -> Result<f64> {
        let PNorm::Finite(p) = self.p else {
            return Err(Error::Domain("the gamma form needs finite p".into()));
        };
        let d = self.weights.len() as f64;
        let wprod: f64 = self.weights.iter().product();
        Ok(wprod * gamma(d / p)? / (2f64.powf(d - 1.0) * p * gamma(1.0 + 1.0 / p)?.powf(d)))
    }
}

/// w_i = C(n, i)^{-1/2}; with p = 2 the weighted norm is the Bombieri 2-norm.
pub fn bombieri_weights(n: usize) -> Result<Vec<f64>> {
    if n < 1 {
        return Err(Error::Domain("degree must be >= 1".into()));
    }
    Ok((0..=n).map(|i| binomial(n, i).powf(-0.5)).collect())
}

pub(crate) fn binomial(n: usize, k: usize) -> f64 {
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}
