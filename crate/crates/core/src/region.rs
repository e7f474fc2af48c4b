//! Finite unions of closed boxes in R^k × C_+^l.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::Complex;

/// Closed interval; endpoints may be infinite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if lo.is_nan() || hi.is_nan() || lo > hi {
            return Err(Error::Domain(format!("malformed interval [{lo}, {hi}]")));
        }
        Ok(Self { lo, hi })
    }

    pub fn real_line() -> Self {
        Self {
            lo: f64::NEG_INFINITY,
            hi: f64::INFINITY,
        }
    }

    #[inline]
    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn length(&self) -> f64 {
        self.hi - self.lo
    }

    fn interiors_overlap(&self, other: &Interval) -> bool {
        self.lo < other.hi && other.lo < self.hi
    }
}

/// Closed rectangle [re] × [im] in the closed upper half-plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub re: Interval,
    pub im: Interval,
}

impl Rect {
    pub fn new(re: Interval, im: Interval) -> Result<Self> {
        if im.lo < 0.0 {
            return Err(Error::Domain(format!(
                "rectangle must lie in the upper half-plane (im_lo = {})",
                im.lo
            )));
        }
        Ok(Self { re, im })
    }

    #[inline]
    pub fn contains(&self, z: Complex) -> bool {
        self.re.contains(z.re) && self.im.contains(z.im)
    }

    pub fn area(&self) -> f64 {
        self.re.length() * self.im.length()
    }
}

/// One product box: k real intervals then l upper rectangles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionBox {
    pub reals: Vec<Interval>,
    pub uppers: Vec<Rect>,
}

impl RegionBox {
    pub fn new(reals: Vec<Interval>, uppers: Vec<Rect>) -> Self {
        Self { reals, uppers }
    }

    pub fn volume(&self) -> f64 {
        let r: f64 = self.reals.iter().map(Interval::length).product();
        let u: f64 = self.uppers.iter().map(Rect::area).product();
        r * u
    }

    fn interiors_overlap(&self, other: &RegionBox) -> bool {
        self.reals.iter().zip(&other.reals).all(|(a, b)| a.interiors_overlap(b))
            && self
                .uppers
                .iter()
                .zip(&other.uppers)
                .all(|(a, b)| a.re.interiors_overlap(&b.re) && a.im.interiors_overlap(&b.im))
    }
}

/// Union of boxes with pairwise disjoint interiors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Region {
    k: usize,
    l: usize,
    boxes: Vec<RegionBox>,
}

impl Region {
    pub fn new(k: usize, l: usize, boxes: Vec<RegionBox>) -> Result<Self> {
        if k + l == 0 {
            return Err(Error::Domain("region needs at least one slot".into()));
        }
        for b in &boxes {
            if b.reals.len() != k || b.uppers.len() != l {
                return Err(Error::Domain(format!(
                    "box has {} real and {} complex slots, expected {k} and {l}",
                    b.reals.len(),
                    b.uppers.len()
                )));
            }
        }
        for (i, a) in boxes.iter().enumerate() {
            if boxes[i + 1..].iter().any(|b| a.interiors_overlap(b)) {
                return Err(Error::Domain("region boxes overlap".into()));
            }
        }
        Ok(Self { k, l, boxes })
    }

    /// A single real interval (k = 1, l = 0).
    pub fn interval(lo: f64, hi: f64) -> Result<Self> {
        Self::new(1, 0, vec![RegionBox::new(vec![Interval::new(lo, hi)?], vec![])])
    }

    /// A single upper rectangle (k = 0, l = 1).
    pub fn rect(re_lo: f64, re_hi: f64, im_lo: f64, im_hi: f64) -> Result<Self> {
        Self::new(
            0,
            1,
            vec![RegionBox::new(
                vec![],
                vec![Rect::new(Interval::new(re_lo, re_hi)?, Interval::new(im_lo, im_hi)?)?],
            )],
        )
    }

    /// Boxes from concatenated numbers: `lo hi` per real slot, then
    /// `re_lo re_hi im_lo im_hi` per complex slot, repeated once per box.
    pub fn from_flat(k: usize, l: usize, values: &[f64]) -> Result<Self> {
        let width = 2 * k + 4 * l;
        if width == 0 || values.is_empty() || !values.len().is_multiple_of(width) {
            return Err(Error::Domain(format!(
                "k = {k}, l = {l} needs a positive multiple of {width} numbers, got {}",
                values.len()
            )));
        }
        let boxes = values
            .chunks(width)
            .map(|b| {
                let reals = (0..k)
                    .map(|i| Interval::new(b[2 * i], b[2 * i + 1]))
                    .collect::<Result<Vec<_>>>()?;
                let uppers = (0..l)
                    .map(|j| {
                        let o = 2 * k + 4 * j;
                        Rect::new(Interval::new(b[o], b[o + 1])?, Interval::new(b[o + 2], b[o + 3])?)
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(RegionBox::new(reals, uppers))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(k, l, boxes)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn boxes(&self) -> &[RegionBox] {
        &self.boxes
    }

    /// Check the region against a degree: 0 < k + 2l ≤ n.
    pub fn check_degree(&self, n: usize) -> Result<()> {
        if self.k + 2 * self.l > n {
            return Err(Error::Domain(format!(
                "k + 2l = {} exceeds the degree {n}",
                self.k + 2 * self.l
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn from_flat_splits_boxes() {
        let r = Region::from_flat(1, 1, &[0.0, 1.0, -1.0, 1.0, 0.0, 2.0, 1.0, 2.0, -1.0, 1.0, 0.0, 2.0]).unwrap();
        assert_eq!(r.boxes().len(), 2);
        assert_eq!(r.boxes()[1].reals[0], Interval::new(1.0, 2.0).unwrap());
        assert!(Region::from_flat(1, 0, &[0.0, 1.0, 2.0]).is_err());
        assert!(Region::from_flat(1, 0, &[]).is_err());
        assert!(Region::from_flat(0, 1, &[0.0, 1.0, -1.0, 1.0]).is_err());
    }

    #[test]
    fn validation() {
        assert!(Interval::new(1.0, 0.0).is_err());
        assert!(Region::rect(0.0, 1.0, -0.5, 1.0).is_err());
        let a = RegionBox::new(vec![Interval::new(0.0, 1.0).unwrap()], vec![]);
        let b = RegionBox::new(vec![Interval::new(0.5, 2.0).unwrap()], vec![]);
        let c = RegionBox::new(vec![Interval::new(1.0, 2.0).unwrap()], vec![]);
        assert!(Region::new(1, 0, vec![a.clone(), b]).is_err());
        // touching boxes are fine
        assert!(Region::new(1, 0, vec![a.clone(), c]).is_ok());
        assert!(Region::new(0, 1, vec![a]).is_err());
        assert!(Region::new(0, 0, vec![]).is_err());
        let r = Region::interval(0.0, 1.0).unwrap();
        assert!(r.check_degree(1).is_ok());
        let r = Region::rect(0.0, 1.0, 0.0, 1.0).unwrap();
        assert!(r.check_degree(1).is_err());
    }
}
