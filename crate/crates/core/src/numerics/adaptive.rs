//! Globally adaptive subdivision on the unit cube: Gauss–Kronrod (7, 15) in
//! one dimension, the Genz–Malik degree-7/5 embedded pair above that.
//!
//! Cell corners are probed for support membership. A cell whose nodes or
//! corners straddle the edge of the integrand's support gets an error
//! estimate of at least its volume times the largest sampled |f|, so it keeps
//! being split until the discontinuity is localised.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::{Integrand, IntegrationOptions, IntegrationResult, Pullback};
use crate::error::Result;

struct Cell {
    center: Vec<f64>,
    half: Vec<f64>,
    value: f64,
    error: f64,
    split_axis: usize,
}

impl PartialEq for Cell {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Cell {}
impl PartialOrd for Cell {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Cell {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Tracks support membership over the nodes of one cell.
#[derive(Default)]
struct SupportTally {
    inside: bool,
    outside: bool,
    max_abs: f64,
}

impl SupportTally {
    fn record(&mut self, v: Option<f64>) -> f64 {
        match v {
            Some(x) => {
                self.inside = true;
                self.max_abs = self.max_abs.max(x.abs());
                x
            }
            None => {
                self.outside = true;
                0.0
            }
        }
    }

    fn mixed(&self) -> bool {
        self.inside && self.outside
    }

    /// Error floor for a cell of the given volume holding `value`.
    fn floor(&self, vol: f64, value: f64) -> f64 {
        if self.mixed() {
            (0.5 * value.abs()).max(vol * self.max_abs).max(f64::MIN_POSITIVE)
        } else {
            0.0
        }
    }
}

/// Record support membership at the 2^d corners of a cell.
fn probe_corners<F: Integrand + ?Sized>(
    f: &Pullback<'_, F>,
    center: &[f64],
    half: &[f64],
    u: &mut [f64],
    t: &mut [f64],
    tally: &mut SupportTally,
) -> Result<()> {
    let d = center.len();
    for mask in 0..(1usize << d) {
        for i in 0..d {
            let s = if mask >> i & 1 == 1 { 1.0 } else { -1.0 };
            u[i] = center[i] + s * half[i];
        }
        tally.record(f.eval(u, t)?);
    }
    Ok(())
}

fn drive<R>(opts: &IntegrationOptions, first: Cell, evals_per_cell: usize, mut rule: R) -> Result<IntegrationResult>
where
    R: FnMut(Vec<f64>, Vec<f64>) -> Result<Cell>,
{
    let mut heap = BinaryHeap::new();
    let mut value = first.value;
    let mut error = first.error;
    let mut evals = evals_per_cell;
    heap.push(first);
    let mut since_resum = 0usize;

    loop {
        let tol = opts.abs_tol.max(opts.rel_tol * value.abs());
        if error <= tol {
            break;
        }
        if evals + 2 * evals_per_cell > opts.max_evals {
            break;
        }
        let Some(worst) = heap.pop() else { break };
        let axis = worst.split_axis;
        let mut half = worst.half.clone();
        half[axis] *= 0.5;
        if half[axis] < 1e-15 {
            // cannot refine further; keep the cell and stop
            heap.push(worst);
            break;
        }
        let mut c1 = worst.center.clone();
        let mut c2 = worst.center.clone();
        c1[axis] -= half[axis];
        c2[axis] += half[axis];
        let a = rule(c1, half.clone())?;
        let b = rule(c2, half)?;
        evals += 2 * evals_per_cell;
        value += a.value + b.value - worst.value;
        error += a.error + b.error - worst.error;
        heap.push(a);
        heap.push(b);

        since_resum += 1;
        if since_resum >= 256 {
            since_resum = 0;
            value = heap.iter().map(|c| c.value).sum();
            error = heap.iter().map(|c| c.error).sum();
        }
    }

    let value: f64 = heap.iter().map(|c| c.value).sum();
    let error: f64 = heap.iter().map(|c| c.error).sum();
    let tol = opts.abs_tol.max(opts.rel_tol * value.abs());
    Ok(IntegrationResult {
        value,
        error_estimate: error,
        evaluations: evals,
        converged: error <= tol,
    })
}

const GK_XK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const GK_WK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_728,
];
// Gauss weights for the odd Kronrod nodes (indices 1, 3, 5, 7).
const GK_WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

pub(super) fn gauss_kronrod<F: Integrand + ?Sized>(
    f: &Pullback<'_, F>,
    opts: &IntegrationOptions,
) -> Result<IntegrationResult> {
    let mut t = [0.0];
    let mut u = [0.0];
    let mut rule = |center: Vec<f64>, half: Vec<f64>| -> Result<Cell> {
        let (c, h) = (center[0], half[0]);
        let mut tally = SupportTally::default();
        probe_corners(f, &center, &half, &mut u, &mut t, &mut tally)?;
        let mut kronrod = 0.0;
        let mut gauss = 0.0;
        for (j, (&x, &wk)) in GK_XK.iter().zip(&GK_WK).enumerate() {
            let pts: &[f64] = if x == 0.0 { &[0.0] } else { &[-x, x] };
            for &s in pts {
                let v = tally.record(f.eval(&[c + h * s], &mut t)?);
                kronrod += wk * v;
                if j % 2 == 1 {
                    gauss += GK_WG[j / 2] * v;
                }
            }
        }
        let value = kronrod * h;
        let error = ((kronrod - gauss) * h).abs().max(tally.floor(2.0 * h, value));
        Ok(Cell {
            center,
            half,
            value,
            error,
            split_axis: 0,
        })
    };
    let first = rule(vec![0.5], vec![0.5])?;
    drive(opts, first, 17, rule)
}

const LAMBDA2: f64 = 0.358_568_582_800_318_1; // sqrt(9/70)
const LAMBDA4: f64 = 0.948_683_298_050_513_8; // sqrt(9/10)
const LAMBDA5: f64 = 0.688_247_201_611_685_3; // sqrt(9/19)

pub(super) fn genz_malik<F: Integrand + ?Sized>(
    f: &Pullback<'_, F>,
    d: usize,
    opts: &IntegrationOptions,
) -> Result<IntegrationResult> {
    let df = d as f64;
    let w7 = [
        (12824.0 - 9120.0 * df + 400.0 * df * df) / 19683.0,
        980.0 / 6561.0,
        (1820.0 - 400.0 * df) / 19683.0,
        200.0 / 19683.0,
        6859.0 / 19683.0 / 2f64.powi(d as i32),
    ];
    let w5 = [
        (729.0 - 950.0 * df + 50.0 * df * df) / 729.0,
        245.0 / 486.0,
        (265.0 - 100.0 * df) / 1458.0,
        25.0 / 729.0,
    ];
    let ratio = (LAMBDA2 * LAMBDA2) / (LAMBDA4 * LAMBDA4);
    let evals_per_cell = (2 << d) + 2 * d * d + 2 * d + 1;

    let mut u = vec![0.0; d];
    let mut t = vec![0.0; d];
    let mut rule = |center: Vec<f64>, half: Vec<f64>| -> Result<Cell> {
        let mut tally = SupportTally::default();
        probe_corners(f, &center, &half, &mut u, &mut t, &mut tally)?;
        let mut at = |u: &mut Vec<f64>, t: &mut Vec<f64>| -> Result<f64> { Ok(tally.record(f.eval(u, t)?)) };
        u.copy_from_slice(&center);
        let f0 = at(&mut u, &mut t)?;
        let (mut s2, mut s3, mut s4, mut s5) = (0.0, 0.0, 0.0, 0.0);
        let mut best_axis = 0;
        let mut best_diff = -1.0;
        for i in 0..d {
            u[i] = center[i] - LAMBDA2 * half[i];
            let a = at(&mut u, &mut t)?;
            u[i] = center[i] + LAMBDA2 * half[i];
            let b = at(&mut u, &mut t)?;
            u[i] = center[i] - LAMBDA4 * half[i];
            let c = at(&mut u, &mut t)?;
            u[i] = center[i] + LAMBDA4 * half[i];
            let e = at(&mut u, &mut t)?;
            u[i] = center[i];
            s2 += a + b;
            s3 += c + e;
            let diff = ((a + b - 2.0 * f0) - ratio * (c + e - 2.0 * f0)).abs();
            // prefer the widest axis among equal differences
            let better =
                diff > best_diff * (1.0 + 1e-12) || (diff >= best_diff * (1.0 - 1e-12) && half[i] > half[best_axis]);
            if better {
                best_diff = diff;
                best_axis = i;
            }
        }
        for i in 0..d {
            for j in (i + 1)..d {
                for (si, sj) in [(-1.0, -1.0), (-1.0, 1.0), (1.0, -1.0), (1.0, 1.0)] {
                    u[i] = center[i] + si * LAMBDA4 * half[i];
                    u[j] = center[j] + sj * LAMBDA4 * half[j];
                    s4 += at(&mut u, &mut t)?;
                }
                u[i] = center[i];
                u[j] = center[j];
            }
        }
        for mask in 0..(1usize << d) {
            for i in 0..d {
                let s = if mask >> i & 1 == 1 { 1.0 } else { -1.0 };
                u[i] = center[i] + s * LAMBDA5 * half[i];
            }
            s5 += at(&mut u, &mut t)?;
        }
        let vol: f64 = half.iter().map(|h| 2.0 * h).product();
        let i7 = vol * (w7[0] * f0 + w7[1] * s2 + w7[2] * s3 + w7[3] * s4 + w7[4] * s5);
        let i5 = vol * (w5[0] * f0 + w5[1] * s2 + w5[2] * s3 + w5[3] * s4);
        let error = (i7 - i5).abs().max(tally.floor(vol, i7));
        // Flat cells straddling a support edge give no difference signal.
        if best_diff == 0.0 {
            best_axis = (0..d).max_by(|&a, &b| half[a].total_cmp(&half[b])).unwrap_or(0);
        }
        Ok(Cell {
            center,
            half,
            value: i7,
            error,
            split_axis: best_axis,
        })
    };
    let first = rule(vec![0.5; d], vec![0.5; d])?;
    drive(opts, first, evals_per_cell, rule)
}
