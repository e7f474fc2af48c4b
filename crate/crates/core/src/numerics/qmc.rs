//! Randomised quasi-Monte Carlo: independent Owen-scrambled Sobol replicates,
//! run in parallel, with the spread of the replicate means as error estimate.

use rand::Rng;
use rayon::prelude::*;

use super::{Integrand, IntegrationOptions, IntegrationResult, Pullback};
use crate::error::{Error, Result};

const MIN_REPLICATES: usize = 16;
// sobol_burley supports 2^16 points per scrambled sequence
const MAX_PER_REPLICATE: usize = 1 << 16;
const MAX_DIM: usize = sobol_burley::NUM_DIMENSIONS as usize;

pub(super) fn sobol<F: Integrand + ?Sized>(
    f: &Pullback<'_, F>,
    d: usize,
    opts: &IntegrationOptions,
) -> Result<IntegrationResult> {
    if d > MAX_DIM {
        return Err(Error::Unsupported(format!(
            "quasi-random integration supports at most {MAX_DIM} dimensions"
        )));
    }
    let per_rep = (opts.max_evals / MIN_REPLICATES).clamp(1, MAX_PER_REPLICATE);
    let replicates = (opts.max_evals / per_rep).max(MIN_REPLICATES);
    let per_rep = per_rep as u32;
    let mut rng = opts.rng.rng();
    let seeds: Vec<u32> = (0..replicates).map(|_| rng.random()).collect();

    let means = seeds
        .par_iter()
        .map(|&seed| -> Result<f64> {
            let mut u = vec![0.0; d];
            let mut t = vec![0.0; d];
            let mut sum = 0.0;
            for i in 0..per_rep {
                for (j, uj) in u.iter_mut().enumerate() {
                    // 24-bit points; the half-step offset keeps them off the cube boundary
                    *uj = f64::from(sobol_burley::sample(i, j as u32, seed)) + 0.5 / 16_777_216.0;
                }
                sum += f.eval(&u, &mut t)?.unwrap_or(0.0);
            }
            Ok(sum / f64::from(per_rep))
        })
        .collect::<Result<Vec<f64>>>()?;

    let r = replicates as f64;
    let mean = means.iter().sum::<f64>() / r;
    let var = means.iter().map(|m| (m - mean).powi(2)).sum::<f64>() / (r - 1.0);
    let error = (var / r).sqrt();
    let tol = opts.abs_tol.max(opts.rel_tol * mean.abs());
    Ok(IntegrationResult {
        value: mean,
        error_estimate: error,
        evaluations: per_rep as usize * replicates,
        converged: error <= tol.max(1e-3 * mean.abs()),
    })
}
