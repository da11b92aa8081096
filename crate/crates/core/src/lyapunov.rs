//! Lyapunov exponent of the round-off triangle map: the Benettin estimate
//! from the tangent dynamics and the closed-form passage estimates.
//!
//! All closed forms use `|alpha|` inside logarithms.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::SQRT_2;

use crate::dynamics::{map_step, step_matrix, PhasePoint};
use crate::error::{invalid, Result};
use crate::potential::{MapParams, MAX_RADIUS};
use crate::rng::Stream;

pub const DEFAULT_SERIES_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LyapunovEstimates {
    pub lambda_numerical: f64,
    pub lambda_series: f64,
    pub lambda_simple: f64,
    pub lambda_max: f64,
    pub lambda_star: f64,
}

impl LyapunovEstimates {
    pub fn compute(params: &MapParams, steps: usize, n_traj: usize, seed: u64) -> Result<Self> {
        Ok(Self {
            lambda_numerical: lyapunov_numerical(params, steps, n_traj, seed)?,
            lambda_series: lyapunov_series(params, DEFAULT_SERIES_TOL)?,
            lambda_simple: lyapunov_simple(params)?,
            lambda_max: lyapunov_local_max(params)?,
            lambda_star: lyapunov_star(params)?,
        })
    }
}

fn require_rounded(params: &MapParams) -> Result<()> {
    if !(params.r > 0.0 && params.r < MAX_RADIUS) {
        return Err(invalid(format!("need 0 < r < √2/2, got r = {}", params.r)));
    }
    Ok(())
}

/// Benettin estimate: tangent vector renormalized to unit length after every
/// step, `ln` of the norms accumulated, averaged over `n_traj` uniform starts.
pub fn lyapunov_numerical(
    params: &MapParams,
    steps: usize,
    n_traj: usize,
    seed: u64,
) -> Result<f64> {
    require_rounded(params)?;
    if steps == 0 || n_traj == 0 {
        return Err(invalid("lyapunov_numerical needs steps > 0 and n_traj > 0"));
    }
    let rates: Vec<f64> = (0..n_traj)
        .into_par_iter()
        .map(|i| {
            let mut rng = Stream::for_cell(seed, i as u64);
            let mut pt = PhasePoint::new(rng.uniform_in(-1.0, 1.0), rng.uniform_in(-1.0, 1.0));
            let (mut dx, mut dp) = (1.0f64, 0.0f64);
            let mut sum = 0.0;
            for _ in 0..steps {
                let m = step_matrix(pt.x, params);
                let nx = m[0][0] * dx + m[0][1] * dp;
                let np = m[1][0] * dx + m[1][1] * dp;
                let norm = nx.hypot(np);
                sum += norm.ln();
                dx = nx / norm;
                dp = np / norm;
                pt = map_step(pt, params);
            }
            sum / steps as f64
        })
        .collect();
    Ok(rates.iter().sum::<f64>() / n_traj as f64)
}

/// `2 r² Σ_{τ≥1} (1 - √2 r)^(τ-1) ln(√2 |alpha| τ / r)`, truncated once the
/// geometric tail bound falls below `tol` times the partial sum.
pub fn lyapunov_series(params: &MapParams, tol: f64) -> Result<f64> {
    require_rounded(params)?;
    let p = SQRT_2 * params.r;
    let q = 1.0 - p;
    let gain = params.passage_gain();
    let mut sum = 0.0;
    let mut weight = 1.0; // q^(τ-1)
    let mut tau = 1u64;
    loop {
        sum += weight * (gain * tau as f64).ln();
        weight *= q;
        // ln(gain τ') <= ln(gain n) + (τ' - n)/n for τ' > n
        let n = tau as f64;
        let tail = (gain * n).ln().max(0.0) * weight / p + weight / (n * p * p);
        if tail <= tol * sum.abs() || weight == 0.0 {
            break;
        }
        tau += 1;
    }
    Ok(2.0 * params.r * params.r * sum)
}

/// `√2 r ln(|alpha| / r²)`: the passage estimate with `τ` replaced by its mean.
pub fn lyapunov_simple(params: &MapParams) -> Result<f64> {
    require_rounded(params)?;
    let arg = params.alpha.abs() / (params.r * params.r);
    if arg <= 1.0 {
        return Err(invalid("lyapunov_simple needs |alpha| / r² > 1"));
    }
    Ok(SQRT_2 * params.r * arg.ln())
}

/// Largest local exponent inside `E`: `ln(√2 |alpha| / r)`.
pub fn lyapunov_local_max(params: &MapParams) -> Result<f64> {
    require_rounded(params)?;
    let gain = params.passage_gain();
    if gain <= 1.0 {
        return Err(invalid("lyapunov_local_max needs √2 |alpha| / r > 1"));
    }
    Ok(gain.ln())
}

/// Rate dominating the LA average: `λ_max + ½ ln(√2 r)`.
pub fn lyapunov_star(params: &MapParams) -> Result<f64> {
    Ok(lyapunov_local_max(params)? + 0.5 * (SQRT_2 * params.r).ln())
}

/// `Π (a_k + b_k)`, the top eigenvalue of `Π M(a_k, b_k)` with `M(a, b) = [[a, b], [a, b]]`.
pub fn max_eigenvalue_product_identity(factors: &[(f64, f64)]) -> Result<f64> {
    if factors.is_empty() {
        return Err(invalid("need at least one factor"));
    }
    Ok(factors.iter().map(|(a, b)| a + b).product())
}

/// Passage-product construction: draw `m0` geometric return times, multiply
/// the passage matrices `M(g, g(τ_k - 1))` with renormalization, and divide
/// the log of the top eigenvalue (the trace, for this rank-one product) by
/// the elapsed time `Σ τ_k`.
pub fn passage_product_lyapunov(params: &MapParams, m0: usize, seed: u64) -> Result<f64> {
    require_rounded(params)?;
    if m0 == 0 {
        return Err(invalid("need m0 > 0"));
    }
    let p = SQRT_2 * params.r;
    let gain = params.passage_gain();
    let mut rng = Stream::new(seed);
    let mut prod = [[1.0, 0.0], [0.0, 1.0]];
    let mut log_scale = 0.0;
    let mut elapsed = 0u64;
    for _ in 0..m0 {
        // inversion of the geometric CDF
        let u = 1.0 - rng.uniform();
        let tau = ((u.ln() / (1.0 - p).ln()).floor() as u64 + 1).max(1);
        elapsed += tau;
        let (a, b) = (gain, gain * (tau as f64 - 1.0));
        let m = [[a, b], [a, b]];
        let mut next = [[0.0; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                next[i][j] = m[i][0] * prod[0][j] + m[i][1] * prod[1][j];
            }
        }
        let norm = next
            .iter()
            .flatten()
            .fold(0.0f64, |acc, v| acc.max(v.abs()));
        log_scale += norm.ln();
        prod = next.map(|row| row.map(|v| v / norm));
    }
    let trace = prod[0][0] + prod[1][1];
    Ok((log_scale + trace.ln()) / elapsed as f64)
}
