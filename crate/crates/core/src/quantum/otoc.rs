//! Averaged quantum OTOC `AL_q(t) = (1/N) Σ_k ln ‖[x̂(t), p̂] ψ_k‖²`.

use num_complex::Complex64;
use rayon::prelude::*;

use super::engine::{build_coherent_state, FloquetSpec};
use crate::analysis::{fit_growth_rate, GrowthFit};
use crate::error::{invalid, Error, Result};
use crate::potential::MapParams;
use crate::rng::uniform_centers;
use crate::series::{AveragingScheme, OtocSeries, SeriesMeta, SeriesSource};

pub const UNDERFLOW_FLOOR: f64 = 1e-300;

#[derive(Debug, Clone)]
pub struct QuantumOtocJob {
    pub spec: FloquetSpec,
    pub centers: Vec<(f64, f64)>,
    pub steps: usize,
    /// Seed the centers were drawn with; recorded in the output metadata.
    pub seed: u64,
}

impl QuantumOtocJob {
    pub fn new(
        spec: FloquetSpec,
        centers: Vec<(f64, f64)>,
        steps: usize,
        seed: u64,
    ) -> Result<Self> {
        if centers.is_empty() {
            return Err(invalid("quantum OTOC needs at least one center"));
        }
        Ok(Self {
            spec,
            centers,
            steps,
            seed,
        })
    }

    /// `n` centers drawn uniformly on the torus from `seed`.
    pub fn with_random_centers(
        spec: FloquetSpec,
        n: usize,
        steps: usize,
        seed: u64,
    ) -> Result<Self> {
        Self::new(spec, uniform_centers(n, seed), steps, seed)
    }
}

fn distance_sqr(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(u, v)| (u - v).norm_sqr()).sum()
}

/// `‖[x̂(t), p̂] ψ‖²` for `t = 0..=steps`, one center.
fn center_values(spec: &FloquetSpec, center: (f64, f64), steps: usize) -> Vec<f64> {
    let mut prop = spec.propagator();
    let mut a = build_coherent_state(center, spec).amplitudes;
    let mut b = a.clone();
    prop.momentum(&mut b);
    let mut u = vec![Complex64::default(); a.len()];
    let mut v = vec![Complex64::default(); a.len()];
    let mut out = Vec::with_capacity(steps + 1);
    for t in 0..=steps {
        // u = U^-t x̂ U^t p̂ψ, v = p̂ U^-t x̂ U^t ψ
        u.copy_from_slice(&b);
        v.copy_from_slice(&a);
        prop.position(&mut u);
        prop.position(&mut v);
        for _ in 0..t {
            prop.backward(&mut u);
            prop.backward(&mut v);
        }
        prop.momentum(&mut v);
        out.push(distance_sqr(&u, &v));
        if t < steps {
            prop.forward(&mut a);
            prop.forward(&mut b);
        }
    }
    out
}

/// Per-center values `value_k(t)`, indexed `[k][t]`.
pub fn otoc_quantum_values(job: &QuantumOtocJob) -> Result<Vec<Vec<f64>>> {
    if job.centers.is_empty() {
        return Err(invalid("quantum OTOC needs at least one center"));
    }
    let values: Vec<Vec<f64>> = job
        .centers
        .par_iter()
        .map(|&c| center_values(&job.spec, c, job.steps))
        .collect();
    for (k, row) in values.iter().enumerate() {
        if let Some(t) = row.iter().position(|&v| v.is_nan() || v < UNDERFLOW_FLOOR) {
            return Err(Error::NumericalUnderflow {
                center: k,
                time: t,
                value: row[t],
            });
        }
    }
    Ok(values)
}

pub fn otoc_quantum(job: &QuantumOtocJob) -> Result<OtocSeries> {
    let per_center = otoc_quantum_values(job)?;
    let n = per_center.len() as f64;
    let values = (0..=job.steps)
        .map(|t| per_center.iter().map(|row| row[t].ln()).sum::<f64>() / n)
        .collect();
    Ok(OtocSeries {
        scheme: AveragingScheme::AL,
        source: SeriesSource::Quantum,
        times: (0..=job.steps).collect(),
        values,
        meta: SeriesMeta {
            r: job.spec.params().r,
            hbar: Some(job.spec.hbar()),
            n_centers: job.centers.len(),
            samples_per_center: 1,
            seed: job.seed,
            prefactor: false,
            excluded: 0,
        },
    })
}

/// Fitted `AL_q` growth rate for each `ħ = π⁻¹ 2^-n`, in the order given.
/// The same centers are used at every `ħ`.
pub fn growth_rate_vs_hbar(
    hbar_exponents: &[u32],
    params: &MapParams,
    n_centers: usize,
    steps: usize,
    window: (usize, usize),
    seed: u64,
) -> Result<Vec<(f64, GrowthFit)>> {
    if hbar_exponents.len() < 2 {
        return Err(invalid(
            "growth-rate sweep needs at least two values of hbar",
        ));
    }
    let centers = uniform_centers(n_centers, seed);
    hbar_exponents
        .iter()
        .map(|&n| {
            let spec = FloquetSpec::from_hbar_exponent(n, *params)?;
            let hbar = spec.hbar();
            let series = otoc_quantum(&QuantumOtocJob::new(spec, centers.clone(), steps, seed)?)?;
            Ok((hbar, fit_growth_rate(&series, window)?))
        })
        .collect()
}
