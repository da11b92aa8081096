//! Classical OTOC `(∂x(t)/∂x(0))²` averaged over Gaussian ensembles (or the
//! whole torus) in the AL, LA and LL orders.
//!
//! Every sample carries a [`TangentFrame`], so `ln (∂x/∂x₀)²` is available
//! long after the raw derivative would overflow. A-averages are accumulated
//! with log-sum-exp. Work is split by center; per-center partial sums are
//! gathered by index and reduced sequentially, so the result does not depend
//! on the number of worker threads.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{map_step, step_matrix, PhasePoint, TangentFrame};
use crate::error::{invalid, Error, Result};
use crate::logspace::LogSumExp;
use crate::potential::MapParams;
use crate::rng::Stream;
use crate::series::{AveragingScheme, OtocSeries, SeriesMeta, SeriesSource};

pub const DEFAULT_CENTERS: usize = 100;
pub const DEFAULT_SAMPLES: usize = 1000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianEnsembleSpec {
    pub centers: Vec<(f64, f64)>,
    pub hbar_c: f64,
    pub samples_per_center: usize,
    pub seed: u64,
    /// Add `2 ln ħ_c` so the classical series starts where the quantum one does.
    pub include_hbar_prefactor: bool,
}

impl GaussianEnsembleSpec {
    pub fn new(
        centers: Vec<(f64, f64)>,
        hbar_c: f64,
        samples_per_center: usize,
        seed: u64,
    ) -> Result<Self> {
        let spec = Self {
            centers,
            hbar_c,
            samples_per_center,
            seed,
            include_hbar_prefactor: true,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_prefactor(mut self, on: bool) -> Self {
        self.include_hbar_prefactor = on;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.centers.is_empty() {
            return Err(invalid("ensemble needs at least one center"));
        }
        if self.samples_per_center == 0 {
            return Err(invalid("ensemble needs at least one sample per center"));
        }
        if !(self.hbar_c > 0.0 && self.hbar_c.is_finite()) {
            return Err(invalid(format!(
                "hbar_c must be positive, got {}",
                self.hbar_c
            )));
        }
        Ok(())
    }

    /// `σ = √(ħ_c / 2)`.
    pub fn sigma(&self) -> f64 {
        (self.hbar_c / 2.0).sqrt()
    }
}

/// The `M` initial points of center `k`, drawn from the isotropic Gaussian of
/// width `σ` and wrapped onto the torus.
pub fn sample_ensemble(spec: &GaussianEnsembleSpec, center_index: usize) -> Vec<PhasePoint> {
    let (xk, pk) = spec.centers[center_index];
    let sigma = spec.sigma();
    let mut rng = Stream::for_cell(spec.seed, center_index as u64);
    (0..spec.samples_per_center)
        .map(|_| {
            let (zx, zp) = rng.normal_pair();
            PhasePoint::new(xk + sigma * zx, pk + sigma * zp)
        })
        .collect()
}

/// Per-time partial sums for one group of samples.
#[derive(Debug, Clone)]
struct Partial {
    sum_log: Vec<f64>,
    lse: Vec<LogSumExp>,
    count: Vec<u64>,
    excluded: u64,
}

impl Partial {
    fn new(steps: usize) -> Self {
        Self {
            sum_log: vec![0.0; steps + 1],
            lse: vec![LogSumExp::default(); steps + 1],
            count: vec![0; steps + 1],
            excluded: 0,
        }
    }

    fn accumulate(&mut self, start: PhasePoint, params: &MapParams) {
        let steps = self.count.len() - 1;
        let mut pt = start;
        let mut frame = TangentFrame::identity();
        for t in 0..=steps {
            match frame.log_dxdx0_sq() {
                Some(l) => {
                    self.sum_log[t] += l;
                    self.lse[t].push(l);
                    self.count[t] += 1;
                }
                None => self.excluded += 1,
            }
            if t < steps {
                frame.apply(&step_matrix(pt.x, params));
                pt = map_step(pt, params);
            }
        }
    }
}

/// All three averages computed from one set of samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassicalOtoc {
    pub al: OtocSeries,
    pub la: OtocSeries,
    pub ll: OtocSeries,
}

impl ClassicalOtoc {
    pub fn get(&self, scheme: AveragingScheme) -> &OtocSeries {
        match scheme {
            AveragingScheme::AL => &self.al,
            AveragingScheme::LA => &self.la,
            AveragingScheme::LL => &self.ll,
        }
    }

    pub fn into_scheme(self, scheme: AveragingScheme) -> OtocSeries {
        match scheme {
            AveragingScheme::AL => self.al,
            AveragingScheme::LA => self.la,
            AveragingScheme::LL => self.ll,
        }
    }
}

pub fn otoc_classical_all(
    spec: &GaussianEnsembleSpec,
    params: &MapParams,
    steps: usize,
) -> Result<ClassicalOtoc> {
    spec.validate()?;
    params.validate()?;
    let partials: Vec<Partial> = (0..spec.centers.len())
        .into_par_iter()
        .map(|k| {
            let mut part = Partial::new(steps);
            for start in sample_ensemble(spec, k) {
                part.accumulate(start, params);
            }
            part
        })
        .collect();

    let offset = if spec.include_hbar_prefactor {
        2.0 * spec.hbar_c.ln()
    } else {
        0.0
    };
    let n_centers = partials.len() as f64;
    let mut al = Vec::with_capacity(steps + 1);
    let mut la = Vec::with_capacity(steps + 1);
    let mut ll = Vec::with_capacity(steps + 1);
    for t in 0..=steps {
        let mut al_sum = 0.0;
        let mut total_log = 0.0;
        let mut total = 0u64;
        let mut all = LogSumExp::default();
        for (k, part) in partials.iter().enumerate() {
            if part.count[t] == 0 {
                return Err(Error::DegenerateEnsemble { center: k, time: t });
            }
            al_sum += part.lse[t].value() - (part.count[t] as f64).ln();
            total_log += part.sum_log[t];
            total += part.count[t];
            all.merge(&part.lse[t]);
        }
        al.push(al_sum / n_centers + offset);
        la.push(all.value() - (total as f64).ln() + offset);
        ll.push(total_log / total as f64 + offset);
    }

    let meta = SeriesMeta {
        r: params.r,
        hbar: Some(spec.hbar_c),
        n_centers: spec.centers.len(),
        samples_per_center: spec.samples_per_center,
        seed: spec.seed,
        prefactor: spec.include_hbar_prefactor,
        excluded: partials.iter().map(|p| p.excluded).sum(),
    };
    let times: Vec<usize> = (0..=steps).collect();
    let make = |scheme, values| OtocSeries {
        scheme,
        source: SeriesSource::Classical,
        times: times.clone(),
        values,
        meta: meta.clone(),
    };
    Ok(ClassicalOtoc {
        al: make(AveragingScheme::AL, al),
        la: make(AveragingScheme::LA, la),
        ll: make(AveragingScheme::LL, ll),
    })
}

pub fn otoc_classical(
    spec: &GaussianEnsembleSpec,
    scheme: AveragingScheme,
    params: &MapParams,
    steps: usize,
) -> Result<OtocSeries> {
    Ok(otoc_classical_all(spec, params, steps)?.into_scheme(scheme))
}

const PHASE_SPACE_CHUNK: usize = 4096;

/// LL or LA with the Gaussian integrals replaced by uniform sampling of the
/// whole torus. No `ħ` prefactor.
pub fn otoc_phase_space(
    params: &MapParams,
    scheme: AveragingScheme,
    n_samples: usize,
    steps: usize,
    seed: u64,
) -> Result<OtocSeries> {
    if scheme == AveragingScheme::AL {
        return Err(invalid("the phase-space average has no AL form"));
    }
    if n_samples == 0 {
        return Err(invalid("need at least one sample"));
    }
    params.validate()?;
    let chunks = n_samples.div_ceil(PHASE_SPACE_CHUNK);
    let partials: Vec<Partial> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = Stream::for_cell(seed, c as u64);
            let n = PHASE_SPACE_CHUNK.min(n_samples - c * PHASE_SPACE_CHUNK);
            let mut part = Partial::new(steps);
            for _ in 0..n {
                let start = PhasePoint::new(rng.uniform_in(-1.0, 1.0), rng.uniform_in(-1.0, 1.0));
                part.accumulate(start, params);
            }
            part
        })
        .collect();

    let mut values = Vec::with_capacity(steps + 1);
    for t in 0..=steps {
        let total: u64 = partials.iter().map(|p| p.count[t]).sum();
        if total == 0 {
            return Err(Error::DegenerateEnsemble { center: 0, time: t });
        }
        let v = match scheme {
            AveragingScheme::LL => {
                partials.iter().map(|p| p.sum_log[t]).sum::<f64>() / total as f64
            }
            _ => {
                let mut all = LogSumExp::default();
                partials.iter().for_each(|p| all.merge(&p.lse[t]));
                all.value() - (total as f64).ln()
            }
        };
        values.push(v);
    }
    Ok(OtocSeries {
        scheme,
        source: SeriesSource::PhaseSpace,
        times: (0..=steps).collect(),
        values,
        meta: SeriesMeta {
            r: params.r,
            hbar: None,
            n_centers: 1,
            samples_per_center: n_samples,
            seed,
            prefactor: false,
            excluded: partials.iter().map(|p| p.excluded).sum(),
        },
    })
}

/// `t* = (1/λ) ln(r / √ħ_c)`: the step at which an ensemble of width `√ħ_c`
/// growing at rate `λ` reaches the round-off radius. Negative when the
/// ensemble starts wider than `r`.
pub fn crossover_time(r: f64, hbar_c: f64, lambda: f64) -> Result<f64> {
    if !(r > 0.0 && hbar_c > 0.0 && lambda > 0.0) {
        return Err(invalid(
            "crossover_time needs r, hbar_c and lambda all positive",
        ));
    }
    Ok((r / hbar_c.sqrt()).ln() / lambda)
}
