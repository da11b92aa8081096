//! Growth-rate fits and quantum-classical comparison helpers.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::series::OtocSeries;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrowthFit {
    pub slope: f64,
    pub intercept: f64,
    pub window: (usize, usize),
    pub rms_residual: f64,
}

impl GrowthFit {
    pub fn at(&self, t: f64) -> f64 {
        self.intercept + self.slope * t
    }
}

/// Ordinary least squares through `(t, value)` for `t` in the closed window.
pub fn fit_growth_rate(series: &OtocSeries, window: (usize, usize)) -> Result<GrowthFit> {
    let (t_min, t_max) = window;
    if t_min >= t_max {
        return Err(invalid(format!("fit window [{t_min}, {t_max}] is empty")));
    }
    let pts: Vec<(f64, f64)> = series
        .times
        .iter()
        .zip(&series.values)
        .filter(|(&t, _)| t >= t_min && t <= t_max)
        .map(|(&t, &v)| (t as f64, v))
        .collect();
    if pts.len() < 3 {
        return Err(Error::InsufficientPoints {
            t_min,
            t_max,
            found: pts.len(),
        });
    }
    let n = pts.len() as f64;
    let mt = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let mv = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|(t, v)| (t - mt) * (v - mv)).sum();
    let sxx: f64 = pts.iter().map(|(t, _)| (t - mt).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = mv - slope * mt;
    let rms = (pts
        .iter()
        .map(|(t, v)| (v - intercept - slope * t).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    Ok(GrowthFit {
        slope,
        intercept,
        window,
        rms_residual: rms,
    })
}

/// Time at which two fitted lines cross; `None` for parallel lines.
pub fn fit_intersection(a: &GrowthFit, b: &GrowthFit) -> Option<f64> {
    let ds = a.slope - b.slope;
    if ds == 0.0 {
        return None;
    }
    Some((b.intercept - a.intercept) / ds)
}

/// Early window `[1, min(5, t*-1)]` and late window `[t*+1, t_end]`, with
/// `t*` rounded up to the next step.
pub fn default_windows(t_star: f64, t_end: usize) -> ((usize, usize), (usize, usize)) {
    let ts = t_star.max(0.0).ceil() as usize;
    let early = (1, 5.min(ts.saturating_sub(1)).max(1));
    let late = ((ts + 1).min(t_end), t_end);
    (early, late)
}

/// `|AL_q - AL_c| / (AL_q + AL_c)` at `t0`.
pub fn delta_qc(al_q: &OtocSeries, al_c: &OtocSeries, t0: usize) -> Result<f64> {
    let q = al_q
        .value_at(t0)
        .ok_or_else(|| invalid(format!("quantum series has no value at t = {t0}")))?;
    let c = al_c
        .value_at(t0)
        .ok_or_else(|| invalid(format!("classical series has no value at t = {t0}")))?;
    let den = q + c;
    if den == 0.0 {
        return Err(Error::DivisionByZero(t0));
    }
    Ok((q - c).abs() / den)
}

/// Round-off radius `1/√D` paired with a Hilbert dimension `D`.
pub fn matched_classical_r(dim: usize) -> Result<f64> {
    if dim == 0 {
        return Err(invalid("dimension must be positive"));
    }
    Ok(1.0 / (dim as f64).sqrt())
}

/// `t_E = |ln ħ| / λ`.
pub fn ehrenfest_estimate(hbar: f64, lambda: f64) -> Result<f64> {
    if !(hbar > 0.0 && hbar < 1.0) {
        return Err(invalid(format!("hbar must lie in (0, 1), got {hbar}")));
    }
    if lambda.is_nan() || lambda <= 0.0 {
        return Err(invalid(format!("lambda must be positive, got {lambda}")));
    }
    Ok(hbar.ln().abs() / lambda)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRecord {
    pub hbar: f64,
    pub dim: usize,
    pub r_quantum: f64,
    pub r_classical: f64,
    /// `(t0, Δ_qc(t0))`.
    pub delta_qc: Vec<(usize, f64)>,
    pub ehrenfest: f64,
}

impl ComparisonRecord {
    pub fn build(
        al_q: &OtocSeries,
        al_c: &OtocSeries,
        dim: usize,
        hbar: f64,
        t0s: &[usize],
        lambda: f64,
    ) -> Result<Self> {
        let delta = t0s
            .iter()
            .map(|&t| Ok((t, delta_qc(al_q, al_c, t)?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            hbar,
            dim,
            r_quantum: al_q.meta.r,
            r_classical: al_c.meta.r,
            delta_qc: delta,
            ehrenfest: ehrenfest_estimate(hbar, lambda)?,
        })
    }
}
