//! The round-off triangle map on the torus and its tangent map.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::{LN_2, SQRT_2};

use crate::error::{invalid, Result};
use crate::potential::{classify_region, eval_vp, vpp_unchecked, MapParams, RegionTag};
use crate::rng::Stream;

/// Reduce into `[-1, 1)` as `x - 2 floor((x + 1) / 2)`.
#[inline]
pub fn wrap(x: f64) -> f64 {
    let w = x - 2.0 * ((x + 1.0) / 2.0).floor();
    // rounding can land exactly on +1
    if w >= 1.0 {
        w - 2.0
    } else {
        w
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhasePoint {
    pub x: f64,
    pub p: f64,
}

impl PhasePoint {
    pub fn new(x: f64, p: f64) -> Self {
        Self {
            x: wrap(x),
            p: wrap(p),
        }
    }
}

#[inline]
pub fn map_step(point: PhasePoint, params: &MapParams) -> PhasePoint {
    let p = wrap(point.p - eval_vp(point.x, params));
    let x = wrap(point.x + p);
    PhasePoint { x, p }
}

/// One-step Jacobian `[[1 - V'', 1], [-V'', 1]]` at `x`.
#[inline]
pub fn step_matrix(x: f64, params: &MapParams) -> [[f64; 2]; 2] {
    let k = vpp_unchecked(x, params);
    [[1.0 - k, 1.0], [-k, 1.0]]
}

/// Cumulative Jacobian of the map in extended range.
///
/// Stored as `J = Q(θ) R` with `R = [[e^a, e^a γ], [0, e^b]]`: `Q` rotates by
/// the direction of the first column, `a` and `b` are the log-lengths of the
/// Gram–Schmidt diagonal. The first column is the Benettin tangent vector
/// started from `(1, 0)`, so `a / t` is the finite-time Lyapunov exponent and
/// `det J = e^(a + b)` stays representable however large the stretching.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TangentFrame {
    cos: f64,
    sin: f64,
    a: f64,
    b: f64,
    gamma: f64,
}

impl Default for TangentFrame {
    fn default() -> Self {
        Self::identity()
    }
}

impl TangentFrame {
    pub fn identity() -> Self {
        Self {
            cos: 1.0,
            sin: 0.0,
            a: 0.0,
            b: 0.0,
            gamma: 0.0,
        }
    }

    /// Left-multiply by a 2x2 matrix.
    pub fn apply(&mut self, m: &[[f64; 2]; 2]) {
        let (c, s) = (self.cos, self.sin);
        let w1 = [m[0][0] * c + m[0][1] * s, m[1][0] * c + m[1][1] * s];
        let w2 = [-m[0][0] * s + m[0][1] * c, -m[1][0] * s + m[1][1] * c];
        let rho0 = w1[0].hypot(w1[1]);
        let (c1, s1) = (w1[0] / rho0, w1[1] / rho0);
        let kappa = c1 * w2[0] + s1 * w2[1];
        let rho1 = -s1 * w2[0] + c1 * w2[1];
        self.gamma += kappa / rho0 * (self.b - self.a).exp();
        self.a += rho0.ln();
        self.b += rho1.ln();
        self.cos = c1;
        self.sin = s1;
    }

    /// Log-length of the tangent vector grown from `(1, 0)`.
    pub fn log_stretch(&self) -> f64 {
        self.a
    }

    /// `ln (∂x(t)/∂x(0))²`, or `None` when the entry is exactly zero.
    pub fn log_dxdx0_sq(&self) -> Option<f64> {
        if self.cos == 0.0 {
            None
        } else {
            Some(2.0 * (self.a + self.cos.abs().ln()))
        }
    }

    /// `ln |det J|`.
    pub fn log_det(&self) -> f64 {
        self.a + self.b
    }

    pub fn det(&self) -> f64 {
        self.log_det().exp()
    }

    fn scaled(&self) -> [[f64; 2]; 2] {
        let (c, s, g) = (self.cos, self.sin, self.gamma);
        let e = (self.b - self.a).exp();
        [[c, c * g - s * e], [s, s * g + c * e]]
    }

    /// Mantissa `m` with max-norm in `[1, 2)` and `log_scale` such that
    /// `J = exp(log_scale) m`.
    pub fn mantissa(&self) -> ([[f64; 2]; 2], f64) {
        let k = self.scaled();
        let norm = k.iter().flatten().fold(0.0f64, |acc, v| acc.max(v.abs()));
        let shift = norm.log2().floor();
        let factor = (-shift).exp2();
        let m = k.map(|row| row.map(|v| v * factor));
        (m, self.a + shift * LN_2)
    }

    /// The Jacobian as plain doubles; overflows once the stretching passes ~1e308.
    pub fn to_matrix(&self) -> [[f64; 2]; 2] {
        let scale = self.a.exp();
        self.scaled().map(|row| row.map(|v| v * scale))
    }
}

pub fn tangent_step(point: PhasePoint, frame: &TangentFrame, params: &MapParams) -> TangentFrame {
    let mut next = *frame;
    next.apply(&step_matrix(point.x, params));
    next
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRecord {
    pub points: Vec<PhasePoint>,
    /// Empty unless frames were requested; otherwise `frames[n]` is the Jacobian at step `n`.
    pub frames: Vec<TangentFrame>,
    pub region_hits: Vec<(usize, RegionTag)>,
}

pub fn evolve(
    start: PhasePoint,
    steps: usize,
    params: &MapParams,
    record_frames: bool,
) -> TrajectoryRecord {
    let mut rec = TrajectoryRecord {
        points: Vec::with_capacity(steps + 1),
        frames: Vec::with_capacity(if record_frames { steps + 1 } else { 0 }),
        region_hits: Vec::new(),
    };
    let mut point = start;
    let mut frame = TangentFrame::identity();
    for n in 0..=steps {
        rec.points.push(point);
        if record_frames {
            rec.frames.push(frame);
        }
        let tag = classify_region(point.x, params);
        if tag.in_e() {
            rec.region_hits.push((n, tag));
        }
        if n == steps {
            break;
        }
        if record_frames {
            frame.apply(&step_matrix(point.x, params));
        }
        point = map_step(point, params);
    }
    rec
}

/// Geometric law of return times to `E` under uniform occupation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReturnTimeModel {
    pub p_r: f64,
    pub q_r: f64,
    pub tau_bar: f64,
}

impl ReturnTimeModel {
    pub fn new(params: &MapParams) -> Result<Self> {
        if params.r <= 0.0 {
            return Err(invalid("return-time model needs r > 0"));
        }
        let p_r = SQRT_2 * params.r;
        Ok(Self {
            p_r,
            q_r: 1.0 - p_r,
            tau_bar: 1.0 / p_r,
        })
    }

    pub fn pmf(&self, tau: usize) -> f64 {
        if tau == 0 {
            0.0
        } else {
            self.q_r.powi(tau as i32 - 1) * self.p_r
        }
    }
}

/// Gaps between consecutive visits to `E`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ReturnTimeHistogram {
    /// `counts[tau]`; index 0 is always empty.
    pub counts: Vec<u64>,
    pub total: u64,
}

impl ReturnTimeHistogram {
    fn push(&mut self, tau: usize) {
        if self.counts.len() <= tau {
            self.counts.resize(tau + 1, 0);
        }
        self.counts[tau] += 1;
        self.total += 1;
    }

    fn merge(&mut self, other: &Self) {
        if self.counts.len() < other.counts.len() {
            self.counts.resize(other.counts.len(), 0);
        }
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        self.total += other.total;
    }

    pub fn mean(&self) -> f64 {
        let s: f64 = self
            .counts
            .iter()
            .enumerate()
            .map(|(t, &c)| t as f64 * c as f64)
            .sum();
        s / self.total as f64
    }

    pub fn count(&self, tau: usize) -> u64 {
        self.counts.get(tau).copied().unwrap_or(0)
    }

    pub fn pmf(&self, tau: usize) -> f64 {
        self.count(tau) as f64 / self.total as f64
    }
}

/// Return-time histogram over `n_traj` orbits of `steps` steps from uniform
/// random starts.
pub fn return_time_stats(
    params: &MapParams,
    n_traj: usize,
    steps: usize,
    seed: u64,
) -> Result<ReturnTimeHistogram> {
    if params.r <= 0.0 {
        return Err(invalid("return-time statistics need r > 0"));
    }
    let parts: Vec<ReturnTimeHistogram> = (0..n_traj)
        .into_par_iter()
        .map(|i| {
            let mut rng = Stream::for_cell(seed, i as u64);
            let mut pt = PhasePoint::new(rng.uniform_in(-1.0, 1.0), rng.uniform_in(-1.0, 1.0));
            let mut hist = ReturnTimeHistogram::default();
            let mut last = None;
            for n in 0..steps {
                if classify_region(pt.x, params).in_e() {
                    if let Some(prev) = last {
                        hist.push(n - prev);
                    }
                    last = Some(n);
                }
                pt = map_step(pt, params);
            }
            hist
        })
        .collect();
    let mut out = ReturnTimeHistogram::default();
    for h in &parts {
        out.merge(h);
    }
    Ok(out)
}

/// Fraction of uniformly started orbits whose first `t` points all lie in `E`,
/// for `t = 0..=t_max`.
pub fn residence_fractions(params: &MapParams, n_traj: usize, t_max: usize, seed: u64) -> Vec<f64> {
    let runs: Vec<usize> = (0..n_traj)
        .into_par_iter()
        .map(|i| {
            let mut rng = Stream::for_cell(seed, i as u64);
            let mut pt = PhasePoint::new(rng.uniform_in(-1.0, 1.0), rng.uniform_in(-1.0, 1.0));
            let mut run = 0;
            while run < t_max && classify_region(pt.x, params).in_e() {
                run += 1;
                pt = map_step(pt, params);
            }
            run
        })
        .collect();
    (0..=t_max)
        .map(|t| runs.iter().filter(|&&len| len >= t).count() as f64 / n_traj as f64)
        .collect()
}
