//! The round-off triangle potential.
//!
//! The cusps of `V(x) = -alpha |x| - beta` at `x = 0` and `|x| = 1` are
//! replaced by circle arcs of radius `r`, so that `V` is C¹ for `r > 0`.
//! The arcs cover the regions `E0 = {|x| <= r/√2}` and
//! `E1 = {|x| >= 1 - r/√2}`; outside them the potential is linear.

use serde::{Deserialize, Serialize};
use std::f64::consts::{E, SQRT_2};

use crate::error::{invalid, Result};

/// `alpha = [(√5 - 1)/2 - e] / 2`.
pub const DEFAULT_ALPHA: f64 = ((2.236_067_977_499_79_f64 - 1.0) / 2.0 - E) / 2.0;

/// Largest admissible round-off radius (exclusive); beyond it `E0` and `E1` overlap.
pub const MAX_RADIUS: f64 = SQRT_2 / 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MapParams {
    pub alpha: f64,
    /// Constant offset of `V`. It contributes no force and only a global phase.
    pub beta: f64,
    pub r: f64,
}

impl MapParams {
    pub fn new(alpha: f64, beta: f64, r: f64) -> Result<Self> {
        let params = Self { alpha, beta, r };
        params.validate()?;
        Ok(params)
    }

    /// Default `alpha`, `beta = 0`.
    pub fn with_radius(r: f64) -> Result<Self> {
        Self::new(DEFAULT_ALPHA, 0.0, r)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.alpha.is_finite() || self.alpha == 0.0 {
            return Err(invalid(format!(
                "alpha must be finite and nonzero, got {}",
                self.alpha
            )));
        }
        if !self.beta.is_finite() {
            return Err(invalid(format!("beta must be finite, got {}", self.beta)));
        }
        if !(0.0..MAX_RADIUS).contains(&self.r) {
            return Err(invalid(format!("r must lie in [0, √2/2), got {}", self.r)));
        }
        Ok(())
    }

    /// Half-width `r/√2` of each rounded region.
    #[inline]
    pub fn half_width(&self) -> f64 {
        SQRT_2 * self.r / 2.0
    }

    /// `√2 |alpha| / r`, the average stretching factor of one passage through `E`.
    pub fn passage_gain(&self) -> f64 {
        SQRT_2 * self.alpha.abs() / self.r
    }
}

impl Default for MapParams {
    fn default() -> Self {
        Self {
            alpha: DEFAULT_ALPHA,
            beta: 0.0,
            r: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RegionTag {
    E0,
    E1,
    Outside,
}

impl RegionTag {
    pub fn in_e(self) -> bool {
        self != RegionTag::Outside
    }
}

/// Ties at the branch points go to the circular arcs.
#[inline]
pub fn classify_region(x: f64, params: &MapParams) -> RegionTag {
    let ax = x.abs();
    let h = params.half_width();
    if ax <= h {
        RegionTag::E0
    } else if ax >= 1.0 - h {
        RegionTag::E1
    } else {
        RegionTag::Outside
    }
}

#[inline]
fn sign(x: f64) -> f64 {
    // sign(0) = +1 at the r = 0 cusp
    if x >= 0.0 {
        1.0
    } else {
        -1.0
    }
}

pub fn eval_v(x: f64, params: &MapParams) -> f64 {
    let MapParams { alpha, beta, r } = *params;
    let ax = x.abs();
    let shape = if r == 0.0 {
        -ax
    } else {
        match classify_region(x, params) {
            RegionTag::E0 => -SQRT_2 * r + (r * r - x * x).max(0.0).sqrt(),
            RegionTag::E1 => {
                let u = ax - 1.0;
                -1.0 + SQRT_2 * r - (r * r - u * u).max(0.0).sqrt()
            }
            RegionTag::Outside => -ax,
        }
    };
    alpha * shape - beta
}

pub fn eval_vp(x: f64, params: &MapParams) -> f64 {
    let MapParams { alpha, r, .. } = *params;
    if r == 0.0 {
        return -alpha * sign(x);
    }
    match classify_region(x, params) {
        RegionTag::E0 => -alpha * x / (r * r - x * x).sqrt(),
        RegionTag::E1 => {
            let u = x.abs() - 1.0;
            alpha * sign(x) * u / (r * r - u * u).sqrt()
        }
        RegionTag::Outside => -alpha * sign(x),
    }
}

/// Second derivative of `V`. Undefined (distributional) for `r = 0`.
///
/// On `E1` both sides use `(|x| - 1)²`, the analytic derivative of the arc.
pub fn eval_vpp(x: f64, params: &MapParams) -> Result<f64> {
    if params.r == 0.0 {
        return Err(invalid(
            "V'' is distributional at r = 0; use the shear-only tangent step",
        ));
    }
    Ok(vpp_unchecked(x, params))
}

#[inline]
pub(crate) fn vpp_unchecked(x: f64, params: &MapParams) -> f64 {
    let MapParams { alpha, r, .. } = *params;
    if r == 0.0 {
        return 0.0;
    }
    let r2 = r * r;
    match classify_region(x, params) {
        RegionTag::E0 => {
            let s = r2 - x * x;
            -alpha * r2 / (s * s.sqrt())
        }
        RegionTag::E1 => {
            let u = x.abs() - 1.0;
            let s = r2 - u * u;
            alpha * r2 / (s * s.sqrt())
        }
        RegionTag::Outside => 0.0,
    }
}
