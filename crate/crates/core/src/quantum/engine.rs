//! Quantized triangle map on a `D`-dimensional torus Hilbert space.
//!
//! Position grid `x_j = -1 + 2j/D` (`j = 0..D`); momentum grid `p_n = 2n/D`
//! for `n = -D/2..D/2`, stored in DFT frequency order. Both cover `[-1, 1)`,
//! and the torus area `4 = 2πħD` gives `ħ = 2/(πD)`. The Floquet operator is
//! `U = exp(-i p̂²/2ħ) exp(-i V(x̂)/ħ)`, applied as a phase in position, an
//! FFT, a phase in momentum and an inverse FFT.

use ndarray::Array2;
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::f64::consts::PI;
use std::sync::Arc;

use crate::error::{invalid, Error, Result};
use crate::potential::{eval_v, MapParams};

pub const DENSE_LIMIT: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Backward,
}

#[inline]
fn unit_phase(theta: f64) -> Complex64 {
    let (s, c) = theta.rem_euclid(2.0 * PI).sin_cos();
    Complex64::new(c, s)
}

/// Signed momentum index of DFT bin `k`.
#[inline]
pub fn momentum_index(k: usize, dim: usize) -> i64 {
    if k < dim / 2 {
        k as i64
    } else {
        k as i64 - dim as i64
    }
}

#[derive(Clone)]
pub struct FloquetSpec {
    dim: usize,
    hbar: f64,
    params: MapParams,
    x_grid: Vec<f64>,
    p_grid: Vec<f64>,
    potential_phase: Vec<Complex64>,
    /// `exp(-i p_n²/2ħ) / D`, the inverse-FFT normalization folded in.
    kinetic_phase: Vec<Complex64>,
    fft: Arc<dyn Fft<f64>>,
    ifft: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for FloquetSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FloquetSpec")
            .field("dim", &self.dim)
            .field("hbar", &self.hbar)
            .field("params", &self.params)
            .finish()
    }
}

impl FloquetSpec {
    pub fn new(dim: usize, params: MapParams) -> Result<Self> {
        Self::build(dim, params, true)
    }

    /// `ħ = π⁻¹ 2^-n`, i.e. `D = 2^(n+1)`.
    pub fn from_hbar_exponent(n: u32, params: MapParams) -> Result<Self> {
        if n > 40 {
            return Err(invalid(format!("hbar exponent {n} too large")));
        }
        Self::new(1usize << (n + 1), params)
    }

    /// Same grids with `V ≡ 0`: free evolution, for testing the kinetic step.
    pub fn free(dim: usize) -> Result<Self> {
        Self::build(dim, MapParams::default(), false)
    }

    fn build(dim: usize, params: MapParams, with_potential: bool) -> Result<Self> {
        if dim < 2 || !dim.is_multiple_of(2) {
            return Err(invalid(format!(
                "Hilbert dimension must be a positive even integer, got {dim}"
            )));
        }
        params.validate()?;
        let hbar = 2.0 / (PI * dim as f64);
        let x_grid: Vec<f64> = (0..dim)
            .map(|j| -1.0 + 2.0 * j as f64 / dim as f64)
            .collect();
        let p_grid: Vec<f64> = (0..dim)
            .map(|k| 2.0 * momentum_index(k, dim) as f64 / dim as f64)
            .collect();
        let potential_phase = x_grid
            .iter()
            .map(|&x| {
                if with_potential {
                    unit_phase(-eval_v(x, &params) / hbar)
                } else {
                    Complex64::new(1.0, 0.0)
                }
            })
            .collect();
        // p_n²/2ħ = π n²/D, reduced modulo 2π through n² mod 2D
        let two_d = 2 * dim as i128;
        let kinetic_phase = (0..dim)
            .map(|k| {
                let n = momentum_index(k, dim) as i128;
                let red = (n * n).rem_euclid(two_d) as f64;
                unit_phase(-PI * red / dim as f64) / dim as f64
            })
            .collect();
        let mut planner = FftPlanner::new();
        let fft = planner.plan_fft_forward(dim);
        let ifft = planner.plan_fft_inverse(dim);
        Ok(Self {
            dim,
            hbar,
            params,
            x_grid,
            p_grid,
            potential_phase,
            kinetic_phase,
            fft,
            ifft,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn params(&self) -> &MapParams {
        &self.params
    }

    pub fn x_grid(&self) -> &[f64] {
        &self.x_grid
    }

    /// Momentum grid in DFT order.
    pub fn p_grid(&self) -> &[f64] {
        &self.p_grid
    }

    pub fn propagator(&self) -> Propagator<'_> {
        let len = self
            .fft
            .get_inplace_scratch_len()
            .max(self.ifft.get_inplace_scratch_len());
        Propagator {
            spec: self,
            scratch: vec![Complex64::default(); len],
        }
    }
}

/// In-place operator application with reusable FFT scratch.
pub struct Propagator<'a> {
    spec: &'a FloquetSpec,
    scratch: Vec<Complex64>,
}

impl Propagator<'_> {
    pub fn forward(&mut self, psi: &mut [Complex64]) {
        let s = self.spec;
        psi.iter_mut()
            .zip(&s.potential_phase)
            .for_each(|(a, w)| *a *= w);
        s.fft.process_with_scratch(psi, &mut self.scratch);
        psi.iter_mut()
            .zip(&s.kinetic_phase)
            .for_each(|(a, w)| *a *= w);
        s.ifft.process_with_scratch(psi, &mut self.scratch);
    }

    pub fn backward(&mut self, psi: &mut [Complex64]) {
        let s = self.spec;
        s.fft.process_with_scratch(psi, &mut self.scratch);
        psi.iter_mut()
            .zip(&s.kinetic_phase)
            .for_each(|(a, w)| *a *= w.conj());
        s.ifft.process_with_scratch(psi, &mut self.scratch);
        psi.iter_mut()
            .zip(&s.potential_phase)
            .for_each(|(a, w)| *a *= w.conj());
    }

    pub fn apply(&mut self, psi: &mut [Complex64], direction: Direction) {
        match direction {
            Direction::Forward => self.forward(psi),
            Direction::Backward => self.backward(psi),
        }
    }

    pub fn position(&mut self, psi: &mut [Complex64]) {
        psi.iter_mut()
            .zip(&self.spec.x_grid)
            .for_each(|(a, x)| *a *= x);
    }

    pub fn momentum(&mut self, psi: &mut [Complex64]) {
        let s = self.spec;
        let inv_d = 1.0 / s.dim as f64;
        s.fft.process_with_scratch(psi, &mut self.scratch);
        psi.iter_mut()
            .zip(&s.p_grid)
            .for_each(|(a, p)| *a *= p * inv_d);
        s.ifft.process_with_scratch(psi, &mut self.scratch);
    }
}

/// Amplitudes in the position basis.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    pub amplitudes: Vec<Complex64>,
}

impl QuantumState {
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Self {
        Self { amplitudes }
    }

    pub fn basis(dim: usize, j: usize) -> Self {
        let mut amplitudes = vec![Complex64::default(); dim];
        amplitudes[j] = Complex64::new(1.0, 0.0);
        Self { amplitudes }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn normalize(&mut self) {
        let n = self.norm();
        self.amplitudes.iter_mut().for_each(|a| *a /= n);
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &QuantumState) -> Complex64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// Amplitudes in the momentum basis, DFT order, unitary normalization.
    pub fn to_momentum(&self, spec: &FloquetSpec) -> Vec<Complex64> {
        let mut buf = self.amplitudes.clone();
        spec.fft.process(&mut buf);
        let s = 1.0 / (spec.dim as f64).sqrt();
        buf.iter_mut().for_each(|a| *a *= s);
        buf
    }
}

/// Gaussian wave packet centered at `(x_k, p_k)`, summed over the images
/// `x + 2m` for `m ∈ {-1, 0, 1}` and normalized on the grid.
pub fn build_coherent_state(center: (f64, f64), spec: &FloquetSpec) -> QuantumState {
    let (xk, pk) = center;
    let hbar = spec.hbar;
    let amplitudes = spec
        .x_grid
        .iter()
        .map(|&x| {
            (-1..=1)
                .map(|m| {
                    let y = x + 2.0 * m as f64;
                    let d = y - xk;
                    unit_phase(pk * y / hbar) * (-d * d / (2.0 * hbar)).exp()
                })
                .sum()
        })
        .collect();
    let mut state = QuantumState { amplitudes };
    state.normalize();
    state
}

pub fn floquet_apply(
    state: &QuantumState,
    spec: &FloquetSpec,
    direction: Direction,
) -> QuantumState {
    let mut out = state.clone();
    spec.propagator().apply(&mut out.amplitudes, direction);
    out
}

pub fn apply_position(state: &QuantumState, spec: &FloquetSpec) -> QuantumState {
    let mut out = state.clone();
    spec.propagator().position(&mut out.amplitudes);
    out
}

pub fn apply_momentum(state: &QuantumState, spec: &FloquetSpec) -> QuantumState {
    let mut out = state.clone();
    spec.propagator().momentum(&mut out.amplitudes);
    out
}

/// Explicit `D × D` matrices for verification.
///
/// Built from the unitary DFT matrix and phases evaluated directly (no
/// argument reduction), independently of the FFT path.
#[derive(Debug, Clone)]
pub struct DenseOracle {
    pub u: Array2<Complex64>,
    pub x: Array2<Complex64>,
    pub p: Array2<Complex64>,
}

impl DenseOracle {
    pub fn new(spec: &FloquetSpec) -> Result<Self> {
        Self::with_potential(spec, true)
    }

    pub fn with_potential(spec: &FloquetSpec, potential: bool) -> Result<Self> {
        let d = spec.dim;
        if d > DENSE_LIMIT {
            return Err(Error::SizeLimit {
                dim: d,
                limit: DENSE_LIMIT,
            });
        }
        let hbar = 2.0 / (PI * d as f64);
        let norm = 1.0 / (d as f64).sqrt();
        let f = Array2::from_shape_fn((d, d), |(k, j)| {
            Complex64::from_polar(norm, -2.0 * PI * (k * j) as f64 / d as f64)
        });
        let f_adj = f.t().mapv(|z| z.conj());
        let xs: Vec<f64> = (0..d).map(|j| -1.0 + 2.0 * j as f64 / d as f64).collect();
        let ps: Vec<f64> = (0..d)
            .map(|k| 2.0 * momentum_index(k, d) as f64 / d as f64)
            .collect();
        let diag = |v: &[Complex64]| {
            Array2::from_shape_fn(
                (d, d),
                |(i, j)| if i == j { v[i] } else { Complex64::default() },
            )
        };
        let pot: Vec<Complex64> = xs
            .iter()
            .map(|&x| {
                if potential {
                    Complex64::from_polar(1.0, -eval_v(x, &spec.params) / hbar)
                } else {
                    Complex64::new(1.0, 0.0)
                }
            })
            .collect();
        let kin: Vec<Complex64> = ps
            .iter()
            .map(|&p| Complex64::from_polar(1.0, -p * p / (2.0 * hbar)))
            .collect();
        let u = f_adj.dot(&diag(&kin)).dot(&f).dot(&diag(&pot));
        let x = diag(
            &xs.iter()
                .map(|&v| Complex64::new(v, 0.0))
                .collect::<Vec<_>>(),
        );
        let p = f_adj
            .dot(&diag(
                &ps.iter()
                    .map(|&v| Complex64::new(v, 0.0))
                    .collect::<Vec<_>>(),
            ))
            .dot(&f);
        Ok(Self { u, x, p })
    }

    /// `‖[U^-t x̂ U^t, p̂] ψ‖²` for `t = 0..=steps`.
    pub fn otoc_values(&self, psi: &QuantumState, steps: usize) -> Vec<f64> {
        let d = self.u.nrows();
        let psi = ndarray::Array1::from(psi.amplitudes.clone());
        let u_adj = self.u.t().mapv(|z| z.conj());
        let mut ut = Array2::<Complex64>::eye(d);
        let mut ut_adj = Array2::<Complex64>::eye(d);
        let mut out = Vec::with_capacity(steps + 1);
        for t in 0..=steps {
            if t > 0 {
                ut = self.u.dot(&ut);
                ut_adj = ut_adj.dot(&u_adj);
            }
            let xt = ut_adj.dot(&self.x).dot(&ut);
            let c = xt.dot(&self.p) - self.p.dot(&xt);
            let phi = c.dot(&psi);
            out.push(phi.iter().map(|z| z.norm_sqr()).sum());
        }
        out
    }
}
