//! Classical and quantum dynamics of the round-off triangle map.
//!
//! The crate covers the classical map and its tangent dynamics, Lyapunov
//! exponent estimators, out-of-time-order correlators (OTOCs) of the
//! classical map under three ensemble averages, the quantized map evolved by
//! split-step FFT, and the quantities used to compare the two.

pub mod analysis;
pub mod classical_otoc;
pub mod dynamics;
pub mod error;
pub mod logspace;
pub mod lyapunov;
pub mod potential;
pub mod quantum;
pub mod rng;
pub mod series;

pub use analysis::{
    delta_qc, ehrenfest_estimate, fit_growth_rate, matched_classical_r, ComparisonRecord, GrowthFit,
};
pub use classical_otoc::{
    otoc_classical, otoc_classical_all, otoc_phase_space, ClassicalOtoc, GaussianEnsembleSpec,
};
pub use dynamics::{
    evolve, map_step, tangent_step, wrap, PhasePoint, TangentFrame, TrajectoryRecord,
};
pub use error::{Error, Result};
pub use potential::{
    classify_region, eval_v, eval_vp, eval_vpp, MapParams, RegionTag, DEFAULT_ALPHA,
};
pub use quantum::{
    build_coherent_state, floquet_apply, otoc_quantum, DenseOracle, Direction, FloquetSpec,
    QuantumOtocJob, QuantumState,
};
pub use series::{AveragingScheme, OtocSeries, SeriesMeta, SeriesSource};
