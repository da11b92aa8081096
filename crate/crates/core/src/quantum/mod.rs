pub mod engine;
pub mod otoc;

pub use engine::{
    apply_momentum, apply_position, build_coherent_state, floquet_apply, DenseOracle, Direction,
    FloquetSpec, Propagator, QuantumState,
};
pub use otoc::{growth_rate_vs_hbar, otoc_quantum, otoc_quantum_values, QuantumOtocJob};
