//! Qubit coherence state conversion.
//!
//! Optimal stochastic conversion probabilities under incoherent operations,
//! constructive synthesis of strictly incoherent Kraus instruments, assisted
//! conversion, coherence measures, asymptotic rate bounds, a brute-force
//! oracle and a simulation of a linear-optical implementation.

pub mod assisted;
pub mod asymptotic;
pub mod conversion;
pub mod error;
pub mod linalg;
pub mod measures;
pub mod numeric;
pub mod oracle;
pub mod photonic;
pub mod state;

pub use conversion::{
    apply_instrument, complete_instrument, is_reachable, max_conversion_probability, reachable_boundary,
    synthesize_instrument, ConversionQuery, SioInstrument, SioKraus, SynthesisSolution,
};
pub use error::{Error, Inequality, Result};
pub use linalg::{hermitian_eigensystem, ComplexMatrix, Eigensystem};
pub use num_complex::Complex64;
pub use oracle::{oracle_max_probability, oracle_reachable_set, sample_sio_instrument, OracleConfig};
pub use photonic::{
    estimate_probability, hwp_action, prepare_single_qubit, simulate_counts, simulate_sio_circuit,
    tomography_reconstruct, OpticalElement, PathPolState, PauliBasis, ShotRecord,
};
pub use state::{
    binary_entropy, bloch_to_density, density_to_bloch, dephase, fidelity, partial_trace, purify, trace_distance,
    von_neumann_entropy, BipartiteState, BlochVector, DensityOperator, StateJson, Subsystem,
};
