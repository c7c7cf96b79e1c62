//! Reversible circuits, their Feynman-clock Hamiltonians, and the exact
//! infinite-time average of the continuous-time walk on a circuit orbit.
//!
//! The pipeline runs `circuit` → `clockham` → `orbit` → `analysis`, with
//! `oracle` providing a dense numerical cross-check on small instances.

pub mod analysis;
pub mod circuit;
pub mod clockham;
pub mod linalg;
pub mod oracle;
pub mod orbit;
pub mod pipeline;

pub use analysis::{
    closed_form_entropy, ds_bound, eigenstate_distance, occupation_distribution, output_interval,
    reduce_output_qubit, time_average_general, time_average_orbit, von_neumann_entropy,
    AnalysisError, DsReport, EigenstateDistance, OccupationDistribution, TimeAverage,
};
pub use circuit::{
    build_counter_schema, build_toggle_schema, parse_circuit, simulate_circuit, BitString,
    CircuitError, Gate, GateKind, ReversibleCircuit, SchemaDescriptor, SchemaKind, WireRole,
};
pub use clockham::{
    build_forward_operator, BasisState, ClockError, ClockOperator, SparseIntMatrix,
    StructureReport, Which,
};
pub use linalg::{Basis, DensityMatrix, HermitianEigen, LinalgError, C64};
pub use oracle::{finite_time_average, spectral_oracle, FiniteTimeResult, OracleError, SpectralOracle};
pub use orbit::{classify_instance, enumerate_orbit, Classification, Orbit, OrbitError};
pub use pipeline::{run_report, Instance, PipelineError, Report, ReportOptions, SchemaMode};
