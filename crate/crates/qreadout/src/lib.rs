//! Quantum-state readout pipeline for PDE solution classification.
//!
//! The crate covers the full workflow:
//!
//! - [`qstate`]: dense statevector / density-matrix simulation (gates, QFT,
//!   partial trace, Pauli expectation values),
//! - [`encode`]: uploading classical solution grids into quantum states
//!   (amplitude encoding, two-register grid encoding, Fourier basis change,
//!   coarse-graining),
//! - [`ansatz`]: parameterized circuit families (layered DQNN, QCNN with
//!   convolution/pooling, double-QCNN over two grid registers),
//! - [`observe`]: hypothesis evaluation (single-observable readout and the
//!   two-register covariance observable),
//! - [`train`]: squared-loss concept learning with parameter-shift gradients
//!   and plain gradient descent,
//! - [`cfdgen`]: labeled dataset generation (analytic Burgers wave profiles,
//!   D2Q9 lattice-Boltzmann flow past a cylinder),
//! - [`harness`]: declarative experiment specs, preset experiment
//!   reproduction and plot-data export.

pub mod ansatz;
pub mod cfdgen;
pub mod encode;
pub mod harness;
pub mod observe;
pub mod qstate;
pub mod train;

pub use encode::{Basis, EncodedSample, FieldSample, Grid, Label, QState};
pub use qstate::{GateOp, MixedState, Observable, Pauli, PureState};
