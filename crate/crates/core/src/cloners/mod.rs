//! Collision, quantum-collision and non-collapsing measurement oracles.

pub mod col;
pub mod q;
pub mod qcol;

pub use col::{col_sample, col_state, col_state_of, Branch, ColKind, ColOracle, ColState};
pub use q::{dq_distribution, q_query_masses, q_sample, segments, MarkovTranscript, QError, Segment};
pub use qcol::{embedded_col_state, qcol_apply, qcol_matrix, KeyedState, QColError};
