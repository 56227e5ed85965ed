//! Exact small-scale simulation of oracle-aided quantum circuits, collision
//! and cloning oracles, and the separation experiments built on them.

pub mod bits;
pub mod circuit;
pub mod cli;
pub mod cloners;
pub mod compressed;
pub mod gen;
pub mod oracle;
pub mod qstate;
pub mod report;
pub mod seed;
pub mod separations;
pub mod verify;
