//! Strong structural controllability of structured networks whose nodes are
//! MIMO structured systems.
//!
//! * [`pattern`]: the `{0, *, ?}` symbol algebra and pattern matrices.
//! * [`graph`]: pattern digraphs, the standard and weak color change rules.
//! * [`network`]: structured networks, assembly and the controllability tests.
//! * [`oracle`]: sampling and exhaustive cross-checks.
//! * [`cli`]: the `sscnet` command line.

pub mod cli;
pub mod error;
pub mod graph;
pub mod network;
pub mod oracle;
pub mod pattern;

pub use error::{Error, Result};
pub use graph::{is_full_row_rank, ColorRule, ColoringResult, Force, PatternGraph};
pub use network::{
    check_structured_system, AnalysisReport, NodeSystem, StructuredNetwork, Topology, Violation,
};
pub use oracle::{audit_network, audit_rank, kalman_controllable, AuditConfig, AuditOutcome};
pub use pattern::{sym_add, sym_mul, PatternMatrix, Realization, Symbol};
