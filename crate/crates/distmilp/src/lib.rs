//! Distributed mixed-integer linear programming by cut generation and
//! constraint exchange.
//!
//! The crate provides:
//!
//! * an exact-arithmetic lexicographic LP solver over half-space
//!   intersections ([`lp`]),
//! * mixed-integer Gomory intersection cuts and cost-based cuts ([`cuts`]),
//! * a per-agent state machine that solves a MILP cooperatively by
//!   exchanging candidate bases with neighbors ([`agent`]),
//! * a slotted-time simulator for time-varying digraphs with per-edge
//!   packet loss ([`netsim`]),
//! * instance builders and file I/O ([`problems`]), and
//! * a centralized brute-force / cutting-plane oracle for verification
//!   ([`oracle`]).
//!
//! All numeric state is kept in arbitrary-precision rationals so that every
//! invariant (cost monotonicity, cut validity, consensus) can be asserted
//! exactly, with no tolerances.

pub mod agent;
pub mod cuts;
mod error;
pub mod halfspace;
pub mod lp;
pub mod netsim;
pub mod oracle;
pub mod problems;
pub mod scalar;

pub use error::Error;
pub use scalar::Scalar;

/// Crate-wide result type.
pub type Result<T> = std::result::Result<T, Error>;
