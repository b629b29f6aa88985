use thiserror::Error;

/// Errors surfaced by the library.
///
/// Contract violations that indicate a caller bug (dimension mismatches,
/// singular bases built by hand) panic instead; everything that can be
/// triggered by data or configuration comes through here.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The LP solver needs an explicit bound row (a box face) for every
    /// coordinate; callers guarantee this by intersecting with the bounding
    /// box.
    #[error("no bound row for coordinate {coord}; intersect with a bounding box first")]
    MissingBound { coord: usize },

    /// A lexicographic descent direction had no blocking row. The bounding
    /// box makes this unreachable for well-formed inputs.
    #[error("LP is unbounded below; the constraint set violates the boundedness contract")]
    Unbounded,

    /// An agent's fixed constraint set is empty, so the constraint
    /// partitioning is broken.
    #[error("agent {agent}: local constraint set is infeasible")]
    InfeasibleLocal { agent: usize },

    /// An agent's working set became infeasible mid-run. With a consistent
    /// partition and a valid bounding box this cannot happen, so it is
    /// surfaced loudly instead of being ignored.
    #[error("protocol failure: agent {agent} built an infeasible working set at round {round}")]
    Protocol { agent: usize, round: u64 },

    #[error("problem is infeasible")]
    Infeasible,

    #[error("enumeration of {points} lattice points exceeds the {limit} guard")]
    EnumerationTooLarge { points: u128, limit: u128 },

    #[error("target {target} cannot be covered by the path pool")]
    UncoveredTarget { target: usize },

    #[error("constraint row {row} is assigned to no agent")]
    RowUnassigned { row: usize },

    #[error("{path}:{line}:{column}: {message}")]
    Parse {
        path: String,
        line: usize,
        column: usize,
        message: String,
    },

    #[error("graph is not strongly connected")]
    NotStronglyConnected,

    #[error("gave up generating a graph with the requested shape after {attempts} attempts")]
    GraphGeneration { attempts: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
