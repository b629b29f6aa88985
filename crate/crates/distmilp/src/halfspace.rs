//! Half-spaces `a^T z <= b` and finite intersections of them.
//!
//! Rows are stored in a canonical scaling (the first nonzero coefficient has
//! absolute value one) so that rows generated independently by different
//! agents compare equal when they describe the same half-space. Each row
//! carries a stable identity describing where it was born; the identity
//! travels with the row as it moves through bases across the network.

use std::cmp::Ordering;
use std::fmt;

use num_traits::{Signed, Zero};

use crate::scalar::{self, Scalar};

/// Stable row identity: origin tag plus ordinals.
///
/// The declaration order doubles as the tie-breaking preference when the
/// solver extracts a basis: structural constraints win over box faces, box
/// faces over cost cuts, cost cuts over intersection cuts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RowId {
    /// Structural constraint row of an instance, by row ordinal.
    Constraint(usize),
    /// Epigraph coupling row `c^T z <= eps * rho`.
    Coupling,
    /// Original-variable box face carried into an extended instance.
    InnerBox { coord: usize, upper: bool },
    /// Bounding-box face of the working instance.
    Box { coord: usize, upper: bool },
    /// Cost-based cut born at (agent, round).
    CostCut { agent: usize, round: u64 },
    /// Intersection cut born at (agent, round) for an integer coordinate.
    MigCut {
        agent: usize,
        round: u64,
        coord: usize,
    },
}

impl fmt::Display for RowId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RowId::Constraint(i) => write!(f, "r{i}"),
            RowId::Coupling => write!(f, "coupling"),
            RowId::InnerBox { coord, upper } => {
                write!(f, "ibox{}{}", if *upper { '+' } else { '-' }, coord)
            }
            RowId::Box { coord, upper } => {
                write!(f, "box{}{}", if *upper { '+' } else { '-' }, coord)
            }
            RowId::CostCut { agent, round } => write!(f, "cost:{agent}:{round}"),
            RowId::MigCut {
                agent,
                round,
                coord,
            } => write!(f, "mig:{agent}:{round}:{coord}"),
        }
    }
}

/// A closed half-space `a^T z <= b` in canonical scaling.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct HalfSpace {
    a: Vec<Scalar>,
    b: Scalar,
    id: RowId,
}

impl HalfSpace {
    /// Build a half-space, normalizing so the first nonzero coefficient has
    /// absolute value one.
    ///
    /// Panics if `a` is the zero vector.
    pub fn new(a: Vec<Scalar>, b: Scalar, id: RowId) -> Self {
        let scale = a
            .iter()
            .find(|x| !x.is_zero())
            .map(|x| x.abs())
            .expect("half-space normal must be nonzero");
        let mut hs = HalfSpace { a, b, id };
        if !num_traits::One::is_one(&scale) {
            for x in hs.a.iter_mut() {
                *x /= &scale;
            }
            hs.b /= &scale;
        }
        hs
    }

    pub fn normal(&self) -> &[Scalar] {
        &self.a
    }

    pub fn offset(&self) -> &Scalar {
        &self.b
    }

    pub fn id(&self) -> RowId {
        self.id
    }

    pub fn dim(&self) -> usize {
        self.a.len()
    }

    /// Exact membership, boundary inclusive.
    pub fn contains(&self, z: &[Scalar]) -> bool {
        scalar::dot(&self.a, z) <= self.b
    }

    /// `b - a^T z`; nonnegative exactly on members.
    pub fn slack(&self, z: &[Scalar]) -> Scalar {
        &self.b - scalar::dot(&self.a, z)
    }

    /// Same half-space as a point set, ignoring identity.
    pub fn same_value(&self, other: &HalfSpace) -> bool {
        self.a == other.a && self.b == other.b
    }

    /// The coordinate bounded when this row is a box face (`±e_k z <= b`),
    /// together with the direction (`true` = upper bound).
    pub fn singleton_bound(&self) -> Option<(usize, bool)> {
        let mut found = None;
        for (k, x) in self.a.iter().enumerate() {
            if !x.is_zero() {
                if found.is_some() {
                    return None;
                }
                found = Some((k, x.is_positive()));
            }
        }
        found
    }

    /// Replace the identity, keeping the geometry.
    pub fn with_id(mut self, id: RowId) -> Self {
        self.id = id;
        self
    }
}

/// Finite intersection of half-spaces with set semantics.
///
/// Rows are deduplicated by canonical value and kept sorted by [`RowId`], so
/// two sets assembled from the same rows in different orders are identical.
/// When two rows have the same value, the more preferred identity (smaller
/// `RowId`) is kept.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstraintSet {
    dim: usize,
    rows: Vec<HalfSpace>,
}

impl ConstraintSet {
    pub fn new(dim: usize) -> Self {
        ConstraintSet {
            dim,
            rows: Vec::new(),
        }
    }

    pub fn from_rows(dim: usize, rows: impl IntoIterator<Item = HalfSpace>) -> Self {
        let mut set = ConstraintSet::new(dim);
        for row in rows {
            set.insert(row);
        }
        set
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn rows(&self) -> &[HalfSpace] {
        &self.rows
    }

    pub fn iter(&self) -> impl Iterator<Item = &HalfSpace> {
        self.rows.iter()
    }

    /// Insert a row, deduplicating by canonical value.
    ///
    /// Returns `true` when the row was new. Panics on dimension mismatch.
    pub fn insert(&mut self, row: HalfSpace) -> bool {
        assert_eq!(row.dim(), self.dim, "row dimension mismatch");
        if let Some(existing) = self.rows.iter_mut().find(|r| r.same_value(&row)) {
            if row.id() < existing.id() {
                existing.id = row.id;
            }
            return false;
        }
        let at = self
            .rows
            .partition_point(|r| (r.id(), r.offset()) <= (row.id(), row.offset()));
        self.rows.insert(at, row);
        true
    }

    /// Insert every row of `other`.
    pub fn extend_from(&mut self, other: &ConstraintSet) {
        for row in other.iter() {
            self.insert(row.clone());
        }
    }

    /// Exact membership in the intersection.
    pub fn contains(&self, z: &[Scalar]) -> bool {
        assert_eq!(z.len(), self.dim, "point dimension mismatch");
        self.rows.iter().all(|r| r.contains(z))
    }

    /// Compare as canonical row-value sets, ignoring identities.
    pub fn same_values(&self, other: &ConstraintSet) -> bool {
        if self.dim != other.dim || self.rows.len() != other.rows.len() {
            return false;
        }
        // Both sides are deduplicated, so a subset check suffices.
        self.rows
            .iter()
            .all(|r| other.rows.iter().any(|o| o.same_value(r)))
    }
}

/// Compare two vectors lexicographically.
///
/// `Greater` iff there is a position where `v` exceeds `w` and all earlier
/// positions agree. Panics if the lengths differ.
pub fn lex_compare(v: &[Scalar], w: &[Scalar]) -> Ordering {
    assert_eq!(v.len(), w.len(), "lexicographic comparison length mismatch");
    for (x, y) in v.iter().zip(w) {
        match x.cmp(y) {
            Ordering::Equal => continue,
            other => return other,
        }
    }
    Ordering::Equal
}
