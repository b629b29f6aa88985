//! Exact lexicographic linear programming over half-space intersections.
//!
//! [`lp_lex_solve`] returns the unique point that minimizes `c^T z` and, among
//! all minimizers, is lexicographically minimal. It also returns a [`Basis`]:
//! exactly `d` linearly independent rows, tight at the solution, whose
//! intersection alone reproduces the same lex-optimal point. The basis is the
//! unit of communication between agents and the input to cut generation.
//!
//! The solver is an active-set simplex on the row geometry. A candidate
//! vertex is described by `d` independent tight rows; the extreme rays of the
//! corresponding cone are the columns of `-A_B^{-1}`. A ray improves the
//! solution when the vector `(c^T r, r_1, ..., r_d)` is lexicographically
//! negative, which folds the whole objective priority stack (cost first, then
//! coordinates in order) into a single pass. At termination every ray is
//! lexicographically positive, which is precisely the certificate that the
//! returned rows form a sufficient basis. Ties in both pivot choices are
//! broken by smallest row index (Bland's rule), so the result is
//! deterministic and the pivoting cannot cycle.
//!
//! Feasibility (phase 1) minimizes one artificial violation variable over an
//! extended system started at a box corner, which is why the solver requires
//! an explicit bound row for every coordinate: callers always intersect with
//! the bounding box, so this costs them nothing.

use std::cmp::Ordering;

use num_traits::{One, Signed, Zero};

use crate::halfspace::{ConstraintSet, HalfSpace, RowId};
use crate::scalar::{self, Scalar};
use crate::{Error, Result};

/// The bounding box `H_M`: for every coordinate, `z_k <= M` and `z_k >= -M`.
///
/// Returns `2 * dims` rows. Fails unless `M > 0`.
pub fn bounding_box(m: &Scalar, dims: usize) -> Result<ConstraintSet> {
    if !m.is_positive() {
        return Err(Error::InvalidInput(format!(
            "bounding box parameter must be positive, got {m}"
        )));
    }
    let mut set = ConstraintSet::new(dims);
    for coord in 0..dims {
        set.insert(HalfSpace::new(
            scalar::unit(dims, coord),
            m.clone(),
            RowId::Box { coord, upper: true },
        ));
        let mut lower = scalar::zeros(dims);
        lower[coord] = -Scalar::one();
        set.insert(HalfSpace::new(
            lower,
            m.clone(),
            RowId::Box {
                coord,
                upper: false,
            },
        ));
    }
    Ok(set)
}

/// Exactly `d` independent rows whose intersection pins a lex-optimal point.
#[derive(Debug, Clone)]
pub struct Basis {
    rows: Vec<HalfSpace>,
    point: Vec<Scalar>,
    inverse: Vec<Vec<Scalar>>,
}

impl Basis {
    /// Build a basis from `d` rows in `d` dimensions.
    ///
    /// Panics if the rows are not square or the row matrix is singular; both
    /// are contract violations, not data errors.
    pub fn from_rows(mut rows: Vec<HalfSpace>) -> Self {
        let dim = rows.first().map(HalfSpace::dim).unwrap_or(0);
        assert_eq!(rows.len(), dim, "a basis needs exactly d rows");
        rows.sort_by_key(|r| r.id());
        let matrix: Vec<Vec<Scalar>> = rows.iter().map(|r| r.normal().to_vec()).collect();
        let inverse = invert(&matrix).expect("basis row matrix must be nonsingular");
        let rhs: Vec<Scalar> = rows.iter().map(|r| r.offset().clone()).collect();
        // point = A_B^{-1} b_B
        let point = (0..dim)
            .map(|i| {
                let mut acc = Scalar::zero();
                for (j, b) in rhs.iter().enumerate() {
                    if !inverse[i][j].is_zero() && !b.is_zero() {
                        acc += &inverse[i][j] * b;
                    }
                }
                acc
            })
            .collect();
        Basis {
            rows,
            point,
            inverse,
        }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    /// Basis rows, sorted by identity.
    pub fn rows(&self) -> &[HalfSpace] {
        &self.rows
    }

    /// The unique solution of `A_B z = b_B`.
    pub fn point(&self) -> &[Scalar] {
        &self.point
    }

    pub fn ids(&self) -> Vec<RowId> {
        self.rows.iter().map(|r| r.id()).collect()
    }

    /// Rows of `A_B` in basis order.
    pub fn matrix(&self) -> Vec<&[Scalar]> {
        self.rows.iter().map(|r| r.normal()).collect()
    }

    /// `b_B` in basis order.
    pub fn rhs(&self) -> Vec<&Scalar> {
        self.rows.iter().map(|r| r.offset()).collect()
    }

    /// `A_B^{-1}`, cached; its negated columns are the cone's extreme rays.
    pub fn inverse(&self) -> &[Vec<Scalar>] {
        &self.inverse
    }

    /// Row-set equality by canonical values, ignoring identities and order.
    pub fn same_rows(&self, other: &Basis) -> bool {
        self.rows.len() == other.rows.len()
            && self
                .rows
                .iter()
                .all(|r| other.rows.iter().any(|o| o.same_value(r)))
    }
}

/// Outcome of a lexicographic LP solve.
#[derive(Debug, Clone)]
pub enum LexLpResult {
    Optimal(LexOptimum),
    Infeasible,
}

impl LexLpResult {
    pub fn optimal(self) -> Option<LexOptimum> {
        match self {
            LexLpResult::Optimal(opt) => Some(opt),
            LexLpResult::Infeasible => None,
        }
    }

    pub fn is_infeasible(&self) -> bool {
        matches!(self, LexLpResult::Infeasible)
    }
}

/// The lex-optimal vertex, its cost, and an identifying basis.
#[derive(Debug, Clone)]
pub struct LexOptimum {
    pub point: Vec<Scalar>,
    pub cost: Scalar,
    pub basis: Basis,
}

/// Minimize `c^T z` over the intersection, breaking ties lexicographically.
///
/// Deterministic: identical inputs produce bit-identical results. Requires a
/// bound row for every coordinate (see module docs); a genuinely unbounded
/// lexicographic descent is reported as [`Error::Unbounded`] since the
/// callers' bounding box rules it out.
pub fn lp_lex_solve(set: &ConstraintSet, cost: &[Scalar]) -> Result<LexLpResult> {
    lp_lex_solve_warm(set, cost, None)
}

/// A starting hint for [`lp_lex_solve_warm`]. Falls back to a cold start
/// whenever the hinted rows cannot be matched or are singular, so hints can
/// never change feasibility or optimality, only the search path.
#[derive(Debug, Clone, Copy)]
pub enum WarmHint<'a> {
    /// A basis whose rows all appear, by value, in the new set (typical for
    /// re-solves after adding rows).
    Basis(&'a Basis),
    /// Row identities of a previous basis in a set whose offsets changed but
    /// whose normals did not (typical for families of parametrized LPs).
    Ids(&'a [RowId]),
}

/// [`lp_lex_solve`] with an optional warm start near a previous optimum.
/// The result is identical in value to a cold solve, up to the choice among
/// equally valid bases.
pub fn lp_lex_solve_warm(
    set: &ConstraintSet,
    cost: &[Scalar],
    warm: Option<WarmHint<'_>>,
) -> Result<LexLpResult> {
    let dim = set.dim();
    assert_eq!(cost.len(), dim, "cost vector dimension mismatch");
    assert!(dim > 0, "zero-dimensional LP");

    let rows: Vec<RawRow> = set
        .iter()
        .map(|r| RawRow {
            normal: r.normal().to_vec(),
            offset: r.offset().clone(),
        })
        .collect();

    let warm_start = warm.and_then(|hint| match hint {
        WarmHint::Basis(basis) => {
            if basis.dim() != dim {
                return None;
            }
            let mut indices = Vec::with_capacity(dim);
            for row in basis.rows() {
                let found = set.rows().iter().position(|r| r.same_value(row))?;
                indices.push(found);
            }
            Some(StartPoint::at_vertex(
                &rows,
                basis.point().to_vec(),
                indices,
            ))
        }
        WarmHint::Ids(ids) => {
            if ids.len() != dim {
                return None;
            }
            let mut indices = Vec::with_capacity(dim);
            for id in ids {
                let found = set.rows().iter().position(|r| r.id() == *id)?;
                indices.push(found);
            }
            let matrix: Vec<Vec<Scalar>> =
                indices.iter().map(|&i| rows[i].normal.clone()).collect();
            let inverse = invert(&matrix)?;
            let point: Vec<Scalar> = (0..dim)
                .map(|i| {
                    let mut acc = Scalar::zero();
                    for (j, &row) in indices.iter().enumerate() {
                        if !inverse[i][j].is_zero() && !rows[row].offset.is_zero() {
                            acc += &inverse[i][j] * &rows[row].offset;
                        }
                    }
                    acc
                })
                .collect();
            Some(StartPoint::at_vertex(&rows, point, indices))
        }
    });

    let start = match warm_start.unwrap_or(find_start(&rows, dim)?) {
        StartPoint::Feasible { point, basis } => (point, basis),
        StartPoint::NeedsPhase1 { corner, bounds } => {
            match phase1(&rows, dim, corner, &bounds)? {
                None => return Ok(LexLpResult::Infeasible),
                Some(feasible) => {
                    let basis = tight_independent_rows(&rows, dim, &feasible);
                    (feasible, basis)
                }
            }
        }
    };

    let mut pivoter = Pivoter::new(&rows, dim, start.0, start.1);
    pivoter.run(Goal::LexMin(cost), false)?;

    let point = pivoter.point;
    let basis_rows: Vec<HalfSpace> = {
        let mut idx = pivoter.basis.clone();
        idx.sort_unstable();
        idx.iter().map(|&i| set.rows()[i].clone()).collect()
    };
    let basis = Basis::from_rows(basis_rows);
    debug_assert_eq!(basis.point(), &point[..]);
    let cost_value = scalar::dot(cost, &point);
    Ok(LexLpResult::Optimal(LexOptimum {
        point,
        cost: cost_value,
        basis,
    }))
}

struct RawRow {
    normal: Vec<Scalar>,
    offset: Scalar,
}

enum StartPoint {
    Feasible {
        point: Vec<Scalar>,
        basis: Vec<usize>,
    },
    NeedsPhase1 {
        corner: Vec<Scalar>,
        bounds: Vec<usize>,
    },
}

impl StartPoint {
    /// Start from a known vertex with its tight independent rows; phase 1 is
    /// needed only if other rows are violated there.
    fn at_vertex(rows: &[RawRow], point: Vec<Scalar>, tight: Vec<usize>) -> StartPoint {
        let feasible = rows
            .iter()
            .all(|r| scalar::dot(&r.normal, &point) <= r.offset);
        if feasible {
            StartPoint::Feasible {
                point,
                basis: tight,
            }
        } else {
            StartPoint::NeedsPhase1 {
                corner: point,
                bounds: tight,
            }
        }
    }
}

/// Pick one bound row per coordinate (tightest lower if any, else tightest
/// upper) and start from the corner they define.
fn find_start(rows: &[RawRow], dim: usize) -> Result<StartPoint> {
    let mut lower: Vec<Option<usize>> = vec![None; dim];
    let mut upper: Vec<Option<usize>> = vec![None; dim];
    for (i, row) in rows.iter().enumerate() {
        if let Some((coord, is_upper)) = singleton(&row.normal) {
            let slot = if is_upper {
                &mut upper[coord]
            } else {
                &mut lower[coord]
            };
            // Tightest wins; first occurrence wins ties.
            match slot {
                Some(best) if rows[*best].offset <= row.offset => {}
                _ => *slot = Some(i),
            }
        }
    }
    let mut bounds = Vec::with_capacity(dim);
    let mut corner = Vec::with_capacity(dim);
    for coord in 0..dim {
        match (lower[coord], upper[coord]) {
            (Some(i), _) => {
                bounds.push(i);
                corner.push(-rows[i].offset.clone());
            }
            (None, Some(i)) => {
                bounds.push(i);
                corner.push(rows[i].offset.clone());
            }
            (None, None) => return Err(Error::MissingBound { coord }),
        }
    }
    let feasible = rows
        .iter()
        .all(|r| scalar::dot(&r.normal, &corner) <= r.offset);
    if feasible {
        Ok(StartPoint::Feasible {
            point: corner,
            basis: bounds,
        })
    } else {
        Ok(StartPoint::NeedsPhase1 { corner, bounds })
    }
}

fn singleton(normal: &[Scalar]) -> Option<(usize, bool)> {
    let mut found = None;
    for (k, x) in normal.iter().enumerate() {
        if !x.is_zero() {
            if found.is_some() {
                return None;
            }
            found = Some((k, x.is_positive()));
        }
    }
    found
}

/// Drive the artificial violation variable to zero. Returns a feasible point
/// of the original system, or `None` when the intersection is empty.
fn phase1(
    rows: &[RawRow],
    dim: usize,
    corner: Vec<Scalar>,
    bounds: &[usize],
) -> Result<Option<Vec<Scalar>>> {
    let ext = dim + 1;
    let mut ext_rows: Vec<RawRow> = Vec::with_capacity(rows.len() + 1);
    let mut worst = Scalar::zero();
    let mut worst_row = None;
    for (i, row) in rows.iter().enumerate() {
        let hard = bounds.contains(&i);
        let mut normal = row.normal.clone();
        normal.push(if hard { Scalar::zero() } else { -Scalar::one() });
        if !hard {
            let violation = scalar::dot(&row.normal, &corner) - &row.offset;
            if violation > worst {
                worst = violation;
                worst_row = Some(i);
            }
        }
        ext_rows.push(RawRow {
            normal,
            offset: row.offset.clone(),
        });
    }
    // t >= 0
    let mut t_normal = scalar::zeros(ext);
    t_normal[dim] = -Scalar::one();
    ext_rows.push(RawRow {
        normal: t_normal,
        offset: Scalar::zero(),
    });

    let worst_row = worst_row.expect("phase 1 entered with a feasible corner");
    let mut start = corner;
    start.push(worst);
    let mut basis: Vec<usize> = bounds.to_vec();
    basis.push(worst_row);

    let mut pivoter = Pivoter::new(&ext_rows, ext, start, basis);
    pivoter.run(Goal::MinimizeLast, true)?;

    if pivoter.point[dim].is_zero() {
        let mut feasible = pivoter.point;
        feasible.pop();
        Ok(Some(feasible))
    } else {
        Ok(None)
    }
}

/// Select `dim` linearly independent rows tight at `point`, scanning in row
/// order so the preferred identities win.
fn tight_independent_rows(rows: &[RawRow], dim: usize, point: &[Scalar]) -> Vec<usize> {
    let mut chosen: Vec<usize> = Vec::with_capacity(dim);
    // Reduced, normalized normals of the chosen rows plus their pivot column.
    let mut reduced: Vec<(Vec<Scalar>, usize)> = Vec::with_capacity(dim);
    for (i, row) in rows.iter().enumerate() {
        if scalar::dot(&row.normal, point) != row.offset {
            continue;
        }
        let mut v = row.normal.clone();
        for (u, pivot) in &reduced {
            if !v[*pivot].is_zero() {
                let f = v[*pivot].clone();
                for (x, y) in v.iter_mut().zip(u) {
                    if !y.is_zero() {
                        *x -= &f * y;
                    }
                }
            }
        }
        if let Some(pivot) = v.iter().position(|x| !x.is_zero()) {
            let lead = v[pivot].clone();
            for x in v.iter_mut() {
                *x /= &lead;
            }
            reduced.push((v, pivot));
            chosen.push(i);
            if chosen.len() == dim {
                return chosen;
            }
        }
    }
    unreachable!("tight rows at a feasible vertex must span the space")
}

enum Goal<'c> {
    /// Minimize the last coordinate (phase 1).
    MinimizeLast,
    /// Minimize `(c^T z, z_1, ..., z_d)` lexicographically.
    LexMin(&'c [Scalar]),
}

impl Goal<'_> {
    fn descends(&self, ray: &[Scalar]) -> bool {
        match self {
            Goal::MinimizeLast => ray[ray.len() - 1].is_negative(),
            Goal::LexMin(cost) => match scalar::dot(cost, ray).cmp(&Scalar::zero()) {
                Ordering::Less => true,
                Ordering::Greater => false,
                Ordering::Equal => ray
                    .iter()
                    .find(|x| !x.is_zero())
                    .map(|x| x.is_negative())
                    .unwrap_or(false),
            },
        }
    }
}

const PIVOT_LIMIT: u64 = 2_000_000;

/// Active-set pivoting state: a feasible vertex, the tight rows defining it,
/// and the inverse of their matrix.
struct Pivoter<'r> {
    dim: usize,
    rows: &'r [RawRow],
    point: Vec<Scalar>,
    slack: Vec<Scalar>,
    basis: Vec<usize>,
    in_basis: Vec<bool>,
    inverse: Vec<Vec<Scalar>>,
}

impl<'r> Pivoter<'r> {
    fn new(rows: &'r [RawRow], dim: usize, point: Vec<Scalar>, basis: Vec<usize>) -> Self {
        debug_assert_eq!(basis.len(), dim);
        let matrix: Vec<Vec<Scalar>> = basis.iter().map(|&i| rows[i].normal.clone()).collect();
        let inverse = invert(&matrix).expect("starting basis must be nonsingular");
        let mut in_basis = vec![false; rows.len()];
        for &i in &basis {
            in_basis[i] = true;
        }
        let slack: Vec<Scalar> = rows
            .iter()
            .map(|r| &r.offset - scalar::dot(&r.normal, &point))
            .collect();
        debug_assert!(slack.iter().all(|s| !s.is_negative()));
        Pivoter {
            dim,
            rows,
            point,
            slack,
            basis,
            in_basis,
            inverse,
        }
    }

    fn ray(&self, slot: usize) -> Vec<Scalar> {
        (0..self.dim).map(|i| -self.inverse[i][slot].clone()).collect()
    }

    fn run(&mut self, goal: Goal, stop_at_zero_last: bool) -> Result<()> {
        for _ in 0..PIVOT_LIMIT {
            if stop_at_zero_last && self.point[self.dim - 1].is_zero() {
                return Ok(());
            }
            // Bland: visit basis slots by ascending row index, take the
            // first lexicographically improving ray.
            let mut slots: Vec<usize> = (0..self.dim).collect();
            slots.sort_unstable_by_key(|&s| self.basis[s]);
            let mut entering = None;
            for &slot in &slots {
                let ray = self.ray(slot);
                if goal.descends(&ray) {
                    entering = Some((slot, ray));
                    break;
                }
            }
            let Some((slot, ray)) = entering else {
                return Ok(()); // every ray lex-increases: optimal
            };

            // Ratio test: smallest step to a blocking row, smallest row
            // index on ties. Steps are compared by cross-multiplication to
            // avoid forming quotients for every candidate.
            let mut best: Option<(usize, Scalar)> = None; // (row, den) of the min step
            let mut dens: Vec<(usize, Scalar)> = Vec::new();
            for (i, row) in self.rows.iter().enumerate() {
                if self.in_basis[i] {
                    continue;
                }
                let den = scalar::dot(&row.normal, &ray);
                if den.is_positive() {
                    let smaller = match &best {
                        None => true,
                        Some((j, best_den)) => {
                            &self.slack[i] * best_den < &self.slack[*j] * &den
                        }
                    };
                    if smaller {
                        best = Some((i, den.clone()));
                    }
                }
                dens.push((i, den));
            }
            let Some((blocking, blocking_den)) = best else {
                return Err(Error::Unbounded);
            };
            let step = &self.slack[blocking] / &blocking_den;

            if !step.is_zero() {
                for (x, r) in self.point.iter_mut().zip(&ray) {
                    if !r.is_zero() {
                        *x += &step * r;
                    }
                }
                for (i, den) in dens {
                    if !den.is_zero() {
                        self.slack[i] -= &step * &den;
                    }
                }
                // The relaxed basis row gains exactly `step` of slack; the
                // others stay tight.
                self.slack[self.basis[slot]] = step;
            }
            self.replace(slot, blocking);
        }
        panic!("pivot limit exceeded: anti-cycling rule failed");
    }

    /// Swap `new_row` into `slot`, updating the cached inverse with a
    /// rank-one row-replacement formula.
    fn replace(&mut self, slot: usize, new_row: usize) {
        let old = self.basis[slot];
        let v = &self.rows[new_row].normal;
        let q: Vec<Scalar> = (0..self.dim)
            .map(|j| {
                let mut acc = Scalar::zero();
                for (k, vk) in v.iter().enumerate() {
                    if !vk.is_zero() && !self.inverse[k][j].is_zero() {
                        acc += vk * &self.inverse[k][j];
                    }
                }
                acc
            })
            .collect();
        let alpha = q[slot].clone();
        debug_assert!(!alpha.is_zero(), "entering row parallel to the basis");
        let col: Vec<Scalar> = (0..self.dim).map(|i| self.inverse[i][slot].clone()).collect();
        for j in 0..self.dim {
            let mut factor = q[j].clone();
            if j == slot {
                factor -= Scalar::one();
            }
            if factor.is_zero() {
                continue;
            }
            factor /= &alpha;
            for (i, c) in col.iter().enumerate() {
                if !c.is_zero() {
                    self.inverse[i][j] -= c * &factor;
                }
            }
        }
        self.in_basis[old] = false;
        self.in_basis[new_row] = true;
        self.basis[slot] = new_row;
        self.slack[new_row] = Scalar::zero();
    }
}

/// Exact Gauss-Jordan inverse. `None` when singular.
pub(crate) fn invert(matrix: &[Vec<Scalar>]) -> Option<Vec<Vec<Scalar>>> {
    let n = matrix.len();
    let mut work: Vec<Vec<Scalar>> = matrix.to_vec();
    let mut inv: Vec<Vec<Scalar>> = (0..n)
        .map(|i| {
            let mut row = scalar::zeros(n);
            row[i] = Scalar::one();
            row
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !work[r][col].is_zero())?;
        work.swap(col, pivot);
        inv.swap(col, pivot);
        let lead = work[col][col].clone();
        for x in work[col].iter_mut() {
            *x /= &lead;
        }
        for x in inv[col].iter_mut() {
            *x /= &lead;
        }
        for r in 0..n {
            if r == col || work[r][col].is_zero() {
                continue;
            }
            let f = work[r][col].clone();
            for c in 0..n {
                let delta = &f * &work[col][c];
                if !delta.is_zero() {
                    work[r][c] -= delta;
                }
                let delta = &f * &inv[col][c];
                if !delta.is_zero() {
                    inv[r][c] -= delta;
                }
            }
        }
    }
    Some(inv)
}

/// Re-export of the lexicographic vector comparison, the tie-breaking order
/// the solver implements.
pub use crate::halfspace::lex_compare as lex_compare_vectors;
