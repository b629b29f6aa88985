//! Cutting planes generated from a basis: mixed-integer Gomory intersection
//! cuts and cost-based cuts.
//!
//! A MIG cut is the intersection cut for the split disjunction
//! `D(e_k, floor(z_k))` and the cone of the current basis: each extreme ray
//! of the cone (the columns of `-A_B^{-1}`) is intersected with the two
//! disjunction hyperplanes, and the cut is the hyperplane through those
//! intersection points. Rays parallel to the disjunction are never cut.
//! The resulting half-space contains every mixed-integer feasible point of
//! the cone but not its apex.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::halfspace::{HalfSpace, RowId};
use crate::lp::Basis;
use crate::scalar::{self, Scalar};

/// A split disjunction `{pi^T x <= pi0} ∪ {pi^T x >= pi0 + 1}`: valid for
/// every integer point, violated by the fractional band in between.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitDisjunction {
    pub pi: Vec<BigInt>,
    pub pi0: BigInt,
}

impl SplitDisjunction {
    /// The elementary disjunction `D(e_coord, floor(z_coord))` that separates
    /// a point with fractional `coord`-th entry.
    pub fn at_fractional(z: &[Scalar], coord: usize, d_z: usize) -> Self {
        assert!(coord < d_z && d_z <= z.len());
        let mut pi = vec![BigInt::zero(); d_z];
        pi[coord] = BigInt::one();
        SplitDisjunction {
            pi,
            pi0: z[coord].floor().to_integer(),
        }
    }

    /// Whether the point's integer block lies in the disjunction.
    pub fn contains(&self, z: &[Scalar]) -> bool {
        let mut acc = Scalar::zero();
        for (p, x) in self.pi.iter().zip(z) {
            if !p.is_zero() {
                acc += Scalar::from_integer(p.clone()) * x;
            }
        }
        let lo = Scalar::from_integer(self.pi0.clone());
        let hi = &lo + Scalar::one();
        acc <= lo || acc >= hi
    }
}

/// What produced a cut; used to mint stable row identities so identical cuts
/// generated by different agents deduplicate by value while staying
/// traceable.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CutOrigin {
    pub agent: usize,
    pub round: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CutKind {
    Mig,
    Cost,
}

/// A generated cutting plane.
#[derive(Debug, Clone)]
pub struct Cut {
    pub halfspace: HalfSpace,
    pub kind: CutKind,
    pub born_round: u64,
}

/// Generate the MIG cut for the first fractional integer coordinate of `z`,
/// or nothing when all `d_z` leading coordinates are integral.
///
/// `basis` must identify `z` (`A_B z = b_B`).
pub fn mig_oracle(z: &[Scalar], basis: &Basis, d_z: usize, origin: CutOrigin) -> Option<Cut> {
    let k = (0..d_z.min(z.len())).find(|&k| !scalar::is_integer(&z[k]))?;
    Some(intersection_cut(z, basis, k, origin))
}

/// One intersection cut per fractional coordinate among the first `d_z`.
pub fn multi_mig(z: &[Scalar], basis: &Basis, d_z: usize, origin: CutOrigin) -> Vec<Cut> {
    (0..d_z.min(z.len()))
        .filter(|&k| !scalar::is_integer(&z[k]))
        .map(|k| intersection_cut(z, basis, k, origin))
        .collect()
}

/// The intersection cut for `D(e_k, floor(z_k))` and the basis cone.
fn intersection_cut(z: &[Scalar], basis: &Basis, k: usize, origin: CutOrigin) -> Cut {
    let d = basis.dim();
    assert_eq!(z.len(), d, "point dimension mismatch");
    assert!(!scalar::is_integer(&z[k]), "coordinate {k} is already integral");
    debug_assert_eq!(basis.point(), z, "basis does not identify the point");

    let inverse = basis.inverse();
    let below = z[k].floor() - &z[k]; // in (-1, 0)
    let above = &below + Scalar::one(); // in (0, 1)

    // lambda_m is the step along ray m to the disjunction plane it hits; the
    // weight, its reciprocal, is 0 for rays parallel to the disjunction.
    let mut weights = Vec::with_capacity(d);
    for m in 0..d {
        let g = -&inverse[k][m]; // e_k . r^m
        let w = if g.is_negative() {
            &g / &below
        } else if g.is_positive() {
            &g / &above
        } else {
            Scalar::zero()
        };
        debug_assert!(!w.is_negative());
        weights.push(w);
    }

    let matrix = basis.matrix();
    let normal: Vec<Scalar> = (0..d)
        .map(|j| {
            let mut acc = Scalar::zero();
            for (m, w) in weights.iter().enumerate() {
                if !w.is_zero() && !matrix[m][j].is_zero() {
                    acc += w * &matrix[m][j];
                }
            }
            acc
        })
        .collect();
    let offset = weights
        .iter()
        .zip(basis.rhs())
        .fold(Scalar::zero(), |acc, (w, b)| {
            if w.is_zero() {
                acc
            } else {
                acc + w * b
            }
        })
        - Scalar::one();

    let halfspace = HalfSpace::new(
        normal,
        offset,
        RowId::MigCut {
            agent: origin.agent,
            round: origin.round,
            coord: k,
        },
    );
    // The defining property: the cut removes its generating point.
    assert!(
        !halfspace.contains(z),
        "intersection cut failed to exclude its generator"
    );
    Cut {
        halfspace,
        kind: CutKind::Mig,
        born_round: origin.round,
    }
}

/// Cost-based cut `c^T z >= ceil(c^T z_current)`, stored as
/// `-c^T z <= -ceil(...)`.
///
/// Panics on a zero cost vector; callers skip the cut in that case.
pub fn int_cost_cut(cost: &[Scalar], z: &[Scalar], origin: CutOrigin) -> Cut {
    let sigma = scalar::dot(cost, z).ceil();
    let normal: Vec<Scalar> = cost.iter().map(|c| -c).collect();
    Cut {
        halfspace: HalfSpace::new(
            normal,
            -sigma,
            RowId::CostCut {
                agent: origin.agent,
                round: origin.round,
            },
        ),
        kind: CutKind::Cost,
        born_round: origin.round,
    }
}

/// Cost cut in epigraph coordinates: `rho >= ceil(rho_current)` where `rho`
/// is coordinate 1 of the extended space.
pub fn eps_cost_cut(rho: &Scalar, ext_dim: usize, origin: CutOrigin) -> Cut {
    assert!(ext_dim >= 1);
    let mut normal = scalar::zeros(ext_dim);
    normal[0] = -Scalar::one();
    Cut {
        halfspace: HalfSpace::new(
            normal,
            -rho.ceil(),
            RowId::CostCut {
                agent: origin.agent,
                round: origin.round,
            },
        ),
        kind: CutKind::Cost,
        born_round: origin.round,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, rat};

    const ORIGIN: CutOrigin = CutOrigin { agent: 0, round: 0 };

    fn basis(rows: Vec<(Vec<Scalar>, Scalar)>) -> Basis {
        Basis::from_rows(
            rows.into_iter()
                .enumerate()
                .map(|(i, (a, b))| HalfSpace::new(a, b, RowId::Constraint(i)))
                .collect(),
        )
    }

    #[test]
    fn identity_basis_cut_rounds_first_coordinate_down() {
        let b = basis(vec![
            (vec![int(1), int(0)], rat(3, 2)),
            (vec![int(0), int(1)], rat(3, 2)),
        ]);
        let z = [rat(3, 2), rat(3, 2)];
        let cut = mig_oracle(&z, &b, 2, ORIGIN).expect("fractional point must produce a cut");
        // 2 x1 <= 2 canonicalizes to x1 <= 1.
        assert_eq!(cut.halfspace.normal(), &[int(1), int(0)]);
        assert_eq!(cut.halfspace.offset(), &int(1));
        assert_eq!(cut.kind, CutKind::Mig);
        assert!(!cut.halfspace.contains(&z));
        assert!(cut.halfspace.contains(&[int(1), int(1)]));
        assert!(cut.halfspace.contains(&[int(0), int(7)]));
    }

    #[test]
    fn integral_point_produces_no_cut() {
        let b = basis(vec![
            (vec![int(1), int(0)], int(2)),
            (vec![int(0), int(1)], int(7)),
        ]);
        assert!(mig_oracle(&[int(2), int(7)], &b, 2, ORIGIN).is_none());
        assert!(multi_mig(&[int(2), int(7)], &b, 2, ORIGIN).is_empty());
    }

    #[test]
    fn skips_integral_leading_coordinate() {
        // First integer coordinate integral, second fractional: the cut is
        // generated for coordinate 2 and keeps integer-feasible points.
        let b = basis(vec![
            (vec![int(1), int(0)], int(1)),
            (vec![int(1), int(2)], int(6)),
        ]);
        let z = [int(1), rat(5, 2)];
        assert_eq!(b.point(), &z);
        let cut = mig_oracle(&z, &b, 2, ORIGIN).unwrap();
        // Raw cut 2x1 + 2x2 <= 6, canonical x1 + x2 <= 3.
        assert_eq!(cut.halfspace.normal(), &[int(1), int(1)]);
        assert_eq!(cut.halfspace.offset(), &int(3));
        assert!(!cut.halfspace.contains(&z));
        // Every lattice point of the basis cone inside a small window
        // survives the cut.
        for x1 in -5..=1 {
            for x2 in -5..=5 {
                let p = [int(x1), int(x2)];
                let in_cone = b.rows().iter().all(|r| r.contains(&p));
                if in_cone {
                    assert!(cut.halfspace.contains(&p), "cut dropped ({x1},{x2})");
                }
            }
        }
    }

    #[test]
    fn multi_mig_emits_one_cut_per_fractional_coordinate() {
        let b = basis(vec![
            (vec![int(1), int(0)], rat(3, 2)),
            (vec![int(0), int(1)], rat(3, 2)),
        ]);
        let z = [rat(3, 2), rat(3, 2)];
        let cuts = multi_mig(&z, &b, 2, ORIGIN);
        assert_eq!(cuts.len(), 2);
        assert_eq!(cuts[0].halfspace.normal(), &[int(1), int(0)]);
        assert_eq!(cuts[0].halfspace.offset(), &int(1));
        assert_eq!(cuts[1].halfspace.normal(), &[int(0), int(1)]);
        assert_eq!(cuts[1].halfspace.offset(), &int(1));

        // With d_z = 1 only the first coordinate is eligible and the single
        // cut equals the one-at-a-time oracle's.
        let one = multi_mig(&z, &b, 1, ORIGIN);
        assert_eq!(one.len(), 1);
        let oracle = mig_oracle(&z, &b, 1, ORIGIN).unwrap();
        assert!(one[0].halfspace.same_value(&oracle.halfspace));
    }

    #[test]
    fn cost_cut_ceils_the_current_cost() {
        let cut = int_cost_cut(&[int(-1), int(-1)], &[rat(3, 4), rat(3, 4)], ORIGIN);
        // -x1-x2 >= ceil(-3/2) = -1, i.e. x1 + x2 <= 1.
        assert_eq!(cut.halfspace.normal(), &[int(1), int(1)]);
        assert_eq!(cut.halfspace.offset(), &int(1));
        assert_eq!(cut.kind, CutKind::Cost);

        // Integer current cost: the cut sits exactly at that value.
        let cut = int_cost_cut(&[int(1), int(0)], &[int(3), rat(1, 7)], ORIGIN);
        assert_eq!(cut.halfspace.normal(), &[int(-1), int(0)]);
        assert_eq!(cut.halfspace.offset(), &int(-3));

        // c = (1, 0), z = (0.2, 9): x1 >= 1.
        let cut = int_cost_cut(&[int(1), int(0)], &[rat(1, 5), int(9)], ORIGIN);
        assert_eq!(cut.halfspace.normal(), &[int(-1), int(0)]);
        assert_eq!(cut.halfspace.offset(), &int(-1));
    }

    #[test]
    fn epigraph_cost_cut_ceils_rho() {
        let cut = eps_cost_cut(&rat(37, 10), 3, ORIGIN);
        assert_eq!(cut.halfspace.normal(), &[int(-1), int(0), int(0)]);
        assert_eq!(cut.halfspace.offset(), &int(-4));

        let cut = eps_cost_cut(&int(-2), 2, ORIGIN);
        assert_eq!(cut.halfspace.offset(), &int(2));

        let cut = eps_cost_cut(&rat(-23, 10), 2, ORIGIN);
        assert_eq!(cut.halfspace.offset(), &int(2));
    }

    #[test]
    fn split_disjunction_excludes_only_the_fractional_band() {
        let z = [rat(5, 2), int(0)];
        let d = SplitDisjunction::at_fractional(&z, 0, 2);
        assert_eq!(d.pi0, BigInt::from(2));
        assert!(!d.contains(&z));
        assert!(d.contains(&[int(2), int(9)]));
        assert!(d.contains(&[int(3), int(-1)]));
        assert!(d.contains(&[rat(7, 2), int(0)]));
    }
}
