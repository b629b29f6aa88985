//! Randomized checks of the lexicographic LP solver against an independent
//! brute-force vertex enumerator.
//!
//! The enumerator solves every d-row subsystem with its own elimination
//! routine (it shares no code with the solver), keeps the feasible solutions,
//! and picks the lexicographically minimal cost minimizer by definition.

use std::cmp::Ordering;

use distmilp::halfspace::{lex_compare, ConstraintSet, HalfSpace, RowId};
use distmilp::lp::{bounding_box, lp_lex_solve};
use distmilp::scalar::{dot, int, rat, Scalar};
use num_traits::Zero;
use proptest::prelude::*;

/// Solve `A x = b` by plain Gaussian elimination; `None` when singular.
fn solve_square(a: &[Vec<Scalar>], b: &[Scalar]) -> Option<Vec<Scalar>> {
    let n = a.len();
    let mut m: Vec<Vec<Scalar>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !m[r][col].is_zero())?;
        m.swap(col, pivot);
        let lead = m[col][col].clone();
        for x in m[col].iter_mut() {
            *x /= &lead;
        }
        for r in 0..n {
            if r != col && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for c in col..=n {
                    let delta = &f * &m[col][c];
                    m[r][c] -= delta;
                }
            }
        }
    }
    Some(m.into_iter().map(|row| row[row.len() - 1].clone()).collect())
}

/// All vertices of the intersection: feasible solutions of d-row subsystems.
fn enumerate_vertices(set: &ConstraintSet) -> Vec<Vec<Scalar>> {
    let d = set.dim();
    let rows = set.rows();
    let n = rows.len();
    let mut vertices: Vec<Vec<Scalar>> = Vec::new();
    let mut pick: Vec<usize> = (0..d).collect();
    if n < d {
        return vertices;
    }
    loop {
        let a: Vec<Vec<Scalar>> = pick.iter().map(|&i| rows[i].normal().to_vec()).collect();
        let b: Vec<Scalar> = pick.iter().map(|&i| rows[i].offset().clone()).collect();
        if let Some(point) = solve_square(&a, &b) {
            if set.contains(&point) && !vertices.contains(&point) {
                vertices.push(point);
            }
        }
        // next combination
        let mut i = d;
        loop {
            if i == 0 {
                return vertices;
            }
            i -= 1;
            if pick[i] != i + n - d {
                pick[i] += 1;
                for j in i + 1..d {
                    pick[j] = pick[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Definitional lex-optimal point: minimum cost, then lexicographic minimum.
fn oracle_lex_optimum(set: &ConstraintSet, cost: &[Scalar]) -> Option<Vec<Scalar>> {
    let vertices = enumerate_vertices(set);
    let best_cost = vertices.iter().map(|v| dot(cost, v)).min()?;
    vertices
        .into_iter()
        .filter(|v| dot(cost, v) == best_cost)
        .min_by(|a, b| lex_compare(a, b))
}

fn small_scalar(num: i32, den: u8) -> Scalar {
    rat(num as i64, den as i64 + 1)
}

#[derive(Debug, Clone)]
struct RandomLp {
    dim: usize,
    box_m: i64,
    rows: Vec<(Vec<Scalar>, Scalar)>,
    cost: Vec<Scalar>,
}

fn random_lp() -> impl Strategy<Value = RandomLp> {
    (1usize..=3, 1i64..=4).prop_flat_map(|(dim, box_m)| {
        let coeff = (-4i32..=4, 0u8..=2).prop_map(|(n, d)| small_scalar(n, d));
        let row = (
            proptest::collection::vec(coeff.clone(), dim),
            -3i32..=6,
        )
            .prop_map(|(a, b)| (a, int(b as i64)));
        (
            proptest::collection::vec(row, 0..=5),
            proptest::collection::vec(coeff, dim),
        )
            .prop_map(move |(rows, cost)| RandomLp {
                dim,
                box_m,
                rows,
                cost,
            })
    })
}

fn build_set(lp: &RandomLp) -> ConstraintSet {
    let mut set = bounding_box(&int(lp.box_m), lp.dim).unwrap();
    for (i, (a, b)) in lp.rows.iter().enumerate() {
        if a.iter().all(|x| x.is_zero()) {
            continue;
        }
        set.insert(HalfSpace::new(a.clone(), b.clone(), RowId::Constraint(i)));
    }
    set
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn solver_matches_vertex_enumeration(lp in random_lp()) {
        let set = build_set(&lp);
        let result = lp_lex_solve(&set, &lp.cost).unwrap();
        match oracle_lex_optimum(&set, &lp.cost) {
            None => prop_assert!(result.is_infeasible()),
            Some(expected) => {
                let opt = result.optimal().expect("oracle found a vertex");
                prop_assert_eq!(&opt.point, &expected);
                prop_assert_eq!(opt.cost, dot(&lp.cost, &expected));
            }
        }
    }

    #[test]
    fn returned_basis_is_sufficient(lp in random_lp()) {
        let set = build_set(&lp);
        if let Some(opt) = lp_lex_solve(&set, &lp.cost).unwrap().optimal() {
            // Solving over the basis rows alone (inside a much larger box so
            // the cone is searchable) must reproduce the same point.
            let mut reduced = bounding_box(&int(1000 * lp.box_m.max(1)), lp.dim).unwrap();
            for r in opt.basis.rows() {
                reduced.insert(r.clone());
            }
            let again = lp_lex_solve(&reduced, &lp.cost)
                .unwrap()
                .optimal()
                .expect("basis cone cannot be infeasible");
            prop_assert_eq!(again.point, opt.point);
            prop_assert_eq!(again.cost, opt.cost);
        }
    }

    #[test]
    fn solver_is_deterministic(lp in random_lp()) {
        let set = build_set(&lp);
        let a = lp_lex_solve(&set, &lp.cost).unwrap();
        let b = lp_lex_solve(&set, &lp.cost).unwrap();
        match (a.optimal(), b.optimal()) {
            (None, None) => {}
            (Some(x), Some(y)) => {
                prop_assert_eq!(x.point, y.point);
                prop_assert_eq!(x.cost, y.cost);
                prop_assert_eq!(x.basis.ids(), y.basis.ids());
            }
            _ => prop_assert!(false, "feasibility verdict changed between runs"),
        }
    }

    #[test]
    fn optimum_satisfies_every_row_and_binds_basis(lp in random_lp()) {
        let set = build_set(&lp);
        if let Some(opt) = lp_lex_solve(&set, &lp.cost).unwrap().optimal() {
            prop_assert!(set.contains(&opt.point));
            for r in opt.basis.rows() {
                prop_assert_eq!(r.slack(&opt.point), Scalar::zero());
            }
        }
    }
}

#[test]
fn oracle_agrees_on_a_hand_checked_case() {
    // min -x1-x2 over {2x1+2x2 <= 3, x >= 0} in the M=10 box.
    let mut set = bounding_box(&int(10), 2).unwrap();
    set.insert(HalfSpace::new(
        vec![int(2), int(2)],
        int(3),
        RowId::Constraint(0),
    ));
    set.insert(HalfSpace::new(
        vec![int(-1), int(0)],
        int(0),
        RowId::Constraint(1),
    ));
    set.insert(HalfSpace::new(
        vec![int(0), int(-1)],
        int(0),
        RowId::Constraint(2),
    ));
    let cost = [int(-1), int(-1)];
    let expected = oracle_lex_optimum(&set, &cost).unwrap();
    assert_eq!(expected, vec![int(0), rat(3, 2)]);
    let opt = lp_lex_solve(&set, &cost).unwrap().optimal().unwrap();
    assert_eq!(opt.point, expected);
    assert_eq!(lex_compare(&opt.point, &[int(1), int(1)]), Ordering::Less);
}
