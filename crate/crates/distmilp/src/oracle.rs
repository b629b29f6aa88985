//! Centralized ground truth for desk-scale instances.
//!
//! [`brute_force_milp`] enumerates every assignment of the integer block
//! inside the bounding box and solves the continuous remainder exactly; it is
//! the trust anchor all distributed results are compared against.
//! [`centralized_gomory`] is the single-machine cutting-plane loop (MIG cut
//! plus cost cut per iteration, cuts accumulate); it doubles as an
//! independent route for cross-checks but, unlike the brute force, needs an
//! integer-valued optimal cost to be guaranteed to converge.

use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::cuts::{self, CutOrigin};
use crate::halfspace::{lex_compare, HalfSpace, RowId};
use crate::lp::{bounding_box, lp_lex_solve, lp_lex_solve_warm, LexLpResult, WarmHint};
use crate::problems::MilpInstance;
use crate::scalar::{self, Scalar};
use crate::{Error, Result};

/// Hard cap on enumerated integer assignments.
pub const ENUMERATION_LIMIT: u128 = 10_000_000;

/// An exact optimum with a lexicographic-minimality certificate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MilpSolution {
    pub cost: Scalar,
    pub point: Vec<Scalar>,
    /// Always true for results of this module: candidates are visited in
    /// ascending lexicographic order, so the kept minimizer is the lex-min.
    pub lex_optimal: bool,
}

/// Exhaustive solve: enumerate the integer block over the box, solve each
/// continuous slice exactly, keep the cheapest (lexicographically smallest)
/// result.
pub fn brute_force_milp(instance: &MilpInstance) -> Result<MilpSolution> {
    if instance.d_z == 0 {
        let set = instance.relaxation_set()?;
        return match lp_lex_solve(&set, &instance.cost)? {
            LexLpResult::Infeasible => Err(Error::Infeasible),
            LexLpResult::Optimal(opt) => Ok(MilpSolution {
                cost: opt.cost,
                point: opt.point,
                lex_optimal: true,
            }),
        };
    }

    let ranges = integer_ranges(instance)?;
    let mut points: u128 = 1;
    for &(lo, hi) in &ranges {
        points = points.saturating_mul((hi - lo + 1) as u128);
        if points > ENUMERATION_LIMIT {
            return Err(Error::EnumerationTooLarge {
                points,
                limit: ENUMERATION_LIMIT,
            });
        }
    }

    if instance.d_r == 0 {
        brute_force_pure(instance, &ranges)
    } else {
        brute_force_mixed(instance, &ranges)
    }
}

/// Enumeration range for each integer coordinate: the bounding box tightened
/// by any singleton rows of the instance (points outside those are
/// infeasible regardless).
fn integer_ranges(instance: &MilpInstance) -> Result<Vec<(i64, i64)>> {
    let too_big = || Error::InvalidInput("bounding box too large to enumerate".into());
    let box_lo = (-&instance.m)
        .ceil()
        .to_integer()
        .to_i64()
        .ok_or_else(too_big)?;
    let box_hi = instance
        .m
        .floor()
        .to_integer()
        .to_i64()
        .ok_or_else(too_big)?;
    let mut ranges = vec![(box_lo, box_hi); instance.d_z];
    for row in &instance.rows {
        if let Some((coord, upper)) = row.singleton_bound() {
            if coord >= instance.d_z {
                continue;
            }
            // Canonical singleton rows read x_k <= b or -x_k <= b.
            let (lo, hi) = &mut ranges[coord];
            if upper {
                *hi = (*hi).min(row.offset().floor().to_integer().to_i64().ok_or_else(too_big)?);
            } else {
                *lo = (*lo).max((-row.offset()).ceil().to_integer().to_i64().ok_or_else(too_big)?);
            }
        }
    }
    if ranges.iter().any(|(lo, hi)| lo > hi) {
        return Err(Error::Infeasible);
    }
    Ok(ranges)
}

/// Lattice odometer visiting assignments in ascending lexicographic order.
struct Odometer {
    v: Vec<i64>,
    ranges: Vec<(i64, i64)>,
    done: bool,
}

impl Odometer {
    fn new(ranges: &[(i64, i64)]) -> Self {
        Odometer {
            v: ranges.iter().map(|&(lo, _)| lo).collect(),
            ranges: ranges.to_vec(),
            done: ranges.is_empty(),
        }
    }

    fn current(&self) -> Option<&[i64]> {
        if self.done {
            None
        } else {
            Some(&self.v)
        }
    }

    fn advance(&mut self) {
        for slot in (0..self.v.len()).rev() {
            if self.v[slot] < self.ranges[slot].1 {
                self.v[slot] += 1;
                return;
            }
            self.v[slot] = self.ranges[slot].0;
        }
        self.done = true;
    }
}

/// Row and cost data cleared to integers for the pure-integer fast path.
struct ScaledInstance {
    rows: Vec<(Vec<i128>, i128)>,
    cost: Vec<i128>,
}

fn scale_instance(instance: &MilpInstance, vmax: i128) -> Option<ScaledInstance> {
    let d = instance.dim();
    // Keep every dot product comfortably inside i128.
    let coeff_cap = i128::MAX / 4 / vmax.max(1) / d as i128;
    let clear = |values: Vec<&Scalar>| -> Option<Vec<i128>> {
        let mut lcm = num_bigint::BigInt::from(1);
        for v in &values {
            lcm = lcm.lcm(v.denom());
        }
        let mut out = Vec::with_capacity(values.len());
        for v in &values {
            let scaled = v.numer() * (&lcm / v.denom());
            let scaled = scaled.to_i128()?;
            if scaled.abs() > coeff_cap {
                return None;
            }
            out.push(scaled);
        }
        Some(out)
    };
    let mut rows = Vec::with_capacity(instance.rows.len());
    for row in &instance.rows {
        let items: Vec<&Scalar> = row
            .normal()
            .iter()
            .chain(std::iter::once(row.offset()))
            .collect();
        let mut scaled = clear(items)?;
        let b = scaled.pop().unwrap();
        rows.push((scaled, b));
    }
    let cost = clear(instance.cost.iter().collect())?;
    Some(ScaledInstance { rows, cost })
}

fn brute_force_pure(instance: &MilpInstance, ranges: &[(i64, i64)]) -> Result<MilpSolution> {
    let vmax = ranges
        .iter()
        .map(|&(lo, hi)| lo.unsigned_abs().max(hi.unsigned_abs()))
        .max()
        .unwrap_or(1) as i128;
    if let Some(scaled) = scale_instance(instance, vmax) {
        let mut best: Option<(i128, Vec<i64>)> = None;
        let mut odo = Odometer::new(ranges);
        while let Some(v) = odo.current() {
            let feasible = scaled.rows.iter().all(|(a, b)| {
                let mut acc: i128 = 0;
                for (x, &coord) in a.iter().zip(v) {
                    acc += x * coord as i128;
                }
                acc <= *b
            });
            if feasible {
                let cost: i128 = scaled
                    .cost
                    .iter()
                    .zip(v)
                    .map(|(c, &coord)| c * coord as i128)
                    .sum();
                // Strictly-less keeps the first (lex-min) minimizer.
                if best.as_ref().map_or(true, |(bc, _)| cost < *bc) {
                    best = Some((cost, v.to_vec()));
                }
            }
            odo.advance();
        }
        let (_, v) = best.ok_or(Error::Infeasible)?;
        let point: Vec<Scalar> = v.into_iter().map(scalar::int).collect();
        let cost = scalar::dot(&instance.cost, &point);
        return Ok(MilpSolution {
            cost,
            point,
            lex_optimal: true,
        });
    }

    // Exotic coefficients: same loop in exact rationals.
    let mut best: Option<(Scalar, Vec<Scalar>)> = None;
    let mut odo = Odometer::new(ranges);
    while let Some(v) = odo.current() {
        let point: Vec<Scalar> = v.iter().map(|&x| scalar::int(x)).collect();
        if instance.rows.iter().all(|r| r.contains(&point)) {
            let cost = scalar::dot(&instance.cost, &point);
            if best.as_ref().map_or(true, |(bc, _)| &cost < bc) {
                best = Some((cost, point));
            }
        }
        odo.advance();
    }
    let (cost, point) = best.ok_or(Error::Infeasible)?;
    Ok(MilpSolution {
        cost,
        point,
        lex_optimal: true,
    })
}

fn brute_force_mixed(instance: &MilpInstance, ranges: &[(i64, i64)]) -> Result<MilpSolution> {
    let d_z = instance.d_z;
    let d_r = instance.d_r;
    // Split every row into integer and continuous blocks, and bound the
    // continuous contribution over the box for a cheap slice prefilter.
    struct SplitRow {
        a_int: Vec<Scalar>,
        a_cont: Vec<Scalar>,
        b: Scalar,
        cont_min: Scalar,
    }
    let rows: Vec<SplitRow> = instance
        .rows
        .iter()
        .map(|r| {
            let a_int = r.normal()[..d_z].to_vec();
            let a_cont = r.normal()[d_z..].to_vec();
            let cont_min = a_cont
                .iter()
                .fold(Scalar::zero(), |acc, x| acc - x.abs() * &instance.m);
            SplitRow {
                a_int,
                a_cont,
                b: r.offset().clone(),
                cont_min,
            }
        })
        .collect();
    let cont_box = bounding_box(&instance.m, d_r)?;
    let cost_int = &instance.cost[..d_z];
    let cost_cont = &instance.cost[d_z..];
    // Any continuous completion costs at least this much.
    let cont_cost_min = cost_cont
        .iter()
        .fold(Scalar::zero(), |acc, x| acc - x.abs() * &instance.m);

    // Visit assignments by ascending integer-block cost. Once that cost plus
    // the best conceivable continuous cost passes the incumbent, no later
    // assignment can win and the scan stops. Ties on the total are resolved
    // by explicit lexicographic comparison, so the pinned result is still
    // the lex-min optimum.
    let mut assignments: Vec<(Scalar, Vec<Scalar>)> = Vec::new();
    let mut odo = Odometer::new(ranges);
    while let Some(v) = odo.current() {
        let point_int: Vec<Scalar> = v.iter().map(|&x| scalar::int(x)).collect();
        assignments.push((scalar::dot(cost_int, &point_int), point_int));
        odo.advance();
    }
    assignments.sort_by(|(ca, va), (cb, vb)| ca.cmp(cb).then_with(|| lex_compare(va, vb)));

    let mut best: Option<(Scalar, Vec<Scalar>)> = None;
    let mut warm_ids: Option<Vec<crate::halfspace::RowId>> = None;
    'slices: for (int_cost, point_int) in assignments {
        if let Some((best_cost, _)) = &best {
            if &int_cost + &cont_cost_min > *best_cost {
                break;
            }
        }
        let mut slice = cont_box.clone();
        for (i, row) in rows.iter().enumerate() {
            let fixed = scalar::dot(&row.a_int, &point_int);
            // Even the most favorable continuous completion violates: the
            // whole slice is infeasible.
            if &fixed + &row.cont_min > row.b {
                continue 'slices;
            }
            if row.a_cont.iter().any(|x| !x.is_zero()) {
                slice.insert(HalfSpace::new(
                    row.a_cont.clone(),
                    &row.b - fixed,
                    RowId::Constraint(i),
                ));
            } else if fixed > row.b {
                continue 'slices;
            }
        }
        let hint = warm_ids.as_deref().map(WarmHint::Ids);
        if let LexLpResult::Optimal(opt) = lp_lex_solve_warm(&slice, cost_cont, hint)? {
            warm_ids = Some(opt.basis.ids());
            let cost = &int_cost + &opt.cost;
            let better = match &best {
                None => true,
                Some((best_cost, best_point)) => match cost.cmp(best_cost) {
                    std::cmp::Ordering::Less => true,
                    std::cmp::Ordering::Greater => false,
                    std::cmp::Ordering::Equal => {
                        let mut point = point_int.clone();
                        point.extend(opt.point.iter().cloned());
                        lex_compare(&point, best_point) == std::cmp::Ordering::Less
                    }
                },
            };
            if better {
                let mut point = point_int.clone();
                point.extend(opt.point);
                best = Some((cost, point));
            }
        }
    }
    let (cost, point) = best.ok_or(Error::Infeasible)?;
    Ok(MilpSolution {
        cost,
        point,
        lex_optimal: true,
    })
}

/// Result of the centralized cutting-plane loop.
#[derive(Debug, Clone)]
pub enum GomoryOutcome {
    Converged {
        solution: MilpSolution,
        iterations: usize,
        cuts_added: usize,
    },
    /// Iteration budget exhausted, or the oracle stopped producing new cuts
    /// (tailing off). Carries the best relaxation state reached.
    NotConverged {
        iterations: usize,
        last_cost: Scalar,
        last_point: Vec<Scalar>,
    },
}

impl GomoryOutcome {
    pub fn solution(&self) -> Option<&MilpSolution> {
        match self {
            GomoryOutcome::Converged { solution, .. } => Some(solution),
            GomoryOutcome::NotConverged { .. } => None,
        }
    }
}

/// Centralized cutting-plane loop: solve the LP relaxation, stop when the
/// integer block is integral, otherwise add the MIG cut for the first
/// fractional coordinate plus the cost cut, accumulate, and repeat.
pub fn centralized_gomory(instance: &MilpInstance, max_iters: usize) -> Result<GomoryOutcome> {
    let mut set = instance.relaxation_set()?;
    let mut cuts_added = 0;
    let mut last: Option<(Scalar, Vec<Scalar>)> = None;
    let mut warm: Option<crate::lp::Basis> = None;
    for iteration in 1..=max_iters {
        let hint = warm.as_ref().map(WarmHint::Basis);
        let opt = match lp_lex_solve_warm(&set, &instance.cost, hint)? {
            LexLpResult::Optimal(opt) => opt,
            LexLpResult::Infeasible => return Err(Error::Infeasible),
        };
        if opt.point[..instance.d_z].iter().all(scalar::is_integer) {
            return Ok(GomoryOutcome::Converged {
                solution: MilpSolution {
                    cost: opt.cost,
                    point: opt.point,
                    lex_optimal: true,
                },
                iterations: iteration,
                cuts_added,
            });
        }
        let origin = CutOrigin {
            agent: 0,
            round: iteration as u64,
        };
        let mut progressed = false;
        if let Some(cut) = cuts::mig_oracle(&opt.point, &opt.basis, instance.d_z, origin) {
            if set.insert(cut.halfspace) {
                cuts_added += 1;
                progressed = true;
            }
        }
        if !instance.cost.iter().all(Zero::is_zero) {
            let cut = cuts::int_cost_cut(&instance.cost, &opt.point, origin);
            if set.insert(cut.halfspace) {
                cuts_added += 1;
                progressed = true;
            }
        }
        warm = Some(opt.basis);
        last = Some((opt.cost, opt.point));
        if !progressed {
            // Both cuts already present: the relaxation is a fixed point and
            // no further progress is possible.
            let (last_cost, last_point) = last.unwrap();
            return Ok(GomoryOutcome::NotConverged {
                iterations: iteration,
                last_cost,
                last_point,
            });
        }
    }
    let (last_cost, last_point) = last.ok_or_else(|| {
        Error::InvalidInput("cutting-plane loop needs at least one iteration".into())
    })?;
    Ok(GomoryOutcome::NotConverged {
        iterations: max_iters,
        last_cost,
        last_point,
    })
}

/// Certify a point against a known optimal cost: feasible (rows, box, and
/// integrality) with `0 <= c^T z - j_star < epsilon`, strictly.
pub fn certify_eps(
    z: &[Scalar],
    instance: &MilpInstance,
    epsilon: &Scalar,
    j_star: &Scalar,
) -> bool {
    if !instance.is_feasible_point(z) {
        return false;
    }
    let gap = scalar::dot(&instance.cost, z) - j_star;
    !gap.is_negative() && &gap < epsilon
}

/// Rank two solutions by cost, then lexicographically by point.
pub fn compare_solutions(a: &MilpSolution, b: &MilpSolution) -> std::cmp::Ordering {
    a.cost
        .cmp(&b.cost)
        .then_with(|| lex_compare(&a.point, &b.point))
}
