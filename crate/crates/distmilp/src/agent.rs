//! Per-agent state machine for distributed MILP solving.
//!
//! Each agent holds a fixed local constraint set (its share of the problem
//! rows intersected with the bounding box) and two evolving states: the
//! current lex-optimal point and a candidate basis. Every round it generates
//! cuts at its own point, intersects the bases received from in-neighbors
//! with its own basis, its fixed rows, and the fresh cuts, then re-solves the
//! lexicographic LP. Convergence is detected locally by counting rounds with
//! an unchanged basis.
//!
//! Two algorithm variants share this evolution. The exact variant runs on the
//! instance as given and needs an integer-valued optimal cost for its cost
//! cuts to be valid. The tolerance variant first rewrites the instance in
//! epigraph form, scales the epigraph variable by `1/epsilon`, and constrains
//! it to be integer; the rewritten problem always has integer optimal cost,
//! and projecting its solution back yields a feasible point within `epsilon`
//! of optimal.

use num_traits::{One, Signed, Zero};

use crate::cuts::{self, CutOrigin};
use crate::halfspace::{ConstraintSet, HalfSpace, RowId};
use crate::lp::{bounding_box, lp_lex_solve, lp_lex_solve_warm, Basis, LexLpResult, WarmHint};
use crate::problems::MilpInstance;
use crate::scalar::{self, Scalar};
use crate::{Error, Result};

/// Which algorithm the network is running.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AlgoVariant {
    /// Exact solve; requires an integer-valued optimal cost.
    Int,
    /// Epigraph approximation with tolerance `epsilon > 0`.
    Eps { epsilon: Scalar },
}

impl AlgoVariant {
    pub fn eps(epsilon: Scalar) -> Result<Self> {
        if !epsilon.is_positive() {
            return Err(Error::InvalidInput(format!(
                "tolerance must be positive, got {epsilon}"
            )));
        }
        Ok(AlgoVariant::Eps { epsilon })
    }
}

/// A candidate basis broadcast to out-neighbors: the rows keep their stable
/// identities so receivers deduplicate them against their own.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BasisMessage {
    pub sender: usize,
    pub rows: Vec<HalfSpace>,
}

/// One agent's full state. `step` is a pure transition, so the simulator can
/// evaluate a whole round from a snapshot in any order.
#[derive(Debug, Clone)]
pub struct AgentState {
    id: usize,
    variant: AlgoVariant,
    cost: Vec<Scalar>,
    d_z: usize,
    multi_cuts: bool,
    fixed: ConstraintSet,
    z: Vec<Scalar>,
    basis: Basis,
    unchanged_rounds: u64,
    halted: bool,
}

/// Projection of a converged (or running) agent state back to the original
/// decision space.
#[derive(Debug, Clone)]
pub struct Recovered {
    pub point: Vec<Scalar>,
    /// For the exact variant, the exact cost; for the tolerance variant, the
    /// certified upper bound `epsilon * rho` on the original cost.
    pub cost_bound: Scalar,
    /// False while the agent is still running: the bound is then only a
    /// running estimate.
    pub converged: bool,
}

impl AgentState {
    /// Initialize from the agent's local rows (already in working
    /// coordinates). The fixed constraint is the local rows intersected with
    /// the bounding box; the first point and basis come from solving over it.
    pub fn init(
        id: usize,
        local_rows: &ConstraintSet,
        m: &Scalar,
        cost: Vec<Scalar>,
        d_z: usize,
        variant: AlgoVariant,
        multi_cuts: bool,
    ) -> Result<Self> {
        let dim = cost.len();
        assert_eq!(local_rows.dim(), dim, "local rows dimension mismatch");
        assert!(d_z <= dim);
        if let AlgoVariant::Eps { epsilon } = &variant {
            assert!(epsilon.is_positive(), "tolerance must be positive");
        }
        let mut fixed = bounding_box(m, dim)?;
        fixed.extend_from(local_rows);
        let opt = match lp_lex_solve(&fixed, &cost)? {
            LexLpResult::Optimal(opt) => opt,
            LexLpResult::Infeasible => return Err(Error::InfeasibleLocal { agent: id }),
        };
        Ok(AgentState {
            id,
            variant,
            cost,
            d_z,
            multi_cuts,
            fixed,
            z: opt.point,
            basis: opt.basis,
            unchanged_rounds: 0,
            halted: false,
        })
    }

    pub fn id(&self) -> usize {
        self.id
    }

    pub fn point(&self) -> &[Scalar] {
        &self.z
    }

    pub fn basis(&self) -> &Basis {
        &self.basis
    }

    pub fn halted(&self) -> bool {
        self.halted
    }

    pub fn unchanged_rounds(&self) -> u64 {
        self.unchanged_rounds
    }

    pub fn variant(&self) -> &AlgoVariant {
        &self.variant
    }

    /// Working-space cost `c^T z` (the epigraph variable for the tolerance
    /// variant).
    pub fn cost_value(&self) -> Scalar {
        scalar::dot(&self.cost, &self.z)
    }

    /// The basis this agent broadcasts.
    pub fn message(&self) -> BasisMessage {
        BasisMessage {
            sender: self.id,
            rows: self.basis.rows().to_vec(),
        }
    }

    /// One evolution round: generate cuts at the current point, pool them
    /// with the received bases, the own basis, and the fixed rows, and
    /// re-solve. A halted agent does not move.
    pub fn step(&self, inbox: &[BasisMessage], round: u64) -> Result<Self> {
        if self.halted {
            return Ok(self.clone());
        }
        let origin = CutOrigin {
            agent: self.id,
            round,
        };

        let mut working = ConstraintSet::new(self.cost.len());
        working.extend_from(&self.fixed);
        for row in self.basis.rows() {
            working.insert(row.clone());
        }
        for message in inbox {
            for row in &message.rows {
                working.insert(row.clone());
            }
        }
        if self.multi_cuts {
            for cut in cuts::multi_mig(&self.z, &self.basis, self.d_z, origin) {
                working.insert(cut.halfspace);
            }
        } else if let Some(cut) = cuts::mig_oracle(&self.z, &self.basis, self.d_z, origin) {
            working.insert(cut.halfspace);
        }
        match &self.variant {
            AlgoVariant::Int => {
                if !self.cost.iter().all(Zero::is_zero) {
                    working.insert(cuts::int_cost_cut(&self.cost, &self.z, origin).halfspace);
                }
            }
            AlgoVariant::Eps { .. } => {
                working.insert(cuts::eps_cost_cut(&self.z[0], self.z.len(), origin).halfspace);
            }
        }

        // The own basis is always part of the working set, so its vertex is
        // a valid warm start for the re-solve.
        let opt = match lp_lex_solve_warm(&working, &self.cost, Some(WarmHint::Basis(&self.basis)))? {
            LexLpResult::Optimal(opt) => opt,
            LexLpResult::Infeasible => {
                return Err(Error::Protocol {
                    agent: self.id,
                    round,
                })
            }
        };
        // The working set is contained in the previous basis, so the local
        // cost can never decrease.
        assert!(
            opt.cost >= self.cost_value(),
            "agent {} cost decreased at round {round}",
            self.id
        );

        let unchanged = if opt.basis.same_rows(&self.basis) {
            self.unchanged_rounds + 1
        } else {
            0
        };
        Ok(AgentState {
            id: self.id,
            variant: self.variant.clone(),
            cost: self.cost.clone(),
            d_z: self.d_z,
            multi_cuts: self.multi_cuts,
            fixed: self.fixed.clone(),
            z: opt.point,
            basis: opt.basis,
            unchanged_rounds: unchanged,
            halted: false,
        })
    }

    /// Distributed stopping rule: halt once the basis has survived
    /// `threshold` consecutive rounds unchanged. The caller supplies the
    /// threshold (`2 diameter + 1` on a static digraph, `2 L N + 1` on an
    /// L-strongly-connected one). Once halted, the agent stops computing;
    /// its frozen basis keeps answering for it.
    pub fn halting_check(&mut self, threshold: u64) -> bool {
        if !self.halted && self.unchanged_rounds >= threshold {
            self.halted = true;
        }
        self.halted
    }

    /// Copy with the halting latch released. The stopping rule is detection
    /// only, so a resumed converged agent must sit at a fixed point of the
    /// evolution; replay harnesses use this to verify exactly that.
    pub fn resumed(&self) -> Self {
        let mut copy = self.clone();
        copy.halted = false;
        copy
    }

    /// Project back to the original decision space.
    pub fn recover(&self) -> Recovered {
        match &self.variant {
            AlgoVariant::Int => Recovered {
                point: self.z.clone(),
                cost_bound: self.cost_value(),
                converged: self.halted,
            },
            AlgoVariant::Eps { epsilon } => Recovered {
                point: self.z[1..].to_vec(),
                cost_bound: epsilon * &self.z[0],
                converged: self.halted,
            },
        }
    }
}

/// The epigraph rewrite of an instance for the tolerance variant, in
/// coordinates `(rho, z)` with `rho` integer and cost `e_1`.
#[derive(Debug, Clone)]
pub struct EpigraphInstance {
    /// Extended instance whose rows are the lifted originals.
    pub milp: MilpInstance,
    /// Rows every agent knows: the coupling row `c^T z <= epsilon * rho` and
    /// the original-variable box carried over at its original width.
    pub shared_rows: Vec<HalfSpace>,
    pub epsilon: Scalar,
}

impl EpigraphInstance {
    /// Flatten into a single centralized instance (shared rows appended),
    /// e.g. for oracle cross-checks.
    pub fn combined(&self) -> MilpInstance {
        let mut rows = self.milp.rows.clone();
        rows.extend(self.shared_rows.iter().cloned());
        MilpInstance::new(
            self.milp.cost.clone(),
            rows,
            self.milp.d_z,
            self.milp.d_r,
            self.milp.m.clone(),
            self.milp.meta.clone(),
        )
        .expect("lifted instance stays well-formed")
    }
}

/// Prepend a zero coefficient for the epigraph variable.
pub(crate) fn lift_row(row: &HalfSpace) -> HalfSpace {
    let mut a = Vec::with_capacity(row.dim() + 1);
    a.push(Scalar::zero());
    a.extend(row.normal().iter().cloned());
    HalfSpace::new(a, row.offset().clone(), row.id())
}

/// Bounding-box parameter for the extended space: wide enough that the box
/// never cuts off the optimal epigraph value. The cost range over the
/// original box is the safe overestimate `M * sum |c_j|`.
pub fn epigraph_box(instance: &MilpInstance, epsilon: &Scalar) -> Scalar {
    let cost_range = &instance.m * scalar::l1_norm(&instance.cost);
    std::cmp::max(instance.m.clone(), (cost_range / epsilon).ceil())
}

/// Rewrite `min c^T z` as `min rho` over `c^T z <= epsilon * rho` with `rho`
/// integer. Coordinates become `(rho, z)`; the integer block grows by one.
pub fn epigraph_transform(instance: &MilpInstance, epsilon: &Scalar) -> Result<EpigraphInstance> {
    if !epsilon.is_positive() {
        return Err(Error::InvalidInput(format!(
            "tolerance must be positive, got {epsilon}"
        )));
    }
    let d = instance.dim();
    let lifted: Vec<HalfSpace> = instance.rows.iter().map(lift_row).collect();

    let mut coupling = Vec::with_capacity(d + 1);
    coupling.push(-epsilon.clone());
    coupling.extend(instance.cost.iter().cloned());
    let mut shared_rows = vec![HalfSpace::new(coupling, Scalar::zero(), RowId::Coupling)];
    // Keep the original box at its original width so widening the extended
    // box does not enlarge the feasible set in z.
    for coord in 0..d {
        let mut upper = scalar::zeros(d + 1);
        upper[coord + 1] = Scalar::one();
        shared_rows.push(HalfSpace::new(
            upper,
            instance.m.clone(),
            RowId::InnerBox { coord, upper: true },
        ));
        let mut lower = scalar::zeros(d + 1);
        lower[coord + 1] = -Scalar::one();
        shared_rows.push(HalfSpace::new(
            lower,
            instance.m.clone(),
            RowId::InnerBox {
                coord,
                upper: false,
            },
        ));
    }

    let mut cost = scalar::zeros(d + 1);
    cost[0] = Scalar::one();
    let milp = MilpInstance::new(
        cost,
        lifted,
        instance.d_z + 1,
        instance.d_r,
        epigraph_box(instance, epsilon),
        instance.meta.clone(),
    )?;
    Ok(EpigraphInstance {
        milp,
        shared_rows,
        epsilon: epsilon.clone(),
    })
}

/// Everything the simulator needs to spawn a network: per-agent row sets in
/// working coordinates plus the shared solve configuration.
#[derive(Debug, Clone)]
pub struct NetworkProblem {
    pub cost: Vec<Scalar>,
    pub d_z: usize,
    pub m: Scalar,
    pub parts: Vec<ConstraintSet>,
    pub variant: AlgoVariant,
    pub multi_cuts: bool,
}

impl NetworkProblem {
    /// Exact variant: agents work on the instance as partitioned.
    pub fn exact(instance: &MilpInstance, parts: Vec<ConstraintSet>, multi_cuts: bool) -> Self {
        NetworkProblem {
            cost: instance.cost.clone(),
            d_z: instance.d_z,
            m: instance.m.clone(),
            parts,
            variant: AlgoVariant::Int,
            multi_cuts,
        }
    }

    /// Tolerance variant: each part is lifted into epigraph coordinates and
    /// every agent additionally knows the shared coupling and inner-box rows.
    pub fn tolerance(
        instance: &MilpInstance,
        parts: Vec<ConstraintSet>,
        epsilon: &Scalar,
        multi_cuts: bool,
    ) -> Result<Self> {
        let epi = epigraph_transform(instance, epsilon)?;
        let ext_dim = instance.dim() + 1;
        let parts = parts
            .into_iter()
            .map(|part| {
                let mut lifted = ConstraintSet::new(ext_dim);
                for row in part.iter() {
                    lifted.insert(lift_row(row));
                }
                for row in &epi.shared_rows {
                    lifted.insert(row.clone());
                }
                lifted
            })
            .collect();
        Ok(NetworkProblem {
            cost: epi.milp.cost.clone(),
            d_z: epi.milp.d_z,
            m: epi.milp.m.clone(),
            parts,
            variant: AlgoVariant::Eps {
                epsilon: epsilon.clone(),
            },
            multi_cuts,
        })
    }

    pub fn n_agents(&self) -> usize {
        self.parts.len()
    }

    /// Spawn the initial agent states.
    pub fn init_agents(&self) -> Result<Vec<AgentState>> {
        self.parts
            .iter()
            .enumerate()
            .map(|(id, part)| {
                AgentState::init(
                    id,
                    part,
                    &self.m,
                    self.cost.clone(),
                    self.d_z,
                    self.variant.clone(),
                    self.multi_cuts,
                )
            })
            .collect()
    }
}
