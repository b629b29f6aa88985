//! Slotted-time network simulator.
//!
//! Rounds are synchronous: every agent's current basis is broadcast on the
//! round's active edges, each delivery is independently dropped with the
//! configured loss probability, and every non-halted agent then executes one
//! evolution step on whatever arrived. Loss draws are a pure function of
//! `(seed, round, edge)`, so runs are replayable and agents can be stepped in
//! any order without changing the outcome.

use std::collections::VecDeque;
use std::fmt::Write as _;
use std::path::Path;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::agent::{AgentState, BasisMessage, NetworkProblem};
use crate::halfspace::RowId;
use crate::scalar::{self, Scalar};
use crate::{Error, Result};

/// A fixed digraph on agents `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StaticGraph {
    n: usize,
    out_edges: Vec<Vec<usize>>,
    in_edges: Vec<Vec<usize>>,
}

impl StaticGraph {
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Self {
        let mut out_edges = vec![Vec::new(); n];
        let mut in_edges = vec![Vec::new(); n];
        for &(u, v) in edges {
            assert!(u < n && v < n && u != v, "bad edge ({u}, {v})");
            if !out_edges[u].contains(&v) {
                out_edges[u].push(v);
                in_edges[v].push(u);
            }
        }
        for list in out_edges.iter_mut().chain(in_edges.iter_mut()) {
            list.sort_unstable();
        }
        StaticGraph {
            n,
            out_edges,
            in_edges,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn out_neighbors(&self, i: usize) -> &[usize] {
        &self.out_edges[i]
    }

    pub fn in_neighbors(&self, i: usize) -> &[usize] {
        &self.in_edges[i]
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut edges = Vec::new();
        for (u, outs) in self.out_edges.iter().enumerate() {
            for &v in outs {
                edges.push((u, v));
            }
        }
        edges
    }

    fn bfs_dists(&self, start: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.n];
        dist[start] = Some(0);
        let mut queue = VecDeque::from([start]);
        while let Some(u) = queue.pop_front() {
            let du = dist[u].unwrap();
            for &v in &self.out_edges[u] {
                if dist[v].is_none() {
                    dist[v] = Some(du + 1);
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    pub fn is_strongly_connected(&self) -> bool {
        if self.n == 0 {
            return false;
        }
        if self.n == 1 {
            return true;
        }
        if self.bfs_dists(0).iter().any(Option::is_none) {
            return false;
        }
        let reversed = StaticGraph::from_edges(
            self.n,
            &self
                .edges()
                .iter()
                .map(|&(u, v)| (v, u))
                .collect::<Vec<_>>(),
        );
        reversed.bfs_dists(0).iter().all(Option::is_some)
    }

    /// Directed diameter by all-pairs BFS. Errors unless strongly connected.
    pub fn diameter(&self) -> Result<usize> {
        let mut best = 0;
        for start in 0..self.n {
            for d in self.bfs_dists(start) {
                match d {
                    None => return Err(Error::NotStronglyConnected),
                    Some(d) => best = best.max(d),
                }
            }
        }
        Ok(best)
    }

    fn union(frames: &[&StaticGraph]) -> StaticGraph {
        let n = frames[0].n;
        let mut edges = Vec::new();
        for f in frames {
            assert_eq!(f.n, n);
            edges.extend(f.edges());
        }
        StaticGraph::from_edges(n, &edges)
    }
}

/// Communication graph generators.
#[derive(Debug, Clone)]
pub enum GraphModel {
    /// Directed ring `i -> i+1 (mod n)`; diameter `n - 1`.
    Cyclic { agents: usize },
    /// Random digraph resampled (bumping the seed) until strongly connected
    /// with exactly the requested diameter.
    ErdosRenyi {
        agents: usize,
        edge_prob: f64,
        seed: u64,
        diameter: usize,
    },
    /// Bidirectional edges between agents within `radius` of each other.
    Proximity {
        positions: Vec<(f64, f64)>,
        radius: f64,
    },
    /// Time-varying: frame `t mod len` is active at round `t`.
    PeriodicUnion { frames: Vec<StaticGraph> },
    /// Any fixed digraph.
    Custom { graph: StaticGraph },
}

impl GraphModel {
    /// Proximity graph over seeded uniform positions in the unit square,
    /// resampled until strongly connected.
    pub fn random_proximity(agents: usize, radius: f64, seed: u64) -> Result<GraphModel> {
        const ATTEMPTS: usize = 10_000;
        for attempt in 0..ATTEMPTS {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(attempt as u64));
            let positions: Vec<(f64, f64)> = (0..agents)
                .map(|_| (rng.gen::<f64>(), rng.gen::<f64>()))
                .collect();
            let model = GraphModel::Proximity { positions, radius };
            if model.resolve().is_ok() {
                return Ok(model);
            }
        }
        Err(Error::GraphGeneration { attempts: ATTEMPTS })
    }

    /// Materialize into frames, validating connectivity requirements.
    pub fn resolve(&self) -> Result<Topology> {
        match self {
            GraphModel::Cyclic { agents } => {
                let n = *agents;
                if n == 0 {
                    return Err(Error::InvalidInput("empty network".into()));
                }
                let edges: Vec<(usize, usize)> = if n == 1 {
                    Vec::new()
                } else {
                    (0..n).map(|i| (i, (i + 1) % n)).collect()
                };
                Ok(Topology::static_graph(StaticGraph::from_edges(n, &edges)))
            }
            GraphModel::ErdosRenyi {
                agents,
                edge_prob,
                seed,
                diameter,
            } => {
                const ATTEMPTS: usize = 20_000;
                for attempt in 0..ATTEMPTS {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(attempt as u64));
                    let mut edges = Vec::new();
                    for u in 0..*agents {
                        for v in 0..*agents {
                            if u != v && rng.gen::<f64>() < *edge_prob {
                                edges.push((u, v));
                            }
                        }
                    }
                    let g = StaticGraph::from_edges(*agents, &edges);
                    if g.is_strongly_connected() && g.diameter()? == *diameter {
                        return Ok(Topology::static_graph(g));
                    }
                }
                Err(Error::GraphGeneration { attempts: ATTEMPTS })
            }
            GraphModel::Proximity { positions, radius } => {
                let n = positions.len();
                let mut edges = Vec::new();
                for u in 0..n {
                    for v in u + 1..n {
                        let dx = positions[u].0 - positions[v].0;
                        let dy = positions[u].1 - positions[v].1;
                        if (dx * dx + dy * dy).sqrt() <= *radius {
                            edges.push((u, v));
                            edges.push((v, u));
                        }
                    }
                }
                let g = StaticGraph::from_edges(n, &edges);
                if !g.is_strongly_connected() {
                    return Err(Error::NotStronglyConnected);
                }
                Ok(Topology::static_graph(g))
            }
            GraphModel::PeriodicUnion { frames } => {
                if frames.is_empty() {
                    return Err(Error::InvalidInput("no frames".into()));
                }
                let topology = Topology {
                    frames: frames.clone(),
                };
                if !topology.jointly_strongly_connected(frames.len()) {
                    return Err(Error::NotStronglyConnected);
                }
                Ok(topology)
            }
            GraphModel::Custom { graph } => {
                if !graph.is_strongly_connected() {
                    return Err(Error::NotStronglyConnected);
                }
                Ok(Topology::static_graph(graph.clone()))
            }
        }
    }
}

/// A resolved, possibly periodic, communication schedule.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Topology {
    frames: Vec<StaticGraph>,
}

impl Topology {
    pub fn static_graph(g: StaticGraph) -> Self {
        Topology { frames: vec![g] }
    }

    pub fn n_agents(&self) -> usize {
        self.frames[0].n()
    }

    pub fn period(&self) -> usize {
        self.frames.len()
    }

    pub fn is_static(&self) -> bool {
        self.frames.len() == 1
    }

    /// The digraph active at round `t`.
    pub fn frame(&self, t: u64) -> &StaticGraph {
        &self.frames[(t % self.frames.len() as u64) as usize]
    }

    /// In-neighbors of agent `i` at round `t`.
    pub fn neighbors_in(&self, i: usize, t: u64) -> &[usize] {
        self.frame(t).in_neighbors(i)
    }

    /// Diameter of a static schedule.
    pub fn diameter(&self) -> Result<usize> {
        if !self.is_static() {
            return Err(Error::InvalidInput(
                "diameter is defined for static graphs only".into(),
            ));
        }
        self.frames[0].diameter()
    }

    /// True iff the union over every window of `window` consecutive frames
    /// (all phases of the period) is strongly connected.
    pub fn jointly_strongly_connected(&self, window: usize) -> bool {
        if window == 0 {
            return false;
        }
        let p = self.frames.len();
        (0..p).all(|start| {
            let union: Vec<&StaticGraph> = (0..window)
                .map(|k| &self.frames[(start + k) % p])
                .collect();
            StaticGraph::union(&union).is_strongly_connected()
        })
    }

    /// Halting threshold for this schedule: `2 diameter + 1` when static,
    /// `2 L N + 1` for a period-L schedule.
    pub fn halt_threshold(&self) -> Result<u64> {
        if self.is_static() {
            Ok(2 * self.diameter()? as u64 + 1)
        } else {
            Ok(2 * self.period() as u64 * self.n_agents() as u64 + 1)
        }
    }
}

/// Per-edge i.i.d. packet loss: a delivery at round `t` on edge `(u, v)` is
/// dropped when a uniform draw falls below `p`. Draws are stateless hashes
/// of `(seed, t, u, v)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LossModel {
    pub p: f64,
    pub seed: u64,
}

impl LossModel {
    pub fn ideal() -> Self {
        LossModel { p: 0.0, seed: 0 }
    }

    pub fn new(p: f64, seed: u64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidInput(format!(
                "loss probability must be in [0, 1], got {p}"
            )));
        }
        Ok(LossModel { p, seed })
    }

    fn dropped(&self, round: u64, from: usize, to: usize) -> bool {
        if self.p <= 0.0 {
            return false;
        }
        let mut x = self
            .seed
            .wrapping_mul(0x9e37_79b9_7f4a_7c15)
            .wrapping_add(round.wrapping_mul(0xbf58_476d_1ce4_e5b9))
            .wrapping_add((from as u64).wrapping_mul(0x94d0_49bb_1331_11eb))
            .wrapping_add(to as u64);
        // splitmix64 finalizer
        x ^= x >> 30;
        x = x.wrapping_mul(0xbf58_476d_1ce4_e5b9);
        x ^= x >> 27;
        x = x.wrapping_mul(0x94d0_49bb_1331_11eb);
        x ^= x >> 31;
        let threshold = (self.p * (u64::MAX as f64 + 1.0)) as u128;
        (x as u128) < threshold
    }
}

/// One agent's snapshot in the trace.
#[derive(Debug, Clone, PartialEq)]
pub struct AgentRecord {
    pub cost: Scalar,
    pub point: Vec<Scalar>,
    pub basis_ids: Vec<RowId>,
    pub halted: bool,
}

/// One round's snapshot: agent states after the round's exchange and step,
/// plus the edges that delivered or dropped.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundRecord {
    pub agents: Vec<AgentRecord>,
    pub delivered: Vec<(usize, usize)>,
    pub lost: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunStatus {
    /// Every agent fired the halting rule.
    Converged,
    /// The round budget ran out first.
    NotConverged,
}

/// Full run history. Record 0 is the initial state; record `t >= 1` follows
/// communication round `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct RunTrace {
    pub records: Vec<RoundRecord>,
    pub status: RunStatus,
    pub loss_p: f64,
    pub seed: u64,
    pub halt_threshold: u64,
}

impl RunTrace {
    pub fn rounds_executed(&self) -> u64 {
        self.records.len() as u64 - 1
    }

    pub fn final_agents(&self) -> &[AgentRecord] {
        &self.records[self.records.len() - 1].agents
    }
}

/// Simulation outcome: the trace plus the live agent states (for recovery
/// and replay checks).
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub trace: RunTrace,
    pub agents: Vec<AgentState>,
}

fn snapshot(agents: &[AgentState]) -> Vec<AgentRecord> {
    agents
        .iter()
        .map(|a| AgentRecord {
            cost: a.cost_value(),
            point: a.point().to_vec(),
            basis_ids: a.basis().ids(),
            halted: a.halted(),
        })
        .collect()
}

/// Deliver one round of messages and step every non-halted agent. Halted
/// agents' frozen bases still answer for them on active edges.
pub fn exchange_and_step(
    agents: &[AgentState],
    frame: &StaticGraph,
    loss: &LossModel,
    round: u64,
    delivered: &mut Vec<(usize, usize)>,
    lost: &mut Vec<(usize, usize)>,
) -> Result<Vec<AgentState>> {
    let messages: Vec<BasisMessage> = agents.iter().map(AgentState::message).collect();
    let mut inboxes: Vec<Vec<BasisMessage>> = vec![Vec::new(); agents.len()];
    for (u, v) in frame.edges() {
        if loss.dropped(round, u, v) {
            lost.push((u, v));
        } else {
            delivered.push((u, v));
            inboxes[v].push(messages[u].clone());
        }
    }
    agents
        .iter()
        .zip(&inboxes)
        .map(|(agent, inbox)| agent.step(inbox, round))
        .collect()
}

/// Run the distributed algorithm until every agent halts or `max_rounds`
/// communication rounds have executed.
pub fn run(
    problem: &NetworkProblem,
    topology: &Topology,
    loss: &LossModel,
    max_rounds: u64,
    halt_threshold: u64,
) -> Result<RunOutcome> {
    if topology.n_agents() != problem.n_agents() {
        return Err(Error::InvalidInput(format!(
            "topology has {} nodes but the problem has {} parts",
            topology.n_agents(),
            problem.n_agents()
        )));
    }
    let mut agents = problem.init_agents()?;
    let mut records = vec![RoundRecord {
        agents: snapshot(&agents),
        delivered: Vec::new(),
        lost: Vec::new(),
    }];
    let mut status = RunStatus::NotConverged;
    for round in 0..max_rounds {
        let mut delivered = Vec::new();
        let mut lost = Vec::new();
        let mut next = exchange_and_step(
            &agents,
            topology.frame(round),
            loss,
            round,
            &mut delivered,
            &mut lost,
        )?;
        for agent in next.iter_mut() {
            agent.halting_check(halt_threshold);
        }
        agents = next;
        records.push(RoundRecord {
            agents: snapshot(&agents),
            delivered,
            lost,
        });
        if agents.iter().all(AgentState::halted) {
            status = RunStatus::Converged;
            break;
        }
    }
    Ok(RunOutcome {
        trace: RunTrace {
            records,
            status,
            loss_p: loss.p,
            seed: loss.seed,
            halt_threshold,
        },
        agents,
    })
}

/// First round index from which every agent holds the same cost and point
/// and nothing changes through the end of the trace.
pub fn consensus_round(trace: &RunTrace) -> Option<u64> {
    let last = trace.records.last()?;
    let target = last.agents.first()?;
    let settled = |record: &RoundRecord| {
        record
            .agents
            .iter()
            .all(|a| a.cost == target.cost && a.point == target.point)
    };
    if !settled(last) {
        return None;
    }
    let mut first = trace.records.len() - 1;
    while first > 0 && settled(&trace.records[first - 1]) {
        first -= 1;
    }
    Some(first as u64)
}

/// Trace CSV: one row per (round, agent) with the cost as an exact fraction.
pub fn write_trace_csv(trace: &RunTrace, path: &Path) -> Result<()> {
    let mut out = String::from("round,agent,cost_num,cost_den,halted\n");
    for (round, record) in trace.records.iter().enumerate() {
        for (agent, snap) in record.agents.iter().enumerate() {
            let _ = writeln!(
                out,
                "{round},{agent},{},{},{}",
                snap.cost.numer(),
                snap.cost.denom(),
                snap.halted
            );
        }
    }
    std::fs::write(path, out)?;
    Ok(())
}

/// Machine-readable run summary.
pub fn summary_json(trace: &RunTrace) -> serde_json::Value {
    let final_costs: Vec<String> = trace
        .final_agents()
        .iter()
        .map(|a| scalar::token(&a.cost))
        .collect();
    json!({
        "consensus_round": consensus_round(trace),
        "final_cost": final_costs.first(),
        "rounds_executed": trace.rounds_executed(),
        "converged": trace.status == RunStatus::Converged,
        "loss_p": trace.loss_p,
        "seed": trace.seed,
        "halt_threshold": trace.halt_threshold,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::{gen_random_milp, partition, PartitionPolicy};
    use crate::scalar::int;

    fn ring(n: usize) -> Topology {
        GraphModel::Cyclic { agents: n }.resolve().unwrap()
    }

    #[test]
    fn cyclic_neighbors_and_diameter() {
        let topo = ring(4);
        assert_eq!(topo.neighbors_in(2, 0), &[1]);
        assert_eq!(topo.neighbors_in(0, 7), &[3]);
        assert_eq!(topo.diameter().unwrap(), 3);
        assert_eq!(ring(16).diameter().unwrap(), 15);
        assert_eq!(ring(16).halt_threshold().unwrap(), 31);
    }

    #[test]
    fn complete_and_bidirectional_diameters() {
        let mut edges = Vec::new();
        for u in 0..5 {
            for v in 0..5 {
                if u != v {
                    edges.push((u, v));
                }
            }
        }
        let g = StaticGraph::from_edges(5, &edges);
        assert_eq!(g.diameter().unwrap(), 1);

        let two = StaticGraph::from_edges(2, &[(0, 1), (1, 0)]);
        assert_eq!(two.diameter().unwrap(), 1);
    }

    #[test]
    fn disconnected_graph_has_no_diameter() {
        let g = StaticGraph::from_edges(3, &[(0, 1), (1, 0)]);
        assert!(matches!(g.diameter(), Err(Error::NotStronglyConnected)));
    }

    #[test]
    fn periodic_split_ring_needs_its_full_window() {
        // A four-cycle split into two edge-disjoint halves: each frame alone
        // is disconnected, the union over any window of two frames is the
        // full ring.
        let g1 = StaticGraph::from_edges(4, &[(0, 1), (2, 3)]);
        let g2 = StaticGraph::from_edges(4, &[(1, 2), (3, 0)]);
        let topo = GraphModel::PeriodicUnion {
            frames: vec![g1.clone(), g2.clone()],
        }
        .resolve()
        .unwrap();
        assert!(topo.jointly_strongly_connected(2));
        assert!(!topo.jointly_strongly_connected(1));
        assert_eq!(topo.halt_threshold().unwrap(), 2 * 2 * 4 + 1);
        // Frame indexing is periodic.
        assert_eq!(topo.neighbors_in(2, 3), g2.in_neighbors(2));

        // A static strongly connected graph is jointly connected at window 1.
        assert!(ring(5).jointly_strongly_connected(1));

        // An isolated sink in every frame is never jointly connected.
        let lonely = GraphModel::PeriodicUnion {
            frames: vec![StaticGraph::from_edges(3, &[(0, 1), (1, 0)])],
        };
        assert!(matches!(lonely.resolve(), Err(Error::NotStronglyConnected)));
    }

    #[test]
    fn proximity_edges_respect_the_radius() {
        let model = GraphModel::Proximity {
            positions: vec![(0.0, 0.0), (0.0, 0.5), (0.0, 2.0)],
            radius: 0.6,
        };
        // Third agent unreachable: not strongly connected.
        assert!(matches!(model.resolve(), Err(Error::NotStronglyConnected)));

        let model = GraphModel::Proximity {
            positions: vec![(0.0, 0.0), (0.0, 0.5), (0.0, 1.0)],
            radius: 0.6,
        };
        let topo = model.resolve().unwrap();
        assert_eq!(topo.neighbors_in(1, 0), &[0, 2]);
        assert_eq!(topo.neighbors_in(0, 0), &[1]);
    }

    #[test]
    fn random_proximity_is_connected_and_deterministic() {
        let a = GraphModel::random_proximity(6, 0.6, 9).unwrap();
        let b = GraphModel::random_proximity(6, 0.6, 9).unwrap();
        assert_eq!(a.resolve().unwrap(), b.resolve().unwrap());
    }

    #[test]
    fn erdos_renyi_hits_requested_diameter() {
        let topo = GraphModel::ErdosRenyi {
            agents: 8,
            edge_prob: 0.25,
            seed: 1,
            diameter: 4,
        }
        .resolve()
        .unwrap();
        assert_eq!(topo.diameter().unwrap(), 4);
    }

    #[test]
    fn loss_model_extremes_and_determinism() {
        let never = LossModel::new(0.0, 5).unwrap();
        let always = LossModel::new(1.0, 5).unwrap();
        let half = LossModel::new(0.5, 5).unwrap();
        let mut kept = 0;
        for t in 0..1000 {
            assert!(!never.dropped(t, 0, 1));
            assert!(always.dropped(t, 0, 1));
            if !half.dropped(t, 0, 1) {
                kept += 1;
            }
            assert_eq!(half.dropped(t, 0, 1), half.dropped(t, 0, 1));
        }
        assert!((300..700).contains(&kept), "kept {kept} of 1000 at p=0.5");
        assert!(LossModel::new(1.5, 0).is_err());
    }

    fn tiny_problem(seed: u64, agents: usize) -> NetworkProblem {
        let mut instance = gen_random_milp(seed, 3, 3, 6).unwrap().with_box(int(5));
        // Integer cost keeps the exact variant's convergence guarantee.
        instance.cost = instance.cost.iter().map(|c| c.round()).collect();
        let parts = partition(&instance, agents, &PartitionPolicy::RoundRobin).unwrap();
        NetworkProblem::exact(&instance, parts, false)
    }

    #[test]
    fn ideal_run_converges_and_replays_identically() {
        let problem = tiny_problem(42, 3);
        let topo = ring(3);
        let threshold = topo.halt_threshold().unwrap();
        let a = run(&problem, &topo, &LossModel::ideal(), 500, threshold).unwrap();
        assert_eq!(a.trace.status, RunStatus::Converged);
        let round = consensus_round(&a.trace).expect("consensus reached");
        assert!(round <= a.trace.rounds_executed());
        // Everyone ends halted with identical cost and point.
        let last = a.trace.final_agents();
        assert!(last.iter().all(|s| s.halted));
        assert!(last.iter().all(|s| s.cost == last[0].cost));
        assert!(last.iter().all(|s| s.point == last[0].point));

        let b = run(&problem, &topo, &LossModel::ideal(), 500, threshold).unwrap();
        assert_eq!(a.trace, b.trace);
    }

    #[test]
    fn total_loss_leaves_agents_at_local_optima() {
        let problem = tiny_problem(7, 3);
        let topo = ring(3);
        let outcome = run(
            &problem,
            &topo,
            &LossModel::new(1.0, 1).unwrap(),
            500,
            topo.halt_threshold().unwrap(),
        )
        .unwrap();
        // Everyone halts on their own local optimum.
        assert_eq!(outcome.trace.status, RunStatus::Converged);
        for record in &outcome.trace.records[1..] {
            assert!(record.delivered.is_empty());
            assert_eq!(record.lost.len(), 3);
        }
        // No information flow: no consensus (costs differ on this instance).
        assert!(consensus_round(&outcome.trace).is_none());
    }

    #[test]
    fn lossy_run_still_converges_with_matching_replay() {
        let problem = tiny_problem(11, 4);
        let topo = ring(4);
        let loss = LossModel::new(0.3, 99).unwrap();
        let threshold = 4 * topo.halt_threshold().unwrap();
        let a = run(&problem, &topo, &loss, 2000, threshold).unwrap();
        let b = run(&problem, &topo, &loss, 2000, threshold).unwrap();
        assert_eq!(a.trace, b.trace);
        assert_eq!(a.trace.status, RunStatus::Converged);
        assert!(consensus_round(&a.trace).is_some());
        // Some packets must actually drop at p = 0.3.
        assert!(a.trace.records.iter().any(|r| !r.lost.is_empty()));
    }

    #[test]
    fn single_agent_consensus_round_is_its_settling_round() {
        let problem = tiny_problem(3, 1);
        let topo = ring(1);
        let outcome = run(&problem, &topo, &LossModel::ideal(), 200, 1).unwrap();
        let round = consensus_round(&outcome.trace).unwrap();
        // The settling round is the first holding the final cost and point.
        let final_point = &outcome.trace.final_agents()[0].point;
        let first_stable = outcome
            .trace
            .records
            .iter()
            .position(|r| &r.agents[0].point == final_point)
            .unwrap() as u64;
        assert_eq!(round, first_stable);
    }

    #[test]
    fn trace_exports() {
        let problem = tiny_problem(42, 3);
        let topo = ring(3);
        let outcome = run(
            &problem,
            &topo,
            &LossModel::ideal(),
            500,
            topo.halt_threshold().unwrap(),
        )
        .unwrap();
        let dir = tempfile::tempdir().unwrap();
        let csv_path = dir.path().join("trace.csv");
        write_trace_csv(&outcome.trace, &csv_path).unwrap();
        let text = std::fs::read_to_string(&csv_path).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "round,agent,cost_num,cost_den,halted"
        );
        assert_eq!(
            text.lines().count() as u64,
            1 + 3 * (outcome.trace.rounds_executed() + 1)
        );

        let summary = summary_json(&outcome.trace);
        assert_eq!(summary["rounds_executed"], outcome.trace.rounds_executed());
        assert_eq!(summary["loss_p"], 0.0);
        assert!(summary["consensus_round"].is_u64());
        assert!(summary["converged"].as_bool().unwrap());
    }
}
