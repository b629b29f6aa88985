use std::time::Instant;
use distmilp::agent::NetworkProblem;
use distmilp::netsim::{run, GraphModel, LossModel};
use distmilp::oracle::brute_force_milp;
use distmilp::problems::{gen_random_milp, partition, PartitionPolicy};
use distmilp::scalar::{int, rat, token};

fn main() {
    let topology = GraphModel::Cyclic { agents: 8 }.resolve().unwrap();
    let threshold = topology.halt_threshold().unwrap();
    for seed in 0..25u64 {
        let instance = gen_random_milp(seed, 6, 3, 24).unwrap().with_box(int(10));
        let t = Instant::now();
        let j = brute_force_milp(&instance).unwrap().cost;
        let oracle_t = t.elapsed();
        for eps in [int(1), rat(1, 10)] {
            let parts = partition(&instance, 8, &PartitionPolicy::RoundRobin).unwrap();
            let problem = NetworkProblem::tolerance(&instance, parts, &eps, false).unwrap();
            let t = Instant::now();
            let outcome = run(&problem, &topology, &LossModel::ideal(), 5000, threshold).unwrap();
            println!(
                "seed {seed} eps {}: oracle {:.1?}, run {:.1?}, rounds {}, status {:?}, J*={}",
                token(&eps),
                oracle_t,
                t.elapsed(),
                outcome.trace.rounds_executed(),
                outcome.trace.status,
                token(&j)
            );
        }
    }
}
