//! MILP instances: the random test-problem generator, the multi-vehicle
//! task-assignment builder, constraint partitioning across agents, and a
//! line-oriented exact text format for instance files.

use std::fmt::Write as _;
use std::path::Path;

use num_traits::{One, Signed, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Deserialize;

use crate::halfspace::{ConstraintSet, HalfSpace, RowId};
use crate::lp::bounding_box;
use crate::scalar::{self, Scalar};
use crate::{Error, Result};

/// How an instance was produced; round-trips through the file format.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct InstanceMeta {
    pub seed: Option<u64>,
    pub generator: Option<String>,
}

/// A mixed-integer linear program: minimize `c^T z` subject to the rows and
/// the bounding box, with the first `d_z` coordinates integer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MilpInstance {
    pub cost: Vec<Scalar>,
    pub rows: Vec<HalfSpace>,
    pub d_z: usize,
    pub d_r: usize,
    pub m: Scalar,
    pub meta: InstanceMeta,
}

impl MilpInstance {
    pub fn new(
        cost: Vec<Scalar>,
        rows: Vec<HalfSpace>,
        d_z: usize,
        d_r: usize,
        m: Scalar,
        meta: InstanceMeta,
    ) -> Result<Self> {
        let d = d_z + d_r;
        if cost.len() != d {
            return Err(Error::InvalidInput(format!(
                "cost has {} entries but d_z + d_r = {d}",
                cost.len()
            )));
        }
        if rows.is_empty() {
            return Err(Error::InvalidInput("instance needs at least one row".into()));
        }
        if let Some(bad) = rows.iter().find(|r| r.dim() != d) {
            return Err(Error::InvalidInput(format!(
                "row {} has dimension {}, expected {d}",
                bad.id(),
                bad.dim()
            )));
        }
        if !m.is_positive() {
            return Err(Error::InvalidInput(format!(
                "bounding box parameter must be positive, got {m}"
            )));
        }
        Ok(MilpInstance {
            cost,
            rows,
            d_z,
            d_r,
            m,
            meta,
        })
    }

    pub fn dim(&self) -> usize {
        self.d_z + self.d_r
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    /// Structural rows only, as a set.
    pub fn row_set(&self) -> ConstraintSet {
        ConstraintSet::from_rows(self.dim(), self.rows.iter().cloned())
    }

    /// Structural rows intersected with the bounding box: the full feasible
    /// region of the LP relaxation.
    pub fn relaxation_set(&self) -> Result<ConstraintSet> {
        let mut set = self.row_set();
        set.extend_from(&bounding_box(&self.m, self.dim())?);
        Ok(set)
    }

    /// Same instance with a different bounding box parameter.
    pub fn with_box(mut self, m: Scalar) -> Self {
        self.m = m;
        self
    }

    /// Exact feasibility: rows, box, and integrality of the leading block.
    pub fn is_feasible_point(&self, z: &[Scalar]) -> bool {
        z.len() == self.dim()
            && self.rows.iter().all(|r| r.contains(z))
            && z.iter().all(|x| x.abs() <= self.m)
            && z[..self.d_z].iter().all(scalar::is_integer)
    }
}

/// Default bounding box half-width for generated and loaded instances.
pub fn default_box() -> Scalar {
    scalar::int(100)
}

/// Random MILP model: rows with standard Gaussian normals, offsets uniform
/// in `[0, 50]` (so the origin is always feasible), and cost `A^T ĉ` with
/// `ĉ` uniform in `[0, 1]^n`. Samples are drawn in double precision and
/// snapped to rationals with denominator 2^30; the cost is then computed
/// exactly from the snapped data.
pub fn gen_random_milp(seed: u64, d: usize, d_z: usize, n: usize) -> Result<MilpInstance> {
    if d == 0 || n < d || d_z > d {
        return Err(Error::InvalidInput(format!(
            "need n >= d >= d_z >= 0, got d={d}, d_z={d_z}, n={n}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows_raw: Vec<Vec<Scalar>> = Vec::with_capacity(n);
    for _ in 0..n {
        let row: Vec<Scalar> = (0..d)
            .map(|_| scalar::snap_f64(rng.sample::<f64, _>(StandardNormal)))
            .collect();
        rows_raw.push(row);
    }
    let offsets: Vec<Scalar> = (0..n)
        .map(|_| scalar::snap_f64(rng.gen_range(0.0..50.0)))
        .collect();
    let weights: Vec<Scalar> = (0..n)
        .map(|_| scalar::snap_f64(rng.gen_range(0.0..1.0)))
        .collect();

    let cost: Vec<Scalar> = (0..d)
        .map(|j| {
            let mut acc = Scalar::zero();
            for (row, w) in rows_raw.iter().zip(&weights) {
                if !row[j].is_zero() && !w.is_zero() {
                    acc += &row[j] * w;
                }
            }
            acc
        })
        .collect();

    let rows: Vec<HalfSpace> = rows_raw
        .into_iter()
        .zip(offsets)
        .enumerate()
        .map(|(i, (a, b))| HalfSpace::new(a, b, RowId::Constraint(i)))
        .collect();

    MilpInstance::new(
        cost,
        rows,
        d_z,
        d - d_z,
        default_box(),
        InstanceMeta {
            seed: Some(seed),
            generator: Some("random".into()),
        },
    )
}

fn de_scalar<'de, D>(deserializer: D) -> std::result::Result<Scalar, D::Error>
where
    D: serde::Deserializer<'de>,
{
    use serde::de::Error as _;
    let value = serde_json::Value::deserialize(deserializer)?;
    match &value {
        serde_json::Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(scalar::int(i))
            } else {
                Err(D::Error::custom(
                    "non-integer numeric literals are not exact; write \"num/den\"",
                ))
            }
        }
        serde_json::Value::String(s) => {
            scalar::parse_token(s).map_err(|e| D::Error::custom(e.to_string()))
        }
        other => Err(D::Error::custom(format!(
            "expected integer or \"num/den\" string, got {other}"
        ))),
    }
}

/// A target that must be visited by at least `multiplicity` selected paths.
#[derive(Debug, Clone, Deserialize, PartialEq, Eq)]
pub struct TargetSpec {
    pub multiplicity: u32,
}

/// A candidate path: owned by one vehicle, visiting a set of targets, with a
/// completion time.
#[derive(Debug, Clone, Deserialize, PartialEq, Eq)]
pub struct PathSpec {
    pub vehicle: usize,
    #[serde(deserialize_with = "de_scalar")]
    pub time: Scalar,
    pub targets: Vec<usize>,
}

/// Input data for the multi-vehicle task-assignment problem. Accepted as
/// JSON: `{"targets": [{"multiplicity": 1}, ...], "vehicles": 2,
/// "paths": [{"vehicle": 0, "time": 5, "targets": [0, 1]}, ...]}`.
/// Times may be integers or exact `"num/den"` strings.
#[derive(Debug, Clone, Deserialize, PartialEq, Eq)]
pub struct AssignmentSpec {
    pub targets: Vec<TargetSpec>,
    pub vehicles: usize,
    pub paths: Vec<PathSpec>,
}

impl AssignmentSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// Build the assignment MILP: binary path selectors `x` plus a makespan
/// variable `y`, minimizing `y` subject to coverage, one path per vehicle,
/// and `tau_l x_l <= y`. Binary variables are encoded as integer variables
/// with `0 <= x_l <= 1` box rows.
pub fn build_assignment_milp(spec: &AssignmentSpec) -> Result<MilpInstance> {
    let n_paths = spec.paths.len();
    if n_paths == 0 {
        return Err(Error::InvalidInput(
            "assignment needs at least one path".into(),
        ));
    }
    for (i, path) in spec.paths.iter().enumerate() {
        if path.vehicle >= spec.vehicles {
            return Err(Error::InvalidInput(format!(
                "path {i} references vehicle {} but there are only {}",
                path.vehicle, spec.vehicles
            )));
        }
        if !path.time.is_positive() {
            return Err(Error::InvalidInput(format!(
                "path {i} has non-positive completion time {}",
                path.time
            )));
        }
        if let Some(&t) = path.targets.iter().find(|&&t| t >= spec.targets.len()) {
            return Err(Error::InvalidInput(format!(
                "path {i} visits unknown target {t}"
            )));
        }
    }
    for (theta, target) in spec.targets.iter().enumerate() {
        let coverage = spec
            .paths
            .iter()
            .filter(|p| p.targets.contains(&theta))
            .count();
        if coverage < target.multiplicity as usize {
            return Err(Error::UncoveredTarget { target: theta });
        }
    }

    let d = n_paths + 1; // x_1..x_paths, then y
    let mut rows: Vec<HalfSpace> = Vec::new();
    let push = |a: Vec<Scalar>, b: Scalar, rows: &mut Vec<HalfSpace>| {
        let id = RowId::Constraint(rows.len());
        rows.push(HalfSpace::new(a, b, id));
    };

    // Coverage: -delta_theta^T x <= -w_theta.
    for (theta, target) in spec.targets.iter().enumerate() {
        let mut a = scalar::zeros(d);
        for (l, path) in spec.paths.iter().enumerate() {
            if path.targets.contains(&theta) {
                a[l] = -Scalar::one();
            }
        }
        push(a, scalar::int(-(target.multiplicity as i64)), &mut rows);
    }
    // One path per vehicle: delta_nu^T x <= 1.
    for nu in 0..spec.vehicles {
        let mut a = scalar::zeros(d);
        for (l, path) in spec.paths.iter().enumerate() {
            if path.vehicle == nu {
                a[l] = Scalar::one();
            }
        }
        if a.iter().all(|x| x.is_zero()) {
            // A vehicle with no candidate paths constrains nothing.
            continue;
        }
        push(a, Scalar::one(), &mut rows);
    }
    // Makespan: tau_l x_l - y <= 0.
    for (l, path) in spec.paths.iter().enumerate() {
        let mut a = scalar::zeros(d);
        a[l] = path.time.clone();
        a[d - 1] = -Scalar::one();
        push(a, Scalar::zero(), &mut rows);
    }
    // Binary box: 0 <= x_l <= 1.
    for l in 0..n_paths {
        let mut a = scalar::zeros(d);
        a[l] = Scalar::one();
        push(a, Scalar::one(), &mut rows);
        let mut a = scalar::zeros(d);
        a[l] = -Scalar::one();
        push(a, Scalar::zero(), &mut rows);
    }

    let max_time = spec
        .paths
        .iter()
        .map(|p| p.time.clone())
        .max()
        .expect("nonempty paths");
    let m = std::cmp::max(scalar::int(2), max_time.ceil() + Scalar::one());

    let mut cost = scalar::zeros(d);
    cost[d - 1] = Scalar::one();
    MilpInstance::new(
        cost,
        rows,
        n_paths,
        1,
        m,
        InstanceMeta {
            seed: None,
            generator: Some("assignment".into()),
        },
    )
}

/// How constraint rows are distributed across agents.
#[derive(Debug, Clone)]
pub enum PartitionPolicy {
    /// Row `i` goes to agent `i mod N`.
    RoundRobin,
    /// Explicit row -> agents mapping; agents may share rows.
    Proximity { row_agents: Vec<Vec<usize>> },
}

/// Split the instance rows into per-agent constraint sets. The union of the
/// parts is always the full row list, so intersecting all parts (each with
/// the bounding box) reproduces the feasible region exactly.
pub fn partition(
    instance: &MilpInstance,
    n_agents: usize,
    policy: &PartitionPolicy,
) -> Result<Vec<ConstraintSet>> {
    let n = instance.n_rows();
    if n_agents == 0 {
        return Err(Error::InvalidInput("need at least one agent".into()));
    }
    let dim = instance.dim();
    let mut parts = vec![ConstraintSet::new(dim); n_agents];
    match policy {
        PartitionPolicy::RoundRobin => {
            if n_agents > n {
                return Err(Error::InvalidInput(format!(
                    "round-robin needs agents <= rows, got {n_agents} agents for {n} rows"
                )));
            }
            for (i, row) in instance.rows.iter().enumerate() {
                parts[i % n_agents].insert(row.clone());
            }
        }
        PartitionPolicy::Proximity { row_agents } => {
            if row_agents.len() != n {
                return Err(Error::InvalidInput(format!(
                    "mapping covers {} rows, instance has {n}",
                    row_agents.len()
                )));
            }
            for (i, agents) in row_agents.iter().enumerate() {
                if agents.is_empty() {
                    return Err(Error::RowUnassigned { row: i });
                }
                for &a in agents {
                    if a >= n_agents {
                        return Err(Error::InvalidInput(format!(
                            "row {i} assigned to agent {a}, but there are only {n_agents}"
                        )));
                    }
                    parts[a].insert(instance.rows[i].clone());
                }
            }
        }
    }
    Ok(parts)
}

/// Set when a loaded file omitted optional fields that were defaulted.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ReadFlags {
    pub defaulted_m: bool,
}

/// Write the line-oriented text format. Deterministic: equal instances
/// produce byte-identical files.
pub fn write_instance(instance: &MilpInstance, path: &Path) -> Result<()> {
    let mut out = String::new();
    let _ = writeln!(out, "distmilp v1");
    let _ = writeln!(out, "d {}", instance.dim());
    let _ = writeln!(out, "dz {}", instance.d_z);
    let _ = writeln!(out, "n {}", instance.n_rows());
    let _ = writeln!(out, "m {}", scalar::token(&instance.m));
    if let Some(seed) = instance.meta.seed {
        let _ = writeln!(out, "seed {seed}");
    }
    if let Some(generator) = &instance.meta.generator {
        let _ = writeln!(out, "generator {generator}");
    }
    let cost_toks: Vec<String> = instance.cost.iter().map(scalar::token).collect();
    let _ = writeln!(out, "c {}", cost_toks.join(" "));
    for row in &instance.rows {
        let mut toks: Vec<String> = row.normal().iter().map(scalar::token).collect();
        toks.push(scalar::token(row.offset()));
        let _ = writeln!(out, "r {}", toks.join(" "));
    }
    std::fs::write(path, out)?;
    Ok(())
}

/// Read the text format back; exact round-trip of [`write_instance`].
pub fn read_instance(path: &Path) -> Result<(MilpInstance, ReadFlags)> {
    let text = std::fs::read_to_string(path)?;
    parse_instance(&text, &path.display().to_string())
}

fn parse_instance(text: &str, path_str: &str) -> Result<(MilpInstance, ReadFlags)> {
    let fail = |line: usize, column: usize, message: String| Error::Parse {
        path: path_str.to_owned(),
        line,
        column,
        message,
    };

    let mut d: Option<usize> = None;
    let mut d_z: Option<usize> = None;
    let mut n: Option<usize> = None;
    let mut m: Option<Scalar> = None;
    let mut meta = InstanceMeta::default();
    let mut cost: Option<Vec<Scalar>> = None;
    let mut rows: Vec<HalfSpace> = Vec::new();
    let mut saw_header = false;

    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if !saw_header {
            if line != "distmilp v1" {
                return Err(fail(lineno, 1, format!("unknown header `{line}`")));
            }
            saw_header = true;
            continue;
        }
        let mut toks = line.split_whitespace();
        let key = toks.next().unwrap();
        let col_of = |tok: &str| raw.find(tok).map(|p| p + 1).unwrap_or(1);
        let parse_usize = |tok: Option<&str>, what: &str| -> Result<usize> {
            let tok = tok.ok_or_else(|| fail(lineno, 1, format!("missing {what}")))?;
            tok.parse()
                .map_err(|_| fail(lineno, col_of(tok), format!("bad {what} `{tok}`")))
        };
        match key {
            "d" => d = Some(parse_usize(toks.next(), "dimension")?),
            "dz" => d_z = Some(parse_usize(toks.next(), "integer dimension")?),
            "n" => n = Some(parse_usize(toks.next(), "row count")?),
            "m" => {
                let tok = toks
                    .next()
                    .ok_or_else(|| fail(lineno, 1, "missing box parameter".into()))?;
                m = Some(
                    scalar::parse_token(tok)
                        .map_err(|e| fail(lineno, col_of(tok), e.to_string()))?,
                );
            }
            "seed" => meta.seed = Some(parse_usize(toks.next(), "seed")? as u64),
            "generator" => {
                meta.generator = toks.next().map(str::to_owned);
            }
            "c" => {
                let mut vals = Vec::new();
                for tok in toks {
                    vals.push(
                        scalar::parse_token(tok)
                            .map_err(|e| fail(lineno, col_of(tok), e.to_string()))?,
                    );
                }
                cost = Some(vals);
            }
            "r" => {
                let mut vals = Vec::new();
                for tok in toks {
                    vals.push(
                        scalar::parse_token(tok)
                            .map_err(|e| fail(lineno, col_of(tok), e.to_string()))?,
                    );
                }
                let dim = d.ok_or_else(|| fail(lineno, 1, "row before dimension header".into()))?;
                if vals.len() != dim + 1 {
                    return Err(fail(
                        lineno,
                        1,
                        format!("row has {} values, expected {}", vals.len(), dim + 1),
                    ));
                }
                let b = vals.pop().unwrap();
                if vals.iter().all(|x| x.is_zero()) {
                    return Err(fail(lineno, 1, "row normal is the zero vector".into()));
                }
                rows.push(HalfSpace::new(vals, b, RowId::Constraint(rows.len())));
            }
            other => return Err(fail(lineno, 1, format!("unknown key `{other}`"))),
        }
    }

    let d = d.ok_or_else(|| fail(1, 1, "missing `d` header".into()))?;
    let d_z = d_z.ok_or_else(|| fail(1, 1, "missing `dz` header".into()))?;
    let n = n.ok_or_else(|| fail(1, 1, "missing `n` header".into()))?;
    if d_z > d {
        return Err(fail(1, 1, format!("dz {d_z} exceeds d {d}")));
    }
    if rows.len() != n {
        return Err(fail(
            1,
            1,
            format!("expected {n} rows, found {}", rows.len()),
        ));
    }
    let cost = cost.ok_or_else(|| fail(1, 1, "missing cost line".into()))?;
    if cost.len() != d {
        return Err(fail(
            1,
            1,
            format!("cost has {} entries, expected {d}", cost.len()),
        ));
    }
    let flags = ReadFlags {
        defaulted_m: m.is_none(),
    };
    let m = m.unwrap_or_else(default_box);
    let instance =
        MilpInstance::new(cost, rows, d_z, d - d_z, m, meta).map_err(|e| fail(1, 1, e.to_string()))?;
    Ok((instance, flags))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, rat};

    #[test]
    fn random_model_is_deterministic_and_origin_feasible() {
        let a = gen_random_milp(7, 10, 3, 16).unwrap();
        let b = gen_random_milp(7, 10, 3, 16).unwrap();
        assert_eq!(a, b);
        let origin = scalar::zeros(10);
        assert!(a.rows.iter().all(|r| r.contains(&origin)));
        assert_eq!(a.m, int(100));
        assert_eq!(a.d_z, 3);
        assert_eq!(a.d_r, 7);

        let c = gen_random_milp(8, 10, 3, 16).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn random_model_rejects_bad_shapes() {
        assert!(gen_random_milp(1, 10, 11, 16).is_err());
        assert!(gen_random_milp(1, 10, 3, 9).is_err());
    }

    #[test]
    fn pure_lp_instance_has_no_integer_block() {
        let a = gen_random_milp(3, 4, 0, 8).unwrap();
        assert_eq!(a.d_z, 0);
        assert_eq!(a.d_r, 4);
    }

    fn example_spec() -> AssignmentSpec {
        AssignmentSpec::from_json(
            r#"{
                "targets": [{"multiplicity": 1}, {"multiplicity": 1}],
                "vehicles": 2,
                "paths": [
                    {"vehicle": 0, "time": 5, "targets": [0]},
                    {"vehicle": 1, "time": 3, "targets": [1]},
                    {"vehicle": 1, "time": 4, "targets": [0, 1]}
                ]
            }"#,
        )
        .unwrap()
    }

    #[test]
    fn assignment_milp_shape() {
        let spec = example_spec();
        let milp = build_assignment_milp(&spec).unwrap();
        assert_eq!(milp.dim(), 4);
        assert_eq!(milp.d_z, 3);
        assert_eq!(milp.d_r, 1);
        // 2 coverage + 2 vehicle + 3 makespan + 6 binary box rows.
        assert_eq!(milp.n_rows(), 13);
        assert_eq!(milp.cost, vec![int(0), int(0), int(0), int(1)]);

        // The known optimum: select path 3 alone, makespan 4.
        let z = [int(0), int(0), int(1), int(4)];
        assert!(milp.is_feasible_point(&z));
        // Selecting nothing violates coverage.
        assert!(!milp.is_feasible_point(&[int(0), int(0), int(0), int(0)]));
    }

    #[test]
    fn assignment_rejects_uncoverable_targets() {
        let spec = AssignmentSpec::from_json(
            r#"{
                "targets": [{"multiplicity": 1}, {"multiplicity": 2}],
                "vehicles": 1,
                "paths": [{"vehicle": 0, "time": 1, "targets": [0, 1]}]
            }"#,
        )
        .unwrap();
        match build_assignment_milp(&spec) {
            Err(Error::UncoveredTarget { target }) => assert_eq!(target, 1),
            other => panic!("expected coverage rejection, got {other:?}"),
        }
    }

    #[test]
    fn assignment_accepts_exact_rational_times() {
        let spec = AssignmentSpec::from_json(
            r#"{
                "targets": [{"multiplicity": 1}],
                "vehicles": 1,
                "paths": [{"vehicle": 0, "time": "7/2", "targets": [0]}]
            }"#,
        )
        .unwrap();
        assert_eq!(spec.paths[0].time, rat(7, 2));
        let milp = build_assignment_milp(&spec).unwrap();
        assert_eq!(milp.m, int(5));
    }

    #[test]
    fn round_robin_partition_spreads_rows_evenly() {
        let inst = gen_random_milp(11, 4, 2, 16).unwrap();
        let parts = partition(&inst, 4, &PartitionPolicy::RoundRobin).unwrap();
        assert_eq!(parts.len(), 4);
        assert!(parts.iter().all(|p| p.len() == 4));
        let total: usize = parts.iter().map(|p| p.len()).sum();
        assert_eq!(total, 16);

        // N = n gives singleton parts.
        let singles = partition(&inst, 16, &PartitionPolicy::RoundRobin).unwrap();
        assert!(singles.iter().all(|p| p.len() == 1));

        assert!(partition(&inst, 17, &PartitionPolicy::RoundRobin).is_err());
    }

    #[test]
    fn proximity_partition_allows_overlap_but_not_orphans() {
        let inst = gen_random_milp(2, 3, 1, 4).unwrap();
        let parts = partition(
            &inst,
            2,
            &PartitionPolicy::Proximity {
                row_agents: vec![vec![0], vec![0, 1], vec![1], vec![1]],
            },
        )
        .unwrap();
        assert_eq!(parts[0].len(), 2);
        assert_eq!(parts[1].len(), 3);

        let orphan = partition(
            &inst,
            2,
            &PartitionPolicy::Proximity {
                row_agents: vec![vec![0], vec![], vec![1], vec![1]],
            },
        );
        assert!(matches!(orphan, Err(Error::RowUnassigned { row: 1 })));
    }

    #[test]
    fn file_round_trip_is_lossless() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("a.milp");
        let inst = gen_random_milp(5, 6, 2, 12).unwrap();
        write_instance(&inst, &path).unwrap();
        let (back, flags) = read_instance(&path).unwrap();
        assert_eq!(back, inst);
        assert!(!flags.defaulted_m);

        // Writing again is byte-identical.
        let bytes1 = std::fs::read(&path).unwrap();
        write_instance(&back, &path).unwrap();
        let bytes2 = std::fs::read(&path).unwrap();
        assert_eq!(bytes1, bytes2);
    }

    #[test]
    fn file_with_dz_exceeding_d_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.milp");
        std::fs::write(&path, "distmilp v1\nd 2\ndz 3\nn 1\nm 10\nc 1 1\nr 1 0 5\n").unwrap();
        let err = read_instance(&path).unwrap_err();
        assert!(err.to_string().contains("dz 3 exceeds d 2"));
    }

    #[test]
    fn missing_box_parameter_defaults_with_flag() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("nom.milp");
        std::fs::write(&path, "distmilp v1\nd 2\ndz 1\nn 1\nc 1 1\nr 1 0 5\n").unwrap();
        let (inst, flags) = read_instance(&path).unwrap();
        assert!(flags.defaulted_m);
        assert_eq!(inst.m, int(100));
    }

    #[test]
    fn parse_error_reports_line_and_column() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("mal.milp");
        std::fs::write(&path, "distmilp v1\nd 2\ndz 1\nn 1\nm 10\nc 1 oops\nr 1 0 5\n").unwrap();
        match read_instance(&path) {
            Err(Error::Parse { line, column, .. }) => {
                assert_eq!(line, 6);
                assert_eq!(column, 5);
            }
            other => panic!("expected parse error, got {other:?}"),
        }
    }
}
