//! Hitting time, absorbing time and absorbing cost.
//!
//! Every quantity here is the solution of a first-step system
//!
//! ```text
//! x(i) = 0                                  i in S
//! x(i) = cost(i) + sum_j p_ij * x(j)        otherwise
//! ```
//!
//! where `cost(i)` is 1 for absorbing time, and for absorbing cost is the
//! expected entropy of the next user when leaving an item, or the constant
//! `C` when leaving a user. Two solvers are provided: a dense LU solve (small
//! graphs, used as the reference) and a fixed number of synchronous sweeps
//! starting from zero, which is what the recommenders use.

use std::io::Write;

use nalgebra::{DMatrix, DVector};

use crate::entropy::EntropyTable;
use crate::error::{Error, Result};
use crate::graph::{reachable_from, BipartiteGraph, NodeId};

/// Largest transient-node count handed to the dense solver.
pub const EXACT_SOLVE_LIMIT: usize = 3000;

/// Default number of sweeps for the truncated solver.
pub const DEFAULT_TAU: usize = 15;

#[derive(Clone, Debug, PartialEq)]
pub enum CostModel {
    /// Every step costs 1.
    Unit,
    /// Item -> user steps cost the user's entropy, user -> item steps cost `c`.
    /// `user_entropy` is indexed by user position in the graph the
    /// `AbsorbingSpec` was built for.
    EntropyBiased { user_entropy: Vec<f64>, c: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct AbsorbingSpec {
    absorbing: Vec<NodeId>,
    cost: CostModel,
}

impl AbsorbingSpec {
    pub fn unit(g: &BipartiteGraph, absorbing: impl IntoIterator<Item = NodeId>) -> Result<Self> {
        let absorbing = check_absorbing(g, absorbing)?;
        Ok(AbsorbingSpec { absorbing, cost: CostModel::Unit })
    }

    /// Entropy-biased costs; `table` must cover every user of `g`.
    pub fn entropy_biased(
        g: &BipartiteGraph,
        absorbing: impl IntoIterator<Item = NodeId>,
        table: &EntropyTable,
        c: f64,
    ) -> Result<Self> {
        let absorbing = check_absorbing(g, absorbing)?;
        if !(c.is_finite() && c > 0.0) {
            return Err(Error::invalid("C", format!("must be positive, got {c}")));
        }
        let user_entropy = g
            .user_ids()
            .iter()
            .map(|id| table.get(id).ok_or_else(|| Error::MissingEntropy(id.to_string())))
            .collect::<Result<Vec<f64>>>()?;
        Ok(AbsorbingSpec { absorbing, cost: CostModel::EntropyBiased { user_entropy, c } })
    }

    /// Entropy-biased costs from a vector indexed by user position in `g`.
    pub fn with_user_costs(
        g: &BipartiteGraph,
        absorbing: impl IntoIterator<Item = NodeId>,
        user_entropy: Vec<f64>,
        c: f64,
    ) -> Result<Self> {
        let absorbing = check_absorbing(g, absorbing)?;
        if user_entropy.len() != g.num_users() {
            return Err(Error::invalid("user_entropy", "needs one value per user"));
        }
        if !(c.is_finite() && c > 0.0) {
            return Err(Error::invalid("C", format!("must be positive, got {c}")));
        }
        Ok(AbsorbingSpec { absorbing, cost: CostModel::EntropyBiased { user_entropy, c } })
    }

    pub fn absorbing(&self) -> &[NodeId] {
        &self.absorbing
    }

    pub fn cost_model(&self) -> &CostModel {
        &self.cost
    }

    /// Expected cost of the next step out of each node. Item rows are summed
    /// in neighbor order and divided by the degree so that unit entropies give
    /// exactly 1.0.
    fn step_costs(&self, g: &BipartiteGraph) -> Vec<f64> {
        match &self.cost {
            CostModel::Unit => vec![1.0; g.num_nodes()],
            CostModel::EntropyBiased { user_entropy, c } => (0..g.num_nodes())
                .map(|v| {
                    let node = NodeId(v as u32);
                    if g.is_user(node) {
                        *c
                    } else {
                        let s: f64 = g
                            .neighbors(node)
                            .map(|(u, w)| w * user_entropy[u.index()])
                            .sum();
                        s / g.degree(node)
                    }
                })
                .collect(),
        }
    }
}

fn check_absorbing(g: &BipartiteGraph, absorbing: impl IntoIterator<Item = NodeId>) -> Result<Vec<NodeId>> {
    let mut nodes: Vec<NodeId> = absorbing.into_iter().collect();
    if nodes.is_empty() {
        return Err(Error::EmptyAbsorbingSet);
    }
    if let Some(bad) = nodes.iter().find(|v| !g.contains(**v)) {
        return Err(Error::UnknownNode(bad.index()));
    }
    nodes.sort_unstable();
    nodes.dedup();
    Ok(nodes)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Exact,
    Truncated(usize),
}

/// Per-node expected steps (or cost) until absorption. Nodes with no path to
/// the absorbing set hold `f64::INFINITY`.
#[derive(Clone, Debug, PartialEq)]
pub struct WalkResult {
    pub values: Vec<f64>,
    pub iterations: usize,
    pub method: Method,
}

impl WalkResult {
    pub fn value(&self, node: NodeId) -> f64 {
        self.values[node.index()]
    }

    pub fn is_reachable(&self, node: NodeId) -> bool {
        self.values[node.index()].is_finite()
    }

    /// `node_id,value,reachable` rows in node order.
    pub fn write_csv<W: Write>(&self, g: &BipartiteGraph, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["node_id", "value", "reachable"])?;
        for (v, x) in self.values.iter().enumerate() {
            let label = g.label(NodeId(v as u32));
            if x.is_finite() {
                w.write_record([label, &x.to_string(), "true"])?;
            } else {
                w.write_record([label, "inf", "false"])?;
            }
        }
        w.flush()?;
        Ok(())
    }
}

struct Layout {
    absorbing: Vec<bool>,
    reachable: Vec<bool>,
    costs: Vec<f64>,
}

fn layout(g: &BipartiteGraph, spec: &AbsorbingSpec) -> Layout {
    let mut absorbing = vec![false; g.num_nodes()];
    for s in &spec.absorbing {
        absorbing[s.index()] = true;
    }
    Layout { absorbing, reachable: reachable_from(g, &spec.absorbing), costs: spec.step_costs(g) }
}

/// Hitting time `H(q|j)` from every node to `q`, solved exactly.
pub fn hitting_time(g: &BipartiteGraph, q: NodeId) -> Result<WalkResult> {
    if !g.contains(q) {
        return Err(Error::UnknownNode(q.index()));
    }
    solve_exact(g, &AbsorbingSpec::unit(g, [q])?)
}

/// Hitting time to `q` approximated by `tau` sweeps.
pub fn hitting_time_truncated(g: &BipartiteGraph, q: NodeId, tau: usize) -> Result<WalkResult> {
    if !g.contains(q) {
        return Err(Error::UnknownNode(q.index()));
    }
    iterate(g, &AbsorbingSpec::unit(g, [q])?, tau)
}

pub fn absorbing_time_exact(g: &BipartiteGraph, spec: &AbsorbingSpec) -> Result<WalkResult> {
    require_unit(spec)?;
    solve_exact(g, spec)
}

pub fn absorbing_time_truncated(g: &BipartiteGraph, spec: &AbsorbingSpec, tau: usize) -> Result<WalkResult> {
    require_unit(spec)?;
    iterate(g, spec, tau)
}

/// Entropy-biased absorbing cost by `tau` sweeps.
pub fn absorbing_cost(g: &BipartiteGraph, spec: &AbsorbingSpec, tau: usize) -> Result<WalkResult> {
    require_entropy(spec)?;
    iterate(g, spec, tau)
}

pub fn absorbing_cost_exact(g: &BipartiteGraph, spec: &AbsorbingSpec) -> Result<WalkResult> {
    require_entropy(spec)?;
    solve_exact(g, spec)
}

fn require_unit(spec: &AbsorbingSpec) -> Result<()> {
    match spec.cost {
        CostModel::Unit => Ok(()),
        _ => Err(Error::invalid("cost_model", "absorbing time needs unit costs")),
    }
}

fn require_entropy(spec: &AbsorbingSpec) -> Result<()> {
    match spec.cost {
        CostModel::EntropyBiased { .. } => Ok(()),
        _ => Err(Error::invalid("cost_model", "absorbing cost needs entropy-biased costs")),
    }
}

/// `tau` synchronous sweeps from the all-zero vector.
pub fn iterate(g: &BipartiteGraph, spec: &AbsorbingSpec, tau: usize) -> Result<WalkResult> {
    if tau == 0 {
        return Err(Error::invalid("tau", "must be at least 1"));
    }
    let start = vec![0.0; g.num_nodes()];
    let mut result = relax(g, spec, &start, tau);
    result.method = Method::Truncated(tau);
    Ok(result)
}

/// Applies `steps` sweeps of the first-step recurrence to `start`. Unreachable
/// nodes come out as infinity whatever their starting value.
pub fn relax(g: &BipartiteGraph, spec: &AbsorbingSpec, start: &[f64], steps: usize) -> WalkResult {
    let Layout { absorbing, reachable, costs } = layout(g, spec);
    let n = g.num_nodes();
    let active: Vec<usize> = (0..n).filter(|&v| reachable[v] && !absorbing[v]).collect();
    let mut cur: Vec<f64> = (0..n)
        .map(|v| if reachable[v] && !absorbing[v] { start[v] } else { 0.0 })
        .collect();
    let mut next = cur.clone();
    for _ in 0..steps {
        for &v in &active {
            let node = NodeId(v as u32);
            let s: f64 = g
                .neighbor_ids(node)
                .iter()
                .zip(g.neighbor_weights(node))
                .map(|(t, w)| w * cur[t.index()])
                .sum();
            next[v] = costs[v] + s / g.degree(node);
        }
        std::mem::swap(&mut cur, &mut next);
    }
    for v in 0..n {
        if !reachable[v] {
            cur[v] = f64::INFINITY;
        }
    }
    WalkResult { values: cur, iterations: steps, method: Method::Truncated(steps) }
}

/// Dense LU solve of `(I - P_TT) x = cost_T` over transient nodes `T`.
pub fn solve_exact(g: &BipartiteGraph, spec: &AbsorbingSpec) -> Result<WalkResult> {
    let Layout { absorbing, reachable, costs } = layout(g, spec);
    let n = g.num_nodes();
    let transient: Vec<usize> = (0..n).filter(|&v| reachable[v] && !absorbing[v]).collect();
    let m = transient.len();
    if m > EXACT_SOLVE_LIMIT {
        return Err(Error::SystemTooLarge { size: m, limit: EXACT_SOLVE_LIMIT });
    }
    let mut values: Vec<f64> =
        (0..n).map(|v| if reachable[v] { 0.0 } else { f64::INFINITY }).collect();
    if m > 0 {
        let mut pos = vec![usize::MAX; n];
        for (k, &v) in transient.iter().enumerate() {
            pos[v] = k;
        }
        let mut a = DMatrix::<f64>::identity(m, m);
        let mut b = DVector::<f64>::zeros(m);
        for (row, &v) in transient.iter().enumerate() {
            let node = NodeId(v as u32);
            let d = g.degree(node);
            for (t, w) in g.neighbors(node) {
                let col = pos[t.index()];
                if col != usize::MAX {
                    a[(row, col)] -= w / d;
                }
            }
            b[row] = costs[v];
        }
        let x = a.lu().solve(&b).ok_or(Error::SingularSystem)?;
        for (k, &v) in transient.iter().enumerate() {
            values[v] = x[k];
        }
    }
    Ok(WalkResult { values, iterations: 0, method: Method::Exact })
}
