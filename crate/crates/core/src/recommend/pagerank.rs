use crate::error::{Error, Result};
use crate::graph::{BipartiteGraph, NodeId};

const MAX_ITERATIONS: usize = 10_000;

/// Personalized PageRank with restart probability `lambda` to the uniform
/// distribution over `start`:
///
/// `r = lambda * e_S + (1 - lambda) * P^T r`
///
/// Power iteration from `e_S` until the L1 change drops below `tol`.
pub fn personalized_pagerank(g: &BipartiteGraph, start: &[NodeId], lambda: f64, tol: f64) -> Result<Vec<f64>> {
    if start.is_empty() {
        return Err(Error::EmptySeeds);
    }
    if !(lambda > 0.0 && lambda <= 1.0) {
        return Err(Error::invalid("lambda", format!("must be in (0, 1], got {lambda}")));
    }
    if !(tol > 0.0) {
        return Err(Error::invalid("tol", "must be positive"));
    }
    let n = g.num_nodes();
    let mut restart = vec![0.0; n];
    let mut distinct = start.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    for s in &distinct {
        if !g.contains(*s) {
            return Err(Error::UnknownNode(s.index()));
        }
        restart[s.index()] = lambda / distinct.len() as f64;
    }
    let walk = 1.0 - lambda;
    // r[i] / d_i, reused for every neighbor of i
    let mut share = vec![0.0; n];
    let mut r: Vec<f64> = restart.iter().map(|x| x / lambda).collect();
    let mut next = vec![0.0; n];
    for _ in 0..MAX_ITERATIONS {
        for v in 0..n {
            share[v] = r[v] / g.degrees()[v];
        }
        let mut delta = 0.0;
        for v in 0..n {
            let node = NodeId(v as u32);
            let inflow: f64 = g
                .neighbor_ids(node)
                .iter()
                .zip(g.neighbor_weights(node))
                .map(|(t, w)| share[t.index()] * w)
                .sum();
            next[v] = restart[v] + walk * inflow;
            delta += (next[v] - r[v]).abs();
        }
        std::mem::swap(&mut r, &mut next);
        if delta < tol {
            break;
        }
    }
    Ok(r)
}
