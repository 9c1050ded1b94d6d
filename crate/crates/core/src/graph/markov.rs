use super::{connected_components, BipartiteGraph, NodeId};
use crate::error::{Error, Result};

/// Single-step probability `p_ij = a(i, j) / d_i` of the random walk.
pub fn transition_prob(g: &BipartiteGraph, i: NodeId, j: NodeId) -> Result<f64> {
    if !g.contains(i) {
        return Err(Error::UnknownNode(i.index()));
    }
    if !g.contains(j) {
        return Err(Error::UnknownNode(j.index()));
    }
    let d = g.degree(i);
    if d <= 0.0 {
        return Err(Error::IsolatedNode(g.label(i).to_string()));
    }
    Ok(g.weight(i, j) / d)
}

/// Stationary distribution `pi_i = d_i / sum_j d_j`. The graph must be
/// connected, otherwise the chain has no unique stationary vector.
pub fn stationary_distribution(g: &BipartiteGraph) -> Result<Vec<f64>> {
    if g.num_nodes() == 0 {
        return Err(Error::EmptyGraph);
    }
    let components = connected_components(g);
    if components.len() > 1 {
        return Err(Error::Disconnected { sizes: components.iter().map(Vec::len).collect() });
    }
    let total = g.total_weight();
    Ok(g.degrees().iter().map(|d| d / total).collect())
}
