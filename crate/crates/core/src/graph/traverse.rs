use std::collections::VecDeque;

use super::{BipartiteGraph, NodeId};
use crate::error::{Error, Result};

/// Connected components, each sorted ascending, listed in order of their
/// smallest node.
pub fn connected_components(g: &BipartiteGraph) -> Vec<Vec<NodeId>> {
    let n = g.num_nodes();
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    let mut queue = VecDeque::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        queue.push_back(NodeId(start as u32));
        let mut comp = Vec::new();
        while let Some(v) = queue.pop_front() {
            comp.push(v);
            for &t in g.neighbor_ids(v) {
                if !seen[t.index()] {
                    seen[t.index()] = true;
                    queue.push_back(t);
                }
            }
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out
}

/// Subgraph induced by the largest component by node count. Ties go to the
/// component holding the smallest node id.
pub fn largest_connected_component(g: &BipartiteGraph) -> Result<BipartiteGraph> {
    if g.num_nodes() == 0 {
        return Err(Error::EmptyGraph);
    }
    let components = connected_components(g);
    if components.len() == 1 {
        return Ok(g.clone());
    }
    let mut best = &components[0];
    for c in &components[1..] {
        if c.len() > best.len() {
            best = c;
        }
    }
    Ok(g.induced_subgraph(best))
}

/// Marks every node connected to at least one node of `set`.
pub fn reachable_from(g: &BipartiteGraph, set: &[NodeId]) -> Vec<bool> {
    let mut seen = vec![false; g.num_nodes()];
    let mut queue: VecDeque<NodeId> = VecDeque::new();
    for &s in set {
        if !seen[s.index()] {
            seen[s.index()] = true;
            queue.push_back(s);
        }
    }
    while let Some(v) = queue.pop_front() {
        for &t in g.neighbor_ids(v) {
            if !seen[t.index()] {
                seen[t.index()] = true;
                queue.push_back(t);
            }
        }
    }
    seen
}

/// Node set of the breadth-first candidate region around `seed_items`.
///
/// Expansion alternates a user layer and an item layer. Each layer is
/// completed before the size check, and expansion stops after the first item
/// layer that takes the item count above `mu`, or when the component is
/// exhausted. The seed layer itself is always expanded once. Result is sorted.
pub fn bfs_candidate_nodes(g: &BipartiteGraph, seed_items: &[NodeId], mu: usize) -> Result<Vec<NodeId>> {
    if seed_items.is_empty() {
        return Err(Error::EmptySeeds);
    }
    let mut inside = vec![false; g.num_nodes()];
    let mut frontier = Vec::with_capacity(seed_items.len());
    for &s in seed_items {
        if !g.is_item(s) {
            return Err(Error::UnknownItem(format!("node {}", s.index())));
        }
        if !inside[s.index()] {
            inside[s.index()] = true;
            frontier.push(s);
        }
    }
    let mut retained = frontier.clone();
    let mut item_count = frontier.len();

    loop {
        let mut users = Vec::new();
        for &i in &frontier {
            for &u in g.neighbor_ids(i) {
                if !inside[u.index()] {
                    inside[u.index()] = true;
                    users.push(u);
                }
            }
        }
        retained.extend_from_slice(&users);
        let mut items = Vec::new();
        for &u in &users {
            for &i in g.neighbor_ids(u) {
                if !inside[i.index()] {
                    inside[i.index()] = true;
                    items.push(i);
                }
            }
        }
        retained.extend_from_slice(&items);
        item_count += items.len();
        if items.is_empty() || item_count > mu {
            break;
        }
        frontier = items;
    }
    retained.sort_unstable();
    Ok(retained)
}

/// Induced subgraph over [`bfs_candidate_nodes`].
pub fn bfs_candidate_subgraph(g: &BipartiteGraph, seed_items: &[NodeId], mu: usize) -> Result<BipartiteGraph> {
    let nodes = bfs_candidate_nodes(g, seed_items, mu)?;
    Ok(g.induced_subgraph(&nodes))
}
