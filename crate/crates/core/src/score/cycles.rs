//! Cycle membership cues from a fundamental cycle basis.
//!
//! A BFS spanning forest is built per component; every non-tree edge closes
//! exactly one fundamental cycle through the tree path between its endpoints.
//! Cycles are ordered by length, then lexicographically by their sorted member
//! lists, and only the first `max_cycles` mark their members.

use crate::graph::HybridGraph;

/// Sorted member lists of the fundamental cycles, in the canonical order
/// (ascending length, then lexicographic members).
pub fn fundamental_cycles(graph: &HybridGraph) -> Vec<Vec<usize>> {
    let n = graph.node_count();
    let mut parent: Vec<usize> = (0..n).collect();
    let mut depth = vec![0usize; n];
    let mut visited = vec![false; n];
    let mut tree_edge = vec![false; graph.edges().len()];

    for root in 0..n {
        if visited[root] {
            continue;
        }
        visited[root] = true;
        let mut queue = std::collections::VecDeque::new();
        queue.push_back(root);
        while let Some(v) = queue.pop_front() {
            for &(w, edge) in graph.neighbors(v) {
                if !visited[w] {
                    visited[w] = true;
                    parent[w] = v;
                    depth[w] = depth[v] + 1;
                    tree_edge[edge] = true;
                    queue.push_back(w);
                }
            }
        }
    }

    let mut cycles: Vec<Vec<usize>> = Vec::new();
    for (idx, e) in graph.edges().iter().enumerate() {
        if tree_edge[idx] {
            continue;
        }
        cycles.push(cycle_members(&parent, &depth, e.i, e.j));
    }
    cycles.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    cycles
}

/// Nodes on the tree path between `i` and `j` plus both endpoints, sorted.
fn cycle_members(parent: &[usize], depth: &[usize], i: usize, j: usize) -> Vec<usize> {
    let mut a = i;
    let mut b = j;
    let mut members = Vec::new();
    while depth[a] > depth[b] {
        members.push(a);
        a = parent[a];
    }
    while depth[b] > depth[a] {
        members.push(b);
        b = parent[b];
    }
    while a != b {
        members.push(a);
        members.push(b);
        a = parent[a];
        b = parent[b];
    }
    members.push(a);
    members.sort_unstable();
    members
}

/// Binary cycle-membership flags. At most `max_cycles` cycles, taken in the
/// canonical order, contribute members.
pub fn cycle_flags(graph: &HybridGraph, max_cycles: usize) -> Vec<bool> {
    let mut flags = vec![false; graph.node_count()];
    for cycle in fundamental_cycles(graph).into_iter().take(max_cycles) {
        for node in cycle {
            flags[node] = true;
        }
    }
    flags
}
