//! Reference isomorphism matcher.
//!
//! Independent of the canonical code machinery: a plain backtracking
//! search for a root- and label-preserving bijection. Kept as the oracle
//! that the code-based test is validated against.

use super::{BirootedGraph, VertexId};

/// Searches for a root- and label-preserving isomorphism from `a` to `b`.
/// Returns the vertex map `a -> b` if one exists.
pub fn isomorphic_by_search(a: &BirootedGraph, b: &BirootedGraph) -> Option<Vec<VertexId>> {
    if a.alphabet() != b.alphabet()
        || a.n_vertices() != b.n_vertices()
        || a.n_edges() != b.n_edges()
    {
        return None;
    }
    let n = a.n_vertices();
    let mut map = vec![usize::MAX; n];
    let mut used = vec![false; n];
    map[a.start()] = b.start();
    used[b.start()] = true;
    if a.end() != a.start() {
        if b.end() == b.start() || used[b.end()] {
            return None;
        }
        map[a.end()] = b.end();
        used[b.end()] = true;
    } else if b.end() != b.start() {
        return None;
    }
    // Order the unmapped vertices breadth-first from the start so partial
    // maps stay edge-connected and fail fast.
    let order: Vec<VertexId> = bfs_order(a)
        .into_iter()
        .filter(|&v| map[v] == usize::MAX)
        .collect();
    if extend(a, b, &order, 0, &mut map, &mut used) {
        Some(map)
    } else {
        None
    }
}

fn bfs_order(g: &BirootedGraph) -> Vec<VertexId> {
    let mut seen = vec![false; g.n_vertices()];
    let mut order = Vec::new();
    let mut queue = std::collections::VecDeque::new();
    seen[g.start()] = true;
    queue.push_back(g.start());
    while let Some(v) = queue.pop_front() {
        order.push(v);
        for &(_, _, t) in g.out_edges(v) {
            if !seen[t] {
                seen[t] = true;
                queue.push_back(t);
            }
        }
    }
    order
}

fn extend(
    a: &BirootedGraph,
    b: &BirootedGraph,
    order: &[VertexId],
    i: usize,
    map: &mut Vec<VertexId>,
    used: &mut Vec<bool>,
) -> bool {
    if i == order.len() {
        return consistent(a, b, map);
    }
    let v = order[i];
    for w in 0..b.n_vertices() {
        if used[w] || !compatible(a, b, v, w) {
            continue;
        }
        map[v] = w;
        used[w] = true;
        if partial_ok(a, b, v, map) && extend(a, b, order, i + 1, map, used) {
            return true;
        }
        map[v] = usize::MAX;
        used[w] = false;
    }
    false
}

fn compatible(a: &BirootedGraph, b: &BirootedGraph, v: VertexId, w: VertexId) -> bool {
    let mut va: Vec<_> = a.out_edges(v).map(|&(_, l, _)| l).collect();
    let mut wb: Vec<_> = b.out_edges(w).map(|&(_, l, _)| l).collect();
    va.sort_unstable();
    wb.sort_unstable();
    if va != wb {
        return false;
    }
    let mut ia: Vec<_> = a.in_edges(v).map(|&(_, l, _)| l).collect();
    let mut ib: Vec<_> = b.in_edges(w).map(|&(_, l, _)| l).collect();
    ia.sort_unstable();
    ib.sort_unstable();
    ia == ib
}

/// Checks all edges incident to `v` whose other endpoint is already mapped.
fn partial_ok(a: &BirootedGraph, b: &BirootedGraph, v: VertexId, map: &[VertexId]) -> bool {
    for &(s, l, t) in a.out_edges(v) {
        if map[t] != usize::MAX && !b.has_edge(&(map[s], l, map[t])) {
            return false;
        }
    }
    for &(s, l, t) in a.in_edges(v) {
        if map[s] != usize::MAX && !b.has_edge(&(map[s], l, map[t])) {
            return false;
        }
    }
    true
}

/// Full check: the completed vertex bijection carries every edge of `a`
/// onto an edge of `b`; equal edge counts then force a bijection on edges.
fn consistent(a: &BirootedGraph, b: &BirootedGraph, map: &[VertexId]) -> bool {
    a.edges().all(|&(s, l, t)| b.has_edge(&(map[s], l, map[t])))
}
