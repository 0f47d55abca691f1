//! Retractions and cores of birooted graphs.
//!
//! A retraction is an idempotent label- and root-preserving endomorphism;
//! a graph with no proper retraction is a core. Every graph folds onto a
//! core that is unique up to isomorphism, computed here by repeatedly
//! finding a non-injective root-preserving endomorphism, raising it to an
//! idempotent power, and passing to its image.

use crate::graphs::{BirootedGraph, Label, VertexId};
use std::collections::BTreeSet;

pub const DEFAULT_SEARCH_BUDGET: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RetractError {
    #[error("morphism search budget of {0} nodes exhausted")]
    BudgetExceeded(usize),
}

/// Label-preserving graph morphisms `g -> h` extending the forced pairs,
/// found by backtracking. Vertices are assigned in breadth-first order
/// from the start; a candidate image must carry at least the in- and
/// out-labels of its preimage, and all edges into the assigned region must
/// be preserved. Returns the first morphism in this deterministic order.
fn find_morphism(
    g: &BirootedGraph,
    h: &BirootedGraph,
    forced: &[(VertexId, VertexId)],
    budget: usize,
) -> Result<Option<Vec<VertexId>>, RetractError> {
    let n = g.n_vertices();
    let mut order: Vec<VertexId> = Vec::with_capacity(n);
    let mut seen = vec![false; n];
    let mut queue = std::collections::VecDeque::from([g.start()]);
    seen[g.start()] = true;
    while let Some(v) = queue.pop_front() {
        order.push(v);
        for &(_, _, t) in g.out_edges(v) {
            if !seen[t] {
                seen[t] = true;
                queue.push_back(t);
            }
        }
    }

    let out_labels = |graph: &BirootedGraph, v: VertexId| -> BTreeSet<Label> {
        graph.out_edges(v).map(|&(_, l, _)| l).collect()
    };
    let in_labels = |graph: &BirootedGraph, v: VertexId| -> BTreeSet<Label> {
        graph.in_edges(v).map(|&(_, l, _)| l).collect()
    };
    let g_out: Vec<BTreeSet<Label>> = (0..n).map(|v| out_labels(g, v)).collect();
    let g_in: Vec<BTreeSet<Label>> = (0..n).map(|v| in_labels(g, v)).collect();
    let h_out: Vec<BTreeSet<Label>> = (0..h.n_vertices()).map(|v| out_labels(h, v)).collect();
    let h_in: Vec<BTreeSet<Label>> = (0..h.n_vertices()).map(|v| in_labels(h, v)).collect();

    let mut map = vec![usize::MAX; n];
    for &(x, y) in forced {
        if map[x] != usize::MAX && map[x] != y {
            return Ok(None);
        }
        map[x] = y;
    }

    // Edges incident to a newly assigned vertex with both ends assigned
    // must land on edges of `h`.
    let consistent = |map: &[VertexId], v: VertexId| -> bool {
        for &(_, l, t) in g.out_edges(v) {
            if map[t] != usize::MAX && !h.has_edge(&(map[v], l, map[t])) {
                return false;
            }
        }
        for &(s, l, _) in g.in_edges(v) {
            if map[s] != usize::MAX && !h.has_edge(&(map[s], l, map[v])) {
                return false;
            }
        }
        true
    };

    for &(x, _) in forced {
        if !g_out[x].is_subset(&h_out[map[x]]) || !g_in[x].is_subset(&h_in[map[x]]) {
            return Ok(None);
        }
        if !consistent(&map, x) {
            return Ok(None);
        }
    }

    struct Search<'a> {
        order: &'a [VertexId],
        g_out: &'a [BTreeSet<Label>],
        g_in: &'a [BTreeSet<Label>],
        h_out: &'a [BTreeSet<Label>],
        h_in: &'a [BTreeSet<Label>],
        h_n: usize,
        budget: usize,
        spent: usize,
    }

    fn assign(
        s: &mut Search,
        map: &mut Vec<VertexId>,
        consistent: &dyn Fn(&[VertexId], VertexId) -> bool,
        depth: usize,
    ) -> Result<bool, RetractError> {
        if depth == s.order.len() {
            return Ok(true);
        }
        let v = s.order[depth];
        if map[v] != usize::MAX {
            return assign(s, map, consistent, depth + 1);
        }
        for t in 0..s.h_n {
            if !s.g_out[v].is_subset(&s.h_out[t]) || !s.g_in[v].is_subset(&s.h_in[t]) {
                continue;
            }
            s.spent += 1;
            if s.spent > s.budget {
                return Err(RetractError::BudgetExceeded(s.budget));
            }
            map[v] = t;
            if consistent(map, v) && assign(s, map, consistent, depth + 1)? {
                return Ok(true);
            }
            map[v] = usize::MAX;
        }
        Ok(false)
    }

    let mut search = Search {
        order: &order,
        g_out: &g_out,
        g_in: &g_in,
        h_out: &h_out,
        h_in: &h_in,
        h_n: h.n_vertices(),
        budget,
        spent: 0,
    };
    if assign(&mut search, &mut map, &consistent, 0)? {
        Ok(Some(map))
    } else {
        Ok(None)
    }
}

/// First root-preserving morphism `s -> t`, if any.
pub fn find_birooted_morphism(
    s: &BirootedGraph,
    t: &BirootedGraph,
) -> Result<Option<Vec<VertexId>>, RetractError> {
    find_birooted_morphism_budget(s, t, DEFAULT_SEARCH_BUDGET)
}

pub fn find_birooted_morphism_budget(
    s: &BirootedGraph,
    t: &BirootedGraph,
    budget: usize,
) -> Result<Option<Vec<VertexId>>, RetractError> {
    find_morphism(s, t, &[(s.start(), t.start()), (s.end(), t.end())], budget)
}

/// First non-injective root-preserving endomorphism, scanning seed pairs
/// `x < y` and images `t` in id order and forcing both onto `t`. `None`
/// means the graph is a core.
pub fn find_endomorphism_shrinking(
    g: &BirootedGraph,
) -> Result<Option<Vec<VertexId>>, RetractError> {
    find_endomorphism_shrinking_budget(g, DEFAULT_SEARCH_BUDGET)
}

pub fn find_endomorphism_shrinking_budget(
    g: &BirootedGraph,
    budget: usize,
) -> Result<Option<Vec<VertexId>>, RetractError> {
    let n = g.n_vertices();
    for x in 0..n {
        for y in x + 1..n {
            for t in 0..n {
                let forced = [
                    (g.start(), g.start()),
                    (g.end(), g.end()),
                    (x, t),
                    (y, t),
                ];
                if let Some(map) = find_morphism(g, g, &forced, budget)? {
                    return Ok(Some(map));
                }
            }
        }
    }
    Ok(None)
}

pub fn is_core(g: &BirootedGraph) -> Result<bool, RetractError> {
    Ok(find_endomorphism_shrinking(g)?.is_none())
}

fn compose(f: &[VertexId], g: &[VertexId]) -> Vec<VertexId> {
    f.iter().map(|&v| g[v]).collect()
}

/// Raises an endomorphism to its idempotent power: past every tail, acting
/// as the identity on the eventual image.
fn idempotent_power(phi: &[VertexId]) -> Vec<VertexId> {
    let n = phi.len();
    // phi^n reaches the eventual image (tails are shorter than n).
    let mut stable = (0..n).collect::<Vec<_>>();
    let mut base = phi.to_vec();
    let mut k = n;
    while k > 0 {
        if k & 1 == 1 {
            stable = compose(&stable, &base);
        }
        base = compose(&base, &base);
        k >>= 1;
    }
    // Cycle lengths of the permutation induced on the eventual image.
    let image: BTreeSet<VertexId> = stable.iter().copied().collect();
    let mut lcm: u128 = 1;
    let mut visited = BTreeSet::new();
    for &v in &image {
        if visited.contains(&v) {
            continue;
        }
        let mut len = 0u128;
        let mut w = v;
        loop {
            visited.insert(w);
            len += 1;
            w = phi[w];
            if w == v {
                break;
            }
        }
        lcm = lcm / gcd(lcm, len) * len;
    }
    // Smallest multiple of the cycle order no less than the tail bound.
    let k = lcm * (n as u128).div_ceil(lcm);
    let mut result = (0..n).collect::<Vec<_>>();
    let mut base = phi.to_vec();
    let mut k = k;
    while k > 0 {
        if k & 1 == 1 {
            result = compose(&result, &base);
        }
        base = compose(&base, &base);
        k >>= 1;
    }
    result
}

fn gcd(a: u128, b: u128) -> u128 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// The core of a graph: folds along shrinking endomorphisms until none
/// remain. Unique up to isomorphism.
pub fn core(g: &BirootedGraph) -> Result<BirootedGraph, RetractError> {
    Ok(core_with_map(g)?.0)
}

/// Core together with the fold map (old vertex to core vertex) and a
/// section picking, for every core vertex, its smallest preimage.
pub fn core_with_map(
    g: &BirootedGraph,
) -> Result<(BirootedGraph, Vec<VertexId>, Vec<VertexId>), RetractError> {
    let mut cur = g.clone();
    let mut acc: Vec<VertexId> = (0..g.n_vertices()).collect();
    while let Some(phi) = find_endomorphism_shrinking(&cur)? {
        let psi = idempotent_power(&phi);
        let image: Vec<VertexId> = psi.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
        let mut number = vec![usize::MAX; cur.n_vertices()];
        for (i, &v) in image.iter().enumerate() {
            number[v] = i;
        }
        let edges: Vec<_> = cur
            .edges()
            .map(|&(s, l, t)| (number[psi[s]], l, number[psi[t]]))
            .collect();
        let next = BirootedGraph::new(
            cur.alphabet().to_vec(),
            image.len(),
            edges,
            number[psi[cur.start()]],
            number[psi[cur.end()]],
        )
        .expect("a fold image is a valid graph");
        for slot in acc.iter_mut() {
            *slot = number[psi[*slot]];
        }
        cur = next;
    }
    let mut section = vec![usize::MAX; cur.n_vertices()];
    for v in (0..g.n_vertices()).rev() {
        section[acc[v]] = v;
    }
    Ok((cur, acc, section))
}
