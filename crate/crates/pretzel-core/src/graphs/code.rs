//! Canonical codes for birooted labeled graphs.
//!
//! The code of a graph is the lexicographically minimal serialization over
//! all root-anchored traversals. Vertices are numbered in discovery order
//! starting from the start vertex; processing vertices in numbering order,
//! the out-edges of each vertex are emitted grouped by label. Within a
//! group, already-numbered targets come first in ascending number order;
//! unnumbered targets follow, and the search backtracks over their order.
//! Two graphs over the same alphabet are isomorphic by a root- and
//! label-preserving isomorphism exactly when their codes are equal.
//!
//! Unnumbered targets are distinguished in the emitted stream by an
//! iteratively refined color (start and end status seed the refinement,
//! then in- and out-neighborhoods propagate). Colors are stable under
//! isomorphism, so they both prune the search and sharpen the code.

use super::{BirootedGraph, GraphError, Label, VertexId};
use std::collections::BTreeMap;

/// A canonical code. Equality of codes is isomorphism of graphs.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonicalCode(pub Vec<u32>);

impl CanonicalCode {
    /// Compact single-token rendering, used by table exports.
    pub fn render(&self) -> String {
        self.0
            .iter()
            .map(|t| t.to_string())
            .collect::<Vec<_>>()
            .join(".")
    }

    pub fn parse(s: &str) -> Option<Self> {
        let mut out = Vec::new();
        for part in s.split('.') {
            out.push(part.parse().ok()?);
        }
        Some(CanonicalCode(out))
    }
}

const TAG_OLD: u32 = 0;
const TAG_NEW: u32 = 1;

/// Computes the canonical code and the new-to-old vertex order realizing it.
pub fn canonical(
    g: &BirootedGraph,
    budget: usize,
) -> Result<(CanonicalCode, Vec<VertexId>), GraphError> {
    debug_assert!(g.validate().is_ok());
    let colors = refine_colors(g);
    let mut header = Vec::new();
    header.push(g.n_vertices() as u32);
    header.push(g.n_edges() as u32);
    header.push(g.alphabet().len() as u32);
    for l in g.alphabet() {
        header.push(l.0 as u32);
    }
    header.push(if g.end() == g.start() { 1 } else { 0 });

    let mut search = Search {
        g,
        colors,
        best: None,
        best_order: Vec::new(),
        nodes: 0,
        budget,
    };
    let n = g.n_vertices();
    let mut state = State {
        number: vec![usize::MAX; n],
        order: Vec::with_capacity(n),
        code: header,
    };
    state.assign(g.start());
    search.extend(&mut state, 0)?;
    let best = search.best.expect("canonical search always yields a code");
    Ok((CanonicalCode(best), search.best_order))
}

struct Search<'a> {
    g: &'a BirootedGraph,
    colors: Vec<u32>,
    best: Option<Vec<u32>>,
    best_order: Vec<VertexId>,
    nodes: usize,
    budget: usize,
}

struct State {
    number: Vec<usize>,
    order: Vec<VertexId>,
    code: Vec<u32>,
}

impl State {
    fn assign(&mut self, v: VertexId) {
        self.number[v] = self.order.len();
        self.order.push(v);
    }

    fn unassign(&mut self, v: VertexId) {
        self.number[v] = usize::MAX;
        self.order.pop();
    }
}

impl Search<'_> {
    /// Processes the vertex at position `pos` of the numbering (all earlier
    /// vertices already emitted) and recurses.
    fn extend(&mut self, state: &mut State, pos: usize) -> Result<(), GraphError> {
        if self.prefix_beaten(state) {
            return Ok(());
        }
        if pos == state.order.len() {
            // Every assigned vertex is processed; since the graph is
            // reachable from the start this means all vertices are done.
            debug_assert_eq!(pos, self.g.n_vertices());
            let better = match &self.best {
                None => true,
                Some(b) => state.code < *b,
            };
            if better {
                self.best = Some(state.code.clone());
                self.best_order = state.order.clone();
            }
            return Ok(());
        }
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(GraphError::SizeLimitExceeded(self.budget));
        }
        let v = state.order[pos];
        let mut groups: BTreeMap<Label, Vec<VertexId>> = BTreeMap::new();
        for &(_, l, t) in self.g.out_edges(v) {
            groups.entry(l).or_default().push(t);
        }
        let groups: Vec<(u32, Vec<VertexId>)> = groups
            .into_iter()
            .map(|(l, ts)| (self.label_index(l), ts))
            .collect();
        self.emit_groups(state, pos, &groups, 0)
    }

    /// Emits out-edge groups of the vertex at `pos`, starting from group
    /// index `gi`, then moves on to the next vertex.
    fn emit_groups(
        &mut self,
        state: &mut State,
        pos: usize,
        groups: &[(u32, Vec<VertexId>)],
        gi: usize,
    ) -> Result<(), GraphError> {
        if gi == groups.len() {
            return self.extend(state, pos + 1);
        }
        let (label_idx, targets) = &groups[gi];
        let mut old: Vec<VertexId> = targets
            .iter()
            .copied()
            .filter(|&t| state.number[t] != usize::MAX)
            .collect();
        old.sort_by_key(|&t| state.number[t]);
        let new: Vec<VertexId> = targets
            .iter()
            .copied()
            .filter(|&t| state.number[t] == usize::MAX)
            .collect();
        let mark = state.code.len();
        state.code.push(*label_idx);
        state.code.push(targets.len() as u32);
        for &t in &old {
            state.code.push(TAG_OLD);
            state.code.push(state.number[t] as u32);
        }
        let r = self.emit_new_targets(state, pos, groups, gi, &new);
        state.code.truncate(mark);
        r
    }

    /// Backtracks over orderings of the unnumbered targets of one group.
    /// Already-numbered targets were emitted by the caller. Targets whose
    /// transposition is an automorphism (twins) are tried only once.
    fn emit_new_targets(
        &mut self,
        state: &mut State,
        pos: usize,
        groups: &[(u32, Vec<VertexId>)],
        gi: usize,
        remaining: &[VertexId],
    ) -> Result<(), GraphError> {
        if self.prefix_beaten(state) {
            return Ok(());
        }
        if remaining.is_empty() {
            return self.emit_groups(state, pos, groups, gi + 1);
        }
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(GraphError::SizeLimitExceeded(self.budget));
        }
        // A target may appear again once numbered (parallel same-label
        // edges cannot exist, but a target equal to an earlier choice's
        // number is impossible within one group); order candidates by
        // color so equal-color choices are the only true branches.
        let mut candidates: Vec<VertexId> = remaining.to_vec();
        candidates.sort_by_key(|&t| (self.colors[t], t));
        let mut tried: Vec<VertexId> = Vec::new();
        for (i, &t) in candidates.iter().enumerate() {
            if i > 0 && self.colors[candidates[i - 1]] < self.colors[t] && !tried.is_empty() {
                // A lexicographically larger color can never improve on a
                // completed smaller-color branch at the same position:
                // the emitted color token decides immediately.
                break;
            }
            if tried.iter().any(|&u| self.twins(u, t)) {
                continue;
            }
            tried.push(t);
            let mark = state.code.len();
            state.code.push(TAG_NEW);
            state.code.push(if t == self.g.end() { 1 } else { 0 });
            state.code.push(self.colors[t]);
            state.assign(t);
            let rest: Vec<VertexId> = remaining.iter().copied().filter(|&u| u != t).collect();
            let r = self.emit_new_targets(state, pos, groups, gi, &rest);
            state.unassign(t);
            state.code.truncate(mark);
            r?;
        }
        Ok(())
    }

    /// True when the current code is already lexicographically worse than
    /// the best complete code found so far.
    fn prefix_beaten(&self, state: &State) -> bool {
        match &self.best {
            None => false,
            Some(best) => {
                let k = state.code.len().min(best.len());
                match state.code[..k].cmp(&best[..k]) {
                    std::cmp::Ordering::Less => false,
                    std::cmp::Ordering::Equal => false,
                    std::cmp::Ordering::Greater => true,
                }
            }
        }
    }

    fn label_index(&self, l: Label) -> u32 {
        self.g
            .alphabet()
            .iter()
            .position(|&a| a == l)
            .expect("validated graph has alphabet labels only") as u32
    }

    /// True when swapping `a` and `b` (both currently unnumbered) is an
    /// automorphism of the graph fixing everything else.
    fn twins(&self, a: VertexId, b: VertexId) -> bool {
        if self.is_root(a) || self.is_root(b) {
            return false;
        }
        let swap = |v: VertexId| {
            if v == a {
                b
            } else if v == b {
                a
            } else {
                v
            }
        };
        self.g
            .edges()
            .all(|&(s, l, t)| self.g.has_edge(&(swap(s), l, swap(t))))
    }

    fn is_root(&self, v: VertexId) -> bool {
        v == self.g.start() || v == self.g.end()
    }
}

/// Iterative color refinement seeded by root status. Colors are rank
/// normalized each round, so isomorphic graphs refine to identical colors.
fn refine_colors(g: &BirootedGraph) -> Vec<u32> {
    let n = g.n_vertices();
    let mut colors: Vec<u32> = (0..n)
        .map(|v| {
            let mut c = 0;
            if v == g.start() {
                c |= 1;
            }
            if v == g.end() {
                c |= 2;
            }
            c
        })
        .collect();
    for _ in 0..n {
        // Signature: own color plus sorted colored in/out neighborhoods.
        let mut sigs: Vec<(u32, Vec<(u32, u32, u32)>)> = (0..n)
            .map(|v| (colors[v], Vec::new()))
            .collect();
        for &(s, l, t) in g.edges() {
            let li = g.alphabet().iter().position(|&a| a == l).unwrap() as u32;
            sigs[s].1.push((0, li, colors[t]));
            sigs[t].1.push((1, li, colors[s]));
        }
        for (_, nb) in &mut sigs {
            nb.sort_unstable();
        }
        let mut sorted: Vec<&(u32, Vec<(u32, u32, u32)>)> = sigs.iter().collect();
        sorted.sort();
        sorted.dedup();
        let rank: BTreeMap<&(u32, Vec<(u32, u32, u32)>), u32> = sorted
            .into_iter()
            .enumerate()
            .map(|(i, s)| (s, i as u32))
            .collect();
        let next: Vec<u32> = (0..n).map(|v| rank[&sigs[v]]).collect();
        if next == colors {
            break;
        }
        colors = next;
    }
    colors
}
