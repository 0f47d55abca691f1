//! Birooted edge-labeled graphs.
//!
//! A [`BirootedGraph`] is a finite directed graph with edges labeled from a
//! fixed alphabet, a distinguished start vertex and a distinguished end
//! vertex. Every vertex must be reachable from the start. Parallel edges
//! with equal label collapse eagerly because edges form a set; collapsing a
//! duplicate edge is a root-fixing retraction, so no information that
//! matters to the algebra is lost.

mod code;
mod format;
mod iso;

pub use code::CanonicalCode;
pub use format::{export_dot, parse_graph, write_graph};
pub use iso::isomorphic_by_search;

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

/// Vertex identifier. Vertices of a graph are always `0..n` contiguous.
pub type VertexId = usize;

/// An edge label: one symbol from the graph's alphabet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Label(pub char);

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A directed labeled edge `(src, label, dst)`.
pub type Edge = (VertexId, Label, VertexId);

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GraphError {
    #[error("vertex {0} is not reachable from the start vertex")]
    UnreachableVertex(VertexId),
    #[error("root vertex {0} does not exist")]
    DanglingRoot(VertexId),
    #[error("edge ({0}, {1}, {2}) mentions a vertex that does not exist")]
    DanglingEdge(VertexId, Label, VertexId),
    #[error("label {0} is not in the alphabet")]
    UnknownLabel(Label),
    #[error("alphabets differ: [{0}] vs [{1}]")]
    AlphabetMismatch(String, String),
    #[error("canonical code search exceeded its budget of {0} nodes")]
    SizeLimitExceeded(usize),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// Default budget (in backtracking nodes) for the canonical code search.
pub const DEFAULT_CODE_BUDGET: usize = 10_000;

/// A finite birooted graph with edge labels drawn from a fixed alphabet.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BirootedGraph {
    alphabet: Vec<Label>,
    n_vertices: usize,
    edges: BTreeSet<Edge>,
    start: VertexId,
    end: VertexId,
}

impl BirootedGraph {
    /// Builds and validates a graph.
    pub fn new(
        alphabet: Vec<Label>,
        n_vertices: usize,
        edges: impl IntoIterator<Item = Edge>,
        start: VertexId,
        end: VertexId,
    ) -> Result<Self, GraphError> {
        let g = BirootedGraph {
            alphabet,
            n_vertices,
            edges: edges.into_iter().collect(),
            start,
            end,
        };
        g.validate()?;
        Ok(g)
    }

    /// The trivial graph: one vertex, both roots on it, no edges.
    pub fn single_vertex(alphabet: Vec<Label>) -> Self {
        BirootedGraph {
            alphabet,
            n_vertices: 1,
            edges: BTreeSet::new(),
            start: 0,
            end: 0,
        }
    }

    /// A single edge `0 -label-> 1` with start 0 and end 1.
    pub fn generator(alphabet: Vec<Label>, label: Label) -> Result<Self, GraphError> {
        let mut edges = BTreeSet::new();
        edges.insert((0, label, 1));
        let g = BirootedGraph {
            alphabet,
            n_vertices: 2,
            edges,
            start: 0,
            end: 1,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn alphabet(&self) -> &[Label] {
        &self.alphabet
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> impl Iterator<Item = &Edge> {
        self.edges.iter()
    }

    pub fn has_edge(&self, e: &Edge) -> bool {
        self.edges.contains(e)
    }

    pub fn start(&self) -> VertexId {
        self.start
    }

    pub fn end(&self) -> VertexId {
        self.end
    }

    /// Out-edges of `v` in sorted `(label, target)` order.
    pub fn out_edges(&self, v: VertexId) -> impl Iterator<Item = &Edge> {
        self.edges
            .range((v, Label('\0'), 0)..(v + 1, Label('\0'), 0))
    }

    /// In-edges of `v` (linear scan; graphs here are small).
    pub fn in_edges(&self, v: VertexId) -> impl Iterator<Item = &Edge> + '_ {
        self.edges.iter().filter(move |(_, _, t)| *t == v)
    }

    /// Checks the representation invariants: roots exist, edges reference
    /// existing vertices and alphabet labels, and every vertex is reachable
    /// from the start.
    pub fn validate(&self) -> Result<(), GraphError> {
        if self.n_vertices == 0 || self.start >= self.n_vertices {
            return Err(GraphError::DanglingRoot(self.start));
        }
        if self.end >= self.n_vertices {
            return Err(GraphError::DanglingRoot(self.end));
        }
        for &(s, l, t) in &self.edges {
            if s >= self.n_vertices || t >= self.n_vertices {
                return Err(GraphError::DanglingEdge(s, l, t));
            }
            if !self.alphabet.contains(&l) {
                return Err(GraphError::UnknownLabel(l));
            }
        }
        let seen = self.reachable_from(self.start);
        for v in 0..self.n_vertices {
            if !seen[v] {
                return Err(GraphError::UnreachableVertex(v));
            }
        }
        Ok(())
    }

    /// Vertices reachable from `from` by directed paths.
    pub fn reachable_from(&self, from: VertexId) -> Vec<bool> {
        let mut seen = vec![false; self.n_vertices];
        let mut queue = VecDeque::new();
        seen[from] = true;
        queue.push_back(from);
        while let Some(v) = queue.pop_front() {
            for &(_, _, t) in self.out_edges(v) {
                if !seen[t] {
                    seen[t] = true;
                    queue.push_back(t);
                }
            }
        }
        seen
    }

    fn check_same_alphabet(&self, other: &Self) -> Result<(), GraphError> {
        if self.alphabet != other.alphabet {
            let show = |a: &[Label]| {
                a.iter()
                    .map(|l| l.0.to_string())
                    .collect::<Vec<_>>()
                    .join(" ")
            };
            return Err(GraphError::AlphabetMismatch(
                show(&self.alphabet),
                show(&other.alphabet),
            ));
        }
        Ok(())
    }

    /// Glues `other` onto `self` by fusing the end of `self` with the start
    /// of `other`. Start of the result is the start of `self`, end is the
    /// end of `other`.
    pub fn glue(&self, other: &Self) -> Result<Self, GraphError> {
        self.check_same_alphabet(other)?;
        let map_other = |v: VertexId| -> VertexId {
            if v == other.start {
                self.end
            } else if v < other.start {
                self.n_vertices + v
            } else {
                self.n_vertices + v - 1
            }
        };
        let mut edges = self.edges.clone();
        for &(s, l, t) in &other.edges {
            edges.insert((map_other(s), l, map_other(t)));
        }
        Ok(BirootedGraph {
            alphabet: self.alphabet.clone(),
            n_vertices: self.n_vertices + other.n_vertices - 1,
            edges,
            start: self.start,
            end: map_other(other.end),
        })
    }

    /// Moves the end root onto the start vertex. Idempotent.
    pub fn reroot_plus(&self) -> Self {
        let mut g = self.clone();
        g.end = g.start;
        g
    }

    /// Quotients the graph by the equivalence generated by `pairs` and
    /// renumbers vertices contiguously. Returns the quotient together with
    /// the old-to-new vertex map. Parallel equal-label edges collapse.
    ///
    /// Panics when a pair names a vertex that does not exist.
    pub fn merge_vertices(&self, pairs: &[(VertexId, VertexId)]) -> (Self, Vec<VertexId>) {
        let mut uf = UnionFind::new(self.n_vertices);
        for &(a, b) in pairs {
            assert!(
                a < self.n_vertices && b < self.n_vertices,
                "merge pair ({a}, {b}) names a vertex outside 0..{}",
                self.n_vertices
            );
            uf.union(a, b);
        }
        // New ids ordered by the smallest member of each class.
        let mut reps: Vec<VertexId> = (0..self.n_vertices)
            .filter(|&v| uf.find(v) == v)
            .collect();
        // `find` returns the class root, which union-by-size does not keep
        // minimal, so order classes by their minimal member instead.
        let mut min_member = vec![VertexId::MAX; self.n_vertices];
        for v in 0..self.n_vertices {
            let r = uf.find(v);
            min_member[r] = min_member[r].min(v);
        }
        reps.sort_by_key(|&r| min_member[r]);
        let mut new_id = vec![0; self.n_vertices];
        for (i, &r) in reps.iter().enumerate() {
            new_id[r] = i;
        }
        let map: Vec<VertexId> = (0..self.n_vertices).map(|v| new_id[uf.find(v)]).collect();
        let edges: BTreeSet<Edge> = self
            .edges
            .iter()
            .map(|&(s, l, t)| (map[s], l, map[t]))
            .collect();
        let g = BirootedGraph {
            alphabet: self.alphabet.clone(),
            n_vertices: reps.len(),
            edges,
            start: map[self.start],
            end: map[self.end],
        };
        (g, map)
    }

    /// Strongly connected components, reported as sorted vertex lists and
    /// ordered by their smallest vertex.
    pub fn strongly_connected_components(&self) -> Vec<Vec<VertexId>> {
        let mut tarjan = Tarjan {
            g: self,
            index: vec![usize::MAX; self.n_vertices],
            low: vec![0; self.n_vertices],
            on_stack: vec![false; self.n_vertices],
            stack: Vec::new(),
            next: 0,
            comps: Vec::new(),
        };
        for v in 0..self.n_vertices {
            if tarjan.index[v] == usize::MAX {
                tarjan.visit(v);
            }
        }
        let mut comps = tarjan.comps;
        for c in &mut comps {
            c.sort_unstable();
        }
        comps.sort_by_key(|c| c[0]);
        comps
    }

    /// Condensation: one vertex per strongly connected component, an edge
    /// `c -x-> d` for every original edge `u -x-> v` with `u`, `v` in
    /// distinct components `c`, `d`. Roots map to their components.
    /// Also returns the vertex-to-component map.
    pub fn condensation(&self) -> (Self, Vec<VertexId>) {
        let comps = self.strongly_connected_components();
        let mut comp_of = vec![0; self.n_vertices];
        for (i, c) in comps.iter().enumerate() {
            for &v in c {
                comp_of[v] = i;
            }
        }
        let edges: BTreeSet<Edge> = self
            .edges
            .iter()
            .filter(|&&(s, _, t)| comp_of[s] != comp_of[t])
            .map(|&(s, l, t)| (comp_of[s], l, comp_of[t]))
            .collect();
        let g = BirootedGraph {
            alphabet: self.alphabet.clone(),
            n_vertices: comps.len(),
            edges,
            start: comp_of[self.start],
            end: comp_of[self.end],
        };
        (g, comp_of)
    }

    /// Canonical code with the default search budget.
    pub fn canonical_code(&self) -> Result<CanonicalCode, GraphError> {
        self.canonical_code_budget(DEFAULT_CODE_BUDGET)
    }

    pub fn canonical_code_budget(&self, budget: usize) -> Result<CanonicalCode, GraphError> {
        code::canonical(self, budget).map(|(c, _)| c)
    }

    /// Canonical form: an isomorphic copy whose vertex numbering is derived
    /// from the canonical code, so isomorphic graphs yield identical
    /// (`==`) canonical forms. Also returns the code and the new-to-old
    /// vertex order.
    pub fn canonical_form(&self) -> Result<(Self, CanonicalCode, Vec<VertexId>), GraphError> {
        self.canonical_form_budget(DEFAULT_CODE_BUDGET)
    }

    pub fn canonical_form_budget(
        &self,
        budget: usize,
    ) -> Result<(Self, CanonicalCode, Vec<VertexId>), GraphError> {
        let (code, order) = code::canonical(self, budget)?;
        let mut old_to_new = vec![0; self.n_vertices];
        for (new, &old) in order.iter().enumerate() {
            old_to_new[old] = new;
        }
        let edges: BTreeSet<Edge> = self
            .edges
            .iter()
            .map(|&(s, l, t)| (old_to_new[s], l, old_to_new[t]))
            .collect();
        let g = BirootedGraph {
            alphabet: self.alphabet.clone(),
            n_vertices: self.n_vertices,
            edges,
            start: old_to_new[self.start],
            end: old_to_new[self.end],
        };
        Ok((g, code, order))
    }
}

/// Root- and label-preserving isomorphism test via canonical codes.
pub fn isomorphic(a: &BirootedGraph, b: &BirootedGraph) -> Result<bool, GraphError> {
    isomorphic_budget(a, b, DEFAULT_CODE_BUDGET)
}

pub fn isomorphic_budget(
    a: &BirootedGraph,
    b: &BirootedGraph,
    budget: usize,
) -> Result<bool, GraphError> {
    if a.alphabet != b.alphabet {
        return Ok(false);
    }
    if a.n_vertices != b.n_vertices || a.edges.len() != b.edges.len() {
        return Ok(false);
    }
    Ok(a.canonical_code_budget(budget)? == b.canonical_code_budget(budget)?)
}

/// Plain union-find with path compression and union by size.
#[derive(Debug, Clone)]
pub struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    pub fn find(&mut self, x: usize) -> usize {
        let mut root = x;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        let mut cur = x;
        while self.parent[cur] != root {
            let next = self.parent[cur];
            self.parent[cur] = root;
            cur = next;
        }
        root
    }

    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (big, small) = if self.size[ra] >= self.size[rb] {
            (ra, rb)
        } else {
            (rb, ra)
        };
        self.parent[small] = big;
        self.size[big] += self.size[small];
        true
    }
}

struct Tarjan<'a> {
    g: &'a BirootedGraph,
    index: Vec<usize>,
    low: Vec<usize>,
    on_stack: Vec<bool>,
    stack: Vec<VertexId>,
    next: usize,
    comps: Vec<Vec<VertexId>>,
}

impl Tarjan<'_> {
    fn visit(&mut self, root: VertexId) {
        // Iterative Tarjan: (vertex, out-edge targets, next target index).
        let mut work: Vec<(VertexId, Vec<VertexId>, usize)> = Vec::new();
        let targets: Vec<VertexId> = self.g.out_edges(root).map(|&(_, _, t)| t).collect();
        self.open(root);
        work.push((root, targets, 0));
        while let Some((v, targets, i)) = work.last_mut() {
            if let Some(&t) = targets.get(*i) {
                *i += 1;
                if self.index[t] == usize::MAX {
                    let tt: Vec<VertexId> = self.g.out_edges(t).map(|&(_, _, w)| w).collect();
                    self.open(t);
                    work.push((t, tt, 0));
                } else if self.on_stack[t] {
                    let v = *v;
                    self.low[v] = self.low[v].min(self.index[t]);
                }
            } else {
                let v = *v;
                work.pop();
                if self.low[v] == self.index[v] {
                    let mut comp = Vec::new();
                    loop {
                        let w = self.stack.pop().expect("tarjan stack underflow");
                        self.on_stack[w] = false;
                        comp.push(w);
                        if w == v {
                            break;
                        }
                    }
                    self.comps.push(comp);
                }
                if let Some((p, _, _)) = work.last() {
                    let p = *p;
                    self.low[p] = self.low[p].min(self.low[v]);
                }
            }
        }
    }

    fn open(&mut self, v: VertexId) {
        self.index[v] = self.next;
        self.low[v] = self.next;
        self.next += 1;
        self.on_stack[v] = true;
        self.stack.push(v);
    }
}
