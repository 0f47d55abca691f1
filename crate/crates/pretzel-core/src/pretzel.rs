//! The monoid of pretzels over an identity-word oracle.
//!
//! A pretzel is a birooted graph in which every path whose label evaluates
//! to the identity is a cycle (idempath identified) and which admits no
//! shrinking endomorphism (retracted). Pretzels form a left adequate
//! monoid: multiplication glues one graph's start onto the other's end and
//! re-normalizes, the unary `+` moves the end back to the start and
//! re-normalizes. Equality of normal forms decides the word problem for
//! the presented monoid in which every word evaluating to the identity is
//! declared idempotent.
//!
//! The module also provides the Cayley-embedding check (every "chunk" of a
//! pretzel below a vertex embeds into the Cayley graph of the finite
//! monoid) and the tree of almost simple paths with its double labeling,
//! used to relate a pretzel back to the trees that produced it.

use crate::cancellative::{FiniteMonoid, IdentityWordOracle};
use crate::graphs::{
    parse_graph, write_graph, BirootedGraph, CanonicalCode, Edge, GraphError, Label, VertexId,
};
use crate::idempath::{c_values, tilde, IdempathError, MergeTrace};
use crate::retractcore::{core, RetractError};
use crate::terms::{term_to_tree, Term, XTree};
use std::collections::{BTreeSet, HashMap};
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PretzelError {
    #[error("operands belong to different oracles (tags {0:#018x} vs {1:#018x})")]
    OracleMismatch(u64, u64),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Retract(#[from] RetractError),
}

/// A normal form: canonical graph, its code, and the oracle it was
/// normalized against. Two pretzels are equal exactly when their codes and
/// oracle tags agree.
#[derive(Debug, Clone)]
pub struct Pretzel {
    graph: BirootedGraph,
    code: CanonicalCode,
    oracle: IdentityWordOracle,
}

impl PartialEq for Pretzel {
    fn eq(&self, other: &Self) -> bool {
        self.oracle.fingerprint() == other.oracle.fingerprint() && self.code == other.code
    }
}

impl Eq for Pretzel {}

impl Pretzel {
    pub fn graph(&self) -> &BirootedGraph {
        &self.graph
    }

    pub fn code(&self) -> &CanonicalCode {
        &self.code
    }

    pub fn oracle(&self) -> &IdentityWordOracle {
        &self.oracle
    }

    pub fn oracle_tag(&self) -> u64 {
        self.oracle.fingerprint()
    }

    /// Edges in canonical order; position + 1 is the edge's index label
    /// used by [`asp_tree`].
    pub fn indexed_edges(&self) -> Vec<Edge> {
        self.graph.edges().copied().collect()
    }
}

/// Identifies idempaths, retracts, and puts the result in canonical form.
fn normal_form(
    g: &BirootedGraph,
    oracle: &IdentityWordOracle,
) -> Result<Pretzel, PretzelError> {
    let (identified, _) = tilde(g, oracle);
    let folded = core(&identified)?;
    let (graph, code, _) = folded.canonical_form()?;
    debug_assert!(
        tilde(&graph, oracle).1.pairs.is_empty(),
        "normal form must be free of identifiable pairs"
    );
    debug_assert!(
        crate::retractcore::is_core(&graph).unwrap_or(true),
        "normal form must not admit a shrinking endomorphism"
    );
    Ok(Pretzel {
        graph,
        code,
        oracle: oracle.clone(),
    })
}

/// The pretzel of an arbitrary birooted graph.
pub fn pretzel_of_graph(
    g: &BirootedGraph,
    oracle: &IdentityWordOracle,
) -> Result<Pretzel, PretzelError> {
    normal_form(g, oracle)
}

/// The pretzel of a tree: identify idempaths, retract, canonicalize.
pub fn pretzel_of_tree(t: &XTree, oracle: &IdentityWordOracle) -> Result<Pretzel, PretzelError> {
    normal_form(t.graph(), oracle)
}

/// The pretzel of a term together with the identification trace of its
/// unfolded tree (handy for replay-based diagnostics).
pub fn pretzel_of_term(
    t: &Term,
    alphabet: &[Label],
    oracle: &IdentityWordOracle,
) -> Result<(Pretzel, MergeTrace), PretzelError> {
    let tree = term_to_tree(t, alphabet)?;
    let (_, trace) = tilde(tree.graph(), oracle);
    let p = normal_form(tree.graph(), oracle)?;
    Ok((p, trace))
}

/// Glue `b`'s start onto `a`'s end and re-normalize.
pub fn multiply(a: &Pretzel, b: &Pretzel) -> Result<Pretzel, PretzelError> {
    if a.oracle_tag() != b.oracle_tag() {
        return Err(PretzelError::OracleMismatch(a.oracle_tag(), b.oracle_tag()));
    }
    let glued = a.graph.glue(&b.graph)?;
    normal_form(&glued, &a.oracle)
}

/// Move the end back to the start and re-normalize.
pub fn plus(a: &Pretzel) -> Result<Pretzel, PretzelError> {
    normal_form(&a.graph.reroot_plus(), &a.oracle)
}

/// Decides equality of two terms in the presented monoid by comparing
/// pretzel normal forms.
pub fn equal_in_presentation(
    s: &Term,
    t: &Term,
    alphabet: &[Label],
    oracle: &IdentityWordOracle,
) -> Result<bool, PretzelError> {
    let ps = pretzel_of_tree(&term_to_tree(s, alphabet)?, oracle)?;
    let pt = pretzel_of_tree(&term_to_tree(t, alphabet)?, oracle)?;
    Ok(ps == pt)
}

/// Serializes a pretzel as an `oracle:` header naming the oracle source
/// (a monoid file path or `free`) followed by the graph text format.
pub fn write_pretzel(p: &Pretzel, oracle_name: &str) -> String {
    format!("oracle: {}\n{}", oracle_name, write_graph(&p.graph))
}

/// Parses the output of [`write_pretzel`]. The caller supplies the oracle
/// the header names; the graph is re-normalized under it, so a round trip
/// through text reproduces the pretzel exactly.
pub fn parse_pretzel(
    src: &str,
    oracle: &IdentityWordOracle,
) -> Result<(String, Pretzel), PretzelError> {
    let mut name = None;
    let mut rest = String::new();
    for line in src.lines() {
        match line.trim().strip_prefix("oracle:") {
            Some(n) if name.is_none() => name = Some(n.trim().to_string()),
            _ => {
                rest.push_str(line);
                rest.push('\n');
            }
        }
    }
    let name = name.ok_or(GraphError::Parse {
        line: 1,
        msg: "missing `oracle:` header".to_string(),
    })?;
    let g = parse_graph(&rest)?;
    Ok((name, normal_form(&g, oracle)?))
}

/// One failure of the Cayley-embedding property, localized to the chunk
/// below a vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CayleyViolation {
    /// Two distinct chunk vertices carry the same monoid value.
    VertexCollision {
        chunk: VertexId,
        first: VertexId,
        second: VertexId,
        value: usize,
    },
    /// Two distinct chunk edges map to the same Cayley edge.
    EdgeCollision {
        chunk: VertexId,
        first: Edge,
        second: Edge,
    },
    /// A chunk edge's image is missing from the Cayley graph.
    MissingImage { chunk: VertexId, edge: Edge },
}

impl fmt::Display for CayleyViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CayleyViolation::VertexCollision {
                chunk,
                first,
                second,
                value,
            } => write!(
                f,
                "chunk at {chunk}: vertices {first} and {second} both map to value {value}"
            ),
            CayleyViolation::EdgeCollision {
                chunk,
                first,
                second,
            } => write!(
                f,
                "chunk at {chunk}: edges {first:?} and {second:?} share a Cayley image"
            ),
            CayleyViolation::MissingImage { chunk, edge } => write!(
                f,
                "chunk at {chunk}: edge {edge:?} has no image in the Cayley graph"
            ),
        }
    }
}

/// Result of [`check_cayley_embedding`]; passes when no violations exist.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CayleyReport {
    pub violations: Vec<CayleyViolation>,
}

impl CayleyReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// For every vertex v, the chunk Γ_v (the subgraph spanned by all directed
/// start-to-v paths) must embed into the Cayley graph of `c` via vertex
/// values: the value map must be injective on the chunk's vertices and
/// edges, and every edge image must exist in the Cayley graph.
pub fn check_cayley_embedding(
    p: &Pretzel,
    c: &FiniteMonoid,
) -> Result<CayleyReport, IdempathError> {
    let g = &p.graph;
    let vals = c_values(g, c)?;
    let mut violations = Vec::new();
    for v in 0..g.n_vertices() {
        // u is in the chunk iff v is reachable from u; an edge is in the
        // chunk iff v is reachable from its target.
        let reaches_v = reaches(g, v);
        let mut seen_value: HashMap<usize, VertexId> = HashMap::new();
        for u in 0..g.n_vertices() {
            if !reaches_v[u] {
                continue;
            }
            if let Some(&prev) = seen_value.get(&vals[u]) {
                violations.push(CayleyViolation::VertexCollision {
                    chunk: v,
                    first: prev,
                    second: u,
                    value: vals[u],
                });
            } else {
                seen_value.insert(vals[u], u);
            }
        }
        let mut seen_edge: HashMap<(usize, Label, usize), Edge> = HashMap::new();
        for &(s, l, t) in g.edges() {
            if !reaches_v[t] {
                continue;
            }
            let image = (vals[s], l, vals[t]);
            let expected = c.generator(l).map(|gv| c.mul(vals[s], gv));
            if expected != Some(vals[t]) {
                violations.push(CayleyViolation::MissingImage {
                    chunk: v,
                    edge: (s, l, t),
                });
            }
            if let Some(&prev) = seen_edge.get(&image) {
                violations.push(CayleyViolation::EdgeCollision {
                    chunk: v,
                    first: prev,
                    second: (s, l, t),
                });
            } else {
                seen_edge.insert(image, (s, l, t));
            }
        }
    }
    Ok(CayleyReport { violations })
}

/// Vertices from which `v` is reachable.
fn reaches(g: &BirootedGraph, v: VertexId) -> Vec<bool> {
    let mut hit = vec![false; g.n_vertices()];
    hit[v] = true;
    let mut stack = vec![v];
    while let Some(u) = stack.pop() {
        for &(s, _, _) in g.in_edges(u) {
            if !hit[s] {
                hit[s] = true;
                stack.push(s);
            }
        }
    }
    hit
}

/// The tree of almost simple paths of a pretzel: a trie whose edges carry
/// both the X label and the 1-based index of the originating pretzel edge
/// (in canonical edge order), with every trie vertex lying over the
/// pretzel's end vertex marked as an endpoint.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ASPTree {
    alphabet: Vec<Label>,
    n_vertices: usize,
    /// (src, X label, dst, edge index); dst values are 1..n_vertices in
    /// discovery order, the root is 0.
    edges: Vec<(VertexId, Label, VertexId, usize)>,
    endpoints: BTreeSet<VertexId>,
    /// Trie vertex -> pretzel vertex it lies over.
    over: Vec<VertexId>,
}

impl ASPTree {
    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    pub fn edges(&self) -> &[(VertexId, Label, VertexId, usize)] {
        &self.edges
    }

    pub fn endpoints(&self) -> &BTreeSet<VertexId> {
        &self.endpoints
    }

    /// The pretzel vertex a trie vertex lies over.
    pub fn over(&self, v: VertexId) -> VertexId {
        self.over[v]
    }

    /// The underlying X-labeled tree with the end placed at `endpoint`
    /// (which must be one of the marked endpoints).
    pub fn variant(&self, endpoint: VertexId) -> XTree {
        assert!(
            self.endpoints.contains(&endpoint),
            "vertex {endpoint} is not a marked endpoint"
        );
        let g = BirootedGraph::new(
            self.alphabet.clone(),
            self.n_vertices,
            self.edges.iter().map(|&(s, l, t, _)| (s, l, t)),
            0,
            endpoint,
        )
        .expect("the trie is a rooted tree");
        XTree::new(g).expect("the trie is a rooted tree")
    }

    /// All endpoint variants, in endpoint order.
    pub fn variants(&self) -> Vec<XTree> {
        self.endpoints.iter().map(|&e| self.variant(e)).collect()
    }

    /// A canonical signature of the doubly labeled tree with endpoint
    /// marks: vertices are rendered as sorted lists of
    /// `(index, label, child signature)` plus an endpoint flag, so two
    /// trees get the same signature exactly when some root-fixing
    /// bijection matches X labels, edge indices, and endpoint marks.
    pub fn signature(&self) -> String {
        let mut children: Vec<Vec<(usize, Label, VertexId)>> = vec![Vec::new(); self.n_vertices];
        for &(s, l, t, idx) in &self.edges {
            children[s].push((idx, l, t));
        }
        for c in &mut children {
            c.sort();
        }
        fn render(
            v: VertexId,
            children: &[Vec<(usize, Label, VertexId)>],
            endpoints: &BTreeSet<VertexId>,
            out: &mut String,
        ) {
            out.push(if endpoints.contains(&v) { '!' } else { '.' });
            out.push('(');
            for &(idx, l, t) in &children[v] {
                out.push_str(&format!("{idx}{}", l.0));
                render(t, children, endpoints, out);
            }
            out.push(')');
        }
        let mut out = String::new();
        render(0, &children, &self.endpoints, &mut out);
        out
    }
}

/// Builds the trie of all almost simple root paths (no vertex repeats,
/// except possibly the final one), then folds it to determinism in the
/// edge-index labeling. Children are explored in canonical edge order, so
/// construction is deterministic.
pub fn asp_tree(p: &Pretzel) -> ASPTree {
    let g = &p.graph;
    let indexed: Vec<Edge> = p.indexed_edges();
    let mut edges: Vec<(VertexId, Label, VertexId, usize)> = Vec::new();
    let mut over: Vec<VertexId> = Vec::new();
    // Depth-first expansion in preorder; each frame describes a path end:
    // (parent trie vertex + arriving edge, pretzel vertex, set of pretzel
    // vertices strictly before it on the path).
    struct Frame {
        via: Option<(VertexId, Label, usize)>,
        at: VertexId,
        before: BTreeSet<VertexId>,
    }
    let mut stack = vec![Frame {
        via: None,
        at: g.start(),
        before: BTreeSet::new(),
    }];
    while let Some(Frame { via, at, before }) = stack.pop() {
        let node = over.len();
        over.push(at);
        if let Some((parent, l, eps)) = via {
            edges.push((parent, l, node, eps));
        }
        if before.contains(&at) {
            // The path already repeated its final vertex; it cannot grow.
            continue;
        }
        let mut extended = before.clone();
        extended.insert(at);
        // Reverse order so the stack pops children in canonical order.
        for (pos, &(s, l, t)) in indexed.iter().enumerate().rev() {
            if s != at {
                continue;
            }
            stack.push(Frame {
                via: Some((node, l, pos + 1)),
                at: t,
                before: extended.clone(),
            });
        }
    }
    edges.sort();
    // The trie shares prefixes by construction, which already makes the
    // index labeling deterministic; the folding pass below keeps that an
    // explicit invariant rather than an accident of construction.
    let n = over.len();
    let mut tree = ASPTree {
        alphabet: g.alphabet().to_vec(),
        n_vertices: n,
        edges,
        endpoints: (0..n).filter(|&v| over[v] == g.end()).collect(),
        over,
    };
    fold_to_determinism(&mut tree);
    tree
}

/// Repeatedly merges sibling edges with equal index labels, uniting their
/// subtrees, until no vertex has two out-edges with the same index.
fn fold_to_determinism(t: &mut ASPTree) {
    loop {
        let mut children: Vec<Vec<(usize, VertexId)>> = vec![Vec::new(); t.n_vertices];
        for &(s, _, dst, idx) in &t.edges {
            children[s].push((idx, dst));
        }
        let mut clash = None;
        'scan: for v in 0..t.n_vertices {
            let mut seen: HashMap<usize, VertexId> = HashMap::new();
            for &(idx, dst) in &children[v] {
                if let Some(&prev) = seen.get(&idx) {
                    clash = Some((prev.min(dst), prev.max(dst)));
                    break 'scan;
                }
                seen.insert(idx, dst);
            }
        }
        let Some((keep, gone)) = clash else { return };
        // Re-point the duplicate subtree's root onto the kept sibling and
        // renumber; equal indices guarantee equal X labels, so the united
        // cones stay well labeled.
        let renumber = |v: VertexId| {
            if v == gone {
                keep
            } else if v > gone {
                v - 1
            } else {
                v
            }
        };
        let mut merged: Vec<(VertexId, Label, VertexId, usize)> = Vec::new();
        for &(s, l, d, idx) in &t.edges {
            if d == gone && s != gone {
                continue; // the duplicate edge itself disappears
            }
            merged.push((renumber(s), l, renumber(d), idx));
        }
        merged.sort();
        merged.dedup();
        t.endpoints = t.endpoints.iter().map(|&e| renumber(e)).collect();
        let over_gone = t.over.remove(gone);
        debug_assert_eq!(over_gone, t.over[renumber(gone)]);
        t.n_vertices -= 1;
        t.edges = merged;
    }
}
