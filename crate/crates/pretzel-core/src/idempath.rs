//! Identification of identity-labeled paths.
//!
//! A directed path whose label evaluates to the identity of the value
//! monoid is an idempath. Identifying the two endpoints of an idempath,
//! repeatedly, until no distinct endpoints remain, is confluent: every
//! merge order reaches the same quotient up to isomorphism. [`tilde`]
//! computes that quotient with a fixed deterministic strategy and returns
//! a replayable [`MergeTrace`].
//!
//! Two vertices are identified in the quotient exactly when some semiwalk
//! between them carries a constructable label: one obtainable from the
//! empty word by repeatedly inserting identity words or their formal
//! inverses. [`semiwalk_identified_oracle`] searches for such a witness
//! and re-verifies it by replay, giving an independent route to the same
//! answer that [`is_identified`] gives.

use crate::cancellative::{FiniteMonoid, IdentityWordOracle};
use crate::graphs::{BirootedGraph, Edge, Label, VertexId};
use std::collections::{BTreeSet, VecDeque};
use std::fmt::Write as _;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum IdempathError {
    #[error("vertex {0} reads conflicting values along `{1}` and `{2}`")]
    AmbiguousValue(VertexId, String, String),
}

/// Sets of monoid values readable along directed paths from `from`: entry
/// `v` holds every value of a path label `from -> v`. Over the free monoid
/// only the empty path has a queryable value, so only `from` is populated
/// (with 0 standing for the identity).
pub fn reachable_values(
    g: &BirootedGraph,
    oracle: &IdentityWordOracle,
    from: VertexId,
) -> Vec<BTreeSet<usize>> {
    match oracle.finite() {
        None => {
            let mut vals = vec![BTreeSet::new(); g.n_vertices()];
            vals[from].insert(0);
            vals
        }
        Some(m) => {
            let (vals, _) = value_bfs(g, m, from);
            vals
        }
    }
}

/// Breadth-first search over (vertex, value) states. Also returns parent
/// pointers for path reconstruction: `parent[v][c] = (prev_v, prev_c, edge)`.
pub(crate) type ParentTable = Vec<Vec<Option<(VertexId, usize, Edge)>>>;

pub(crate) fn value_bfs(
    g: &BirootedGraph,
    m: &FiniteMonoid,
    from: VertexId,
) -> (Vec<BTreeSet<usize>>, ParentTable) {
    let n = g.n_vertices();
    let k = m.size();
    let mut seen = vec![vec![false; k]; n];
    let mut parent: ParentTable = vec![vec![None; k]; n];
    let mut vals = vec![BTreeSet::new(); n];
    let mut queue = VecDeque::new();
    seen[from][m.identity()] = true;
    vals[from].insert(m.identity());
    queue.push_back((from, m.identity()));
    while let Some((v, c)) = queue.pop_front() {
        for &(s, l, t) in g.out_edges(v) {
            let img = match m.generator(l) {
                Some(i) => i,
                None => continue,
            };
            let c2 = m.mul(c, img);
            if !seen[t][c2] {
                seen[t][c2] = true;
                parent[t][c2] = Some((v, c, (s, l, t)));
                vals[t].insert(c2);
                queue.push_back((t, c2));
            }
        }
    }
    (vals, parent)
}

/// First pair `(a, b)` in vertex-id scan order with a nonempty idempath
/// `a -> b`, `a != b`, together with a shortest witness path.
fn first_idempath_pair(
    g: &BirootedGraph,
    oracle: &IdentityWordOracle,
) -> Option<(VertexId, VertexId, Vec<Edge>)> {
    let m = oracle.finite()?;
    for a in 0..g.n_vertices() {
        let (vals, parent) = value_bfs(g, m, a);
        for b in 0..g.n_vertices() {
            if b == a || !vals[b].contains(&m.identity()) {
                continue;
            }
            let mut path = Vec::new();
            let mut state = (b, m.identity());
            while state != (a, m.identity()) || path.is_empty() {
                let (pv, pc, e) = parent[state.0][state.1]
                    .expect("bfs reached the state, so parents chain back");
                path.push(e);
                state = (pv, pc);
            }
            path.reverse();
            return Some((a, b, path));
        }
    }
    None
}

/// Every eligible identification pair of the current graph.
fn all_idempath_pairs(g: &BirootedGraph, oracle: &IdentityWordOracle) -> Vec<(VertexId, VertexId)> {
    let m = match oracle.finite() {
        None => return Vec::new(),
        Some(m) => m,
    };
    let mut pairs = Vec::new();
    for a in 0..g.n_vertices() {
        let (vals, _) = value_bfs(g, m, a);
        for b in 0..g.n_vertices() {
            if b != a && vals[b].contains(&m.identity()) {
                pairs.push((a, b));
            }
        }
    }
    pairs
}

/// Record of the identifications performed by [`tilde`]. Pairs are stated
/// in the vertex ids of the input graph; replaying them in order on the
/// input reproduces the output.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MergeTrace {
    pub pairs: Vec<(VertexId, VertexId)>,
    /// Final old-to-new vertex map.
    pub map: Vec<VertexId>,
}

impl MergeTrace {
    pub fn render(&self) -> String {
        let mut out = String::new();
        for &(a, b) in &self.pairs {
            writeln!(out, "merge {a} {b}").unwrap();
        }
        out
    }
}

/// Replays identification pairs (in input-graph ids) on `g`, returning the
/// intermediate graphs after each merge and the final old-to-new map.
pub fn replay_merge_trace(
    g: &BirootedGraph,
    pairs: &[(VertexId, VertexId)],
) -> (Vec<BirootedGraph>, Vec<VertexId>) {
    let mut acc: Vec<VertexId> = (0..g.n_vertices()).collect();
    let mut cur = g.clone();
    let mut stages = Vec::new();
    for &(a, b) in pairs {
        let (next, map) = cur.merge_vertices(&[(acc[a], acc[b])]);
        for slot in acc.iter_mut() {
            *slot = map[*slot];
        }
        cur = next;
        stages.push(cur.clone());
    }
    (stages, acc)
}

/// The idempath-identified quotient: merges endpoints of idempaths until
/// none remain distinct. Scans vertices in id order and always merges the
/// first eligible pair, so the run (not only the result) is deterministic.
pub fn tilde(g: &BirootedGraph, oracle: &IdentityWordOracle) -> (BirootedGraph, MergeTrace) {
    let n_orig = g.n_vertices();
    let mut acc: Vec<VertexId> = (0..n_orig).collect();
    let mut cur = g.clone();
    let mut pairs = Vec::new();
    while let Some((a, b, _)) = first_idempath_pair(&cur, oracle) {
        let orig_a = (0..n_orig).find(|&o| acc[o] == a).expect("class nonempty");
        let orig_b = (0..n_orig).find(|&o| acc[o] == b).expect("class nonempty");
        pairs.push((orig_a, orig_b));
        let (next, map) = cur.merge_vertices(&[(a, b)]);
        for slot in acc.iter_mut() {
            *slot = map[*slot];
        }
        cur = next;
    }
    (cur, MergeTrace { pairs, map: acc })
}

/// Like [`tilde`] but picking each merge uniformly among all eligible
/// pairs. Confluence makes the result isomorphic to the deterministic one.
pub fn tilde_randomized(
    g: &BirootedGraph,
    oracle: &IdentityWordOracle,
    rng: &mut impl rand::Rng,
) -> BirootedGraph {
    let mut cur = g.clone();
    loop {
        let pairs = all_idempath_pairs(&cur, oracle);
        if pairs.is_empty() {
            return cur;
        }
        let &(a, b) = &pairs[rng.gen_range(0..pairs.len())];
        cur = cur.merge_vertices(&[(a, b)]).0;
    }
}

/// Are `u` and `v` identified in the idempath-identified quotient?
pub fn is_identified(
    g: &BirootedGraph,
    oracle: &IdentityWordOracle,
    u: VertexId,
    v: VertexId,
) -> bool {
    let (_, trace) = tilde(g, oracle);
    trace.map[u] == trace.map[v]
}

/// Common value of all path labels from the start to each vertex, checking
/// well-definedness: conflicting path values are reported with the two
/// witnessing words.
pub fn c_values(g: &BirootedGraph, m: &FiniteMonoid) -> Result<Vec<usize>, IdempathError> {
    let n = g.n_vertices();
    let mut value = vec![usize::MAX; n];
    let mut word: Vec<Vec<Label>> = vec![Vec::new(); n];
    let mut queue = VecDeque::new();
    value[g.start()] = m.identity();
    queue.push_back(g.start());
    while let Some(v) = queue.pop_front() {
        for &(_, l, t) in g.out_edges(v) {
            let img = m.generator(l).expect("alphabet covered by generators");
            let val = m.mul(value[v], img);
            let mut w = word[v].clone();
            w.push(l);
            if value[t] == usize::MAX {
                value[t] = val;
                word[t] = w;
                queue.push_back(t);
            } else if value[t] != val {
                let show = |w: &[Label]| w.iter().map(|l| l.0).collect::<String>();
                return Err(IdempathError::AmbiguousValue(t, show(&word[t]), show(&w)));
            }
        }
    }
    Ok(value)
}

/// Value of a single vertex; see [`c_values`].
pub fn c_value(g: &BirootedGraph, m: &FiniteMonoid, v: VertexId) -> Result<usize, IdempathError> {
    Ok(c_values(g, m)?[v])
}

/// One step of a semiwalk: an edge traversed forward or backward.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SemiwalkStep {
    pub edge: Edge,
    pub back: bool,
}

impl SemiwalkStep {
    pub fn from_vertex(&self) -> VertexId {
        if self.back {
            self.edge.2
        } else {
            self.edge.0
        }
    }

    pub fn to_vertex(&self) -> VertexId {
        if self.back {
            self.edge.0
        } else {
            self.edge.2
        }
    }
}

/// A walk that may traverse edges against their direction. Its label is a
/// word over the alphabet and its formal inverses.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Semiwalk {
    pub steps: Vec<SemiwalkStep>,
}

impl Semiwalk {
    /// Signed label: `(letter, inverted)` per step.
    pub fn label(&self) -> Vec<(Label, bool)> {
        self.steps.iter().map(|s| (s.edge.1, s.back)).collect()
    }

    pub fn render(&self) -> String {
        self.steps
            .iter()
            .map(|s| {
                if s.back {
                    format!("{}⁻", s.edge.1)
                } else {
                    s.edge.1.to_string()
                }
            })
            .collect()
    }
}

/// One insertion of the construction of a semiwalk label: an identity word
/// (or its formal inverse when `inverted`) spliced in at letter position
/// `pos` of the word built so far.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Insertion {
    pub pos: usize,
    pub word: Vec<Label>,
    pub inverted: bool,
}

/// A constructable semiwalk between two vertices, with the insertion
/// sequence that builds its label from the empty word.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SemiwalkWitness {
    pub walk: Semiwalk,
    pub insertions: Vec<Insertion>,
}

impl SemiwalkWitness {
    pub fn insertion_count(&self) -> usize {
        self.insertions.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SemiwalkOutcome {
    /// A replay-verified witness within the insertion budget.
    Yes(SemiwalkWitness),
    /// The vertices are not identified at all.
    No,
    /// Identified, but the witness found needs more insertions than allowed.
    Budget,
}

/// Default insertion budget for a graph, mirroring how fast witnesses can
/// grow when identifications are chained.
pub fn default_insertion_budget(g: &BirootedGraph) -> usize {
    g.n_vertices() * (g.n_edges() + 1)
}

/// Replays a witness: checks the walk is incident step by step from `u` to
/// `v` over edges of `g`, that every inserted word is an identity word of
/// the oracle, and that the insertions rebuild exactly the walk's label.
pub fn verify_semiwalk_witness(
    g: &BirootedGraph,
    oracle: &IdentityWordOracle,
    u: VertexId,
    v: VertexId,
    witness: &SemiwalkWitness,
) -> bool {
    let mut cur = u;
    for step in &witness.walk.steps {
        if !g.has_edge(&step.edge) || step.from_vertex() != cur {
            return false;
        }
        cur = step.to_vertex();
    }
    if cur != v {
        return false;
    }
    let mut built: Vec<(Label, bool)> = Vec::new();
    for ins in &witness.insertions {
        if !oracle.is_identity_word(&ins.word) || ins.pos > built.len() {
            return false;
        }
        let letters: Vec<(Label, bool)> = if ins.inverted {
            ins.word.iter().rev().map(|&l| (l, true)).collect()
        } else {
            ins.word.iter().map(|&l| (l, false)).collect()
        };
        built.splice(ins.pos..ins.pos, letters);
    }
    built == witness.walk.label()
}

/// Searches for a constructable semiwalk from `u` to `v` witnessing their
/// identification, allowing at most `max_insertions` insertions.
///
/// The search follows the identification chain: it performs the same
/// deterministic merges as [`tilde`], remembering a shortest idempath for
/// each, and once `u` and `v` coincide it lifts the empty semiwalk back
/// through the chain. Lifting one merge maps each step to an edge of the
/// previous graph and splices in the remembered idempath (forward or
/// inverted) wherever consecutive steps meet only through the merged pair,
/// each splice costing one insertion. The final witness is verified by
/// replay before it is returned.
pub fn semiwalk_identified_oracle(
    g: &BirootedGraph,
    oracle: &IdentityWordOracle,
    u: VertexId,
    v: VertexId,
    max_insertions: usize,
) -> SemiwalkOutcome {
    if u == v {
        return SemiwalkOutcome::Yes(SemiwalkWitness {
            walk: Semiwalk::default(),
            insertions: Vec::new(),
        });
    }
    struct ChainStep {
        pair: (VertexId, VertexId),
        idempath: Vec<Edge>,
        map: Vec<VertexId>,
    }
    let mut chain: Vec<ChainStep> = Vec::new();
    let mut graphs: Vec<BirootedGraph> = vec![g.clone()];
    let mut cu = u;
    let mut cv = v;
    let mut positions: Vec<(VertexId, VertexId)> = vec![(cu, cv)];
    while cu != cv {
        let cur = graphs.last().unwrap();
        let Some((a, b, path)) = first_idempath_pair(cur, oracle) else {
            return SemiwalkOutcome::No;
        };
        let (next, map) = cur.merge_vertices(&[(a, b)]);
        cu = map[cu];
        cv = map[cv];
        chain.push(ChainStep {
            pair: (a, b),
            idempath: path,
            map,
        });
        graphs.push(next);
        positions.push((cu, cv));
    }

    // Lift the empty semiwalk at the deepest level back to the input.
    let mut walk = Semiwalk::default();
    let mut insertions: Vec<Insertion> = Vec::new();
    for j in (0..chain.len()).rev() {
        let step = &chain[j];
        let pre = &graphs[j];
        let (tu, tv) = positions[j];
        let idempath_label: Vec<Label> = step.idempath.iter().map(|&(_, l, _)| l).collect();
        // Map each step of the current walk to a preimage edge of `pre`.
        let lifted: Vec<SemiwalkStep> = walk
            .steps
            .iter()
            .map(|s| {
                let (ms, ml, mt) = s.edge;
                let pre_edge = pre
                    .edges()
                    .find(|&&(ps, pl, pt)| {
                        pl == ml && step.map[ps] == ms && step.map[pt] == mt
                    })
                    .copied()
                    .expect("merged edge has a preimage");
                SemiwalkStep {
                    edge: pre_edge,
                    back: s.back,
                }
            })
            .collect();
        let mut new_steps: Vec<SemiwalkStep> = Vec::new();
        let mut gaps: Vec<(usize, bool)> = Vec::new(); // (letter position, inverted)
        let mut cur = tu;
        let fill_gap = |cur: &mut VertexId,
                            target: VertexId,
                            new_steps: &mut Vec<SemiwalkStep>,
                            gaps: &mut Vec<(usize, bool)>,
                            pos: usize| {
            if *cur == target {
                return true;
            }
            let (a, b) = step.pair;
            let inverted = if *cur == a && target == b {
                false
            } else if *cur == b && target == a {
                true
            } else {
                return false;
            };
            gaps.push((pos, inverted));
            if inverted {
                for &e in step.idempath.iter().rev() {
                    new_steps.push(SemiwalkStep { edge: e, back: true });
                }
            } else {
                for &e in &step.idempath {
                    new_steps.push(SemiwalkStep { edge: e, back: false });
                }
            }
            *cur = target;
            true
        };
        let mut ok = true;
        for (i, s) in lifted.iter().enumerate() {
            if !fill_gap(&mut cur, s.from_vertex(), &mut new_steps, &mut gaps, i) {
                ok = false;
                break;
            }
            new_steps.push(*s);
            cur = s.to_vertex();
        }
        if ok {
            ok = fill_gap(&mut cur, tv, &mut new_steps, &mut gaps, lifted.len());
        }
        assert!(ok, "gap endpoints always differ by the merged pair");
        // Record this level's insertions after the child's, splicing
        // right to left so letter positions of the child word stay valid.
        for &(pos, inverted) in gaps.iter().rev() {
            insertions.push(Insertion {
                pos,
                word: idempath_label.clone(),
                inverted,
            });
        }
        walk = Semiwalk { steps: new_steps };
    }

    let witness = SemiwalkWitness { walk, insertions };
    assert!(
        verify_semiwalk_witness(g, oracle, u, v, &witness),
        "constructed witness must replay"
    );
    if witness.insertion_count() > max_insertions {
        return SemiwalkOutcome::Budget;
    }
    SemiwalkOutcome::Yes(witness)
}
