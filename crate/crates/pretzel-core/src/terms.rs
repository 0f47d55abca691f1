//! Terms over a generating alphabet and the trees they unfold into.
//!
//! A term is built from generators and the constant 1 by juxtaposition
//! (product) and the unary `^+`. Terms unfold into birooted trees whose
//! edges point away from the start: the product glues the second tree onto
//! the end of the first, and `^+` moves the end back to the start. Every
//! element of a monoid of identified graph cores is named by some term.

use crate::cancellative::{FiniteMonoid, IdentityWordOracle};
use crate::graphs::{BirootedGraph, Edge, GraphError, Label, VertexId};
use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TermError {
    #[error("syntax error at byte {0}")]
    Syntax(usize),
    #[error("unknown generator `{0}` at byte {1}")]
    UnknownGenerator(char, usize),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TreeError {
    #[error("vertex {0} has {1} incoming edges; trees need exactly one per non-start vertex")]
    BadInDegree(VertexId, usize),
    #[error("the start vertex has an incoming edge")]
    RootInEdge,
}

/// Abstract syntax of a term. Products are binary and juxtaposition
/// associates to the left, so `xyz` parses as `Prod(Prod(x, y), z)`.
/// Parsing is faithful: `x1y` keeps its unit factor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Term {
    Identity,
    Gen(Label),
    Prod(Box<Term>, Box<Term>),
    Plus(Box<Term>),
}

impl Term {
    /// Left-associated product of the factors; 1 when there are none.
    pub fn prod(factors: impl IntoIterator<Item = Term>) -> Term {
        factors
            .into_iter()
            .reduce(|a, b| Term::Prod(Box::new(a), Box::new(b)))
            .unwrap_or(Term::Identity)
    }

    pub fn plus(t: Term) -> Term {
        Term::Plus(Box::new(t))
    }

    /// `t^n` as a left-associated product of `n` copies; `t^0` is 1.
    pub fn pow(t: Term, n: u32) -> Term {
        Term::prod(std::iter::repeat(t).take(n as usize))
    }

    /// Number of generator occurrences.
    pub fn len(&self) -> usize {
        match self {
            Term::Identity => 0,
            Term::Gen(_) => 1,
            Term::Prod(a, b) => a.len() + b.len(),
            Term::Plus(t) => t.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Identity => write!(f, "1"),
            Term::Gen(l) => write!(f, "{l}"),
            // A bare right factor would re-associate to the left on
            // re-parsing, so only left-nested products print bare.
            Term::Prod(a, b) => match **b {
                Term::Prod(_, _) => write!(f, "{a}({b})"),
                _ => write!(f, "{a}{b}"),
            },
            Term::Plus(t) => match **t {
                Term::Identity | Term::Gen(_) => write!(f, "{t}^+"),
                _ => write!(f, "({t})^+"),
            },
        }
    }
}

/// Parses a term: juxtaposition for products, `^+` for the unary
/// operation, `^<n>` for repetition, `1` for the empty term, single-letter
/// generators, parentheses for grouping, whitespace ignored.
pub fn parse_term(src: &str, alphabet: &[Label]) -> Result<Term, TermError> {
    let bytes: Vec<char> = src.chars().collect();
    let mut p = Parser {
        chars: &bytes,
        pos: 0,
        alphabet,
    };
    let t = p.term()?;
    p.skip_ws();
    if p.pos != p.chars.len() {
        return Err(TermError::Syntax(p.pos));
    }
    Ok(t)
}

struct Parser<'a> {
    chars: &'a [char],
    pos: usize,
    alphabet: &'a [Label],
}

impl Parser<'_> {
    fn skip_ws(&mut self) {
        while self.chars.get(self.pos).is_some_and(|c| c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn term(&mut self) -> Result<Term, TermError> {
        let mut acc: Option<Term> = None;
        loop {
            match self.peek() {
                None | Some(')') => break,
                Some(_) => {
                    let f = self.factor()?;
                    acc = Some(match acc {
                        None => f,
                        Some(a) => Term::Prod(Box::new(a), Box::new(f)),
                    });
                }
            }
        }
        acc.ok_or(TermError::Syntax(self.pos))
    }

    fn factor(&mut self) -> Result<Term, TermError> {
        let mut t = self.atom()?;
        while self.peek() == Some('^') {
            self.pos += 1;
            match self.peek() {
                Some('+') => {
                    self.pos += 1;
                    t = Term::plus(t);
                }
                Some(c) if c.is_ascii_digit() => {
                    let from = self.pos;
                    while self.chars.get(self.pos).is_some_and(|c| c.is_ascii_digit()) {
                        self.pos += 1;
                    }
                    let digits: String = self.chars[from..self.pos].iter().collect();
                    let n: u32 = digits.parse().map_err(|_| TermError::Syntax(from))?;
                    t = Term::pow(t, n);
                }
                _ => return Err(TermError::Syntax(self.pos)),
            }
        }
        Ok(t)
    }

    fn atom(&mut self) -> Result<Term, TermError> {
        match self.peek() {
            Some('1') => {
                self.pos += 1;
                Ok(Term::Identity)
            }
            Some('(') => {
                self.pos += 1;
                let t = self.term()?;
                if self.peek() != Some(')') {
                    return Err(TermError::Syntax(self.pos));
                }
                self.pos += 1;
                Ok(t)
            }
            Some(c) if self.alphabet.contains(&Label(c)) => {
                self.pos += 1;
                Ok(Term::Gen(Label(c)))
            }
            Some(c) if c.is_alphanumeric() => Err(TermError::UnknownGenerator(c, self.pos)),
            _ => Err(TermError::Syntax(self.pos)),
        }
    }
}

/// A birooted graph whose underlying graph is a tree with every edge
/// oriented away from the start.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct XTree {
    graph: BirootedGraph,
    parent: Vec<Option<(VertexId, Label)>>,
}

impl XTree {
    pub fn new(graph: BirootedGraph) -> Result<XTree, TreeError> {
        let n = graph.n_vertices();
        let mut parent: Vec<Option<(VertexId, Label)>> = vec![None; n];
        let mut indeg = vec![0usize; n];
        for &(s, l, t) in graph.edges() {
            indeg[t] += 1;
            parent[t] = Some((s, l));
        }
        if indeg[graph.start()] != 0 {
            return Err(TreeError::RootInEdge);
        }
        for v in 0..n {
            if v != graph.start() && indeg[v] != 1 {
                return Err(TreeError::BadInDegree(v, indeg[v]));
            }
        }
        Ok(XTree { graph, parent })
    }

    pub fn graph(&self) -> &BirootedGraph {
        &self.graph
    }

    pub fn into_graph(self) -> BirootedGraph {
        self.graph
    }

    pub fn n_vertices(&self) -> usize {
        self.graph.n_vertices()
    }

    pub fn start(&self) -> VertexId {
        self.graph.start()
    }

    pub fn end(&self) -> VertexId {
        self.graph.end()
    }

    /// Parent vertex and the label of the edge from it, `None` at the start.
    pub fn parent(&self, v: VertexId) -> Option<(VertexId, Label)> {
        self.parent[v]
    }

    pub fn children(&self, v: VertexId) -> impl Iterator<Item = &Edge> {
        self.graph.out_edges(v)
    }

    pub fn is_leaf(&self, v: VertexId) -> bool {
        self.graph.out_edges(v).next().is_none()
    }

    /// The cone at `v`: `v` and everything below it, in breadth-first order.
    pub fn cone_vertices(&self, v: VertexId) -> Vec<VertexId> {
        let mut order = vec![v];
        let mut queue = VecDeque::from([v]);
        while let Some(u) = queue.pop_front() {
            for &(_, _, c) in self.graph.out_edges(u) {
                order.push(c);
                queue.push_back(c);
            }
        }
        order
    }
}

/// Unfolds a term into its tree: generators become single edges, products
/// glue end to start, and `^+` moves the end back to the start.
pub fn term_to_tree(t: &Term, alphabet: &[Label]) -> Result<XTree, GraphError> {
    fn build(t: &Term, alphabet: &[Label]) -> Result<BirootedGraph, GraphError> {
        match t {
            Term::Identity => Ok(BirootedGraph::single_vertex(alphabet.to_vec())),
            Term::Gen(l) => BirootedGraph::generator(alphabet.to_vec(), *l),
            Term::Prod(a, b) => build(a, alphabet)?.glue(&build(b, alphabet)?),
            Term::Plus(inner) => Ok(build(inner, alphabet)?.reroot_plus()),
        }
    }
    let g = build(t, alphabet)?;
    Ok(XTree::new(g).expect("gluing trees end to start yields a tree"))
}

/// The directed path from the start to the end, in order. Empty when the
/// two roots coincide.
pub fn trunk(t: &XTree) -> Vec<Edge> {
    let mut path = Vec::new();
    let mut v = t.end();
    while v != t.start() {
        let (p, l) = t.parent(v).expect("non-start vertices have parents");
        path.push((p, l, v));
        v = p;
    }
    path.reverse();
    path
}

/// Label word of the trunk.
pub fn trunk_word(t: &XTree) -> Vec<Label> {
    trunk(t).iter().map(|&(_, l, _)| l).collect()
}

/// Extracts the cone at `v` as a tree of its own, rooted at the copy of
/// `v`. The flag tells whether the original end lay inside the cone; when
/// it did, the extracted tree's end marks the same vertex, otherwise the
/// end sits at the root.
pub fn cone(t: &XTree, v: VertexId) -> (XTree, bool) {
    let order = t.cone_vertices(v);
    let mut number: HashMap<VertexId, VertexId> = HashMap::new();
    for (i, &u) in order.iter().enumerate() {
        number.insert(u, i);
    }
    let edges: Vec<Edge> = order
        .iter()
        .flat_map(|&u| t.graph().out_edges(u))
        .map(|&(s, l, d)| (number[&s], l, number[&d]))
        .collect();
    let contains_end = number.contains_key(&t.end());
    let end = if contains_end { number[&t.end()] } else { 0 };
    let g = BirootedGraph::new(t.graph().alphabet().to_vec(), order.len(), edges, 0, end)
        .expect("a cone is a tree");
    (XTree::new(g).expect("a cone is a tree"), contains_end)
}

/// Grafts a fresh copy of the cone at `u` onto `v`: the copy's root is
/// identified with `v` and every other copied vertex gets a new id (in
/// breadth-first order of the cone). Roots stay where they were.
pub fn copy_cone(t: &XTree, u: VertexId, v: VertexId) -> XTree {
    let order = t.cone_vertices(u);
    let n = t.n_vertices();
    let mut number: HashMap<VertexId, VertexId> = HashMap::new();
    number.insert(u, v);
    let mut next = n;
    for &w in order.iter().skip(1) {
        number.insert(w, next);
        next += 1;
    }
    let mut edges: Vec<Edge> = t.graph().edges().copied().collect();
    for &w in &order {
        for &(s, l, d) in t.graph().out_edges(w) {
            edges.push((number[&s], l, number[&d]));
        }
    }
    let g = BirootedGraph::new(
        t.graph().alphabet().to_vec(),
        next,
        edges,
        t.start(),
        t.end(),
    )
    .expect("grafting a cone onto an existing vertex keeps the graph valid");
    XTree::new(g).expect("grafted copies hang off fresh vertices")
}

/// Does the cone at `a` admit a label-preserving rooted map into the cone
/// at `b`? The end vertex may only map to itself, so a cone holding the
/// end never maps into a disjoint one.
fn cone_maps_into(t: &XTree, a: VertexId, b: VertexId, memo: &mut HashMap<(VertexId, VertexId), bool>) -> bool {
    if let Some(&known) = memo.get(&(a, b)) {
        return known;
    }
    let ok = if a == t.end() && b != t.end() {
        false
    } else {
        t.children(a).all(|&(_, l, x)| {
            t.children(b)
                .any(|&(_, lb, y)| lb == l && cone_maps_into(t, x, y, memo))
        })
    };
    memo.insert((a, b), ok);
    ok
}

/// Removes the cone at `v` (which must not contain either root) and
/// renumbers the remaining vertices in order.
fn delete_cone(t: &XTree, v: VertexId) -> XTree {
    let doomed: Vec<VertexId> = t.cone_vertices(v);
    let mut keep = vec![true; t.n_vertices()];
    for d in doomed {
        keep[d] = false;
    }
    let mut number = vec![usize::MAX; t.n_vertices()];
    let mut next = 0;
    for (w, slot) in number.iter_mut().enumerate() {
        if keep[w] {
            *slot = next;
            next += 1;
        }
    }
    let edges: Vec<Edge> = t
        .graph()
        .edges()
        .filter(|&&(s, _, d)| keep[s] && keep[d])
        .map(|&(s, l, d)| (number[s], l, number[d]))
        .collect();
    let g = BirootedGraph::new(
        t.graph().alphabet().to_vec(),
        next,
        edges,
        number[t.start()],
        number[t.end()],
    )
    .expect("removing a cone keeps the rest reachable");
    XTree::new(g).expect("removing a cone keeps a tree")
}

/// Folds the tree onto its core: whenever one cone admits a rooted
/// label-preserving map into a sibling cone under the same label, the
/// mapped cone is removed. When two sibling cones map into each other the
/// one with the larger root id goes. Scanning is by vertex id and label
/// order and restarts after every fold, so the result is deterministic;
/// the end-preservation rule keeps the end's cone alive.
pub fn tree_retract(t: &XTree) -> XTree {
    let mut cur = t.clone();
    'outer: loop {
        let mut memo = HashMap::new();
        for p in 0..cur.n_vertices() {
            let mut by_label: BTreeMap<Label, Vec<VertexId>> = BTreeMap::new();
            for &(_, l, c) in cur.children(p) {
                by_label.entry(l).or_default().push(c);
            }
            for group in by_label.values() {
                for (i, &a) in group.iter().enumerate() {
                    for &b in &group[i + 1..] {
                        let ab = cone_maps_into(&cur, a, b, &mut memo);
                        let ba = cone_maps_into(&cur, b, a, &mut memo);
                        let doomed = match (ab, ba) {
                            (true, true) => a.max(b),
                            (true, false) => a,
                            (false, true) => b,
                            (false, false) => continue,
                        };
                        cur = delete_cone(&cur, doomed);
                        continue 'outer;
                    }
                }
            }
        }
        return cur;
    }
}

/// Rewrites the tree so that every nonempty path whose label evaluates to
/// the identity ends at a leaf, then folds the result onto its core.
/// While some identity path ends at a vertex `q` with children, the
/// children of `q` are re-hung under the path's first vertex `p` (and the
/// end marker, if it sat exactly at `q`, moves to `p`). The quotient under
/// identification is unchanged because `p` and `q` are identified anyway;
/// each move turns `q` into a fresh leaf, so the loop ends. Shortest
/// eligible paths are handled first, ties broken by vertex ids.
pub fn normalize_idempaths_to_leaves(t: &XTree, oracle: &IdentityWordOracle) -> XTree {
    let m = match oracle.finite() {
        None => return tree_retract(t),
        Some(m) => m.clone(),
    };
    let mut cur = t.clone();
    loop {
        match shortest_inner_idempath(&cur, &m) {
            None => break,
            Some((p, q)) => {
                let edges: Vec<Edge> = cur
                    .graph()
                    .edges()
                    .map(|&(s, l, d)| if s == q { (p, l, d) } else { (s, l, d) })
                    .collect();
                let end = if cur.end() == q { p } else { cur.end() };
                let g = BirootedGraph::new(
                    cur.graph().alphabet().to_vec(),
                    cur.n_vertices(),
                    edges,
                    cur.start(),
                    end,
                )
                .expect("re-hanging children keeps everything reachable");
                cur = XTree::new(g).expect("re-hanging children keeps a tree");
            }
        }
    }
    tree_retract(&cur)
}

/// Shortest nonempty identity-labeled path ending at a non-leaf, as its
/// endpoint pair `(p, q)`; ties broken by `(p, q)`.
fn shortest_inner_idempath(t: &XTree, m: &FiniteMonoid) -> Option<(VertexId, VertexId)> {
    let mut best: Option<(usize, VertexId, VertexId)> = None;
    for p in 0..t.n_vertices() {
        let (vals, parents) = crate::idempath::value_bfs(t.graph(), m, p);
        for q in 0..t.n_vertices() {
            if q == p || t.is_leaf(q) || !vals[q].contains(&m.identity()) {
                continue;
            }
            let mut len = 0;
            let mut state = (q, m.identity());
            while state != (p, m.identity()) {
                let (pv, pc, _) = parents[state.0][state.1].expect("reached states chain back");
                len += 1;
                state = (pv, pc);
            }
            let candidate = (len, p, q);
            if best.is_none() || candidate < best.unwrap() {
                best = Some(candidate);
            }
        }
    }
    best.map(|(_, p, q)| (p, q))
}
