//! Finite cancellative monoids of label values.
//!
//! Edge labels of a graph evaluate into a monoid `C`; a word over the
//! alphabet is an identity word when it evaluates to the identity of `C`.
//! The engine requires `C` to be right cancellative. The free monoid on
//! the alphabet is supported as the degenerate oracle whose only identity
//! word is the empty one.
//!
//! Finite monoids load from a JSON description:
//!
//! ```json
//! {
//!   "elements": ["1", "a"],
//!   "identity": "1",
//!   "table": [["1", "a"], ["a", "1"]],
//!   "generators": {"x": "a"}
//! }
//! ```
//!
//! `table[i][j]` is the product `elements[i] * elements[j]` (row times
//! column, in that order).

use crate::graphs::{BirootedGraph, Label};
use serde::Deserialize;
use std::collections::BTreeMap;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MonoidError {
    #[error("monoid description is not valid JSON: {0}")]
    Json(String),
    #[error("element names must be distinct, `{0}` repeats")]
    DuplicateElement(String),
    #[error("unknown element name `{0}`")]
    UnknownElement(String),
    #[error("multiplication table must be {0}x{0}")]
    BadTableShape(usize),
    #[error("monoid is not associative: ({0} {1}) {2} != {0} ({1} {2})")]
    NotAssociative(String, String, String),
    #[error("`{0}` is not a two-sided identity")]
    BadIdentity(String),
    #[error("monoid is not right cancellative: {0} * {2} = {1} * {2}")]
    NotRightCancellative(String, String, String),
    #[error("alphabet letter `{0}` has no generator image")]
    MissingGenerator(char),
    #[error("generator map names letter `{0}` outside the alphabet")]
    UnknownGenerator(char),
}

/// A finite monoid given by its full multiplication table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteMonoid {
    elements: Vec<String>,
    identity: usize,
    /// Row-major: `table[i][j] = elements[i] * elements[j]`.
    table: Vec<Vec<usize>>,
    /// Image of each alphabet letter.
    generators: BTreeMap<Label, usize>,
}

#[derive(Deserialize)]
struct RawMonoid {
    elements: Vec<String>,
    identity: String,
    table: Vec<Vec<String>>,
    generators: BTreeMap<char, String>,
}

impl FiniteMonoid {
    /// Parses and validates a JSON monoid description against the given
    /// alphabet. Checks associativity, the identity, right cancellativity
    /// and that every alphabet letter has a generator image.
    pub fn load(src: &str, alphabet: &[Label]) -> Result<Self, MonoidError> {
        let raw: RawMonoid =
            serde_json::from_str(src).map_err(|e| MonoidError::Json(e.to_string()))?;
        let n = raw.elements.len();
        let mut index: BTreeMap<&str, usize> = BTreeMap::new();
        for (i, name) in raw.elements.iter().enumerate() {
            if index.insert(name, i).is_some() {
                return Err(MonoidError::DuplicateElement(name.clone()));
            }
        }
        let lookup = |name: &str| -> Result<usize, MonoidError> {
            index
                .get(name)
                .copied()
                .ok_or_else(|| MonoidError::UnknownElement(name.to_string()))
        };
        let identity = lookup(&raw.identity)?;
        if raw.table.len() != n || raw.table.iter().any(|row| row.len() != n) {
            return Err(MonoidError::BadTableShape(n));
        }
        let mut table = vec![vec![0; n]; n];
        for i in 0..n {
            for j in 0..n {
                table[i][j] = lookup(&raw.table[i][j])?;
            }
        }
        let mut generators = BTreeMap::new();
        for (&c, name) in &raw.generators {
            if !alphabet.contains(&Label(c)) {
                return Err(MonoidError::UnknownGenerator(c));
            }
            generators.insert(Label(c), lookup(name)?);
        }
        for &l in alphabet {
            if !generators.contains_key(&l) {
                return Err(MonoidError::MissingGenerator(l.0));
            }
        }
        let m = FiniteMonoid {
            elements: raw.elements,
            identity,
            table,
            generators,
        };
        m.check_structure()?;
        Ok(m)
    }

    fn check_structure(&self) -> Result<(), MonoidError> {
        let n = self.size();
        for a in 0..n {
            if self.mul(self.identity, a) != a || self.mul(a, self.identity) != a {
                return Err(MonoidError::BadIdentity(self.elements[self.identity].clone()));
            }
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if self.mul(self.mul(a, b), c) != self.mul(a, self.mul(b, c)) {
                        return Err(MonoidError::NotAssociative(
                            self.elements[a].clone(),
                            self.elements[b].clone(),
                            self.elements[c].clone(),
                        ));
                    }
                }
            }
        }
        // Right cancellativity: every column of the table is injective.
        for a in 0..n {
            for x in 0..n {
                for y in x + 1..n {
                    if self.mul(x, a) == self.mul(y, a) {
                        return Err(MonoidError::NotRightCancellative(
                            self.elements[x].clone(),
                            self.elements[y].clone(),
                            self.elements[a].clone(),
                        ));
                    }
                }
            }
        }
        Ok(())
    }

    /// The cyclic group of the given order, generated by `gen`.
    pub fn cyclic_group(order: usize, gen: Label) -> Self {
        assert!(order >= 1);
        let elements = (0..order).map(|i| format!("g{i}")).collect();
        let table = (0..order)
            .map(|i| (0..order).map(|j| (i + j) % order).collect())
            .collect();
        FiniteMonoid {
            elements,
            identity: 0,
            table,
            generators: BTreeMap::from([(gen, 1 % order)]),
        }
    }

    /// The direct product of two cyclic groups, with `gen_a` mapping to a
    /// generator of the first factor and `gen_b` of the second.
    pub fn product_of_cyclic(n: usize, m: usize, gen_a: Label, gen_b: Label) -> Self {
        assert!(n >= 1 && m >= 1);
        let size = n * m;
        let elements = (0..size)
            .map(|k| format!("g{}_{}", k / m, k % m))
            .collect();
        let table = (0..size)
            .map(|k| {
                (0..size)
                    .map(|l| {
                        let (a, b) = (k / m, k % m);
                        let (c, d) = (l / m, l % m);
                        ((a + c) % n) * m + (b + d) % m
                    })
                    .collect()
            })
            .collect();
        FiniteMonoid {
            elements,
            identity: 0,
            table,
            generators: BTreeMap::from([(gen_a, (1 % n) * m), (gen_b, 1 % m)]),
        }
    }

    pub fn size(&self) -> usize {
        self.elements.len()
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn element_name(&self, i: usize) -> &str {
        &self.elements[i]
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    pub fn generator(&self, l: Label) -> Option<usize> {
        self.generators.get(&l).copied()
    }

    pub fn generators(&self) -> &BTreeMap<Label, usize> {
        &self.generators
    }

    /// Left-to-right evaluation of a word; the empty word evaluates to the
    /// identity. Letters outside the generator map report `None`.
    pub fn eval_word(&self, word: &[Label]) -> Option<usize> {
        let mut acc = self.identity;
        for &l in word {
            acc = self.mul(acc, self.generator(l)?);
        }
        Some(acc)
    }

    /// Optional extra check, not required by the engine: is the monoid
    /// also left cancellative (every row injective)?
    pub fn is_left_cancellative(&self) -> bool {
        let n = self.size();
        (0..n).all(|a| {
            let mut seen = vec![false; n];
            (0..n).all(|x| {
                let p = self.mul(a, x);
                !std::mem::replace(&mut seen[p], true)
            })
        })
    }

    /// True when every element has a two-sided inverse.
    pub fn is_group(&self) -> bool {
        let n = self.size();
        (0..n).all(|a| {
            (0..n).any(|b| self.mul(a, b) == self.identity && self.mul(b, a) == self.identity)
        })
    }

    /// The right Cayley graph of the submonoid reachable from the identity
    /// by the generator images: one vertex per reachable element, an edge
    /// `c -x-> c*x` for each alphabet letter. Start and end sit on the
    /// identity.
    pub fn cayley_graph(&self, alphabet: &[Label]) -> BirootedGraph {
        let mut ids: BTreeMap<usize, usize> = BTreeMap::new();
        let mut order: Vec<usize> = Vec::new();
        let mut queue = std::collections::VecDeque::new();
        ids.insert(self.identity, 0);
        order.push(self.identity);
        queue.push_back(self.identity);
        let mut edges = Vec::new();
        while let Some(c) = queue.pop_front() {
            for &l in alphabet {
                let img = self.generator(l).expect("alphabet covered by generators");
                let next = self.mul(c, img);
                let id = match ids.get(&next) {
                    Some(&id) => id,
                    None => {
                        let id = order.len();
                        ids.insert(next, id);
                        order.push(next);
                        queue.push_back(next);
                        id
                    }
                };
                edges.push((ids[&c], l, id));
            }
        }
        BirootedGraph::new(alphabet.to_vec(), order.len(), edges, 0, 0)
            .expect("cayley graph is reachable by construction")
    }
}

/// Oracle answering which words over the alphabet are identity words.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IdentityWordOracle {
    /// The free monoid on the alphabet: only the empty word.
    FreeMonoid,
    Finite(FiniteMonoid),
}

impl IdentityWordOracle {
    pub fn is_identity_word(&self, word: &[Label]) -> bool {
        match self {
            IdentityWordOracle::FreeMonoid => word.is_empty(),
            IdentityWordOracle::Finite(m) => m.eval_word(word) == Some(m.identity()),
        }
    }

    pub fn finite(&self) -> Option<&FiniteMonoid> {
        match self {
            IdentityWordOracle::FreeMonoid => None,
            IdentityWordOracle::Finite(m) => Some(m),
        }
    }

    /// Stable fingerprint used to keep graphs built over different value
    /// monoids apart.
    pub fn fingerprint(&self) -> u64 {
        match self {
            IdentityWordOracle::FreeMonoid => 0,
            IdentityWordOracle::Finite(m) => {
                let mut h = Fnv::new();
                h.write(&[1]);
                h.write_usize(m.size());
                h.write_usize(m.identity());
                for row in &m.table {
                    for &v in row {
                        h.write_usize(v);
                    }
                }
                for (l, &v) in &m.generators {
                    h.write(&[l.0 as u8]);
                    h.write_usize(v);
                }
                h.finish()
            }
        }
    }
}

/// FNV-1a, fixed keys, stable across runs and platforms.
struct Fnv(u64);

impl Fnv {
    fn new() -> Self {
        Fnv(0xcbf29ce484222325)
    }
    fn write(&mut self, bytes: &[u8]) {
        for &b in bytes {
            self.0 ^= b as u64;
            self.0 = self.0.wrapping_mul(0x100000001b3);
        }
    }
    fn write_usize(&mut self, v: usize) {
        self.write(&v.to_le_bytes());
    }
    fn finish(&self) -> u64 {
        self.0
    }
}
