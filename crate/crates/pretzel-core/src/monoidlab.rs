//! Enumeration of finite monoids of normal forms, their operation tables,
//! and verification of the left-adequacy axioms, the derived identities,
//! and the defining relations.
//!
//! [`enumerate`] closes {identity} ∪ {generators} under the binary product
//! and the unary plus, deduplicating by canonical code, and freezes the
//! result into index tables. Every verifier below then works purely on the
//! tables, so failures pinpoint table entries rather than graphs.

use crate::cancellative::FiniteMonoid;
use crate::cancellative::IdentityWordOracle;
use crate::graphs::Label;
use crate::pretzel::{
    multiply as pretzel_multiply, plus as pretzel_plus, pretzel_of_tree, Pretzel, PretzelError,
};
use crate::terms::{parse_term, term_to_tree, Term, TermError};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

/// Default ceiling on the number of enumerated elements.
pub const DEFAULT_CAP: usize = 10_000;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EnumerateError {
    /// The closure grew past the cap; enumeration stopped with the listed
    /// partial element set (the monoid may be infinite).
    #[error("enumeration stopped at the cap of {cap} elements")]
    CapExceeded { cap: usize, partial: Vec<Pretzel> },
    #[error(transparent)]
    Pretzel(#[from] PretzelError),
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TableError {
    #[error("table parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Pretzel(#[from] PretzelError),
    #[error(transparent)]
    Term(#[from] TermError),
}

/// A finite monoid of normal forms with frozen operation tables. Index 0
/// is the identity; `mul` and `plus` are total and closed.
#[derive(Debug, Clone, PartialEq)]
pub struct EnumeratedMonoid {
    elements: Vec<Pretzel>,
    /// A shortest-discovered term evaluating to each element.
    reps: Vec<Term>,
    mul: Vec<Vec<usize>>,
    plus: Vec<usize>,
    generators: BTreeMap<Label, usize>,
}

impl EnumeratedMonoid {
    pub fn size(&self) -> usize {
        self.elements.len()
    }

    pub fn identity(&self) -> usize {
        0
    }

    pub fn element(&self, i: usize) -> &Pretzel {
        &self.elements[i]
    }

    pub fn elements(&self) -> &[Pretzel] {
        &self.elements
    }

    pub fn rep(&self, i: usize) -> &Term {
        &self.reps[i]
    }

    pub fn mul(&self, i: usize, j: usize) -> usize {
        self.mul[i][j]
    }

    pub fn plus_of(&self, i: usize) -> usize {
        self.plus[i]
    }

    pub fn generators(&self) -> &BTreeMap<Label, usize> {
        &self.generators
    }

    pub fn is_idempotent(&self, i: usize) -> bool {
        self.mul[i][i] == i
    }

    pub fn idempotents(&self) -> Vec<usize> {
        (0..self.size()).filter(|&i| self.is_idempotent(i)).collect()
    }

    /// Index of an already enumerated normal form, if present.
    pub fn find(&self, p: &Pretzel) -> Option<usize> {
        self.elements.iter().position(|e| e == p)
    }

    /// The element a word over the generators evaluates to; `None` when a
    /// letter is not a generator.
    pub fn word_class(&self, w: &[Label]) -> Option<usize> {
        let mut acc = 0;
        for l in w {
            acc = self.mul[acc][*self.generators.get(l)?];
        }
        Some(acc)
    }

    /// Exact test of the starred right-cancellation relation: `a` and `b`
    /// are related when every pair of left factors agrees on `a` exactly
    /// when it agrees on `b`.
    pub fn rstar(&self, a: usize, b: usize) -> bool {
        let n = self.size();
        for x in 0..n {
            for y in 0..n {
                if (self.mul[x][a] == self.mul[y][a]) != (self.mul[x][b] == self.mul[y][b]) {
                    return false;
                }
            }
        }
        true
    }
}

/// Closes {identity} ∪ {generator normal forms} under product and plus,
/// breadth-first, deduplicating by canonical code. Stops with
/// [`EnumerateError::CapExceeded`] as soon as a `cap+1`-th element appears.
pub fn enumerate(
    oracle: &IdentityWordOracle,
    alphabet: &[Label],
    cap: usize,
) -> Result<EnumeratedMonoid, EnumerateError> {
    assert!(cap >= 1, "the cap must admit at least the identity");
    let mut elements: Vec<Pretzel> = Vec::new();
    let mut reps: Vec<Term> = Vec::new();
    let mut index: HashMap<crate::graphs::CanonicalCode, usize> = HashMap::new();
    let intern = |p: Pretzel,
                      rep: Term,
                      elements: &mut Vec<Pretzel>,
                      reps: &mut Vec<Term>,
                      index: &mut HashMap<crate::graphs::CanonicalCode, usize>|
     -> Result<usize, EnumerateError> {
        if let Some(&i) = index.get(p.code()) {
            return Ok(i);
        }
        if elements.len() == cap {
            return Err(EnumerateError::CapExceeded {
                cap,
                partial: elements.clone(),
            });
        }
        let i = elements.len();
        index.insert(p.code().clone(), i);
        elements.push(p);
        reps.push(rep);
        Ok(i)
    };

    let unfold = |t: &Term| term_to_tree(t, alphabet).map_err(PretzelError::from);
    let identity = pretzel_of_tree(&unfold(&Term::Identity)?, oracle)?;
    intern(identity, Term::Identity, &mut elements, &mut reps, &mut index)?;
    let mut generators = BTreeMap::new();
    for &l in alphabet {
        let p = pretzel_of_tree(&unfold(&Term::Gen(l))?, oracle)?;
        let i = intern(p, Term::Gen(l), &mut elements, &mut reps, &mut index)?;
        generators.insert(l, i);
    }

    let mut plus_of: Vec<Option<usize>> = Vec::new();
    let mut products: HashMap<(usize, usize), usize> = HashMap::new();
    loop {
        let len = elements.len();
        plus_of.resize(len, None);
        let mut grew = false;
        for i in 0..len {
            if plus_of[i].is_none() {
                let p = pretzel_plus(&elements[i])?;
                let rep = Term::plus(reps[i].clone());
                let j = intern(p, rep, &mut elements, &mut reps, &mut index)?;
                plus_of[i] = Some(j);
                grew |= j >= len;
            }
        }
        for i in 0..len {
            for j in 0..len {
                if products.contains_key(&(i, j)) {
                    continue;
                }
                let p = pretzel_multiply(&elements[i], &elements[j])?;
                let rep = Term::Prod(Box::new(reps[i].clone()), Box::new(reps[j].clone()));
                let k = intern(p, rep, &mut elements, &mut reps, &mut index)?;
                products.insert((i, j), k);
                grew |= k >= len;
            }
        }
        if !grew {
            break;
        }
    }

    let n = elements.len();
    let mul = (0..n)
        .map(|i| (0..n).map(|j| products[&(i, j)]).collect())
        .collect();
    let plus = (0..n).map(|i| plus_of[i].unwrap()).collect();
    Ok(EnumeratedMonoid {
        elements,
        reps,
        mul,
        plus,
        generators,
    })
}

/// One verified statement: `failure` carries the witnessing element
/// indices and a rendered explanation, `None` means the statement held
/// everywhere it was instantiated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckResult {
    pub name: &'static str,
    pub failure: Option<(Vec<usize>, String)>,
}

impl CheckResult {
    fn pass(name: &'static str) -> Self {
        CheckResult {
            name,
            failure: None,
        }
    }

    fn fail(name: &'static str, tuple: Vec<usize>, detail: String) -> Self {
        CheckResult {
            name,
            failure: Some((tuple, detail)),
        }
    }

    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }
}

/// A structural property probed beyond the axioms; `witness` explains a
/// negative result.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PropertyFinding {
    pub holds: bool,
    pub witness: Option<(Vec<usize>, String)>,
}

/// Axiom-by-axiom verdict of [`verify_left_adequate`]. The `inverse` and
/// `left_ample` findings are informational extras, not pass/fail criteria:
/// they apply interpreted textbook definitions (inverse = every element
/// regular and idempotents commute; left ample = ae = (ae)⁺a for every
/// element a and idempotent e).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdequacyReport {
    pub checks: Vec<CheckResult>,
    pub inverse: PropertyFinding,
    pub left_ample: PropertyFinding,
}

impl AdequacyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(CheckResult::passed)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            match &c.failure {
                None => writeln!(out, "  pass  {}", c.name).unwrap(),
                Some((tuple, detail)) => {
                    writeln!(out, "  FAIL  {} at {:?}: {}", c.name, tuple, detail).unwrap()
                }
            }
        }
        writeln!(
            out,
            "  note  extras below use interpreted definitions (inverse = regular with commuting idempotents; left ample = ae equals (ae)+a for all a and idempotent e)"
        )
        .unwrap();
        for (name, f) in [("inverse", &self.inverse), ("left ample", &self.left_ample)] {
            match (&f.holds, &f.witness) {
                (true, _) => writeln!(out, "  info  {name}: yes").unwrap(),
                (false, Some((tuple, detail))) => {
                    writeln!(out, "  info  {name}: no, witness {:?}: {}", tuple, detail).unwrap()
                }
                (false, None) => writeln!(out, "  info  {name}: no").unwrap(),
            }
        }
        out
    }
}

fn show(m: &EnumeratedMonoid, i: usize) -> String {
    format!("[{}]={}", i, m.rep(i))
}

/// Verifies the defining axioms of a left adequate monoid directly on the
/// tables: commuting idempotents, the starred right-cancellation relation
/// computed exactly from its definition with one idempotent per class,
/// plus landing on that idempotent, and the five quasi-identities.
pub fn verify_left_adequate(m: &EnumeratedMonoid) -> AdequacyReport {
    let n = m.size();
    let mut checks = Vec::new();
    let idems = m.idempotents();

    checks.push('commute: {
        for &e in &idems {
            for &f in &idems {
                if m.mul(e, f) != m.mul(f, e) {
                    break 'commute CheckResult::fail(
                        "idempotents commute",
                        vec![e, f],
                        format!("{} and {} do not commute", show(m, e), show(m, f)),
                    );
                }
            }
        }
        CheckResult::pass("idempotents commute")
    });

    // The starred relation, computed exactly over all pairs.
    let mut class_of = vec![0usize; n];
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for a in 0..n {
        match (0..a).find(|&b| m.rstar(a, b)) {
            Some(b) => {
                class_of[a] = class_of[b];
                classes[class_of[b]].push(a);
            }
            None => {
                class_of[a] = classes.len();
                classes.push(vec![a]);
            }
        }
    }
    checks.push('unique: {
        for class in &classes {
            let in_class: Vec<usize> = class
                .iter()
                .copied()
                .filter(|&e| m.is_idempotent(e))
                .collect();
            if in_class.len() != 1 {
                break 'unique CheckResult::fail(
                    "one idempotent per starred class",
                    class.clone(),
                    format!("class has {} idempotents", in_class.len()),
                );
            }
        }
        CheckResult::pass("one idempotent per starred class")
    });
    checks.push('landing: {
        for a in 0..n {
            let p = m.plus_of(a);
            if !m.is_idempotent(p) || class_of[p] != class_of[a] {
                break 'landing CheckResult::fail(
                    "plus is the class idempotent",
                    vec![a, p],
                    format!("plus of {} is {}, outside its class", show(m, a), show(m, p)),
                );
            }
        }
        CheckResult::pass("plus is the class idempotent")
    });

    checks.push('plusact: {
        for a in 0..n {
            if m.mul(m.plus_of(a), a) != a {
                break 'plusact CheckResult::fail(
                    "x+ x = x",
                    vec![a],
                    format!("fails at {}", show(m, a)),
                );
            }
        }
        CheckResult::pass("x+ x = x")
    });
    checks.push('pluscomm: {
        for a in 0..n {
            for b in 0..n {
                let (pa, pb) = (m.plus_of(a), m.plus_of(b));
                let ab = m.mul(pa, pb);
                if m.plus_of(ab) != ab || ab != m.mul(pb, pa) {
                    break 'pluscomm CheckResult::fail(
                        "(x+ y+)+ = x+ y+ = y+ x+",
                        vec![a, b],
                        format!("fails at {}, {}", show(m, a), show(m, b)),
                    );
                }
            }
        }
        CheckResult::pass("(x+ y+)+ = x+ y+ = y+ x+")
    });
    checks.push('plusabs: {
        for a in 0..n {
            for b in 0..n {
                if m.plus_of(m.mul(a, b)) != m.plus_of(m.mul(a, m.plus_of(b))) {
                    break 'plusabs CheckResult::fail(
                        "(x y)+ = (x y+)+",
                        vec![a, b],
                        format!("fails at {}, {}", show(m, a), show(m, b)),
                    );
                }
            }
        }
        CheckResult::pass("(x y)+ = (x y+)+")
    });
    checks.push('idemplus: {
        for a in 0..n {
            if m.mul(a, a) == a && m.plus_of(a) != a {
                break 'idemplus CheckResult::fail(
                    "x^2 = x implies x = x+",
                    vec![a],
                    format!("{} is idempotent but differs from its plus", show(m, a)),
                );
            }
        }
        CheckResult::pass("x^2 = x implies x = x+")
    });
    checks.push('rightcancel: {
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    if m.mul(x, y) == m.mul(z, y)
                        && m.mul(x, m.plus_of(y)) != m.mul(z, m.plus_of(y))
                    {
                        break 'rightcancel CheckResult::fail(
                            "x y = z y implies x y+ = z y+",
                            vec![x, y, z],
                            format!(
                                "fails at {}, {}, {}",
                                show(m, x),
                                show(m, y),
                                show(m, z)
                            ),
                        );
                    }
                }
            }
        }
        CheckResult::pass("x y = z y implies x y+ = z y+")
    });

    // Extras, by interpreted definitions (see the report type docs).
    let idems_commute = checks[0].passed();
    let inverse = 'inv: {
        for a in 0..n {
            if !(0..n).any(|b| m.mul(m.mul(a, b), a) == a) {
                break 'inv PropertyFinding {
                    holds: false,
                    witness: Some((
                        vec![a],
                        format!("{} is not regular (no b with a b a = a)", show(m, a)),
                    )),
                };
            }
        }
        PropertyFinding {
            holds: idems_commute,
            witness: None,
        }
    };
    let left_ample = 'amp: {
        for a in 0..n {
            for &e in &idems {
                let ae = m.mul(a, e);
                if ae != m.mul(m.plus_of(ae), a) {
                    break 'amp PropertyFinding {
                        holds: false,
                        witness: Some((
                            vec![a, e],
                            format!(
                                "a e differs from (a e)+ a at a = {}, e = {}",
                                show(m, a),
                                show(m, e)
                            ),
                        )),
                    };
                }
            }
        }
        PropertyFinding {
            holds: true,
            witness: None,
        }
    };

    AdequacyReport {
        checks,
        inverse,
        left_ample,
    }
}

/// Verdict list of [`verify_identities`] / [`verify_relations`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdentityReport {
    pub checks: Vec<CheckResult>,
}

impl IdentityReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(CheckResult::passed)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            match &c.failure {
                None => writeln!(out, "  pass  {}", c.name).unwrap(),
                Some((tuple, detail)) => {
                    writeln!(out, "  FAIL  {} at {:?}: {}", c.name, tuple, detail).unwrap()
                }
            }
        }
        out
    }
}

/// Verifies the derived identities on the tables: the unary-plus laws that
/// hold unconditionally, the laws conditional on an idempotent product,
/// and the expansion of interleaved plus-factors along a product of up to
/// four factors (randomized instantiation, seeded).
pub fn verify_identities(m: &EnumeratedMonoid, seed: u64) -> IdentityReport {
    let n = m.size();
    let mut checks = Vec::new();

    checks.push('idplus: {
        for &e in &m.idempotents() {
            if m.plus_of(e) != e {
                break 'idplus CheckResult::fail(
                    "e+ = e for idempotent e",
                    vec![e],
                    format!("fails at {}", show(m, e)),
                );
            }
        }
        CheckResult::pass("e+ = e for idempotent e")
    });
    checks.push('absorb: {
        for a in 0..n {
            for b in 0..n {
                if m.plus_of(m.mul(a, b)) != m.plus_of(m.mul(a, m.plus_of(b))) {
                    break 'absorb CheckResult::fail(
                        "(a b)+ = (a b+)+",
                        vec![a, b],
                        format!("fails at {}, {}", show(m, a), show(m, b)),
                    );
                }
            }
        }
        CheckResult::pass("(a b)+ = (a b+)+")
    });
    checks.push('act: {
        for a in 0..n {
            if m.mul(m.plus_of(a), a) != a {
                break 'act CheckResult::fail(
                    "a+ a = a",
                    vec![a],
                    format!("fails at {}", show(m, a)),
                );
            }
        }
        CheckResult::pass("a+ a = a")
    });
    checks.push('eplus: {
        for &e in &m.idempotents() {
            for a in 0..n {
                if m.mul(e, m.plus_of(a)) != m.plus_of(m.mul(e, a)) {
                    break 'eplus CheckResult::fail(
                        "e a+ = (e a)+ for idempotent e",
                        vec![e, a],
                        format!("fails at {}, {}", show(m, e), show(m, a)),
                    );
                }
            }
        }
        CheckResult::pass("e a+ = (e a)+ for idempotent e")
    });
    checks.push('prefix: {
        for a in 0..n {
            for b in 0..n {
                let ab = m.plus_of(m.mul(a, b));
                if m.mul(m.plus_of(a), ab) != ab {
                    break 'prefix CheckResult::fail(
                        "a+ (a b)+ = (a b)+",
                        vec![a, b],
                        format!("fails at {}, {}", show(m, a), show(m, b)),
                    );
                }
            }
        }
        CheckResult::pass("a+ (a b)+ = (a b)+")
    });

    // Laws conditional on x y being idempotent.
    checks.push('wrap: {
        for x in 0..n {
            for y in 0..n {
                let xy = m.mul(x, y);
                if !m.is_idempotent(xy) {
                    continue;
                }
                let yxyx = m.mul(m.mul(m.mul(y, x), y), x);
                if !m.is_idempotent(yxyx) {
                    break 'wrap CheckResult::fail(
                        "y x y x idempotent when x y is",
                        vec![x, y],
                        format!("fails at {}, {}", show(m, x), show(m, y)),
                    );
                }
            }
        }
        CheckResult::pass("y x y x idempotent when x y is")
    });
    checks.push('swap: {
        for x in 0..n {
            for y in 0..n {
                if !m.is_idempotent(m.mul(x, y)) {
                    continue;
                }
                if m.mul(x, m.plus_of(y)) != m.mul(m.mul(x, y), x) {
                    break 'swap CheckResult::fail(
                        "x y+ = x y x when x y idempotent",
                        vec![x, y],
                        format!("fails at {}, {}", show(m, x), show(m, y)),
                    );
                }
            }
        }
        CheckResult::pass("x y+ = x y x when x y idempotent")
    });
    checks.push('slide: {
        for x in 0..n {
            for y in 0..n {
                if !m.is_idempotent(m.mul(x, y)) {
                    continue;
                }
                for z in 0..n {
                    let lhs = m.mul(m.mul(x, m.plus_of(z)), y);
                    let rhs = m.mul(m.mul(x, y), m.plus_of(m.mul(x, z)));
                    if lhs != rhs || !m.is_idempotent(lhs) {
                        break 'slide CheckResult::fail(
                            "x z+ y = x y (x z)+ and idempotent, when x y idempotent",
                            vec![x, y, z],
                            format!(
                                "fails at {}, {}, {}",
                                show(m, x),
                                show(m, y),
                                show(m, z)
                            ),
                        );
                    }
                }
            }
        }
        CheckResult::pass("x z+ y = x y (x z)+ and idempotent, when x y idempotent")
    });

    // Interleaved plus-factors along an idempotent product of k factors:
    //   x1 u1+ x2 u2+ ... x_{k-1} u_{k-1}+ x_k
    //     = (x1..x_k)(x1 u1)+ (x1 x2 u2)+ ... (x1..x_{k-1} u_{k-1})+.
    // Instantiated over seeded random tuples, always including the
    // all-identity tuple so the hypothesis is hit at least once per k.
    let mut rng = StdRng::seed_from_u64(seed);
    checks.push('trunk: {
        for k in 2..=4usize {
            let mut tuples = vec![vec![0usize; 2 * k - 1]];
            for _ in 0..300 {
                tuples.push((0..2 * k - 1).map(|_| rng.gen_range(0..n)).collect());
            }
            for tuple in tuples {
                let xs = &tuple[..k];
                let us = &tuple[k..];
                let product = xs.iter().fold(0, |acc, &x| m.mul(acc, x));
                if !m.is_idempotent(product) {
                    continue;
                }
                let mut lhs = xs[0];
                for i in 0..k - 1 {
                    lhs = m.mul(lhs, m.plus_of(us[i]));
                    lhs = m.mul(lhs, xs[i + 1]);
                }
                let mut rhs = product;
                let mut prefix = 0;
                for i in 0..k - 1 {
                    prefix = m.mul(prefix, xs[i]);
                    rhs = m.mul(rhs, m.plus_of(m.mul(prefix, us[i])));
                }
                if lhs != rhs {
                    break 'trunk CheckResult::fail(
                        "interleaved plus-factors expand along idempotent products",
                        tuple.clone(),
                        format!("fails for factors {:?} with inserts {:?}", xs, us),
                    );
                }
            }
        }
        CheckResult::pass("interleaved plus-factors expand along idempotent products")
    });

    IdentityReport { checks }
}

/// Report of [`verify_relations`]: every word over the generators of
/// length ≤ the limit whose oracle value is the identity must name an
/// idempotent element (its class equals the class of its plus).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationsReport {
    pub words_checked: usize,
    pub identity_words: usize,
    /// Offending words with the element index they evaluate to.
    pub failures: Vec<(String, usize)>,
}

impl RelationsReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        writeln!(
            out,
            "  {} words checked, {} with identity value",
            self.words_checked, self.identity_words
        )
        .unwrap();
        if self.failures.is_empty() {
            writeln!(out, "  pass  w+ = w for every identity word").unwrap();
        } else {
            for (w, i) in &self.failures {
                writeln!(out, "  FAIL  word {w} names element {i} with w+ != w").unwrap();
            }
        }
        out
    }
}

/// Checks the defining relations: for every word `w` of length ≤ `max_len`
/// with `eval_word(c, w) = identity`, the element `[w]` satisfies
/// `[w]+ = [w]`.
pub fn verify_relations(
    m: &EnumeratedMonoid,
    c: &FiniteMonoid,
    max_len: usize,
) -> RelationsReport {
    let letters: Vec<Label> = m.generators.keys().copied().collect();
    let mut words: Vec<Vec<Label>> = vec![Vec::new()];
    let mut report = RelationsReport {
        words_checked: 0,
        identity_words: 0,
        failures: Vec::new(),
    };
    for len in 0..=max_len {
        let mut next = Vec::new();
        for w in &words {
            report.words_checked += 1;
            if c.eval_word(w) == Some(c.identity()) {
                report.identity_words += 1;
                let i = m.word_class(w).expect("letters are generators");
                if m.plus_of(i) != i {
                    report
                        .failures
                        .push((w.iter().map(|l| l.0).collect(), i));
                }
            }
            if len < max_len {
                for &l in &letters {
                    let mut w2 = w.clone();
                    w2.push(l);
                    next.push(w2);
                }
            }
        }
        words = next;
    }
    report
}

fn render_code(code: &crate::graphs::CanonicalCode) -> String {
    if code.0.is_empty() {
        return ".".to_string();
    }
    code.0
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join("-")
}

fn parse_code(s: &str, line: usize) -> Result<crate::graphs::CanonicalCode, TableError> {
    if s == "." {
        return Ok(crate::graphs::CanonicalCode(Vec::new()));
    }
    let mut vals = Vec::new();
    for part in s.split('-') {
        vals.push(part.parse::<u32>().map_err(|_| TableError::Parse {
            line,
            msg: format!("bad code component {part:?}"),
        })?);
    }
    Ok(crate::graphs::CanonicalCode(vals))
}

/// Deterministic text rendering: `elements: n`, one `i <code> <term>` line
/// per element, the `mul:` rows, and the `plus:` row.
pub fn export_table(m: &EnumeratedMonoid) -> String {
    let mut out = String::new();
    writeln!(out, "elements: {}", m.size()).unwrap();
    for i in 0..m.size() {
        writeln!(out, "{} {} {}", i, render_code(m.element(i).code()), m.rep(i)).unwrap();
    }
    writeln!(out, "mul:").unwrap();
    for row in &m.mul {
        let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        writeln!(out, "{}", cells.join(" ")).unwrap();
    }
    writeln!(out, "plus:").unwrap();
    let cells: Vec<String> = m.plus.iter().map(|v| v.to_string()).collect();
    writeln!(out, "{}", cells.join(" ")).unwrap();
    out
}

/// Parses the output of [`export_table`] back, rebuilding each element
/// from its representative term under the given oracle and checking that
/// the stored canonical codes match.
pub fn parse_table(
    src: &str,
    oracle: &IdentityWordOracle,
) -> Result<EnumeratedMonoid, TableError> {
    let err = |line: usize, msg: &str| TableError::Parse {
        line,
        msg: msg.to_string(),
    };
    let lines: Vec<(usize, &str)> = src
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty())
        .collect();
    let mut at = 0;
    let (line_no, header) = *lines.first().ok_or_else(|| err(1, "empty table"))?;
    let n: usize = header
        .strip_prefix("elements:")
        .ok_or_else(|| err(line_no, "expected `elements: n`"))?
        .trim()
        .parse()
        .map_err(|_| err(line_no, "bad element count"))?;
    at += 1;

    let mut raw: Vec<(usize, String, String)> = Vec::new();
    for i in 0..n {
        let (line_no, l) = *lines
            .get(at)
            .ok_or_else(|| err(line_no, "missing element line"))?;
        at += 1;
        let mut parts = l.splitn(3, char::is_whitespace);
        let idx: usize = parts
            .next()
            .and_then(|p| p.parse().ok())
            .ok_or_else(|| err(line_no, "bad element index"))?;
        if idx != i {
            return Err(err(line_no, "element lines out of order"));
        }
        let code = parts
            .next()
            .ok_or_else(|| err(line_no, "missing code"))?
            .to_string();
        let term = parts
            .next()
            .ok_or_else(|| err(line_no, "missing term"))?
            .trim()
            .to_string();
        raw.push((line_no, code, term));
    }

    // The alphabet is whatever letters the representative terms mention.
    let mut alphabet: Vec<Label> = raw
        .iter()
        .flat_map(|(_, _, t)| t.chars())
        .filter(|c| c.is_alphabetic())
        .map(Label)
        .collect();
    alphabet.sort();
    alphabet.dedup();

    let mut elements = Vec::new();
    let mut reps = Vec::new();
    let mut generators = BTreeMap::new();
    for (i, (line_no, code_str, term_str)) in raw.iter().enumerate() {
        let term = parse_term(term_str, &alphabet)?;
        let tree = term_to_tree(&term, &alphabet).map_err(PretzelError::from)?;
        let p = pretzel_of_tree(&tree, oracle)?;
        let code = parse_code(code_str, *line_no)?;
        if *p.code() != code {
            return Err(err(
                *line_no,
                "stored code disagrees with the term's normal form",
            ));
        }
        if let Term::Gen(l) = term {
            generators.insert(l, i);
        }
        elements.push(p);
        reps.push(term);
    }

    let read_row = |l: &str, line_no: usize| -> Result<Vec<usize>, TableError> {
        let row: Result<Vec<usize>, _> = l.split_whitespace().map(str::parse).collect();
        let row = row.map_err(|_| err(line_no, "bad table entry"))?;
        if row.len() != n || row.iter().any(|&v| v >= n) {
            return Err(err(line_no, "table row has the wrong shape"));
        }
        Ok(row)
    };
    let (line_no, l) = *lines.get(at).ok_or_else(|| err(line_no, "missing `mul:`"))?;
    if l != "mul:" {
        return Err(err(line_no, "expected `mul:`"));
    }
    at += 1;
    let mut mul = Vec::new();
    for _ in 0..n {
        let (line_no, l) = *lines
            .get(at)
            .ok_or_else(|| err(line_no, "missing mul row"))?;
        at += 1;
        mul.push(read_row(l, line_no)?);
    }
    let (line_no, l) = *lines
        .get(at)
        .ok_or_else(|| err(line_no, "missing `plus:`"))?;
    if l != "plus:" {
        return Err(err(line_no, "expected `plus:`"));
    }
    at += 1;
    let (line_no, l) = *lines
        .get(at)
        .ok_or_else(|| err(line_no, "missing plus row"))?;
    let plus = read_row(l, line_no)?;

    Ok(EnumeratedMonoid {
        elements,
        reps,
        mul,
        plus,
        generators,
    })
}

#[cfg(test)]
mod tests;
