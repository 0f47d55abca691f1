//! Seeded random trees and terms for randomized checks.

use crate::graphs::{BirootedGraph, Label};
use crate::terms::{Term, XTree};
use rand::Rng;

/// A uniform-ish random tree with up to `max_edges` edges: each new vertex
/// hangs under a random earlier one with a random label, and the end is a
/// random vertex. Deterministic for a fixed generator state.
pub fn random_tree(rng: &mut impl Rng, max_edges: usize, alphabet: &[Label]) -> XTree {
    let n = rng.gen_range(0..=max_edges) + 1;
    let mut edges = Vec::new();
    for v in 1..n {
        let parent = rng.gen_range(0..v);
        let l = alphabet[rng.gen_range(0..alphabet.len())];
        edges.push((parent, l, v));
    }
    let end = rng.gen_range(0..n);
    let g = BirootedGraph::new(alphabet.to_vec(), n, edges, 0, end)
        .expect("parents precede children, so everything is reachable");
    XTree::new(g).expect("one parent per vertex")
}

/// A random term with at most `max_letters` generator occurrences.
pub fn random_term(rng: &mut impl Rng, max_letters: usize, alphabet: &[Label]) -> Term {
    if max_letters == 0 {
        return Term::Identity;
    }
    match rng.gen_range(0u8..8) {
        0 => Term::Identity,
        1..=4 => {
            let l = alphabet[rng.gen_range(0..alphabet.len())];
            Term::prod([Term::Gen(l), random_term(rng, max_letters - 1, alphabet)])
        }
        5 | 6 => {
            let split = rng.gen_range(0..=max_letters);
            Term::prod([
                random_term(rng, split, alphabet),
                random_term(rng, max_letters - split, alphabet),
            ])
        }
        _ => Term::plus(random_term(rng, max_letters, alphabet)),
    }
}
