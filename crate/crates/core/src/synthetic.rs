//! Small generated graphs with known relation patterns.

use alloc::format;
use alloc::vec::Vec;

use rand::seq::SliceRandom;

use crate::graph::{Triple, TripleStore, Vocabulary};
use crate::train::seeded_rng;

/// Relation ids of [`pattern_graph`].
pub const SYMMETRIC: u32 = 0;
pub const ANTISYMMETRIC: u32 = 1;
pub const FORWARD: u32 = 2;
pub const INVERSE: u32 = 3;

/// A graph over `num_entities` (even, at least 4) entities with four
/// relations:
///
/// * `SYMMETRIC` pairs the entities into couples, both directions present;
/// * `ANTISYMMETRIC` links each entity to its successor on a random cycle;
/// * `FORWARD` has the same pairs as `ANTISYMMETRIC`;
/// * `INVERSE` holds every `FORWARD` pair reversed.
///
/// About `holdout` of all triples go to the test split. A triple is only held
/// out while a pattern partner that implies it stays in train (its mirror for
/// the symmetric relation, the equal or reversed pair otherwise), so every
/// test triple is inferable from the patterns.
pub fn pattern_graph(num_entities: usize, holdout: f64, seed: u64) -> (Vocabulary, TripleStore) {
    assert!(num_entities >= 4 && num_entities % 2 == 0, "need an even entity count >= 4");
    let mut rng = seeded_rng(seed);
    let mut vocab = Vocabulary::default();
    for e in 0..num_entities {
        vocab.entities.intern(&format!("e{e}"));
    }
    for name in ["spouse_of", "precedes", "leads_to", "follows"] {
        vocab.relations.intern(name);
    }

    let mut perm: Vec<u32> = (0..num_entities as u32).collect();
    perm.shuffle(&mut rng);
    let mut triples = Vec::new();
    for pair in perm.chunks_exact(2) {
        triples.push(Triple::new(pair[0], SYMMETRIC, pair[1]));
        triples.push(Triple::new(pair[1], SYMMETRIC, pair[0]));
    }
    perm.shuffle(&mut rng);
    for i in 0..num_entities {
        let (x, y) = (perm[i], perm[(i + 1) % num_entities]);
        triples.push(Triple::new(x, ANTISYMMETRIC, y));
        triples.push(Triple::new(x, FORWARD, y));
        triples.push(Triple::new(y, INVERSE, x));
    }

    let target = libm::round(holdout * triples.len() as f64) as usize;
    let mut order: Vec<usize> = (0..triples.len()).collect();
    order.shuffle(&mut rng);
    let mut held = alloc::vec![false; triples.len()];
    let index_of = |t: Triple| triples.iter().position(|&u| u == t).unwrap();
    let mut taken = 0;
    for i in order {
        if taken == target {
            break;
        }
        let t = triples[i];
        let partners: Vec<Triple> = match t.relation {
            SYMMETRIC => alloc::vec![Triple::new(t.tail, SYMMETRIC, t.head)],
            ANTISYMMETRIC => alloc::vec![Triple::new(t.head, FORWARD, t.tail), Triple::new(t.tail, INVERSE, t.head)],
            FORWARD => alloc::vec![Triple::new(t.tail, INVERSE, t.head), Triple::new(t.head, ANTISYMMETRIC, t.tail)],
            _ => alloc::vec![Triple::new(t.tail, FORWARD, t.head), Triple::new(t.tail, ANTISYMMETRIC, t.head)],
        };
        if partners.iter().all(|&p| held[index_of(p)]) {
            continue;
        }
        held[i] = true;
        taken += 1;
    }
    let (mut train, mut test) = (Vec::new(), Vec::new());
    for (t, h) in triples.into_iter().zip(held) {
        if h {
            test.push(t);
        } else {
            train.push(t);
        }
    }
    let store = TripleStore::new(num_entities, 4, train, Vec::new(), test).expect("ids are in range");
    (vocab, store)
}
