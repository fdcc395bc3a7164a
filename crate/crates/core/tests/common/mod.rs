//! Reference implementations written independently of the library, used as
//! oracles by the integration tests.
#![allow(dead_code)]

use hyperkge_core::graph::{Triple, TripleStore};
use hyperkge_core::model::{score_triple, Direction, EmbeddingMatrix, EmbeddingTable, ModelVariant};
use hyperkge_core::TieBreak;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_quat(rng: &mut impl Rng) -> [f64; 4] {
    core::array::from_fn(|_| rng.gen_range(-2.0..2.0))
}

pub fn random_oct(rng: &mut impl Rng) -> [f64; 8] {
    core::array::from_fn(|_| rng.gen_range(-2.0..2.0))
}

/// `x * y` as the real 4x4 left-multiplication matrix of `x` applied to `y`.
pub fn quat_matrix_product(x: [f64; 4], y: [f64; 4]) -> [f64; 4] {
    let [a, b, c, d] = x;
    let m = [
        [a, -b, -c, -d],
        [b, a, -d, c],
        [c, d, a, -b],
        [d, -c, b, a],
    ];
    core::array::from_fn(|i| (0..4).map(|j| m[i][j] * y[j]).sum())
}

/// Octonion product written out term by term. Each component is identified
/// by its `x0 * y_n` term.
pub fn octonion_expanded(x: [f64; 8], y: [f64; 8]) -> [f64; 8] {
    let [x0, x1, x2, x3, x4, x5, x6, x7] = x;
    let [y0, y1, y2, y3, y4, y5, y6, y7] = y;
    [
        x0 * y0 - x1 * y1 - x2 * y2 - x3 * y3 - x4 * y4 - x5 * y5 - x6 * y6 - x7 * y7,
        x0 * y1 + x1 * y0 + x2 * y3 - x3 * y2 + x4 * y5 - x5 * y4 - x6 * y7 + x7 * y6,
        x0 * y2 - x1 * y3 + x2 * y0 + x3 * y1 + x4 * y6 + x5 * y7 - x6 * y4 - x7 * y5,
        x0 * y3 + x1 * y2 - x2 * y1 + x3 * y0 + x4 * y7 - x5 * y6 + x6 * y5 - x7 * y4,
        x0 * y4 - x1 * y5 - x2 * y6 - x3 * y7 + x4 * y0 + x5 * y1 + x6 * y2 + x7 * y3,
        x0 * y5 + x1 * y4 - x2 * y7 + x3 * y6 - x4 * y1 + x5 * y0 - x6 * y3 + x7 * y2,
        x0 * y6 + x1 * y7 + x2 * y4 - x3 * y5 - x4 * y2 + x5 * y3 + x6 * y0 - x7 * y1,
        x0 * y7 - x1 * y6 + x2 * y5 + x3 * y4 - x4 * y3 - x5 * y2 + x6 * y1 + x7 * y0,
    ]
}

/// `Re(<h, r, conj(t)>)` summed over dimensions, with `(re, im)` pairs.
pub fn complex_score(h: &[(f64, f64)], r: &[(f64, f64)], t: &[(f64, f64)]) -> f64 {
    h.iter()
        .zip(r)
        .zip(t)
        .map(|((&(hr, hi), &(rr, ri)), &(tr, ti))| hr * rr * tr + hi * rr * ti + hr * ri * ti - hi * ri * tr)
        .sum()
}

pub fn distmult_score(h: &[f64], r: &[f64], t: &[f64]) -> f64 {
    h.iter().zip(r).zip(t).map(|((a, b), c)| a * b * c).sum()
}

/// A table with every active coordinate drawn uniformly from `[-1, 1]`.
pub fn random_table(variant: ModelVariant, n: usize, m: usize, k: usize, seed: u64) -> EmbeddingTable {
    let mut rng = rng(seed);
    let units = variant.kind().units();
    let active = variant.active_units();
    let mut draw = |rows: usize| {
        let parts = (0..units)
            .map(|c| {
                (0..rows * k)
                    .map(|_| if c < active { rng.gen_range(-1.0..1.0) } else { 0.0 })
                    .collect()
            })
            .collect();
        EmbeddingMatrix::from_parts(rows, k, parts).unwrap()
    };
    let entities = draw(n);
    let relations = draw(m);
    let tails = variant.has_tail_rotation().then(|| draw(m));
    EmbeddingTable::from_matrices(variant, entities, relations, tails).unwrap()
}

/// Random triples over `n` entities and `m` relations.
pub fn random_triples(n: usize, m: usize, count: usize, rng: &mut impl Rng) -> Vec<Triple> {
    (0..count)
        .map(|_| {
            Triple::new(
                rng.gen_range(0..n as u32),
                rng.gen_range(0..m as u32),
                rng.gen_range(0..n as u32),
            )
        })
        .collect()
}

/// Filtered rank by scoring every candidate triple separately, filtering by a
/// linear scan over all splits, and locating the answer in a sorted list.
pub fn naive_rank(
    table: &EmbeddingTable,
    store: &TripleStore,
    triple: Triple,
    direction: Direction,
    ties: TieBreak,
    type_constraints: bool,
) -> f64 {
    let all: Vec<Triple> = store.train().iter().chain(store.valid()).chain(store.test()).copied().collect();
    let candidate = |c: u32| match direction {
        Direction::Tail => Triple::new(triple.head, triple.relation, c),
        Direction::Head => Triple::new(c, triple.relation, triple.tail),
    };
    let score = |t: Triple| match (direction, store.reciprocal_of(t.relation)) {
        (Direction::Head, Some(inv)) => score_triple(table, Triple::new(t.tail, inv, t.head)).unwrap(),
        _ => score_triple(table, t).unwrap(),
    };
    let answer = match direction {
        Direction::Tail => triple.tail,
        Direction::Head => triple.head,
    };
    let pool: Vec<u32> = (0..store.num_entities() as u32)
        .filter(|&c| {
            !type_constraints
                || c == answer
                || store.train().iter().any(|t| {
                    t.relation == triple.relation
                        && match direction {
                            Direction::Tail => t.tail == c,
                            Direction::Head => t.head == c,
                        }
                })
        })
        .filter(|&c| c == answer || !all.contains(&candidate(c)))
        .collect();
    let target = score(triple);
    let mut scores: Vec<f64> = pool.iter().map(|&c| score(candidate(c))).collect();
    scores.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let first = scores.iter().position(|&s| s == target).unwrap() + 1;
    let last = scores.iter().rposition(|&s| s == target).unwrap() + 1;
    match ties {
        TieBreak::Optimistic => first as f64,
        TieBreak::Pessimistic => last as f64,
        TieBreak::Average => (first + last) as f64 / 2.0,
    }
}
