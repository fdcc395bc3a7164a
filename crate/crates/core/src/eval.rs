//! Filtered link-prediction ranking and metrics.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt::{self, Write};
use core::str::FromStr;

use crate::error::{Error, Result};
use crate::graph::{Split, Triple, TripleStore, Vocabulary};
use crate::model::{score_all, Direction, EmbeddingTable, ModelVariant};
use crate::train::TrainConfig;

/// How candidates scoring exactly like the true entity are counted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TieBreak {
    /// Ties rank below the true entity.
    Optimistic,
    /// Ties rank above the true entity.
    Pessimistic,
    /// Half of the ties rank above.
    #[default]
    Average,
}

impl FromStr for TieBreak {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "optimistic" => Ok(TieBreak::Optimistic),
            "pessimistic" => Ok(TieBreak::Pessimistic),
            "average" => Ok(TieBreak::Average),
            _ => Err(Error::Unknown {
                what: "tie convention",
                value: s.to_string(),
            }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct EvalOptions {
    pub ties: TieBreak,
    /// Restrict candidates to entities seen in that slot of the relation
    /// during training (the true answer is always kept).
    pub type_constraints: bool,
}

/// Rank from the number of strictly better and exactly tied competitors.
pub fn rank_from_counts(higher: usize, ties: usize, convention: TieBreak) -> f64 {
    let base = 1.0 + higher as f64;
    match convention {
        TieBreak::Optimistic => base,
        TieBreak::Pessimistic => base + ties as f64,
        TieBreak::Average => base + ties as f64 / 2.0,
    }
}

/// The relation, fixed entity and direction actually scored for a query.
///
/// With reciprocal relations, `(?, r, t)` is answered as `(t, r⁻¹, ?)`.
fn scored_query(store: &TripleStore, triple: Triple, direction: Direction) -> (u32, u32, Direction) {
    match direction {
        Direction::Tail => (triple.head, triple.relation, Direction::Tail),
        Direction::Head => match store.reciprocal_of(triple.relation) {
            Some(inverse) => (triple.tail, inverse, Direction::Tail),
            None => (triple.tail, triple.relation, Direction::Head),
        },
    }
}

/// Filtered rank of the true entity for one query.
pub fn filtered_rank(
    table: &EmbeddingTable,
    store: &TripleStore,
    triple: Triple,
    direction: Direction,
    options: EvalOptions,
) -> Result<f64> {
    table.check_triple(triple)?;
    let (fixed, relation, scored_direction) = scored_query(store, triple, direction);
    let scores = score_all(table, fixed, relation, scored_direction)?;
    let (answer, known) = match direction {
        Direction::Tail => (triple.tail, store.filter().known_tails(triple.head, triple.relation)),
        Direction::Head => (triple.head, store.filter().known_heads(triple.relation, triple.tail)),
    };
    let target = scores[answer as usize];
    if !target.is_finite() {
        return Err(Error::NonFiniteScore { triple, score: target });
    }

    let mut higher = 0;
    let mut ties = 0;
    let mut visit = |c: u32| {
        if c == answer || known.binary_search(&c).is_ok() {
            return;
        }
        let s = scores[c as usize];
        if s > target {
            higher += 1;
        } else if s == target {
            ties += 1;
        }
    };
    if options.type_constraints {
        let tc = store.type_constraints();
        let pool = match direction {
            Direction::Tail => tc.tails(triple.relation),
            Direction::Head => tc.heads(triple.relation),
        };
        pool.iter().copied().for_each(&mut visit);
    } else {
        (0..table.num_entities() as u32).for_each(&mut visit);
    }
    Ok(rank_from_counts(higher, ties, options.ties))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QueryRecord {
    pub triple: Triple,
    pub direction: Direction,
    pub rank: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Metrics {
    pub queries: usize,
    pub mr: f64,
    pub mrr: f64,
    pub hits1: f64,
    pub hits3: f64,
    pub hits10: f64,
}

impl Metrics {
    pub fn from_ranks(ranks: impl IntoIterator<Item = f64>) -> Self {
        let mut m = Metrics::default();
        let (mut sum, mut recip, mut h1, mut h3, mut h10) = (0.0, 0.0, 0usize, 0usize, 0usize);
        for r in ranks {
            m.queries += 1;
            sum += r;
            recip += 1.0 / r;
            h1 += usize::from(r <= 1.0);
            h3 += usize::from(r <= 3.0);
            h10 += usize::from(r <= 10.0);
        }
        if m.queries > 0 {
            let n = m.queries as f64;
            m.mr = sum / n;
            m.mrr = recip / n;
            m.hits1 = h1 as f64 / n;
            m.hits3 = h3 as f64 / n;
            m.hits10 = h10 as f64 / n;
        }
        m
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankReport {
    pub records: Vec<QueryRecord>,
    pub metrics: Metrics,
    /// Keyed by the relation id of the evaluated triples.
    pub per_relation: BTreeMap<u32, Metrics>,
}

impl RankReport {
    pub fn from_records(records: Vec<QueryRecord>) -> Self {
        let metrics = Metrics::from_ranks(records.iter().map(|r| r.rank));
        let mut grouped: BTreeMap<u32, Vec<f64>> = BTreeMap::new();
        for r in &records {
            grouped.entry(r.triple.relation).or_default().push(r.rank);
        }
        let per_relation = grouped
            .into_iter()
            .map(|(rel, ranks)| (rel, Metrics::from_ranks(ranks)))
            .collect();
        Self {
            records,
            metrics,
            per_relation,
        }
    }

    pub fn mrr(&self) -> f64 {
        self.metrics.mrr
    }

    /// Line-oriented text block: a metrics header and row, then optionally a
    /// per-relation MRR section.
    pub fn render(&self, per_relation: bool, vocab: Option<&Vocabulary>) -> String {
        let m = &self.metrics;
        let mut out = String::new();
        let _ = writeln!(out, "queries\tMR\tMRR\tHits@10\tHits@3\tHits@1");
        let _ = writeln!(
            out,
            "{}\t{:.2}\t{:.6}\t{:.6}\t{:.6}\t{:.6}",
            m.queries, m.mr, m.mrr, m.hits10, m.hits3, m.hits1
        );
        if per_relation {
            let _ = writeln!(out, "relation\tqueries\tMRR");
            for (rel, rm) in &self.per_relation {
                let name = vocab.and_then(|v| v.relations.name(*rel));
                match name {
                    Some(name) => {
                        let _ = writeln!(out, "{name}\t{}\t{:.6}", rm.queries, rm.mrr);
                    }
                    None => {
                        let _ = writeln!(out, "{rel}\t{}\t{:.6}", rm.queries, rm.mrr);
                    }
                }
            }
        }
        out
    }
}

impl fmt::Display for RankReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(false, None))
    }
}

/// Tail query then head query, for each triple in order.
pub fn queries_of(triples: &[Triple]) -> impl Iterator<Item = (Triple, Direction)> + '_ {
    triples
        .iter()
        .flat_map(|&t| [(t, Direction::Tail), (t, Direction::Head)])
}

/// Filtered ranks of both queries for every triple of a split.
pub fn evaluate(table: &EmbeddingTable, store: &TripleStore, split: Split, options: EvalOptions) -> Result<RankReport> {
    let triples = store.split(split);
    if triples.is_empty() {
        return Err(Error::EmptySplit(split));
    }
    let records = queries_of(triples)
        .map(|(triple, direction)| {
            filtered_rank(table, store, triple, direction, options).map(|rank| QueryRecord {
                triple,
                direction,
                rank,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RankReport::from_records(records))
}

/// Free parameters of a model: `(N + M_eff) · k · units`, where `M_eff`
/// doubles under reciprocal learning and again under dual rotation.
pub fn parameter_count_for(
    num_entities: usize,
    num_relations: usize,
    dim: usize,
    variant: ModelVariant,
    reciprocal: bool,
) -> u64 {
    let mut relations = num_relations as u64;
    if reciprocal {
        relations *= 2;
    }
    if variant.has_tail_rotation() {
        relations *= 2;
    }
    (num_entities as u64 + relations) * dim as u64 * variant.kind().units() as u64
}

/// Parameter count for a vocabulary (before reciprocal augmentation) and a
/// training configuration.
pub fn parameter_count(vocab: &Vocabulary, config: &TrainConfig) -> u64 {
    parameter_count_for(
        vocab.num_entities(),
        vocab.num_relations(),
        config.dim,
        config.variant,
        config.reciprocal,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{EmbeddingMatrix, ModelVariant};
    use alloc::vec;

    /// DistMult table with scalar entity values and unit relations, so the
    /// score of `(h, r, t)` is `x_h * x_t`.
    fn scalar_table(values: &[f64], relations: usize) -> EmbeddingTable {
        let n = values.len();
        let ents = EmbeddingMatrix::from_parts(n, 1, vec![values.to_vec(), vec![0.0; n], vec![0.0; n], vec![0.0; n]]).unwrap();
        let rels = EmbeddingMatrix::from_parts(
            relations,
            1,
            vec![vec![1.0; relations], vec![0.0; relations], vec![0.0; relations], vec![0.0; relations]],
        )
        .unwrap();
        EmbeddingTable::from_matrices(ModelVariant::DistMultDegenerate, ents, rels, None).unwrap()
    }

    #[test]
    fn best_scoring_answer_ranks_first() {
        let table = scalar_table(&[1.0, 3.0, 1.0, 2.0], 1);
        let store = TripleStore::new(4, 1, vec![Triple::new(0, 0, 1)], vec![], vec![Triple::new(0, 0, 1)]).unwrap();
        let r = filtered_rank(&table, &store, Triple::new(0, 0, 1), Direction::Tail, EvalOptions::default()).unwrap();
        assert_eq!(r, 1.0);
    }

    #[test]
    fn two_better_competitors_give_rank_three() {
        // head 0 has x = 1; candidates 1 (true, 5.0), 2 and 3 (7.0 each)
        let table = scalar_table(&[1.0, 5.0, 7.0, 7.0], 1);
        let store = TripleStore::new(4, 1, vec![], vec![], vec![Triple::new(0, 0, 1)]).unwrap();
        let opts = EvalOptions {
            type_constraints: false,
            ties: TieBreak::Average,
        };
        let scores = crate::model::score_candidates(&table, 0, 0, Direction::Tail, &[1, 2, 3]).unwrap();
        assert_eq!(scores, vec![5.0, 7.0, 7.0]);
        // entity 0 itself scores 1.0 and is ranked below.
        let r = filtered_rank(&table, &store, Triple::new(0, 0, 1), Direction::Tail, opts).unwrap();
        assert_eq!(r, 3.0);
    }

    #[test]
    fn observed_competitor_is_filtered() {
        let table = scalar_table(&[1.0, 5.0, 7.0], 1);
        let store = TripleStore::new(3, 1, vec![Triple::new(0, 0, 2)], vec![], vec![Triple::new(0, 0, 1)]).unwrap();
        let r = filtered_rank(&table, &store, Triple::new(0, 0, 1), Direction::Tail, EvalOptions::default()).unwrap();
        assert_eq!(r, 1.0);
    }

    #[test]
    fn tie_conventions() {
        let table = scalar_table(&[1.0, 5.0, 5.0, 5.0, 9.0], 1);
        let store = TripleStore::new(5, 1, vec![], vec![], vec![Triple::new(0, 0, 1)]).unwrap();
        let rank = |ties| {
            filtered_rank(
                &table,
                &store,
                Triple::new(0, 0, 1),
                Direction::Tail,
                EvalOptions { ties, type_constraints: false },
            )
            .unwrap()
        };
        assert_eq!(rank(TieBreak::Optimistic), 2.0);
        assert_eq!(rank(TieBreak::Pessimistic), 4.0);
        assert_eq!(rank(TieBreak::Average), 3.0);
    }

    #[test]
    fn type_constraints_keep_the_answer() {
        // Entity 3 outranks everything but was never a tail of relation 0.
        let table = scalar_table(&[1.0, 5.0, 7.0, 9.0], 1);
        let store = TripleStore::new(
            4,
            1,
            vec![Triple::new(0, 0, 2)],
            vec![],
            vec![Triple::new(1, 0, 1)],
        )
        .unwrap();
        let opts = EvalOptions {
            type_constraints: true,
            ..Default::default()
        };
        // candidates {2} ∪ {1}: 2 is a competitor with 5*7 > 5*5
        let r = filtered_rank(&table, &store, Triple::new(1, 0, 1), Direction::Tail, opts).unwrap();
        assert_eq!(r, 2.0);
        let r = filtered_rank(&table, &store, Triple::new(1, 0, 1), Direction::Tail, EvalOptions::default()).unwrap();
        assert_eq!(r, 3.0);
    }

    #[test]
    fn perfect_model_report() {
        // A self-loop on the largest entity is optimal in both directions.
        let table = scalar_table(&[2.0, 1.0, -1.0], 1);
        let store = TripleStore::new(3, 1, vec![], vec![], vec![Triple::new(0, 0, 0)]).unwrap();
        let rep = evaluate(&table, &store, Split::Test, EvalOptions::default()).unwrap();
        assert_eq!(rep.metrics.queries, 2);
        assert_eq!(rep.metrics.mr, 1.0);
        assert_eq!(rep.metrics.mrr, 1.0);
        assert_eq!((rep.metrics.hits1, rep.metrics.hits3, rep.metrics.hits10), (1.0, 1.0, 1.0));
        assert_eq!(rep.per_relation.len(), 1);
        assert!(evaluate(&table, &store, Split::Valid, EvalOptions::default()).is_err());
    }

    #[test]
    fn rendered_block() {
        let rep = RankReport::from_records(vec![
            QueryRecord { triple: Triple::new(0, 0, 1), direction: Direction::Tail, rank: 1.0 },
            QueryRecord { triple: Triple::new(0, 0, 1), direction: Direction::Head, rank: 4.0 },
        ]);
        let text = rep.render(true, None);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "queries\tMR\tMRR\tHits@10\tHits@3\tHits@1");
        assert_eq!(lines[1], "2\t2.50\t0.625000\t1.000000\t0.500000\t0.500000");
        assert_eq!(lines[3], "0\t2\t0.625000");
    }

    #[test]
    fn parameter_counts() {
        assert_eq!(parameter_count_for(40943, 11, 100, ModelVariant::QuatE, false), 16_381_600);
        assert_eq!(parameter_count_for(40943, 18, 300, ModelVariant::QuatE, false), 49_153_200);
        assert_eq!(parameter_count_for(1, 1, 1, ModelVariant::QuatE, false), 8);
        assert_eq!(parameter_count_for(1, 1, 1, ModelVariant::OctonionE, false), 16);
        assert_eq!(parameter_count_for(1, 1, 1, ModelVariant::QuatE, true), 12);
        assert_eq!(parameter_count_for(1, 1, 1, ModelVariant::DualRotation, false), 12);
        assert_eq!(parameter_count_for(0, 0, 100, ModelVariant::QuatE, false), 0);
    }
}
