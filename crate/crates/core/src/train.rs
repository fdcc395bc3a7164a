//! Logistic loss, regularisers, negative sampling, Adagrad and the epoch loop.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt::Write;
use core::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::eval::{evaluate, EvalOptions, RankReport};
use crate::graph::{Split, Triple, TripleStore};
use crate::model::{score_gradients, EmbeddingMatrix, EmbeddingTable, ModelVariant, Slot, SparseGrad};

/// The RNG used everywhere in training.
pub type TrainRng = ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> TrainRng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Sampler {
    #[default]
    Uniform,
    Bernoulli,
}

impl FromStr for Sampler {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(Sampler::Uniform),
            "bernoulli" => Ok(Sampler::Bernoulli),
            _ => Err(Error::Unknown {
                what: "sampler",
                value: s.to_string(),
            }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Initializer {
    /// Polar form: random phase, random scale, random unit imaginary axis.
    Polar,
    /// Every coordinate uniform in `[-1/sqrt(2k), 1/sqrt(2k)]`.
    Uniform,
}

impl FromStr for Initializer {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "polar" => Ok(Initializer::Polar),
            "uniform" => Ok(Initializer::Uniform),
            _ => Err(Error::Unknown {
                what: "initializer",
                value: s.to_string(),
            }),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub dim: usize,
    /// L2 rate on entity embeddings.
    pub lambda_entity: f64,
    /// L2 rate on relation embeddings (raw, before normalisation).
    pub lambda_relation: f64,
    /// N3 rate; 0 disables the term.
    pub n3_weight: f64,
    pub neg_per_pos: usize,
    pub lr: f64,
    pub epochs: usize,
    pub batch_count: usize,
    pub sampler: Sampler,
    pub variant: ModelVariant,
    pub reciprocal: bool,
    /// Draw corruptions from the relation's observed head/tail sets.
    pub type_constrained_sampling: bool,
    /// Reject corruptions that are observed triples.
    pub strict_negatives: bool,
    pub seed: u64,
    /// Epochs between validation evaluations; 0 disables evaluation.
    pub eval_every: usize,
    /// Stagnant evaluations before stopping; 0 never stops early.
    pub patience: usize,
    /// `None` picks the variant default.
    pub initializer: Option<Initializer>,
    pub eval: EvalOptions,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            dim: 100,
            lambda_entity: 0.1,
            lambda_relation: 0.1,
            n3_weight: 0.0,
            neg_per_pos: 1,
            lr: 0.1,
            epochs: 100,
            batch_count: 10,
            sampler: Sampler::Uniform,
            variant: ModelVariant::QuatE,
            reciprocal: false,
            type_constrained_sampling: false,
            strict_negatives: false,
            seed: 0,
            eval_every: 0,
            patience: 0,
            initializer: None,
            eval: EvalOptions::default(),
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |m: &str| Err(Error::InvalidConfig(m.to_string()));
        if self.dim == 0 {
            return fail("dimension must be at least 1");
        }
        if self.neg_per_pos == 0 {
            return fail("negatives per positive must be at least 1");
        }
        if !(self.lr > 0.0 && self.lr.is_finite()) {
            return fail("learning rate must be positive");
        }
        if self.batch_count == 0 {
            return fail("batch count must be at least 1");
        }
        for (name, v) in [
            ("lambda1", self.lambda_entity),
            ("lambda2", self.lambda_relation),
            ("n3", self.n3_weight),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::InvalidConfig(format!("{name} must be a finite non-negative rate")));
            }
        }
        Ok(())
    }

    pub fn initializer(&self) -> Initializer {
        self.initializer.unwrap_or(match self.variant {
            ModelVariant::OctonionE => Initializer::Uniform,
            _ => Initializer::Polar,
        })
    }
}

fn init_matrix(m: &mut EmbeddingMatrix, init: Initializer, active: usize, rng: &mut impl Rng) {
    let dim = m.dim();
    let scale = 1.0 / libm::sqrt(2.0 * dim as f64);
    let units = m.units();
    let mut element = vec![0.0; units];
    for row in 0..m.rows() {
        for d in 0..dim {
            match init {
                Initializer::Polar => {
                    let theta = rng.gen_range(-PI..=PI);
                    let magnitude = rng.gen_range(-scale..=scale);
                    let axis = random_imaginary_axis(units, rng);
                    element[0] = magnitude * libm::cos(theta);
                    let s = magnitude * libm::sin(theta);
                    for c in 1..units {
                        element[c] = s * axis[c];
                    }
                }
                Initializer::Uniform => {
                    for v in element.iter_mut() {
                        *v = rng.gen_range(-scale..=scale);
                    }
                }
            }
            for (c, &v) in element.iter().enumerate() {
                m.part_mut(c)[row * dim + d] = if c < active { v } else { 0.0 };
            }
        }
    }
}

/// A unit vector with zero real part.
fn random_imaginary_axis(units: usize, rng: &mut impl Rng) -> Vec<f64> {
    loop {
        let mut v = vec![0.0; units];
        for x in v.iter_mut().skip(1) {
            *x = rng.gen_range(-1.0..=1.0);
        }
        let norm = libm::sqrt(v.iter().map(|x| x * x).sum());
        if norm > 1e-6 {
            v.iter_mut().for_each(|x| *x /= norm);
            return v;
        }
    }
}

/// Fresh table for `config.variant`, drawn entities first, then relations,
/// then tail rotations.
pub fn init_embeddings(
    config: &TrainConfig,
    num_entities: usize,
    num_relations: usize,
    rng: &mut impl Rng,
) -> Result<EmbeddingTable> {
    let mut table = EmbeddingTable::zeros(config.variant, num_entities, num_relations, config.dim)?;
    let init = config.initializer();
    let active = config.variant.active_units();
    for slot in [Slot::Entity, Slot::Relation, Slot::TailRotation] {
        if let Some(m) = table.matrix_mut(slot) {
            init_matrix(m, init, active, rng);
        }
    }
    Ok(table)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LabeledTriple {
    pub triple: Triple,
    /// `+1` for observed triples, `-1` for corruptions.
    pub label: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct NegativeBatch {
    /// Each positive followed by its corruptions.
    pub items: Vec<LabeledTriple>,
}

impl NegativeBatch {
    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn positives(&self) -> impl Iterator<Item = Triple> + '_ {
        self.items.iter().filter(|i| i.label > 0.0).map(|i| i.triple)
    }

    pub fn negatives(&self) -> impl Iterator<Item = Triple> + '_ {
        self.items.iter().filter(|i| i.label < 0.0).map(|i| i.triple)
    }
}

/// Attempts before strict mode gives up and keeps a colliding corruption.
const STRICT_RETRIES: usize = 64;

/// Corrupts positives by replacing their head or tail.
///
/// Replacement entities are drawn uniformly (from all entities, or from the
/// relation's observed head/tail set under type-constrained sampling) and may
/// coincide with the original.
pub struct NegativeSampler<'a> {
    store: &'a TripleStore,
    sampler: Sampler,
    neg_per_pos: usize,
    type_constrained: bool,
    strict: bool,
}

impl<'a> NegativeSampler<'a> {
    pub fn new(store: &'a TripleStore, config: &TrainConfig) -> Self {
        Self {
            store,
            sampler: config.sampler,
            neg_per_pos: config.neg_per_pos,
            type_constrained: config.type_constrained_sampling,
            strict: config.strict_negatives,
        }
    }

    pub fn head_probability(&self, relation: u32) -> f64 {
        match self.sampler {
            Sampler::Uniform => 0.5,
            Sampler::Bernoulli => self
                .store
                .relation_stats(relation)
                .map_or(0.5, |s| s.head_probability()),
        }
    }

    fn draw_entity(&self, pool: &[u32], rng: &mut impl Rng) -> u32 {
        if self.type_constrained && !pool.is_empty() {
            pool[rng.gen_range(0..pool.len())]
        } else {
            rng.gen_range(0..self.store.num_entities() as u32)
        }
    }

    /// One corruption of `positive`.
    pub fn corrupt(&self, positive: Triple, rng: &mut impl Rng) -> Triple {
        let p_head = self.head_probability(positive.relation);
        let tc = self.store.type_constraints();
        let mut candidate = positive;
        for _ in 0..STRICT_RETRIES {
            candidate = positive;
            if rng.gen_bool(p_head) {
                candidate.head = self.draw_entity(tc.heads(positive.relation), rng);
            } else {
                candidate.tail = self.draw_entity(tc.tails(positive.relation), rng);
            }
            if !self.strict || (candidate != positive && !self.store.filter().contains(candidate)) {
                break;
            }
        }
        candidate
    }

    pub fn sample(&self, positives: &[Triple], rng: &mut impl Rng) -> NegativeBatch {
        let mut items = Vec::with_capacity(positives.len() * (1 + self.neg_per_pos));
        for &p in positives {
            items.push(LabeledTriple { triple: p, label: 1.0 });
            for _ in 0..self.neg_per_pos {
                items.push(LabeledTriple {
                    triple: self.corrupt(p, rng),
                    label: -1.0,
                });
            }
        }
        NegativeBatch { items }
    }
}

pub fn sample_negatives(
    store: &TripleStore,
    batch: &[Triple],
    config: &TrainConfig,
    rng: &mut impl Rng,
) -> NegativeBatch {
    NegativeSampler::new(store, config).sample(batch, rng)
}

/// `log(1 + exp(x))` without overflow.
pub fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + libm::log1p(libm::exp(-x))
    } else {
        libm::log1p(libm::exp(x))
    }
}

pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + libm::exp(-x))
    } else {
        let e = libm::exp(x);
        e / (1.0 + e)
    }
}

/// Sum of the logistic losses of `items` and its gradient.
pub fn data_term(table: &EmbeddingTable, items: &[LabeledTriple]) -> Result<(f64, SparseGrad)> {
    let mut loss = 0.0;
    let mut grads = SparseGrad::default();
    for item in items {
        let g = score_gradients(table, item.triple)?;
        if !g.score.is_finite() {
            return Err(Error::NonFiniteScore {
                triple: item.triple,
                score: g.score,
            });
        }
        let margin = -item.label * g.score;
        loss += softplus(margin);
        let d_score = -item.label * sigmoid(margin);
        let t = item.triple;
        grads.add(Slot::Entity, t.head, &g.head, d_score);
        grads.add(Slot::Entity, t.tail, &g.tail, d_score);
        grads.add(Slot::Relation, t.relation, &g.relation, d_score);
        if let Some(rot) = &g.tail_rotation {
            grads.add(Slot::TailRotation, t.relation, rot, d_score);
        }
    }
    Ok((loss, grads))
}

/// Entity and relation ids appearing in a batch.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Touched {
    pub entities: BTreeSet<u32>,
    pub relations: BTreeSet<u32>,
}

impl Touched {
    pub fn of(items: &[LabeledTriple]) -> Self {
        let mut t = Touched::default();
        for i in items {
            t.entities.insert(i.triple.head);
            t.entities.insert(i.triple.tail);
            t.relations.insert(i.triple.relation);
        }
        t
    }

    fn rows(&self, table: &EmbeddingTable) -> Vec<(Slot, u32)> {
        let mut rows: Vec<(Slot, u32)> = self.entities.iter().map(|&e| (Slot::Entity, e)).collect();
        rows.extend(self.relations.iter().map(|&r| (Slot::Relation, r)));
        if table.tail_rotations().is_some() {
            rows.extend(self.relations.iter().map(|&r| (Slot::TailRotation, r)));
        }
        rows
    }
}

/// `λ1 Σ‖e‖² + λ2 Σ‖w‖²` over touched rows. Tail rotations share `λ2`.
pub fn l2_term(table: &EmbeddingTable, touched: &Touched, lambda_entity: f64, lambda_relation: f64) -> (f64, SparseGrad) {
    let mut value = 0.0;
    let mut grads = SparseGrad::default();
    for (slot, id) in touched.rows(table) {
        let rate = if slot == Slot::Entity { lambda_entity } else { lambda_relation };
        if rate == 0.0 {
            continue;
        }
        let row = table.matrix(slot).unwrap().flat_row(id);
        value += rate * row.iter().map(|x| x * x).sum::<f64>();
        grads.add(slot, id, &row, 2.0 * rate);
    }
    (value, grads)
}

/// `weight · Σ_rows Σ_d |x_d|³`, the cubed per-dimension hypercomplex modulus.
pub fn n3_term(table: &EmbeddingTable, touched: &Touched, weight: f64) -> (f64, SparseGrad) {
    let mut value = 0.0;
    let mut grads = SparseGrad::default();
    if weight == 0.0 {
        return (value, grads);
    }
    let k = table.dim();
    for (slot, id) in touched.rows(table) {
        let m = table.matrix(slot).unwrap();
        let units = m.units();
        let mut g = vec![0.0; units * k];
        for d in 0..k {
            let sq: f64 = (0..units).map(|c| m.row(c, id)[d] * m.row(c, id)[d]).sum();
            let modulus = libm::sqrt(sq);
            value += weight * sq * modulus;
            for c in 0..units {
                g[c * k + d] = 3.0 * weight * modulus * m.row(c, id)[d];
            }
        }
        grads.add(slot, id, &g, 1.0);
    }
    (value, grads)
}

/// Strategy for evaluating the data term of a batch and validation ranks.
pub trait BatchExecutor {
    fn data_term(&self, table: &EmbeddingTable, items: &[LabeledTriple]) -> Result<(f64, SparseGrad)>;

    fn evaluate(&self, table: &EmbeddingTable, store: &TripleStore, split: Split, options: EvalOptions) -> Result<RankReport> {
        evaluate(table, store, split, options)
    }
}

/// Single worker, fixed order.
#[derive(Debug, Clone, Copy, Default)]
pub struct Sequential;

impl BatchExecutor for Sequential {
    fn data_term(&self, table: &EmbeddingTable, items: &[LabeledTriple]) -> Result<(f64, SparseGrad)> {
        data_term(table, items)
    }
}

pub fn loss_and_grad_with(
    executor: &dyn BatchExecutor,
    table: &EmbeddingTable,
    batch: &NegativeBatch,
    config: &TrainConfig,
) -> Result<(f64, SparseGrad)> {
    let (mut loss, mut grads) = executor.data_term(table, &batch.items)?;
    let touched = Touched::of(&batch.items);
    if config.lambda_entity > 0.0 || config.lambda_relation > 0.0 {
        let (v, g) = l2_term(table, &touched, config.lambda_entity, config.lambda_relation);
        loss += v;
        grads.merge(&g);
    }
    if config.n3_weight > 0.0 {
        let (v, g) = n3_term(table, &touched, config.n3_weight);
        loss += v;
        grads.merge(&g);
    }
    Ok((loss, grads))
}

/// Regularised logistic loss of a batch and its sparse gradient.
pub fn loss_and_grad(table: &EmbeddingTable, batch: &NegativeBatch, config: &TrainConfig) -> Result<(f64, SparseGrad)> {
    loss_and_grad_with(&Sequential, table, batch, config)
}

/// Per-coordinate sums of squared gradients.
#[derive(Debug, Clone, PartialEq)]
pub struct AdagradState {
    pub eps: f64,
    entities: EmbeddingMatrix,
    relations: EmbeddingMatrix,
    tail_rotations: Option<EmbeddingMatrix>,
}

impl AdagradState {
    pub const DEFAULT_EPS: f64 = 1e-8;

    pub fn new(table: &EmbeddingTable) -> Self {
        let zeros = |m: &EmbeddingMatrix| EmbeddingMatrix::zeros(m.rows(), m.dim(), m.units());
        Self {
            eps: Self::DEFAULT_EPS,
            entities: zeros(table.entities()),
            relations: zeros(table.relations()),
            tail_rotations: table.tail_rotations().map(zeros),
        }
    }

    pub fn accumulator(&self, slot: Slot) -> Option<&EmbeddingMatrix> {
        match slot {
            Slot::Entity => Some(&self.entities),
            Slot::Relation => Some(&self.relations),
            Slot::TailRotation => self.tail_rotations.as_ref(),
        }
    }

    fn accumulator_mut(&mut self, slot: Slot) -> Option<&mut EmbeddingMatrix> {
        match slot {
            Slot::Entity => Some(&mut self.entities),
            Slot::Relation => Some(&mut self.relations),
            Slot::TailRotation => self.tail_rotations.as_mut(),
        }
    }
}

/// `acc += g²; x -= lr · g / (sqrt(acc) + eps)` on every row in `grads`.
pub fn adagrad_step(table: &mut EmbeddingTable, state: &mut AdagradState, grads: &SparseGrad, lr: f64) -> Result<()> {
    let eps = state.eps;
    for slot in [Slot::Entity, Slot::Relation, Slot::TailRotation] {
        let rows = grads.slot(slot);
        if rows.is_empty() {
            continue;
        }
        let (Some(params), Some(acc)) = (table.matrix_mut(slot), state.accumulator_mut(slot)) else {
            return Err(Error::Shape(format!("gradient for missing parameter group {slot:?}")));
        };
        if params.units() != acc.units() || params.rows() != acc.rows() {
            return Err(Error::Shape("optimizer state does not match table".to_string()));
        }
        let k = params.dim();
        let units = params.units();
        for (&id, g) in rows {
            if id as usize >= params.rows() || g.len() != units * k {
                return Err(Error::Shape(format!("gradient row {id} has the wrong shape")));
            }
            let start = id as usize * k;
            for c in 0..units {
                let gs = &g[c * k..(c + 1) * k];
                let a = &mut acc.part_mut(c)[start..start + k];
                let x = &mut params.part_mut(c)[start..start + k];
                for ((x, a), &g) in x.iter_mut().zip(a.iter_mut()).zip(gs) {
                    if g == 0.0 {
                        continue;
                    }
                    *a += g * g;
                    *x -= lr * g / (libm::sqrt(*a) + eps);
                }
            }
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpochRecord {
    pub epoch: usize,
    pub loss: f64,
    pub valid_mrr: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct TrainLog {
    pub records: Vec<EpochRecord>,
}

impl TrainLog {
    /// One `epoch<TAB>loss[<TAB>valid_mrr]` line per epoch.
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for r in &self.records {
            let _ = write!(out, "{}\t{}", r.epoch, r.loss);
            if let Some(m) = r.valid_mrr {
                let _ = write!(out, "\t{m}");
            }
            out.push('\n');
        }
        out
    }

    /// Best recorded validation MRR and its epoch.
    pub fn best(&self) -> Option<(usize, f64)> {
        self.records
            .iter()
            .filter_map(|r| r.valid_mrr.map(|m| (r.epoch, m)))
            .fold(None, |best, (e, m)| match best {
                Some((_, b)) if b >= m => best,
                _ => Some((e, m)),
            })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainOutcome {
    /// Best-validation table, or the last one when nothing was evaluated.
    pub table: EmbeddingTable,
    pub log: TrainLog,
}

pub fn train(store: &TripleStore, config: &TrainConfig) -> Result<TrainOutcome> {
    train_with(store, config, &Sequential)
}

/// Trains from a seeded initialisation, keeping the table with the best
/// filtered validation MRR.
pub fn train_with(store: &TripleStore, config: &TrainConfig, executor: &dyn BatchExecutor) -> Result<TrainOutcome> {
    train_observed(store, config, executor, &mut |_| {})
}

/// As [`train_with`], calling `observe` after every epoch.
pub fn train_observed(
    store: &TripleStore,
    config: &TrainConfig,
    executor: &dyn BatchExecutor,
    observe: &mut dyn FnMut(&EpochRecord),
) -> Result<TrainOutcome> {
    config.validate()?;
    if config.reciprocal != store.is_reciprocal() {
        return Err(Error::InvalidConfig(
            "reciprocal flag does not match the store's augmentation".to_string(),
        ));
    }
    if config.eval_every > 0 && store.valid().is_empty() {
        return Err(Error::EmptySplit(Split::Valid));
    }
    if config.epochs > 0 && store.train().is_empty() {
        return Err(Error::EmptySplit(Split::Train));
    }
    let mut rng = seeded_rng(config.seed);
    let mut table = init_embeddings(config, store.num_entities(), store.num_relations(), &mut rng)?;
    let mut state = AdagradState::new(&table);
    let sampler = NegativeSampler::new(store, config);
    let train = store.train();
    let mut order: Vec<usize> = (0..train.len()).collect();
    let batch_size = train.len().div_ceil(config.batch_count).max(1);

    let mut log = TrainLog::default();
    let mut best: Option<(f64, EmbeddingTable)> = None;
    let mut stagnant = 0;
    let mut positives = Vec::with_capacity(batch_size);
    for epoch in 1..=config.epochs {
        order.shuffle(&mut rng);
        let mut epoch_loss = 0.0;
        for chunk in order.chunks(batch_size) {
            positives.clear();
            positives.extend(chunk.iter().map(|&i| train[i]));
            let batch = sampler.sample(&positives, &mut rng);
            let (loss, grads) = loss_and_grad_with(executor, &table, &batch, config)?;
            adagrad_step(&mut table, &mut state, &grads, config.lr)?;
            epoch_loss += loss;
        }
        let mut record = EpochRecord {
            epoch,
            loss: epoch_loss,
            valid_mrr: None,
        };
        let mut stop = false;
        if config.eval_every > 0 && epoch % config.eval_every == 0 {
            let mrr = executor.evaluate(&table, store, Split::Valid, config.eval)?.mrr();
            record.valid_mrr = Some(mrr);
            if best.as_ref().is_none_or(|(b, _)| mrr > *b) {
                best = Some((mrr, table.clone()));
                stagnant = 0;
            } else {
                stagnant += 1;
                stop = config.patience > 0 && stagnant >= config.patience;
            }
        }
        observe(&record);
        log.records.push(record);
        if stop {
            break;
        }
    }
    let table = best.map_or(table, |(_, t)| t);
    Ok(TrainOutcome { table, log })
}
