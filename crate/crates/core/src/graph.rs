//! Triples, vocabularies and the indexes built over a dataset.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Triple {
    pub head: u32,
    pub relation: u32,
    pub tail: u32,
}

impl Triple {
    pub const fn new(head: u32, relation: u32, tail: u32) -> Self {
        Self { head, relation, tail }
    }
}

impl fmt::Display for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.head, self.relation, self.tail)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Split {
    Train,
    Valid,
    Test,
}

impl Split {
    pub const ALL: [Split; 3] = [Split::Train, Split::Valid, Split::Test];

    pub fn name(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Valid => "valid",
            Split::Test => "test",
        }
    }
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl core::str::FromStr for Split {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "train" => Ok(Split::Train),
            "valid" => Ok(Split::Valid),
            "test" => Ok(Split::Test),
            _ => Err(Error::Unknown {
                what: "split",
                value: s.to_string(),
            }),
        }
    }
}

/// Dense name <-> id bijection, ids assigned in first-seen order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Interner {
    names: Vec<String>,
    ids: BTreeMap<String, u32>,
}

impl Interner {
    pub fn intern(&mut self, name: &str) -> u32 {
        if let Some(&id) = self.ids.get(name) {
            return id;
        }
        let id = self.names.len() as u32;
        self.names.push(name.to_string());
        self.ids.insert(name.to_string(), id);
        id
    }

    pub fn id(&self, name: &str) -> Option<u32> {
        self.ids.get(name).copied()
    }

    pub fn name(&self, id: u32) -> Option<&str> {
        self.names.get(id as usize).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.names.iter().map(String::as_str)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Vocabulary {
    pub entities: Interner,
    pub relations: Interner,
}

impl Vocabulary {
    pub fn num_entities(&self) -> usize {
        self.entities.len()
    }

    pub fn num_relations(&self) -> usize {
        self.relations.len()
    }

    pub fn encode(&self, head: &str, relation: &str, tail: &str) -> Option<Triple> {
        Some(Triple::new(
            self.entities.id(head)?,
            self.relations.id(relation)?,
            self.entities.id(tail)?,
        ))
    }

    pub fn decode(&self, triple: Triple) -> Option<(&str, &str, &str)> {
        Some((
            self.entities.name(triple.head)?,
            self.relations.name(triple.relation)?,
            self.entities.name(triple.tail)?,
        ))
    }
}

/// Suffix appended to a relation name for its reciprocal.
pub const RECIPROCAL_SUFFIX: &str = "_reciprocal";

/// Known answers per query, across all splits.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FilterIndex {
    tails: BTreeMap<(u32, u32), Vec<u32>>,
    heads: BTreeMap<(u32, u32), Vec<u32>>,
}

impl FilterIndex {
    fn build<'a>(triples: impl Iterator<Item = &'a Triple>) -> Self {
        let mut tails: BTreeMap<(u32, u32), Vec<u32>> = BTreeMap::new();
        let mut heads: BTreeMap<(u32, u32), Vec<u32>> = BTreeMap::new();
        for t in triples {
            tails.entry((t.head, t.relation)).or_default().push(t.tail);
            heads.entry((t.relation, t.tail)).or_default().push(t.head);
        }
        for v in tails.values_mut().chain(heads.values_mut()) {
            v.sort_unstable();
            v.dedup();
        }
        Self { tails, heads }
    }

    /// Every `t` with `(head, relation, t)` observed.
    pub fn known_tails(&self, head: u32, relation: u32) -> &[u32] {
        self.tails.get(&(head, relation)).map_or(&[], Vec::as_slice)
    }

    /// Every `h` with `(h, relation, tail)` observed.
    pub fn known_heads(&self, relation: u32, tail: u32) -> &[u32] {
        self.heads.get(&(relation, tail)).map_or(&[], Vec::as_slice)
    }

    pub fn contains(&self, t: Triple) -> bool {
        self.known_tails(t.head, t.relation).binary_search(&t.tail).is_ok()
    }

    /// Number of distinct triples.
    pub fn len(&self) -> usize {
        self.tails.values().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.tails.is_empty()
    }
}

/// Mean tails per head and heads per tail of one relation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelationStats {
    pub tph: f64,
    pub hpt: f64,
}

impl RelationStats {
    /// Probability of corrupting the head under Bernoulli sampling.
    pub fn head_probability(&self) -> f64 {
        if self.tph + self.hpt > 0.0 {
            self.tph / (self.tph + self.hpt)
        } else {
            0.5
        }
    }
}

/// Per relation: entities seen as head and as tail in the train split.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TypeConstraints {
    heads: Vec<Vec<u32>>,
    tails: Vec<Vec<u32>>,
}

impl TypeConstraints {
    pub fn heads(&self, relation: u32) -> &[u32] {
        &self.heads[relation as usize]
    }

    pub fn tails(&self, relation: u32) -> &[u32] {
        &self.tails[relation as usize]
    }

    /// Relations with no train triple (empty candidate sets).
    pub fn empty_relations(&self) -> Vec<u32> {
        (0..self.heads.len() as u32)
            .filter(|&r| self.heads[r as usize].is_empty())
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TripleStore {
    num_entities: usize,
    num_relations: usize,
    /// Relation count before reciprocal augmentation, if augmented.
    reciprocal_base: Option<usize>,
    train: Vec<Triple>,
    valid: Vec<Triple>,
    test: Vec<Triple>,
    filter: FilterIndex,
    stats: Vec<Option<RelationStats>>,
    constraints: TypeConstraints,
}

impl TripleStore {
    /// Builds a store from already-encoded splits.
    pub fn new(
        num_entities: usize,
        num_relations: usize,
        train: Vec<Triple>,
        valid: Vec<Triple>,
        test: Vec<Triple>,
    ) -> Result<Self> {
        for t in train.iter().chain(&valid).chain(&test) {
            check_id("entity", t.head, num_entities)?;
            check_id("entity", t.tail, num_entities)?;
            check_id("relation", t.relation, num_relations)?;
        }
        Ok(Self::assemble(num_entities, num_relations, None, train, valid, test))
    }

    fn assemble(
        num_entities: usize,
        num_relations: usize,
        reciprocal_base: Option<usize>,
        train: Vec<Triple>,
        valid: Vec<Triple>,
        test: Vec<Triple>,
    ) -> Self {
        let filter = FilterIndex::build(train.iter().chain(&valid).chain(&test));
        let stats = bernoulli_stats_of(&train, num_relations);
        let constraints = type_constraints_of(&train, num_relations);
        Self {
            num_entities,
            num_relations,
            reciprocal_base,
            train,
            valid,
            test,
            filter,
            stats,
            constraints,
        }
    }

    pub fn num_entities(&self) -> usize {
        self.num_entities
    }

    /// Relation count including reciprocals.
    pub fn num_relations(&self) -> usize {
        self.num_relations
    }

    /// Relation count before augmentation.
    pub fn num_base_relations(&self) -> usize {
        self.reciprocal_base.unwrap_or(self.num_relations)
    }

    pub fn is_reciprocal(&self) -> bool {
        self.reciprocal_base.is_some()
    }

    /// The reciprocal id of a base relation, when augmented.
    pub fn reciprocal_of(&self, relation: u32) -> Option<u32> {
        self.reciprocal_base.map(|m| relation + m as u32)
    }

    pub fn split(&self, split: Split) -> &[Triple] {
        match split {
            Split::Train => &self.train,
            Split::Valid => &self.valid,
            Split::Test => &self.test,
        }
    }

    pub fn train(&self) -> &[Triple] {
        &self.train
    }

    pub fn valid(&self) -> &[Triple] {
        &self.valid
    }

    pub fn test(&self) -> &[Triple] {
        &self.test
    }

    pub fn filter(&self) -> &FilterIndex {
        &self.filter
    }

    /// Bernoulli statistics; `None` for relations absent from train.
    pub fn relation_stats(&self, relation: u32) -> Option<RelationStats> {
        self.stats[relation as usize]
    }

    pub fn type_constraints(&self) -> &TypeConstraints {
        &self.constraints
    }
}

fn check_id(kind: &'static str, id: u32, limit: usize) -> Result<()> {
    if (id as usize) < limit {
        Ok(())
    } else {
        Err(Error::IdOutOfRange { kind, id, limit })
    }
}

/// What a load saw that deserves a mention.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LoadSummary {
    pub entities_outside_train: Vec<u32>,
    pub relations_outside_train: Vec<u32>,
    pub lines: [usize; 3],
}

impl fmt::Display for LoadSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "train {} / valid {} / test {} triples",
            self.lines[0], self.lines[1], self.lines[2]
        )?;
        if !self.entities_outside_train.is_empty() {
            write!(
                f,
                "; {} entities appear only in valid/test",
                self.entities_outside_train.len()
            )?;
        }
        if !self.relations_outside_train.is_empty() {
            write!(
                f,
                "; {} relations appear only in valid/test",
                self.relations_outside_train.len()
            )?;
        }
        Ok(())
    }
}

/// One split's raw text plus the label used in error messages.
pub struct SplitText<'a> {
    pub label: &'a str,
    pub text: &'a str,
}

fn parse_lines<'a>(src: &SplitText<'a>) -> Result<Vec<(&'a str, &'a str, &'a str)>> {
    let mut out = Vec::new();
    for (i, line) in src.text.lines().enumerate() {
        let line = line.strip_suffix('\r').unwrap_or(line);
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 3 {
            return Err(Error::MalformedLine {
                file: src.label.to_string(),
                line: i + 1,
                fields: fields.len(),
            });
        }
        out.push((fields[0], fields[1], fields[2]));
    }
    Ok(out)
}

/// Parses `head<TAB>relation<TAB>tail` text for the three splits.
///
/// Ids are assigned first-seen over train, then valid, then test.
pub fn parse_splits(
    train: SplitText<'_>,
    valid: SplitText<'_>,
    test: SplitText<'_>,
) -> Result<(Vocabulary, TripleStore, LoadSummary)> {
    let raw = [parse_lines(&train)?, parse_lines(&valid)?, parse_lines(&test)?];
    let mut vocab = Vocabulary::default();
    let mut encoded: [Vec<Triple>; 3] = Default::default();
    let mut summary = LoadSummary::default();
    let mut train_entities = 0;
    let mut train_relations = 0;
    for (s, lines) in raw.iter().enumerate() {
        for &(h, r, t) in lines {
            let head = vocab.entities.intern(h);
            let relation = vocab.relations.intern(r);
            let tail = vocab.entities.intern(t);
            encoded[s].push(Triple::new(head, relation, tail));
        }
        summary.lines[s] = lines.len();
        if s == 0 {
            train_entities = vocab.num_entities();
            train_relations = vocab.num_relations();
        }
    }
    summary.entities_outside_train = (train_entities as u32..vocab.num_entities() as u32).collect();
    summary.relations_outside_train = (train_relations as u32..vocab.num_relations() as u32).collect();

    let [tr, va, te] = encoded;
    let store = TripleStore::assemble(vocab.num_entities(), vocab.num_relations(), None, tr, va, te);
    Ok((vocab, store, summary))
}

/// Adds `(t, r + M, h)` for every train triple, doubling the relation count.
pub fn add_reciprocals(store: &TripleStore, vocab: &Vocabulary) -> Result<(Vocabulary, TripleStore)> {
    if store.is_reciprocal() {
        return Err(Error::AlreadyReciprocal);
    }
    let m = store.num_relations;
    let mut vocab = vocab.clone();
    let base: Vec<String> = vocab.relations.names().map(|n| n.to_string()).collect();
    for name in &base {
        vocab.relations.intern(&format!("{name}{RECIPROCAL_SUFFIX}"));
    }
    // A vocabulary whose names already collide with the suffix would break
    // the dense id scheme.
    if vocab.num_relations() != 2 * m && !base.is_empty() {
        return Err(Error::InvalidConfig(
            "relation names collide with their reciprocal names".to_string(),
        ));
    }
    let mut train = store.train.clone();
    train.extend(
        store
            .train
            .iter()
            .map(|t| Triple::new(t.tail, t.relation + m as u32, t.head)),
    );
    let store = TripleStore::assemble(
        store.num_entities,
        2 * m,
        Some(m),
        train,
        store.valid.clone(),
        store.test.clone(),
    );
    Ok((vocab, store))
}

fn bernoulli_stats_of(train: &[Triple], num_relations: usize) -> Vec<Option<RelationStats>> {
    let mut pairs: BTreeSet<(u32, u32, u32)> = BTreeSet::new();
    for t in train {
        pairs.insert((t.relation, t.head, t.tail));
    }
    let mut heads: Vec<BTreeSet<u32>> = alloc::vec![BTreeSet::new(); num_relations];
    let mut tails: Vec<BTreeSet<u32>> = alloc::vec![BTreeSet::new(); num_relations];
    let mut count = alloc::vec![0usize; num_relations];
    for &(r, h, t) in &pairs {
        heads[r as usize].insert(h);
        tails[r as usize].insert(t);
        count[r as usize] += 1;
    }
    (0..num_relations)
        .map(|r| {
            (count[r] > 0).then(|| RelationStats {
                tph: count[r] as f64 / heads[r].len() as f64,
                hpt: count[r] as f64 / tails[r].len() as f64,
            })
        })
        .collect()
}

fn type_constraints_of(train: &[Triple], num_relations: usize) -> TypeConstraints {
    let mut heads: Vec<BTreeSet<u32>> = alloc::vec![BTreeSet::new(); num_relations];
    let mut tails: Vec<BTreeSet<u32>> = alloc::vec![BTreeSet::new(); num_relations];
    for t in train {
        heads[t.relation as usize].insert(t.head);
        tails[t.relation as usize].insert(t.tail);
    }
    TypeConstraints {
        heads: heads.into_iter().map(|s| s.into_iter().collect()).collect(),
        tails: tails.into_iter().map(|s| s.into_iter().collect()).collect(),
    }
}

/// Per-relation `(tph, hpt)` over the train split.
pub fn bernoulli_stats(store: &TripleStore) -> Result<Vec<Option<RelationStats>>> {
    if store.train.is_empty() {
        return Err(Error::EmptySplit(Split::Train));
    }
    Ok(store.stats.clone())
}

/// Head/tail candidate sets per relation, from the train split.
pub fn type_constraints(store: &TripleStore) -> Result<&TypeConstraints> {
    if store.train.is_empty() {
        return Err(Error::EmptySplit(Split::Train));
    }
    Ok(&store.constraints)
}
