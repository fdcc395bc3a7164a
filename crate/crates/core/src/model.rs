//! Embedding tables, scoring functions and their analytic gradients.
//!
//! Every scoring variant is bilinear in the two entity embeddings, so a
//! query with one entity fixed reduces to a single "query" hypercomplex vector
//! whose inner product with a candidate entity is that candidate's score. The
//! same query vectors are the entity gradients, which keeps candidate scoring
//! and backpropagation on one code path.
//!
//! Rotation variants normalise the relation per dimension before use. The
//! gradient flows through that normalisation: for `w_hat = w / |w|` the raw
//! gradient is `(g - w_hat (w_hat · g)) / |w|`.

use alloc::collections::BTreeMap;
use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::error::{Error, Result};
use crate::graph::Triple;
use crate::hypercomplex::{dot, modulus, HyperVector, MulTable, CAYLEY, DEFAULT_EPS, HAMILTON};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NumericKind {
    Quaternion,
    Octonion,
}

impl NumericKind {
    pub const fn units(self) -> usize {
        match self {
            NumericKind::Quaternion => 4,
            NumericKind::Octonion => 8,
        }
    }

    pub const fn tag(self) -> u8 {
        match self {
            NumericKind::Quaternion => 0,
            NumericKind::Octonion => 1,
        }
    }

    pub fn from_tag(tag: u8) -> Option<Self> {
        match tag {
            0 => Some(NumericKind::Quaternion),
            1 => Some(NumericKind::Octonion),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModelVariant {
    /// `(h ⊗ w/|w|) · t`
    QuatE,
    /// `(h ⊗ w) · t`
    QuatERaw,
    /// `w · (h ⊗ t)`
    WeightedProduct,
    /// `(h ⊗ w/|w|) · (t ⊗ v/|v|)` with a second per-relation quaternion `v`.
    DualRotation,
    /// `QuatERaw` with the j and k units pinned to zero.
    ComplExDegenerate,
    /// `QuatERaw` with every imaginary unit pinned to zero.
    DistMultDegenerate,
    /// `QuatE` over octonions.
    OctonionE,
}

impl ModelVariant {
    pub const ALL: [ModelVariant; 7] = [
        ModelVariant::QuatE,
        ModelVariant::QuatERaw,
        ModelVariant::WeightedProduct,
        ModelVariant::DualRotation,
        ModelVariant::ComplExDegenerate,
        ModelVariant::DistMultDegenerate,
        ModelVariant::OctonionE,
    ];

    pub fn kind(self) -> NumericKind {
        match self {
            ModelVariant::OctonionE => NumericKind::Octonion,
            _ => NumericKind::Quaternion,
        }
    }

    pub fn normalizes_relations(self) -> bool {
        matches!(
            self,
            ModelVariant::QuatE | ModelVariant::DualRotation | ModelVariant::OctonionE
        )
    }

    pub fn has_tail_rotation(self) -> bool {
        self == ModelVariant::DualRotation
    }

    /// Leading units that carry parameters; the rest are pinned to zero.
    pub fn active_units(self) -> usize {
        match self {
            ModelVariant::ComplExDegenerate => 2,
            ModelVariant::DistMultDegenerate => 1,
            v => v.kind().units(),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ModelVariant::QuatE => "quate",
            ModelVariant::QuatERaw => "quate-raw",
            ModelVariant::WeightedProduct => "weighted-product",
            ModelVariant::DualRotation => "dual-rotation",
            ModelVariant::ComplExDegenerate => "complex",
            ModelVariant::DistMultDegenerate => "distmult",
            ModelVariant::OctonionE => "octonione",
        }
    }

    pub fn tag(self) -> u8 {
        Self::ALL.iter().position(|&v| v == self).unwrap() as u8
    }

    pub fn from_tag(tag: u8) -> Option<Self> {
        Self::ALL.get(tag as usize).copied()
    }

    fn family(self) -> Family {
        match self {
            ModelVariant::WeightedProduct => Family::Weighted,
            ModelVariant::DualRotation => Family::Dual,
            _ => Family::Rotation,
        }
    }
}

impl fmt::Display for ModelVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .iter()
            .copied()
            .find(|v| v.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Unknown {
                what: "model variant",
                value: s.to_string(),
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Family {
    Rotation,
    Weighted,
    Dual,
}

/// Which entity of a triple is being predicted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Direction {
    /// `(?, r, t)`
    Head,
    /// `(h, r, ?)`
    Tail,
}

impl FromStr for Direction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "head" => Ok(Direction::Head),
            "tail" => Ok(Direction::Tail),
            _ => Err(Error::Unknown {
                what: "direction",
                value: s.to_string(),
            }),
        }
    }
}

/// `rows` hypercomplex vectors of dimension `dim`, stored unit-major:
/// `parts[c][row * dim + d]` is unit `c` of `row` at dimension `d`.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingMatrix {
    rows: usize,
    dim: usize,
    parts: Vec<Vec<f64>>,
}

impl EmbeddingMatrix {
    pub fn zeros(rows: usize, dim: usize, units: usize) -> Self {
        Self {
            rows,
            dim,
            parts: vec![vec![0.0; rows * dim]; units],
        }
    }

    pub fn from_parts(rows: usize, dim: usize, parts: Vec<Vec<f64>>) -> Result<Self> {
        for p in &parts {
            if p.len() != rows * dim {
                return Err(Error::Shape(alloc::format!(
                    "coordinate array of length {} for {rows} rows of dimension {dim}",
                    p.len()
                )));
            }
        }
        Ok(Self { rows, dim, parts })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn units(&self) -> usize {
        self.parts.len()
    }

    pub fn parts(&self) -> &[Vec<f64>] {
        &self.parts
    }

    pub fn part(&self, unit: usize) -> &[f64] {
        &self.parts[unit]
    }

    pub fn part_mut(&mut self, unit: usize) -> &mut [f64] {
        &mut self.parts[unit]
    }

    /// One unit's coordinates for one row.
    #[inline]
    pub fn row(&self, unit: usize, id: u32) -> &[f64] {
        let start = id as usize * self.dim;
        &self.parts[unit][start..start + self.dim]
    }

    #[inline]
    pub fn element<const N: usize>(&self, id: u32, d: usize) -> [f64; N] {
        let at = id as usize * self.dim + d;
        core::array::from_fn(|c| self.parts[c][at])
    }

    pub fn vector<const N: usize>(&self, id: u32) -> Result<HyperVector<N>> {
        HyperVector::new(core::array::from_fn(|c| self.row(c, id).to_vec()))
    }

    pub fn set_vector<const N: usize>(&mut self, id: u32, v: &HyperVector<N>) -> Result<()> {
        if v.dim() != self.dim || N != self.units() {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: v.dim(),
            });
        }
        let start = id as usize * self.dim;
        for c in 0..N {
            self.parts[c][start..start + self.dim].copy_from_slice(v.part(c));
        }
        Ok(())
    }

    /// A row flattened unit-major (`units * dim` values).
    pub fn flat_row(&self, id: u32) -> Vec<f64> {
        (0..self.units()).flat_map(|c| self.row(c, id).iter().copied()).collect()
    }

    /// Adds `scale * delta` (unit-major) to a row.
    pub fn add_flat_row(&mut self, id: u32, delta: &[f64], scale: f64) {
        let dim = self.dim;
        let start = id as usize * dim;
        for (c, chunk) in delta.chunks_exact(dim).enumerate() {
            for (x, g) in self.parts[c][start..start + dim].iter_mut().zip(chunk) {
                *x += scale * g;
            }
        }
    }

    pub fn is_finite(&self) -> bool {
        self.parts.iter().flatten().all(|v| v.is_finite())
    }
}

/// Parameter groups of a table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Slot {
    Entity,
    Relation,
    TailRotation,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingTable {
    variant: ModelVariant,
    dim: usize,
    eps: f64,
    entities: EmbeddingMatrix,
    relations: EmbeddingMatrix,
    tail_rotations: Option<EmbeddingMatrix>,
}

impl EmbeddingTable {
    /// All-zero table of the right shape for `variant`.
    pub fn zeros(variant: ModelVariant, num_entities: usize, num_relations: usize, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::EmptyVector);
        }
        let units = variant.kind().units();
        Ok(Self {
            variant,
            dim,
            eps: DEFAULT_EPS,
            entities: EmbeddingMatrix::zeros(num_entities, dim, units),
            relations: EmbeddingMatrix::zeros(num_relations, dim, units),
            tail_rotations: variant
                .has_tail_rotation()
                .then(|| EmbeddingMatrix::zeros(num_relations, dim, units)),
        })
    }

    /// Assembles a table, checking shapes, finiteness and pinned units.
    pub fn from_matrices(
        variant: ModelVariant,
        entities: EmbeddingMatrix,
        relations: EmbeddingMatrix,
        tail_rotations: Option<EmbeddingMatrix>,
    ) -> Result<Self> {
        let dim = entities.dim();
        let units = variant.kind().units();
        if dim == 0 {
            return Err(Error::EmptyVector);
        }
        if tail_rotations.is_some() != variant.has_tail_rotation() {
            return Err(Error::Shape(alloc::format!(
                "variant {variant} {} tail rotations",
                if variant.has_tail_rotation() { "requires" } else { "has no" }
            )));
        }
        let active = variant.active_units();
        for m in core::iter::once(&entities).chain(Some(&relations)).chain(tail_rotations.as_ref()) {
            if m.dim() != dim || m.units() != units {
                return Err(Error::Shape(alloc::format!(
                    "expected {units} units of dimension {dim}, found {} of dimension {}",
                    m.units(),
                    m.dim()
                )));
            }
            if tail_rotations.as_ref().is_some_and(|v| v.rows() != relations.rows()) {
                return Err(Error::Shape("tail rotations must match relation count".to_string()));
            }
            for (unit, part) in m.parts().iter().enumerate() {
                if let Some(i) = part.iter().position(|v| !v.is_finite()) {
                    return Err(Error::NonFiniteCoordinate { unit, dimension: i % dim });
                }
                if unit >= active && part.iter().any(|&v| v != 0.0) {
                    return Err(Error::Shape(alloc::format!(
                        "unit {unit} is pinned to zero for variant {variant}"
                    )));
                }
            }
        }
        Ok(Self {
            variant,
            dim,
            eps: DEFAULT_EPS,
            entities,
            relations,
            tail_rotations,
        })
    }

    pub fn variant(&self) -> ModelVariant {
        self.variant
    }

    pub fn kind(&self) -> NumericKind {
        self.variant.kind()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn num_entities(&self) -> usize {
        self.entities.rows()
    }

    pub fn num_relations(&self) -> usize {
        self.relations.rows()
    }

    pub fn entities(&self) -> &EmbeddingMatrix {
        &self.entities
    }

    pub fn relations(&self) -> &EmbeddingMatrix {
        &self.relations
    }

    pub fn tail_rotations(&self) -> Option<&EmbeddingMatrix> {
        self.tail_rotations.as_ref()
    }

    pub fn matrix(&self, slot: Slot) -> Option<&EmbeddingMatrix> {
        match slot {
            Slot::Entity => Some(&self.entities),
            Slot::Relation => Some(&self.relations),
            Slot::TailRotation => self.tail_rotations.as_ref(),
        }
    }

    pub fn matrix_mut(&mut self, slot: Slot) -> Option<&mut EmbeddingMatrix> {
        match slot {
            Slot::Entity => Some(&mut self.entities),
            Slot::Relation => Some(&mut self.relations),
            Slot::TailRotation => self.tail_rotations.as_mut(),
        }
    }

    /// Total number of scalar parameters stored.
    pub fn parameter_count(&self) -> usize {
        [Slot::Entity, Slot::Relation, Slot::TailRotation]
            .iter()
            .filter_map(|&s| self.matrix(s))
            .map(|m| m.rows() * m.dim() * m.units())
            .sum()
    }

    pub fn check_entity(&self, id: u32) -> Result<()> {
        if (id as usize) < self.num_entities() {
            Ok(())
        } else {
            Err(Error::IdOutOfRange {
                kind: "entity",
                id,
                limit: self.num_entities(),
            })
        }
    }

    pub fn check_relation(&self, id: u32) -> Result<()> {
        if (id as usize) < self.num_relations() {
            Ok(())
        } else {
            Err(Error::IdOutOfRange {
                kind: "relation",
                id,
                limit: self.num_relations(),
            })
        }
    }

    pub fn check_triple(&self, t: Triple) -> Result<()> {
        self.check_entity(t.head)?;
        self.check_relation(t.relation)?;
        self.check_entity(t.tail)
    }

    /// The relation element as used by the score, with the raw modulus.
    #[inline]
    fn relation_element<const N: usize>(&self, m: &EmbeddingMatrix, id: u32, d: usize) -> Result<([f64; N], f64)> {
        let w = m.element::<N>(id, d);
        if !self.variant.normalizes_relations() {
            return Ok((w, 1.0));
        }
        let norm = modulus(&w);
        if norm <= self.eps {
            return Err(Error::DegenerateRelation {
                relation: id,
                dimension: d,
                norm,
            });
        }
        Ok((core::array::from_fn(|c| w[c] / norm), norm))
    }

    fn tail_rotation_element<const N: usize>(&self, id: u32, d: usize) -> Result<([f64; N], f64)> {
        match &self.tail_rotations {
            Some(v) => self.relation_element(v, id, d),
            None => Ok(([0.0; N], 1.0)),
        }
    }
}

/// Sparse per-row gradients, rows flattened unit-major.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SparseGrad {
    pub entities: BTreeMap<u32, Vec<f64>>,
    pub relations: BTreeMap<u32, Vec<f64>>,
    pub tail_rotations: BTreeMap<u32, Vec<f64>>,
}

impl SparseGrad {
    pub fn slot(&self, slot: Slot) -> &BTreeMap<u32, Vec<f64>> {
        match slot {
            Slot::Entity => &self.entities,
            Slot::Relation => &self.relations,
            Slot::TailRotation => &self.tail_rotations,
        }
    }

    pub fn slot_mut(&mut self, slot: Slot) -> &mut BTreeMap<u32, Vec<f64>> {
        match slot {
            Slot::Entity => &mut self.entities,
            Slot::Relation => &mut self.relations,
            Slot::TailRotation => &mut self.tail_rotations,
        }
    }

    /// `grad[slot][id] += scale * row`.
    pub fn add(&mut self, slot: Slot, id: u32, row: &[f64], scale: f64) {
        let acc = self
            .slot_mut(slot)
            .entry(id)
            .or_insert_with(|| vec![0.0; row.len()]);
        for (a, g) in acc.iter_mut().zip(row) {
            *a += scale * g;
        }
    }

    /// Adds another gradient set into this one, row by row in id order.
    pub fn merge(&mut self, other: &SparseGrad) {
        for slot in [Slot::Entity, Slot::Relation, Slot::TailRotation] {
            for (&id, row) in other.slot(slot) {
                self.add(slot, id, row, 1.0);
            }
        }
    }

    pub fn is_empty(&self) -> bool {
        self.entities.is_empty() && self.relations.is_empty() && self.tail_rotations.is_empty()
    }
}

/// Score of one triple and its gradient with respect to every parameter it
/// touches. Rows are unit-major, `units * dim` long.
#[derive(Debug, Clone, PartialEq)]
pub struct TripleGradient {
    pub score: f64,
    pub head: Vec<f64>,
    pub relation: Vec<f64>,
    pub tail: Vec<f64>,
    pub tail_rotation: Option<Vec<f64>>,
}

#[inline]
fn tail_query_element<const N: usize>(
    mt: &MulTable<N>,
    family: Family,
    head: &[f64; N],
    rel: &[f64; N],
    tail_rot: &[f64; N],
) -> [f64; N] {
    match family {
        Family::Rotation => mt.mul(head, rel),
        Family::Weighted => mt.right_grad(head, rel),
        Family::Dual => mt.left_grad(tail_rot, &mt.mul(head, rel)),
    }
}

#[inline]
fn head_query_element<const N: usize>(
    mt: &MulTable<N>,
    family: Family,
    rel: &[f64; N],
    tail: &[f64; N],
    tail_rot: &[f64; N],
) -> [f64; N] {
    match family {
        Family::Rotation => mt.left_grad(rel, tail),
        Family::Weighted => mt.left_grad(tail, rel),
        Family::Dual => mt.left_grad(rel, &mt.mul(tail, tail_rot)),
    }
}

#[inline]
fn score_element<const N: usize>(
    mt: &MulTable<N>,
    family: Family,
    head: &[f64; N],
    rel: &[f64; N],
    tail: &[f64; N],
    tail_rot: &[f64; N],
) -> f64 {
    match family {
        Family::Rotation => dot(&mt.mul(head, rel), tail),
        Family::Weighted => dot(rel, &mt.mul(head, tail)),
        Family::Dual => dot(&mt.mul(head, rel), &mt.mul(tail, tail_rot)),
    }
}

/// Pulls a gradient on a unit-normalised element back to the raw element.
#[inline]
fn through_normalization<const N: usize>(g: &[f64; N], unit: &[f64; N], norm: f64) -> [f64; N] {
    let along = dot(unit, g);
    core::array::from_fn(|c| (g[c] - unit[c] * along) / norm)
}

fn score_generic<const N: usize>(mt: &MulTable<N>, table: &EmbeddingTable, t: Triple) -> Result<f64> {
    let family = table.variant.family();
    let mut score = 0.0;
    for d in 0..table.dim {
        let (rel, _) = table.relation_element::<N>(&table.relations, t.relation, d)?;
        let (rot, _) = table.tail_rotation_element::<N>(t.relation, d)?;
        let h = table.entities.element::<N>(t.head, d);
        let tl = table.entities.element::<N>(t.tail, d);
        score += score_element(mt, family, &h, &rel, &tl, &rot);
    }
    Ok(score)
}

fn query_generic<const N: usize>(
    mt: &MulTable<N>,
    table: &EmbeddingTable,
    fixed: u32,
    relation: u32,
    direction: Direction,
) -> Result<Vec<f64>> {
    let family = table.variant.family();
    let k = table.dim;
    let mut out = vec![0.0; N * k];
    for d in 0..k {
        let (rel, _) = table.relation_element::<N>(&table.relations, relation, d)?;
        let (rot, _) = table.tail_rotation_element::<N>(relation, d)?;
        let x = table.entities.element::<N>(fixed, d);
        let q = match direction {
            Direction::Tail => tail_query_element(mt, family, &x, &rel, &rot),
            Direction::Head => head_query_element(mt, family, &rel, &x, &rot),
        };
        for c in 0..N {
            out[c * k + d] = q[c];
        }
    }
    Ok(out)
}

fn gradient_generic<const N: usize>(mt: &MulTable<N>, table: &EmbeddingTable, t: Triple) -> Result<TripleGradient> {
    let variant = table.variant;
    let family = variant.family();
    let k = table.dim;
    let active = variant.active_units();
    let mut out = TripleGradient {
        score: 0.0,
        head: vec![0.0; N * k],
        relation: vec![0.0; N * k],
        tail: vec![0.0; N * k],
        tail_rotation: variant.has_tail_rotation().then(|| vec![0.0; N * k]),
    };
    for d in 0..k {
        let (rel, rel_norm) = table.relation_element::<N>(&table.relations, t.relation, d)?;
        let (rot, rot_norm) = table.tail_rotation_element::<N>(t.relation, d)?;
        let h = table.entities.element::<N>(t.head, d);
        let tl = table.entities.element::<N>(t.tail, d);

        out.score += score_element(mt, family, &h, &rel, &tl, &rot);
        let g_tail = tail_query_element(mt, family, &h, &rel, &rot);
        let g_head = head_query_element(mt, family, &rel, &tl, &rot);
        let (g_rel, g_rot) = match family {
            Family::Rotation => (mt.right_grad(&h, &tl), None),
            Family::Weighted => (mt.mul(&h, &tl), None),
            Family::Dual => {
                let rotated_head = mt.mul(&h, &rel);
                let rotated_tail = mt.mul(&tl, &rot);
                (
                    mt.right_grad(&h, &rotated_tail),
                    Some(mt.right_grad(&tl, &rotated_head)),
                )
            }
        };
        let g_rel = if variant.normalizes_relations() {
            through_normalization(&g_rel, &rel, rel_norm)
        } else {
            g_rel
        };
        for c in 0..active {
            out.head[c * k + d] = g_head[c];
            out.tail[c * k + d] = g_tail[c];
            out.relation[c * k + d] = g_rel[c];
        }
        if let (Some(g_rot), Some(buf)) = (g_rot, out.tail_rotation.as_mut()) {
            let g_rot = through_normalization(&g_rot, &rot, rot_norm);
            for c in 0..active {
                buf[c * k + d] = g_rot[c];
            }
        }
    }
    Ok(out)
}

/// Plausibility of a triple under the table's variant.
pub fn score_triple(table: &EmbeddingTable, triple: Triple) -> Result<f64> {
    table.check_triple(triple)?;
    match table.kind() {
        NumericKind::Quaternion => score_generic(&HAMILTON, table, triple),
        NumericKind::Octonion => score_generic(&CAYLEY, table, triple),
    }
}

/// The vector whose inner product with a candidate entity's flattened
/// embedding is that candidate's score.
///
/// For [`Direction::Tail`], `fixed` is the head; for [`Direction::Head`] it is
/// the tail.
pub fn query_vector(table: &EmbeddingTable, fixed: u32, relation: u32, direction: Direction) -> Result<Vec<f64>> {
    table.check_entity(fixed)?;
    table.check_relation(relation)?;
    match table.kind() {
        NumericKind::Quaternion => query_generic(&HAMILTON, table, fixed, relation, direction),
        NumericKind::Octonion => query_generic(&CAYLEY, table, fixed, relation, direction),
    }
}

#[inline]
fn candidate_score(entities: &EmbeddingMatrix, query: &[f64], id: u32) -> f64 {
    let k = entities.dim();
    query
        .chunks_exact(k)
        .enumerate()
        .map(|(c, q)| dot_slices(q, entities.row(c, id)))
        .sum()
}

#[inline]
fn dot_slices(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

/// Scores `candidates` in the open slot of `(fixed, relation, ?)` or
/// `(?, relation, fixed)`, computing the rotated query once.
pub fn score_candidates(
    table: &EmbeddingTable,
    fixed: u32,
    relation: u32,
    direction: Direction,
    candidates: &[u32],
) -> Result<Vec<f64>> {
    for &c in candidates {
        table.check_entity(c)?;
    }
    let query = query_vector(table, fixed, relation, direction)?;
    Ok(candidates
        .iter()
        .map(|&c| candidate_score(&table.entities, &query, c))
        .collect())
}

/// Scores every entity in the open slot.
pub fn score_all(table: &EmbeddingTable, fixed: u32, relation: u32, direction: Direction) -> Result<Vec<f64>> {
    let query = query_vector(table, fixed, relation, direction)?;
    Ok((0..table.num_entities() as u32)
        .map(|c| candidate_score(&table.entities, &query, c))
        .collect())
}

/// Analytic gradient of the score with respect to every coordinate involved.
pub fn score_gradients(table: &EmbeddingTable, triple: Triple) -> Result<TripleGradient> {
    table.check_triple(triple)?;
    match table.kind() {
        NumericKind::Quaternion => gradient_generic(&HAMILTON, table, triple),
        NumericKind::Octonion => gradient_generic(&CAYLEY, table, triple),
    }
}
