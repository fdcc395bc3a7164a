//! Binary checkpoints.
//!
//! Layout, all integers little-endian:
//!
//! ```text
//! 0   magic "QKGE"
//! 4   format version, u16
//! 6   variant tag, u8
//! 7   numeric kind, u8 (0 quaternion, 1 octonion)
//! 8   reciprocal flag, u8
//! 9   3 reserved zero bytes
//! 12  N entities, u64
//! 20  M relations (after reciprocal augmentation), u64
//! 28  k, u64
//! 36  payload: f32 coordinates
//! ..  FNV-1a 64 checksum of the payload bytes, u64
//! ```
//!
//! The payload holds the entity matrix, then the relation matrix, then (for
//! the dual-rotation variant) the tail-rotation matrix. Each matrix is stored
//! unit-major: every row's first unit, then every row's second unit, and so
//! on; within a unit, row by row, `k` values per row.

use std::fs;
use std::path::Path;

use hyperkge_core::model::EmbeddingMatrix;
use hyperkge_core::{EmbeddingTable, ModelVariant, NumericKind};

use crate::error::{Error, Result};

pub const MAGIC: [u8; 4] = *b"QKGE";
pub const VERSION: u16 = 1;
pub const HEADER_LEN: usize = 36;

#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint {
    pub table: EmbeddingTable,
    pub reciprocal: bool,
}

pub fn fnv1a64(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xcbf2_9ce4_8422_2325, |h, &b| (h ^ u64::from(b)).wrapping_mul(0x0000_0100_0000_01b3))
}

fn matrices(table: &EmbeddingTable) -> impl Iterator<Item = &EmbeddingMatrix> {
    [Some(table.entities()), Some(table.relations()), table.tail_rotations()]
        .into_iter()
        .flatten()
}

pub fn encode(table: &EmbeddingTable, reciprocal: bool) -> Vec<u8> {
    let mut out = Vec::with_capacity(HEADER_LEN + 8 + table.parameter_count() * 4);
    out.extend_from_slice(&MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.push(table.variant().tag());
    out.push(table.kind().tag());
    out.push(u8::from(reciprocal));
    out.extend_from_slice(&[0; 3]);
    for n in [table.num_entities(), table.num_relations(), table.dim()] {
        out.extend_from_slice(&(n as u64).to_le_bytes());
    }
    for m in matrices(table) {
        for part in m.parts() {
            for &v in part {
                out.extend_from_slice(&(v as f32).to_le_bytes());
            }
        }
    }
    let sum = fnv1a64(&out[HEADER_LEN..]);
    out.extend_from_slice(&sum.to_le_bytes());
    out
}

fn fail<T>(message: impl Into<String>) -> Result<T> {
    Err(Error::Checkpoint(message.into()))
}

fn u64_at(bytes: &[u8], at: usize) -> u64 {
    u64::from_le_bytes(bytes[at..at + 8].try_into().unwrap())
}

pub fn decode(bytes: &[u8]) -> Result<Checkpoint> {
    if bytes.len() < HEADER_LEN + 8 {
        return fail(format!("{} bytes is shorter than header and footer", bytes.len()));
    }
    if bytes[..4] != MAGIC {
        return fail("bad magic, not a checkpoint file");
    }
    let version = u16::from_le_bytes([bytes[4], bytes[5]]);
    if version != VERSION {
        return fail(format!("unsupported format version {version}"));
    }
    let Some(variant) = ModelVariant::from_tag(bytes[6]) else {
        return fail(format!("unknown variant tag {}", bytes[6]));
    };
    let Some(kind) = NumericKind::from_tag(bytes[7]) else {
        return fail(format!("unknown numeric kind tag {}", bytes[7]));
    };
    if kind != variant.kind() {
        return fail(format!("variant {variant} stored with numeric kind tag {}", bytes[7]));
    }
    let reciprocal = match bytes[8] {
        0 => false,
        1 => true,
        b => return fail(format!("bad reciprocal flag {b}")),
    };
    let (n, m, k) = (u64_at(bytes, 12), u64_at(bytes, 20), u64_at(bytes, 28));
    let units = kind.units() as u64;
    let rows = n + m * if variant.has_tail_rotation() { 2 } else { 1 };
    let values = rows.checked_mul(k).and_then(|x| x.checked_mul(units));
    let expected = values.and_then(|v| v.checked_mul(4)).and_then(|b| b.checked_add(HEADER_LEN as u64 + 8));
    if expected != Some(bytes.len() as u64) {
        return fail(format!(
            "header declares N={n}, M={m}, k={k} but the file has {} bytes",
            bytes.len()
        ));
    }
    let payload = &bytes[HEADER_LEN..bytes.len() - 8];
    let stored = u64_at(bytes, bytes.len() - 8);
    let computed = fnv1a64(payload);
    if stored != computed {
        return Err(Error::Checksum { stored, computed });
    }

    let (n, m, k) = (n as usize, m as usize, k as usize);
    let mut floats = payload
        .chunks_exact(4)
        .map(|c| f64::from(f32::from_le_bytes(c.try_into().unwrap())));
    let mut matrix = |rows: usize| {
        let parts = (0..kind.units())
            .map(|_| floats.by_ref().take(rows * k).collect())
            .collect();
        EmbeddingMatrix::from_parts(rows, k, parts)
    };
    let entities = matrix(n)?;
    let relations = matrix(m)?;
    let tails = if variant.has_tail_rotation() { Some(matrix(m)?) } else { None };
    let table = EmbeddingTable::from_matrices(variant, entities, relations, tails)?;
    Ok(Checkpoint { table, reciprocal })
}

pub fn save(path: &Path, table: &EmbeddingTable, reciprocal: bool) -> Result<()> {
    fs::write(path, encode(table, reciprocal)).map_err(|e| Error::io(path, e))
}

pub fn load(path: &Path) -> Result<Checkpoint> {
    decode(&fs::read(path).map_err(|e| Error::io(path, e))?)
}
