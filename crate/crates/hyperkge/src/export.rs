//! Text dump of a table: one line per entity or relation, `name` followed by
//! one tab-separated field per dimension holding that dimension's
//! comma-separated coordinates.
//!
//! ```text
//! # hyperkge variant=quate dim=2 reciprocal=false
//! ## entities
//! alice	0.1,-0.2,0.3,0	0.5,0.5,0.5,0.5
//! ## relations
//! likes	1,0,0,0	0,1,0,0
//! ```
//!
//! Values are printed as the shortest decimal that reads back to the same
//! `f32`, so a dump of an imported dump is byte-identical.

use std::fmt::Write;

use hyperkge_core::graph::Interner;
use hyperkge_core::model::EmbeddingMatrix;
use hyperkge_core::{EmbeddingTable, ModelVariant, Vocabulary};

use crate::checkpoint::Checkpoint;
use crate::error::{Error, Result};

const SECTIONS: [&str; 3] = ["entities", "relations", "tail_rotations"];

fn dump_matrix(out: &mut String, m: &EmbeddingMatrix, names: &Interner) -> Result<()> {
    for id in 0..m.rows() as u32 {
        let name = names
            .name(id)
            .ok_or_else(|| Error::Mismatch(format!("dictionary has no name for id {id}")))?;
        out.push_str(name);
        for d in 0..m.dim() {
            out.push('\t');
            for c in 0..m.units() {
                if c > 0 {
                    out.push(',');
                }
                let _ = write!(out, "{}", m.row(c, id)[d] as f32);
            }
        }
        out.push('\n');
    }
    Ok(())
}

pub fn export_tsv(checkpoint: &Checkpoint, vocab: &Vocabulary) -> Result<String> {
    let table = &checkpoint.table;
    if vocab.num_entities() != table.num_entities() || vocab.num_relations() != table.num_relations() {
        return Err(Error::Mismatch(format!(
            "dictionaries list {} entities and {} relations, checkpoint has {} and {}",
            vocab.num_entities(),
            vocab.num_relations(),
            table.num_entities(),
            table.num_relations()
        )));
    }
    let mut out = String::new();
    let _ = writeln!(
        out,
        "# hyperkge variant={} dim={} reciprocal={}",
        table.variant(),
        table.dim(),
        checkpoint.reciprocal
    );
    let groups = [
        Some((table.entities(), &vocab.entities)),
        Some((table.relations(), &vocab.relations)),
        table.tail_rotations().map(|m| (m, &vocab.relations)),
    ];
    for (section, group) in SECTIONS.iter().zip(groups) {
        if let Some((m, names)) = group {
            let _ = writeln!(out, "## {section}");
            dump_matrix(&mut out, m, names)?;
        }
    }
    Ok(out)
}

struct Rows {
    names: Interner,
    values: Vec<Vec<f64>>,
}

/// Reads a dump back into a checkpoint and its vocabulary.
pub fn import_tsv(text: &str, source_name: &str) -> Result<(Checkpoint, Vocabulary)> {
    let bad = |line: usize, message: String| Error::Parse {
        source_name: source_name.to_string(),
        line,
        message,
    };
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let (_, header) = lines.next().ok_or_else(|| bad(1, "empty file".into()))?;
    let mut variant = None;
    let mut dim = None;
    let mut reciprocal = None;
    let Some(fields) = header.strip_prefix("# hyperkge ") else {
        return Err(bad(1, "missing '# hyperkge' header".into()));
    };
    for field in fields.split_whitespace() {
        match field.split_once('=') {
            Some(("variant", v)) => variant = Some(v.parse::<ModelVariant>().map_err(|e| bad(1, e.to_string()))?),
            Some(("dim", v)) => dim = Some(v.parse::<usize>().map_err(|_| bad(1, format!("bad dim {v:?}")))?),
            Some(("reciprocal", v)) => {
                reciprocal = Some(v.parse::<bool>().map_err(|_| bad(1, format!("bad reciprocal flag {v:?}")))?)
            }
            _ => return Err(bad(1, format!("unknown header field {field:?}"))),
        }
    }
    let (Some(variant), Some(dim), Some(reciprocal)) = (variant, dim, reciprocal) else {
        return Err(bad(1, "header needs variant, dim and reciprocal".into()));
    };
    let units = variant.kind().units();

    let mut groups: Vec<Rows> = Vec::new();
    for (n, line) in lines {
        if let Some(section) = line.strip_prefix("## ").filter(|_| !line.contains('\t')) {
            if SECTIONS.get(groups.len()) != Some(&section) {
                return Err(bad(n, format!("unexpected section {section:?}")));
            }
            groups.push(Rows {
                names: Interner::default(),
                values: vec![Vec::new(); units],
            });
            continue;
        }
        let group = groups.last_mut().ok_or_else(|| bad(n, "row before any section".into()))?;
        let mut fields = line.split('\t');
        let name = fields.next().unwrap_or_default();
        let before = group.names.len();
        group.names.intern(name);
        if group.names.len() == before {
            return Err(bad(n, format!("duplicate name {name:?}")));
        }
        let mut count = 0;
        for field in fields {
            let coords: Vec<&str> = field.split(',').collect();
            if coords.len() != units {
                return Err(bad(n, format!("expected {units} coordinates, found {}", coords.len())));
            }
            for (c, v) in coords.iter().enumerate() {
                let x: f32 = v.parse().map_err(|_| bad(n, format!("bad number {v:?}")))?;
                group.values[c].push(f64::from(x));
            }
            count += 1;
        }
        if count != dim {
            return Err(bad(n, format!("expected {dim} dimensions, found {count}")));
        }
    }

    let expected = if variant.has_tail_rotation() { 3 } else { 2 };
    if groups.len() != expected {
        return Err(bad(text.lines().count(), format!("expected {expected} sections, found {}", groups.len())));
    }
    let mut groups = groups.into_iter();
    let mut next = || {
        let g = groups.next().unwrap();
        let m = EmbeddingMatrix::from_parts(g.names.len(), dim, g.values);
        m.map(|m| (m, g.names))
    };
    let (entities, entity_names) = next()?;
    let (relations, relation_names) = next()?;
    let tails = if variant.has_tail_rotation() {
        let (m, names) = next()?;
        if names != relation_names {
            return Err(Error::Mismatch("tail rotation names differ from relation names".into()));
        }
        Some(m)
    } else {
        None
    };
    let table = EmbeddingTable::from_matrices(variant, entities, relations, tails)?;
    let vocab = Vocabulary {
        entities: entity_names,
        relations: relation_names,
    };
    Ok((Checkpoint { table, reciprocal }, vocab))
}
