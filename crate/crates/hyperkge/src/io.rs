//! Dataset directories and dictionary files.

use std::fs;
use std::path::{Path, PathBuf};

use hyperkge_core::graph::{parse_splits, Interner, LoadSummary, SplitText};
use hyperkge_core::{Split, TripleStore, Vocabulary};

use crate::error::{Error, Result};

/// Root for dataset names that are not existing paths.
pub const DATA_ENV: &str = "HYPERKGE_DATA";

pub struct Dataset {
    pub dir: PathBuf,
    pub vocab: Vocabulary,
    pub store: TripleStore,
    pub summary: LoadSummary,
}

/// An existing directory as given, otherwise `$HYPERKGE_DATA/<name>`.
pub fn resolve_data_dir(name: &str) -> Result<PathBuf> {
    let direct = PathBuf::from(name);
    if direct.is_dir() {
        return Ok(direct);
    }
    if let Some(root) = std::env::var_os(DATA_ENV) {
        let under = Path::new(&root).join(name);
        if under.is_dir() {
            return Ok(under);
        }
        return Err(Error::Mismatch(format!(
            "dataset {name} is neither a directory nor found under {}",
            under.display()
        )));
    }
    Err(Error::Mismatch(format!(
        "dataset directory {name} does not exist (set {DATA_ENV} to resolve dataset names)"
    )))
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

/// Loads `train.txt`, `valid.txt` and `test.txt` from `dir`.
pub fn load_dataset(dir: &Path) -> Result<Dataset> {
    let paths = Split::ALL.map(|s| dir.join(format!("{}.txt", s.name())));
    let texts = [read(&paths[0])?, read(&paths[1])?, read(&paths[2])?];
    let labels = paths.each_ref().map(|p| p.display().to_string());
    let split = |i: usize| SplitText {
        label: &labels[i],
        text: &texts[i],
    };
    let (vocab, store, summary) = parse_splits(split(0), split(1), split(2))?;
    Ok(Dataset {
        dir: dir.to_path_buf(),
        vocab,
        store,
        summary,
    })
}

/// `id<TAB>name` per line.
pub fn write_dictionary(path: &Path, names: &Interner) -> Result<()> {
    let mut out = String::new();
    for (id, name) in names.names().enumerate() {
        out.push_str(&format!("{id}\t{name}\n"));
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

/// Reads a dictionary written by [`write_dictionary`]; ids must be dense and
/// in order.
pub fn read_dictionary(path: &Path) -> Result<Interner> {
    let text = read(path)?;
    let mut names = Interner::default();
    for (i, line) in text.lines().enumerate() {
        let bad = |message: String| Error::Parse {
            source_name: path.display().to_string(),
            line: i + 1,
            message,
        };
        let (id, name) = line.split_once('\t').ok_or_else(|| bad("expected id<TAB>name".into()))?;
        let id: usize = id.parse().map_err(|_| bad(format!("bad id {id:?}")))?;
        if id != names.len() {
            return Err(bad(format!("expected id {}, found {id}", names.len())));
        }
        names.intern(name);
        if names.len() != id + 1 {
            return Err(bad(format!("duplicate name {name:?}")));
        }
    }
    Ok(names)
}

pub fn write_vocabulary(dir: &Path, vocab: &Vocabulary) -> Result<()> {
    write_dictionary(&dir.join("entities.dict"), &vocab.entities)?;
    write_dictionary(&dir.join("relations.dict"), &vocab.relations)
}

pub fn read_vocabulary(dir: &Path) -> Result<Vocabulary> {
    Ok(Vocabulary {
        entities: read_dictionary(&dir.join("entities.dict"))?,
        relations: read_dictionary(&dir.join("relations.dict"))?,
    })
}
