//! The data files under `data/`: cycle shapes, T̃ atoms, and the principal-part tables.
//!
//! Copies are embedded at build time; [`DataSet::from_dir`] reads a replacement set.

use crate::exact_algebra::rational::parse_q;
use crate::exact_algebra::Q;
use crate::modular_blocks::TTildeAtom;
use serde::Deserialize;
use std::collections::BTreeMap;
use std::path::Path;
use std::sync::OnceLock;

pub const CLASSES_TOML: &str = include_str!("../../../data/classes.toml");
pub const TTILDE_TOML: &str = include_str!("../../../data/ttilde.toml");
pub const APPENDIX_A_TOML: &str = include_str!("../../../data/appendix_a.toml");
pub const APPENDIX_B_TOML: &str = include_str!("../../../data/appendix_b.toml");

pub const FILE_NAMES: [&str; 4] = ["classes.toml", "ttilde.toml", "appendix_a.toml", "appendix_b.toml"];

#[derive(Debug, thiserror::Error)]
pub enum DataError {
    #[error("{file}: {source}")]
    Parse {
        file: String,
        #[source]
        source: toml::de::Error,
    },
    #[error("{file}: {detail}")]
    Invalid { file: String, detail: String },
    #[error("reading {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

fn invalid(file: &str, detail: impl Into<String>) -> DataError {
    DataError::Invalid { file: file.to_string(), detail: detail.into() }
}

fn rational(file: &str, s: &str) -> Result<Q, DataError> {
    parse_q(s).ok_or_else(|| invalid(file, format!("not a rational number: {s:?}")))
}

#[derive(Deserialize)]
struct ClassesFile {
    class: Vec<RawClass>,
}

#[derive(Deserialize, Clone, Debug)]
pub struct RawClass {
    pub name: String,
    pub shape: Vec<(u64, i64)>,
    pub order: u64,
    pub level: u64,
}

#[derive(Deserialize)]
struct TTildeFile {
    class: Vec<RawTTilde>,
}

#[derive(Deserialize)]
struct RawTTilde {
    name: String,
    #[serde(default)]
    source: String,
    atoms: Vec<RawAtom>,
}

#[derive(Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
enum RawAtom {
    Eta { factors: Vec<(u64, i64)>, coeff: String },
    E2n { level: u64, scale: u64, coeff: String },
}

/// T̃ atoms for one class with a note on where they come from.
#[derive(Clone, Debug)]
pub struct TTildeEntry {
    pub atoms: Vec<TTildeAtom>,
    pub source: String,
}

/// How a principal-part entry ranges over discriminant elements.
#[derive(Deserialize, Clone, Debug, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum SumKind {
    Single,
    Units,
    All,
    Pairs,
}

#[derive(Deserialize, Clone, Debug)]
pub struct RawTerm {
    pub coeff: String,
    pub exp: String,
    pub sum: SumKind,
    #[serde(default)]
    pub modulus: Option<u64>,
    #[serde(default)]
    pub products: Vec<i64>,
    pub label: [String; 3],
    #[serde(default)]
    pub note: Option<String>,
}

#[derive(Deserialize, Clone, Debug)]
pub struct RawInput {
    pub coeff: String,
    pub factors: Vec<(u64, i64)>,
}

/// One class of a principal-part table.
#[derive(Deserialize, Clone, Debug)]
pub struct TableClass {
    pub name: String,
    #[serde(default)]
    pub chi: Option<i64>,
    /// Rows q⁰, q¹, q² of the input φ₁: coefficients of ζ^{±k}, k descending, then ζ⁰.
    pub rows: Vec<Vec<i64>>,
    #[serde(default)]
    pub family: BTreeMap<String, String>,
    #[serde(default)]
    pub input: Option<RawInput>,
    pub constant: i64,
    #[serde(default)]
    pub term: Vec<RawTerm>,
}

#[derive(Deserialize)]
struct TableFile {
    class: Vec<TableClass>,
}

/// Everything read from the data directory.
#[derive(Clone, Debug)]
pub struct DataSet {
    pub classes: Vec<RawClass>,
    pub ttilde: BTreeMap<String, TTildeEntry>,
    pub appendix_a: Vec<TableClass>,
    pub appendix_b: Vec<TableClass>,
    /// Fingerprint of the four source texts, used as a cache key.
    pub fingerprint: u64,
}

fn parse<T: for<'de> Deserialize<'de>>(file: &str, text: &str) -> Result<T, DataError> {
    toml::from_str(text).map_err(|source| DataError::Parse { file: file.to_string(), source })
}

impl DataSet {
    pub fn from_texts(classes: &str, ttilde: &str, appendix_a: &str, appendix_b: &str) -> Result<Self, DataError> {
        let cf: ClassesFile = parse("classes.toml", classes)?;
        let tf: TTildeFile = parse("ttilde.toml", ttilde)?;
        let af: TableFile = parse("appendix_a.toml", appendix_a)?;
        let bf: TableFile = parse("appendix_b.toml", appendix_b)?;
        let mut tt = BTreeMap::new();
        for entry in tf.class {
            let mut atoms = Vec::new();
            for a in entry.atoms {
                atoms.push(match a {
                    RawAtom::Eta { factors, coeff } => {
                        let mut seen = factors.iter().map(|f| f.0).collect::<Vec<_>>();
                        seen.sort_unstable();
                        seen.dedup();
                        if seen.len() != factors.len() || factors.iter().any(|f| f.0 == 0) {
                            return Err(invalid("ttilde.toml", format!("{}: bad eta factors", entry.name)));
                        }
                        TTildeAtom::eta(factors, rational("ttilde.toml", &coeff)?)
                    }
                    RawAtom::E2n { level, scale, coeff } => {
                        if level < 2 || scale == 0 {
                            return Err(invalid("ttilde.toml", format!("{}: E2N needs level ≥ 2", entry.name)));
                        }
                        TTildeAtom::e2n(level, scale, rational("ttilde.toml", &coeff)?)
                    }
                });
            }
            if tt.insert(entry.name.clone(), TTildeEntry { atoms, source: entry.source }).is_some() {
                return Err(invalid("ttilde.toml", format!("duplicate class {}", entry.name)));
            }
        }
        for t in af.class.iter().chain(&bf.class) {
            for term in &t.term {
                rational("appendix", &term.coeff)?;
                rational("appendix", &term.exp)?;
                if term.sum != SumKind::Single && term.modulus.is_none() {
                    return Err(invalid("appendix", format!("{}: summed term without modulus", t.name)));
                }
            }
        }
        Ok(DataSet {
            classes: cf.class,
            ttilde: tt,
            appendix_a: af.class,
            appendix_b: bf.class,
            fingerprint: fingerprint(&[classes, ttilde, appendix_a, appendix_b]),
        })
    }

    pub fn from_dir(dir: &Path) -> Result<Self, DataError> {
        let mut texts = Vec::new();
        for f in FILE_NAMES {
            let p = dir.join(f);
            texts.push(
                std::fs::read_to_string(&p)
                    .map_err(|source| DataError::Io { path: p.display().to_string(), source })?,
            );
        }
        Self::from_texts(&texts[0], &texts[1], &texts[2], &texts[3])
    }

    pub fn appendix_a_class(&self, name: &str) -> Option<&TableClass> {
        self.appendix_a.iter().find(|c| c.name == name)
    }

    pub fn appendix_b_class(&self, name: &str) -> Option<&TableClass> {
        self.appendix_b.iter().find(|c| c.name == name)
    }
}

/// FNV-1a over the concatenated texts.
fn fingerprint(texts: &[&str]) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    for t in texts {
        for b in t.bytes().chain([0xff]) {
            h ^= b as u64;
            h = h.wrapping_mul(0x100000001b3);
        }
    }
    h
}

static DATA: OnceLock<DataSet> = OnceLock::new();

/// The active data set: the one passed to [`install`], or the embedded copy.
pub fn builtin() -> &'static DataSet {
    DATA.get_or_init(|| {
        DataSet::from_texts(CLASSES_TOML, TTILDE_TOML, APPENDIX_A_TOML, APPENDIX_B_TOML)
            .expect("embedded data files are valid")
    })
}

/// Makes `data` the active data set. Fails once any computation has read the data.
pub fn install(data: DataSet) -> Result<&'static DataSet, DataSet> {
    DATA.set(data)?;
    Ok(builtin())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_loads() {
        let d = builtin();
        assert_eq!(d.classes.len(), 21);
        assert_eq!(d.ttilde.len(), 21);
        assert_eq!(d.appendix_a.len(), 21);
        assert_eq!(d.appendix_b.len(), 2);
        assert!(d.ttilde["1A"].atoms.is_empty());
    }

    #[test]
    fn bad_coefficient_is_reported() {
        let bad = TTILDE_TOML.replace("\"4/3\"", "\"4/x\"");
        let err = DataSet::from_texts(CLASSES_TOML, &bad, APPENDIX_A_TOML, APPENDIX_B_TOML).unwrap_err();
        assert!(err.to_string().contains("4/x"));
    }
}
