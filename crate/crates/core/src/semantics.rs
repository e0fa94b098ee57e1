//! Multilingual word embeddings, gold semantic matrices and cosine statistics.
//!
//! Embedding files are plain text: an optional `<count> <dimension>` header,
//! then one `key v1 v2 ...` row per line. Keys are either ConceptNet style
//! `/c/<lang>/<form>` or `<lang>/<form>`.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fs::File;
use std::io::{self, BufRead, BufReader, Write};
use std::path::Path;

use nalgebra::DMatrix;
use thiserror::Error;

use crate::pipeline::CognateTable;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SemanticsError {
    #[error("line {line}: expected {expected} values, found {found}")]
    DimensionMismatch {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("line {line}: {message}")]
    MalformedLine { line: usize, message: String },
    #[error("duplicate embedding for {language}/{form}")]
    DuplicateKey { language: String, form: String },
    #[error("no embeddings matched the requested languages")]
    EmptyStore,
    #[error("no embedding for {language}/{form}")]
    MissingWord { language: String, form: String },
    #[error("vector lengths differ: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("cannot read embeddings: {0}")]
    Io(String),
}

impl From<io::Error> for SemanticsError {
    fn from(e: io::Error) -> Self {
        SemanticsError::Io(e.to_string())
    }
}

/// Lowercases and replaces spaces by underscores, following Numberbatch keys.
pub fn normalize_form(form: &str) -> String {
    form.trim().to_lowercase().replace(' ', "_")
}

/// Splits `/c/en/drink` or `en/drink` into language and normalized form.
fn parse_key(key: &str) -> Option<(String, String)> {
    let rest = key.strip_prefix("/c/").unwrap_or(key);
    let (language, form) = rest.split_once('/')?;
    if language.is_empty() || form.is_empty() || form.contains('/') {
        return None;
    }
    Some((language.to_string(), normalize_form(form)))
}

/// Immutable map from (language, form) to an embedding vector.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingStore {
    dimension: usize,
    vectors: HashMap<(String, String), Vec<f64>>,
}

impl EmbeddingStore {
    /// Builds a store from in-memory vectors; every vector must have `dimension` entries.
    pub fn from_vectors<I, L, F>(dimension: usize, vectors: I) -> Result<Self, SemanticsError>
    where
        I: IntoIterator<Item = (L, F, Vec<f64>)>,
        L: Into<String>,
        F: AsRef<str>,
    {
        let mut map = HashMap::new();
        for (i, (language, form, v)) in vectors.into_iter().enumerate() {
            if v.len() != dimension {
                return Err(SemanticsError::DimensionMismatch {
                    line: i + 1,
                    expected: dimension,
                    found: v.len(),
                });
            }
            let key = (language.into(), normalize_form(form.as_ref()));
            if map.contains_key(&key) {
                return Err(SemanticsError::DuplicateKey {
                    language: key.0,
                    form: key.1,
                });
            }
            map.insert(key, v);
        }
        if dimension == 0 || map.is_empty() {
            return Err(SemanticsError::EmptyStore);
        }
        Ok(Self {
            dimension,
            vectors: map,
        })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn contains(&self, language: &str, form: &str) -> bool {
        self.vectors
            .contains_key(&(language.to_string(), normalize_form(form)))
    }

    /// The stored vector, or `MissingWord`. Never fabricates a vector.
    pub fn get_vector(&self, language: &str, form: &str) -> Result<&[f64], SemanticsError> {
        self.vectors
            .get(&(language.to_string(), normalize_form(form)))
            .map(Vec::as_slice)
            .ok_or_else(|| SemanticsError::MissingWord {
                language: language.to_string(),
                form: form.to_string(),
            })
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str, &[f64])> {
        self.vectors
            .iter()
            .map(|((l, f), v)| (l.as_str(), f.as_str(), v.as_slice()))
    }
}

/// Reads an embedding file keeping only `languages` (and `vocabulary`, when given).
pub fn load_embeddings(
    path: impl AsRef<Path>,
    languages: &BTreeSet<String>,
    vocabulary: Option<&HashSet<(String, String)>>,
) -> Result<EmbeddingStore, SemanticsError> {
    let file = File::open(path)?;
    parse_embeddings(BufReader::new(file), languages, vocabulary)
}

/// [`load_embeddings`] over any buffered reader.
///
/// The dimension comes from the header when present, otherwise from the first
/// row, and every later row is checked against it whether or not it is kept.
pub fn parse_embeddings<R: BufRead>(
    reader: R,
    languages: &BTreeSet<String>,
    vocabulary: Option<&HashSet<(String, String)>>,
) -> Result<EmbeddingStore, SemanticsError> {
    let vocabulary: Option<HashSet<(String, String)>> = vocabulary.map(|v| {
        v.iter()
            .map(|(l, f)| (l.clone(), normalize_form(f)))
            .collect()
    });
    let mut dimension: Option<usize> = None;
    let mut vectors = HashMap::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = i + 1;
        let line = line.trim_end_matches('\r');
        if line.is_empty() {
            continue;
        }
        let mut fields = line.split(' ');
        let key = fields.next().unwrap_or_default();
        let values: Vec<&str> = fields.collect();
        if i == 0 && values.len() == 1 {
            if let (Ok(_), Ok(dim)) = (key.parse::<usize>(), values[0].parse::<usize>()) {
                dimension = Some(dim);
                continue;
            }
        }
        let expected = *dimension.get_or_insert(values.len());
        if values.len() != expected {
            return Err(SemanticsError::DimensionMismatch {
                line: lineno,
                expected,
                found: values.len(),
            });
        }
        let Some((language, form)) = parse_key(key) else {
            return Err(SemanticsError::MalformedLine {
                line: lineno,
                message: format!("unrecognized key `{key}`"),
            });
        };
        if !languages.contains(&language) {
            continue;
        }
        let key = (language, form);
        if let Some(vocab) = &vocabulary {
            if !vocab.contains(&key) {
                continue;
            }
        }
        let vector = values
            .iter()
            .map(|v| v.parse::<f64>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| SemanticsError::MalformedLine {
                line: lineno,
                message: e.to_string(),
            })?;
        if vector.iter().any(|x| !x.is_finite()) {
            return Err(SemanticsError::MalformedLine {
                line: lineno,
                message: "non-finite value".into(),
            });
        }
        if vectors.contains_key(&key) {
            return Err(SemanticsError::DuplicateKey {
                language: key.0,
                form: key.1,
            });
        }
        vectors.insert(key, vector);
    }
    match dimension {
        Some(dimension) if dimension > 0 && !vectors.is_empty() => Ok(EmbeddingStore {
            dimension,
            vectors,
        }),
        _ => Err(SemanticsError::EmptyStore),
    }
}

/// Cosine similarity, clamped to [-1, 1]. Zero when either vector is zero.
pub fn cosine(u: &[f64], v: &[f64]) -> Result<f64, SemanticsError> {
    if u.len() != v.len() {
        return Err(SemanticsError::LengthMismatch(u.len(), v.len()));
    }
    let (mut dot, mut nu, mut nv) = (0.0, 0.0, 0.0);
    for (a, b) in u.iter().zip(v) {
        dot += a * b;
        nu += a * a;
        nv += b * b;
    }
    if nu == 0.0 || nv == 0.0 {
        return Ok(0.0);
    }
    Ok((dot / (nu.sqrt() * nv.sqrt())).clamp(-1.0, 1.0))
}

/// Gold semantic vectors, one row per word.
#[derive(Debug, Clone, PartialEq)]
pub struct SemanticMatrix {
    matrix: DMatrix<f64>,
    row_words: Vec<String>,
}

impl SemanticMatrix {
    pub fn new(matrix: DMatrix<f64>, row_words: Vec<String>) -> Self {
        assert_eq!(matrix.nrows(), row_words.len(), "one word id per row");
        Self { matrix, row_words }
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn row_words(&self) -> &[String] {
        &self.row_words
    }

    pub fn nrows(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn dimension(&self) -> usize {
        self.matrix.ncols()
    }
}

/// Stacks the vectors of `(language, form, word id)` triples in input order.
pub fn build_semantic_matrix<I, L, F, W>(
    store: &EmbeddingStore,
    words: I,
) -> Result<SemanticMatrix, SemanticsError>
where
    I: IntoIterator<Item = (L, F, W)>,
    L: AsRef<str>,
    F: AsRef<str>,
    W: Into<String>,
{
    let mut data = Vec::new();
    let mut ids = Vec::new();
    for (language, form, id) in words {
        data.extend_from_slice(store.get_vector(language.as_ref(), form.as_ref())?);
        ids.push(id.into());
    }
    let matrix = DMatrix::from_row_slice(ids.len(), store.dimension(), &data);
    Ok(SemanticMatrix::new(matrix, ids))
}

/// Per-cognate-set cosine between two languages' word vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct CosineReport {
    pub language_pair: (String, String),
    pub values: Vec<(String, f64)>,
}

impl CosineReport {
    pub fn median(&self) -> Option<f64> {
        let mut v: Vec<f64> = self.values.iter().map(|(_, c)| *c).collect();
        if v.is_empty() {
            return None;
        }
        v.sort_by(f64::total_cmp);
        let mid = v.len() / 2;
        Some(if v.len() % 2 == 0 {
            (v[mid - 1] + v[mid]) / 2.0
        } else {
            v[mid]
        })
    }

    /// `COGNATE_ID,LANG_A,LANG_B,COSINE` rows.
    pub fn write_csv<W: Write>(&self, out: W) -> io::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["COGNATE_ID", "LANG_A", "LANG_B", "COSINE"])?;
        let (a, b) = &self.language_pair;
        for (id, value) in &self.values {
            w.write_record([id.as_str(), a, b, &value.to_string()])?;
        }
        w.flush()
    }
}

pub fn pairwise_cosine_report(
    store: &EmbeddingStore,
    table: &CognateTable,
    pair: (&str, &str),
) -> Result<CosineReport, SemanticsError> {
    let (a, b) = pair;
    let mut values = Vec::with_capacity(table.set_count());
    for set in table.cognate_sets() {
        let lookup = |language: &str| -> Result<&[f64], SemanticsError> {
            let entry = table.entry(set, language).ok_or_else(|| {
                SemanticsError::MissingWord {
                    language: language.to_string(),
                    form: format!("<cognate set {set}>"),
                }
            })?;
            store.get_vector(language, entry.lookup_key())
        };
        values.push((set.to_string(), cosine(lookup(a)?, lookup(b)?)?));
    }
    Ok(CosineReport {
        language_pair: (a.to_string(), b.to_string()),
        values,
    })
}
