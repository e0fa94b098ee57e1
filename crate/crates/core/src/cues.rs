//! Binary n-gram cue matrices over boundary-marked sound-class strings.

use std::collections::HashMap;
use std::io::{self, Write};
use std::sync::Arc;

use nalgebra::DMatrix;
use thiserror::Error;

use crate::phonology::SoundClassSequence;

/// Word-edge marker added once before and once after every class string.
pub const BOUNDARY: char = '#';

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CueError {
    #[error("gram size must be at least 2, got {0}")]
    InvalidGramSize(usize),
    #[error("empty sound class sequence{}", fmt_word(.0))]
    EmptySequence(Option<String>),
    #[error("sequence{} of length {length} is too short for {n}-grams", fmt_word(.word_id))]
    SequenceTooShort {
        word_id: Option<String>,
        length: usize,
        n: usize,
    },
    #[error("duplicate word id {0}")]
    DuplicateWordId(String),
    #[error("{rows}x{cols} matrix does not fit {words} words and {cues} cues")]
    Shape {
        rows: usize,
        cols: usize,
        words: usize,
        cues: usize,
    },
    #[error("cue matrix entries must be 0 or 1")]
    NonBinary,
}

fn fmt_word(id: &Option<String>) -> String {
    id.as_ref().map(|id| format!(" {id}")).unwrap_or_default()
}

impl CueError {
    fn for_word(self, id: &str) -> Self {
        match self {
            CueError::SequenceTooShort { length, n, .. } => CueError::SequenceTooShort {
                word_id: Some(id.to_string()),
                length,
                n,
            },
            CueError::EmptySequence(_) => CueError::EmptySequence(Some(id.to_string())),
            other => other,
        }
    }
}

/// Sliding windows of width `n` over `"#" + classes + "#"`, in order, duplicates kept.
pub fn extract_ngrams(classes: &SoundClassSequence, n: usize) -> Result<Vec<String>, CueError> {
    if n < 2 {
        return Err(CueError::InvalidGramSize(n));
    }
    if classes.is_empty() {
        return Err(CueError::EmptySequence(None));
    }
    let marked: Vec<char> = std::iter::once(BOUNDARY)
        .chain(classes.classes().iter().map(|c| c.symbol()))
        .chain(std::iter::once(BOUNDARY))
        .collect();
    if marked.len() < n {
        return Err(CueError::SequenceTooShort {
            word_id: None,
            length: marked.len(),
            n,
        });
    }
    Ok(marked.windows(n).map(|w| w.iter().collect()).collect())
}

/// Bijection between cue strings and matrix columns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CueIndex {
    n: usize,
    cue_to_column: HashMap<String, usize>,
    column_to_cue: Vec<String>,
}

impl CueIndex {
    pub fn new(n: usize) -> Result<Self, CueError> {
        if n < 2 {
            return Err(CueError::InvalidGramSize(n));
        }
        Ok(Self {
            n,
            cue_to_column: HashMap::new(),
            column_to_cue: Vec::new(),
        })
    }

    /// Cue inventory of the given words, columns in first-occurrence order.
    pub fn from_words(words: &[(String, SoundClassSequence)], n: usize) -> Result<Self, CueError> {
        let mut index = Self::new(n)?;
        for (id, seq) in words {
            for gram in extract_ngrams(seq, n).map_err(|e| e.for_word(id))? {
                index.insert(gram);
            }
        }
        Ok(index)
    }

    /// Adds a cue if new and returns its column.
    pub fn insert(&mut self, cue: String) -> usize {
        if let Some(&col) = self.cue_to_column.get(&cue) {
            return col;
        }
        let col = self.column_to_cue.len();
        self.cue_to_column.insert(cue.clone(), col);
        self.column_to_cue.push(cue);
        col
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.column_to_cue.len()
    }

    pub fn is_empty(&self) -> bool {
        self.column_to_cue.is_empty()
    }

    pub fn column(&self, cue: &str) -> Option<usize> {
        self.cue_to_column.get(cue).copied()
    }

    pub fn cue(&self, column: usize) -> Option<&str> {
        self.column_to_cue.get(column).map(String::as_str)
    }

    pub fn cues(&self) -> &[String] {
        &self.column_to_cue
    }

    /// Writes `CUE<TAB>COLUMN` lines in column order.
    pub fn write_tsv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "CUE\tCOLUMN")?;
        for (col, cue) in self.column_to_cue.iter().enumerate() {
            writeln!(out, "{cue}\t{col}")?;
        }
        Ok(())
    }
}

/// Words × cues occurrence matrix (entries 0 or 1).
#[derive(Debug, Clone, PartialEq)]
pub struct CueMatrix {
    matrix: DMatrix<f64>,
    row_words: Vec<String>,
    index: Arc<CueIndex>,
}

impl CueMatrix {
    /// Wraps an existing 0/1 matrix; shape must agree with the words and index.
    pub fn from_parts(
        matrix: DMatrix<f64>,
        row_words: Vec<String>,
        index: Arc<CueIndex>,
    ) -> Result<Self, CueError> {
        if matrix.nrows() != row_words.len() || matrix.ncols() != index.len() {
            return Err(CueError::Shape {
                rows: matrix.nrows(),
                cols: matrix.ncols(),
                words: row_words.len(),
                cues: index.len(),
            });
        }
        if matrix.iter().any(|&x| x != 0.0 && x != 1.0) {
            return Err(CueError::NonBinary);
        }
        Ok(Self {
            matrix,
            row_words,
            index,
        })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn row_words(&self) -> &[String] {
        &self.row_words
    }

    pub fn index(&self) -> &Arc<CueIndex> {
        &self.index
    }

    pub fn nrows(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.matrix.ncols()
    }

    /// Cues switched on in row `i`, in column order.
    pub fn active_cues(&self, i: usize) -> Vec<&str> {
        (0..self.ncols())
            .filter(|&j| self.matrix[(i, j)] != 0.0)
            .filter_map(|j| self.index.cue(j))
            .collect()
    }
}

fn check_unique(words: &[(String, SoundClassSequence)]) -> Result<(), CueError> {
    let mut seen = std::collections::HashSet::with_capacity(words.len());
    for (id, _) in words {
        if !seen.insert(id.as_str()) {
            return Err(CueError::DuplicateWordId(id.clone()));
        }
    }
    Ok(())
}

/// Builds the cue inventory from `words` and encodes them against it.
pub fn build_cue_matrix(
    words: &[(String, SoundClassSequence)],
    n: usize,
) -> Result<CueMatrix, CueError> {
    check_unique(words)?;
    let index = CueIndex::from_words(words, n)?;
    encode_with_index(words, Arc::new(index))
}

/// Encodes `words` against a fixed cue index; n-grams missing from the index are ignored.
pub fn encode_with_index(
    words: &[(String, SoundClassSequence)],
    index: Arc<CueIndex>,
) -> Result<CueMatrix, CueError> {
    check_unique(words)?;
    let mut matrix = DMatrix::zeros(words.len(), index.len());
    for (i, (id, seq)) in words.iter().enumerate() {
        for gram in extract_ngrams(seq, index.n()).map_err(|e| e.for_word(id))? {
            if let Some(j) = index.column(&gram) {
                matrix[(i, j)] = 1.0;
            }
        }
    }
    Ok(CueMatrix {
        matrix,
        row_words: words.iter().map(|(id, _)| id.clone()).collect(),
        index,
    })
}
