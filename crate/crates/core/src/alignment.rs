//! Multiple phonetic alignments of cognate sets and gap-based trimming.
//!
//! Trimming drops every column whose share of gap cells is above a threshold.
//! It is applied to the whole multilingual alignment, so all languages lose
//! the same columns.

use std::fmt;

use thiserror::Error;

use crate::phonology::{IpaTokenSequence, GAP};

/// Columns with a gap fraction strictly above this value are removed.
pub const DEFAULT_TRIM_THRESHOLD: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AlignmentError {
    #[error("alignment {cognate_id} needs at least two rows, got {rows}")]
    TooFewRows { cognate_id: String, rows: usize },
    #[error("alignment {cognate_id}: row {language} has {found} cells, expected {expected}")]
    RaggedAlignment {
        cognate_id: String,
        language: String,
        expected: usize,
        found: usize,
    },
    #[error("alignment row{} consists only of gaps", fmt_language(.language))]
    AllGapRow { language: Option<String> },
    #[error("alignment {cognate_id}: language {language} appears twice")]
    DuplicateLanguage { cognate_id: String, language: String },
    #[error("alignment {cognate_id}: empty cell in row {language}")]
    EmptyCell { cognate_id: String, language: String },
    #[error("alignment {cognate_id}: every column exceeds gap threshold {threshold}")]
    EmptyAfterTrim { cognate_id: String, threshold: f64 },
    #[error("trim threshold {0} is outside [0, 1]")]
    InvalidThreshold(f64),
}

fn fmt_language(language: &Option<String>) -> String {
    language.as_ref().map(|l| format!(" {l}")).unwrap_or_default()
}

/// One alignment site in one row.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Cell {
    Segment(String),
    Gap,
}

impl Cell {
    pub fn parse(text: &str) -> Self {
        if text == GAP {
            Cell::Gap
        } else {
            Cell::Segment(text.to_string())
        }
    }

    pub fn is_gap(&self) -> bool {
        matches!(self, Cell::Gap)
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cell::Segment(s) => f.write_str(s),
            Cell::Gap => f.write_str(GAP),
        }
    }
}

/// Parses a space-separated alignment string such as `"d r ɪ ŋ k ə -"`.
pub fn parse_cells(text: &str) -> Vec<Cell> {
    text.split_whitespace().map(Cell::parse).collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlignmentRow {
    pub language: String,
    pub cells: Vec<Cell>,
}

/// A rectangular alignment: rows are languages, columns are sites.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlignedCognateSet {
    cognate_id: String,
    rows: Vec<AlignmentRow>,
    width: usize,
}

/// Validates language-keyed rows of cell strings into an alignment.
pub fn parse_alignment<L, I, C>(
    cognate_id: &str,
    rows: I,
) -> Result<AlignedCognateSet, AlignmentError>
where
    L: Into<String>,
    C: AsRef<str>,
    I: IntoIterator<Item = (L, Vec<C>)>,
{
    let rows: Vec<AlignmentRow> = rows
        .into_iter()
        .map(|(language, cells)| AlignmentRow {
            language: language.into(),
            cells: cells.iter().map(|c| Cell::parse(c.as_ref())).collect(),
        })
        .collect();
    AlignedCognateSet::new(cognate_id, rows)
}

impl AlignedCognateSet {
    pub fn new(cognate_id: &str, rows: Vec<AlignmentRow>) -> Result<Self, AlignmentError> {
        if rows.len() < 2 {
            return Err(AlignmentError::TooFewRows {
                cognate_id: cognate_id.into(),
                rows: rows.len(),
            });
        }
        let width = rows[0].cells.len();
        for (i, row) in rows.iter().enumerate() {
            if rows[..i].iter().any(|r| r.language == row.language) {
                return Err(AlignmentError::DuplicateLanguage {
                    cognate_id: cognate_id.into(),
                    language: row.language.clone(),
                });
            }
            if row.cells.len() != width {
                return Err(AlignmentError::RaggedAlignment {
                    cognate_id: cognate_id.into(),
                    language: row.language.clone(),
                    expected: width,
                    found: row.cells.len(),
                });
            }
            if row.cells.iter().any(|c| matches!(c, Cell::Segment(s) if s.is_empty())) {
                return Err(AlignmentError::EmptyCell {
                    cognate_id: cognate_id.into(),
                    language: row.language.clone(),
                });
            }
            if row.cells.iter().all(Cell::is_gap) {
                return Err(AlignmentError::AllGapRow {
                    language: Some(row.language.clone()),
                });
            }
        }
        Ok(Self {
            cognate_id: cognate_id.into(),
            rows,
            width,
        })
    }

    pub fn cognate_id(&self) -> &str {
        &self.cognate_id
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn rows(&self) -> &[AlignmentRow] {
        &self.rows
    }

    pub fn languages(&self) -> impl Iterator<Item = &str> {
        self.rows.iter().map(|r| r.language.as_str())
    }

    pub fn row(&self, language: &str) -> Option<&[Cell]> {
        self.rows
            .iter()
            .find(|r| r.language == language)
            .map(|r| r.cells.as_slice())
    }

    /// Gap-free token sequence of one language's row.
    pub fn tokens(&self, language: &str) -> Option<IpaTokenSequence> {
        self.row(language).map(|cells| {
            unalign(cells).expect("alignment rows are validated to contain a segment")
        })
    }

    pub fn gap_profile(&self) -> GapProfile {
        gap_profile(self)
    }

    pub fn trim(&self, threshold: f64) -> Result<Self, AlignmentError> {
        trim(self, threshold)
    }
}

/// Per-column share of gap cells.
#[derive(Debug, Clone, PartialEq)]
pub struct GapProfile(Vec<f64>);

impl GapProfile {
    pub fn fractions(&self) -> &[f64] {
        &self.0
    }

    pub fn mean(&self) -> f64 {
        if self.0.is_empty() {
            0.0
        } else {
            self.0.iter().sum::<f64>() / self.0.len() as f64
        }
    }

    /// Indices of columns whose gap fraction does not exceed `threshold`.
    pub fn retained_columns(&self, threshold: f64) -> Vec<usize> {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, &f)| f <= threshold)
            .map(|(j, _)| j)
            .collect()
    }
}

pub fn gap_profile(set: &AlignedCognateSet) -> GapProfile {
    let rows = set.rows.len() as f64;
    GapProfile(
        (0..set.width)
            .map(|j| set.rows.iter().filter(|r| r.cells[j].is_gap()).count() as f64 / rows)
            .collect(),
    )
}

/// Keeps the columns whose gap fraction is at most `threshold`.
///
/// Fails when nothing survives or when some row would be left with gaps only.
pub fn trim(set: &AlignedCognateSet, threshold: f64) -> Result<AlignedCognateSet, AlignmentError> {
    if !(0.0..=1.0).contains(&threshold) {
        return Err(AlignmentError::InvalidThreshold(threshold));
    }
    let keep = gap_profile(set).retained_columns(threshold);
    if keep.is_empty() {
        return Err(AlignmentError::EmptyAfterTrim {
            cognate_id: set.cognate_id.clone(),
            threshold,
        });
    }
    let rows = set
        .rows
        .iter()
        .map(|r| AlignmentRow {
            language: r.language.clone(),
            cells: keep.iter().map(|&j| r.cells[j].clone()).collect(),
        })
        .collect();
    AlignedCognateSet::new(&set.cognate_id, rows)
}

/// Removes gaps from a row.
pub fn unalign(row: &[Cell]) -> Result<IpaTokenSequence, AlignmentError> {
    let segments: Vec<&str> = row
        .iter()
        .filter_map(|c| match c {
            Cell::Segment(s) => Some(s.as_str()),
            Cell::Gap => None,
        })
        .collect();
    if segments.is_empty() {
        return Err(AlignmentError::AllGapRow { language: None });
    }
    IpaTokenSequence::new(segments).map_err(|_| AlignmentError::AllGapRow { language: None })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phonology::to_sound_classes;

    fn cells(s: &str) -> Vec<&str> {
        s.split_whitespace().collect()
    }

    fn drink() -> AlignedCognateSet {
        parse_alignment(
            "drink",
            [
                ("en", cells("d ʀ ɪ ŋ k - -")),
                ("de", cells("t ʀ ɪ ŋ k ə n")),
                ("nl", cells("d r ɪ ŋ k ə -")),
            ],
        )
        .unwrap()
    }

    #[test]
    fn parse_widths_and_errors() {
        assert_eq!(drink().width(), 7);
        let minimal = parse_alignment("m", [("A", vec!["a"]), ("B", vec!["a"])]).unwrap();
        assert_eq!(minimal.width(), 1);
        assert!(matches!(
            parse_alignment("r", [("A", vec!["a", "b"]), ("B", vec!["a"])]),
            Err(AlignmentError::RaggedAlignment { expected: 2, found: 1, .. })
        ));
        assert!(matches!(
            parse_alignment("g", [("A", vec!["a", "-"]), ("B", vec!["-", "-"])]),
            Err(AlignmentError::AllGapRow { .. })
        ));
        assert!(matches!(
            parse_alignment("one", [("A", vec!["a"])]),
            Err(AlignmentError::TooFewRows { rows: 1, .. })
        ));
        assert!(matches!(
            parse_alignment("dup", [("A", vec!["a"]), ("A", vec!["b"])]),
            Err(AlignmentError::DuplicateLanguage { .. })
        ));
    }

    #[test]
    fn gap_profiles() {
        let p = drink().gap_profile();
        let expected = [0.0, 0.0, 0.0, 0.0, 0.0, 1.0 / 3.0, 2.0 / 3.0];
        assert_eq!(p.fractions(), &expected);

        let free = parse_alignment("f", [("A", vec!["a", "b"]), ("B", vec!["c", "d"])]).unwrap();
        assert_eq!(free.gap_profile().fractions(), &[0.0, 0.0]);

        let four = parse_alignment(
            "q",
            [
                ("A", vec!["a", "x"]),
                ("B", vec!["a", "-"]),
                ("C", vec!["a", "-"]),
                ("D", vec!["a", "-"]),
            ],
        )
        .unwrap();
        assert_eq!(four.gap_profile().fractions()[1], 0.75);
    }

    #[test]
    fn trimming_drink_reproduces_stem() {
        let trimmed = drink().trim(DEFAULT_TRIM_THRESHOLD).unwrap();
        assert_eq!(trimmed.width(), 6);
        let de = trimmed.tokens("de").unwrap();
        assert_eq!(de.to_string(), "t ʀ ɪ ŋ k ə");
        assert_eq!(to_sound_classes(&de).unwrap().to_string(), "T R V N K V");
        let en = trimmed.tokens("en").unwrap();
        assert_eq!(to_sound_classes(&en).unwrap().to_string(), "T R V N K");
    }

    #[test]
    fn trimming_identities() {
        let free = parse_alignment("f", [("A", vec!["a", "b"]), ("B", vec!["c", "d"])]).unwrap();
        assert_eq!(free.trim(0.0).unwrap(), free);
        assert_eq!(drink().trim(1.0).unwrap(), drink());
        assert!(matches!(drink().trim(1.5), Err(AlignmentError::InvalidThreshold(_))));
    }

    #[test]
    fn trimming_everything_is_an_error() {
        let set = parse_alignment("e", [("A", vec!["a", "-"]), ("B", vec!["-", "b"])]).unwrap();
        assert!(matches!(set.trim(0.4), Err(AlignmentError::EmptyAfterTrim { .. })));
    }

    #[test]
    fn trimming_that_empties_a_row_is_rejected() {
        let set = parse_alignment(
            "x",
            [("A", vec!["a", "-"]), ("B", vec!["-", "b"]), ("C", vec!["-", "c"])],
        )
        .unwrap();
        assert!(matches!(
            set.trim(0.5),
            Err(AlignmentError::AllGapRow { language: Some(l) }) if l == "A"
        ));
    }

    #[test]
    fn unalign_rows() {
        let row = parse_cells("t - a");
        assert_eq!(unalign(&row).unwrap().to_string(), "t a");
        assert_eq!(unalign(&parse_cells("a")).unwrap().to_string(), "a");
        assert!(matches!(
            unalign(&parse_cells("- -")),
            Err(AlignmentError::AllGapRow { language: None })
        ));
    }
}
