//! Cognate dataset TSV: one row per word form, grouped into cognate sets.
//!
//! Required columns: `ID`, `LANGUAGE`, `CONCEPT`, `FORM`, `LOOKUP`, `TOKENS`,
//! `ALIGNMENT`, `COGSET`. Sets lacking exactly one form per language are
//! dropped with a warning.

use std::collections::HashMap;
use std::io::Read;
use std::path::Path;

use log::warn;

use super::PipelineError;
use crate::alignment::{parse_cells, AlignedCognateSet, AlignmentRow, Cell};
use crate::phonology::{IpaTokenSequence, SoundClassSequence, SoundClassTable};
use crate::semantics::EmbeddingStore;

pub const REQUIRED_COLUMNS: [&str; 8] = [
    "ID", "LANGUAGE", "CONCEPT", "FORM", "LOOKUP", "TOKENS", "ALIGNMENT", "COGSET",
];

/// One word form in one language.
#[derive(Debug, Clone, PartialEq)]
pub struct CognateEntry {
    pub id: String,
    pub language: String,
    pub concept: String,
    pub form: String,
    /// Embedding key override; the form is used when absent.
    pub lookup: Option<String>,
    pub tokens: IpaTokenSequence,
    pub alignment: Vec<Cell>,
    pub cogset: String,
}

impl CognateEntry {
    pub fn lookup_key(&self) -> &str {
        self.lookup.as_deref().unwrap_or(&self.form)
    }
}

/// A cognate set that was removed from the table, and why.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DroppedSet {
    pub cogset: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq)]
struct CognateSet {
    id: String,
    /// Entry index per table language, in `languages` order.
    members: Vec<usize>,
}

/// Complete cognate sets: every set has exactly one entry per language.
#[derive(Debug, Clone, PartialEq)]
pub struct CognateTable {
    entries: Vec<CognateEntry>,
    languages: Vec<String>,
    sets: Vec<CognateSet>,
    dropped: Vec<DroppedSet>,
}

pub fn load_dataset(path: impl AsRef<Path>) -> Result<CognateTable, PipelineError> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| PipelineError::io(path, e))?;
    read_dataset(file)
}

pub fn read_dataset<R: Read>(reader: R) -> Result<CognateTable, PipelineError> {
    let mut rdr = csv::ReaderBuilder::new()
        .delimiter(b'\t')
        .quoting(false)
        .flexible(false)
        .from_reader(reader);
    let headers = rdr.headers().map_err(PipelineError::csv)?.clone();
    let mut column = HashMap::new();
    for name in REQUIRED_COLUMNS {
        let pos = headers
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| PipelineError::MissingColumn(name.to_string()))?;
        column.insert(name, pos);
    }
    let mut entries = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(PipelineError::csv)?;
        let field = |name: &str| record.get(column[name]).unwrap_or("").trim();
        let id = field("ID").to_string();
        let tokens = IpaTokenSequence::from_segmented(field("TOKENS")).map_err(|e| {
            PipelineError::InvalidEntry {
                id: id.clone(),
                message: e.to_string(),
            }
        })?;
        let alignment = parse_cells(field("ALIGNMENT"));
        let unaligned: Vec<&str> = alignment
            .iter()
            .filter_map(|c| match c {
                Cell::Segment(s) => Some(s.as_str()),
                Cell::Gap => None,
            })
            .collect();
        if unaligned != tokens.tokens() {
            return Err(PipelineError::InconsistentAlignment {
                id,
                tokens: tokens.to_string(),
                alignment: field("ALIGNMENT").to_string(),
            });
        }
        let lookup = Some(field("LOOKUP")).filter(|s| !s.is_empty()).map(String::from);
        entries.push(CognateEntry {
            id,
            language: field("LANGUAGE").to_lowercase(),
            concept: field("CONCEPT").to_string(),
            form: field("FORM").to_string(),
            lookup,
            tokens,
            alignment,
            cogset: field("COGSET").to_string(),
        });
    }
    CognateTable::from_entries(entries)
}

impl CognateTable {
    /// Groups entries into sets; languages are ordered by first appearance.
    pub fn from_entries(entries: Vec<CognateEntry>) -> Result<Self, PipelineError> {
        let mut languages: Vec<String> = Vec::new();
        for e in &entries {
            if e.id.is_empty() || e.language.is_empty() || e.cogset.is_empty() {
                return Err(PipelineError::InvalidEntry {
                    id: e.id.clone(),
                    message: "ID, LANGUAGE and COGSET must be non-empty".into(),
                });
            }
            if !languages.contains(&e.language) {
                languages.push(e.language.clone());
            }
        }
        Self::group(entries, languages, Vec::new())
    }

    fn group(
        entries: Vec<CognateEntry>,
        languages: Vec<String>,
        mut dropped: Vec<DroppedSet>,
    ) -> Result<Self, PipelineError> {
        let mut seen = HashMap::new();
        for e in &entries {
            if seen.insert(e.id.as_str(), ()).is_some() {
                return Err(PipelineError::DuplicateEntryId(e.id.clone()));
            }
        }
        let mut order: Vec<&str> = Vec::new();
        let mut groups: HashMap<&str, Vec<usize>> = HashMap::new();
        for (i, e) in entries.iter().enumerate() {
            groups
                .entry(e.cogset.as_str())
                .or_insert_with(|| {
                    order.push(e.cogset.as_str());
                    Vec::new()
                })
                .push(i);
        }
        let mut sets = Vec::new();
        let mut keep = vec![false; entries.len()];
        for id in order {
            let members = &groups[id];
            let mut slots = Vec::with_capacity(languages.len());
            let mut problem = None;
            for lang in &languages {
                let found: Vec<usize> = members
                    .iter()
                    .copied()
                    .filter(|&i| &entries[i].language == lang)
                    .collect();
                match found.len() {
                    1 => slots.push(found[0]),
                    0 => problem = Some(format!("no form for language {lang}")),
                    n => problem = Some(format!("{n} forms for language {lang}")),
                }
            }
            if members.len() != languages.len() && problem.is_none() {
                problem = Some("forms outside the table languages".into());
            }
            match problem {
                Some(reason) => {
                    warn!("dropping incomplete cognate set {id}: {reason}");
                    dropped.push(DroppedSet {
                        cogset: id.to_string(),
                        reason,
                    });
                }
                None => {
                    for &i in &slots {
                        keep[i] = true;
                    }
                    sets.push(CognateSet {
                        id: id.to_string(),
                        members: slots,
                    });
                }
            }
        }
        // compact entries to the kept ones and remap indices
        let mut remap = vec![usize::MAX; entries.len()];
        let mut kept = Vec::new();
        for (i, e) in entries.into_iter().enumerate() {
            if keep[i] {
                remap[i] = kept.len();
                kept.push(e);
            }
        }
        for set in &mut sets {
            for m in &mut set.members {
                *m = remap[*m];
            }
        }
        let table = Self {
            entries: kept,
            languages,
            sets,
            dropped,
        };
        for set in &table.sets {
            table.alignment(&set.id)?;
        }
        Ok(table)
    }

    pub fn entries(&self) -> &[CognateEntry] {
        &self.entries
    }

    pub fn languages(&self) -> &[String] {
        &self.languages
    }

    /// Sets removed so far (incomplete or without embeddings).
    pub fn dropped(&self) -> &[DroppedSet] {
        &self.dropped
    }

    pub fn set_count(&self) -> usize {
        self.sets.len()
    }

    pub fn cognate_sets(&self) -> impl Iterator<Item = &str> {
        self.sets.iter().map(|s| s.id.as_str())
    }

    fn language_slot(&self, language: &str) -> Option<usize> {
        self.languages.iter().position(|l| l == language)
    }

    fn set(&self, cogset: &str) -> Option<&CognateSet> {
        self.sets.iter().find(|s| s.id == cogset)
    }

    pub fn entry(&self, cogset: &str, language: &str) -> Option<&CognateEntry> {
        let slot = self.language_slot(language)?;
        self.set(cogset).map(|s| &self.entries[s.members[slot]])
    }

    /// Entries of one language in set order.
    pub fn entries_for(&self, language: &str) -> Result<Vec<&CognateEntry>, PipelineError> {
        let slot = self
            .language_slot(language)
            .ok_or_else(|| PipelineError::UnknownLanguage(language.to_string()))?;
        Ok(self
            .sets
            .iter()
            .map(|s| &self.entries[s.members[slot]])
            .collect())
    }

    /// Multilingual alignment of one set over all table languages.
    pub fn alignment(&self, cogset: &str) -> Result<AlignedCognateSet, PipelineError> {
        let set = self
            .set(cogset)
            .ok_or_else(|| PipelineError::UnknownCognateSet(cogset.to_string()))?;
        let rows = self
            .languages
            .iter()
            .zip(&set.members)
            .map(|(lang, &i)| AlignmentRow {
                language: lang.clone(),
                cells: self.entries[i].alignment.clone(),
            })
            .collect();
        AlignedCognateSet::new(cogset, rows).map_err(|source| PipelineError::Alignment {
            cogset: cogset.to_string(),
            source,
        })
    }

    /// Keeps only `languages` (in the given order); sets stay complete.
    pub fn restrict_languages(&self, languages: &[String]) -> Result<Self, PipelineError> {
        for l in languages {
            if self.language_slot(l).is_none() {
                return Err(PipelineError::UnknownLanguage(l.clone()));
            }
        }
        let entries = self
            .entries
            .iter()
            .filter(|e| languages.contains(&e.language))
            .cloned()
            .collect();
        Self::group(entries, languages.to_vec(), self.dropped.clone())
    }

    /// Drops every set with at least one form missing from `store`.
    pub fn retain_embeddable(&self, store: &EmbeddingStore) -> Result<Self, PipelineError> {
        let mut dropped = self.dropped.clone();
        let mut entries = Vec::new();
        for set in &self.sets {
            let missing: Vec<&CognateEntry> = set
                .members
                .iter()
                .map(|&i| &self.entries[i])
                .filter(|e| !store.contains(&e.language, e.lookup_key()))
                .collect();
            if missing.is_empty() {
                entries.extend(set.members.iter().map(|&i| self.entries[i].clone()));
            } else {
                let reason = missing
                    .iter()
                    .map(|e| format!("no embedding for {}/{}", e.language, e.lookup_key()))
                    .collect::<Vec<_>>()
                    .join(", ");
                warn!("dropping cognate set {}: {reason}", set.id);
                dropped.push(DroppedSet {
                    cogset: set.id.clone(),
                    reason,
                });
            }
        }
        Self::group(entries, self.languages.clone(), dropped)
    }

    /// Token sequences of one language, optionally trimmed at the set level.
    pub fn tokens_for(
        &self,
        language: &str,
        trim_threshold: Option<f64>,
    ) -> Result<Vec<(String, IpaTokenSequence)>, PipelineError> {
        let entries = self.entries_for(language)?;
        entries
            .into_iter()
            .map(|e| {
                let tokens = match trim_threshold {
                    None => e.tokens.clone(),
                    Some(t) => {
                        let trimmed = self.alignment(&e.cogset)?.trim(t).map_err(|source| {
                            PipelineError::Alignment {
                                cogset: e.cogset.clone(),
                                source,
                            }
                        })?;
                        trimmed.tokens(language).expect("language is part of the alignment")
                    }
                };
                Ok((e.id.clone(), tokens))
            })
            .collect()
    }

    /// Sound-class sequences of one language keyed by entry id.
    pub fn sound_classes_for(
        &self,
        language: &str,
        trim_threshold: Option<f64>,
        classes: &SoundClassTable,
    ) -> Result<Vec<(String, SoundClassSequence)>, PipelineError> {
        self.tokens_for(language, trim_threshold)?
            .into_iter()
            .map(|(id, tokens)| {
                let seq = classes
                    .to_sound_classes(&tokens)
                    .map_err(|e| PipelineError::Phonology(e.with_word_id(&id)))?;
                Ok((id, seq))
            })
            .collect()
    }
}
