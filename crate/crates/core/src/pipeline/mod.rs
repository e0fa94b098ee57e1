//! Data ingestion, experiment orchestration and reporting.

mod cldf;
mod config;
mod dataset;
mod experiment;
mod report;

use std::path::Path;

use thiserror::Error;

use crate::alignment::AlignmentError;
use crate::cues::CueError;
use crate::ldl::LdlError;
use crate::phonology::PhonologyError;
use crate::semantics::SemanticsError;

pub use cldf::convert_cldf;
pub use config::{parse_list, ExperimentConfig, Trimming};
pub use dataset::{
    load_dataset, read_dataset, CognateEntry, CognateTable, DroppedSet, REQUIRED_COLUMNS,
};
pub use experiment::{
    ordered_pairs, prepare, run_cell, run_cross, run_monolingual, run_pairs, CellOutcome,
    PreparedData,
};
pub use report::{emit_report, ReportFormat, ResultKey, ResultTable, CSV_HEADER};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("csv: {0}")]
    Csv(String),
    #[error("missing required column {0}")]
    MissingColumn(String),
    #[error("entry {id}: alignment `{alignment}` does not match tokens `{tokens}`")]
    InconsistentAlignment {
        id: String,
        tokens: String,
        alignment: String,
    },
    #[error("entry {id}: {message}")]
    InvalidEntry { id: String, message: String },
    #[error("duplicate entry id {0}")]
    DuplicateEntryId(String),
    #[error("language {0} is not in the dataset")]
    UnknownLanguage(String),
    #[error("unknown cognate set {0}")]
    UnknownCognateSet(String),
    #[error("cognate set {cogset}: {source}")]
    Alignment {
        cogset: String,
        #[source]
        source: AlignmentError,
    },
    #[error(transparent)]
    Phonology(#[from] PhonologyError),
    #[error(transparent)]
    Cues(#[from] CueError),
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
    #[error(transparent)]
    Ldl(#[from] LdlError),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("no results to report")]
    EmptyResults,
    #[error("{train}->{test}, {grams}-grams, {}: {source}", if *.trimmed { "trimmed" } else { "full forms" })]
    Cell {
        train: String,
        test: String,
        grams: usize,
        trimmed: bool,
        #[source]
        source: Box<PipelineError>,
    },
}

impl PipelineError {
    pub(crate) fn io(path: &Path, e: std::io::Error) -> Self {
        PipelineError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        }
    }

    pub(crate) fn csv(e: csv::Error) -> Self {
        PipelineError::Csv(e.to_string())
    }

    /// True when the failure came from the least-squares solver.
    pub fn is_numerical(&self) -> bool {
        match self {
            PipelineError::Ldl(LdlError::NumericalFailure(_)) => true,
            PipelineError::Cell { source, .. } => source.is_numerical(),
            _ => false,
        }
    }
}
