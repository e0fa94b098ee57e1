//! Monolingual and cross-language experiment grids.
//!
//! A cell is one (train language, test language, gram size, trimming) run.
//! Cells are independent and run in parallel; the result table is assembled
//! afterwards.

use std::collections::{BTreeSet, HashSet};
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::sync::Arc;

use log::info;
use nalgebra::DMatrix;
use rayon::prelude::*;

use super::config::ExperimentConfig;
use super::dataset::{load_dataset, CognateTable};
use super::report::{ResultKey, ResultTable};
use super::PipelineError;
use crate::cues::{encode_with_index, CueIndex};
use crate::ldl::{estimate_mapping, evaluate_comprehension, predict, ComprehensionMapping, PredictedSemantics};
use crate::phonology::SoundClassTable;
use crate::semantics::{build_semantic_matrix, load_embeddings, EmbeddingStore, SemanticMatrix};

/// Dataset restricted to the configured languages and filtered to embeddable sets.
pub struct PreparedData {
    pub table: CognateTable,
    pub store: EmbeddingStore,
}

/// Loads dataset and embeddings named in `config` and drops unusable sets.
pub fn prepare(config: &ExperimentConfig) -> Result<PreparedData, PipelineError> {
    config.validate()?;
    let table = load_dataset(&config.dataset)?.restrict_languages(&config.languages)?;
    let languages: BTreeSet<String> = config.languages.iter().cloned().collect();
    let vocabulary: HashSet<(String, String)> = table
        .entries()
        .iter()
        .map(|e| (e.language.clone(), e.lookup_key().to_string()))
        .collect();
    let store = load_embeddings(&config.embeddings, &languages, Some(&vocabulary))?;
    let table = table.retain_embeddable(&store)?;
    info!(
        "{} complete cognate sets over {} ({} dropped)",
        table.set_count(),
        config.languages.join(", "),
        table.dropped().len()
    );
    Ok(PreparedData { table, store })
}

fn sound_class_table(config: &ExperimentConfig) -> Result<SoundClassTable, PipelineError> {
    match &config.sound_classes {
        Some(path) => Ok(SoundClassTable::from_path(path)?),
        None => Ok(SoundClassTable::default()),
    }
}

/// Result of one experiment cell.
#[derive(Debug, Clone)]
pub struct CellOutcome {
    pub train: String,
    pub test: String,
    pub grams: usize,
    pub trimmed: bool,
    /// Accuracy per requested k, in config order.
    pub accuracies: Vec<(usize, f64)>,
    pub mapping: ComprehensionMapping,
    pub predictions: PredictedSemantics,
}

fn semantic_matrix(
    table: &CognateTable,
    store: &EmbeddingStore,
    language: &str,
) -> Result<SemanticMatrix, PipelineError> {
    let entries = table.entries_for(language)?;
    Ok(build_semantic_matrix(
        store,
        entries
            .iter()
            .map(|e| (e.language.as_str(), e.lookup_key(), e.id.as_str())),
    )?)
}

/// Trains on `train`, tests on `test` over a cue index shared by both languages.
#[allow(clippy::too_many_arguments)]
pub fn run_cell(
    config: &ExperimentConfig,
    table: &CognateTable,
    store: &EmbeddingStore,
    classes: &SoundClassTable,
    train: &str,
    test: &str,
    grams: usize,
    trimmed: bool,
) -> Result<CellOutcome, PipelineError> {
    let annotate = |source: PipelineError| PipelineError::Cell {
        train: train.to_string(),
        test: test.to_string(),
        grams,
        trimmed,
        source: Box::new(source),
    };
    let inner = || -> Result<CellOutcome, PipelineError> {
        let threshold = trimmed.then_some(config.threshold);
        let train_words = table.sound_classes_for(train, threshold, classes)?;
        let test_words = if train == test {
            train_words.clone()
        } else {
            table.sound_classes_for(test, threshold, classes)?
        };
        let mut index = CueIndex::from_words(&train_words, grams)?;
        if train != test {
            for gram in CueIndex::from_words(&test_words, grams)?.cues() {
                index.insert(gram.clone());
            }
        }
        let index = Arc::new(index);
        let c_train = encode_with_index(&train_words, index.clone())?;
        let c_test = encode_with_index(&test_words, index)?;
        let s_train = semantic_matrix(table, store, train)?;
        let s_test = semantic_matrix(table, store, test)?;

        let mapping = estimate_mapping(&c_train, &s_train, config.lambda)?;
        let predictions = predict(&c_test, &mapping)?;
        let accuracies = config
            .top_k
            .iter()
            .map(|&k| {
                evaluate_comprehension(&predictions, &s_test, k, config.matching)
                    .map(|e| (k, e.accuracy))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(CellOutcome {
            train: train.to_string(),
            test: test.to_string(),
            grams,
            trimmed,
            accuracies,
            mapping,
            predictions,
        })
    };
    inner().map_err(annotate)
}

fn run_cells(
    config: &ExperimentConfig,
    table: &CognateTable,
    store: &EmbeddingStore,
    pairs: Vec<(String, String)>,
) -> Result<ResultTable, PipelineError> {
    config.validate()?;
    let classes = sound_class_table(config)?;
    let mut cells = Vec::new();
    for (train, test) in &pairs {
        for &grams in &config.grams {
            for &trimmed in config.trimming.states() {
                cells.push((train.as_str(), test.as_str(), grams, trimmed));
            }
        }
    }
    let outcomes: Vec<Vec<(ResultKey, f64)>> = cells
        .par_iter()
        .map(|&(train, test, grams, trimmed)| {
            let outcome = run_cell(config, table, store, &classes, train, test, grams, trimmed)?;
            info!(
                "{train}->{test} {grams}-grams {}: {:?}",
                if trimmed { "trimmed" } else { "full" },
                outcome.accuracies
            );
            if config.dump_matrices {
                dump_cell(&config.output, &outcome)?;
            }
            Ok(outcome
                .accuracies
                .iter()
                .map(|&(k, acc)| (ResultKey::new(train, test, grams, trimmed, k), acc))
                .collect())
        })
        .collect::<Result<_, PipelineError>>()?;
    let mut results = ResultTable::default();
    for (key, acc) in outcomes.into_iter().flatten() {
        results.insert(key, acc);
    }
    Ok(results)
}

/// Every configured language trained and tested on itself.
pub fn run_monolingual(
    config: &ExperimentConfig,
    table: &CognateTable,
    store: &EmbeddingStore,
) -> Result<ResultTable, PipelineError> {
    let pairs = config
        .languages
        .iter()
        .map(|l| (l.clone(), l.clone()))
        .collect();
    run_cells(config, table, store, pairs)
}

/// Every ordered pair of distinct configured languages.
pub fn run_cross(
    config: &ExperimentConfig,
    table: &CognateTable,
    store: &EmbeddingStore,
) -> Result<ResultTable, PipelineError> {
    if config.languages.len() < 2 {
        return Err(PipelineError::InvalidConfig(
            "cross-language runs need at least two languages".into(),
        ));
    }
    run_cells(config, table, store, ordered_pairs(&config.languages))
}

/// Runs an explicit list of (train, test) pairs; `train == test` is allowed.
pub fn run_pairs(
    config: &ExperimentConfig,
    table: &CognateTable,
    store: &EmbeddingStore,
    pairs: &[(String, String)],
) -> Result<ResultTable, PipelineError> {
    run_cells(config, table, store, pairs.to_vec())
}

/// Ordered pairs grouped by unordered pair: (a,b), (b,a), (a,c), (c,a), ...
pub fn ordered_pairs(languages: &[String]) -> Vec<(String, String)> {
    let mut pairs = Vec::new();
    for (i, a) in languages.iter().enumerate() {
        for b in &languages[i + 1..] {
            pairs.push((a.clone(), b.clone()));
            pairs.push((b.clone(), a.clone()));
        }
    }
    pairs
}

fn write_matrix_csv(path: &Path, header: &[String], ids: &[String], m: &DMatrix<f64>) -> Result<(), PipelineError> {
    let file = File::create(path).map_err(|e| PipelineError::io(path, e))?;
    let mut w = BufWriter::new(file);
    let io = |e| PipelineError::io(path, e);
    writeln!(w, "ROW,{}", header.join(",")).map_err(io)?;
    for (i, id) in ids.iter().enumerate() {
        write!(w, "{id}").map_err(io)?;
        for x in m.row(i).iter() {
            write!(w, ",{x}").map_err(io)?;
        }
        writeln!(w).map_err(io)?;
    }
    w.flush().map_err(io)
}

fn dump_cell(dir: &Path, cell: &CellOutcome) -> Result<(), PipelineError> {
    std::fs::create_dir_all(dir).map_err(|e| PipelineError::io(dir, e))?;
    let tag = format!(
        "{}_{}_{}g_{}",
        cell.train,
        cell.test,
        cell.grams,
        if cell.trimmed { "trimmed" } else { "full" }
    );
    let dims: Vec<String> = (0..cell.mapping.weights().ncols()).map(|d| format!("D{d}")).collect();
    write_matrix_csv(
        &dir.join(format!("mapping_{tag}.csv")),
        &dims,
        cell.mapping.index().cues(),
        cell.mapping.weights(),
    )?;
    write_matrix_csv(
        &dir.join(format!("predictions_{tag}.csv")),
        &dims,
        cell.predictions.row_words(),
        cell.predictions.matrix(),
    )
}
