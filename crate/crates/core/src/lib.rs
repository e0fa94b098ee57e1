//! Cross-language word comprehension with linear discriminative learning.
//!
//! Word forms are turned into sound-class n-gram cues (`C`), meanings into
//! multilingual embedding vectors (`S`), and a linear mapping `F` with
//! `CF ≈ S` is estimated on one language and evaluated on another.
//!
//! Module layout:
//! - [`phonology`]: IPA segments to sound classes
//! - [`alignment`]: cognate alignments and gap trimming
//! - [`cues`]: n-gram cue matrices
//! - [`semantics`]: embeddings, semantic matrices, cosine statistics
//! - [`ldl`]: the comprehension mapping and top-k evaluation
//! - [`pipeline`]: dataset loading, experiment grids, reports

pub mod alignment;
pub mod cues;
pub mod ldl;
pub mod phonology;
pub mod pipeline;
pub mod semantics;

pub use nalgebra;

pub use alignment::{parse_alignment, trim, unalign, AlignedCognateSet, Cell, GapProfile};
pub use cues::{build_cue_matrix, encode_with_index, extract_ngrams, CueIndex, CueMatrix};
pub use ldl::{
    estimate_mapping, evaluate_comprehension, predict, rank_candidates, ComprehensionMapping,
    EvaluationResult, GoldMatching, PredictedSemantics,
};
pub use phonology::{
    class_of, to_sound_classes, IpaTokenSequence, SoundClass, SoundClassSequence, SoundClassTable,
};
pub use pipeline::{
    load_dataset, run_cross, run_monolingual, CognateEntry, CognateTable, ExperimentConfig,
    PipelineError, ResultTable,
};
pub use semantics::{
    build_semantic_matrix, cosine, load_embeddings, CosineReport, EmbeddingStore, SemanticMatrix,
};
