//! Linear discriminative learning: the comprehension mapping `F` with `CF = S`,
//! predicted semantics `Ŝ = CF`, and top-k comprehension accuracy.
//!
//! With no regularization `F` is the minimum-Frobenius-norm least-squares
//! solution, computed from a singular value decomposition of `C`. Cues that
//! never occur in training (all-zero columns) therefore get all-zero weights.

use std::cmp::Ordering;
use std::sync::Arc;

use nalgebra::{Cholesky, DMatrix};
use ndarray::Array2;
use ndarray_linalg::{JobSvd, SVDDC};
use thiserror::Error;

use crate::cues::{CueIndex, CueMatrix};
use crate::semantics::{cosine, SemanticMatrix};

/// Singular values below this fraction of the largest one are treated as zero.
pub const DEFAULT_RANK_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LdlError {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("numerical failure: {0}")]
    NumericalFailure(String),
    #[error("ridge coefficient must be finite and non-negative, got {0}")]
    InvalidLambda(f64),
    #[error("candidate depth must be at least 1")]
    InvalidDepth,
}

/// Solves `min ‖CF − S‖²_F (+ λ‖F‖²_F)` for `F`.
///
/// `λ = 0` gives the minimum-norm solution via SVD with relative rank
/// tolerance `tolerance`. `λ > 0` solves `(CᵀC + λI)F = CᵀS`; when `C` has
/// more columns than rows the equivalent `F = Cᵀ(CCᵀ + λI)⁻¹S` is used.
pub fn solve_least_squares(
    c: &DMatrix<f64>,
    s: &DMatrix<f64>,
    lambda: f64,
    tolerance: f64,
) -> Result<DMatrix<f64>, LdlError> {
    if c.nrows() != s.nrows() {
        return Err(LdlError::ShapeMismatch(format!(
            "C has {} rows but S has {}",
            c.nrows(),
            s.nrows()
        )));
    }
    if !lambda.is_finite() || lambda < 0.0 {
        return Err(LdlError::InvalidLambda(lambda));
    }
    if c.nrows() == 0 || c.ncols() == 0 {
        return Ok(DMatrix::zeros(c.ncols(), s.ncols()));
    }
    let f = if lambda == 0.0 {
        min_norm_solution(c, s, tolerance)?
    } else {
        ridge_solution(c, s, lambda)?
    };
    if f.iter().any(|x| !x.is_finite()) {
        return Err(LdlError::NumericalFailure("mapping has non-finite weights".into()));
    }
    Ok(f)
}

fn min_norm_solution(
    c: &DMatrix<f64>,
    s: &DMatrix<f64>,
    tolerance: f64,
) -> Result<DMatrix<f64>, LdlError> {
    let a = Array2::from_shape_fn((c.nrows(), c.ncols()), |(i, j)| c[(i, j)]);
    let (u, sigma, v_t) = match a.svddc(JobSvd::Some) {
        Ok((Some(u), sigma, Some(v_t))) => (u, sigma, v_t),
        Ok(_) => return Err(LdlError::NumericalFailure("SVD factors missing".into())),
        Err(e) => return Err(LdlError::NumericalFailure(format!("SVD failed: {e}"))),
    };
    if sigma.iter().any(|x| !x.is_finite()) {
        return Err(LdlError::NumericalFailure("non-finite singular value".into()));
    }
    let cutoff = tolerance * sigma.iter().cloned().fold(0.0, f64::max);
    let rank = sigma.iter().take_while(|&&sv| sv > cutoff).count();
    let u = DMatrix::from_fn(c.nrows(), rank, |i, k| u[[i, k]]);
    let v = DMatrix::from_fn(c.ncols(), rank, |j, k| v_t[[k, j]]);
    // Σ⁺ Uᵀ S, one row per retained singular triplet
    let mut projected = u.transpose() * s;
    for (k, mut row) in projected.row_iter_mut().enumerate() {
        row /= sigma[k];
    }
    Ok(v * projected)
}

fn ridge_solution(c: &DMatrix<f64>, s: &DMatrix<f64>, lambda: f64) -> Result<DMatrix<f64>, LdlError> {
    let not_pd = || LdlError::NumericalFailure("regularized system is not positive definite".into());
    if c.ncols() <= c.nrows() {
        let mut gram = c.transpose() * c;
        for i in 0..gram.nrows() {
            gram[(i, i)] += lambda;
        }
        let chol = Cholesky::new(gram).ok_or_else(not_pd)?;
        Ok(chol.solve(&(c.transpose() * s)))
    } else {
        let mut gram = c * c.transpose();
        for i in 0..gram.nrows() {
            gram[(i, i)] += lambda;
        }
        let chol = Cholesky::new(gram).ok_or_else(not_pd)?;
        Ok(c.transpose() * chol.solve(s))
    }
}

/// Association weights from cues (rows) to semantic dimensions (columns).
#[derive(Debug, Clone, PartialEq)]
pub struct ComprehensionMapping {
    weights: DMatrix<f64>,
    index: Arc<CueIndex>,
    lambda: f64,
}

impl ComprehensionMapping {
    pub fn weights(&self) -> &DMatrix<f64> {
        &self.weights
    }

    pub fn index(&self) -> &Arc<CueIndex> {
        &self.index
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }
}

pub fn estimate_mapping(
    c: &CueMatrix,
    s: &SemanticMatrix,
    lambda: f64,
) -> Result<ComprehensionMapping, LdlError> {
    estimate_mapping_with_tolerance(c, s, lambda, DEFAULT_RANK_TOLERANCE)
}

pub fn estimate_mapping_with_tolerance(
    c: &CueMatrix,
    s: &SemanticMatrix,
    lambda: f64,
    tolerance: f64,
) -> Result<ComprehensionMapping, LdlError> {
    let weights = solve_least_squares(c.matrix(), s.matrix(), lambda, tolerance)?;
    Ok(ComprehensionMapping {
        weights,
        index: c.index().clone(),
        lambda,
    })
}

/// Predicted semantic vectors, one row per test word.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictedSemantics {
    s_hat: DMatrix<f64>,
    row_words: Vec<String>,
}

impl PredictedSemantics {
    pub fn new(s_hat: DMatrix<f64>, row_words: Vec<String>) -> Self {
        assert_eq!(s_hat.nrows(), row_words.len(), "one word id per row");
        Self { s_hat, row_words }
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.s_hat
    }

    pub fn row_words(&self) -> &[String] {
        &self.row_words
    }
}

pub fn predict(c_test: &CueMatrix, mapping: &ComprehensionMapping) -> Result<PredictedSemantics, LdlError> {
    if c_test.ncols() != mapping.weights.nrows() {
        return Err(LdlError::ShapeMismatch(format!(
            "test cue matrix has {} columns, mapping has {} cue rows",
            c_test.ncols(),
            mapping.weights.nrows()
        )));
    }
    if !Arc::ptr_eq(c_test.index(), &mapping.index) && **c_test.index() != *mapping.index {
        return Err(LdlError::ShapeMismatch(
            "test cue matrix was encoded with a different cue index".into(),
        ));
    }
    Ok(PredictedSemantics::new(
        c_test.matrix() * &mapping.weights,
        c_test.row_words().to_vec(),
    ))
}

/// How a prediction is matched against the gold inventory.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum GoldMatching {
    /// Only the word's own gold row counts.
    #[default]
    Row,
    /// Any gold row whose vector is identical to the word's own counts.
    IdenticalVector,
}

/// Gold rows as contiguous vectors, for repeated cosine ranking.
struct GoldInventory {
    rows: Vec<Vec<f64>>,
}

impl GoldInventory {
    fn new(gold: &SemanticMatrix) -> Self {
        let m = gold.matrix();
        Self {
            rows: (0..m.nrows())
                .map(|i| m.row(i).iter().copied().collect())
                .collect(),
        }
    }

    fn cosines(&self, query: &[f64]) -> Vec<f64> {
        self.rows
            .iter()
            .map(|g| cosine(query, g).expect("dimensions checked by caller"))
            .collect()
    }
}

/// Descending cosine, ties by ascending row index.
fn candidate_order(cosines: &[f64], a: usize, b: usize) -> Ordering {
    cosines[b].total_cmp(&cosines[a]).then(a.cmp(&b))
}

fn top_k(cosines: &[f64], k: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..cosines.len()).collect();
    order.sort_by(|&a, &b| candidate_order(cosines, a, b));
    order.truncate(k);
    order
}

/// 1-based position of row `target` in the candidate order.
fn rank_of(cosines: &[f64], target: usize) -> usize {
    1 + (0..cosines.len())
        .filter(|&j| candidate_order(cosines, j, target) == Ordering::Less)
        .count()
}

/// Indices of the `k` gold rows closest to `s_hat` by cosine.
pub fn rank_candidates(s_hat: &[f64], gold: &SemanticMatrix, k: usize) -> Result<Vec<usize>, LdlError> {
    if k == 0 {
        return Err(LdlError::InvalidDepth);
    }
    if s_hat.len() != gold.dimension() {
        return Err(LdlError::ShapeMismatch(format!(
            "prediction has {} dimensions, gold has {}",
            s_hat.len(),
            gold.dimension()
        )));
    }
    let cosines = GoldInventory::new(gold).cosines(s_hat);
    Ok(top_k(&cosines, k))
}

#[derive(Debug, Clone, PartialEq)]
pub struct WordEvaluation {
    pub word_id: String,
    /// 1-based rank of the word's gold row among all candidates.
    pub gold_rank: usize,
    pub candidates: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvaluationResult {
    pub k: usize,
    pub accuracy: f64,
    pub per_word: Vec<WordEvaluation>,
}

impl EvaluationResult {
    pub fn correct(&self) -> usize {
        self.per_word.iter().filter(|w| w.gold_rank <= self.k).count()
    }
}

/// Top-k accuracy of predictions against the gold inventory.
///
/// Row `i` of `s_hat` is the prediction for the word whose gold vector is row
/// `i` of `gold`; the word is correct when that row ranks within the top `k`.
pub fn evaluate_comprehension(
    s_hat: &PredictedSemantics,
    gold: &SemanticMatrix,
    k: usize,
    matching: GoldMatching,
) -> Result<EvaluationResult, LdlError> {
    if k == 0 {
        return Err(LdlError::InvalidDepth);
    }
    let pred = s_hat.matrix();
    if pred.nrows() != gold.nrows() || pred.ncols() != gold.dimension() {
        return Err(LdlError::ShapeMismatch(format!(
            "predictions are {}x{}, gold is {}x{}",
            pred.nrows(),
            pred.ncols(),
            gold.nrows(),
            gold.dimension()
        )));
    }
    let inventory = GoldInventory::new(gold);
    let mut per_word = Vec::with_capacity(pred.nrows());
    let mut query = vec![0.0; pred.ncols()];
    for i in 0..pred.nrows() {
        for (q, x) in query.iter_mut().zip(pred.row(i).iter()) {
            *q = *x;
        }
        let cosines = inventory.cosines(&query);
        let gold_rank = match matching {
            GoldMatching::Row => rank_of(&cosines, i),
            GoldMatching::IdenticalVector => (0..inventory.rows.len())
                .filter(|&j| inventory.rows[j] == inventory.rows[i])
                .map(|j| rank_of(&cosines, j))
                .min()
                .expect("row i matches itself"),
        };
        let candidates = top_k(&cosines, k)
            .into_iter()
            .map(|j| gold.row_words()[j].clone())
            .collect();
        per_word.push(WordEvaluation {
            word_id: s_hat.row_words()[i].clone(),
            gold_rank,
            candidates,
        });
    }
    let correct = per_word.iter().filter(|w| w.gold_rank <= k).count();
    let accuracy = if per_word.is_empty() {
        0.0
    } else {
        correct as f64 / per_word.len() as f64
    };
    Ok(EvaluationResult {
        k,
        accuracy,
        per_word,
    })
}
