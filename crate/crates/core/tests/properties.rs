mod support;

use std::sync::Arc;

use intellig::ldl::solve_least_squares;
use intellig::nalgebra::DMatrix;
use intellig::pipeline::{ResultKey, ResultTable};
use intellig::{
    cosine, estimate_mapping, evaluate_comprehension, extract_ngrams, parse_alignment, predict,
    rank_candidates, CueIndex, CueMatrix, GoldMatching, PredictedSemantics, SemanticMatrix,
    SoundClass, SoundClassSequence,
};
use proptest::prelude::*;

fn class_seq() -> impl Strategy<Value = SoundClassSequence> {
    prop::collection::vec(0..SoundClass::ALL.len(), 1..16)
        .prop_map(|ix| ix.into_iter().map(|i| SoundClass::ALL[i]).collect())
}

fn matrix(rows: usize, cols: usize) -> impl Strategy<Value = DMatrix<f64>> {
    prop::collection::vec(-1.0..1.0f64, rows * cols).prop_map(move |v| DMatrix::from_vec(rows, cols, v))
}

fn binary(rows: usize, cols: usize) -> impl Strategy<Value = DMatrix<f64>> {
    prop::collection::vec(prop::bool::weighted(0.4), rows * cols)
        .prop_map(move |v| DMatrix::from_iterator(rows, cols, v.into_iter().map(|b| b as u8 as f64)))
}

/// (C, S) with up to 20 words, 15 cues and 8 dimensions.
fn system() -> impl Strategy<Value = (DMatrix<f64>, DMatrix<f64>)> {
    (1usize..=20, 1usize..=15, 1usize..=8).prop_flat_map(|(m, n, d)| (binary(m, n), matrix(m, d)))
}

fn alignment() -> impl Strategy<Value = Vec<Vec<&'static str>>> {
    (2usize..=5, 1usize..=10).prop_flat_map(|(rows, width)| {
        prop::collection::vec(
            prop::collection::vec(prop::sample::select(vec!["-", "-", "t", "a", "n", "ə"]), width),
            rows,
        )
        .prop_filter("every row needs a segment", |rows| {
            rows.iter().all(|r| r.iter().any(|c| *c != "-"))
        })
    })
}

fn semantic(m: DMatrix<f64>) -> SemanticMatrix {
    let ids = (0..m.nrows()).map(|i| format!("w{i}")).collect();
    SemanticMatrix::new(m, ids)
}

fn predicted(m: DMatrix<f64>) -> PredictedSemantics {
    let ids = (0..m.nrows()).map(|i| format!("w{i}")).collect();
    PredictedSemantics::new(m, ids)
}

fn cue_matrix(c: DMatrix<f64>) -> CueMatrix {
    let mut index = CueIndex::new(2).unwrap();
    for j in 0..c.ncols() {
        index.insert(format!("c{j}"));
    }
    let ids = (0..c.nrows()).map(|i| format!("w{i}")).collect();
    CueMatrix::from_parts(c, ids, Arc::new(index)).unwrap()
}

proptest! {
    #[test]
    fn class_sequences_round_trip(seq in class_seq()) {
        prop_assert_eq!(seq.to_string().parse::<SoundClassSequence>().unwrap(), seq.clone());
        prop_assert_eq!(seq.compact().parse::<SoundClassSequence>().unwrap(), seq);
    }

    #[test]
    fn ngram_windows(seq in class_seq(), n in 2usize..=4) {
        if seq.len() + 2 < n {
            prop_assert!(extract_ngrams(&seq, n).is_err());
            return Ok(());
        }
        let grams = extract_ngrams(&seq, n).unwrap();
        prop_assert_eq!(grams.len(), seq.len() + 3 - n);
        let distinct: std::collections::HashSet<String> = grams.iter().cloned().collect();
        prop_assert_eq!(distinct, support::grams(&seq.compact(), n));
    }

    #[test]
    fn trimming_keeps_low_gap_columns(rows in alignment(), threshold in 0.0..=1.0f64) {
        let named: Vec<(String, Vec<&str>)> =
            rows.iter().enumerate().map(|(i, r)| (format!("L{i}"), r.clone())).collect();
        let set = parse_alignment("p", named).unwrap();
        if let Ok(t) = set.trim(threshold) {
            let profile = t.gap_profile();
            prop_assert!(profile.fractions().iter().all(|&f| f <= threshold));
            prop_assert_eq!(t.trim(threshold).unwrap(), t.clone());
            for lang in set.languages() {
                let full = set.tokens(lang).unwrap();
                let short = t.tokens(lang).unwrap();
                // trimmed tokens form a subsequence of the full tokens
                let mut it = full.tokens().iter();
                prop_assert!(short.tokens().iter().all(|tok| it.any(|x| x == tok)));
            }
        }
    }

    #[test]
    fn cosine_is_symmetric_and_bounded(u in prop::collection::vec(-10.0..10.0f64, 1..12), scale in 0.01..100.0f64) {
        let v: Vec<f64> = u.iter().rev().copied().collect();
        let a = cosine(&u, &v).unwrap();
        prop_assert_eq!(a, cosine(&v, &u).unwrap());
        prop_assert!((-1.0..=1.0).contains(&a));
        let scaled: Vec<f64> = u.iter().map(|x| x * scale).collect();
        prop_assert!((cosine(&scaled, &v).unwrap() - a).abs() < 1e-12);
    }

    #[test]
    fn least_squares_residual_is_minimal((c, s) in system(), seed in any::<u64>()) {
        use rand::{Rng, SeedableRng};
        let f = solve_least_squares(&c, &s, 0.0, 1e-10).unwrap();
        let best = (&c * &f - &s).norm();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..5 {
            let delta = DMatrix::from_fn(f.nrows(), f.ncols(), |_, _| rng.random_range(-1e-3..1e-3));
            prop_assert!((&c * (&f + delta) - &s).norm() >= best - 1e-12);
        }
    }

    #[test]
    fn least_squares_matches_gradient_descent((c, s) in system()) {
        let f = solve_least_squares(&c, &s, 0.0, 1e-10).unwrap();
        prop_assert!((f - support::gradient_descent(&c, &s)).norm() < 1e-6);
    }

    #[test]
    fn ridge_satisfies_normal_equations((c, s) in system(), lambda in 1e-3..10.0f64) {
        let f = solve_least_squares(&c, &s, lambda, 1e-10).unwrap();
        let mut lhs = c.transpose() * &c;
        for j in 0..lhs.nrows() {
            lhs[(j, j)] += lambda;
        }
        prop_assert!((lhs * f - c.transpose() * &s).amax() < 1e-8);
    }

    #[test]
    fn prediction_reproduces_training_fit((c, s) in system()) {
        let cues = cue_matrix(c.clone());
        let gold = semantic(s);
        let mapping = estimate_mapping(&cues, &gold, 0.0).unwrap();
        let pred = predict(&cues, &mapping).unwrap();
        prop_assert!((pred.matrix() - &c * mapping.weights()).amax() < 1e-12);
    }

    #[test]
    fn evaluation_invariants(
        (p, g) in (2usize..30, 1usize..8).prop_flat_map(|(r, d)| (matrix(r, d), matrix(r, d))),
        factor in 1e-3..1e3f64,
    ) {
        let gold = semantic(g);
        let pred = predicted(p.clone());
        let mut last = 0.0;
        for k in 1..=gold.nrows() {
            let acc = evaluate_comprehension(&pred, &gold, k, GoldMatching::Row).unwrap().accuracy;
            prop_assert!(acc >= last);
            last = acc;
        }
        let scaled = predicted(p * factor);
        let a = evaluate_comprehension(&pred, &gold, 1, GoldMatching::Row).unwrap();
        let b = evaluate_comprehension(&scaled, &gold, 1, GoldMatching::Row).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn identical_matching_is_more_lenient(
        (p, g) in (2usize..20, 1usize..4).prop_flat_map(|(r, d)| (matrix(r, d), matrix(r, d))),
        dup in any::<prop::sample::Index>(),
    ) {
        let mut g = g;
        let j = dup.index(g.nrows() - 1) + 1;
        let first = g.row(0).clone_owned();
        g.row_mut(j).copy_from(&first);
        let gold = semantic(g);
        let pred = predicted(p);
        let strict = evaluate_comprehension(&pred, &gold, 1, GoldMatching::Row).unwrap();
        let lenient = evaluate_comprehension(&pred, &gold, 1, GoldMatching::IdenticalVector).unwrap();
        prop_assert!(lenient.accuracy >= strict.accuracy);
    }

    #[test]
    fn candidates_are_sorted_by_cosine(
        (q, g) in (1usize..6).prop_flat_map(|d| (prop::collection::vec(-1.0..1.0f64, d), matrix(12, d))),
        k in 1usize..=12,
    ) {
        let gold = semantic(g.clone());
        let top = rank_candidates(&q, &gold, k).unwrap();
        prop_assert_eq!(top.len(), k);
        let cos: Vec<f64> = top.iter().map(|&j| support::cos(&q, &support::row(&g, j))).collect();
        prop_assert!(cos.windows(2).all(|w| w[0] >= w[1]));
        let best = (0..12).map(|j| support::cos(&q, &support::row(&g, j))).fold(f64::MIN, f64::max);
        prop_assert_eq!(cos[0], best);
    }

    #[test]
    fn result_csv_round_trip(values in prop::collection::vec(0.0..=1.0f64, 1..20)) {
        let mut table = ResultTable::default();
        let langs = ["de", "nl", "en"];
        for (i, v) in values.iter().enumerate() {
            let key = ResultKey::new(langs[i % 3], langs[(i / 3) % 3], 2 + i % 3, i % 2 == 0, 1 + 4 * (i % 2));
            table.insert(key, *v);
        }
        prop_assert_eq!(ResultTable::read_csv(table.to_csv_string().as_bytes()).unwrap(), table);
    }
}
