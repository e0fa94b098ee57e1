//! Independent re-implementations used as oracles by the integration tests.
//!
//! Nothing here calls into the library's algorithms: the dataset and embedding
//! files are parsed by hand, n-grams live in hash sets, the mapping is
//! `Cᵀ(CCᵀ)⁺S` from a symmetric eigendecomposition and ranking is a full sort.

#![allow(dead_code)]

use std::collections::{BTreeMap, HashMap, HashSet};
use std::path::{Path, PathBuf};

use nalgebra::{DMatrix, SymmetricEigen};

pub fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

const CLASS_TABLE: &str = include_str!("../../data/dolgopolsky.tsv");

fn class_table() -> HashMap<String, char> {
    CLASS_TABLE
        .lines()
        .filter(|l| !l.starts_with('#') && !l.trim().is_empty())
        .map(|l| {
            let mut f = l.split('\t');
            let seg = f.next().unwrap().to_string();
            let class = f.next().unwrap().trim().chars().next().unwrap();
            (seg, class)
        })
        .collect()
}

fn class_string(tokens: &[&str], table: &HashMap<String, char>) -> String {
    tokens
        .iter()
        .map(|t| {
            table.get(*t).copied().unwrap_or_else(|| {
                let first: String = t.chars().take(1).collect();
                *table.get(&first).unwrap_or_else(|| panic!("no class for {t}"))
            })
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct RefWord {
    pub id: String,
    pub key: String,
    pub alignment: Vec<String>,
}

/// Complete, embeddable cognate sets with each language's word.
pub struct RefData {
    pub languages: Vec<String>,
    pub sets: Vec<BTreeMap<String, RefWord>>,
    pub vectors: HashMap<(String, String), Vec<f64>>,
}

fn parse_key(key: &str) -> Option<(String, String)> {
    let rest = key.strip_prefix("/c/").unwrap_or(key);
    let mut parts = rest.splitn(3, '/');
    let lang = parts.next()?.to_string();
    let form = parts.next()?.to_lowercase().replace(' ', "_");
    Some((lang, form))
}

pub fn load_reference(dataset: &Path, embeddings: &Path, languages: &[&str]) -> RefData {
    let mut vectors = HashMap::new();
    let text = std::fs::read_to_string(embeddings).unwrap();
    for line in text.lines() {
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() == 2 && fields.iter().all(|f| f.parse::<usize>().is_ok()) {
            continue;
        }
        let (lang, form) = parse_key(fields[0]).unwrap();
        let v: Vec<f64> = fields[1..].iter().map(|x| x.parse().unwrap()).collect();
        vectors.insert((lang, form), v);
    }

    let text = std::fs::read_to_string(dataset).unwrap();
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split('\t').collect();
    let col = |name: &str| header.iter().position(|h| *h == name).unwrap();
    let (c_id, c_lang, c_form, c_lookup, c_align, c_set) = (
        col("ID"),
        col("LANGUAGE"),
        col("FORM"),
        col("LOOKUP"),
        col("ALIGNMENT"),
        col("COGSET"),
    );
    let mut order = Vec::new();
    let mut by_set: HashMap<String, BTreeMap<String, RefWord>> = HashMap::new();
    for line in lines.filter(|l| !l.trim().is_empty()) {
        let f: Vec<&str> = line.split('\t').collect();
        let lang = f[c_lang].to_lowercase();
        if !languages.contains(&lang.as_str()) {
            continue;
        }
        let key = if f[c_lookup].is_empty() { f[c_form] } else { f[c_lookup] };
        let set = f[c_set].to_string();
        if !by_set.contains_key(&set) {
            order.push(set.clone());
        }
        by_set.entry(set).or_default().insert(
            lang,
            RefWord {
                id: f[c_id].to_string(),
                key: key.to_lowercase().replace(' ', "_"),
                alignment: f[c_align].split(' ').map(String::from).collect(),
            },
        );
    }
    let sets = order
        .into_iter()
        .map(|s| by_set.remove(&s).unwrap())
        .filter(|words| {
            words.len() == languages.len()
                && words
                    .iter()
                    .all(|(l, w)| vectors.contains_key(&(l.clone(), w.key.clone())))
        })
        .collect();
    RefData {
        languages: languages.iter().map(|s| s.to_string()).collect(),
        sets,
        vectors,
    }
}

impl RefData {
    /// Sound-class strings of `language`, one per set, optionally trimmed.
    pub fn classes(&self, language: &str, threshold: Option<f64>) -> Vec<String> {
        let table = class_table();
        self.sets
            .iter()
            .map(|set| {
                let width = set[language].alignment.len();
                let keep: Vec<usize> = (0..width)
                    .filter(|&j| match threshold {
                        None => true,
                        Some(t) => {
                            let gaps = set.values().filter(|w| w.alignment[j] == "-").count();
                            gaps as f64 / set.len() as f64 <= t
                        }
                    })
                    .collect();
                let tokens: Vec<&str> = keep
                    .iter()
                    .map(|&j| set[language].alignment[j].as_str())
                    .filter(|t| *t != "-")
                    .collect();
                class_string(&tokens, &table)
            })
            .collect()
    }

    pub fn semantics(&self, language: &str) -> DMatrix<f64> {
        let rows: Vec<&Vec<f64>> = self
            .sets
            .iter()
            .map(|set| &self.vectors[&(language.to_string(), set[language].key.clone())])
            .collect();
        DMatrix::from_fn(rows.len(), rows[0].len(), |i, j| rows[i][j])
    }

    pub fn median_cosine(&self, a: &str, b: &str) -> f64 {
        let (sa, sb) = (self.semantics(a), self.semantics(b));
        let mut values: Vec<f64> = (0..sa.nrows())
            .map(|i| cos(&row(&sa, i), &row(&sb, i)))
            .collect();
        values.sort_by(|x, y| x.partial_cmp(y).unwrap());
        let m = values.len() / 2;
        if values.len() % 2 == 0 {
            (values[m - 1] + values[m]) / 2.0
        } else {
            values[m]
        }
    }

    /// Top-k accuracies for training on `train` and testing on `test`.
    pub fn accuracy(&self, train: &str, test: &str, n: usize, threshold: Option<f64>, ks: &[usize]) -> Vec<f64> {
        let train_words = self.classes(train, threshold);
        let test_words = self.classes(test, threshold);
        let train_grams: Vec<HashSet<String>> = train_words.iter().map(|w| grams(w, n)).collect();
        let test_grams: Vec<HashSet<String>> = test_words.iter().map(|w| grams(w, n)).collect();
        let mut cues: Vec<String> = train_grams
            .iter()
            .chain(&test_grams)
            .flatten()
            .cloned()
            .collect::<HashSet<_>>()
            .into_iter()
            .collect();
        cues.sort();
        let c_train = indicator(&train_grams, &cues);
        let c_test = indicator(&test_grams, &cues);
        let s_hat = c_test * min_norm_mapping(&c_train, &self.semantics(train));
        let gold = self.semantics(test);
        let ranks: Vec<usize> = (0..s_hat.nrows()).map(|i| gold_rank(&row(&s_hat, i), &gold, i)).collect();
        ks.iter()
            .map(|&k| ranks.iter().filter(|&&r| r <= k).count() as f64 / ranks.len() as f64)
            .collect()
    }
}

pub fn grams(classes: &str, n: usize) -> HashSet<String> {
    let marked: Vec<char> = format!("#{classes}#").chars().collect();
    (0..=marked.len().saturating_sub(n))
        .map(|i| marked[i..i + n].iter().collect())
        .collect()
}

fn indicator(words: &[HashSet<String>], cues: &[String]) -> DMatrix<f64> {
    DMatrix::from_fn(words.len(), cues.len(), |i, j| {
        if words[i].contains(&cues[j]) {
            1.0
        } else {
            0.0
        }
    })
}

/// `Cᵀ(CCᵀ)⁺S` through the eigendecomposition of the word Gram matrix.
pub fn min_norm_mapping(c: &DMatrix<f64>, s: &DMatrix<f64>) -> DMatrix<f64> {
    let gram = c * c.transpose();
    let eig = SymmetricEigen::new(gram);
    let top = eig.eigenvalues.iter().cloned().fold(0.0, f64::max);
    let mut inv = DMatrix::zeros(c.nrows(), c.nrows());
    for (i, &l) in eig.eigenvalues.iter().enumerate() {
        if l > 1e-10 * top {
            let v = eig.eigenvectors.column(i);
            inv += (v * v.transpose()) / l;
        }
    }
    c.transpose() * inv * s
}

pub fn row(m: &DMatrix<f64>, i: usize) -> Vec<f64> {
    m.row(i).iter().copied().collect()
}

pub fn cos(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        0.0
    } else {
        dot / (na * nb)
    }
}

/// Position of gold row `target` after sorting all rows by cosine, ties by index.
pub fn gold_rank(pred: &[f64], gold: &DMatrix<f64>, target: usize) -> usize {
    let mut scored: Vec<(f64, usize)> = (0..gold.nrows()).map(|j| (cos(pred, &row(gold, j)), j)).collect();
    scored.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap().then(a.1.cmp(&b.1)));
    1 + scored.iter().position(|&(_, j)| j == target).unwrap()
}

/// Plain gradient descent on `½‖CF − S‖²` from `F = 0`.
///
/// Started at zero the iterates stay in the row space of `C`, so the limit is
/// the minimum-norm least-squares solution.
pub fn gradient_descent(c: &DMatrix<f64>, s: &DMatrix<f64>) -> DMatrix<f64> {
    let gram = c.transpose() * c;
    let target = c.transpose() * s;
    let lipschitz = power_iteration(&gram);
    let mut f = DMatrix::zeros(c.ncols(), s.ncols());
    if lipschitz == 0.0 {
        return f;
    }
    let step = 1.0 / lipschitz;
    for _ in 0..20_000_000 {
        let grad = &gram * &f - &target;
        let g = grad.amax();
        f -= grad * step;
        if g < 1e-13 {
            break;
        }
    }
    f
}

/// Largest eigenvalue of a symmetric positive semidefinite matrix.
pub fn power_iteration(a: &DMatrix<f64>) -> f64 {
    let n = a.nrows();
    let mut v = DMatrix::from_fn(n, 1, |i, _| 1.0 + i as f64 / n as f64);
    let mut value = 0.0;
    for _ in 0..10_000 {
        let w = a * &v;
        let norm = w.norm();
        if norm == 0.0 {
            return 0.0;
        }
        let next = v.dot(&w) / v.dot(&v);
        v = w / norm;
        if (next - value).abs() <= 1e-15 * next.abs() {
            value = next;
            break;
        }
        value = next;
    }
    // a little headroom keeps the step strictly stable
    value * 1.01
}

/// Writes a random trilingual dataset of `sets` cognate sets plus matching
/// `dim`-dimensional embeddings; returns (dataset, embeddings) paths.
pub fn write_synthetic(dir: &Path, sets: usize, dim: usize, seed: u64) -> (PathBuf, PathBuf) {
    use rand::{Rng, SeedableRng};
    use std::fmt::Write;

    const SEGMENTS: &[&str] = &[
        "p", "b", "t", "d", "k", "m", "n", "s", "z", "f", "v", "r", "l", "h", "w", "ʃ", "x", "ŋ",
        "a", "ə", "ɪ", "ʊ", "ɔ", "e", "i", "o", "u",
    ];
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let languages = ["de", "nl", "en"];
    let mut tsv = String::from("ID\tLANGUAGE\tCONCEPT\tFORM\tLOOKUP\tTOKENS\tALIGNMENT\tCOGSET\n");
    let mut emb = format!("{} {dim}\n", sets * languages.len());
    for set in 0..sets {
        let width = rng.random_range(3..=9);
        let base: Vec<&str> = (0..width).map(|_| SEGMENTS[rng.random_range(0..SEGMENTS.len())]).collect();
        let shared: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
        for lang in languages {
            let cells: Vec<&str> = base
                .iter()
                .enumerate()
                .map(|(j, seg)| {
                    if j >= 2 && rng.random_bool(0.25) {
                        "-"
                    } else if rng.random_bool(0.3) {
                        SEGMENTS[rng.random_range(0..SEGMENTS.len())]
                    } else {
                        seg
                    }
                })
                .collect();
            let tokens: Vec<&str> = cells.iter().copied().filter(|c| *c != "-").collect();
            let form = format!("w{set}");
            writeln!(
                tsv,
                "{lang}-{set}\t{lang}\tC{set}\t{form}\t\t{}\t{}\t{set}",
                tokens.join(" "),
                cells.join(" ")
            )
            .unwrap();
            let v: Vec<String> = shared
                .iter()
                .map(|x| format!("{:.5}", x + 0.5 * rng.random_range(-1.0..1.0)))
                .collect();
            writeln!(emb, "/c/{lang}/{form} {}", v.join(" ")).unwrap();
        }
    }
    let (d, e) = (dir.join("synthetic.tsv"), dir.join("synthetic.txt"));
    std::fs::write(&d, tsv).unwrap();
    std::fs::write(&e, emb).unwrap();
    (d, e)
}
