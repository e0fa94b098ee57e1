//! Result tables and their CSV / markdown renderings.

use std::cmp::{Ordering, Reverse};
use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use super::PipelineError;

pub const CSV_HEADER: [&str; 6] = ["TRAIN", "TEST", "GRAMS", "TRIMMED", "K", "ACCURACY"];

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ResultKey {
    pub train: String,
    pub test: String,
    pub grams: usize,
    pub trimmed: bool,
    pub k: usize,
}

impl ResultKey {
    pub fn new(train: &str, test: &str, grams: usize, trimmed: bool, k: usize) -> Self {
        Self {
            train: train.to_string(),
            test: test.to_string(),
            grams,
            trimmed,
            k,
        }
    }

    pub fn is_monolingual(&self) -> bool {
        self.train == self.test
    }

    fn sort_key(&self) -> (&str, &str, Reverse<usize>, bool, usize) {
        (&self.train, &self.test, Reverse(self.grams), self.trimmed, self.k)
    }
}

/// Train, test, gram size descending, trimmed, k.
impl Ord for ResultKey {
    fn cmp(&self, other: &Self) -> Ordering {
        self.sort_key().cmp(&other.sort_key())
    }
}

impl PartialOrd for ResultKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Accuracies keyed by experiment cell and candidate depth.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ResultTable {
    rows: BTreeMap<ResultKey, f64>,
}

impl ResultTable {
    pub fn insert(&mut self, key: ResultKey, accuracy: f64) {
        self.rows.insert(key, accuracy);
    }

    pub fn get(&self, train: &str, test: &str, grams: usize, trimmed: bool, k: usize) -> Option<f64> {
        self.rows
            .get(&ResultKey::new(train, test, grams, trimmed, k))
            .copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&ResultKey, f64)> {
        self.rows.iter().map(|(k, v)| (k, *v))
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn merge(&mut self, other: ResultTable) {
        self.rows.extend(other.rows);
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), PipelineError> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(CSV_HEADER).map_err(PipelineError::csv)?;
        for (key, acc) in &self.rows {
            w.write_record([
                key.train.as_str(),
                &key.test,
                &key.grams.to_string(),
                &key.trimmed.to_string(),
                &key.k.to_string(),
                &acc.to_string(),
            ])
            .map_err(PipelineError::csv)?;
        }
        w.flush().map_err(|e| PipelineError::Csv(e.to_string()))
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("csv output is UTF-8")
    }

    pub fn read_csv<R: Read>(reader: R) -> Result<Self, PipelineError> {
        let mut rdr = csv::Reader::from_reader(reader);
        let headers = rdr.headers().map_err(PipelineError::csv)?.clone();
        if headers.iter().collect::<Vec<_>>() != CSV_HEADER {
            return Err(PipelineError::Csv(format!("unexpected header {headers:?}")));
        }
        let mut table = Self::default();
        for record in rdr.records() {
            let r = record.map_err(PipelineError::csv)?;
            let parse_err = |what: &str| PipelineError::Csv(format!("bad {what} in {r:?}"));
            let key = ResultKey {
                train: r[0].to_string(),
                test: r[1].to_string(),
                grams: r[2].parse().map_err(|_| parse_err("GRAMS"))?,
                trimmed: r[3].parse().map_err(|_| parse_err("TRIMMED"))?,
                k: r[4].parse().map_err(|_| parse_err("K"))?,
            };
            let acc: f64 = r[5].parse().map_err(|_| parse_err("ACCURACY"))?;
            table.insert(key, acc);
        }
        Ok(table)
    }

    /// Tables in the usual layout: top-1 first, deeper candidate sets in brackets.
    pub fn to_markdown(&self) -> String {
        let mut grams: Vec<usize> = self.rows.keys().map(|k| k.grams).collect();
        grams.sort_unstable_by(|a, b| b.cmp(a));
        grams.dedup();
        let mut ks: Vec<usize> = self.rows.keys().map(|k| k.k).collect();
        ks.sort_unstable();
        ks.dedup();
        let trims: Vec<bool> = [false, true]
            .into_iter()
            .filter(|t| self.rows.keys().any(|k| k.trimmed == *t))
            .collect();
        let cell = |train: &str, test: &str, g: usize, t: bool| -> String {
            let vals: Vec<Option<f64>> = ks.iter().map(|&k| self.get(train, test, g, t, k)).collect();
            if vals.iter().all(Option::is_none) {
                return "n/a".into();
            }
            let fmt = |v: &Option<f64>| v.map(|x| format!("{x:.2}")).unwrap_or_else(|| "n/a".into());
            let mut s = fmt(&vals[0]);
            if vals.len() > 1 {
                let rest: Vec<String> = vals[1..].iter().map(fmt).collect();
                s.push_str(&format!(" ({})", rest.join(" / ")));
            }
            s
        };
        let label = |t: bool| if t { "Trimmed" } else { "Full" };

        let mut out = String::from("# Comprehension accuracies\n\n");
        let depth_note: Vec<String> = ks.iter().map(|k| format!("top-{k}")).collect();
        out.push_str(&format!(
            "Cells show {}{}.\n",
            depth_note[0],
            if ks.len() > 1 {
                format!(" accuracy, with {} in brackets", depth_note[1..].join(" / "))
            } else {
                " accuracy".into()
            }
        ));

        let mut pairs: Vec<(&str, &str)> = Vec::new();
        for k in self.rows.keys() {
            let p = (k.train.as_str(), k.test.as_str());
            if !pairs.contains(&p) {
                pairs.push(p);
            }
        }
        let mono: Vec<&str> = pairs.iter().filter(|(a, b)| a == b).map(|(a, _)| *a).collect();
        let cross: Vec<(&str, &str)> = pairs.iter().copied().filter(|(a, b)| a != b).collect();
        let gram_header: Vec<String> = grams.iter().map(|g| format!("{g}-grams")).collect();

        if !mono.is_empty() {
            out.push_str("\n## Monolingual\n");
            for &t in &trims {
                out.push_str(&format!("\n### {} forms\n\n", label(t)));
                out.push_str(&format!("| Language | {} |\n", gram_header.join(" | ")));
                out.push_str(&format!("|---|{}\n", "---|".repeat(grams.len())));
                for lang in &mono {
                    let cells: Vec<String> = grams.iter().map(|&g| cell(lang, lang, g, t)).collect();
                    out.push_str(&format!("| {lang} | {} |\n", cells.join(" | ")));
                }
            }
        }
        if !cross.is_empty() {
            out.push_str("\n## Cross-language\n\n");
            let mut header = Vec::new();
            for &t in &trims {
                for g in &gram_header {
                    header.push(format!("{} {g}", label(t)));
                }
            }
            out.push_str(&format!("| Language pair | {} |\n", header.join(" | ")));
            out.push_str(&format!("|---|{}\n", "---|".repeat(header.len())));
            for (a, b) in &cross {
                let mut cells = Vec::new();
                for &t in &trims {
                    for &g in &grams {
                        cells.push(cell(a, b, g, t));
                    }
                }
                out.push_str(&format!("| {a}-{b} | {} |\n", cells.join(" | ")));
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Markdown,
}

/// Writes `results.csv` and/or `results.md` into `dir`. Nothing is written for empty results.
pub fn emit_report(
    results: &ResultTable,
    dir: &Path,
    formats: &[ReportFormat],
) -> Result<Vec<PathBuf>, PipelineError> {
    if results.is_empty() {
        return Err(PipelineError::EmptyResults);
    }
    std::fs::create_dir_all(dir).map_err(|e| PipelineError::io(dir, e))?;
    let mut written = Vec::new();
    for format in formats {
        let (name, body) = match format {
            ReportFormat::Csv => ("results.csv", results.to_csv_string()),
            ReportFormat::Markdown => ("results.md", results.to_markdown()),
        };
        let path = dir.join(name);
        std::fs::write(&path, body).map_err(|e| PipelineError::io(&path, e))?;
        written.push(path);
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> ResultTable {
        let mut t = ResultTable::default();
        for (train, test) in [("de", "nl"), ("nl", "de"), ("de", "de")] {
            for g in [2, 4, 3] {
                for trimmed in [true, false] {
                    for k in [5, 1] {
                        let acc = (g * 10 + k) as f64 / 100.0 + if trimmed { 0.1 } else { 0.0 };
                        t.insert(ResultKey::new(train, test, g, trimmed, k), acc / 3.0);
                    }
                }
            }
        }
        t
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let t = sample();
        let back = ResultTable::read_csv(t.to_csv_string().as_bytes()).unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn csv_row_order() {
        let csv = sample().to_csv_string();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "TRAIN,TEST,GRAMS,TRIMMED,K,ACCURACY");
        assert!(lines[1].starts_with("de,de,4,false,1,"));
        assert!(lines[2].starts_with("de,de,4,false,5,"));
        assert!(lines[3].starts_with("de,de,4,true,1,"));
        assert!(lines[5].starts_with("de,de,3,false,1,"));
        assert!(lines[13].starts_with("de,nl,4,false,1,"));
    }

    #[test]
    fn markdown_layout() {
        let mut t = ResultTable::default();
        t.insert(ResultKey::new("de", "nl", 4, false, 1), 0.57);
        t.insert(ResultKey::new("de", "nl", 4, false, 5), 0.71);
        t.insert(ResultKey::new("de", "nl", 4, true, 1), 0.81);
        t.insert(ResultKey::new("de", "nl", 4, true, 5), 0.86);
        let md = t.to_markdown();
        assert!(md.contains("| Language pair | Full 4-grams | Trimmed 4-grams |"));
        assert!(md.contains("| de-nl | 0.57 (0.71) | 0.81 (0.86) |"));
        assert!(!md.contains("Monolingual"));
    }

    #[test]
    fn empty_results_write_nothing() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("out");
        assert!(matches!(
            emit_report(&ResultTable::default(), &out, &[ReportFormat::Csv]),
            Err(PipelineError::EmptyResults)
        ));
        assert!(!out.exists());
        let files = emit_report(&sample(), &out, &[ReportFormat::Csv, ReportFormat::Markdown]).unwrap();
        assert_eq!(files.len(), 2);
        assert!(files.iter().all(|f| f.exists()));
    }
}
