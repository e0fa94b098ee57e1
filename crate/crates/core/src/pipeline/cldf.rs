//! Best-effort flattening of a CLDF wordlist into the dataset TSV.
//!
//! Reads `forms.csv` and, when present, `languages.csv` and `cognates.csv`
//! from a CLDF directory (or its `cldf/` subdirectory). Cognate set and
//! alignment come from `cognates.csv` if it exists, otherwise from
//! `Cognacy`/`Alignment` columns of the forms table.

use std::collections::HashMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use log::warn;

use super::dataset::REQUIRED_COLUMNS;
use super::PipelineError;

/// ISO 639-3 codes of common languages and their 639-1 equivalents.
const ISO_639_3_TO_1: &[(&str, &str)] = &[
    ("deu", "de"),
    ("nld", "nl"),
    ("eng", "en"),
    ("fry", "fy"),
    ("dan", "da"),
    ("swe", "sv"),
    ("nor", "no"),
    ("nob", "nb"),
    ("nno", "nn"),
    ("isl", "is"),
    ("ltz", "lb"),
    ("afr", "af"),
    ("yid", "yi"),
    ("fra", "fr"),
    ("ita", "it"),
    ("spa", "es"),
    ("por", "pt"),
];

fn cldf_dir(dir: &Path) -> PathBuf {
    let nested = dir.join("cldf");
    if !dir.join("forms.csv").exists() && nested.join("forms.csv").exists() {
        nested
    } else {
        dir.to_path_buf()
    }
}

type Table = (Vec<String>, Vec<Vec<String>>);

fn read_table(path: &Path) -> Result<Table, PipelineError> {
    let mut rdr = csv::Reader::from_path(path).map_err(PipelineError::csv)?;
    let headers = rdr
        .headers()
        .map_err(PipelineError::csv)?
        .iter()
        .map(String::from)
        .collect();
    let rows = rdr
        .records()
        .map(|r| r.map(|r| r.iter().map(String::from).collect()).map_err(PipelineError::csv))
        .collect::<Result<_, _>>()?;
    Ok((headers, rows))
}

fn col(headers: &[String], names: &[&str]) -> Option<usize> {
    names
        .iter()
        .find_map(|n| headers.iter().position(|h| h.eq_ignore_ascii_case(n)))
}

fn required(headers: &[String], names: &[&str]) -> Result<usize, PipelineError> {
    col(headers, names).ok_or_else(|| PipelineError::MissingColumn(names[0].to_string()))
}

/// CLTS-style `source/target` segments keep the target part.
fn clean_segments(text: &str) -> String {
    text.split_whitespace()
        .filter(|s| *s != "+")
        .map(|s| s.rsplit('/').next().unwrap_or(s))
        .collect::<Vec<_>>()
        .join(" ")
}

fn clean_alignment(text: &str) -> String {
    text.split_whitespace()
        .filter(|s| !matches!(*s, "+" | "(" | ")"))
        .map(|s| s.rsplit('/').next().unwrap_or(s))
        .collect::<Vec<_>>()
        .join(" ")
}

/// Converts the CLDF wordlist in `dir` and writes the dataset TSV to `out`.
/// Returns the number of rows written.
pub fn convert_cldf<W: Write>(dir: &Path, out: W) -> Result<usize, PipelineError> {
    let dir = cldf_dir(dir);
    let (fh, forms) = read_table(&dir.join("forms.csv"))?;
    let f_id = required(&fh, &["ID"])?;
    let f_lang = required(&fh, &["Language_ID"])?;
    let f_param = required(&fh, &["Parameter_ID", "Concept_ID"])?;
    let f_form = required(&fh, &["Form", "Value"])?;
    let f_seg = required(&fh, &["Segments", "Tokens"])?;
    let f_cog = col(&fh, &["Cognacy", "Cognateset_ID", "COGID"]);
    let f_align = col(&fh, &["Alignment"]);

    let mut language_codes: HashMap<String, String> = HashMap::new();
    let languages_path = dir.join("languages.csv");
    if languages_path.exists() {
        let (lh, langs) = read_table(&languages_path)?;
        let l_id = required(&lh, &["ID"])?;
        let l_iso = col(&lh, &["ISO639P3code", "ISO639P3", "ISO"]);
        for row in langs {
            let iso = l_iso.map(|i| row[i].to_lowercase()).unwrap_or_default();
            let code = ISO_639_3_TO_1
                .iter()
                .find(|(three, _)| *three == iso)
                .map(|(_, two)| two.to_string())
                .unwrap_or_else(|| if iso.is_empty() { row[l_id].to_lowercase() } else { iso });
            language_codes.insert(row[l_id].clone(), code);
        }
    }

    let mut cognates: HashMap<String, (String, String)> = HashMap::new();
    let cognates_path = dir.join("cognates.csv");
    if cognates_path.exists() {
        let (ch, rows) = read_table(&cognates_path)?;
        let c_form = required(&ch, &["Form_ID"])?;
        let c_set = required(&ch, &["Cognateset_ID"])?;
        let c_align = col(&ch, &["Alignment"]);
        for row in rows {
            let align = c_align.map(|i| row[i].clone()).unwrap_or_default();
            cognates.insert(row[c_form].clone(), (row[c_set].clone(), align));
        }
    }

    let mut w = csv::WriterBuilder::new()
        .delimiter(b'\t')
        .quote_style(csv::QuoteStyle::Never)
        .from_writer(out);
    w.write_record(REQUIRED_COLUMNS).map_err(PipelineError::csv)?;
    let mut written = 0;
    for row in forms {
        let id = &row[f_id];
        let (cogset, alignment) = match cognates.get(id) {
            Some((set, align)) => (set.clone(), align.clone()),
            None => (
                f_cog.map(|i| row[i].clone()).unwrap_or_default(),
                f_align.map(|i| row[i].clone()).unwrap_or_default(),
            ),
        };
        if cogset.is_empty() {
            warn!("form {id} has no cognate set, skipped");
            continue;
        }
        let tokens = clean_segments(&row[f_seg]);
        if tokens.is_empty() {
            warn!("form {id} has no segments, skipped");
            continue;
        }
        let alignment = if alignment.trim().is_empty() {
            tokens.clone()
        } else {
            clean_alignment(&alignment)
        };
        let language = language_codes
            .get(&row[f_lang])
            .cloned()
            .unwrap_or_else(|| row[f_lang].to_lowercase());
        w.write_record([
            id.as_str(),
            &language,
            &row[f_param],
            &row[f_form],
            "",
            &tokens,
            &alignment,
            &cogset,
        ])
        .map_err(PipelineError::csv)?;
        written += 1;
    }
    w.flush().map_err(|e| PipelineError::Csv(e.to_string()))?;
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pipeline::dataset::read_dataset;

    #[test]
    fn converts_minimal_wordlist() {
        let dir = tempfile::tempdir().unwrap();
        let cldf = dir.path().join("cldf");
        std::fs::create_dir(&cldf).unwrap();
        std::fs::write(
            cldf.join("languages.csv"),
            "ID,Name,ISO639P3code\nGerman,German,deu\nEnglish,English,eng\n",
        )
        .unwrap();
        std::fs::write(
            cldf.join("forms.csv"),
            "ID,Language_ID,Parameter_ID,Form,Segments\n\
             g1,German,drink,trinken,t ʀ ɪ ŋ k ə n\n\
             e1,English,drink,drink,d ʀ ɪ ŋ k\n\
             e2,English,orphan,orphan,ɔ f ə n\n",
        )
        .unwrap();
        std::fs::write(
            cldf.join("cognates.csv"),
            "ID,Form_ID,Cognateset_ID,Alignment\n\
             1,g1,7,t ʀ ɪ ŋ k ə n\n\
             2,e1,7,d ʀ ɪ ŋ k - -\n",
        )
        .unwrap();
        let mut out = Vec::new();
        let n = convert_cldf(dir.path(), &mut out).unwrap();
        assert_eq!(n, 2);
        let table = read_dataset(out.as_slice()).unwrap();
        assert_eq!(table.languages(), ["de", "en"]);
        assert_eq!(table.set_count(), 1);
        assert_eq!(table.alignment("7").unwrap().width(), 7);
    }

    #[test]
    fn segment_cleanup() {
        assert_eq!(clean_segments("t + a/ɑ n"), "t ɑ n");
        assert_eq!(clean_alignment("( t - ) a"), "t - a");
    }
}
