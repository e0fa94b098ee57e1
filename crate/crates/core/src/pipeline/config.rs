//! Experiment configuration: a flat `key = value` file, overridable field by field.

use std::path::{Path, PathBuf};

use super::PipelineError;
use crate::alignment::DEFAULT_TRIM_THRESHOLD;
use crate::ldl::GoldMatching;

/// Which word representations an experiment runs on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Trimming {
    Full,
    Trimmed,
    #[default]
    Both,
}

impl Trimming {
    /// Trim flags to iterate over, full forms first.
    pub fn states(self) -> &'static [bool] {
        match self {
            Trimming::Full => &[false],
            Trimming::Trimmed => &[true],
            Trimming::Both => &[false, true],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub dataset: PathBuf,
    pub embeddings: PathBuf,
    pub languages: Vec<String>,
    pub grams: Vec<usize>,
    pub trimming: Trimming,
    pub threshold: f64,
    pub lambda: f64,
    pub top_k: Vec<usize>,
    pub output: PathBuf,
    /// Optional replacement for the bundled sound-class table.
    pub sound_classes: Option<PathBuf>,
    pub matching: GoldMatching,
    /// Also write `F` and `Ŝ` of every cell as CSV.
    pub dump_matrices: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            dataset: PathBuf::new(),
            embeddings: PathBuf::new(),
            languages: vec!["de".into(), "nl".into(), "en".into()],
            grams: vec![4, 3, 2],
            trimming: Trimming::Both,
            threshold: DEFAULT_TRIM_THRESHOLD,
            lambda: 0.0,
            top_k: vec![1, 5],
            output: PathBuf::from("results"),
            sound_classes: None,
            matching: GoldMatching::Row,
            dump_matrices: false,
        }
    }
}

fn invalid(message: impl Into<String>) -> PipelineError {
    PipelineError::InvalidConfig(message.into())
}

pub fn parse_list<T: std::str::FromStr>(key: &str, value: &str) -> Result<Vec<T>, PipelineError> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse().map_err(|_| invalid(format!("{key}: cannot parse `{s}`"))))
        .collect()
}

fn parse_bool(key: &str, value: &str) -> Result<bool, PipelineError> {
    match value.to_ascii_lowercase().as_str() {
        "true" | "yes" | "on" | "1" => Ok(true),
        "false" | "no" | "off" | "0" => Ok(false),
        _ => Err(invalid(format!("{key}: expected a boolean, got `{value}`"))),
    }
}

impl ExperimentConfig {
    /// Reads a config file; relative paths are resolved against its directory.
    pub fn from_file(path: impl AsRef<Path>) -> Result<Self, PipelineError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| PipelineError::io(path, e))?;
        let mut config = Self::parse(&text)?;
        if let Some(base) = path.parent() {
            config.resolve_relative_to(base);
        }
        Ok(config)
    }

    pub fn parse(text: &str) -> Result<Self, PipelineError> {
        let mut config = Self::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| invalid(format!("line {}: expected key = value", i + 1)))?;
            config.set(key.trim(), value.trim())?;
        }
        Ok(config)
    }

    /// Sets one field from its textual form.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), PipelineError> {
        match key {
            "dataset" => self.dataset = value.into(),
            "embeddings" => self.embeddings = value.into(),
            "languages" => {
                self.languages = parse_list::<String>(key, value)?
                    .into_iter()
                    .map(|l| l.to_lowercase())
                    .collect()
            }
            "grams" => self.grams = parse_list(key, value)?,
            "trim" => {
                self.trimming = match value.to_ascii_lowercase().as_str() {
                    "both" => Trimming::Both,
                    "on" | "true" | "yes" | "trimmed" => Trimming::Trimmed,
                    "off" | "false" | "no" | "full" => Trimming::Full,
                    _ => return Err(invalid(format!("trim: expected on, off or both, got `{value}`"))),
                }
            }
            "threshold" => {
                self.threshold = value
                    .parse()
                    .map_err(|_| invalid(format!("threshold: cannot parse `{value}`")))?
            }
            "lambda" => {
                self.lambda = value
                    .parse()
                    .map_err(|_| invalid(format!("lambda: cannot parse `{value}`")))?
            }
            "topk" | "top_k" => self.top_k = parse_list(key, value)?,
            "out" | "output" => self.output = value.into(),
            "sound_classes" => self.sound_classes = Some(value.into()),
            "matching" => {
                self.matching = match value {
                    "row" => GoldMatching::Row,
                    "identical" => GoldMatching::IdenticalVector,
                    _ => return Err(invalid(format!("matching: expected row or identical, got `{value}`"))),
                }
            }
            "dump_matrices" => self.dump_matrices = parse_bool(key, value)?,
            _ => return Err(invalid(format!("unknown key `{key}`"))),
        }
        Ok(())
    }

    fn resolve_relative_to(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if !p.as_os_str().is_empty() && p.is_relative() {
                *p = base.join(&*p);
            }
        };
        fix(&mut self.dataset);
        fix(&mut self.embeddings);
        fix(&mut self.output);
        if let Some(p) = &mut self.sound_classes {
            fix(p);
        }
    }

    pub fn validate(&self) -> Result<(), PipelineError> {
        if self.grams.is_empty() {
            return Err(invalid("at least one gram size is required"));
        }
        if let Some(n) = self.grams.iter().find(|n| !(2..=4).contains(*n)) {
            return Err(invalid(format!("gram size {n} is not one of 2, 3, 4")));
        }
        if self.top_k.is_empty() {
            return Err(invalid("at least one top-k depth is required"));
        }
        if self.top_k.contains(&0) {
            return Err(invalid("top-k depths must be at least 1"));
        }
        if !(0.0..=1.0).contains(&self.threshold) {
            return Err(invalid(format!("threshold {} is outside [0, 1]", self.threshold)));
        }
        if !self.lambda.is_finite() || self.lambda < 0.0 {
            return Err(invalid(format!("lambda {} must be non-negative", self.lambda)));
        }
        if self.languages.is_empty() {
            return Err(invalid("at least one language is required"));
        }
        for (i, l) in self.languages.iter().enumerate() {
            if self.languages[..i].contains(l) {
                return Err(invalid(format!("language {l} listed twice")));
            }
        }
        Ok(())
    }
}
