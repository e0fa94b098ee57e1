//! Conversion of segmented IPA transcriptions into Dolgopolsky-style sound classes.
//!
//! The mapping is table driven. [`SoundClassTable::default`] ships the
//! conventional consonant classes plus one vowel class; other tables can be
//! loaded from the same two-column TSV format.

use std::collections::HashMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;
use std::sync::OnceLock;

use thiserror::Error;

/// Gap symbol used in alignments. Never a valid segment.
pub const GAP: &str = "-";

const DEFAULT_TABLE: &str = include_str!("../data/dolgopolsky.tsv");

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PhonologyError {
    #[error("token sequence is empty")]
    EmptySequence,
    #[error("empty token at position {0}")]
    EmptyToken(usize),
    #[error("gap symbol at position {0} is not a segment")]
    GapToken(usize),
    #[error("{}", unknown_segment_message(.token, *.position, .word_id.as_deref()))]
    UnknownSegment {
        token: String,
        position: Option<usize>,
        word_id: Option<String>,
    },
    #[error("unknown sound class `{0}`")]
    UnknownClass(String),
    #[error("sound class table line {line}: {message}")]
    TableSyntax { line: usize, message: String },
    #[error("cannot read sound class table: {0}")]
    Io(String),
}

fn unknown_segment_message(token: &str, position: Option<usize>, word_id: Option<&str>) -> String {
    let mut msg = format!("unknown segment `{token}`");
    if let Some(pos) = position {
        msg.push_str(&format!(" at position {pos}"));
    }
    if let Some(id) = word_id {
        msg.push_str(&format!(" in word {id}"));
    }
    msg
}

impl PhonologyError {
    /// Attaches a word identifier to an `UnknownSegment` error; other variants pass through.
    pub fn with_word_id(self, id: &str) -> Self {
        match self {
            PhonologyError::UnknownSegment {
                token, position, ..
            } => PhonologyError::UnknownSegment {
                token,
                position,
                word_id: Some(id.to_string()),
            },
            other => other,
        }
    }
}

/// One of the eleven sound classes. `V` is the only vowel class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SoundClass {
    P,
    T,
    S,
    K,
    M,
    N,
    R,
    W,
    J,
    H,
    V,
}

impl SoundClass {
    pub const ALL: [SoundClass; 11] = [
        SoundClass::P,
        SoundClass::T,
        SoundClass::S,
        SoundClass::K,
        SoundClass::M,
        SoundClass::N,
        SoundClass::R,
        SoundClass::W,
        SoundClass::J,
        SoundClass::H,
        SoundClass::V,
    ];

    pub fn symbol(self) -> char {
        match self {
            SoundClass::P => 'P',
            SoundClass::T => 'T',
            SoundClass::S => 'S',
            SoundClass::K => 'K',
            SoundClass::M => 'M',
            SoundClass::N => 'N',
            SoundClass::R => 'R',
            SoundClass::W => 'W',
            SoundClass::J => 'J',
            SoundClass::H => 'H',
            SoundClass::V => 'V',
        }
    }

    pub fn from_symbol(symbol: char) -> Option<Self> {
        SoundClass::ALL.into_iter().find(|c| c.symbol() == symbol)
    }

    pub fn is_vowel(self) -> bool {
        self == SoundClass::V
    }
}

impl fmt::Display for SoundClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.symbol())
    }
}

impl FromStr for SoundClass {
    type Err = PhonologyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut chars = s.chars();
        match (chars.next(), chars.next()) {
            (Some(c), None) => {
                SoundClass::from_symbol(c).ok_or_else(|| PhonologyError::UnknownClass(s.into()))
            }
            _ => Err(PhonologyError::UnknownClass(s.into())),
        }
    }
}

/// A pre-segmented IPA transcription: one segment per element, no gaps.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IpaTokenSequence(Vec<String>);

impl IpaTokenSequence {
    pub fn new<I, S>(tokens: I) -> Result<Self, PhonologyError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let tokens: Vec<String> = tokens.into_iter().map(Into::into).collect();
        if tokens.is_empty() {
            return Err(PhonologyError::EmptySequence);
        }
        for (i, t) in tokens.iter().enumerate() {
            if t.is_empty() {
                return Err(PhonologyError::EmptyToken(i));
            }
            if t == GAP {
                return Err(PhonologyError::GapToken(i));
            }
        }
        Ok(Self(tokens))
    }

    /// Parses a space-separated segment string such as `"t ʀ ɪ ŋ k ə n"`.
    pub fn from_segmented(text: &str) -> Result<Self, PhonologyError> {
        Self::new(text.split_whitespace())
    }

    pub fn tokens(&self) -> &[String] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for IpaTokenSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0.join(" "))
    }
}

/// Sound classes of one word, same length as the transcription it came from.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SoundClassSequence(Vec<SoundClass>);

impl SoundClassSequence {
    pub fn new(classes: Vec<SoundClass>) -> Self {
        Self(classes)
    }

    pub fn classes(&self) -> &[SoundClass] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Class symbols without separators, e.g. `TRVNK`.
    pub fn compact(&self) -> String {
        self.0.iter().map(|c| c.symbol()).collect()
    }
}

impl fmt::Display for SoundClassSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for c in &self.0 {
            if !first {
                f.write_str(" ")?;
            }
            first = false;
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

/// Accepts both `"T R V N K"` and `"TRVNK"`.
impl FromStr for SoundClassSequence {
    type Err = PhonologyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.chars()
            .filter(|c| !c.is_whitespace())
            .map(|c| SoundClass::from_symbol(c).ok_or_else(|| PhonologyError::UnknownClass(c.into())))
            .collect::<Result<Vec<_>, _>>()
            .map(Self)
    }
}

impl FromIterator<SoundClass> for SoundClassSequence {
    fn from_iter<I: IntoIterator<Item = SoundClass>>(iter: I) -> Self {
        Self(iter.into_iter().collect())
    }
}

/// Segment to sound-class lookup with diacritic-stripping fallback.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SoundClassTable {
    entries: HashMap<String, SoundClass>,
}

impl Default for SoundClassTable {
    fn default() -> Self {
        Self::parse(DEFAULT_TABLE).expect("bundled sound class table is well formed")
    }
}

impl SoundClassTable {
    /// Parses `SEGMENT<TAB>CLASS` lines; blank lines and `#` comments are skipped.
    pub fn parse(text: &str) -> Result<Self, PhonologyError> {
        let mut entries = HashMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim_end_matches('\r');
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let syntax = |message: &str| PhonologyError::TableSyntax {
                line: i + 1,
                message: message.to_string(),
            };
            let mut fields = line.split('\t');
            let (segment, class) = match (fields.next(), fields.next(), fields.next()) {
                (Some(s), Some(c), None) => (s.trim(), c.trim()),
                _ => return Err(syntax("expected two tab-separated columns")),
            };
            if segment.is_empty() || segment == GAP {
                return Err(syntax("segment must be non-empty and not a gap"));
            }
            let class: SoundClass = class.parse().map_err(|_| syntax("unknown class symbol"))?;
            entries.insert(segment.to_string(), class);
        }
        Ok(Self { entries })
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self, PhonologyError> {
        let text =
            std::fs::read_to_string(path).map_err(|e| PhonologyError::Io(e.to_string()))?;
        Self::parse(&text)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Classifies one segment.
    ///
    /// Lookup order: the exact token, the token with diacritics and length
    /// marks removed, then the first base character. A token whose first base
    /// character is a vowel (diphthongs, nasalized or long vowels) is `V`.
    pub fn class_of(&self, token: &str) -> Result<SoundClass, PhonologyError> {
        let unknown = || PhonologyError::UnknownSegment {
            token: token.to_string(),
            position: None,
            word_id: None,
        };
        if token.is_empty() || token == GAP {
            return Err(unknown());
        }
        if let Some(&c) = self.entries.get(token) {
            return Ok(c);
        }
        let base = strip_diacritics(token);
        if let Some(&c) = self.entries.get(base.as_str()) {
            return Ok(c);
        }
        let first = base.chars().next().ok_or_else(unknown)?;
        let mut buf = [0u8; 4];
        self.entries
            .get(first.encode_utf8(&mut buf) as &str)
            .copied()
            .ok_or_else(unknown)
    }

    /// Element-wise [`class_of`](Self::class_of); errors carry the failing position.
    pub fn to_sound_classes(
        &self,
        seq: &IpaTokenSequence,
    ) -> Result<SoundClassSequence, PhonologyError> {
        seq.tokens()
            .iter()
            .enumerate()
            .map(|(i, t)| {
                self.class_of(t).map_err(|e| match e {
                    PhonologyError::UnknownSegment { token, word_id, .. } => {
                        PhonologyError::UnknownSegment {
                            token,
                            position: Some(i),
                            word_id,
                        }
                    }
                    other => other,
                })
            })
            .collect()
    }
}

fn is_diacritic(c: char) -> bool {
    matches!(c as u32,
        0x0300..=0x036F   // combining diacritical marks, incl. tie bars
        | 0x02B0..=0x02FF // spacing modifier letters: ʰ ʷ ʲ ː ˑ ˈ ...
        | 0x1AB0..=0x1AFF
        | 0x1D2C..=0x1D6A // modifier letters
        | 0x1DC0..=0x1DFF
        | 0x2070..=0x209F // super- and subscripts such as ⁿ
    )
}

fn strip_diacritics(token: &str) -> String {
    token.chars().filter(|&c| !is_diacritic(c)).collect()
}

fn default_table() -> &'static SoundClassTable {
    static TABLE: OnceLock<SoundClassTable> = OnceLock::new();
    TABLE.get_or_init(SoundClassTable::default)
}

/// [`SoundClassTable::class_of`] against the bundled table.
pub fn class_of(token: &str) -> Result<SoundClass, PhonologyError> {
    default_table().class_of(token)
}

/// [`SoundClassTable::to_sound_classes`] against the bundled table.
pub fn to_sound_classes(seq: &IpaTokenSequence) -> Result<SoundClassSequence, PhonologyError> {
    default_table().to_sound_classes(seq)
}
