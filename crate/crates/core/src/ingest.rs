//! Reading corpora from text streams.

use std::io::Read;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("input is not valid UTF-8 (byte offset {offset})")]
    BadEncoding { offset: usize },
    #[error("input contains no symbols")]
    EmptyCorpus,
    #[error("line {line}: `{text}` is not a number")]
    BadNumber { line: usize, text: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Ordered, non-empty list of non-empty symbol groups.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Corpus {
    items: Vec<String>,
    source: String,
}

impl Corpus {
    pub fn new(items: Vec<String>, source: impl Into<String>) -> Result<Self, IngestError> {
        if items.is_empty() || items.iter().any(String::is_empty) {
            return Err(IngestError::EmptyCorpus);
        }
        Ok(Self {
            items,
            source: source.into(),
        })
    }

    pub fn items(&self) -> &[String] {
        &self.items
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn with_source(mut self, source: impl Into<String>) -> Self {
        self.source = source.into();
        self
    }

    /// One item per line, `\n`-terminated.
    pub fn to_text(&self) -> String {
        self.items.iter().fold(String::new(), |mut s, item| {
            s.push_str(item);
            s.push('\n');
            s
        })
    }
}

fn read_utf8<R: Read>(mut source: R) -> Result<String, IngestError> {
    let mut bytes = Vec::new();
    source.read_to_end(&mut bytes)?;
    String::from_utf8(bytes).map_err(|e| IngestError::BadEncoding {
        offset: e.utf8_error().valid_up_to(),
    })
}

/// `(1-based line number, line)` for every non-empty line, with `\n` or
/// `\r\n` terminators removed.
fn non_empty_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.split('\n')
        .enumerate()
        .map(|(i, l)| (i + 1, l.strip_suffix('\r').unwrap_or(l)))
        .filter(|(_, l)| !l.is_empty())
}

pub fn read_text_corpus<R: Read>(source: R) -> Result<Corpus, IngestError> {
    let text = read_utf8(source)?;
    let items = non_empty_lines(&text).map(|(_, l)| l.to_owned()).collect();
    Corpus::new(items, "stream")
}

/// Integral values print without a decimal point, everything else as the
/// shortest decimal that round-trips.
pub fn canonical_number(value: f64) -> String {
    if value == 0.0 {
        // folds -0 into 0
        return "0".to_owned();
    }
    value.to_string()
}

pub fn read_numeric_series<R: Read>(source: R) -> Result<Corpus, IngestError> {
    let text = read_utf8(source)?;
    let items = non_empty_lines(&text)
        .map(|(line, l)| {
            let trimmed = l.trim();
            match trimmed.parse::<f64>() {
                Ok(v) if v.is_finite() => Ok(canonical_number(v)),
                _ => Err(IngestError::BadNumber {
                    line,
                    text: trimmed.to_owned(),
                }),
            }
        })
        .collect::<Result<Vec<_>, _>>()?;
    Corpus::new(items, "stream")
}
