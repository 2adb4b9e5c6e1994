//! Symbol-to-integer-class encoder.
//!
//! A corpus of symbol groups (one word, token or stringified number per row)
//! is turned into a sequence of small integer classes in `1..=L`:
//!
//! 1. [`symbol_integer_transform`] lays every row out as Unicode code points
//!    in a zero-padded matrix.
//! 2. [`swap_match`] scales the matrix by its global maximum code and compares
//!    every row position-by-position against a reference row. The resulting
//!    bit vector is read as a base-2 integer (most significant bit first) and
//!    normalised by the largest such integer over all rows.
//! 3. [`class_encode`] maps each normalised score `s` to `floor(L^s)`.
//! 4. [`build_sensor_memory`] records which symbol landed in which class so
//!    that predicted classes can be decoded back into symbols.
//!
//! The reference row always scores 1 and therefore always encodes to `L`.
//! Rows with no positional agreement score 0 and encode to class 1.

use std::fmt;

use num_bigint::BigUint;
use num_rational::Ratio;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

pub const MIN_CLASS_LEVEL: u32 = 2;
pub const MAX_CLASS_LEVEL: u32 = 10;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EncodeError {
    #[error("corpus is empty")]
    EmptyCorpus,
    #[error("row {row} is empty")]
    EmptyRow { row: usize },
    #[error("row {row} contains a NUL character at column {column}")]
    NulSymbol { row: usize, column: usize },
    #[error("reference row {index} is out of range for a corpus of {rows} rows")]
    BadReference { index: usize, rows: usize },
    #[error("class level {0} is outside {MIN_CLASS_LEVEL}..={MAX_CLASS_LEVEL}")]
    BadClassLevel(u32),
    #[error("class {class} is outside 1..={class_level}")]
    BadClass { class: u32, class_level: u32 },
    #[error("{symbols} symbols but {classes} classes")]
    LengthMismatch { symbols: usize, classes: usize },
    #[error("sensor memory has no filled slots")]
    EmptyMemory,
}

/// Number of integer classes produced by the encoder (the frequency-tuning
/// parameter). Always within `2..=10`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ClassLevel(u32);

impl ClassLevel {
    pub fn new(level: u32) -> Result<Self, EncodeError> {
        if (MIN_CLASS_LEVEL..=MAX_CLASS_LEVEL).contains(&level) {
            Ok(Self(level))
        } else {
            Err(EncodeError::BadClassLevel(level))
        }
    }

    pub fn get(self) -> u32 {
        self.0
    }
}

impl Default for ClassLevel {
    fn default() -> Self {
        Self(5)
    }
}

impl fmt::Display for ClassLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Which corpus row every other row is matched against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Reference {
    #[default]
    Last,
    First,
    /// Zero-based row index.
    Index(usize),
}

impl Reference {
    pub fn resolve(self, rows: usize) -> Result<usize, EncodeError> {
        match self {
            Reference::Last if rows > 0 => Ok(rows - 1),
            Reference::First if rows > 0 => Ok(0),
            Reference::Index(index) if index < rows => Ok(index),
            Reference::Index(index) => Err(EncodeError::BadReference { index, rows }),
            Reference::Last | Reference::First => Err(EncodeError::EmptyCorpus),
        }
    }
}

impl fmt::Display for Reference {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Reference::Last => f.write_str("last"),
            Reference::First => f.write_str("first"),
            Reference::Index(i) => write!(f, "{i}"),
        }
    }
}

impl std::str::FromStr for Reference {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "last" => Ok(Reference::Last),
            "first" => Ok(Reference::First),
            other => other
                .parse::<usize>()
                .map(Reference::Index)
                .map_err(|_| format!("expected `last`, `first` or a row index, got `{s}`")),
        }
    }
}

/// Zero-padded matrix of character codes, one row per corpus entry.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolMatrix {
    rows: usize,
    width: usize,
    codes: Vec<u32>,
    lengths: Vec<usize>,
}

impl SymbolMatrix {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn width(&self) -> usize {
        self.width
    }

    /// Original (unpadded) length of every row, in characters.
    pub fn lengths(&self) -> &[usize] {
        &self.lengths
    }

    /// Full padded row.
    pub fn row(&self, index: usize) -> &[u32] {
        &self.codes[index * self.width..(index + 1) * self.width]
    }

    pub fn iter_rows(&self) -> impl Iterator<Item = &[u32]> {
        self.codes.chunks_exact(self.width)
    }

    /// Largest code over the whole matrix (max over columns, then over rows).
    pub fn max_code(&self) -> u32 {
        self.codes.iter().copied().max().unwrap_or(0)
    }
}

/// Converts every symbol group into its Unicode code points, padding short
/// rows with zeros on the right.
pub fn symbol_integer_transform<T: AsRef<str>>(corpus: &[T]) -> Result<SymbolMatrix, EncodeError> {
    if corpus.is_empty() {
        return Err(EncodeError::EmptyCorpus);
    }
    let rows: Vec<Vec<u32>> = corpus
        .iter()
        .enumerate()
        .map(|(row, s)| {
            let codes: Vec<u32> = s.as_ref().chars().map(u32::from).collect();
            if codes.is_empty() {
                return Err(EncodeError::EmptyRow { row });
            }
            if let Some(column) = codes.iter().position(|&c| c == 0) {
                return Err(EncodeError::NulSymbol { row, column });
            }
            Ok(codes)
        })
        .collect::<Result<_, _>>()?;

    let width = rows.iter().map(Vec::len).max().unwrap_or(0);
    let mut codes = vec![0u32; rows.len() * width];
    let mut lengths = Vec::with_capacity(rows.len());
    for (i, row) in rows.iter().enumerate() {
        codes[i * width..i * width + row.len()].copy_from_slice(row);
        lengths.push(row.len());
    }
    Ok(SymbolMatrix {
        rows: rows.len(),
        width,
        codes,
        lengths,
    })
}

/// Positional agreement of one row with the reference row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatchScore {
    bits: Vec<bool>,
    value: BigUint,
    scale: Ratio<BigUint>,
}

impl MatchScore {
    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    /// `bits` read as a base-2 integer, most significant bit first.
    pub fn value(&self) -> &BigUint {
        &self.value
    }

    /// `value / max(value)` over the corpus, kept exact.
    pub fn scale(&self) -> &Ratio<BigUint> {
        &self.scale
    }

    pub fn scale_f64(&self) -> f64 {
        ratio_to_f64(&self.scale)
    }
}

fn ratio_to_f64(r: &Ratio<BigUint>) -> f64 {
    if r.numer().is_zero() {
        return 0.0;
    }
    if r.is_one() {
        return 1.0;
    }
    r.to_f64().unwrap_or_else(|| {
        // Only reachable for astronomically wide rows; fall back to a shifted quotient.
        let shift = r.denom().bits().saturating_sub(60);
        let n = (r.numer() >> shift).to_f64().unwrap_or(0.0);
        let d = (r.denom() >> shift).to_f64().unwrap_or(1.0);
        n / d
    })
}

fn bits_to_biguint(bits: &[bool]) -> BigUint {
    let mut value = BigUint::zero();
    for &bit in bits {
        value <<= 1u32;
        if bit {
            value += 1u32;
        }
    }
    value
}

/// Matches every row against the reference row after max-max scaling.
///
/// Padding cells compare equal to padding cells, so two short rows agree on
/// their shared tail of zeros.
pub fn swap_match(matrix: &SymbolMatrix, reference: Reference) -> Result<Vec<MatchScore>, EncodeError> {
    let reference_row = reference.resolve(matrix.rows())?;
    let max_code = f64::from(matrix.max_code());
    let scaled: Vec<Vec<f64>> = matrix
        .iter_rows()
        .map(|row| row.iter().map(|&c| f64::from(c) / max_code).collect())
        .collect();
    let reference_scaled = &scaled[reference_row];

    let matched: Vec<(Vec<bool>, BigUint)> = scaled
        .iter()
        .map(|row| {
            let bits: Vec<bool> = row.iter().zip(reference_scaled).map(|(a, b)| a == b).collect();
            let value = bits_to_biguint(&bits);
            (bits, value)
        })
        .collect();

    // The reference row matches itself everywhere, so this maximum is never zero.
    let max_value = matched
        .iter()
        .map(|(_, v)| v)
        .max()
        .cloned()
        .unwrap_or_else(BigUint::one);

    Ok(matched
        .into_iter()
        .map(|(bits, value)| {
            let scale = Ratio::new(value.clone(), max_value.clone());
            MatchScore { bits, value, scale }
        })
        .collect())
}

/// Integer class per corpus row, each in `1..=class_level`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassSequence {
    classes: Vec<u32>,
    class_level: ClassLevel,
}

impl ClassSequence {
    /// Builds a sequence directly, e.g. from an already-encoded series.
    pub fn new(classes: Vec<u32>, class_level: ClassLevel) -> Result<Self, EncodeError> {
        if let Some(&class) = classes.iter().find(|&&c| c < 1 || c > class_level.get()) {
            return Err(EncodeError::BadClass {
                class,
                class_level: class_level.get(),
            });
        }
        Ok(Self { classes, class_level })
    }

    pub fn classes(&self) -> &[u32] {
        &self.classes
    }

    pub fn class_level(&self) -> ClassLevel {
        self.class_level
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }
}

/// `floor(L^s)` for a scale `s` in `[0, 1]`.
pub fn class_of_scale(scale: f64, class_level: ClassLevel) -> u32 {
    let level = class_level.get();
    let class = f64::from(level).powf(scale).floor();
    debug_assert!(class >= 1.0 && class <= f64::from(level));
    class as u32
}

pub fn class_encode(scores: &[MatchScore], class_level: u32) -> Result<ClassSequence, EncodeError> {
    let class_level = ClassLevel::new(class_level)?;
    if scores.is_empty() {
        return Err(EncodeError::EmptyCorpus);
    }
    let classes = scores
        .iter()
        .map(|s| class_of_scale(s.scale_f64(), class_level))
        .collect();
    Ok(ClassSequence { classes, class_level })
}

/// Class-index to symbol lookup used to decode predictions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SensorMemory {
    slots: Vec<Option<String>>,
}

impl SensorMemory {
    pub fn class_level(&self) -> u32 {
        self.slots.len() as u32
    }

    /// Slot for class `c` (1-based).
    pub fn slot(&self, class: u32) -> Option<&str> {
        let index = usize::try_from(class).ok()?.checked_sub(1)?;
        self.slots.get(index)?.as_deref()
    }

    /// `(class, symbol)` for every slot, empty slots included.
    pub fn iter(&self) -> impl Iterator<Item = (u32, Option<&str>)> {
        self.slots.iter().enumerate().map(|(i, s)| (i as u32 + 1, s.as_deref()))
    }

    pub fn filled(&self) -> usize {
        self.slots.iter().filter(|s| s.is_some()).count()
    }

    /// Decodes class `c`. Empty slots resolve to the nearest filled slot,
    /// ties going to the lower class; the flag reports whether the slot
    /// itself was filled.
    pub fn decode(&self, class: u32) -> Result<(&str, bool), EncodeError> {
        let level = self.class_level();
        if class < 1 || class > level {
            return Err(EncodeError::BadClass {
                class,
                class_level: level,
            });
        }
        if let Some(symbol) = self.slot(class) {
            return Ok((symbol, true));
        }
        for distance in 1..level {
            let below = class.checked_sub(distance).filter(|&c| c >= 1);
            let above = Some(class + distance).filter(|&c| c <= level);
            for candidate in [below, above].into_iter().flatten() {
                if let Some(symbol) = self.slot(candidate) {
                    return Ok((symbol, false));
                }
            }
        }
        Err(EncodeError::EmptyMemory)
    }
}

pub fn build_sensor_memory<T: AsRef<str>>(corpus: &[T], classes: &ClassSequence) -> Result<SensorMemory, EncodeError> {
    if corpus.len() != classes.len() {
        return Err(EncodeError::LengthMismatch {
            symbols: corpus.len(),
            classes: classes.len(),
        });
    }
    let mut slots = vec![None; classes.class_level().get() as usize];
    for (symbol, &class) in corpus.iter().zip(classes.classes()) {
        slots[class as usize - 1] = Some(symbol.as_ref().to_owned());
    }
    Ok(SensorMemory { slots })
}

pub fn decode_class(class: u32, memory: &SensorMemory) -> Result<(&str, bool), EncodeError> {
    memory.decode(class)
}

/// Encoder settings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct EncoderConfig {
    pub class_level: ClassLevel,
    pub reference: Reference,
}

/// Everything the encoder produces for one corpus.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Encoding {
    pub matrix: SymbolMatrix,
    pub scores: Vec<MatchScore>,
    pub classes: ClassSequence,
    pub memory: SensorMemory,
}

impl EncoderConfig {
    pub fn encode<T: AsRef<str>>(&self, corpus: &[T]) -> Result<Encoding, EncodeError> {
        let matrix = symbol_integer_transform(corpus)?;
        let scores = swap_match(&matrix, self.reference)?;
        let classes = class_encode(&scores, self.class_level.get())?;
        let memory = build_sensor_memory(corpus, &classes)?;
        Ok(Encoding {
            matrix,
            scores,
            classes,
            memory,
        })
    }
}
