//! Encode → continual train → continual test.
//!
//! The learner updates after every observation in both phases; the
//! train/test split only decides where error accounting starts (unless
//! `freeze_after_train` is set).

use std::io::{Read, Write};

use thiserror::Error;

use crate::encoder::{ClassLevel, ClassSequence, EncodeError, EncoderConfig, SensorMemory};
use crate::learner::{Learner, LearnerConfig, LearnerError};
use crate::scalar::Scalar;

/// Header of the exported trace.
pub const TRACE_HEADER: [&str; 9] = [
    "step",
    "phase",
    "prev_class",
    "raw_prediction",
    "predicted_class",
    "expected_class",
    "abs_error",
    "cumulative_mape",
    "deviant_mean",
];

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("sequence of length {0} is too short; at least 2 elements are required")]
    TooShort(usize),
    #[error("train fraction {0} must lie strictly between 0 and 1")]
    BadTrainFraction(f64),
    #[error("trace has no test steps")]
    NoTestSteps,
    #[error("step {step}: {source}")]
    Learner {
        step: usize,
        #[source]
        source: LearnerError,
    },
    #[error(transparent)]
    Config(#[from] LearnerError),
    #[error(transparent)]
    Encode(#[from] EncodeError),
    #[error("trace line {line}: {message}")]
    TraceParse { line: u64, message: String },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig<S> {
    pub train_fraction: f64,
    /// `class_level` is taken from the class sequence at run time.
    pub learner: LearnerConfig<S>,
    pub encoder: EncoderConfig,
    /// Stop updating the learner once the test segment begins.
    pub freeze_after_train: bool,
}

impl<S: Scalar> Default for RunConfig<S> {
    fn default() -> Self {
        Self {
            train_fraction: 0.35,
            learner: LearnerConfig::default(),
            encoder: EncoderConfig::default(),
            freeze_after_train: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    Train,
    Test,
}

impl Phase {
    pub fn as_str(self) -> &'static str {
        match self {
            Phase::Train => "train",
            Phase::Test => "test",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceStep<S> {
    /// Position of the predicted element in the class sequence (≥ 1).
    pub index: usize,
    pub phase: Phase,
    pub previous_class: u32,
    pub raw_prediction: S,
    pub predicted_class: u32,
    pub expected_class: u32,
    pub abs_error: u32,
    pub deviant_mean_after: S,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PredictionTrace<S> {
    pub steps: Vec<TraceStep<S>>,
    /// Running MAPE (percent), one entry per test step.
    pub cumulative_mape: Vec<f64>,
}

impl<S: Scalar> PredictionTrace<S> {
    fn from_steps(steps: Vec<TraceStep<S>>) -> Self {
        let cumulative_mape = running_mape(steps.iter().filter(|s| s.phase == Phase::Test));
        Self { steps, cumulative_mape }
    }

    pub fn test_steps(&self) -> impl Iterator<Item = &TraceStep<S>> {
        self.steps.iter().filter(|s| s.phase == Phase::Test)
    }

    pub fn train_count(&self) -> usize {
        self.steps.len() - self.cumulative_mape.len()
    }

    pub fn test_count(&self) -> usize {
        self.cumulative_mape.len()
    }

    /// Writes the trace as comma-separated text. Reals use six decimals;
    /// `cumulative_mape` is blank on train rows.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), PipelineError> {
        let mut w = csv::WriterBuilder::new().from_writer(out);
        w.write_record(TRACE_HEADER)?;
        let mut mape = self.cumulative_mape.iter();
        for s in &self.steps {
            let cumulative = match s.phase {
                Phase::Test => mape.next().map(|m| format!("{m:.6}")).unwrap_or_default(),
                Phase::Train => String::new(),
            };
            w.write_record([
                s.index.to_string(),
                s.phase.as_str().to_owned(),
                s.previous_class.to_string(),
                format!("{:.6}", s.raw_prediction),
                s.predicted_class.to_string(),
                s.expected_class.to_string(),
                s.abs_error.to_string(),
                cumulative,
                format!("{:.6}", s.deviant_mean_after),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    /// Reads a trace written by [`write_csv`](Self::write_csv). Parsing stops
    /// at the first blank line so that appended sections are ignored. The
    /// running MAPE is recomputed from the class columns.
    pub fn read_csv<R: Read>(input: R) -> Result<Self, PipelineError> {
        let mut text = String::new();
        std::io::BufReader::new(input).read_to_string(&mut text)?;
        let section: Vec<&str> = text.lines().take_while(|l| !l.trim().is_empty()).collect();
        let err = |line: usize, message: String| PipelineError::TraceParse {
            line: line as u64,
            message,
        };
        let header = section.first().ok_or_else(|| err(1, "missing header".into()))?;
        let fields: Vec<&str> = header.split(',').map(str::trim).collect();
        if fields != TRACE_HEADER {
            return Err(err(1, format!("unexpected header `{header}`")));
        }

        let mut steps = Vec::with_capacity(section.len().saturating_sub(1));
        for (i, line) in section.iter().enumerate().skip(1) {
            let line_no = i + 1;
            let cols: Vec<&str> = line.split(',').map(str::trim).collect();
            if cols.len() != TRACE_HEADER.len() {
                return Err(err(
                    line_no,
                    format!("expected {} fields, found {}", TRACE_HEADER.len(), cols.len()),
                ));
            }
            let int = |c: usize| {
                cols[c]
                    .parse::<u32>()
                    .map_err(|_| err(line_no, format!("bad {} `{}`", TRACE_HEADER[c], cols[c])))
            };
            let real = |c: usize| {
                cols[c]
                    .parse::<f64>()
                    .map(S::from_f64_lossy)
                    .map_err(|_| err(line_no, format!("bad {} `{}`", TRACE_HEADER[c], cols[c])))
            };
            let phase = match cols[1] {
                "train" => Phase::Train,
                "test" => Phase::Test,
                other => return Err(err(line_no, format!("bad phase `{other}`"))),
            };
            let index = cols[0]
                .parse::<usize>()
                .map_err(|_| err(line_no, format!("bad step `{}`", cols[0])))?;
            let predicted_class = int(4)?;
            let expected_class = int(5)?;
            if expected_class == 0 {
                return Err(err(line_no, "expected_class must be at least 1".into()));
            }
            steps.push(TraceStep {
                index,
                phase,
                previous_class: int(2)?,
                raw_prediction: real(3)?,
                predicted_class,
                expected_class,
                abs_error: int(6)?,
                deviant_mean_after: real(8)?,
            });
        }
        if let Some(pos) = steps
            .windows(2)
            .position(|w| w[0].phase == Phase::Test && w[1].phase == Phase::Train)
        {
            return Err(err(pos + 3, "train step after a test step".into()));
        }
        Ok(Self::from_steps(steps))
    }
}

fn running_mape<'a, S: 'a>(test: impl Iterator<Item = &'a TraceStep<S>>) -> Vec<f64> {
    let mut total = 0.0;
    test.enumerate()
        .map(|(i, s)| {
            total += f64::from(s.predicted_class.abs_diff(s.expected_class)) / f64::from(s.expected_class);
            100.0 * total / (i + 1) as f64
        })
        .collect()
}

/// Number of leading elements that belong to the training segment:
/// `max(1, floor(train_fraction * len))`.
pub fn split_index(sequence_length: usize, train_fraction: f64) -> Result<usize, PipelineError> {
    if sequence_length < 2 {
        return Err(PipelineError::TooShort(sequence_length));
    }
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(PipelineError::BadTrainFraction(train_fraction));
    }
    let train = (train_fraction * sequence_length as f64).floor() as usize;
    Ok(train.clamp(1, sequence_length - 1))
}

fn phase_of(index: usize, split: usize) -> Phase {
    if index < split {
        Phase::Train
    } else {
        Phase::Test
    }
}

/// Runs the learner over the whole class sequence, predicting element `t`
/// from element `t - 1`.
pub fn run_continual<S: Scalar>(
    classes: &ClassSequence,
    config: &RunConfig<S>,
) -> Result<PredictionTrace<S>, PipelineError> {
    let seq = classes.classes();
    let split = split_index(seq.len(), config.train_fraction)?;
    let learner_config = LearnerConfig {
        class_level: classes.class_level(),
        ..config.learner.clone()
    };
    let mut learner = Learner::new(learner_config)?;

    let mut steps = Vec::with_capacity(seq.len() - 1);
    for (index, pair) in seq.windows(2).enumerate().map(|(i, w)| (i + 1, w)) {
        let (previous, expected) = (pair[0], pair[1]);
        let phase = phase_of(index, split);
        let outcome = if phase == Phase::Test && config.freeze_after_train {
            learner.observe_frozen(previous, expected)
        } else {
            learner.step(previous, expected)
        }
        .map_err(|source| PipelineError::Learner { step: index, source })?;
        steps.push(TraceStep {
            index,
            phase,
            previous_class: previous,
            raw_prediction: outcome.raw_prediction,
            predicted_class: outcome.predicted_class,
            expected_class: expected,
            abs_error: outcome.predicted_class.abs_diff(expected),
            deviant_mean_after: outcome.new_deviant_mean,
        });
    }
    Ok(PredictionTrace::from_steps(steps))
}

/// Persistence forecast: every element is predicted to repeat the previous one.
pub fn baseline_persistence<S: Scalar>(
    classes: &ClassSequence,
    config: &RunConfig<S>,
) -> Result<PredictionTrace<S>, PipelineError> {
    let seq = classes.classes();
    let split = split_index(seq.len(), config.train_fraction)?;
    let steps = seq
        .windows(2)
        .enumerate()
        .map(|(i, w)| TraceStep {
            index: i + 1,
            phase: phase_of(i + 1, split),
            previous_class: w[0],
            raw_prediction: S::from_class(w[0]),
            predicted_class: w[0],
            expected_class: w[1],
            abs_error: w[0].abs_diff(w[1]),
            deviant_mean_after: S::zero(),
        })
        .collect();
    Ok(PredictionTrace::from_steps(steps))
}

/// Final MAPE (percent) and the running series over test steps.
pub fn mape<S>(trace: &PredictionTrace<S>) -> Result<(f64, Vec<f64>), PipelineError> {
    let series = running_mape(trace.steps.iter().filter(|s| s.phase == Phase::Test));
    match series.last() {
        Some(&last) => Ok((last, series)),
        None => Err(PipelineError::NoTestSteps),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecodedStep {
    pub index: usize,
    pub phase: Phase,
    pub predicted_symbol: String,
    pub expected_symbol: String,
    /// The predicted class had its own filled memory slot.
    pub exact: bool,
}

pub fn decode_trace<S>(trace: &PredictionTrace<S>, memory: &SensorMemory) -> Result<Vec<DecodedStep>, EncodeError> {
    trace
        .steps
        .iter()
        .map(|s| {
            let (predicted, exact) = memory.decode(s.predicted_class)?;
            let (expected, _) = memory.decode(s.expected_class)?;
            Ok(DecodedStep {
                index: s.index,
                phase: s.phase,
                predicted_symbol: predicted.to_owned(),
                expected_symbol: expected.to_owned(),
                exact,
            })
        })
        .collect()
}

/// Convenience wrapper: class sequence from raw integers.
pub fn classes_from(values: Vec<u32>, class_level: u32) -> Result<ClassSequence, EncodeError> {
    ClassSequence::new(values, ClassLevel::new(class_level)?)
}
