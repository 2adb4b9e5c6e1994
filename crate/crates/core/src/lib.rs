//! Continual-learning sequence prediction over integer-class encoded symbols.
//!
//! The crate has three layers:
//!
//! * [`encoder`] turns a corpus of symbol groups into integer classes `1..=L`
//!   and keeps a sensor memory for decoding predictions back to symbols,
//! * [`learner`] adapts a deviant mean with additive/subtractive (or
//!   multiplicative/divisive) Hebbian updates and k-winner-take-all selection,
//! * [`pipeline`] runs the learner continually over a class sequence and
//!   scores its test segment with MAPE.
//!
//! [`ingest`] and [`cli`] handle input files and the `neuroami` binary.
//!
//! ```
//! use neuroami::{EncoderConfig, RunConfig, run_continual};
//!
//! let corpus = ["Car", "Bus", "Bus", "Car", "Car", "Car", "Car", "Car", "Bus"];
//! let encoding = EncoderConfig::default().encode(&corpus).unwrap();
//! assert_eq!(encoding.classes.classes(), &[1, 5, 5, 1, 1, 1, 1, 1, 5]);
//!
//! let trace = run_continual(&encoding.classes, &RunConfig::default()).unwrap();
//! assert_eq!(trace.test_count(), 6);
//! ```

pub mod cli;
pub mod encoder;
pub mod ingest;
pub mod learner;
pub mod pipeline;
pub mod scalar;

pub use encoder::{
    build_sensor_memory, class_encode, decode_class, swap_match, symbol_integer_transform, ClassLevel, ClassSequence,
    EncodeError, EncoderConfig, Encoding, MatchScore, Reference, SensorMemory, SymbolMatrix,
};
pub use ingest::{read_numeric_series, read_text_corpus, Corpus, IngestError};
pub use learner::{select_winners, LearnerError, RuleMode, StepOutcome, UpdateBranch};
pub use pipeline::{
    baseline_persistence, decode_trace, mape, run_continual, split_index, DecodedStep, Phase, PipelineError,
};
pub use scalar::Scalar;

pub type Learner = learner::Learner<f64>;
pub type LearnerConfig = learner::LearnerConfig<f64>;
pub type LearnerState = learner::LearnerState<f64>;
pub type RunConfig = pipeline::RunConfig<f64>;
pub type PredictionTrace = pipeline::PredictionTrace<f64>;
pub type TraceStep = pipeline::TraceStep<f64>;

pub type Learner32 = learner::Learner<f32>;
pub type LearnerConfig32 = learner::LearnerConfig<f32>;
pub type LearnerState32 = learner::LearnerState<f32>;
pub type RunConfig32 = pipeline::RunConfig<f32>;
pub type PredictionTrace32 = pipeline::PredictionTrace<f32>;
