//! Layered run configuration: command-line flags, then a `key = value`
//! file, then built-in defaults.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::Args;
use thiserror::Error;

use crate::encoder::{ClassLevel, EncoderConfig, Reference};
use crate::learner::{LearnerConfig, RuleMode};
use crate::pipeline::RunConfig;

/// Where a configuration value came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Origin {
    Flag(&'static str),
    File { path: PathBuf, line: usize },
    Default,
}

impl fmt::Display for Origin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Origin::Flag(name) => write!(f, "flag {name}"),
            Origin::File { path, line } => write!(f, "{}:{line}", path.display()),
            Origin::Default => f.write_str("default"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("invalid {field} ({origin}): {message}")]
    Invalid {
        field: &'static str,
        origin: Origin,
        message: String,
    },
    #[error("{path}:{line}: {message}")]
    Syntax {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("cannot read configuration file {path}: {message}")]
    Unreadable { path: PathBuf, message: String },
}

/// Flags shared by `encode` and `predict`.
#[derive(Debug, Clone, Default, Args)]
pub struct ConfigFlags {
    /// Configuration file (`key = value` lines, `#` comments)
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Number of integer classes, 2..=10
    #[arg(long, value_name = "2..10")]
    pub class_level: Option<u32>,
    /// Reference row: `last`, `first` or a zero-based row index
    #[arg(long, value_name = "last|first|N")]
    pub reference: Option<String>,
    /// Fraction of the sequence used as the training segment
    #[arg(long, value_name = "0..1")]
    pub train_fraction: Option<f64>,
    /// Size of the deviant-mean adjustment grid
    #[arg(long, value_name = "N")]
    pub population: Option<usize>,
    /// Largest adjustment in the grid
    #[arg(long, value_name = "R")]
    pub max_adjust: Option<f64>,
    /// Update rule
    #[arg(long, value_name = "addsub|muldiv")]
    pub rule: Option<String>,
    /// Bias added to the deviant mean after an exact prediction
    #[arg(long, value_name = "R", allow_hyphen_values = true)]
    pub lp: Option<f64>,
    /// Number of winning candidates averaged into the new deviant mean
    #[arg(long, value_name = "N")]
    pub k_winners: Option<usize>,
    /// Treat input lines as numbers and canonicalise them
    #[arg(long)]
    pub numeric: bool,
    /// Stop learning once the test segment starts
    #[arg(long)]
    pub freeze_after_train: bool,
}

/// Fully resolved and validated settings.
#[derive(Debug, Clone, PartialEq)]
pub struct CliConfig {
    pub class_level: ClassLevel,
    pub reference: Reference,
    pub train_fraction: f64,
    pub population: usize,
    pub max_adjust: f64,
    pub rule: RuleMode,
    pub lp: f64,
    pub k_winners: usize,
    pub numeric: bool,
    pub freeze_after_train: bool,
}

impl Default for CliConfig {
    fn default() -> Self {
        Self {
            class_level: ClassLevel::default(),
            reference: Reference::Last,
            train_fraction: 0.35,
            population: 1000,
            max_adjust: 2.0,
            rule: RuleMode::AdditiveSubtractive,
            lp: 0.0,
            k_winners: 1,
            numeric: false,
            freeze_after_train: false,
        }
    }
}

const KEYS: [&str; 10] = [
    "class_level",
    "reference",
    "train_fraction",
    "population",
    "max_adjust",
    "rule",
    "lp",
    "k_winners",
    "numeric",
    "freeze_after_train",
];

/// Parsed configuration file: key → (raw value, line number).
#[derive(Debug, Clone, Default)]
pub struct ConfigFile {
    path: PathBuf,
    entries: BTreeMap<String, (String, usize)>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Unreadable {
            path: path.to_owned(),
            message: e.to_string(),
        })?;
        Self::parse(&text, path)
    }

    pub fn parse(text: &str, path: &Path) -> Result<Self, ConfigError> {
        let mut entries = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let syntax = |message: String| ConfigError::Syntax {
                path: path.to_owned(),
                line,
                message,
            };
            let (key, value) = content
                .split_once('=')
                .ok_or_else(|| syntax(format!("expected `key = value`, got `{content}`")))?;
            let key = key.trim().replace('-', "_");
            if !KEYS.contains(&key.as_str()) {
                return Err(syntax(format!("unknown key `{key}`")));
            }
            if entries.insert(key.clone(), (value.trim().to_owned(), line)).is_some() {
                return Err(syntax(format!("duplicate key `{key}`")));
            }
        }
        Ok(Self {
            path: path.to_owned(),
            entries,
        })
    }
}

struct Resolver<'a> {
    file: Option<&'a ConfigFile>,
}

impl Resolver<'_> {
    fn pick<T>(
        &self,
        field: &'static str,
        flag_name: &'static str,
        flag: Option<T>,
        default: T,
    ) -> Result<(T, Origin), ConfigError>
    where
        T: FromStr,
        T::Err: fmt::Display,
    {
        if let Some(v) = flag {
            return Ok((v, Origin::Flag(flag_name)));
        }
        if let Some(file) = self.file {
            if let Some((raw, line)) = file.entries.get(field) {
                let origin = Origin::File {
                    path: file.path.clone(),
                    line: *line,
                };
                return match raw.parse::<T>() {
                    Ok(v) => Ok((v, origin)),
                    Err(e) => Err(ConfigError::Invalid {
                        field,
                        origin,
                        message: format!("cannot parse `{raw}`: {e}"),
                    }),
                };
            }
        }
        Ok((default, Origin::Default))
    }

    fn switch(&self, field: &'static str, flag_name: &'static str, flag: bool) -> Result<bool, ConfigError> {
        Ok(self.pick(field, flag_name, flag.then_some(true), false)?.0)
    }
}

fn invalid(field: &'static str, origin: Origin, message: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        field,
        origin,
        message: message.into(),
    }
}

impl CliConfig {
    /// Merges flags over the configuration file (if any) over defaults and
    /// validates every field.
    pub fn resolve(flags: &ConfigFlags) -> Result<Self, ConfigError> {
        let file = flags.config.as_deref().map(ConfigFile::load).transpose()?;
        Self::resolve_with(flags, file.as_ref())
    }

    pub fn resolve_with(flags: &ConfigFlags, file: Option<&ConfigFile>) -> Result<Self, ConfigError> {
        let d = CliConfig::default();
        let r = Resolver { file };

        let (level, origin) = r.pick("class_level", "--class-level", flags.class_level, d.class_level.get())?;
        let class_level = ClassLevel::new(level).map_err(|e| invalid("class_level", origin, e.to_string()))?;

        let reference_flag = flags
            .reference
            .as_deref()
            .map(|s| s.parse::<Reference>())
            .transpose()
            .map_err(|e| invalid("reference", Origin::Flag("--reference"), e))?;
        let (reference, _) = r.pick("reference", "--reference", reference_flag, d.reference)?;

        let (train_fraction, origin) = r.pick(
            "train_fraction",
            "--train-fraction",
            flags.train_fraction,
            d.train_fraction,
        )?;
        if !(train_fraction > 0.0 && train_fraction < 1.0) {
            return Err(invalid(
                "train_fraction",
                origin,
                format!("{train_fraction} is not strictly between 0 and 1"),
            ));
        }

        let (population, origin) = r.pick("population", "--population", flags.population, d.population)?;
        if population == 0 {
            return Err(invalid("population", origin, "must be at least 1"));
        }

        let (max_adjust, origin) = r.pick("max_adjust", "--max-adjust", flags.max_adjust, d.max_adjust)?;
        if !(max_adjust.is_finite() && max_adjust > 0.0) {
            return Err(invalid(
                "max_adjust",
                origin,
                format!("{max_adjust} is not a positive finite number"),
            ));
        }

        let rule_flag = flags
            .rule
            .as_deref()
            .map(|s| s.parse::<RuleMode>())
            .transpose()
            .map_err(|e| invalid("rule", Origin::Flag("--rule"), e))?;
        let (rule, _) = r.pick("rule", "--rule", rule_flag, d.rule)?;

        let (lp, origin) = r.pick("lp", "--lp", flags.lp, d.lp)?;
        if !lp.is_finite() {
            return Err(invalid("lp", origin, "must be finite"));
        }

        let (k_winners, origin) = r.pick("k_winners", "--k-winners", flags.k_winners, d.k_winners)?;
        if k_winners == 0 || k_winners > population {
            return Err(invalid(
                "k_winners",
                origin,
                format!("{k_winners} is not within 1..={population}"),
            ));
        }

        Ok(Self {
            class_level,
            reference,
            train_fraction,
            population,
            max_adjust,
            rule,
            lp,
            k_winners,
            numeric: r.switch("numeric", "--numeric", flags.numeric)?,
            freeze_after_train: r.switch("freeze_after_train", "--freeze-after-train", flags.freeze_after_train)?,
        })
    }

    pub fn encoder(&self) -> EncoderConfig {
        EncoderConfig {
            class_level: self.class_level,
            reference: self.reference,
        }
    }

    pub fn run_config(&self) -> RunConfig<f64> {
        RunConfig {
            train_fraction: self.train_fraction,
            learner: LearnerConfig {
                population_size: self.population,
                max_deviant_adjust: self.max_adjust,
                rule_mode: self.rule,
                bias: self.lp,
                k_winners: self.k_winners,
                class_level: self.class_level,
            },
            encoder: self.encoder(),
            freeze_after_train: self.freeze_after_train,
        }
    }
}
