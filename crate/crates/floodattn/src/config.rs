//! Run configuration: built-in defaults, overridden by a flat `key=value`
//! config file, overridden by the output-dir environment variable,
//! overridden by command-line flags.

use std::path::PathBuf;

use crate::error::{Error, Result};
use crate::model::ModelConfig;
use crate::pattern::PatternConfig;
use crate::trainer::TrainerConfig;

/// Environment variable that overrides the output directory (flags still
/// win over it).
pub const OUT_DIR_ENV: &str = "FLOODATTN_OUT_DIR";

/// Everything a training or pattern run needs, as flat scalar knobs.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    /// "synthetic-majority", "synthetic-listops", or "csv".
    pub task: String,
    /// Sample file for the csv task.
    pub data: Option<PathBuf>,
    /// Sequence length.
    pub l: usize,
    /// Embedding width (split across heads).
    pub d: usize,
    /// Attention heads.
    pub h: usize,
    /// Encoder layers.
    pub n: usize,
    /// Pattern block size.
    pub b: usize,
    /// Diagonal filter size before truncation against L.
    pub f: usize,
    pub quantile_alpha: f64,
    pub transition_tolerance: f64,
    pub epochs: usize,
    pub lr: f32,
    pub seed: u64,
    pub batch_size: usize,
    /// Synthetic dataset size.
    pub samples: usize,
    /// Label count for synthetic-majority; csv label bound when nonzero.
    pub classes: usize,
    /// Token id bound for the csv task; 0 derives it from the task.
    pub vocab: usize,
    pub dropout: f32,
    pub ffn_dim: usize,
    pub min_dense_epochs: usize,
    pub out_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> RunConfig {
        RunConfig {
            task: "synthetic-majority".into(),
            data: None,
            l: 128,
            d: 64,
            h: 4,
            n: 4,
            b: 32,
            f: 31,
            quantile_alpha: 96.0,
            transition_tolerance: 0.05,
            epochs: 20,
            lr: 1e-3,
            seed: 42,
            batch_size: 8,
            samples: 256,
            classes: 4,
            vocab: 0,
            dropout: 0.1,
            ffn_dim: 128,
            min_dense_epochs: 3,
            out_dir: PathBuf::from("out"),
        }
    }
}

/// Split flat `key=value` text into pairs. `#` starts a comment; blank
/// lines are skipped; errors carry 1-based line numbers.
pub fn parse_config_text(text: &str) -> Result<Vec<(String, String)>> {
    let mut pairs = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = match raw.find('#') {
            Some(p) => &raw[..p],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::Parse(format!("line {}: expected key=value, got {raw:?}", i + 1))
        })?;
        pairs.push((key.trim().to_string(), value.trim().to_string()));
    }
    Ok(pairs)
}

fn parse_as<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Parse(format!("key {key}: invalid value {value:?}")))
}

impl RunConfig {
    /// Apply one key. Unknown keys are errors so typos surface instead of
    /// silently keeping a default.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "task" => self.task = value.to_string(),
            "data" => self.data = Some(PathBuf::from(value)),
            "l" => self.l = parse_as(key, value)?,
            "d" => self.d = parse_as(key, value)?,
            "h" => self.h = parse_as(key, value)?,
            "n" => self.n = parse_as(key, value)?,
            "b" => self.b = parse_as(key, value)?,
            "f" => self.f = parse_as(key, value)?,
            "quantile_alpha" => self.quantile_alpha = parse_as(key, value)?,
            "transition_tolerance" => {
                self.transition_tolerance = if value == "inf" {
                    f64::INFINITY
                } else {
                    parse_as(key, value)?
                }
            }
            "epochs" => self.epochs = parse_as(key, value)?,
            "lr" => self.lr = parse_as(key, value)?,
            "seed" => self.seed = parse_as(key, value)?,
            "batch_size" => self.batch_size = parse_as(key, value)?,
            "samples" => self.samples = parse_as(key, value)?,
            "classes" => self.classes = parse_as(key, value)?,
            "vocab" => self.vocab = parse_as(key, value)?,
            "dropout" => self.dropout = parse_as(key, value)?,
            "ffn_dim" => self.ffn_dim = parse_as(key, value)?,
            "min_dense_epochs" => self.min_dense_epochs = parse_as(key, value)?,
            "out_dir" => self.out_dir = PathBuf::from(value),
            _ => return Err(Error::Parameter(format!("unknown config key {key:?}"))),
        }
        Ok(())
    }

    /// Merge the precedence chain: defaults, then the config file, then
    /// the output-dir environment override, then flags.
    pub fn load(
        file_text: Option<&str>,
        env_out_dir: Option<&str>,
        flags: &[(String, String)],
    ) -> Result<RunConfig> {
        let mut cfg = RunConfig::default();
        if let Some(text) = file_text {
            for (k, v) in parse_config_text(text)? {
                cfg.set(&k, &v)?;
            }
        }
        if let Some(dir) = env_out_dir {
            cfg.out_dir = PathBuf::from(dir);
        }
        for (k, v) in flags {
            cfg.set(k, v)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Filter size actually used: `f` capped at the largest odd value
    /// below the sequence length.
    pub fn effective_filter(&self) -> usize {
        effective_filter(self.f, self.l)
    }

    pub fn validate(&self) -> Result<()> {
        match self.task.as_str() {
            "synthetic-majority" | "synthetic-listops" => {}
            "csv" => {
                if self.data.is_none() {
                    return Err(Error::Parameter(
                        "task csv needs a data=<path> key".into(),
                    ));
                }
                if self.vocab == 0 || self.classes == 0 {
                    return Err(Error::Parameter(
                        "task csv needs explicit vocab and classes".into(),
                    ));
                }
            }
            other => {
                return Err(Error::Parameter(format!(
                    "unknown task {other:?}; expected synthetic-majority, synthetic-listops, or csv"
                )))
            }
        }
        if self.samples == 0 {
            return Err(Error::Parameter("samples must be positive".into()));
        }
        // Everything below revalidates the derived module configs so bad
        // values fail at load, not mid-run.
        self.model_config(3, 2)?.validate()?;
        self.pattern_config().validate(self.l)?;
        self.trainer_config().validate()?;
        Ok(())
    }

    /// Model dimensions for a resolved dataset shape.
    pub fn model_config(&self, vocab: usize, classes: usize) -> Result<ModelConfig> {
        let cfg = ModelConfig {
            seq_len: self.l,
            embed_dim: self.d,
            heads: self.h,
            layers: self.n,
            ffn_dim: self.ffn_dim,
            vocab,
            classes,
            dropout: self.dropout,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn pattern_config(&self) -> PatternConfig {
        PatternConfig {
            filter_size: self.effective_filter(),
            block_size: self.b,
            quantile_alpha: self.quantile_alpha,
        }
    }

    pub fn trainer_config(&self) -> TrainerConfig {
        TrainerConfig {
            epochs: self.epochs,
            learning_rate: self.lr,
            batch_size: self.batch_size,
            transition_tolerance: self.transition_tolerance,
            min_dense_epochs: self.min_dense_epochs,
            pattern: self.pattern_config(),
            seed: self.seed,
        }
    }
}

/// Cap a filter size at the largest odd value strictly below `l`.
pub fn effective_filter(f: usize, l: usize) -> usize {
    let mut t = f.min(l.saturating_sub(1));
    if t.is_multiple_of(2) {
        t = t.saturating_sub(1);
    }
    t
}
