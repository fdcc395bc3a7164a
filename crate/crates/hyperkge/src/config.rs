//! Flat `key = value` configuration files and the shipped presets.

use std::fmt::Write;
use std::str::FromStr;

use hyperkge_core::train::{Initializer, Sampler};
use hyperkge_core::{ModelVariant, TieBreak, TrainConfig};

use crate::error::{Error, Result};

/// Everything a training run is configured by.
#[derive(Debug, Clone, PartialEq)]
pub struct Settings {
    pub train: TrainConfig,
    /// Swap the quaternion default for its octonion counterpart.
    pub octonion: bool,
    /// Keep relation normalisation even when N3 is on.
    pub keep_normalization: bool,
    pub workers: usize,
}

impl Default for Settings {
    fn default() -> Self {
        Self {
            train: TrainConfig::default(),
            octonion: false,
            keep_normalization: false,
            workers: 1,
        }
    }
}

pub const KEYS: &[&str] = &[
    "variant",
    "octonion",
    "dim",
    "lambda1",
    "lambda2",
    "n3",
    "neg",
    "lr",
    "epochs",
    "batches",
    "sampler",
    "reciprocal",
    "type_constrained_sampling",
    "strict_negatives",
    "seed",
    "eval_every",
    "patience",
    "initializer",
    "ties",
    "type_constraints",
    "keep_normalization",
    "workers",
];

fn parse<T: FromStr>(key: &str, value: &str) -> std::result::Result<T, String> {
    value.parse().map_err(|_| format!("invalid value {value:?} for {key}"))
}

fn parse_with<T, E: std::fmt::Display>(value: &str, f: impl FnOnce(&str) -> std::result::Result<T, E>) -> std::result::Result<T, String> {
    f(value).map_err(|e| e.to_string())
}

impl Settings {
    /// Sets one key. Errors carry a plain message; callers add the location.
    pub fn set(&mut self, key: &str, value: &str) -> std::result::Result<(), String> {
        let t = &mut self.train;
        match key {
            "variant" => t.variant = parse_with(value, ModelVariant::from_str)?,
            "octonion" => self.octonion = parse(key, value)?,
            "dim" => t.dim = parse(key, value)?,
            "lambda1" => t.lambda_entity = parse(key, value)?,
            "lambda2" => t.lambda_relation = parse(key, value)?,
            "n3" => t.n3_weight = parse(key, value)?,
            "neg" => t.neg_per_pos = parse(key, value)?,
            "lr" => t.lr = parse(key, value)?,
            "epochs" => t.epochs = parse(key, value)?,
            "batches" => t.batch_count = parse(key, value)?,
            "sampler" => t.sampler = parse_with(value, Sampler::from_str)?,
            "reciprocal" => t.reciprocal = parse(key, value)?,
            "type_constrained_sampling" => t.type_constrained_sampling = parse(key, value)?,
            "strict_negatives" => t.strict_negatives = parse(key, value)?,
            "seed" => t.seed = parse(key, value)?,
            "eval_every" => t.eval_every = parse(key, value)?,
            "patience" => t.patience = parse(key, value)?,
            "initializer" => {
                t.initializer = match value {
                    "default" => None,
                    v => Some(parse_with(v, Initializer::from_str)?),
                }
            }
            "ties" => t.eval.ties = parse_with(value, TieBreak::from_str)?,
            "type_constraints" => t.eval.type_constraints = parse(key, value)?,
            "keep_normalization" => self.keep_normalization = parse(key, value)?,
            "workers" => self.workers = parse(key, value)?,
            _ => return Err(format!("unknown key {key:?}")),
        }
        Ok(())
    }

    /// Applies every `key = value` line of `text`. Blank lines and `#`
    /// comments are skipped.
    pub fn apply_text(&mut self, text: &str, source_name: &str) -> Result<()> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split_once('#').map_or(raw, |(before, _)| before).trim();
            if line.is_empty() {
                continue;
            }
            let bad = |message: String| Error::Parse {
                source_name: source_name.to_string(),
                line: i + 1,
                message,
            };
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| bad("expected key = value".to_string()))?;
            self.set(key.trim(), value.trim()).map_err(bad)?;
        }
        Ok(())
    }

    /// Resolves flag interactions and validates. Returns warnings.
    pub fn finalize(&mut self) -> Result<Vec<String>> {
        let mut warnings = Vec::new();
        if self.octonion {
            match self.train.variant {
                ModelVariant::QuatE | ModelVariant::OctonionE => self.train.variant = ModelVariant::OctonionE,
                v => {
                    return Err(Error::Usage(format!(
                        "variant {v} has no octonion form; octonion only combines with quate"
                    )))
                }
            }
        }
        if self.train.n3_weight > 0.0 && self.train.variant.normalizes_relations() && !self.keep_normalization {
            if self.train.variant == ModelVariant::QuatE {
                warnings.push(
                    "n3 is on: relation normalisation disabled, training quate-raw (use --keep-normalization to override)"
                        .to_string(),
                );
                self.train.variant = ModelVariant::QuatERaw;
            } else {
                warnings.push(format!(
                    "n3 is on but {} has no unnormalised form; relations stay normalised",
                    self.train.variant
                ));
            }
        }
        if self.workers == 0 {
            return Err(Error::Usage("workers must be at least 1".to_string()));
        }
        self.train.validate().map_err(|e| Error::Usage(e.to_string()))?;
        Ok(warnings)
    }

    /// The settings as a config file that reproduces them.
    pub fn render(&self) -> String {
        let t = &self.train;
        let init = t.initializer.map_or("default", |i| match i {
            Initializer::Polar => "polar",
            Initializer::Uniform => "uniform",
        });
        let sampler = match t.sampler {
            Sampler::Uniform => "uniform",
            Sampler::Bernoulli => "bernoulli",
        };
        let ties = match t.eval.ties {
            TieBreak::Optimistic => "optimistic",
            TieBreak::Pessimistic => "pessimistic",
            TieBreak::Average => "average",
        };
        let mut out = String::new();
        let mut kv = |k: &str, v: &dyn std::fmt::Display| {
            let _ = writeln!(out, "{k} = {v}");
        };
        kv("variant", &t.variant);
        kv("octonion", &self.octonion);
        kv("dim", &t.dim);
        kv("lambda1", &t.lambda_entity);
        kv("lambda2", &t.lambda_relation);
        kv("n3", &t.n3_weight);
        kv("neg", &t.neg_per_pos);
        kv("lr", &t.lr);
        kv("epochs", &t.epochs);
        kv("batches", &t.batch_count);
        kv("sampler", &sampler);
        kv("reciprocal", &t.reciprocal);
        kv("type_constrained_sampling", &t.type_constrained_sampling);
        kv("strict_negatives", &t.strict_negatives);
        kv("seed", &t.seed);
        kv("eval_every", &t.eval_every);
        kv("patience", &t.patience);
        kv("initializer", &init);
        kv("ties", &ties);
        kv("type_constraints", &t.eval.type_constraints);
        kv("keep_normalization", &self.keep_normalization);
        kv("workers", &self.workers);
        out
    }
}

macro_rules! presets {
    ($($name:literal),* $(,)?) => {
        &[$(($name, include_str!(concat!("../presets/", $name, ".conf")))),*]
    };
}

/// Shipped presets, by name.
pub const PRESETS: &[(&str, &str)] = presets![
    "quate1-wn18",
    "quate1-fb15k",
    "quate1-wn18rr",
    "quate1-fb15k237",
    "quate2-wn18",
    "quate2-fb15k",
    "quate2-wn18rr",
    "quate2-fb15k237",
    "quate3-wn18",
    "quate3-fb15k",
    "quate3-wn18rr",
    "quate3-fb15k237",
];

pub fn preset(name: &str) -> Option<&'static str> {
    PRESETS.iter().find(|(n, _)| *n == name).map(|(_, text)| *text)
}
