use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Subcommand};
use serde::{Deserialize, Serialize};

pub const DEFAULT_DEPTH: usize = 8;
pub const DEFAULT_PREFIX_CAP: usize = 4;
pub const DEFAULT_PERIOD_CAP: usize = 4;

/// One unit of work. The same type backs the command line and job files.
#[derive(Subcommand, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "snake_case")]
pub enum Task {
    /// Translation length, displacement and conjugacy decomposition of a word.
    Length { model: String, word: String },
    /// Cyclic words shorter than `--eps`, up to `--cap` letters.
    Omega { model: String },
    /// Language of short elements: one `--eps` value gives a single level,
    /// several give the intersection over the schedule.
    Lang { model: String },
    /// Recurrent language of the L¹ rays of a model, enumerated at
    /// `--prefix-cap`/`--period-cap` or read from `--rays`.
    Recurrent {
        model: String,
        #[arg(long)]
        #[serde(default, skip_serializing_if = "Option::is_none")]
        rays: Option<PathBuf>,
    },
    /// Compares two language files.
    Compare { left: PathBuf, right: PathBuf },
    /// L¹ verdicts with certificates for rays given as `PREFIX|PERIOD`, a
    /// `--rays` file, or all rays at the caps.
    L1 {
        model: String,
        #[arg(long)]
        #[serde(default, skip_serializing_if = "Option::is_none")]
        rays: Option<PathBuf>,
        #[arg(long = "ray")]
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        ray: Vec<String>,
    },
    /// Leaves with a common limit point. Without `--leaves`, groups all rays
    /// at the caps by limit point and reports the generated language.
    Qpair {
        model: String,
        #[arg(long)]
        #[serde(default, skip_serializing_if = "Option::is_none")]
        leaves: Option<PathBuf>,
        /// Language used for the test on approximate models.
        #[arg(long)]
        #[serde(default, skip_serializing_if = "Option::is_none")]
        language: Option<PathBuf>,
    },
    /// Cancellation bound of an automorphism, checked exhaustively at `--depth`.
    Bcc { automorphism: String },
}

impl Task {
    pub fn name(&self) -> &'static str {
        match self {
            Task::Length { .. } => "length",
            Task::Omega { .. } => "omega",
            Task::Lang { .. } => "lang",
            Task::Recurrent { .. } => "recurrent",
            Task::Compare { .. } => "compare",
            Task::L1 { .. } => "l1",
            Task::Qpair { .. } => "qpair",
            Task::Bcc { .. } => "bcc",
        }
    }
}

/// Numeric parameters; unset values fall back to per-command defaults.
#[derive(Args, Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    /// Language depth.
    #[arg(long, global = true)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depth: Option<usize>,
    /// Comma separated, strictly decreasing ε values.
    #[arg(long, global = true, value_delimiter = ',')]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps: Option<Vec<f64>>,
    /// Longest cyclic word enumerated.
    #[arg(long, global = true)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cap: Option<usize>,
    /// Longest ray prefix enumerated.
    #[arg(long, global = true)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prefix_cap: Option<usize>,
    /// Longest ray period enumerated.
    #[arg(long, global = true)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub period_cap: Option<usize>,
    /// Iteration cap for limit trees.
    #[arg(long, global = true)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kmax: Option<usize>,
    /// Relative tolerance for limit trees.
    #[arg(long, global = true)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    /// Node budget for searches on limit trees.
    #[arg(long, global = true)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget: Option<u64>,
}

impl Params {
    /// `self` with every field set in `over` replaced.
    pub fn overlay(&self, over: &Params) -> Params {
        Params {
            depth: over.depth.or(self.depth),
            eps: over.eps.clone().or_else(|| self.eps.clone()),
            cap: over.cap.or(self.cap),
            prefix_cap: over.prefix_cap.or(self.prefix_cap),
            period_cap: over.period_cap.or(self.period_cap),
            kmax: over.kmax.or(self.kmax),
            tol: over.tol.or(self.tol),
            budget: over.budget.or(self.budget),
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("depth", self.depth),
            ("cap", self.cap),
            ("prefix-cap", self.prefix_cap.map(|c| c + 1)),
            ("period-cap", self.period_cap),
            ("kmax", self.kmax),
        ] {
            if v == Some(0) {
                bail!("--{name} must be positive");
            }
        }
        if let Some(eps) = &self.eps {
            if eps.is_empty() || eps.iter().any(|e| !(*e > 0.0 && e.is_finite())) {
                bail!("--eps values must be positive");
            }
            if eps.windows(2).any(|p| p[1] >= p[0]) {
                bail!("--eps schedule must be strictly decreasing");
            }
        }
        if self.tol.is_some_and(|t| t.is_nan() || t <= 0.0) {
            bail!("--tol must be positive");
        }
        Ok(())
    }

    pub fn depth(&self) -> usize {
        self.depth.unwrap_or(DEFAULT_DEPTH)
    }

    pub fn cap(&self) -> usize {
        self.cap.unwrap_or(2 * self.depth())
    }

    pub fn prefix_cap(&self) -> usize {
        self.prefix_cap.unwrap_or(DEFAULT_PREFIX_CAP)
    }

    pub fn period_cap(&self) -> usize {
        self.period_cap.unwrap_or(DEFAULT_PERIOD_CAP)
    }
}

/// A job: a task, its parameters and an optional label.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JobConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(flatten)]
    pub task: Task,
    #[serde(default)]
    pub params: Params,
}

/// A job file for `report`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobFile {
    #[serde(default)]
    pub params: Params,
    pub jobs: Vec<JobConfig>,
}

impl JobFile {
    pub fn load(path: &std::path::Path) -> Result<JobFile> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let f: JobFile = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
        if f.jobs.is_empty() {
            bail!("{} lists no jobs", path.display());
        }
        Ok(f)
    }
}
