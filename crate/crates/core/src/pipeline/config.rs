use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::dataset::RatingFormat;
use crate::error::{Error, Result};
use crate::recommend::{Algorithm, Params};

pub const OUTPUT_DIR_ENV: &str = "LONGTAIL_OUTPUT_DIR";
pub const DEFAULT_OUTPUT_DIR: &str = "longtail-out";

/// Every knob of a run. Loaded from TOML, then overridden by flags.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub input: Option<PathBuf>,
    /// Inferred from the file extension when unset.
    pub format: Option<RatingFormat>,
    pub algorithms: Vec<Algorithm>,
    /// Recommendation list length.
    pub k: usize,
    pub mu: usize,
    pub tau: usize,
    pub exact_hitting_time: bool,
    /// AC step cost from users to items; mean item-based entropy when unset.
    pub c: Option<f64>,
    pub topics: usize,
    /// Dirichlet prior on user mixtures; 50 / topics when unset.
    pub alpha: Option<f64>,
    pub beta: f64,
    pub sweeps: usize,
    pub lambda: f64,
    pub r_percent: f64,
    pub n_cases: usize,
    pub n_decoys: usize,
    /// Test users sampled for list metrics.
    pub eval_users: usize,
    /// Denominator of diversity; training item count when unset.
    pub item_universe: Option<usize>,
    pub ontology: Option<PathBuf>,
    pub recall_n: Vec<usize>,
    pub popularity_n: Vec<usize>,
    pub diversity_n: Vec<usize>,
    pub seed: u64,
    pub output_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            input: None,
            format: None,
            algorithms: Algorithm::ALL.to_vec(),
            k: 50,
            mu: 6000,
            tau: 15,
            exact_hitting_time: false,
            c: None,
            topics: 20,
            alpha: None,
            beta: 0.1,
            sweeps: 200,
            lambda: 0.5,
            r_percent: 0.2,
            n_cases: 4000,
            n_decoys: 1000,
            eval_users: 500,
            item_universe: None,
            ontology: None,
            recall_n: vec![1, 5, 10, 20, 30, 40, 50],
            popularity_n: vec![10, 20, 30, 40, 50],
            diversity_n: vec![10],
            seed: 0,
            output_dir: std::env::var_os(OUTPUT_DIR_ENV).map_or_else(|| PathBuf::from(DEFAULT_OUTPUT_DIR), PathBuf::from),
        }
    }
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Range checks, run before any stage does work.
    pub fn validate(&self) -> Result<()> {
        let bad = |name: &str, msg: &str| Err(Error::Config(format!("{name} {msg}")));
        if self.k < 1 {
            return bad("k", "must be at least 1");
        }
        if self.tau < 1 {
            return bad("tau", "must be at least 1");
        }
        if self.mu < 1 {
            return bad("mu", "must be at least 1");
        }
        if !(self.lambda > 0.0 && self.lambda < 1.0) {
            return bad("lambda", "must lie strictly between 0 and 1");
        }
        if !(self.r_percent > 0.0 && self.r_percent <= 1.0) {
            return bad("r_percent", "must be in (0, 1]");
        }
        if self.topics < 2 || self.topics > u16::MAX as usize {
            return bad("topics", "must be at least 2");
        }
        if self.sweeps < 1 {
            return bad("sweeps", "must be at least 1");
        }
        if !(self.beta > 0.0 && self.beta.is_finite()) {
            return bad("beta", "must be positive");
        }
        if self.alpha.is_some_and(|a| !(a > 0.0 && a.is_finite())) {
            return bad("alpha", "must be positive");
        }
        if self.c.is_some_and(|c| !(c > 0.0 && c.is_finite())) {
            return bad("c", "must be positive");
        }
        if self.n_cases < 1 || self.n_decoys < 1 || self.eval_users < 1 {
            return bad("n_cases, n_decoys and eval_users", "must be at least 1");
        }
        if self.item_universe == Some(0) {
            return bad("item_universe", "must be positive");
        }
        if self.algorithms.is_empty() {
            return bad("algorithms", "must name at least one algorithm");
        }
        for (name, ns) in [("recall_n", &self.recall_n), ("popularity_n", &self.popularity_n), ("diversity_n", &self.diversity_n)] {
            if ns.contains(&0) {
                return bad(name, "values must be at least 1");
            }
        }
        Ok(())
    }

    pub fn input_path(&self) -> Result<&Path> {
        self.input.as_deref().ok_or_else(|| Error::Config("no input dataset given".into()))
    }

    pub fn input_format(&self) -> Result<RatingFormat> {
        Ok(self.format.unwrap_or_else(|| RatingFormat::infer(self.input.as_deref().unwrap_or(Path::new("")))))
    }

    pub fn params(&self) -> Params {
        Params {
            mu: Some(self.mu),
            tau: self.tau,
            exact_hitting_time: self.exact_hitting_time,
            lambda: self.lambda,
            ..Params::default()
        }
    }

    pub fn max_n(&self) -> usize {
        self.recall_n.iter().chain(&self.popularity_n).chain(&self.diversity_n).copied().max().unwrap_or(self.k)
    }
}
