//! Run configuration: TOML grammar, validation and canonical rendering.

use std::fmt;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use sharplab::flat::ExponentTriple;
use sharplab::{NormConfig, QuadratureSpec};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Identities,
    FlatHpw,
    FlatHardy,
    Hyperbolic,
    KoRefute,
    ChpwBounds,
    All,
}

impl Suite {
    pub const MEMBERS: [Suite; 6] = [
        Suite::Identities,
        Suite::FlatHpw,
        Suite::FlatHardy,
        Suite::Hyperbolic,
        Suite::KoRefute,
        Suite::ChpwBounds,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Identities => "identities",
            Suite::FlatHpw => "flat-hpw",
            Suite::FlatHardy => "flat-hardy",
            Suite::Hyperbolic => "hyperbolic",
            Suite::KoRefute => "ko-refute",
            Suite::ChpwBounds => "chpw-bounds",
            Suite::All => "all",
        }
    }

    /// The suites actually executed.
    pub fn members(self) -> Vec<Suite> {
        match self {
            Suite::All => Self::MEMBERS.to_vec(),
            s => vec![s],
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Parameter grids; absent lists fall back to suite defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grids {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dimensions: Option<Vec<usize>>,
}

/// Radii of the Hardy sharpness family and of the double Hardy check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HardyConfig {
    pub inner_radius: f64,
    pub outer_radius: f64,
    pub double_radius: f64,
}

impl Default for HardyConfig {
    fn default() -> Self {
        Self {
            inner_radius: 1.0,
            outer_radius: 2.0,
            double_radius: 2.0,
        }
    }
}

/// Scan of the alpha equation over `(lower, upper]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KoConfig {
    pub dimension: usize,
    pub lower: f64,
    pub upper: f64,
    pub nodes: usize,
}

impl Default for KoConfig {
    fn default() -> Self {
        Self {
            dimension: 4,
            lower: 3.0,
            upper: 100.0,
            nodes: 4096,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub suite: Suite,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    /// Overrides the pass/fail tolerance of every equality and lower-bound check.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub norm: Option<NormConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub triple: Option<ExponentTriple>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grids: Option<Grids>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quadrature: Option<QuadratureSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hardy: Option<HardyConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ko: Option<KoConfig>,
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{message}")]
    Malformed { message: String },
    #[error("invalid configuration:\n  {}", .0.join("\n  "))]
    Invalid(Vec<String>),
    #[error("cannot render configuration: {0}")]
    Render(String),
}

fn line_column(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.len() - before.rfind('\n').map_or(0, |i| i + 1) + 1;
    (line, column)
}

/// Parses and validates a run configuration.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let config: RunConfig = toml::from_str(text).map_err(|e| {
        let message = e.message().trim().to_string();
        match e.span() {
            Some(span) => {
                let (line, column) = line_column(text, span.start);
                ConfigError::Syntax {
                    line,
                    column,
                    message,
                }
            }
            None => ConfigError::Malformed { message },
        }
    })?;
    config.validate()?;
    Ok(config)
}

/// Canonical TOML form; `parse_config(render_config(c)) == c`.
pub fn render_config(config: &RunConfig) -> Result<String, ConfigError> {
    toml::to_string(config).map_err(|e| ConfigError::Render(e.to_string()))
}

fn check_grid(problems: &mut Vec<String>, name: &str, grid: &Option<Vec<f64>>, allow_zero: bool) {
    let Some(values) = grid else { return };
    if values.is_empty() {
        problems.push(format!("grids.{name} is empty"));
    }
    for v in values {
        let ok = v.is_finite() && (*v > 0.0 || (allow_zero && *v == 0.0));
        if !ok {
            problems.push(format!(
                "grids.{name} contains {v}; values must be finite and {}",
                if allow_zero { ">= 0" } else { "> 0" }
            ));
        }
    }
}

impl RunConfig {
    /// Minimal configuration for `suite`; the `identities` and `all` suites get the triple (3, 3, 1).
    pub fn new(suite: Suite) -> Self {
        let triple = matches!(suite, Suite::Identities | Suite::All)
            .then(|| ExponentTriple::new(3, 3.0, 1.0).expect("admissible"));
        let grids = (suite == Suite::All).then(Grids::default);
        Self {
            suite,
            output_dir: None,
            tolerance: None,
            norm: None,
            triple,
            grids,
            quadrature: None,
            hardy: None,
            ko: None,
        }
    }

    /// Every problem found, or `Ok`.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let mut problems = Vec::new();
        let needs_triple = matches!(self.suite, Suite::Identities | Suite::All);
        if needs_triple && self.triple.is_none() {
            problems.push(format!("suite {} requires a [triple] table", self.suite));
        }
        if self.suite == Suite::All && self.grids.is_none() {
            problems.push(
                "suite all requires a [grids] table (it may be empty to use defaults)".into(),
            );
        }
        if let Some(t) = self.tolerance {
            if !(t >= 0.0 && t.is_finite()) {
                problems.push(format!("tolerance must be finite and >= 0, got {t}"));
            }
        }
        if let Some(q) = &self.quadrature {
            if let Err(e) = q.validate() {
                problems.push(format!("quadrature: {e}"));
            }
        }
        if let Some(n) = &self.norm {
            match n.clone().build() {
                Err(e) => problems.push(format!("norm: {e}")),
                Ok(norm) => {
                    let flat = matches!(self.suite, Suite::FlatHardy | Suite::All);
                    if flat && norm.dimension() < 3 {
                        problems.push(format!(
                            "norm: the Hardy suite needs dimension >= 3, got {}",
                            norm.dimension()
                        ));
                    }
                }
            }
        }
        if let Some(g) = &self.grids {
            check_grid(&mut problems, "lambda", &g.lambda, false);
            check_grid(&mut problems, "epsilon", &g.epsilon, false);
            check_grid(&mut problems, "rho", &g.rho, false);
            check_grid(&mut problems, "alpha", &g.alpha, false);
            check_grid(&mut problems, "beta", &g.beta, true);
            if let Some(rho) = &g.rho {
                if rho.windows(2).any(|w| w[1] <= w[0]) {
                    problems.push("grids.rho must be strictly increasing".into());
                }
            }
            if let Some(eps) = &g.epsilon {
                let r = self.hardy().inner_radius;
                if eps.iter().any(|&e| e >= r) {
                    problems.push(format!(
                        "grids.epsilon values must lie below hardy.inner_radius = {r}"
                    ));
                }
            }
            if let Some(dims) = &g.dimensions {
                if dims.is_empty() {
                    problems.push("grids.dimensions is empty".into());
                }
                if dims.iter().any(|&n| n < 3) {
                    problems.push("grids.dimensions values must be >= 3".into());
                }
            }
        }
        if let Some(h) = &self.hardy {
            if !(h.inner_radius > 0.0
                && h.inner_radius < h.outer_radius
                && h.outer_radius.is_finite())
            {
                problems.push(format!(
                    "hardy: need 0 < inner_radius < outer_radius, got {} and {}",
                    h.inner_radius, h.outer_radius
                ));
            }
            if !(h.double_radius > 1.0 && h.double_radius.is_finite()) {
                problems.push(format!(
                    "hardy: double_radius must exceed the unit support radius, got {}",
                    h.double_radius
                ));
            }
        }
        if let Some(k) = &self.ko {
            if k.dimension < 3 {
                problems.push(format!("ko: dimension must be >= 3, got {}", k.dimension));
            }
            if !(k.lower >= 0.0 && k.lower < k.upper && k.upper.is_finite()) {
                problems.push(format!(
                    "ko: need 0 <= lower < upper, got ({}, {}]",
                    k.lower, k.upper
                ));
            }
            if k.nodes < 2 {
                problems.push(format!("ko: nodes must be >= 2, got {}", k.nodes));
            }
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(ConfigError::Invalid(problems))
        }
    }

    pub fn quadrature(&self) -> QuadratureSpec {
        self.quadrature.unwrap_or_default()
    }

    pub fn hardy(&self) -> HardyConfig {
        self.hardy.unwrap_or_default()
    }

    pub fn ko(&self) -> KoConfig {
        self.ko.unwrap_or_default()
    }

    pub fn triple(&self) -> ExponentTriple {
        self.triple
            .unwrap_or_else(|| ExponentTriple::new(3, 3.0, 1.0).expect("admissible"))
    }

    pub fn norm_config(&self) -> NormConfig {
        self.norm
            .clone()
            .unwrap_or_else(|| NormConfig::euclidean(3))
    }

    fn grid(&self, pick: impl Fn(&Grids) -> &Option<Vec<f64>>, default: &[f64]) -> Vec<f64> {
        self.grids
            .as_ref()
            .and_then(|g| pick(g).clone())
            .unwrap_or_else(|| default.to_vec())
    }

    pub fn lambda_grid(&self, default: &[f64]) -> Vec<f64> {
        self.grid(|g| &g.lambda, default)
    }

    pub fn epsilon_grid(&self) -> Vec<f64> {
        self.grid(|g| &g.epsilon, &[1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8])
    }

    pub fn rho_grid(&self) -> Vec<f64> {
        let default: Vec<f64> = (1..=100).map(|k| 0.05 * k as f64).collect();
        self.grid(|g| &g.rho, &default)
    }

    pub fn alpha_grid(&self, default: &[f64]) -> Vec<f64> {
        self.grid(|g| &g.alpha, default)
    }

    pub fn beta_grid(&self) -> Vec<f64> {
        self.grid(|g| &g.beta, &[0.0, 0.5, 1.0, 2.0])
    }

    pub fn dimensions(&self, default: &[usize]) -> Vec<usize> {
        self.grids
            .as_ref()
            .and_then(|g| g.dimensions.clone())
            .unwrap_or_else(|| default.to_vec())
    }

    /// SHA-256 of the canonical rendering, hex encoded.
    pub fn hash(&self) -> Result<String, ConfigError> {
        let digest = Sha256::digest(render_config(self)?.as_bytes());
        Ok(digest.iter().map(|b| format!("{b:02x}")).collect())
    }
}
