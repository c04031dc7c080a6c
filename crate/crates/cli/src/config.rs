//! Run configuration with layered precedence: command-line flags override the
//! `DOCRANK_CONFIG` key=value file, which overrides built-in defaults. The
//! effective configuration is embedded in every output file for provenance,
//! together with a short content hash.

use anyhow::{bail, Context, Result};
use docrank_core::solver::{DEFAULT_DAMPING, DEFAULT_MAX_ITERATIONS, DEFAULT_TOLERANCE};
use docrank_core::{SolverConfig, SubsetMode, WeightMode};

/// Weighting variant of the scoring pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Variant {
    /// Uniform edge weights.
    Base,
    /// Empirical per-kind coefficients (3, 3, 2, 4).
    W,
    /// Back recommendation: weights mirrored at `back_fraction`.
    R,
    /// Empirical coefficients combined with back recommendation.
    Wr,
}

impl Variant {
    pub fn as_str(&self) -> &'static str {
        match self {
            Variant::Base => "base",
            Variant::W => "w",
            Variant::R => "r",
            Variant::Wr => "wr",
        }
    }

    fn parse(text: &str) -> Result<Self> {
        Ok(match text {
            "base" => Variant::Base,
            "w" => Variant::W,
            "r" => Variant::R,
            "wr" => Variant::Wr,
            other => bail!("unknown variant `{other}` (expected base, w, r or wr)"),
        })
    }
}

/// Optional overrides taken on the command line; `None` defers to the config
/// file and defaults.
#[derive(Debug, Clone, Default, clap::Args)]
pub struct ConfigFlags {
    /// Weighting variant: base, w, r, or wr.
    #[arg(long, value_enum)]
    pub variant: Option<Variant>,
    /// Damping factor in (0, 1).
    #[arg(long)]
    pub damping: Option<f64>,
    /// L1 convergence tolerance.
    #[arg(long)]
    pub tolerance: Option<f64>,
    /// Iteration cap for the solver.
    #[arg(long = "max-iters")]
    pub max_iters: Option<u32>,
    /// Fraction of each edge mirrored by the back-recommendation variants.
    #[arg(long = "back-fraction")]
    pub back_fraction: Option<f64>,
    /// Comma-separated top-k% thresholds, e.g. 5,10,15.
    #[arg(long, value_delimiter = ',')]
    pub thresholds: Option<Vec<f64>>,
    /// Bootstrap repetitions (0 disables the bootstrap section).
    #[arg(long)]
    pub runs: Option<u32>,
    /// How labeled subsets are scored: subset_graph or whole_project.
    #[arg(long = "subset-mode", value_parser = parse_subset_mode)]
    pub subset_mode: Option<SubsetMode>,
    /// Abort extraction on the first parse error instead of skipping.
    #[arg(long)]
    pub strict: bool,
    /// Re-solve each bootstrap test split on its induced subgraph instead of
    /// restricting precomputed scores (requires a graph input).
    #[arg(long = "per-run-resolve")]
    pub per_run_resolve: bool,
}

fn parse_subset_mode(text: &str) -> Result<SubsetMode, String> {
    match text {
        "subset_graph" => Ok(SubsetMode::SubsetGraph),
        "whole_project" => Ok(SubsetMode::WholeProject),
        other => Err(format!(
            "unknown subset mode `{other}` (expected subset_graph or whole_project)"
        )),
    }
}

/// Fully resolved configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub variant: Variant,
    pub damping: f64,
    pub tolerance: f64,
    pub max_iters: u32,
    pub back_fraction: f64,
    pub thresholds: Vec<f64>,
    pub runs: u32,
    pub subset_mode: SubsetMode,
    pub strict: bool,
    pub per_run_resolve: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            variant: Variant::Base,
            damping: DEFAULT_DAMPING,
            tolerance: DEFAULT_TOLERANCE,
            max_iters: DEFAULT_MAX_ITERATIONS,
            back_fraction: docrank_core::graph::DEFAULT_BACK_FRACTION,
            thresholds: (1..=10).map(|i| (i * 5) as f64).collect(),
            runs: docrank_core::eval::bootstrap::DEFAULT_RUNS,
            subset_mode: SubsetMode::SubsetGraph,
            strict: false,
            per_run_resolve: false,
        }
    }
}

impl RunConfig {
    /// Resolves flags over the `DOCRANK_CONFIG` file over defaults.
    pub fn resolve(flags: &ConfigFlags) -> Result<Self> {
        let mut config = RunConfig::default();
        if let Ok(path) = std::env::var("DOCRANK_CONFIG") {
            if !path.is_empty() {
                let text = std::fs::read_to_string(&path)
                    .with_context(|| format!("cannot read DOCRANK_CONFIG file `{path}`"))?;
                config
                    .apply_file(&text)
                    .with_context(|| format!("in DOCRANK_CONFIG file `{path}`"))?;
            }
        }
        config.apply_flags(flags);
        config.validate()?;
        Ok(config)
    }

    fn apply_file(&mut self, text: &str) -> Result<()> {
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .with_context(|| format!("line {}: expected key=value", idx + 1))?;
            let (key, value) = (key.trim(), value.trim());
            let context = || format!("line {}: invalid value for `{key}`", idx + 1);
            match key {
                "variant" => self.variant = Variant::parse(value)?,
                "damping" => self.damping = value.parse().with_context(context)?,
                "tolerance" => self.tolerance = value.parse().with_context(context)?,
                "max_iters" => self.max_iters = value.parse().with_context(context)?,
                "back_fraction" => self.back_fraction = value.parse().with_context(context)?,
                "thresholds" => {
                    self.thresholds = value
                        .split(',')
                        .map(|t| t.trim().parse::<f64>())
                        .collect::<Result<Vec<f64>, _>>()
                        .with_context(context)?;
                }
                "runs" => self.runs = value.parse().with_context(context)?,
                "subset_mode" => {
                    self.subset_mode = parse_subset_mode(value).map_err(anyhow::Error::msg)?
                }
                "strict" => self.strict = value.parse().with_context(context)?,
                "per_run_resolve" => self.per_run_resolve = value.parse().with_context(context)?,
                other => bail!("line {}: unknown config key `{other}`", idx + 1),
            }
        }
        Ok(())
    }

    fn apply_flags(&mut self, flags: &ConfigFlags) {
        if let Some(v) = flags.variant {
            self.variant = v;
        }
        if let Some(v) = flags.damping {
            self.damping = v;
        }
        if let Some(v) = flags.tolerance {
            self.tolerance = v;
        }
        if let Some(v) = flags.max_iters {
            self.max_iters = v;
        }
        if let Some(v) = flags.back_fraction {
            self.back_fraction = v;
        }
        if let Some(v) = &flags.thresholds {
            self.thresholds = v.clone();
        }
        if let Some(v) = flags.runs {
            self.runs = v;
        }
        if let Some(v) = flags.subset_mode {
            self.subset_mode = v;
        }
        if flags.strict {
            self.strict = true;
        }
        if flags.per_run_resolve {
            self.per_run_resolve = true;
        }
    }

    fn validate(&self) -> Result<()> {
        self.solver_config().validate()?;
        if !(self.back_fraction.is_finite() && self.back_fraction >= 0.0) {
            bail!("back fraction must be finite and non-negative");
        }
        for &k in &self.thresholds {
            if !(k > 0.0 && k <= 100.0) {
                bail!("threshold {k} outside (0, 100]");
            }
        }
        if self.thresholds.is_empty() {
            bail!("threshold list is empty");
        }
        Ok(())
    }

    pub fn solver_config(&self) -> SolverConfig {
        SolverConfig {
            damping: self.damping,
            max_iterations: self.max_iters,
            tolerance: self.tolerance,
        }
    }

    pub fn weight_mode(&self) -> WeightMode {
        match self.variant {
            Variant::Base => WeightMode::Uniform,
            Variant::W => WeightMode::Empirical,
            Variant::R => WeightMode::BackRecommendation {
                back_fraction: self.back_fraction,
            },
            Variant::Wr => WeightMode::EmpiricalBack {
                back_fraction: self.back_fraction,
            },
        }
    }

    pub fn subset_mode_str(&self) -> &'static str {
        match self.subset_mode {
            SubsetMode::SubsetGraph => "subset_graph",
            SubsetMode::WholeProject => "whole_project",
        }
    }

    /// Canonical key=value line for hashing and provenance comments.
    pub fn canonical_string(&self) -> String {
        let thresholds = self
            .thresholds
            .iter()
            .map(f64::to_string)
            .collect::<Vec<_>>()
            .join(",");
        format!(
            "back_fraction={};damping={};max_iters={};per_run_resolve={};runs={};strict={};subset_mode={};thresholds={};tolerance={};variant={}",
            self.back_fraction,
            self.damping,
            self.max_iters,
            self.per_run_resolve,
            self.runs,
            self.strict,
            self.subset_mode_str(),
            thresholds,
            self.tolerance,
            self.variant.as_str(),
        )
    }

    /// Short FNV-1a hash of the canonical form; a provenance marker, not a
    /// cryptographic digest.
    pub fn hash(&self) -> String {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for byte in self.canonical_string().bytes() {
            h ^= byte as u64;
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
        format!("{h:016x}")
    }

    /// JSON object embedded in report files.
    pub fn as_json(&self) -> serde_json::Value {
        serde_json::json!({
            "variant": self.variant.as_str(),
            "damping": self.damping,
            "tolerance": self.tolerance,
            "max_iters": self.max_iters,
            "back_fraction": self.back_fraction,
            "thresholds": self.thresholds,
            "runs": self.runs,
            "subset_mode": self.subset_mode_str(),
            "strict": self.strict,
            "per_run_resolve": self.per_run_resolve,
            "hash": self.hash(),
        })
    }
}
