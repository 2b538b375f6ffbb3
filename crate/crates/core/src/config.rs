//! Sweep configuration: a strict JSON document, plus presets for the five
//! figure protocols.
//!
//! ```json
//! {
//!   "model": "sis",
//!   "network": { "kind": "er", "n": [100, 200, 300], "c": 0.5 },
//!   "mu_e": 100,
//!   "p": [0.25, 0.5, 0.75],
//!   "seeds": { "start": 0, "count": 50 }
//! }
//! ```
//!
//! Every other key is optional; unknown keys are rejected.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::de::{self, Deserializer};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::{EdgeTypeMode, ModelKind};
use crate::reduce::ReductionMode;
use crate::simulate::{InitRegime, IntegratorOptions};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum NetworkSpec {
    Er {
        #[serde(deserialize_with = "one_or_many")]
        n: Vec<usize>,
        c: f64,
    },
    Ba {
        #[serde(deserialize_with = "one_or_many")]
        n: Vec<usize>,
        m: usize,
    },
    Sw {
        #[serde(deserialize_with = "one_or_many")]
        n: Vec<usize>,
        k: usize,
        beta: f64,
        /// Lower `k` to the largest even value below `n` for small sizes.
        #[serde(default)]
        clamp_k: bool,
    },
    File {
        path: PathBuf,
        #[serde(default = "yes")]
        undirected: bool,
        #[serde(default)]
        binarize: bool,
    },
}

fn yes() -> bool {
    true
}

impl NetworkSpec {
    /// Sizes to sweep; `None` for file networks, whose size is fixed.
    pub fn sizes(&self) -> Option<&[usize]> {
        match self {
            NetworkSpec::Er { n, .. } | NetworkSpec::Ba { n, .. } | NetworkSpec::Sw { n, .. } => {
                Some(n)
            }
            NetworkSpec::File { .. } => None,
        }
    }

    fn sizes_mut(&mut self) -> Option<&mut Vec<usize>> {
        match self {
            NetworkSpec::Er { n, .. } | NetworkSpec::Ba { n, .. } | NetworkSpec::Sw { n, .. } => {
                Some(n)
            }
            NetworkSpec::File { .. } => None,
        }
    }

    /// SW degree actually used at size `n`.
    pub fn sw_degree(k: usize, n: usize, clamp_k: bool) -> usize {
        if clamp_k && k + 1 >= n {
            let below = n.saturating_sub(1);
            below - below % 2
        } else {
            k
        }
    }
}

impl fmt::Display for NetworkSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NetworkSpec::Er { c, .. } => write!(f, "er(c={c})"),
            NetworkSpec::Ba { m, .. } => write!(f, "ba(m={m})"),
            NetworkSpec::Sw { k, beta, .. } => write!(f, "sw(k={k},beta={beta})"),
            NetworkSpec::File { path, .. } => write!(
                f,
                "file({})",
                path.file_name()
                    .map(|s| s.to_string_lossy().into_owned())
                    .unwrap_or_default()
            ),
        }
    }
}

/// How edge weights are scaled per cell.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum WeightGrid {
    /// Fixed global multipliers.
    Multipliers(Vec<f64>),
    /// Log-spaced targets for `A_eff / e_eff`; the multiplier is solved per cell.
    Ratio { lo: f64, hi: f64, points: usize },
}

impl Default for WeightGrid {
    fn default() -> Self {
        WeightGrid::Ratio {
            lo: 0.2,
            hi: 5.0,
            points: 24,
        }
    }
}

/// One grid entry before it is resolved against a network.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GridValue {
    Multiplier(f64),
    Ratio(f64),
}

impl WeightGrid {
    pub fn values(&self) -> Vec<GridValue> {
        match self {
            WeightGrid::Multipliers(ws) => ws.iter().map(|&w| GridValue::Multiplier(w)).collect(),
            WeightGrid::Ratio { lo, hi, points } => {
                if *points == 1 {
                    return vec![GridValue::Ratio(*lo)];
                }
                (0..*points)
                    .map(|k| {
                        let t = k as f64 / (*points - 1) as f64;
                        GridValue::Ratio(lo * (hi / lo).powf(t))
                    })
                    .collect()
            }
        }
    }

    pub fn len(&self) -> usize {
        match self {
            WeightGrid::Multipliers(ws) => ws.len(),
            WeightGrid::Ratio { points, .. } => *points,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub model: ModelKind,
    pub network: NetworkSpec,
    pub mu_e: f64,
    /// Recorded for provenance only; rates are uniform on `[0, 2 mu_e]`.
    #[serde(default)]
    pub sigma_e: Option<f64>,
    #[serde(deserialize_with = "one_or_many")]
    pub p: Vec<f64>,
    #[serde(default)]
    pub weight_grid: WeightGrid,
    /// Network seeds.
    #[serde(deserialize_with = "seed_list")]
    pub seeds: Vec<u64>,
    /// Dynamics seeds, combined with each network seed.
    #[serde(default = "default_dyn_seeds", deserialize_with = "seed_list")]
    pub dyn_seeds: Vec<u64>,
    #[serde(default = "default_init")]
    pub init: Vec<InitRegime>,
    #[serde(default)]
    pub mode: ReductionMode,
    #[serde(default)]
    pub edge_types: EdgeTypeMode,
    /// Number of Chebyshev terms in polynomial mode.
    #[serde(default = "default_poly_terms")]
    pub poly_terms: usize,
    /// Intervals of the fixed-point scan.
    #[serde(default = "default_root_grid")]
    pub root_grid: usize,
    #[serde(default)]
    pub integrator: IntegratorOptions,
    #[serde(default)]
    pub output: Option<PathBuf>,
}

fn default_dyn_seeds() -> Vec<u64> {
    vec![0]
}

fn default_init() -> Vec<InitRegime> {
    InitRegime::BOTH.to_vec()
}

fn default_poly_terms() -> usize {
    6
}

fn default_root_grid() -> usize {
    1024
}

fn one_or_many<'de, D, T>(d: D) -> std::result::Result<Vec<T>, D::Error>
where
    D: Deserializer<'de>,
    T: Deserialize<'de>,
{
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum OneOrMany<T> {
        One(T),
        Many(Vec<T>),
    }
    match OneOrMany::deserialize(d) {
        Ok(OneOrMany::One(v)) => Ok(vec![v]),
        Ok(OneOrMany::Many(v)) => Ok(v),
        Err(_) => Err(de::Error::custom("expected a value or a list of values")),
    }
}

fn seed_list<'de, D>(d: D) -> std::result::Result<Vec<u64>, D::Error>
where
    D: Deserializer<'de>,
{
    #[derive(Deserialize)]
    #[serde(deny_unknown_fields)]
    struct Range {
        start: u64,
        count: u64,
    }
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Seeds {
        One(u64),
        Many(Vec<u64>),
        Range(Range),
    }
    match Seeds::deserialize(d) {
        Ok(Seeds::One(s)) => Ok(vec![s]),
        Ok(Seeds::Many(v)) => Ok(v),
        Ok(Seeds::Range(r)) => Ok((r.start..r.start + r.count).collect()),
        Err(_) => Err(de::Error::custom(
            "expected a seed, a list of seeds, or {\"start\": _, \"count\": _}",
        )),
    }
}

/// Parse and validate a configuration document.
pub fn parse_config(text: &str) -> Result<SweepConfig> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let cfg: SweepConfig = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        Error::config(
            if path == "." { String::new() } else { path },
            e.inner().to_string(),
        )
    })?;
    cfg.validate()?;
    Ok(cfg)
}

pub fn load_config(path: impl AsRef<Path>) -> Result<SweepConfig> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_config(&text)
}

fn check_probability(path: &str, v: f64) -> Result<()> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(Error::config(path, format!("{v} is outside [0, 1]")))
    }
}

fn check_positive(path: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::config(path, format!("{v} must be positive")))
    }
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        check_positive("mu_e", self.mu_e)?;
        if let Some(s) = self.sigma_e {
            if !(s.is_finite() && s >= 0.0) {
                return Err(Error::config("sigma_e", format!("{s} must be nonnegative")));
            }
        }
        if self.p.is_empty() {
            return Err(Error::config("p", "at least one value is required"));
        }
        for &p in &self.p {
            check_probability("p", p)?;
        }
        if self.seeds.is_empty() {
            return Err(Error::config("seeds", "at least one seed is required"));
        }
        if self.dyn_seeds.is_empty() {
            return Err(Error::config("dyn_seeds", "at least one seed is required"));
        }
        if self.init.is_empty() {
            return Err(Error::config("init", "at least one regime is required"));
        }
        match &self.weight_grid {
            WeightGrid::Multipliers(ws) => {
                if ws.is_empty() {
                    return Err(Error::config("weight_grid.multipliers", "grid is empty"));
                }
                for &w in ws {
                    check_positive("weight_grid.multipliers", w)?;
                }
            }
            WeightGrid::Ratio { lo, hi, points } => {
                check_positive("weight_grid.ratio.lo", *lo)?;
                check_positive("weight_grid.ratio.hi", *hi)?;
                if hi < lo {
                    return Err(Error::config("weight_grid.ratio.hi", "must be >= lo"));
                }
                if *points == 0 {
                    return Err(Error::config(
                        "weight_grid.ratio.points",
                        "must be positive",
                    ));
                }
            }
        }
        match &self.network {
            NetworkSpec::Er { n, c } => {
                check_sizes(n, 2)?;
                check_probability("network.c", *c)?;
            }
            NetworkSpec::Ba { n, m } => {
                if *m < 1 {
                    return Err(Error::config("network.m", "must be >= 1"));
                }
                check_sizes(n, m + 1)?;
            }
            NetworkSpec::Sw {
                n,
                k,
                beta,
                clamp_k,
            } => {
                if *k < 2 || k % 2 != 0 {
                    return Err(Error::config(
                        "network.k",
                        format!("{k} must be even and >= 2"),
                    ));
                }
                check_probability("network.beta", *beta)?;
                check_sizes(n, if *clamp_k { 3 } else { k + 1 })?;
            }
            NetworkSpec::File { .. } => {}
        }
        if self.poly_terms == 0 {
            return Err(Error::config("poly_terms", "must be >= 1"));
        }
        if self.root_grid < 16 {
            return Err(Error::config("root_grid", "must be >= 16"));
        }
        self.integrator
            .validate()
            .map_err(|e| Error::config("integrator", e.to_string()))?;
        Ok(())
    }

    /// Number of sweep rows the configuration produces, for synthetic networks.
    pub fn expected_rows(&self) -> usize {
        let sizes = self.network.sizes().map_or(1, <[usize]>::len);
        sizes
            * self.p.len()
            * self.seeds.len()
            * self.dyn_seeds.len()
            * self.init.len()
            * self.weight_grid.len()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }
}

fn check_sizes(n: &[usize], min: usize) -> Result<()> {
    if n.is_empty() {
        return Err(Error::config("network.n", "at least one size is required"));
    }
    if let Some(bad) = n.iter().find(|&&v| v < min) {
        return Err(Error::config(
            "network.n",
            format!("size {bad} is below the minimum {min}"),
        ));
    }
    Ok(())
}

/// The five figure protocols.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Figure {
    Fig1,
    Fig2,
    Fig3,
    Fig4,
    Fig5,
}

impl Figure {
    pub const ALL: [Figure; 5] = [
        Figure::Fig1,
        Figure::Fig2,
        Figure::Fig3,
        Figure::Fig4,
        Figure::Fig5,
    ];

    pub fn id(&self) -> &'static str {
        match self {
            Figure::Fig1 => "fig1",
            Figure::Fig2 => "fig2",
            Figure::Fig3 => "fig3",
            Figure::Fig4 => "fig4",
            Figure::Fig5 => "fig5",
        }
    }

    pub fn needs_dataset(&self) -> bool {
        matches!(self, Figure::Fig4 | Figure::Fig5)
    }
}

impl std::str::FromStr for Figure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Figure::ALL
            .into_iter()
            .find(|f| f.id() == s)
            .ok_or_else(|| {
                Error::InvalidParameter(format!("unknown figure {s:?} (expected fig1..fig5)"))
            })
    }
}

/// Protocol shared by all figures: 50 network seeds, both starts, unit
/// weights, rates uniform on `[0, 2 mu_e]`.
pub fn preset(figure: Figure, dataset: Option<&Path>) -> Result<SweepConfig> {
    let sizes = vec![100, 200, 300];
    let (model, mu_e, network) = match figure {
        Figure::Fig1 => (ModelKind::Sis, 100.0, NetworkSpec::Er { n: sizes, c: 0.5 }),
        Figure::Fig2 => (ModelKind::Sis, 100.0, NetworkSpec::Ba { n: sizes, m: 25 }),
        Figure::Fig3 => (
            ModelKind::Sis,
            100.0,
            NetworkSpec::Sw {
                n: sizes,
                k: 100,
                beta: 0.1,
                clamp_k: true,
            },
        ),
        Figure::Fig4 | Figure::Fig5 => {
            let path = dataset.ok_or_else(|| Error::DatasetMissing {
                figure: figure.id().to_string(),
            })?;
            let model = if figure == Figure::Fig4 {
                ModelKind::Sis
            } else {
                ModelKind::Mm
            };
            let mu_e = if figure == Figure::Fig4 { 100.0 } else { 8.0 };
            (
                model,
                mu_e,
                NetworkSpec::File {
                    path: path.to_path_buf(),
                    undirected: true,
                    binarize: false,
                },
            )
        }
    };
    let sigma_e = if figure == Figure::Fig5 {
        (mu_e / 3.0_f64).floor()
    } else {
        mu_e / 3.0
    };
    let cfg = SweepConfig {
        model,
        network,
        mu_e,
        sigma_e: Some(sigma_e),
        p: vec![0.25, 0.5, 0.75],
        weight_grid: WeightGrid::Multipliers(vec![1.0]),
        seeds: (0..50).collect(),
        dyn_seeds: vec![0],
        init: InitRegime::BOTH.to_vec(),
        mode: ReductionMode::Paper,
        edge_types: EdgeTypeMode::Quenched,
        poly_terms: default_poly_terms(),
        root_grid: default_root_grid(),
        integrator: IntegratorOptions::default(),
        output: None,
    };
    cfg.validate()?;
    Ok(cfg)
}

/// Overrides applied on top of a preset.
#[derive(Clone, Debug, Default)]
pub struct PresetOverrides {
    pub sizes: Option<Vec<usize>>,
    pub seed_count: Option<u64>,
    pub seed_start: Option<u64>,
    pub mode: Option<ReductionMode>,
    pub binarize: bool,
    pub ratio_grid: bool,
}

impl PresetOverrides {
    pub fn apply(&self, cfg: &mut SweepConfig) -> Result<()> {
        if let Some(sizes) = &self.sizes {
            if let Some(n) = cfg.network.sizes_mut() {
                *n = sizes.clone();
            }
        }
        if self.seed_count.is_some() || self.seed_start.is_some() {
            let start = self.seed_start.unwrap_or(0);
            let count = self.seed_count.unwrap_or(cfg.seeds.len() as u64);
            cfg.seeds = (start..start + count).collect();
        }
        if let Some(mode) = self.mode {
            cfg.mode = mode;
        }
        if self.binarize {
            if let NetworkSpec::File { binarize, .. } = &mut cfg.network {
                *binarize = true;
            }
        }
        if self.ratio_grid {
            cfg.weight_grid = WeightGrid::default();
        }
        cfg.validate()
    }
}
