//! TOML run configuration. Every section is optional; see
//! `configs/default.toml` for a complete, commented example.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use lpmult::grid::FamilyKind;
use lpmult::multiplier::{SpaceKind, SweepConfig, SweepFamily};
use lpmult::norms::SpaceSpec;
use lpmult::report::Format;
use serde::Deserialize;

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub grid: GridSection,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub sweep: SweepSection,
    #[serde(default)]
    pub norm: NormSection,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    /// Dimension, 1 or 2.
    #[serde(default = "default_dim")]
    pub dim: usize,
    /// Half-width `L` of the box `[-L, L)^d`.
    #[serde(default = "default_half_width")]
    pub half_width: f64,
    /// Resolutions `N` (powers of two, at least 8).
    #[serde(default = "default_n")]
    pub n: Vec<usize>,
    /// Dyadic levels `K`; omitted means the largest admissible per `N`.
    pub levels: Option<usize>,
}

fn default_dim() -> usize {
    1
}

fn default_half_width() -> f64 {
    16.0
}

fn default_n() -> Vec<usize> {
    vec![256, 512, 1024, 2048]
}

impl Default for GridSection {
    fn default() -> Self {
        Self {
            dim: default_dim(),
            half_width: default_half_width(),
            n: default_n(),
            levels: None,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    #[serde(default = "default_s")]
    pub s: Vec<f64>,
    #[serde(default = "default_p")]
    pub p: Vec<f64>,
    #[serde(default = "default_gamma")]
    pub gamma: Vec<f64>,
    #[serde(default = "default_families")]
    pub families: Vec<SweepFamily>,
    #[serde(default = "default_spaces")]
    pub spaces: Vec<SpaceKind>,
}

fn default_s() -> Vec<f64> {
    vec![-0.6, 0.3, 0.6]
}

fn default_p() -> Vec<f64> {
    vec![2.0]
}

fn default_gamma() -> Vec<f64> {
    vec![0.0, 0.5]
}

fn default_families() -> Vec<SweepFamily> {
    vec![SweepFamily::default_ladder()]
}

fn default_spaces() -> Vec<SpaceKind> {
    vec![SpaceKind::Bessel]
}

impl Default for SweepSection {
    fn default() -> Self {
        Self {
            s: default_s(),
            p: default_p(),
            gamma: default_gamma(),
            families: default_families(),
            spaces: default_spaces(),
        }
    }
}

/// A field for the norm table: a test-family member or a constant.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum FieldEntry {
    Constant(ConstantField),
    Family(FamilyKind),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ConstantField {
    Constant { value: f64 },
}

impl FieldEntry {
    pub fn id(&self) -> String {
        match self {
            FieldEntry::Constant(ConstantField::Constant { value }) => format!("constant({value})"),
            FieldEntry::Family(k) => k.id(),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NormSection {
    #[serde(default = "default_fields")]
    pub fields: Vec<FieldEntry>,
    #[serde(default = "default_norm_spaces")]
    pub spaces: Vec<SpaceSpec>,
}

fn default_fields() -> Vec<FieldEntry> {
    vec![FieldEntry::Family(FamilyKind::Gaussian {
        center: 0.0,
        width: 1.0,
    })]
}

fn default_norm_spaces() -> Vec<SpaceSpec> {
    vec![
        SpaceSpec::Lp { p: 2.0, gamma: 0.0 },
        SpaceSpec::Bessel {
            s: 0.3,
            p: 2.0,
            gamma: 0.0,
        },
        SpaceSpec::Besov {
            s: 0.3,
            p: 2.0,
            q: 2.0,
            gamma: 0.0,
        },
        SpaceSpec::TriebelLizorkin {
            s: 0.3,
            p: 2.0,
            q: 2.0,
            gamma: 0.0,
        },
    ]
}

impl Default for NormSection {
    fn default() -> Self {
        Self {
            fields: default_fields(),
            spaces: default_norm_spaces(),
        }
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub path: Option<PathBuf>,
    pub format: Option<Format>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("in {}", path.display()))
    }

    pub fn parse(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.grid.n.is_empty() {
            bail!("grid.n must not be empty");
        }
        for &n in &self.grid.n {
            lpmult::grid::make_grid(self.grid.dim, self.grid.half_width, n)?;
        }
        for sp in &self.norm.spaces {
            sp.validate()?;
        }
        self.sweep_config().validate()?;
        Ok(())
    }

    pub fn sweep_config(&self) -> SweepConfig {
        SweepConfig {
            dim: self.grid.dim,
            half_width: self.grid.half_width,
            n_list: self.grid.n.clone(),
            s_list: self.sweep.s.clone(),
            p_list: self.sweep.p.clone(),
            gamma_list: self.sweep.gamma.clone(),
            families: self.sweep.families.clone(),
            spaces: self.sweep.spaces.clone(),
            levels: self.grid.levels,
            seed: self.seed,
        }
    }
}
