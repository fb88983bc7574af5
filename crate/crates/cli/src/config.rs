//! TOML run configuration. Unknown keys are rejected; relative paths are
//! resolved against the directory holding the config file.

use anyhow::{bail, Context, Result};
use serde::Deserialize;
use spaceform::presets::Preset;
use spaceform::spaceform::ambient_model;
use spaceform::{io, FundamentalData, Grid, Stencil, SurfaceCase};
use std::path::{Path, PathBuf};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub case: String,
    #[serde(default)]
    pub l0: f64,
    pub tolerance: Option<f64>,
    /// "second" or "fourth"; finite differences for residual reports.
    pub stencil: Option<String>,
    pub grid: GridConfig,
    pub data: Option<DataConfig>,
    pub construct: Option<ConstructConfig>,
    pub reconstruct: Option<ReconstructConfig>,
    pub group: Option<GroupConfig>,
    pub export: Option<ExportConfig>,
    #[serde(skip)]
    pub base: PathBuf,
}

/// Either an explicit origin/spacing/count, or a square `min`, `max`, `n`.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub u0: Option<f64>,
    pub v0: Option<f64>,
    pub du: Option<f64>,
    pub dv: Option<f64>,
    pub nu: Option<usize>,
    pub nv: Option<usize>,
    pub min: Option<f64>,
    pub max: Option<f64>,
    pub n: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataConfig {
    pub file: Option<PathBuf>,
    pub preset: Option<String>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "one")]
    pub param: f64,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstructConfig {
    pub mode: String,
    /// W/X/Y/Z file for the wxyz modes; defaults to the invariants of [data].
    pub invariants: Option<PathBuf>,
    pub p: Option<String>,
    #[serde(default)]
    pub r: f64,
    /// CSV with column `lambda`; default is the Liouville profile.
    pub lambda_file: Option<PathBuf>,
    /// CSV with column `gamma`; default γ = 0.
    pub gamma_file: Option<PathBuf>,
    pub liouville_tol: Option<f64>,
    pub hypothesis_tol: Option<f64>,
    pub identity_tol: Option<f64>,
    pub margin: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReconstructConfig {
    #[serde(default)]
    pub transposed_check: bool,
    pub project_every: Option<usize>,
    pub init_tol: Option<f64>,
    #[serde(default = "frames_dir")]
    pub frames_dir: PathBuf,
}

fn frames_dir() -> PathBuf {
    PathBuf::from("frames")
}

impl Default for ReconstructConfig {
    fn default() -> Self {
        Self { transposed_check: false, project_every: None, init_tol: None, frames_dir: frames_dir() }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupConfig {
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "words")]
    pub words: usize,
    #[serde(default = "length")]
    pub length: usize,
    #[serde(default = "one")]
    pub range: f64,
}

fn words() -> usize {
    100
}

fn length() -> usize {
    5
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExportConfig {
    pub frames_dir: PathBuf,
    /// 3 × dim rows; default picks the first three ambient coordinates.
    pub projection: Option<Vec<Vec<f64>>>,
    #[serde(default = "mesh")]
    pub mesh: PathBuf,
}

fn mesh() -> PathBuf {
    PathBuf::from("surface.obj")
}

impl Config {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let mut cfg: Config = toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
        cfg.base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(cfg)
    }

    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base.join(p)
        }
    }

    pub fn case(&self) -> Result<SurfaceCase> {
        Ok(self.case.parse()?)
    }

    pub fn grid(&self) -> Result<Grid> {
        let g = &self.grid;
        let grid = match (g.min, g.max, g.n) {
            (Some(a), Some(b), Some(n)) => {
                if g.u0.or(g.v0).or(g.du).or(g.dv).is_some() || g.nu.or(g.nv).is_some() {
                    bail!("[grid] takes either min/max/n or u0/v0/du/dv/nu/nv, not both");
                }
                Grid::square(a, b, n)?
            }
            (None, None, None) => match (g.u0, g.v0, g.du, g.dv, g.nu, g.nv) {
                (Some(u0), Some(v0), Some(du), Some(dv), Some(nu), Some(nv)) => Grid::new(u0, v0, du, dv, nu, nv)?,
                _ => bail!("[grid] needs all of u0, v0, du, dv, nu, nv"),
            },
            _ => bail!("[grid] needs all of min, max, n"),
        };
        Ok(grid)
    }

    pub fn stencil(&self, default: Stencil) -> Result<Stencil> {
        match self.stencil.as_deref() {
            None => Ok(default),
            Some("second") => Ok(Stencil::Second),
            Some("fourth") => Ok(Stencil::Fourth),
            Some(s) => bail!("unknown stencil `{s}` (expected second or fourth)"),
        }
    }

    /// Fundamental data from `[data]`: a field file or a preset.
    pub fn data(&self) -> Result<FundamentalData> {
        let d = self.data.as_ref().context("config has no [data] section")?;
        let (case, grid) = (self.case()?, self.grid()?);
        match (&d.file, &d.preset) {
            (Some(f), None) => {
                let path = self.resolve(f);
                Ok(io::read_data(&path, ambient_model(case, self.l0), &grid)?)
            }
            (None, Some(p)) => Ok(p.parse::<Preset>()?.build(case, self.l0, &grid, d.seed, d.param)?),
            _ => bail!("[data] needs exactly one of `file` or `preset`"),
        }
    }
}
