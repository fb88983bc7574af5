//! Ready-made fundamental data on a grid.

use crate::error::{Error, Result};
use crate::reconstruct::liouville_profile;
use crate::spaceform::{ambient_model, FundamentalData, Grid, SurfaceCase};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::str::FromStr;

/// Unit sphere S² ⊂ E³ ⊂ E⁴ in stereographic coordinates.
pub fn sphere(grid: &Grid) -> FundamentalData {
    let lambda = grid.sample(|u, v| (2.0 / (1.0 + u * u + v * v)).ln());
    let a: Vec<f64> = lambda.iter().map(|l| -l.exp()).collect();
    let z = vec![0.0; grid.len()];
    FundamentalData::from_fields(
        ambient_model(SurfaceCase::Riem, 0.0),
        *grid,
        [lambda, a.clone(), z.clone(), a, z.clone(), z.clone(), z.clone(), z.clone(), z],
    )
    .expect("consistent shapes")
}

/// Totally geodesic surface: every field but λ is zero. λ solves the Gauss
/// equation, elliptic or hyperbolic according to the case.
pub fn totally_geodesic(case: SurfaceCase, l0: f64, grid: &Grid) -> Result<FundamentalData> {
    let mut d = FundamentalData::zeros(ambient_model(case, l0), *grid);
    d.lambda = if case.is_timelike() { wave_profile(l0, grid)? } else { liouville_profile(l0, grid)? };
    Ok(d)
}

/// λ = ln(2 / (√|L0| (1 + sgn L0 (u² − v²)))), solving λ_uu − λ_vv + L0 e^{2λ} = 0.
fn wave_profile(l0: f64, grid: &Grid) -> Result<Vec<f64>> {
    if l0 == 0.0 {
        return Ok(vec![0.0; grid.len()]);
    }
    let q = grid.sample(|u, v| 1.0 + l0.signum() * (u * u - v * v));
    if let Some(k) = q.iter().position(|&x| x <= 0.0) {
        return Err(Error::DomainViolation { at: grid.location(k) });
    }
    let c = l0.abs().sqrt();
    Ok(q.iter().map(|x| (2.0 / (c * x)).ln()).collect())
}

/// Small sphere in S⁴ (L0 = 1). For `Riem`, `param` is the radius r in (0, 1]
/// and α₁ = α₃ = −√(1/r² − 1)·e^λ. For `LorSpace`, `param` is k with |k| < 1
/// and β₁ = β₃ = k·e^λ along the time-like normal.
pub fn small_sphere(case: SurfaceCase, param: f64, grid: &Grid) -> Result<FundamentalData> {
    let mut d = FundamentalData::zeros(ambient_model(case, 1.0), *grid);
    match case {
        SurfaceCase::Riem => {
            if !(param > 0.0 && param <= 1.0) {
                return Err(Error::Parse(format!("small sphere radius must lie in (0, 1], got {param}")));
            }
            let c = (1.0 / (param * param) - 1.0).sqrt();
            d.lambda = grid.sample(|u, v| (2.0 * param / (1.0 + u * u + v * v)).ln());
            let a: Vec<f64> = d.lambda.iter().map(|l| -c * l.exp()).collect();
            d.alpha[0] = a.clone();
            d.alpha[2] = a;
        }
        SurfaceCase::LorSpace => {
            if !(param.abs() < 1.0) {
                return Err(Error::Parse(format!("need |k| < 1, got {param}")));
            }
            let s = (1.0 - param * param).sqrt();
            d.lambda = grid.sample(|u, v| (2.0 / (s * (1.0 + u * u + v * v))).ln());
            let b: Vec<f64> = d.lambda.iter().map(|l| param * l.exp()).collect();
            d.beta[0] = b.clone();
            d.beta[2] = b;
        }
        c => return Err(Error::UnsupportedCase(c.tag().into())),
    }
    Ok(d)
}

pub fn zero(case: SurfaceCase, l0: f64, grid: &Grid) -> FundamentalData {
    FundamentalData::zeros(ambient_model(case, l0), *grid)
}

/// Smooth random fields: sums of three plane waves with random amplitude,
/// direction and phase. Not a solution of the structure equations.
pub fn random_smooth(case: SurfaceCase, l0: f64, grid: &Grid, seed: u64) -> FundamentalData {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let fields: [Vec<f64>; 9] = std::array::from_fn(|f| {
        let amp = if f == 0 { 0.3 } else { 1.0 };
        let waves: Vec<[f64; 4]> = (0..3)
            .map(|_| [amp * rng.gen_range(-1.0..1.0), rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0), rng.gen_range(0.0..6.3)])
            .collect();
        grid.sample(|u, v| waves.iter().map(|[a, k, l, p]| a * (k * u + l * v + p).sin()).sum())
    });
    FundamentalData::from_fields(ambient_model(case, l0), *grid, fields).expect("consistent shapes")
}

/// Independent uniform values in [−1, 1] at every point.
pub fn noise(case: SurfaceCase, l0: f64, grid: &Grid, seed: u64) -> FundamentalData {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let fields: [Vec<f64>; 9] = std::array::from_fn(|_| (0..grid.len()).map(|_| rng.gen_range(-1.0..=1.0)).collect());
    FundamentalData::from_fields(ambient_model(case, l0), *grid, fields).expect("consistent shapes")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    Sphere,
    Zero,
    TotallyGeodesic,
    SmallSphere,
    RandomSmooth,
    Noise,
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.trim() {
            "sphere" => Preset::Sphere,
            "zero" => Preset::Zero,
            "totally-geodesic" => Preset::TotallyGeodesic,
            "small-sphere" => Preset::SmallSphere,
            "random-smooth" => Preset::RandomSmooth,
            "noise" => Preset::Noise,
            other => return Err(Error::Parse(format!("unknown preset `{other}`"))),
        })
    }
}

impl Preset {
    /// `sphere` ignores case and L0; `small-sphere` ignores L0 (always 1).
    pub fn build(self, case: SurfaceCase, l0: f64, grid: &Grid, seed: u64, param: f64) -> Result<FundamentalData> {
        match self {
            Preset::Sphere => Ok(sphere(grid)),
            Preset::Zero => Ok(zero(case, l0, grid)),
            Preset::TotallyGeodesic => totally_geodesic(case, l0, grid),
            Preset::SmallSphere => small_sphere(case, param, grid),
            Preset::RandomSmooth => Ok(random_smooth(case, l0, grid, seed)),
            Preset::Noise => Ok(noise(case, l0, grid, seed)),
        }
    }
}
