//! Space-form models, grids, fundamental data and the connection matrices S, T.

use crate::error::{Error, Location, Result};
use crate::fd::{self, Stencil};
use crate::geomcore::{frame_inner, AmbientSignature};
use nalgebra::Matrix5;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SurfaceCase {
    Riem,
    NeutSpace,
    NeutTime,
    LorSpace,
    LorTime,
}

impl SurfaceCase {
    pub const ALL: [SurfaceCase; 5] = [
        SurfaceCase::Riem,
        SurfaceCase::NeutSpace,
        SurfaceCase::NeutTime,
        SurfaceCase::LorSpace,
        SurfaceCase::LorTime,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            SurfaceCase::Riem => "RIEM",
            SurfaceCase::NeutSpace => "NEUT_SPACE",
            SurfaceCase::NeutTime => "NEUT_TIME",
            SurfaceCase::LorSpace => "LOR_SPACE",
            SurfaceCase::LorTime => "LOR_TIME",
        }
    }

    pub fn is_lorentzian(self) -> bool {
        matches!(self, SurfaceCase::LorSpace | SurfaceCase::LorTime)
    }

    /// Time-like surfaces: the induced metric is e^{2λ}(du² − dv²).
    pub fn is_timelike(self) -> bool {
        matches!(self, SurfaceCase::NeutTime | SurfaceCase::LorTime)
    }

    /// Number of Θ families carried by the hat connection (2 real, 1 Lorentzian).
    pub fn families(self) -> usize {
        if self.is_lorentzian() {
            1
        } else {
            2
        }
    }

    /// Signs of h(T1,T1), h(T2,T2), h(N1,N1), h(N2,N2) in units of e^{2λ}.
    pub fn frame_signs(self) -> [f64; 4] {
        match self {
            SurfaceCase::Riem => [1.0, 1.0, 1.0, 1.0],
            SurfaceCase::NeutSpace => [1.0, 1.0, -1.0, -1.0],
            SurfaceCase::NeutTime => [1.0, -1.0, 1.0, -1.0],
            SurfaceCase::LorSpace => [1.0, 1.0, 1.0, -1.0],
            SurfaceCase::LorTime => [1.0, -1.0, 1.0, 1.0],
        }
    }

    /// Positions in (T1, T2, N1, N2) of the oriented orthonormal frame e₁..e₄.
    pub fn e_order(self) -> [usize; 4] {
        match self {
            SurfaceCase::NeutTime => [0, 2, 1, 3],
            SurfaceCase::LorTime => [2, 3, 0, 1],
            _ => [0, 1, 2, 3],
        }
    }

    fn tangent_normal_negatives(self) -> usize {
        self.frame_signs().iter().filter(|&&s| s < 0.0).count()
    }
}

impl fmt::Display for SurfaceCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for SurfaceCase {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace(['_', ' '], "-");
        Ok(match key.as_str() {
            "riem" | "riemannian" => SurfaceCase::Riem,
            "neut-space" | "neutral-space" => SurfaceCase::NeutSpace,
            "neut-time" | "neutral-time" => SurfaceCase::NeutTime,
            "lor-space" | "lorentzian-space" => SurfaceCase::LorSpace,
            "lor-time" | "lorentzian-time" => SurfaceCase::LorTime,
            _ => return Err(Error::Parse(format!("unknown surface case `{s}`"))),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpaceFormModel {
    pub case: SurfaceCase,
    pub l0: f64,
    pub ambient: AmbientSignature,
    /// 1/L0 when L0 != 0.
    pub quadric_const: Option<f64>,
}

pub fn ambient_model(case: SurfaceCase, l0: f64) -> SpaceFormModel {
    let neg = case.tangent_normal_negatives();
    let ambient = if l0 == 0.0 {
        AmbientSignature::with_negatives(4, neg)
    } else if l0 > 0.0 {
        AmbientSignature::with_negatives(5, neg)
    } else {
        AmbientSignature::with_negatives(5, neg + 1)
    };
    SpaceFormModel {
        case,
        l0,
        ambient,
        quadric_const: if l0 == 0.0 { None } else { Some(1.0 / l0) },
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub u0: f64,
    pub v0: f64,
    pub du: f64,
    pub dv: f64,
    pub nu: usize,
    pub nv: usize,
}

impl Grid {
    pub fn new(u0: f64, v0: f64, du: f64, dv: f64, nu: usize, nv: usize) -> Result<Self> {
        if !(du > 0.0 && dv > 0.0 && du.is_finite() && dv.is_finite()) {
            return Err(Error::InvalidGrid("spacings must be positive".into()));
        }
        if nu < 3 || nv < 3 {
            return Err(Error::InvalidGrid("need at least 3 points per axis".into()));
        }
        if !(u0.is_finite() && v0.is_finite()) {
            return Err(Error::InvalidGrid("origin must be finite".into()));
        }
        Ok(Self { u0, v0, du, dv, nu, nv })
    }

    /// Square grid on [a, b]² with `n` points per axis.
    pub fn square(a: f64, b: f64, n: usize) -> Result<Self> {
        let h = (b - a) / (n as f64 - 1.0);
        Self::new(a, a, h, h, n, n)
    }

    pub fn len(&self) -> usize {
        self.nu * self.nv
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Storage index; v runs fastest.
    pub fn idx(&self, i: usize, j: usize) -> usize {
        i * self.nv + j
    }

    pub fn u(&self, i: usize) -> f64 {
        self.u0 + i as f64 * self.du
    }

    pub fn v(&self, j: usize) -> f64 {
        self.v0 + j as f64 * self.dv
    }

    pub fn h(&self) -> f64 {
        self.du.max(self.dv)
    }

    pub fn location(&self, k: usize) -> Location {
        let (i, j) = (k / self.nv, k % self.nv);
        Location { i, j, u: self.u(i), v: self.v(j) }
    }

    pub fn sample(&self, f: impl Fn(f64, f64) -> f64 + Sync) -> Vec<f64> {
        fd::map_points(self, |i, j| f(self.u(i), self.v(j)))
    }
}

pub const FIELD_NAMES: [&str; 9] = [
    "lambda", "alpha1", "alpha2", "alpha3", "beta1", "beta2", "beta3", "mu1", "mu2",
];

#[derive(Debug, Clone, PartialEq)]
pub struct FundamentalData {
    pub model: SpaceFormModel,
    pub grid: Grid,
    pub lambda: Vec<f64>,
    pub alpha: [Vec<f64>; 3],
    pub beta: [Vec<f64>; 3],
    pub mu: [Vec<f64>; 2],
}

impl FundamentalData {
    /// Builds data from the nine fields in `FIELD_NAMES` order.
    pub fn from_fields(model: SpaceFormModel, grid: Grid, fields: [Vec<f64>; 9]) -> Result<Self> {
        for (name, f) in FIELD_NAMES.iter().zip(&fields) {
            if f.len() != grid.len() {
                return Err(Error::InvalidField {
                    name: name.to_string(),
                    reason: format!("has {} values, grid has {}", f.len(), grid.len()),
                });
            }
            if let Some(k) = f.iter().position(|x| !x.is_finite()) {
                return Err(Error::InvalidField {
                    name: name.to_string(),
                    reason: format!("non-finite value at {}", grid.location(k)),
                });
            }
        }
        let [lambda, a1, a2, a3, b1, b2, b3, m1, m2] = fields;
        Ok(Self {
            model,
            grid,
            lambda,
            alpha: [a1, a2, a3],
            beta: [b1, b2, b3],
            mu: [m1, m2],
        })
    }

    pub fn zeros(model: SpaceFormModel, grid: Grid) -> Self {
        let z = vec![0.0; grid.len()];
        Self::from_fields(model, grid, std::array::from_fn(|_| z.clone())).expect("consistent shapes")
    }

    pub fn case(&self) -> SurfaceCase {
        self.model.case
    }

    pub fn field(&self, k: usize) -> &[f64] {
        match k {
            0 => &self.lambda,
            1..=3 => &self.alpha[k - 1],
            4..=6 => &self.beta[k - 4],
            7 | 8 => &self.mu[k - 7],
            _ => panic!("field index {k} out of range"),
        }
    }

    pub fn fields(&self) -> [&[f64]; 9] {
        std::array::from_fn(|k| self.field(k))
    }

    /// Pointwise values and derivatives of every field.
    pub fn jets(&self, st: Stencil) -> Jets {
        let g = &self.grid;
        let du: Vec<Vec<f64>> = (0..9).map(|k| fd::du(g, self.field(k), st)).collect();
        let dv: Vec<Vec<f64>> = (0..9).map(|k| fd::dv(g, self.field(k), st)).collect();
        let luv = fd::dv(g, &du[0], st);
        Jets {
            luu: fd::duu(g, &self.lambda, st),
            lvv: fd::dvv(g, &self.lambda, st),
            luv,
            du,
            dv,
        }
    }
}

/// Grid-wide derivative tables.
#[derive(Debug, Clone)]
pub struct Jets {
    pub du: Vec<Vec<f64>>,
    pub dv: Vec<Vec<f64>>,
    pub luu: Vec<f64>,
    pub lvv: Vec<f64>,
    pub luv: Vec<f64>,
}

impl Jets {
    pub fn at(&self, data: &FundamentalData, k: usize) -> PointJet {
        let f = |n: usize| data.field(n)[k];
        let e2l = (2.0 * data.lambda[k]).exp();
        let du = |n: usize| self.du[n][k];
        let dv = |n: usize| self.dv[n][k];
        let (lu, lv) = (du(0), dv(0));
        PointJet {
            lambda: data.lambda[k],
            val: Coeffs {
                lu,
                lv,
                e2l,
                a: [f(1), f(2), f(3)],
                b: [f(4), f(5), f(6)],
                m: [f(7), f(8)],
            },
            du: Coeffs {
                lu: self.luu[k],
                lv: self.luv[k],
                e2l: 2.0 * lu * e2l,
                a: [du(1), du(2), du(3)],
                b: [du(4), du(5), du(6)],
                m: [du(7), du(8)],
            },
            dv: Coeffs {
                lu: self.luv[k],
                lv: self.lvv[k],
                e2l: 2.0 * lv * e2l,
                a: [dv(1), dv(2), dv(3)],
                b: [dv(4), dv(5), dv(6)],
                m: [dv(7), dv(8)],
            },
        }
    }
}

/// The quantities S and T are affine in: λ_u, λ_v, e^{2λ}, α, β, μ.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Coeffs {
    pub lu: f64,
    pub lv: f64,
    pub e2l: f64,
    pub a: [f64; 3],
    pub b: [f64; 3],
    pub m: [f64; 2],
}

/// Values at a point together with their u- and v-derivatives.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PointJet {
    pub lambda: f64,
    pub val: Coeffs,
    pub du: Coeffs,
    pub dv: Coeffs,
}

impl PointJet {
    pub fn luu(&self) -> f64 {
        self.du.lu
    }
    pub fn lvv(&self) -> f64 {
        self.dv.lv
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConnectionPair {
    pub s: Matrix5<f64>,
    pub t: Matrix5<f64>,
}

/// Sign pattern of the off-block entries of S and T per case:
/// (σ13, σ14, σ23, σ24, σ34, τ, ρ).
fn sign_pattern(case: SurfaceCase) -> [f64; 7] {
    match case {
        SurfaceCase::Riem => [-1., -1., -1., -1., -1., -1., -1.],
        SurfaceCase::NeutSpace => [1., 1., 1., 1., -1., -1., -1.],
        SurfaceCase::NeutTime => [-1., 1., 1., -1., 1., 1., 1.],
        SurfaceCase::LorSpace => [-1., 1., -1., 1., 1., -1., -1.],
        SurfaceCase::LorTime => [-1., -1., 1., 1., -1., 1., 1.],
    }
}

/// S and T from affine coefficients. `unit` multiplies the constant entries
/// (1 for values, 0 when `c` holds derivatives).
pub fn assemble(case: SurfaceCase, l0: f64, c: &Coeffs, unit: f64) -> ConnectionPair {
    let [s13, s14, s23, s24, s34, tau, rho] = sign_pattern(case);
    let (lu, lv) = (c.lu, c.lv);
    let [a1, a2, a3] = c.a;
    let [b1, b2, b3] = c.b;
    let [m1, m2] = c.m;
    let le = l0 * c.e2l;
    #[rustfmt::skip]
    let s = Matrix5::new(
        lu,        lv,  s13 * a1, s14 * b1, unit,
        tau * lv,  lu,  s23 * a2, s24 * b2, 0.0,
        a1,        a2,  lu,       s34 * m1, 0.0,
        b1,        b2,  m1,       lu,       0.0,
        -le,       0.0, 0.0,      0.0,      0.0,
    );
    #[rustfmt::skip]
    let t = Matrix5::new(
        lv,        tau * lu, s13 * a2, s14 * b2, 0.0,
        lu,        lv,       s23 * a3, s24 * b3, unit,
        a2,        a3,       lv,       s34 * m2, 0.0,
        b2,        b3,       m2,       lv,       0.0,
        0.0,       rho * le, 0.0,      0.0,      0.0,
    );
    ConnectionPair { s, t }
}

/// S and T at grid point (i, j), with λ_u and λ_v by second-order differences.
pub fn build_connection_matrices(data: &FundamentalData, i: usize, j: usize) -> Result<ConnectionPair> {
    build_connection_matrices_with(data, i, j, Stencil::Second)
}

pub fn build_connection_matrices_with(data: &FundamentalData, i: usize, j: usize, st: Stencil) -> Result<ConnectionPair> {
    let g = &data.grid;
    if i >= g.nu || j >= g.nv {
        return Err(Error::IndexOutOfRange { i, j });
    }
    let lam = &data.lambda;
    let k = g.idx(i, j);
    let c = Coeffs {
        lu: fd::d1_at(|m| lam[g.idx(m, j)], g.nu, i, g.du, st),
        lv: fd::d1_at(|m| lam[g.idx(i, m)], g.nv, j, g.dv, st),
        e2l: (2.0 * lam[k]).exp(),
        a: [data.alpha[0][k], data.alpha[1][k], data.alpha[2][k]],
        b: [data.beta[0][k], data.beta[1][k], data.beta[2][k]],
        m: [data.mu[0][k], data.mu[1][k]],
    };
    Ok(assemble(data.case(), data.model.l0, &c, 1.0))
}

/// Columns T1, T2, N1, N2, F; rows are ambient coordinates (row 5 unused in dimension 4).
pub type Frame = Matrix5<f64>;

/// Pairs (a, b), a <= b, over T1, T2, N1, N2 in residual order.
pub const FRAME_PAIRS: [(usize, usize); 10] = [
    (0, 0), (0, 1), (0, 2), (0, 3), (1, 1), (1, 2), (1, 3), (2, 2), (2, 3), (3, 3),
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameResiduals {
    /// required − measured for each entry of `FRAME_PAIRS`.
    pub pairs: [f64; 10],
    /// 1/L0 − ⟨F,F⟩ when L0 != 0.
    pub quadric: Option<f64>,
}

impl FrameResiduals {
    pub fn max_abs(&self) -> f64 {
        self.pairs
            .iter()
            .chain(self.quadric.iter())
            .fold(0.0, |m, x| m.max(x.abs()))
    }
}

pub fn validate_frame(frame: &Frame, lambda: f64, model: &SpaceFormModel) -> FrameResiduals {
    let sig = &model.ambient;
    let signs = model.case.frame_signs();
    let e2l = (2.0 * lambda).exp();
    let pairs = FRAME_PAIRS.map(|(a, b)| {
        let required = if a == b { signs[a] * e2l } else { 0.0 };
        required - frame_inner(frame, a, b, sig)
    });
    let quadric = model.quadric_const.map(|q| q - frame_inner(frame, 4, 4, sig));
    FrameResiduals { pairs, quadric }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> Grid {
        Grid::square(-1.0, 1.0, 5).unwrap()
    }

    #[test]
    fn ambient_models() {
        let m = ambient_model(SurfaceCase::Riem, -1.0);
        assert_eq!(m.ambient.label(), "E5_1");
        assert_eq!(m.quadric_const, Some(-1.0));
        let m = ambient_model(SurfaceCase::LorSpace, 0.0);
        assert_eq!(m.ambient.label(), "E4_1");
        assert_eq!(m.quadric_const, None);
        assert_eq!(ambient_model(SurfaceCase::NeutSpace, 1.0).ambient.label(), "E5_2");
        assert_eq!(ambient_model(SurfaceCase::NeutTime, -2.0).ambient.label(), "E5_3");
        assert_eq!(ambient_model(SurfaceCase::LorTime, -1.0).ambient.label(), "E5_2");
    }

    #[test]
    fn zero_data_connection() {
        let d = FundamentalData::zeros(ambient_model(SurfaceCase::Riem, 0.0), grid());
        let c = build_connection_matrices(&d, 2, 2).unwrap();
        let mut s = Matrix5::zeros();
        s[(0, 4)] = 1.0;
        let mut t = Matrix5::zeros();
        t[(1, 4)] = 1.0;
        assert_eq!(c.s, s);
        assert_eq!(c.t, t);
        assert!(matches!(build_connection_matrices(&d, 5, 0), Err(Error::IndexOutOfRange { .. })));
    }

    #[test]
    fn curvature_row() {
        let d = FundamentalData::zeros(ambient_model(SurfaceCase::Riem, 1.0), grid());
        let c = build_connection_matrices(&d, 1, 3).unwrap();
        assert_eq!(c.s[(4, 0)], -1.0);
        assert_eq!(c.t[(4, 1)], -1.0);
    }

    #[test]
    fn neutral_time_normalization() {
        let model = ambient_model(SurfaceCase::NeutTime, 0.0);
        assert_eq!(model.ambient.diag(), &[1, 1, -1, -1]);
        // T1 = e1, T2 = e3, N1 = e2, N2 = e4 is admissible.
        let mut f = Frame::zeros();
        f[(0, 0)] = 1.0;
        f[(2, 1)] = 1.0;
        f[(1, 2)] = 1.0;
        f[(3, 3)] = 1.0;
        assert_eq!(validate_frame(&f, 0.0, &model).max_abs(), 0.0);
        // N2 along a space-like direction: h(N2, N2) = +1 where −1 is required.
        let mut g = f;
        g[(3, 3)] = 0.0;
        g[(1, 3)] = 1.0;
        let r = validate_frame(&g, 0.0, &model);
        assert_eq!(r.pairs[9], -2.0);
    }

    #[test]
    fn quadric_residual() {
        let model = ambient_model(SurfaceCase::Riem, 1.0);
        let mut f = Frame::identity();
        f[(4, 4)] = 1.0;
        let r = validate_frame(&f, 0.0, &model);
        assert_eq!(r.quadric, Some(0.0));
        assert_eq!(r.max_abs(), 0.0);
    }

    #[test]
    fn case_parsing() {
        for c in SurfaceCase::ALL {
            assert_eq!(c.tag().parse::<SurfaceCase>().unwrap(), c);
        }
        assert!("bogus".parse::<SurfaceCase>().is_err());
    }
}
