//! Twistor invariants W, X, Y, Z, φ, ψ, the induced connection on the Θ
//! families, its curvature, degeneracy and the ∂̄ condition.
//!
//! Invariants are stored in two slots. Real cases: slot 0 holds the `+`
//! quantity and slot 1 the `−` one. Lorentzian cases: slot 0 holds W (etc.)
//! and slot 1 its complex conjugate, so identities such as
//! W₊ + W₋ = X₊ + X₋ read the same in every case.

use crate::error::{Error, Result};
use crate::fd::{self, Stencil};
use crate::spaceform::{Coeffs, FundamentalData, Grid, PointJet, SurfaceCase};
use nalgebra::{Matrix3, Matrix4};
use num_complex::Complex64 as C64;
use serde::Serialize;

const I: C64 = C64 { re: 0.0, im: 1.0 };
const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

fn sign(slot: usize) -> f64 {
    if slot == 0 {
        1.0
    } else {
        -1.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct InvariantsAt {
    pub w: [C64; 2],
    pub x: [C64; 2],
    pub y: [C64; 2],
    pub z: [C64; 2],
    pub phi: [C64; 2],
    pub psi: [C64; 2],
}

/// Invariants are linear in (λ_u, λ_v, α, β, μ); applied to derivative
/// coefficients this returns the derivatives of the invariants.
pub fn invariants_at(case: SurfaceCase, c: &Coeffs) -> InvariantsAt {
    let [a1, a2, a3] = c.a;
    let [b1, b2, b3] = c.b;
    let [m1, m2] = c.m;
    let pair = |z: C64| [z, z.conj()];
    match case {
        SurfaceCase::Riem | SurfaceCase::NeutSpace | SurfaceCase::NeutTime => InvariantsAt {
            w: [re(a2 + b1), re(a2 - b1)],
            x: [re(a2 + b3), re(a2 - b3)],
            y: [re(b2 + a1), re(b2 - a1)],
            z: [re(b2 + a3), re(b2 - a3)],
            phi: [re(c.lu - m2), re(c.lu + m2)],
            psi: [re(c.lv - m1), re(c.lv + m1)],
        },
        SurfaceCase::LorSpace => InvariantsAt {
            w: pair(C64::new(a2, -b1)),
            x: pair(C64::new(a2, b3)),
            y: pair(C64::new(b2, -a1)),
            z: pair(C64::new(b2, a3)),
            phi: pair(C64::new(c.lu, -m2)),
            psi: pair(C64::new(c.lv, m1)),
        },
        SurfaceCase::LorTime => InvariantsAt {
            w: pair(C64::new(a2, b1)),
            x: pair(C64::new(a2, b3)),
            y: pair(C64::new(b2, -a1)),
            z: pair(C64::new(b2, -a3)),
            phi: pair(C64::new(c.lu, -m2)),
            psi: pair(C64::new(c.lv, -m1)),
        },
    }
}

pub fn delta_at(case: SurfaceCase, v: &InvariantsAt) -> [C64; 2] {
    match case {
        SurfaceCase::Riem | SurfaceCase::NeutSpace => {
            [v.w[1] * v.x[0] + v.y[0] * v.z[1], v.w[0] * v.x[1] + v.y[1] * v.z[0]]
        }
        SurfaceCase::NeutTime => [v.w[0] * v.x[0] - v.y[0] * v.z[0], v.w[1] * v.x[1] - v.y[1] * v.z[1]],
        SurfaceCase::LorSpace => {
            let d = v.w[0] * v.x[0] - v.y[0] * v.z[0];
            [d, d.conj()]
        }
        SurfaceCase::LorTime => {
            let d = v.w[0] * v.x[0] + v.y[0] * v.z[0];
            [d, d.conj()]
        }
    }
}

fn m3(e: [[C64; 3]; 3]) -> Matrix3<C64> {
    Matrix3::from_fn(|r, c| e[r][c])
}

/// Matrices (A, B) of ∇̂_{T1}, ∇̂_{T2} on the Θ family of each slot.
/// Lorentzian slot 1 is the conjugate family.
pub fn hat_at(case: SurfaceCase, v: &InvariantsAt) -> [(Matrix3<C64>, Matrix3<C64>); 2] {
    let z = ZERO;
    let real = |k: usize| {
        let s = re(sign(k));
        let o = 1 - k;
        let (w, x, y, zz, ph, ps) = (v.w, v.x, v.y, v.z, v.phi, v.psi);
        match case {
            SurfaceCase::Riem => (
                m3([[z, -w[k], -y[o]], [w[k], z, s * ps[k]], [y[o], -s * ps[k], z]]),
                m3([[z, -s * zz[k], s * x[o]], [s * zz[k], z, -s * ph[o]], [-s * x[o], s * ph[o], z]]),
            ),
            SurfaceCase::NeutSpace => (
                m3([[z, w[k], y[o]], [w[k], z, s * ps[k]], [y[o], -s * ps[k], z]]),
                m3([[z, s * zz[k], -s * x[o]], [s * zz[k], z, -s * ph[o]], [-s * x[o], s * ph[o], z]]),
            ),
            _ => (
                m3([[z, w[k], -s * ps[k]], [w[k], z, -y[k]], [-s * ps[k], y[k], z]]),
                m3([[z, s * zz[k], -s * ph[k]], [s * zz[k], z, -s * x[k]], [-s * ph[k], s * x[k], z]]),
            ),
        }
    };
    match case {
        SurfaceCase::Riem | SurfaceCase::NeutSpace | SurfaceCase::NeutTime => [real(0), real(1)],
        SurfaceCase::LorSpace => {
            let (w, x, y, zz, ph, ps) = (v.w[0], v.x[0], v.y[0], v.z[0], v.phi[0], v.psi[0]);
            let a = m3([[z, -w, I * y], [w, z, ps], [-I * y, -ps, z]]);
            let b = m3([[z, I * zz, x], [-I * zz, z, -ph], [-x, ph, z]]);
            [(a, b), (a.map(|e| e.conj()), b.map(|e| e.conj()))]
        }
        SurfaceCase::LorTime => {
            let (w, x, y, zz, ph, ps) = (v.w[0], v.x[0], v.y[0], v.z[0], v.phi[0], v.psi[0]);
            let a = m3([[z, -I * w, -I * y], [I * w, z, -I * ps], [I * y, I * ps, z]]);
            let b = m3([[z, zz, -x], [-zz, z, -I * ph], [x, I * ph, z]]);
            [(a, b), (a.map(|e| e.conj()), b.map(|e| e.conj()))]
        }
    }
}

/// Curvature of the ambient space form acting on each Θ family, for R(T1, T2).
pub fn curvature_rhs(case: SurfaceCase, l0e2l: f64) -> [Matrix3<C64>; 2] {
    let k = re(l0e2l);
    let z = ZERO;
    let rot = |c: C64| m3([[z, z, z], [z, z, c], [z, -c, z]]);
    match case {
        SurfaceCase::Riem | SurfaceCase::NeutSpace => [rot(k), rot(-k)],
        SurfaceCase::NeutTime => {
            let sym = |c: C64| m3([[z, z, c], [z, z, z], [c, z, z]]);
            [sym(k), sym(-k)]
        }
        SurfaceCase::LorSpace => [rot(k), rot(k)],
        SurfaceCase::LorTime => [rot(I * k), rot(-I * k)],
    }
}

/// R̂(T1,T2) − RHS per slot: B_u − A_v + AB − BA − RHS.
pub fn curvature_at(case: SurfaceCase, l0: f64, jet: &PointJet) -> [Matrix3<C64>; 2] {
    let v = invariants_at(case, &jet.val);
    let vu = invariants_at(case, &jet.du);
    let vv = invariants_at(case, &jet.dv);
    let h = hat_at(case, &v);
    let hu = hat_at(case, &vu);
    let hv = hat_at(case, &vv);
    let rhs = curvature_rhs(case, l0 * jet.val.e2l);
    std::array::from_fn(|k| {
        let (a, b) = h[k];
        hu[k].1 - hv[k].0 + a * b - b * a - rhs[k]
    })
}

#[derive(Debug, Clone)]
pub struct TwistorInvariants {
    pub case: SurfaceCase,
    pub grid: Grid,
    pub w: [Vec<C64>; 2],
    pub x: [Vec<C64>; 2],
    pub y: [Vec<C64>; 2],
    pub z: [Vec<C64>; 2],
    pub phi: [Vec<C64>; 2],
    pub psi: [Vec<C64>; 2],
    pub delta: [Vec<C64>; 2],
    /// λ when the invariants come from fundamental data (scales thresholds).
    pub lambda: Option<Vec<f64>>,
}

fn split<T: Copy + Send>(v: Vec<[T; 2]>) -> [Vec<T>; 2] {
    [v.iter().map(|p| p[0]).collect(), v.iter().map(|p| p[1]).collect()]
}

impl TwistorInvariants {
    /// Invariants given directly as W, X, Y, Z fields (φ, ψ left at zero).
    /// For Lorentzian cases slot 1 is replaced by the conjugate of slot 0.
    pub fn from_wxyz(case: SurfaceCase, grid: Grid, w: [Vec<C64>; 2], x: [Vec<C64>; 2], y: [Vec<C64>; 2], z: [Vec<C64>; 2]) -> Result<Self> {
        for f in w.iter().chain(&x).chain(&y).chain(&z) {
            if f.len() != grid.len() {
                return Err(Error::DimensionMismatch { expected: grid.len(), got: f.len() });
            }
        }
        let conj = |f: [Vec<C64>; 2]| {
            if case.is_lorentzian() {
                let c = f[0].iter().map(|z| z.conj()).collect();
                [f[0].clone(), c]
            } else {
                f
            }
        };
        let (w, x, y, z) = (conj(w), conj(x), conj(y), conj(z));
        let zero = vec![ZERO; grid.len()];
        let mut inv = Self {
            case,
            grid,
            w,
            x,
            y,
            z,
            phi: [zero.clone(), zero.clone()],
            psi: [zero.clone(), zero],
            delta: [vec![], vec![]],
            lambda: None,
        };
        inv.delta = split((0..grid.len()).map(|k| delta_at(case, &inv.at(k))).collect());
        Ok(inv)
    }

    pub fn at(&self, k: usize) -> InvariantsAt {
        let g = |f: &[Vec<C64>; 2]| [f[0][k], f[1][k]];
        InvariantsAt {
            w: g(&self.w),
            x: g(&self.x),
            y: g(&self.y),
            z: g(&self.z),
            phi: g(&self.phi),
            psi: g(&self.psi),
        }
    }

    /// Largest violation of W₊ + W₋ = X₊ + X₋ and Y₊ + Y₋ = Z₊ + Z₋, with its index.
    pub fn identity_residual(&self) -> (f64, usize) {
        let mut worst = (0.0, 0);
        for k in 0..self.grid.len() {
            let r1 = (self.w[0][k] + self.w[1][k] - self.x[0][k] - self.x[1][k]).norm();
            let r2 = (self.y[0][k] + self.y[1][k] - self.z[0][k] - self.z[1][k]).norm();
            let r = r1.max(r2);
            if r > worst.0 {
                worst = (r, k);
            }
        }
        worst
    }

    fn threshold(&self, k: usize) -> f64 {
        let scale = self.lambda.as_ref().map_or(1.0, |l| (2.0 * l[k]).exp().max(1.0));
        DELTA_THRESHOLD * scale
    }
}

/// Relative threshold on |Δ|.
pub const DELTA_THRESHOLD: f64 = 1e-10;

pub fn twistor_invariants(data: &FundamentalData, st: Stencil) -> TwistorInvariants {
    let case = data.case();
    let jets = data.jets(st);
    let pts: Vec<(InvariantsAt, [C64; 2])> = fd::map_points(&data.grid, |i, j| {
        let k = data.grid.idx(i, j);
        let v = invariants_at(case, &jets.at(data, k).val);
        (v, delta_at(case, &v))
    });
    let pick = |f: fn(&InvariantsAt) -> [C64; 2]| split(pts.iter().map(|(v, _)| f(v)).collect());
    TwistorInvariants {
        case,
        grid: data.grid,
        w: pick(|v| v.w),
        x: pick(|v| v.x),
        y: pick(|v| v.y),
        z: pick(|v| v.z),
        phi: pick(|v| v.phi),
        psi: pick(|v| v.psi),
        delta: split(pts.iter().map(|(_, d)| *d).collect()),
        lambda: Some(data.lambda.clone()),
    }
}

#[derive(Debug, Clone)]
pub struct HatFields {
    /// 2 in real cases; 1 in Lorentzian cases.
    pub families: usize,
    pub a: [Vec<Matrix3<C64>>; 2],
    pub b: [Vec<Matrix3<C64>>; 2],
}

pub fn hat_connection_matrices(data: &FundamentalData, st: Stencil) -> HatFields {
    let case = data.case();
    let jets = data.jets(st);
    let pts = fd::map_points(&data.grid, |i, j| {
        let k = data.grid.idx(i, j);
        hat_at(case, &invariants_at(case, &jets.at(data, k).val))
    });
    HatFields {
        families: case.families(),
        a: [pts.iter().map(|h| h[0].0).collect(), pts.iter().map(|h| h[1].0).collect()],
        b: [pts.iter().map(|h| h[0].1).collect(), pts.iter().map(|h| h[1].1).collect()],
    }
}

/// Per-point curvature residual for each Θ family.
pub fn curvature_residual(data: &FundamentalData, st: Stencil) -> Vec<[Matrix3<C64>; 2]> {
    let case = data.case();
    let jets = data.jets(st);
    fd::map_points(&data.grid, |i, j| {
        let k = data.grid.idx(i, j);
        curvature_at(case, data.model.l0, &jets.at(data, k))
    })
}

pub fn max_entry(m: &Matrix3<C64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

#[derive(Debug, Clone, Serialize)]
pub struct DegeneracyReport {
    #[serde(skip)]
    pub delta: [Vec<C64>; 2],
    /// min over the grid of |Δ| / max(1, e^{2λ}).
    pub min_scaled_delta: f64,
    pub nondegenerate: bool,
    #[serde(skip)]
    pub k_minus_l0: Vec<f64>,
    #[serde(skip)]
    pub rperp: Vec<f64>,
    pub max_k_minus_l0: f64,
    pub max_rperp: f64,
}

impl DegeneracyReport {
    /// Whether degeneracy coincides with K ≡ L0 and R⊥ ≡ 0 at tolerance `tol`.
    pub fn dichotomy_consistent(&self, tol: f64) -> bool {
        let flat_normal = self.max_k_minus_l0 <= tol && self.max_rperp <= tol;
        self.nondegenerate != flat_normal
    }
}

pub fn degeneracy_report(data: &FundamentalData, st: Stencil) -> DegeneracyReport {
    let case = data.case();
    let jets = data.jets(st);
    let families = case.families();
    let pts: Vec<([C64; 2], f64, f64, f64)> = fd::map_points(&data.grid, |i, j| {
        let k = data.grid.idx(i, j);
        let jet = jets.at(data, k);
        let d = delta_at(case, &invariants_at(case, &jet.val));
        let lap = if case.is_timelike() {
            jet.luu() - jet.lvv()
        } else {
            jet.luu() + jet.lvv()
        };
        let curv = -lap / jet.val.e2l;
        let rperp = jet.dv.m[0] - jet.du.m[1];
        let scale = jet.val.e2l.max(1.0);
        let scaled = (0..families).map(|s| d[s].norm() / scale).fold(f64::INFINITY, f64::min);
        (d, curv - data.model.l0, rperp, scaled)
    });
    let min_scaled_delta = pts.iter().map(|p| p.3).fold(f64::INFINITY, f64::min);
    let k_minus_l0: Vec<f64> = pts.iter().map(|p| p.1).collect();
    let rperp: Vec<f64> = pts.iter().map(|p| p.2).collect();
    DegeneracyReport {
        delta: split(pts.iter().map(|p| p.0).collect()),
        min_scaled_delta,
        nondegenerate: min_scaled_delta > DELTA_THRESHOLD,
        max_k_minus_l0: k_minus_l0.iter().fold(0.0, |m, x| m.max(x.abs())),
        max_rperp: rperp.iter().fold(0.0, |m, x| m.max(x.abs())),
        k_minus_l0,
        rperp,
    }
}

/// Solves the Codazzi system in W/X/Y/Z form for (φ, ψ) at a point.
///
/// Slot k of the result: real Riemannian and neutral space-like cases give
/// (A_s, B_{−s}) from family s and store them as `a[k]` and `b[1-k]`;
/// neutral time-like gives (A_s, B_s); Lorentzian slot 1 is the conjugate.
/// Returns `None` when the 2×2 system is singular.
pub fn ab_at(case: SurfaceCase, v: &InvariantsAt, vu: &InvariantsAt, vv: &InvariantsAt) -> Option<([C64; 2], [C64; 2])> {
    let solve = |l1: C64, l2: C64, m: [[C64; 2]; 2]| {
        let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        if det.norm() == 0.0 {
            return None;
        }
        Some(((l1 * m[1][1] - m[0][1] * l2) / det, (m[0][0] * l2 - m[1][0] * l1) / det))
    };
    let mut a = [ZERO; 2];
    let mut b = [ZERO; 2];
    match case {
        SurfaceCase::Riem | SurfaceCase::NeutSpace => {
            for k in 0..2 {
                let (s, o) = (re(sign(k)), 1 - k);
                let l1 = vv.y[k] - s * vu.x[k];
                let l2 = vv.w[o] + s * vu.z[o];
                let (p, q) = solve(l1, l2, [[s * v.w[o], -v.z[o]], [-s * v.y[k], -v.x[k]]])?;
                a[k] = p;
                b[o] = q;
            }
        }
        SurfaceCase::NeutTime => {
            for k in 0..2 {
                let s = re(sign(k));
                let l1 = vv.y[k] - s * vu.x[k];
                let l2 = vv.w[k] - s * vu.z[k];
                let (p, q) = solve(l1, l2, [[s * v.w[k], -v.z[k]], [s * v.y[k], -v.x[k]]])?;
                a[k] = p;
                b[k] = q;
            }
        }
        SurfaceCase::LorSpace | SurfaceCase::LorTime => {
            let l1 = vv.y[0] + I * vu.x[0];
            let (l2, m10) = if case == SurfaceCase::LorSpace {
                (vv.w[0] + I * vu.z[0], -I * v.y[0])
            } else {
                (vv.w[0] - I * vu.z[0], I * v.y[0])
            };
            let (p, q) = solve(l1, l2, [[-I * v.w[0], -v.z[0]], [m10, -v.x[0]]])?;
            a = [p, p.conj()];
            b = [q, q.conj()];
        }
    }
    Some((a, b))
}

#[derive(Debug, Clone)]
pub struct AbFields {
    pub a: [Vec<C64>; 2],
    pub b: [Vec<C64>; 2],
}

/// Derivatives of the W, X, Y, Z fields of `inv`, as invariant records.
pub fn invariant_derivatives(inv: &TwistorInvariants, st: Stencil) -> (Vec<InvariantsAt>, Vec<InvariantsAt>) {
    let g = &inv.grid;
    let d = |f: &[Vec<C64>; 2], u: bool| {
        let op = if u { fd::du_c } else { fd::dv_c };
        [op(g, &f[0], st), op(g, &f[1], st)]
    };
    let collect = |u: bool| {
        let (w, x, y, z) = (d(&inv.w, u), d(&inv.x, u), d(&inv.y, u), d(&inv.z, u));
        (0..g.len())
            .map(|k| InvariantsAt {
                w: [w[0][k], w[1][k]],
                x: [x[0][k], x[1][k]],
                y: [y[0][k], y[1][k]],
                z: [z[0][k], z[1][k]],
                ..Default::default()
            })
            .collect::<Vec<_>>()
    };
    (collect(true), collect(false))
}

pub fn ab_functions(inv: &TwistorInvariants, st: Stencil) -> Result<AbFields> {
    let fam = inv.case.families();
    for k in 0..inv.grid.len() {
        for s in 0..fam {
            let value = inv.delta[s][k].norm();
            if value <= inv.threshold(k) {
                return Err(Error::DegenerateDelta { at: inv.grid.location(k), value });
            }
        }
    }
    let (du, dv) = invariant_derivatives(inv, st);
    let mut a = [vec![ZERO; inv.grid.len()], vec![ZERO; inv.grid.len()]];
    let mut b = a.clone();
    for k in 0..inv.grid.len() {
        let (pa, pb) = ab_at(inv.case, &inv.at(k), &du[k], &dv[k])
            .ok_or(Error::DegenerateDelta { at: inv.grid.location(k), value: 0.0 })?;
        for s in 0..2 {
            a[s][k] = pa[s];
            b[s][k] = pb[s];
        }
    }
    Ok(AbFields { a, b })
}

/// Θ₂ and Θ₃ components of ∇̂_{∂̄}Θ₁ with ∂̄ = (∂_u + √−1 ∂_v)/2.
pub fn delbar_at(v: &InvariantsAt) -> (C64, C64) {
    ((v.w[0] + v.z[0]) * 0.5, -I * (v.x[0] + v.y[0]) * 0.5)
}

pub fn delbar_residual(data: &FundamentalData) -> Result<Vec<(C64, C64)>> {
    if data.case() != SurfaceCase::LorSpace {
        return Err(Error::WrongCase {
            expected: SurfaceCase::LorSpace.to_string(),
            got: data.case().to_string(),
        });
    }
    let case = data.case();
    Ok(fd::map_points(&data.grid, |i, j| {
        let k = data.grid.idx(i, j);
        let c = Coeffs {
            a: [data.alpha[0][k], data.alpha[1][k], data.alpha[2][k]],
            b: [data.beta[0][k], data.beta[1][k], data.beta[2][k]],
            ..Default::default()
        };
        delbar_at(&invariants_at(case, &c))
    }))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum DependenceBranch {
    /// α₁ + α₃ = 0.
    ZeroMeanCurvature,
    /// α₁ = α₃ and α₂ = 0.
    PVanishes,
    Both,
    Unclassified,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Dependence {
    pub dependent: bool,
    /// α₁ = β₃, α₂ = −β₂, α₃ = β₁ within tolerance.
    pub delbar_vanishing: bool,
    pub branch: Option<DependenceBranch>,
}

pub fn dependence_at(a: [f64; 3], b: [f64; 3], tol: f64) -> Dependence {
    let minors = [a[0] * b[1] - a[1] * b[0], a[0] * b[2] - a[2] * b[0], a[1] * b[2] - a[2] * b[1]];
    let na = a.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let nb = b.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let dependent = minors.iter().all(|m| m.abs() <= tol * (na * nb).max(1.0));
    let scale = na.max(nb).max(1.0) * tol;
    let delbar_vanishing =
        (a[0] - b[2]).abs() <= scale && (a[1] + b[1]).abs() <= scale && (a[2] - b[0]).abs() <= scale;
    let branch = if dependent && delbar_vanishing {
        let zero_mean = (a[0] + a[2]).abs() <= scale;
        let p_zero = (a[0] - a[2]).abs() <= scale && a[1].abs() <= scale;
        Some(match (zero_mean, p_zero) {
            (true, true) => DependenceBranch::Both,
            (true, false) => DependenceBranch::ZeroMeanCurvature,
            (false, true) => DependenceBranch::PVanishes,
            (false, false) => DependenceBranch::Unclassified,
        })
    } else {
        None
    };
    Dependence { dependent, delbar_vanishing, branch }
}

pub fn linear_dependence_check(data: &FundamentalData, tol: f64) -> Vec<Dependence> {
    fd::map_points(&data.grid, |i, j| {
        let k = data.grid.idx(i, j);
        dependence_at(
            [data.alpha[0][k], data.alpha[1][k], data.alpha[2][k]],
            [data.beta[0][k], data.beta[1][k], data.beta[2][k]],
            tol,
        )
    })
}

/// ω̂ from a 4×4 connection form (ω[(i, j)] = ω^{i+1}_{j+1}).
pub fn so3c_connection_form(omega: &Matrix4<f64>, tol: f64) -> Result<Matrix3<C64>> {
    let w = |i: usize, j: usize| omega[(i - 1, j - 1)];
    let mut res: f64 = w(4, 4).abs();
    for k in 1..=3 {
        for l in 1..=3 {
            res = res.max((w(k, l) + w(l, k)).abs());
        }
        res = res.max((w(k, 4) - w(4, k)).abs());
    }
    if res > tol {
        return Err(Error::SymmetryViolated { residual: res });
    }
    let c = |a: f64, b: f64| C64::new(a, b);
    let e12 = c(-w(3, 2), w(4, 1));
    let e13 = c(w(3, 1), w(4, 2));
    let e23 = c(-w(2, 1), w(4, 3));
    Ok(m3([[ZERO, e12, e13], [-e12, ZERO, e23], [-e13, -e23, ZERO]]))
}
