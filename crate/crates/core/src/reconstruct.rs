//! Frame integration from fundamental data and the inverse constructions:
//! data from W, X, Y, Z (flat and curved ambient space) and the ∂̄-family.

use crate::error::{Error, Result};
use crate::fd::{self, Stencil};
use crate::geomcore::frame_inner;
use crate::integrability::gcr_residuals;
use crate::spaceform::{ambient_model, assemble, Coeffs, Frame, FundamentalData, Grid, SpaceFormModel, SurfaceCase, validate_frame};
use crate::twistor::{ab_functions, AbFields, TwistorInvariants};
use nalgebra::Matrix5;
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::Serialize;
use std::str::FromStr;

/// Default tolerance for residuals evaluated on a grid of spacing h.
pub fn default_tolerance(grid: &Grid) -> f64 {
    let h = grid.h();
    (10.0 * h * h).max(1e-8)
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrameField {
    pub model: SpaceFormModel,
    pub grid: Grid,
    pub frames: Vec<Frame>,
}

impl FrameField {
    pub fn dim(&self) -> usize {
        self.model.ambient.dim()
    }

    /// Ambient coordinates of column `c` (0..5 = T1, T2, N1, N2, F) at point `k`.
    pub fn column(&self, k: usize, c: usize) -> Vec<f64> {
        (0..self.dim()).map(|r| self.frames[k][(r, c)]).collect()
    }

    pub fn positions(&self) -> Vec<Vec<f64>> {
        (0..self.grid.len()).map(|k| self.column(k, 4)).collect()
    }

    /// λ read off ⟨T1, T1⟩ = e^{2λ}.
    pub fn lambda_at(&self, k: usize) -> Result<f64> {
        let e2l = frame_inner(&self.frames[k], 0, 0, &self.model.ambient);
        if !(e2l > 1e-12) || !e2l.is_finite() {
            return Err(Error::DegenerateFrame { at: self.grid.location(k), value: e2l });
        }
        Ok(0.5 * e2l.ln())
    }

    /// Largest normalization residual, each scaled by max(1, e^{2λ}).
    pub fn constraint_residual(&self, lambda: &[f64]) -> f64 {
        (0..self.grid.len())
            .into_par_iter()
            .map(|k| {
                let r = validate_frame(&self.frames[k], lambda[k], &self.model).max_abs();
                r / (2.0 * lambda[k]).exp().max(1.0)
            })
            .reduce(|| 0.0, f64::max)
    }
}

/// Initial frame at the grid origin: each column goes to the first unused
/// ambient basis vector of the matching sign. Tangent and normal columns
/// have length e^{λ0}; F has ⟨F,F⟩ = 1/L0, or is the origin when L0 = 0.
pub fn canonical_initial_frame(model: &SpaceFormModel, lambda0: f64) -> Frame {
    let sig = &model.ambient;
    let mut used = vec![false; sig.dim()];
    let mut frame = Frame::zeros();
    let mut take = |sign: f64| {
        let b = (0..sig.dim())
            .find(|&b| !used[b] && sig.entry(b) == sign)
            .expect("ambient signature admits the frame");
        used[b] = true;
        b
    };
    let e = lambda0.exp();
    for (c, s) in model.case.frame_signs().iter().enumerate() {
        frame[(take(*s), c)] = e;
    }
    if model.l0 != 0.0 {
        let b = take(model.l0.signum());
        frame[(b, 4)] = 1.0 / model.l0.abs().sqrt();
    }
    frame
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegrationOptions {
    /// Also integrate along the transposed path and report the discrepancy.
    pub transposed_check: bool,
    /// Project onto the frame constraints every k steps.
    pub project_every: Option<usize>,
    /// Accepted normalization residual of the initial frame (scaled).
    pub init_tol: f64,
}

impl Default for IntegrationOptions {
    fn default() -> Self {
        Self { transposed_check: false, project_every: None, init_tol: 1e-9 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IntegrationReport {
    /// Max entry difference between the stored last row and its re-integration by S.
    pub cross_consistency: f64,
    pub transposed_discrepancy: Option<f64>,
    /// Max normalization residual over the grid, scaled by max(1, e^{2λ}).
    pub constraint_drift: f64,
    /// Max GCR residual of the input (fourth-order differences).
    pub gcr_max: f64,
    pub gcr_warning: bool,
    /// Cross-consistency above 100·h².
    pub non_integrable: bool,
}

/// Midpoint value of a tabulated matrix function on interval [k, k+1].
fn midpoint(ms: &[Matrix5<f64>], k: usize) -> Matrix5<f64> {
    let n = ms.len();
    match n {
        2 => (ms[0] + ms[1]) * 0.5,
        3 if k == 0 => (ms[0] * 3.0 + ms[1] * 6.0 - ms[2]) / 8.0,
        3 => (ms[2] * 3.0 + ms[1] * 6.0 - ms[0]) / 8.0,
        _ if k == 0 => (ms[0] * 5.0 + ms[1] * 15.0 - ms[2] * 5.0 + ms[3]) / 16.0,
        _ if k == n - 2 => (ms[n - 1] * 5.0 + ms[n - 2] * 15.0 - ms[n - 3] * 5.0 + ms[n - 4]) / 16.0,
        _ => (ms[k] * 9.0 + ms[k + 1] * 9.0 - ms[k - 1] - ms[k + 2]) / 16.0,
    }
}

fn rk4(x: &Frame, m0: &Matrix5<f64>, mh: &Matrix5<f64>, m1: &Matrix5<f64>, h: f64) -> Frame {
    let k1 = x * m0;
    let k2 = (x + k1 * (0.5 * h)) * mh;
    let k3 = (x + k2 * (0.5 * h)) * mh;
    let k4 = (x + k3 * h) * m1;
    x + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0)
}

/// Pseudo-Gram–Schmidt back onto the constraint set.
fn project(frame: &Frame, lambda: f64, model: &SpaceFormModel) -> Frame {
    let sig = &model.ambient;
    let dim = sig.dim();
    let ip = |a: &Frame, i: usize, b: &Frame, j: usize| (0..dim).map(|r| sig.entry(r) * a[(r, i)] * b[(r, j)]).sum::<f64>();
    let mut out = *frame;
    let signs = model.case.frame_signs();
    let e2l = (2.0 * lambda).exp();
    let mut basis: Vec<(usize, f64)> = Vec::new();
    if model.l0 != 0.0 {
        let n = ip(&out, 4, &out, 4);
        if n * model.l0 > 0.0 {
            let s = (1.0 / (model.l0 * n)).sqrt();
            for r in 0..dim {
                out[(r, 4)] *= s;
            }
        }
        basis.push((4, 1.0 / model.l0));
    }
    for c in 0..4 {
        for &(d, nd) in &basis {
            let p = ip(&out, c, &out, d) / nd;
            for r in 0..dim {
                out[(r, c)] -= p * out[(r, d)];
            }
        }
        let n = ip(&out, c, &out, c);
        if n * signs[c] > 0.0 {
            let s = (signs[c] * e2l / n).sqrt();
            for r in 0..dim {
                out[(r, c)] *= s;
            }
        }
        basis.push((c, signs[c] * e2l));
    }
    out
}

struct Sweeper<'a> {
    model: &'a SpaceFormModel,
    lambda: &'a [f64],
    project_every: Option<usize>,
}

impl Sweeper<'_> {
    /// Integrates X' = X·M along a line of nodes; `ids` are storage indices.
    fn sweep(&self, start: Frame, ms: &[Matrix5<f64>], ids: &[usize], h: f64, grid: &Grid) -> Result<Vec<Frame>> {
        let mut out = Vec::with_capacity(ms.len());
        out.push(start);
        let mut x = start;
        for k in 0..ms.len() - 1 {
            x = rk4(&x, &ms[k], &midpoint(ms, k), &ms[k + 1], h);
            if let Some(every) = self.project_every {
                if every > 0 && (k + 1) % every == 0 {
                    x = project(&x, self.lambda[ids[k + 1]], self.model);
                }
            }
            if x.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFiniteState { at: grid.location(ids[k + 1]) });
            }
            out.push(x);
        }
        Ok(out)
    }
}

fn max_diff(a: &Frame, b: &Frame) -> f64 {
    (a - b).amax()
}

/// Integrates the frame equations: a u-sweep along the first row with S,
/// then a v-sweep with T along every column.
pub fn integrate_frame(data: &FundamentalData, init: &Frame, opts: &IntegrationOptions) -> Result<(FrameField, IntegrationReport)> {
    let g = data.grid;
    let model = &data.model;
    let r0 = validate_frame(init, data.lambda[0], model).max_abs() / (2.0 * data.lambda[0]).exp().max(1.0);
    if !(r0 <= opts.init_tol) {
        return Err(Error::InvalidInitialFrame { residual: r0 });
    }
    let st = Stencil::Fourth;
    let lu = fd::du(&g, &data.lambda, st);
    let lv = fd::dv(&g, &data.lambda, st);
    let pairs: Vec<_> = fd::map_points(&g, |i, j| {
        let k = g.idx(i, j);
        let c = Coeffs {
            lu: lu[k],
            lv: lv[k],
            e2l: (2.0 * data.lambda[k]).exp(),
            a: [data.alpha[0][k], data.alpha[1][k], data.alpha[2][k]],
            b: [data.beta[0][k], data.beta[1][k], data.beta[2][k]],
            m: [data.mu[0][k], data.mu[1][k]],
        };
        assemble(data.case(), model.l0, &c, 1.0)
    });
    let sw = Sweeper { model, lambda: &data.lambda, project_every: opts.project_every };
    let row = |j: usize| -> (Vec<Matrix5<f64>>, Vec<usize>) {
        let ids: Vec<usize> = (0..g.nu).map(|i| g.idx(i, j)).collect();
        (ids.iter().map(|&k| pairs[k].s).collect(), ids)
    };
    let col = |i: usize| -> (Vec<Matrix5<f64>>, Vec<usize>) {
        let ids: Vec<usize> = (0..g.nv).map(|j| g.idx(i, j)).collect();
        (ids.iter().map(|&k| pairs[k].t).collect(), ids)
    };

    let (ms, ids) = row(0);
    let first_row = sw.sweep(*init, &ms, &ids, g.du, &g)?;
    let columns: Vec<Vec<Frame>> = (0..g.nu)
        .into_par_iter()
        .map(|i| {
            let (ms, ids) = col(i);
            sw.sweep(first_row[i], &ms, &ids, g.dv, &g)
        })
        .collect::<Result<_>>()?;
    let frames: Vec<Frame> = columns.into_iter().flatten().collect();

    let last = g.nv - 1;
    let (ms, ids) = row(last);
    let again = sw.sweep(frames[g.idx(0, last)], &ms, &ids, g.du, &g)?;
    let cross_consistency = ids.iter().zip(&again).map(|(&k, f)| max_diff(&frames[k], f)).fold(0.0, f64::max);

    let transposed_discrepancy = if opts.transposed_check {
        let (ms, ids) = col(0);
        let first_col = sw.sweep(*init, &ms, &ids, g.dv, &g)?;
        let worst = (0..g.nv)
            .into_par_iter()
            .map(|j| {
                let (ms, ids) = row(j);
                let line = sw.sweep(first_col[j], &ms, &ids, g.du, &g)?;
                Ok(ids.iter().zip(&line).map(|(&k, f)| max_diff(&frames[k], f)).fold(0.0, f64::max))
            })
            .collect::<Result<Vec<f64>>>()?;
        Some(worst.into_iter().fold(0.0, f64::max))
    } else {
        None
    };

    let field = FrameField { model: model.clone(), grid: g, frames };
    let constraint_drift = field.constraint_residual(&data.lambda);
    let gcr_max = gcr_residuals(data, st).iter().map(|r| r.max_abs()).fold(0.0, f64::max);
    let h = g.h();
    let report = IntegrationReport {
        cross_consistency,
        transposed_discrepancy,
        constraint_drift,
        gcr_max,
        gcr_warning: gcr_max > default_tolerance(&g),
        non_integrable: cross_consistency > 100.0 * h * h,
    };
    Ok((field, report))
}

/// Derivative of every frame entry along u (`along_u`) or v.
fn frame_derivative(field: &FrameField, along_u: bool) -> Vec<Frame> {
    let g = &field.grid;
    let st = Stencil::Fourth;
    fd::map_points(g, |i, j| {
        Frame::from_fn(|r, c| {
            if along_u {
                fd::d1_at(|m| field.frames[g.idx(m, j)][(r, c)], g.nu, i, g.du, st)
            } else {
                fd::d1_at(|m| field.frames[g.idx(i, m)][(r, c)], g.nv, j, g.dv, st)
            }
        })
    })
}

/// Recovers λ, α, β, μ from a frame field by projecting derivatives of
/// the columns back onto the frame.
pub fn extract_fundamental(field: &FrameField) -> Result<FundamentalData> {
    let g = field.grid;
    let sig = &field.model.ambient;
    let signs = field.model.case.frame_signs();
    let lambda = (0..g.len()).map(|k| field.lambda_at(k)).collect::<Result<Vec<f64>>>()?;
    let fu = frame_derivative(field, true);
    let fv = frame_derivative(field, false);
    let dim = sig.dim();
    // ⟨E_r, ∂E_c⟩ / (s_r e^{2λ})
    let coef = |k: usize, d: &Frame, r: usize, c: usize| {
        let x = &field.frames[k];
        let ip: f64 = (0..dim).map(|m| sig.entry(m) * x[(m, r)] * d[(m, c)]).sum();
        ip / (signs[r] * (2.0 * lambda[k]).exp())
    };
    let n = g.len();
    let mut fields: [Vec<f64>; 9] = std::array::from_fn(|_| vec![0.0; n]);
    for k in 0..n {
        let (u, v) = (&fu[k], &fv[k]);
        let vals = [
            lambda[k],
            coef(k, u, 2, 0),
            coef(k, u, 2, 1),
            coef(k, v, 2, 1),
            coef(k, u, 3, 0),
            coef(k, u, 3, 1),
            coef(k, v, 3, 1),
            coef(k, u, 3, 2),
            coef(k, v, 3, 2),
        ];
        for (f, x) in fields.iter_mut().zip(vals) {
            f[k] = x;
        }
    }
    FundamentalData::from_fields(field.model.clone(), g, fields)
}

/// Integrates λ_u = P, λ_v = Q by the trapezoid rule along the first row and
/// then up each column, with λ(u0, v0) = 0.
pub fn integrate_potential(grid: &Grid, p: &[f64], q: &[f64], tol: f64) -> Result<Vec<f64>> {
    for f in [p, q] {
        if f.len() != grid.len() {
            return Err(Error::DimensionMismatch { expected: grid.len(), got: f.len() });
        }
    }
    let pv = fd::dv(grid, p, Stencil::Second);
    let qu = fd::du(grid, q, Stencil::Second);
    let (worst, at) = pv.iter().zip(&qu).enumerate().fold((0.0, 0), |m, (k, (a, b))| {
        let r = (a - b).abs();
        if r > m.0 { (r, k) } else { m }
    });
    if worst > tol {
        return Err(Error::IncompatiblePair { at: grid.location(at), residual: worst });
    }
    let mut out = vec![0.0; grid.len()];
    for i in 1..grid.nu {
        let (a, b) = (grid.idx(i - 1, 0), grid.idx(i, 0));
        out[b] = out[a] + 0.5 * grid.du * (p[a] + p[b]);
    }
    for i in 0..grid.nu {
        for j in 1..grid.nv {
            let (a, b) = (grid.idx(i, j - 1), grid.idx(i, j));
            out[b] = out[a] + 0.5 * grid.dv * (q[a] + q[b]);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstructOptions {
    /// Tolerance on the differential hypotheses; `None` means max(1e−8, 10·h²).
    pub tol: Option<f64>,
    /// Tolerance on the algebraic W/X/Y/Z identities, relative to the field size.
    pub identity_tol: f64,
    pub stencil: Stencil,
    /// Differential hypotheses are checked on nodes at least this far from
    /// the boundary, where nested one-sided differences lose accuracy.
    pub margin: usize,
}

impl Default for ConstructOptions {
    fn default() -> Self {
        Self { tol: None, identity_tol: 1e-9, stencil: Stencil::Fourth, margin: 2 }
    }
}

impl ConstructOptions {
    fn tol(&self, grid: &Grid) -> f64 {
        self.tol.unwrap_or_else(|| default_tolerance(grid))
    }
}

fn worst(values: impl Iterator<Item = f64>) -> (f64, usize) {
    values.enumerate().fold((0.0, 0), |m, (k, r)| if r > m.0 || r.is_nan() { (r, k) } else { m })
}

fn check(grid: &Grid, hypothesis: &str, tol: f64, margin: usize, values: impl Iterator<Item = f64>) -> Result<()> {
    let inside = |k: usize| {
        let (i, j) = (k / grid.nv, k % grid.nv);
        let m = margin.min((grid.nu.min(grid.nv) - 1) / 2);
        i >= m && j >= m && i + m < grid.nu && j + m < grid.nv
    };
    let (r, k) = worst(values.enumerate().map(|(k, r)| if inside(k) { r } else { 0.0 }));
    if r > tol || r.is_nan() {
        return Err(Error::HypothesisViolated { hypothesis: hypothesis.into(), at: grid.location(k), residual: r });
    }
    Ok(())
}

fn supported(case: SurfaceCase) -> Result<()> {
    match case {
        SurfaceCase::Riem | SurfaceCase::LorSpace => Ok(()),
        c => Err(Error::UnsupportedCase(c.tag().into())),
    }
}

/// Checks the algebraic identities and returns A, B.
fn prepare(inv: &TwistorInvariants, opts: &ConstructOptions) -> Result<AbFields> {
    supported(inv.case)?;
    let scale = inv
        .w
        .iter()
        .chain(&inv.x)
        .chain(&inv.y)
        .chain(&inv.z)
        .flat_map(|f| f.iter().map(|z| z.norm()))
        .fold(1.0, f64::max);
    let (r, k) = inv.identity_residual();
    if r > opts.identity_tol * scale {
        return Err(Error::HypothesisViolated {
            hypothesis: "W+ + W- = X+ + X-, Y+ + Y- = Z+ + Z-".into(),
            at: inv.grid.location(k),
            residual: r,
        });
    }
    ab_functions(inv, opts.stencil)
}

/// (A+ + A−)_v = (B+ + B−)_u, or its Lorentzian form.
fn check_compatibility(inv: &TwistorInvariants, ab: &AbFields, opts: &ConstructOptions) -> Result<()> {
    let g = &inv.grid;
    let sa: Vec<C64> = (0..g.len()).map(|k| ab.a[0][k] + ab.a[1][k]).collect();
    let sb: Vec<C64> = (0..g.len()).map(|k| ab.b[0][k] + ab.b[1][k]).collect();
    let av = fd::dv_c(g, &sa, opts.stencil);
    let bu = fd::du_c(g, &sb, opts.stencil);
    check(g, "(A+ + A-)_v = (B+ + B-)_u", opts.tol(g), opts.margin, av.iter().zip(&bu).map(|(a, b)| (a - b).norm()))
}

/// α, β, μ and the λ-gradient from invariants and A, B.
fn remaining_fields(inv: &TwistorInvariants, ab: &AbFields) -> ([Vec<f64>; 8], Vec<f64>, Vec<f64>) {
    let n = inv.grid.len();
    let mut f: [Vec<f64>; 8] = std::array::from_fn(|_| vec![0.0; n]);
    let mut lu = vec![0.0; n];
    let mut lv = vec![0.0; n];
    for k in 0..n {
        let v = inv.at(k);
        let (a, b) = ([ab.a[0][k], ab.a[1][k]], [ab.b[0][k], ab.b[1][k]]);
        lu[k] = 0.5 * (a[0] + a[1]).re;
        lv[k] = 0.5 * (b[0] + b[1]).re;
        let vals = match inv.case {
            SurfaceCase::LorSpace => [
                -v.y[0].im,
                v.x[0].re,
                v.z[0].im,
                -v.w[0].im,
                v.y[0].re,
                v.x[0].im,
                b[0].im,
                -a[0].im,
            ],
            _ => [
                0.5 * (v.y[0] - v.y[1]).re,
                0.5 * (v.x[0] + v.x[1]).re,
                0.5 * (v.z[0] - v.z[1]).re,
                0.5 * (v.w[0] - v.w[1]).re,
                0.5 * (v.y[0] + v.y[1]).re,
                0.5 * (v.x[0] - v.x[1]).re,
                0.5 * (b[1] - b[0]).re,
                0.5 * (a[1] - a[0]).re,
            ],
        };
        for (fi, x) in f.iter_mut().zip(vals) {
            fi[k] = x;
        }
    }
    (f, lu, lv)
}

fn assemble_data(model: SpaceFormModel, grid: Grid, lambda: Vec<f64>, rest: [Vec<f64>; 8]) -> Result<FundamentalData> {
    let [a1, a2, a3, b1, b2, b3, m1, m2] = rest;
    FundamentalData::from_fields(model, grid, [lambda, a1, a2, a3, b1, b2, b3, m1, m2])
}

/// Fundamental data in flat ambient space (L0 = 0) from W, X, Y, Z.
/// Supported for the Riemannian and Lorentzian space-like cases.
pub fn construct_from_wxyz_flat(inv: &TwistorInvariants, opts: &ConstructOptions) -> Result<FundamentalData> {
    let ab = prepare(inv, opts)?;
    let g = &inv.grid;
    let tol = opts.tol(g);
    let st = opts.stencil;
    let au: [Vec<C64>; 2] = [fd::du_c(g, &ab.a[0], st), fd::du_c(g, &ab.a[1], st)];
    let bv: [Vec<C64>; 2] = [fd::dv_c(g, &ab.b[0], st), fd::dv_c(g, &ab.b[1], st)];
    let hyp = "(A_s)_u + (B_-s)_v = Delta_s";
    match inv.case {
        SurfaceCase::LorSpace => check(g, hyp, tol, opts.margin, (0..g.len()).map(|k| (au[0][k] + bv[0][k] - inv.delta[0][k]).norm()))?,
        _ => {
            for s in 0..2 {
                check(g, hyp, tol, opts.margin, (0..g.len()).map(|k| (au[s][k] + bv[1 - s][k] - inv.delta[s][k]).norm()))?;
            }
        }
    }
    check_compatibility(inv, &ab, opts)?;
    let (rest, lu, lv) = remaining_fields(inv, &ab);
    let lambda = integrate_potential(g, &lu, &lv, tol.max(1e-6))?;
    assemble_data(ambient_model(inv.case, 0.0), *g, lambda, rest)
}

/// Fundamental data in the space form of curvature L0 ≠ 0 from W, X, Y, Z,
/// with λ = ½ log(f/L0) (up to discretization error). Supported for the Riemannian and Lorentzian
/// space-like cases.
pub fn construct_from_wxyz_curved(inv: &TwistorInvariants, l0: f64, opts: &ConstructOptions) -> Result<FundamentalData> {
    if l0 == 0.0 || !l0.is_finite() {
        return Err(Error::Parse("curved construction needs a nonzero finite L0".into()));
    }
    let g = &inv.grid;
    supported(inv.case)?;
    if let Some(k) = (0..g.len()).find(|&k| inv.delta[0][k].norm() <= crate::twistor::DELTA_THRESHOLD) {
        return Err(Error::HypothesisViolated {
            hypothesis: "f nowhere zero (Delta degenerate)".into(),
            at: g.location(k),
            residual: inv.delta[0][k].norm(),
        });
    }
    let ab = prepare(inv, opts)?;
    let tol = opts.tol(g);
    let st = opts.stencil;
    let au: [Vec<C64>; 2] = [fd::du_c(g, &ab.a[0], st), fd::du_c(g, &ab.a[1], st)];
    let bv: [Vec<C64>; 2] = [fd::dv_c(g, &ab.b[0], st), fd::dv_c(g, &ab.b[1], st)];
    let lor = inv.case == SurfaceCase::LorSpace;
    // f from the + family; its partner from the − family must agree
    let fc: Vec<C64> = (0..g.len())
        .map(|k| if lor { inv.delta[0][k] - au[0][k] - bv[0][k] } else { inv.delta[0][k] - au[0][k] - bv[1][k] })
        .collect();
    let partner: Vec<C64> = (0..g.len())
        .map(|k| if lor { fc[k].conj() } else { inv.delta[1][k] - au[1][k] - bv[0][k] })
        .collect();
    check(g, "Delta-difference constraint", tol, opts.margin, (0..g.len()).map(|k| (fc[k] - partner[k]).norm()))?;
    let f: Vec<f64> = fc.iter().map(|z| z.re).collect();
    if let Some(k) = (0..g.len()).find(|&k| f[k].abs() <= 1e-300) {
        return Err(Error::HypothesisViolated { hypothesis: "f nowhere zero".into(), at: g.location(k), residual: f[k] });
    }
    if let Some(k) = (0..g.len()).find(|&k| f[k] / l0 <= 0.0) {
        return Err(Error::SignMismatch { at: g.location(k), value: f[k] / l0 });
    }
    let fu = fd::du(g, &f, st);
    let fv = fd::dv(g, &f, st);
    let sa: Vec<f64> = (0..g.len()).map(|k| (ab.a[0][k] + ab.a[1][k]).re).collect();
    let sb: Vec<f64> = (0..g.len()).map(|k| (ab.b[0][k] + ab.b[1][k]).re).collect();
    check(
        g,
        "f_u = f (A+ + A-), f_v = f (B+ + B-)",
        tol,
        opts.margin,
        (0..g.len()).map(|k| ((fu[k] - f[k] * sa[k]).abs().max((fv[k] - f[k] * sb[k]).abs())) / f[k].abs().max(1.0)),
    )?;
    // λ = ½ log(f/L0) carries three nested one-sided differences near the
    // boundary; integrate its gradient ½(A₊+A₋), ½(B₊+B₋) instead and fix
    // the constant against ½ log(f/L0) on the interior.
    let (rest, lu, lv) = remaining_fields(inv, &ab);
    let mut lambda = integrate_potential(g, &lu, &lv, tol.max(1e-6))?;
    let m = opts.margin.min((g.nu.min(g.nv) - 1) / 2);
    let interior: Vec<usize> = (0..g.len())
        .filter(|&k| {
            let (i, j) = (k / g.nv, k % g.nv);
            i >= m && j >= m && i + m < g.nu && j + m < g.nv
        })
        .collect();
    let shift = interior.iter().map(|&k| 0.5 * (f[k] / l0).ln() - lambda[k]).sum::<f64>() / interior.len() as f64;
    lambda.iter_mut().for_each(|x| *x += shift);
    assemble_data(ambient_model(inv.case, l0), *g, lambda, rest)
}

/// A holomorphic function p(w), w = u + √−1·v.
#[derive(Debug, Clone, PartialEq)]
pub enum HolomorphicSpec {
    /// Coefficients c0, c1, … of Σ c_n wⁿ.
    Polynomial(Vec<C64>),
    Constant(C64),
    Identity,
    /// Taylor polynomial of exp of the given degree.
    ExpTruncated(usize),
}

impl HolomorphicSpec {
    pub fn coefficients(&self) -> Vec<C64> {
        match self {
            Self::Polynomial(c) => c.clone(),
            Self::Constant(c) => vec![*c],
            Self::Identity => vec![C64::new(0.0, 0.0), C64::new(1.0, 0.0)],
            Self::ExpTruncated(n) => {
                let mut out = vec![C64::new(1.0, 0.0)];
                for k in 1..=*n {
                    let prev = out[k - 1];
                    out.push(prev / k as f64);
                }
                out
            }
        }
    }

    /// Horner evaluation.
    pub fn eval(&self, w: C64) -> C64 {
        self.coefficients().iter().rev().fold(C64::new(0.0, 0.0), |acc, c| acc * w + c)
    }
}

fn parse_complex(s: &str) -> Result<C64> {
    let s = s.trim();
    C64::from_str(s).map_err(|_| Error::Parse(format!("bad complex number `{s}`")))
}

impl FromStr for HolomorphicSpec {
    type Err = Error;

    /// `w`, `exp:N`, `poly:c0,c1,...` or a constant such as `2` or `1+2i`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "w" || s == "identity" {
            return Ok(Self::Identity);
        }
        if let Some(n) = s.strip_prefix("exp:") {
            let n = n.trim().parse().map_err(|_| Error::Parse(format!("bad exp degree `{n}`")))?;
            return Ok(Self::ExpTruncated(n));
        }
        if let Some(cs) = s.strip_prefix("poly:") {
            let c = cs.split(',').map(parse_complex).collect::<Result<Vec<_>>>()?;
            return Ok(Self::Polynomial(c));
        }
        parse_complex(s).map(Self::Constant)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum LambdaSource {
    Field(Vec<f64>),
    Liouville,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DelbarInput {
    pub grid: Grid,
    pub l0: f64,
    pub lambda: LambdaSource,
    /// γ field; `None` means γ = 0.
    pub gamma: Option<Vec<f64>>,
    pub p: HolomorphicSpec,
    pub r: f64,
    /// Liouville tolerance, relative to max(1, e^{2λ}); default max(1e−8, 10·h²).
    pub liouville_tol: Option<f64>,
}

/// Closed-form solution of λ_uu + λ_vv + L0·e^{2λ} = 0.
pub fn liouville_profile(l0: f64, grid: &Grid) -> Result<Vec<f64>> {
    let rho2 = grid.sample(|u, v| u * u + v * v);
    if l0 == 0.0 {
        return Ok(vec![0.0; grid.len()]);
    }
    if l0 < 0.0 {
        if let Some(k) = rho2.iter().position(|&r| r >= 1.0) {
            return Err(Error::DomainViolation { at: grid.location(k) });
        }
        let c = (-l0).sqrt();
        return Ok(rho2.iter().map(|r| (2.0 / (c * (1.0 - r))).ln()).collect());
    }
    let c = l0.sqrt();
    Ok(rho2.iter().map(|r| (2.0 / (c * (1.0 + r))).ln()).collect())
}

/// Pointwise λ_uu + λ_vv + L0·e^{2λ}.
pub fn liouville_residual(grid: &Grid, lambda: &[f64], l0: f64, st: Stencil) -> Vec<f64> {
    let uu = fd::duu(grid, lambda, st);
    let vv = fd::dvv(grid, lambda, st);
    (0..grid.len()).map(|k| uu[k] + vv[k] + l0 * (2.0 * lambda[k]).exp()).collect()
}

/// W and X of the ∂̄-family at a point.
pub fn delbar_wx(p: C64, r: f64, lambda: f64, gamma: f64) -> (C64, C64) {
    let a = p * (gamma - lambda).exp();
    let b = C64::new(0.0, r * (lambda - gamma).exp());
    ((a + b) * 0.5, (a - b) * 0.5)
}

/// Lorentzian space-like data with ∇̂_∂̄ Θ₁ = 0.
pub fn construct_delbar(input: &DelbarInput) -> Result<FundamentalData> {
    let g = &input.grid;
    let lambda = match &input.lambda {
        LambdaSource::Liouville => liouville_profile(input.l0, g)?,
        LambdaSource::Field(f) => {
            if f.len() != g.len() {
                return Err(Error::DimensionMismatch { expected: g.len(), got: f.len() });
            }
            f.clone()
        }
    };
    let tol = input.liouville_tol.unwrap_or_else(|| default_tolerance(g));
    let res = liouville_residual(g, &lambda, input.l0, Stencil::Fourth);
    let (r, k) = worst(res.iter().zip(&lambda).map(|(x, l)| x.abs() / (2.0 * l).exp().max(1.0)));
    if r > tol || r.is_nan() {
        return Err(Error::LiouvilleViolated { at: g.location(k), residual: r });
    }
    let gamma = match &input.gamma {
        Some(f) if f.len() != g.len() => return Err(Error::DimensionMismatch { expected: g.len(), got: f.len() }),
        Some(f) => f.clone(),
        None => vec![0.0; g.len()],
    };
    let mu1 = fd::du(g, &gamma, Stencil::Fourth);
    let mu2 = fd::dv(g, &gamma, Stencil::Fourth);
    let n = g.len();
    let mut f: [Vec<f64>; 6] = std::array::from_fn(|_| vec![0.0; n]);
    for k in 0..n {
        let loc = g.location(k);
        let w = C64::new(loc.u, loc.v);
        let (wv, xv) = delbar_wx(input.p.eval(w), input.r, lambda[k], gamma[k]);
        let vals = [xv.im, wv.re, -wv.im, -wv.im, -wv.re, xv.im];
        for (fi, x) in f.iter_mut().zip(vals) {
            fi[k] = x;
        }
    }
    let [a1, a2, a3, b1, b2, b3] = f;
    FundamentalData::from_fields(
        ambient_model(SurfaceCase::LorSpace, input.l0),
        *g,
        [lambda, a1, a2, a3, b1, b2, b3, mu1, mu2],
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EpsReport {
    /// max |σ(T′₁,T′₂) − ε σ(T′₁,T′₁)| for ε = 1 and ε = −1.
    pub eps_plus: f64,
    pub eps_minus: f64,
}

impl EpsReport {
    pub fn holds(&self, tol: f64) -> bool {
        self.eps_plus <= tol && self.eps_minus <= tol
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeanCurvatureReport {
    /// (α₁+α₃, β₁+β₃)/(2e^λ) per point.
    pub h: Vec<[f64; 2]>,
    pub max_h: f64,
    pub sigma_lightlike: Vec<bool>,
    pub all_lightlike: bool,
    pub eps_relation: Option<EpsReport>,
}

/// Mean curvature components, lightlike test for σ(T₁,T₁) and σ(T₁,T₂),
/// and, given p, the isotropy relation in the coordinates with
/// (dw′/dw)² = (1 − ε√−1)/2 · p(w).
pub fn mean_curvature_and_isotropy(data: &FundamentalData, p: Option<&HolomorphicSpec>) -> Result<MeanCurvatureReport> {
    if data.case() != SurfaceCase::LorSpace {
        return Err(Error::WrongCase { expected: SurfaceCase::LorSpace.tag().into(), got: data.case().tag().into() });
    }
    let g = &data.grid;
    let n = g.len();
    let (a, b) = (&data.alpha, &data.beta);
    let h: Vec<[f64; 2]> = (0..n)
        .map(|k| {
            let e = 2.0 * data.lambda[k].exp();
            [(a[0][k] + a[2][k]) / e, (b[0][k] + b[2][k]) / e]
        })
        .collect();
    let max_h = h.iter().map(|x| x[0].abs().max(x[1].abs())).fold(0.0, f64::max);
    let null = |x: f64, y: f64| (x * x - y * y).abs() <= 1e-9 * (x * x).max(y * y).max(1.0);
    let sigma_lightlike: Vec<bool> = (0..n).map(|k| null(a[0][k], b[0][k]) && null(a[1][k], b[1][k])).collect();
    let all_lightlike = sigma_lightlike.iter().all(|&x| x);
    let eps_relation = match p {
        None => None,
        Some(p) => {
            let mut worst = [0.0f64; 2];
            for k in 0..n {
                let loc = g.location(k);
                let pw = p.eval(C64::new(loc.u, loc.v));
                if pw.norm() < 1e-12 {
                    return Err(Error::TotallyGeodesicRegion { at: loc });
                }
                for (slot, eps) in [1.0, -1.0].into_iter().enumerate() {
                    let c = 1.0 / (C64::new(0.5, -0.5 * eps) * pw).sqrt();
                    let (ca, cb) = (c.re, c.im);
                    for (s11, s12, s22) in [(a[0][k], a[1][k], a[2][k]), (b[0][k], b[1][k], b[2][k])] {
                        let p11 = ca * ca * s11 + 2.0 * ca * cb * s12 + cb * cb * s22;
                        let p12 = -ca * cb * s11 + (ca * ca - cb * cb) * s12 + ca * cb * s22;
                        worst[slot] = worst[slot].max((p12 - eps * p11).abs());
                    }
                }
            }
            Some(EpsReport { eps_plus: worst[0], eps_minus: worst[1] })
        }
    };
    Ok(MeanCurvatureReport { h, max_h, sigma_lightlike, all_lightlike, eps_relation })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn holomorphic_parsing() {
        let w = C64::new(0.3, -0.7);
        assert_eq!("w".parse::<HolomorphicSpec>().unwrap().eval(w), w);
        assert_eq!("2".parse::<HolomorphicSpec>().unwrap().eval(w), C64::new(2.0, 0.0));
        let p: HolomorphicSpec = "poly:1,0,1".parse().unwrap();
        assert!((p.eval(w) - (w * w + 1.0)).norm() < 1e-15);
        let e: HolomorphicSpec = "exp:20".parse().unwrap();
        assert!((e.eval(w) - w.exp()).norm() < 1e-14);
        assert!("poly:x".parse::<HolomorphicSpec>().is_err());
    }

    #[test]
    fn midpoint_is_exact_on_cubics() {
        let ms: Vec<Matrix5<f64>> = (0..6).map(|k| Matrix5::from_element((k as f64).powi(3) - 2.0 * k as f64)).collect();
        for k in 0..5 {
            let x = k as f64 + 0.5;
            let want = x.powi(3) - 2.0 * x;
            assert!((midpoint(&ms, k)[(0, 0)] - want).abs() < 1e-12);
        }
    }

    #[test]
    fn projection_restores_constraints() {
        for case in SurfaceCase::ALL {
            for l0 in [-1.0, 0.0, 2.0] {
                let m = ambient_model(case, l0);
                let mut f = canonical_initial_frame(&m, 0.3);
                assert!(validate_frame(&f, 0.3, &m).max_abs() < 1e-14);
                f[(0, 1)] += 1e-3;
                f[(1, 2)] -= 2e-3;
                let p = project(&f, 0.3, &m);
                assert!(validate_frame(&p, 0.3, &m).max_abs() < 1e-12, "{case} {l0}");
            }
        }
    }
}
