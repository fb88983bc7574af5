//! Residuals of the Gauss, Codazzi and Ricci equations, of the zero-curvature
//! condition S_v − T_u = ST − TS, and of the W/X/Y/Z form of the system.

use crate::fd::{self, Stencil};
use crate::error::Location;
use crate::spaceform::{assemble, FundamentalData, Grid, PointJet, SurfaceCase};
use crate::twistor::invariants_at;
use nalgebra::Matrix5;
use num_complex::Complex64 as C64;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct Gcr {
    pub gauss: f64,
    pub codazzi: [f64; 4],
    pub ricci: f64,
}

impl Gcr {
    pub fn max_abs(&self) -> f64 {
        self.codazzi
            .iter()
            .fold(self.gauss.abs().max(self.ricci.abs()), |m, x| m.max(x.abs()))
    }
}

/// LHS − RHS of each equation at one point.
pub fn gcr_at(case: SurfaceCase, l0: f64, p: &PointJet) -> Gcr {
    let (lu, lv) = (p.val.lu, p.val.lv);
    let [a1, a2, a3] = p.val.a;
    let [b1, b2, b3] = p.val.b;
    let [m1, m2] = p.val.m;
    let (au, av) = (p.du.a, p.dv.a);
    let (bu, bv) = (p.du.b, p.dv.b);
    let le = l0 * p.val.e2l;
    let cz = [av[0] - au[1], av[1] - au[2], bv[0] - bu[1], bv[1] - bu[2]];
    let rl = p.dv.m[0] - p.du.m[1];
    let lap = p.luu() + p.lvv();
    let wave = p.luu() - p.lvv();
    let (g, c, r) = match case {
        SurfaceCase::Riem | SurfaceCase::NeutSpace => {
            let sg = if case == SurfaceCase::Riem { 1.0 } else { -1.0 };
            (
                lap + le - sg * (-a1 * a3 - b1 * b3 + a2 * a2 + b2 * b2),
                [
                    a2 * lu + a3 * lv - b2 * m1 + b1 * m2,
                    -a1 * lu - a2 * lv - b3 * m1 + b2 * m2,
                    b2 * lu + b3 * lv + a2 * m1 - a1 * m2,
                    -b1 * lu - b2 * lv + a3 * m1 - a2 * m2,
                ],
                sg * (a1 * b2 - a2 * b1 + a2 * b3 - a3 * b2),
            )
        }
        SurfaceCase::NeutTime => (
            wave + le - (a1 * a3 - b1 * b3 - a2 * a2 + b2 * b2),
            [
                a2 * lu - a3 * lv + b2 * m1 - b1 * m2,
                a1 * lu - a2 * lv + b3 * m1 - b2 * m2,
                b2 * lu - b3 * lv + a2 * m1 - a1 * m2,
                b1 * lu - b2 * lv + a3 * m1 - a2 * m2,
            ],
            a1 * b2 - a2 * b1 - a2 * b3 + a3 * b2,
        ),
        SurfaceCase::LorSpace => (
            lap + le - (-a1 * a3 + b1 * b3 + a2 * a2 - b2 * b2),
            [
                a2 * lu + a3 * lv + b2 * m1 - b1 * m2,
                -a1 * lu - a2 * lv + b3 * m1 - b2 * m2,
                b2 * lu + b3 * lv + a2 * m1 - a1 * m2,
                -b1 * lu - b2 * lv + a3 * m1 - a2 * m2,
            ],
            a1 * b2 - a2 * b1 + a2 * b3 - a3 * b2,
        ),
        SurfaceCase::LorTime => (
            wave + le - (a1 * a3 + b1 * b3 - a2 * a2 - b2 * b2),
            [
                a2 * lu - a3 * lv - b2 * m1 + b1 * m2,
                a1 * lu - a2 * lv - b3 * m1 + b2 * m2,
                b2 * lu - b3 * lv + a2 * m1 - a1 * m2,
                b1 * lu - b2 * lv + a3 * m1 - a2 * m2,
            ],
            a1 * b2 - a2 * b1 - a2 * b3 + a3 * b2,
        ),
    };
    Gcr {
        gauss: g,
        codazzi: [cz[0] - c[0], cz[1] - c[1], cz[2] - c[2], cz[3] - c[3]],
        ricci: rl - r,
    }
}

/// S_v − T_u − (ST − TS) at one point, derivatives by the chain rule.
pub fn lax_at(case: SurfaceCase, l0: f64, p: &PointJet) -> Matrix5<f64> {
    let st = assemble(case, l0, &p.val, 1.0);
    let sv = assemble(case, l0, &p.dv, 0.0).s;
    let tu = assemble(case, l0, &p.du, 0.0).t;
    sv - tu - (st.s * st.t - st.t * st.s)
}

pub fn gcr_residuals(data: &FundamentalData, st: Stencil) -> Vec<Gcr> {
    let jets = data.jets(st);
    let (case, l0) = (data.case(), data.model.l0);
    fd::map_points(&data.grid, |i, j| gcr_at(case, l0, &jets.at(data, data.grid.idx(i, j))))
}

/// Max-entry norm of the Lax residual at every point.
pub fn lax_residual(data: &FundamentalData, st: Stencil) -> Vec<f64> {
    let jets = data.jets(st);
    let (case, l0) = (data.case(), data.model.l0);
    fd::map_points(&data.grid, |i, j| {
        lax_at(case, l0, &jets.at(data, data.grid.idx(i, j))).amax()
    })
}

/// Residuals of the W/X/Y/Z form, per slot: (gauss-ricci, first codazzi, second codazzi).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct WxyzResidual {
    pub gr: [C64; 2],
    pub ca: [C64; 2],
    pub cb: [C64; 2],
}

pub fn wxyz_at(case: SurfaceCase, l0: f64, p: &PointJet) -> WxyzResidual {
    let v = invariants_at(case, &p.val);
    let vu = invariants_at(case, &p.du);
    let vv = invariants_at(case, &p.dv);
    let le = C64::new(l0 * p.val.e2l, 0.0);
    let i = C64::new(0.0, 1.0);
    let mut r = WxyzResidual::default();
    match case {
        SurfaceCase::Riem | SurfaceCase::NeutSpace | SurfaceCase::NeutTime => {
            for k in 0..2 {
                let s = if k == 0 { 1.0 } else { -1.0 };
                let o = 1 - k;
                if case == SurfaceCase::NeutTime {
                    r.gr[k] = v.w[k] * v.x[k] - v.y[k] * v.z[k] + le + vu.phi[k] - vv.psi[k];
                    r.ca[k] = vv.y[k] - s * vu.x[k] - (s * v.w[k] * v.phi[k] - v.z[k] * v.psi[k]);
                    r.cb[k] = vv.w[k] - s * vu.z[k] - (s * v.y[k] * v.phi[k] - v.x[k] * v.psi[k]);
                } else {
                    let quad = v.w[o] * v.x[k] + v.y[k] * v.z[o];
                    let deriv = vu.phi[k] + vv.psi[o];
                    r.gr[k] = if case == SurfaceCase::Riem {
                        quad - le - deriv
                    } else {
                        quad + le + deriv
                    };
                    r.ca[k] = vv.y[k] - s * vu.x[k] - (s * v.w[o] * v.phi[k] - v.z[o] * v.psi[o]);
                    r.cb[k] = vv.w[o] + s * vu.z[o] - (-s * v.y[k] * v.phi[k] - v.x[k] * v.psi[o]);
                }
            }
        }
        SurfaceCase::LorSpace => {
            let (w, x, y, z, ph, ps) = (v.w[0], v.x[0], v.y[0], v.z[0], v.phi[0], v.psi[0]);
            let gr = w * x - y * z - le - vu.phi[0] - vv.psi[0];
            let ca = vv.y[0] + i * vu.x[0] - (-i * w * ph - z * ps);
            let cb = vv.w[0] + i * vu.z[0] - (-i * y * ph - x * ps);
            r = WxyzResidual { gr: [gr, gr.conj()], ca: [ca, ca.conj()], cb: [cb, cb.conj()] };
        }
        SurfaceCase::LorTime => {
            let (w, x, y, z, ph, ps) = (v.w[0], v.x[0], v.y[0], v.z[0], v.phi[0], v.psi[0]);
            let gr = w * x + y * z + le + vu.phi[0] - vv.psi[0];
            let ca = vv.y[0] + i * vu.x[0] - (-i * w * ph - z * ps);
            let cb = vv.w[0] - i * vu.z[0] - (i * y * ph - x * ps);
            r = WxyzResidual { gr: [gr, gr.conj()], ca: [ca, ca.conj()], cb: [cb, cb.conj()] };
        }
    }
    r
}

/// The W/X/Y/Z residuals predicted from (gauss, codazzi, ricci) residuals by
/// the constant-coefficient relations between the two forms of the system.
pub fn predicted_wxyz(case: SurfaceCase, g: &Gcr) -> WxyzResidual {
    let (gs, r) = (g.gauss, g.ricci);
    let [c1, c2, c3, c4] = g.codazzi;
    let re = |x: f64| C64::new(x, 0.0);
    let cx = |a: f64, b: f64| C64::new(a, b);
    let pair = |z: C64| [z, z.conj()];
    match case {
        SurfaceCase::Riem => WxyzResidual {
            gr: [re(-gs - r), re(-gs + r)],
            ca: [re(c1 + c4), re(-c1 + c4)],
            cb: [re(c2 - c3), re(c2 + c3)],
        },
        SurfaceCase::NeutSpace => WxyzResidual {
            gr: [re(gs + r), re(gs - r)],
            ca: [re(c1 + c4), re(-c1 + c4)],
            cb: [re(c2 - c3), re(c2 + c3)],
        },
        SurfaceCase::NeutTime => WxyzResidual {
            gr: [re(gs + r), re(gs - r)],
            ca: [re(c1 + c4), re(-c1 + c4)],
            cb: [re(c2 + c3), re(c2 - c3)],
        },
        SurfaceCase::LorSpace => WxyzResidual {
            gr: pair(cx(-gs, -r)),
            ca: pair(cx(c4, -c1)),
            cb: pair(cx(c2, -c3)),
        },
        SurfaceCase::LorTime => WxyzResidual {
            gr: pair(cx(gs, r)),
            ca: pair(cx(c4, -c1)),
            cb: pair(cx(c2, c3)),
        },
    }
}

/// Six real combination residuals at one point: the W/X/Y/Z residuals minus
/// their prediction. Real cases list (gr₊, gr₋, ca₊, ca₋, cb₊, cb₋); Lorentzian
/// cases list (Re gr, Im gr, Re ca, Im ca, Re cb, Im cb).
pub fn equivalence_at(case: SurfaceCase, l0: f64, p: &PointJet) -> [f64; 6] {
    let got = wxyz_at(case, l0, p);
    let want = predicted_wxyz(case, &gcr_at(case, l0, p));
    let d = |a: [C64; 2], b: [C64; 2]| [a[0] - b[0], a[1] - b[1]];
    let (gr, ca, cb) = (d(got.gr, want.gr), d(got.ca, want.ca), d(got.cb, want.cb));
    if case.is_lorentzian() {
        [gr[0].re, gr[0].im, ca[0].re, ca[0].im, cb[0].re, cb[0].im]
    } else {
        [gr[0].re, gr[1].re, ca[0].re, ca[1].re, cb[0].re, cb[1].re]
    }
}

pub fn equivalence_check(data: &FundamentalData, st: Stencil) -> Vec<[f64; 6]> {
    let jets = data.jets(st);
    let (case, l0) = (data.case(), data.model.l0);
    fd::map_points(&data.grid, |i, j| equivalence_at(case, l0, &jets.at(data, data.grid.idx(i, j))))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResidualSummary {
    pub max: f64,
    pub mean: f64,
    pub argmax_i: usize,
    pub argmax_j: usize,
    pub argmax_u: f64,
    pub argmax_v: f64,
}

impl ResidualSummary {
    /// Statistics of |values| in storage order.
    pub fn of(grid: &Grid, values: &[f64]) -> Self {
        let mut max = -1.0;
        let mut arg = 0;
        let mut sum = 0.0;
        for (k, v) in values.iter().enumerate() {
            let a = v.abs();
            sum += a;
            if a > max {
                max = a;
                arg = k;
            }
        }
        let Location { i, j, u, v } = grid.location(arg);
        Self {
            max: max.max(0.0),
            mean: sum / values.len().max(1) as f64,
            argmax_i: i,
            argmax_j: j,
            argmax_u: u,
            argmax_v: v,
        }
    }
}
