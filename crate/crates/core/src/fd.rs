//! Finite differences on the rectangular grid.
//!
//! `Stencil::Second` is the default everywhere residuals are reported.
//! `Stencil::Fourth` is used inside the constructions and the frame
//! integrator, where derivatives are chained.

use crate::spaceform::Grid;
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Stencil {
    #[default]
    Second,
    Fourth,
}

impl Stencil {
    /// Fourth-order stencils need six points for the boundary second derivative.
    fn effective(self, n: usize) -> Stencil {
        match self {
            Stencil::Fourth if n >= 6 => Stencil::Fourth,
            _ => Stencil::Second,
        }
    }
}

/// First derivative at node `k` of a line of `n` samples.
pub fn d1_at(f: impl Fn(usize) -> f64, n: usize, k: usize, h: f64, st: Stencil) -> f64 {
    match st.effective(n) {
        Stencil::Second => {
            if k == 0 {
                (-3.0 * f(0) + 4.0 * f(1) - f(2)) / (2.0 * h)
            } else if k == n - 1 {
                (3.0 * f(n - 1) - 4.0 * f(n - 2) + f(n - 3)) / (2.0 * h)
            } else {
                (f(k + 1) - f(k - 1)) / (2.0 * h)
            }
        }
        Stencil::Fourth => {
            const B0: [f64; 5] = [-25.0, 48.0, -36.0, 16.0, -3.0];
            const B1: [f64; 5] = [-3.0, -10.0, 18.0, -6.0, 1.0];
            let one_sided = |c: &[f64; 5], base: usize, dir: f64| {
                let mut s = 0.0;
                for (m, cm) in c.iter().enumerate() {
                    let idx = if dir > 0.0 { base + m } else { base - m };
                    s += cm * f(idx);
                }
                dir * s / (12.0 * h)
            };
            if k == 0 {
                one_sided(&B0, 0, 1.0)
            } else if k == 1 {
                one_sided(&B1, 0, 1.0)
            } else if k == n - 1 {
                one_sided(&B0, n - 1, -1.0)
            } else if k == n - 2 {
                one_sided(&B1, n - 1, -1.0)
            } else {
                (f(k - 2) - 8.0 * f(k - 1) + 8.0 * f(k + 1) - f(k + 2)) / (12.0 * h)
            }
        }
    }
}

/// Second derivative at node `k`, compact stencil.
pub fn d2_at(f: impl Fn(usize) -> f64, n: usize, k: usize, h: f64, st: Stencil) -> f64 {
    let h2 = h * h;
    match st.effective(n) {
        Stencil::Second => {
            if n == 3 {
                return (f(0) - 2.0 * f(1) + f(2)) / h2;
            }
            if k == 0 {
                (2.0 * f(0) - 5.0 * f(1) + 4.0 * f(2) - f(3)) / h2
            } else if k == n - 1 {
                (2.0 * f(n - 1) - 5.0 * f(n - 2) + 4.0 * f(n - 3) - f(n - 4)) / h2
            } else {
                (f(k + 1) - 2.0 * f(k) + f(k - 1)) / h2
            }
        }
        Stencil::Fourth => {
            const B0: [f64; 6] = [45.0, -154.0, 214.0, -156.0, 61.0, -10.0];
            const B1: [f64; 6] = [10.0, -15.0, -4.0, 14.0, -6.0, 1.0];
            let one_sided = |c: &[f64; 6], base: usize, dir: i64| {
                let mut s = 0.0;
                for (m, cm) in c.iter().enumerate() {
                    let idx = (base as i64 + dir * m as i64) as usize;
                    s += cm * f(idx);
                }
                s / (12.0 * h2)
            };
            if k == 0 {
                one_sided(&B0, 0, 1)
            } else if k == 1 {
                one_sided(&B1, 0, 1)
            } else if k == n - 1 {
                one_sided(&B0, n - 1, -1)
            } else if k == n - 2 {
                one_sided(&B1, n - 1, -1)
            } else {
                (-f(k - 2) + 16.0 * f(k - 1) - 30.0 * f(k) + 16.0 * f(k + 1) - f(k + 2)) / (12.0 * h2)
            }
        }
    }
}

pub fn du(grid: &Grid, f: &[f64], st: Stencil) -> Vec<f64> {
    map_points(grid, |i, j| d1_at(|k| f[grid.idx(k, j)], grid.nu, i, grid.du, st))
}

pub fn dv(grid: &Grid, f: &[f64], st: Stencil) -> Vec<f64> {
    map_points(grid, |i, j| d1_at(|k| f[grid.idx(i, k)], grid.nv, j, grid.dv, st))
}

pub fn duu(grid: &Grid, f: &[f64], st: Stencil) -> Vec<f64> {
    map_points(grid, |i, j| d2_at(|k| f[grid.idx(k, j)], grid.nu, i, grid.du, st))
}

pub fn dvv(grid: &Grid, f: &[f64], st: Stencil) -> Vec<f64> {
    map_points(grid, |i, j| d2_at(|k| f[grid.idx(i, k)], grid.nv, j, grid.dv, st))
}

/// Evaluates `g(i, j)` at every grid point in storage order, in parallel.
pub fn map_points<T: Send>(grid: &Grid, g: impl Fn(usize, usize) -> T + Sync) -> Vec<T> {
    let nv = grid.nv;
    (0..grid.len())
        .into_par_iter()
        .map(|k| g(k / nv, k % nv))
        .collect()
}

/// Complex-valued first derivatives, component-wise.
pub fn du_c(grid: &Grid, f: &[num_complex::Complex64], st: Stencil) -> Vec<num_complex::Complex64> {
    map_points(grid, |i, j| {
        let re = d1_at(|k| f[grid.idx(k, j)].re, grid.nu, i, grid.du, st);
        let im = d1_at(|k| f[grid.idx(k, j)].im, grid.nu, i, grid.du, st);
        num_complex::Complex64::new(re, im)
    })
}

pub fn dv_c(grid: &Grid, f: &[num_complex::Complex64], st: Stencil) -> Vec<num_complex::Complex64> {
    map_points(grid, |i, j| {
        let re = d1_at(|k| f[grid.idx(i, k)].re, grid.nv, j, grid.dv, st);
        let im = d1_at(|k| f[grid.idx(i, k)].im, grid.nv, j, grid.dv, st);
        num_complex::Complex64::new(re, im)
    })
}
