//! Plain-text field, frame and mesh files.
//!
//! Field files are CSV with header `u,v,<names>` and one row per grid point
//! in storage order (v fastest). Numbers use `{:.16e}` so output bytes are
//! fixed for fixed input.

use crate::error::{Error, Result};
use crate::reconstruct::FrameField;
use crate::spaceform::{Frame, FundamentalData, Grid, SpaceFormModel, FIELD_NAMES};
use crate::twistor::TwistorInvariants;
use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

pub const FRAME_COLUMNS: [&str; 5] = ["T1", "T2", "N1", "N2", "F"];

pub fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn columns_to_string(grid: &Grid, names: &[String], cols: &[Vec<f64>]) -> Result<String> {
    if names.len() != cols.len() {
        return Err(Error::DimensionMismatch { expected: names.len(), got: cols.len() });
    }
    if let Some(c) = cols.iter().find(|c| c.len() != grid.len()) {
        return Err(Error::DimensionMismatch { expected: grid.len(), got: c.len() });
    }
    let mut s = String::from("u,v");
    for n in names {
        s.push(',');
        s.push_str(n);
    }
    s.push('\n');
    for i in 0..grid.nu {
        for j in 0..grid.nv {
            let k = grid.idx(i, j);
            let _ = write!(s, "{},{}", fmt(grid.u(i)), fmt(grid.v(j)));
            for c in cols {
                s.push(',');
                s.push_str(&fmt(c[k]));
            }
            s.push('\n');
        }
    }
    Ok(s)
}

pub fn write_columns(path: &Path, grid: &Grid, names: &[String], cols: &[Vec<f64>]) -> Result<()> {
    fs::write(path, columns_to_string(grid, names, cols)?)?;
    Ok(())
}

/// Reads a field file and checks that its coordinates match `grid`.
pub fn read_columns(path: &Path, grid: &Grid) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines.next().ok_or_else(|| Error::Parse(format!("{}: empty file", path.display())))?;
    let names: Vec<String> = header.split(',').map(|s| s.trim().to_string()).collect();
    if names.len() < 2 || names[0] != "u" || names[1] != "v" {
        return Err(Error::Parse(format!("{}: header must start with u,v", path.display())));
    }
    let width = names.len();
    let mut cols = vec![Vec::with_capacity(grid.len()); width - 2];
    let mut rows = 0;
    for (n, line) in lines.enumerate() {
        let vals = line
            .split(',')
            .map(|s| s.trim().parse::<f64>())
            .collect::<std::result::Result<Vec<f64>, _>>()
            .map_err(|e| Error::Parse(format!("{}: line {}: {e}", path.display(), n + 2)))?;
        if vals.len() != width {
            return Err(Error::Parse(format!("{}: line {} has {} values, expected {width}", path.display(), n + 2, vals.len())));
        }
        if rows >= grid.len() {
            return Err(Error::DimensionMismatch { expected: grid.len(), got: rows + 1 });
        }
        let loc = grid.location(rows);
        let tol = 1e-9 * (1.0 + loc.u.abs().max(loc.v.abs()));
        if (vals[0] - loc.u).abs() > tol || (vals[1] - loc.v).abs() > tol {
            return Err(Error::InvalidGrid(format!(
                "{}: line {} is at ({}, {}), grid expects ({}, {})",
                path.display(),
                n + 2,
                vals[0],
                vals[1],
                loc.u,
                loc.v
            )));
        }
        for (c, x) in cols.iter_mut().zip(&vals[2..]) {
            c.push(*x);
        }
        rows += 1;
    }
    if rows != grid.len() {
        return Err(Error::DimensionMismatch { expected: grid.len(), got: rows });
    }
    Ok((names[2..].to_vec(), cols))
}

fn take(path: &Path, names: &[String], cols: &[Vec<f64>], name: &str) -> Result<Vec<f64>> {
    names
        .iter()
        .position(|n| n == name)
        .map(|k| cols[k].clone())
        .ok_or_else(|| Error::InvalidField { name: name.into(), reason: format!("missing from {}", path.display()) })
}

pub fn write_data(path: &Path, data: &FundamentalData) -> Result<()> {
    let names: Vec<String> = FIELD_NAMES.iter().map(|s| s.to_string()).collect();
    let cols: Vec<Vec<f64>> = data.fields().iter().map(|f| f.to_vec()).collect();
    write_columns(path, &data.grid, &names, &cols)
}

pub fn read_data(path: &Path, model: SpaceFormModel, grid: &Grid) -> Result<FundamentalData> {
    let (names, cols) = read_columns(path, grid)?;
    let mut fields: [Vec<f64>; 9] = Default::default();
    for (f, name) in fields.iter_mut().zip(FIELD_NAMES) {
        *f = take(path, &names, &cols, name)?;
    }
    FundamentalData::from_fields(model, *grid, fields)
}

/// `<name>_re`, `<name>_im` column pairs.
pub fn complex_columns(name: &str, f: &[C64]) -> [(String, Vec<f64>); 2] {
    [
        (format!("{name}_re"), f.iter().map(|z| z.re).collect()),
        (format!("{name}_im"), f.iter().map(|z| z.im).collect()),
    ]
}

const INVARIANT_NAMES: [&str; 4] = ["W", "X", "Y", "Z"];

/// W, X, Y, Z and Δ for both slots (slot 0 = plus family).
pub fn write_invariants(path: &Path, inv: &TwistorInvariants) -> Result<()> {
    let fields = [&inv.w, &inv.x, &inv.y, &inv.z, &inv.delta];
    let names = ["W", "X", "Y", "Z", "Delta"];
    let mut cols = Vec::new();
    for (f, n) in fields.iter().zip(names) {
        for (s, slot) in ["p", "m"].iter().zip(f.iter()) {
            cols.extend(complex_columns(&format!("{n}{s}"), slot));
        }
    }
    let (names, cols): (Vec<String>, Vec<Vec<f64>>) = cols.into_iter().unzip();
    write_columns(path, &inv.grid, &names, &cols)
}

/// Reads W, X, Y, Z (columns `Wp_re`, `Wp_im`, `Wm_re`, …); Δ is recomputed.
pub fn read_invariants(path: &Path, case: crate::spaceform::SurfaceCase, grid: &Grid) -> Result<TwistorInvariants> {
    let (names, cols) = read_columns(path, grid)?;
    let complex = |name: &str| -> Result<Vec<C64>> {
        let re = take(path, &names, &cols, &format!("{name}_re"))?;
        let im = take(path, &names, &cols, &format!("{name}_im"))?;
        Ok(re.into_iter().zip(im).map(|(a, b)| C64::new(a, b)).collect())
    };
    let mut f: Vec<[Vec<C64>; 2]> = Vec::new();
    for n in INVARIANT_NAMES {
        let plus = complex(&format!("{n}p"))?;
        let minus = if case.is_lorentzian() { plus.iter().map(|z| z.conj()).collect() } else { complex(&format!("{n}m"))? };
        f.push([plus, minus]);
    }
    let mut it = f.into_iter();
    let mut next = || it.next().expect("four fields");
    TwistorInvariants::from_wxyz(case, *grid, next(), next(), next(), next())
}

/// One CSV per frame column (`frame_T1.csv`, …, `frame_F.csv`) with
/// ambient coordinates `x0, x1, …`.
pub fn write_frames(dir: &Path, field: &FrameField) -> Result<()> {
    fs::create_dir_all(dir)?;
    let dim = field.dim();
    let names: Vec<String> = (0..dim).map(|r| format!("x{r}")).collect();
    for (c, name) in FRAME_COLUMNS.iter().enumerate() {
        let cols: Vec<Vec<f64>> = (0..dim).map(|r| field.frames.iter().map(|f| f[(r, c)]).collect()).collect();
        write_columns(&dir.join(format!("frame_{name}.csv")), &field.grid, &names, &cols)?;
    }
    Ok(())
}

pub fn read_frames(dir: &Path, model: SpaceFormModel, grid: &Grid) -> Result<FrameField> {
    let dim = model.ambient.dim();
    let mut frames = vec![Frame::zeros(); grid.len()];
    for (c, name) in FRAME_COLUMNS.iter().enumerate() {
        let path = dir.join(format!("frame_{name}.csv"));
        let (names, cols) = read_columns(&path, grid)?;
        for r in 0..dim {
            let col = take(&path, &names, &cols, &format!("x{r}"))?;
            for (f, x) in frames.iter_mut().zip(col) {
                f[(r, c)] = x;
            }
        }
    }
    Ok(FrameField { model, grid: *grid, frames })
}

/// Applies a 3 × dim projection to the positions F.
pub fn project_positions(field: &FrameField, projection: &[Vec<f64>]) -> Result<Vec<[f64; 3]>> {
    let dim = field.dim();
    if projection.len() != 3 || projection.iter().any(|r| r.len() != dim) {
        return Err(Error::Parse(format!("projection must be 3 x {dim}")));
    }
    let m = DMatrix::from_fn(3, dim, |i, j| projection[i][j]);
    let rank = m.rank(1e-12);
    if rank < 3 {
        return Err(Error::Parse(format!("projection has rank {rank} < 3")));
    }
    Ok(field
        .frames
        .iter()
        .map(|f| std::array::from_fn(|i| (0..dim).map(|j| projection[i][j] * f[(j, 4)]).sum()))
        .collect())
}

/// Vertex lines `v x y z` followed by quad faces `f a b c d` (1-based).
pub fn mesh_to_string(grid: &Grid, points: &[[f64; 3]]) -> Result<String> {
    if points.len() != grid.len() {
        return Err(Error::DimensionMismatch { expected: grid.len(), got: points.len() });
    }
    let mut s = String::new();
    for p in points {
        let _ = writeln!(s, "v {} {} {}", fmt(p[0]), fmt(p[1]), fmt(p[2]));
    }
    for i in 0..grid.nu - 1 {
        for j in 0..grid.nv - 1 {
            let a = grid.idx(i, j) + 1;
            let b = grid.idx(i + 1, j) + 1;
            let c = grid.idx(i + 1, j + 1) + 1;
            let d = grid.idx(i, j + 1) + 1;
            let _ = writeln!(s, "f {a} {b} {c} {d}");
        }
    }
    Ok(s)
}

pub fn write_mesh(path: &Path, grid: &Grid, points: &[[f64; 3]]) -> Result<()> {
    fs::write(path, mesh_to_string(grid, points)?)?;
    Ok(())
}
