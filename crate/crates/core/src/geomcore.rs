//! Pseudo-Euclidean linear algebra: inner products, bivectors in rank-4
//! frames, Hodge star per signature case, and the Θ bases.

use crate::error::{Error, Result};
use crate::spaceform::{Frame, SpaceFormModel, SurfaceCase};
use nalgebra::{Matrix3, Matrix4, SMatrix};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

pub type Matrix6<T> = SMatrix<T, 6, 6>;

/// Index pairs of the bivector components, in storage order.
pub const PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

const I: C64 = C64 { re: 0.0, im: 1.0 };
const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
const ONE: C64 = C64 { re: 1.0, im: 0.0 };

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AmbientSignature {
    diag: Vec<i8>,
}

impl AmbientSignature {
    pub fn new(diag: Vec<i8>) -> Result<Self> {
        if !(diag.len() == 4 || diag.len() == 5) {
            return Err(Error::DimensionMismatch { expected: 4, got: diag.len() });
        }
        if diag.iter().any(|&s| s != 1 && s != -1) {
            return Err(Error::Parse("signature entries must be +1 or -1".into()));
        }
        Ok(Self { diag })
    }

    /// `dim` entries, positives first.
    pub fn with_negatives(dim: usize, negatives: usize) -> Self {
        let diag = (0..dim).map(|k| if k + negatives < dim { 1 } else { -1 }).collect();
        Self { diag }
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn diag(&self) -> &[i8] {
        &self.diag
    }

    pub fn entry(&self, k: usize) -> f64 {
        self.diag[k] as f64
    }

    pub fn negatives(&self) -> usize {
        self.diag.iter().filter(|&&s| s < 0).count()
    }

    /// E^n_k style label.
    pub fn label(&self) -> String {
        match self.negatives() {
            0 => format!("E{}", self.dim()),
            k => format!("E{}_{}", self.dim(), k),
        }
    }
}

pub fn pseudo_inner(x: &[f64], y: &[f64], sig: &AmbientSignature) -> Result<f64> {
    if x.len() != sig.dim() {
        return Err(Error::DimensionMismatch { expected: sig.dim(), got: x.len() });
    }
    if y.len() != sig.dim() {
        return Err(Error::DimensionMismatch { expected: sig.dim(), got: y.len() });
    }
    Ok(x.iter().zip(y).zip(&sig.diag).map(|((a, b), s)| *s as f64 * a * b).sum())
}

/// ⟨x, y⟩ for two frame columns.
pub fn frame_inner(frame: &Frame, a: usize, b: usize, sig: &AmbientSignature) -> f64 {
    (0..sig.dim()).map(|k| sig.entry(k) * frame[(k, a)] * frame[(k, b)]).sum()
}

/// A 2-vector c_ij e_i∧e_j (i<j) with respect to some declared ordered frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bivector {
    pub c: [C64; 6],
}

impl Bivector {
    pub fn zero() -> Self {
        Self { c: [ZERO; 6] }
    }

    pub fn from_real(c: [f64; 6]) -> Self {
        Self { c: c.map(|x| C64::new(x, 0.0)) }
    }

    /// e_i∧e_j for any i != j (0-based), with the sign of the reordering.
    pub fn basis(i: usize, j: usize) -> Self {
        let mut b = Self::zero();
        if i == j {
            return b;
        }
        let (lo, hi, sign) = if i < j { (i, j, 1.0) } else { (j, i, -1.0) };
        let k = PAIRS.iter().position(|&p| p == (lo, hi)).expect("indices below 4");
        b.c[k] = C64::new(sign, 0.0);
        b
    }

    pub fn wedge(x: &[C64; 4], y: &[C64; 4]) -> Self {
        let mut b = Self::zero();
        for (k, &(i, j)) in PAIRS.iter().enumerate() {
            b.c[k] = x[i] * y[j] - x[j] * y[i];
        }
        b
    }

    pub fn scale(&self, s: C64) -> Self {
        Self { c: self.c.map(|x| x * s) }
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut c = self.c;
        for k in 0..6 {
            c[k] += o.c[k];
        }
        Self { c }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.scale(-ONE))
    }

    pub fn conj(&self) -> Self {
        Self { c: self.c.map(|x| x.conj()) }
    }

    pub fn max_abs(&self) -> f64 {
        self.c.iter().map(|x| x.norm()).fold(0.0, f64::max)
    }

    /// Bilinear pairing induced by the frame signature `g` (no conjugation).
    pub fn inner(&self, o: &Self, g: &[f64; 4]) -> C64 {
        PAIRS
            .iter()
            .enumerate()
            .map(|(k, &(i, j))| self.c[k] * o.c[k] * (g[i] * g[j]))
            .sum()
    }

    pub fn to_vector(&self) -> SMatrix<C64, 6, 1> {
        SMatrix::<C64, 6, 1>::from_column_slice(&self.c)
    }

    pub fn from_vector(v: &SMatrix<C64, 6, 1>) -> Self {
        let mut c = [ZERO; 6];
        for k in 0..6 {
            c[k] = v[k];
        }
        Self { c }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum StarKind {
    Riemannian,
    Neutral,
    Lorentzian,
}

fn star_kind(case: SurfaceCase) -> StarKind {
    match case {
        SurfaceCase::Riem => StarKind::Riemannian,
        SurfaceCase::NeutSpace | SurfaceCase::NeutTime => StarKind::Neutral,
        SurfaceCase::LorSpace | SurfaceCase::LorTime => StarKind::Lorentzian,
    }
}

/// For each basis bivector in storage order: (image index, sign).
fn star_table(case: SurfaceCase) -> [(usize, f64); 6] {
    // storage order: 12 13 14 23 24 34
    match star_kind(case) {
        StarKind::Riemannian => [(5, 1.0), (4, -1.0), (3, 1.0), (2, 1.0), (1, -1.0), (0, 1.0)],
        StarKind::Neutral => [(5, -1.0), (4, -1.0), (3, 1.0), (2, 1.0), (1, -1.0), (0, -1.0)],
        StarKind::Lorentzian => [(5, -1.0), (4, 1.0), (3, 1.0), (2, -1.0), (1, -1.0), (0, 1.0)],
    }
}

pub fn hodge_star(b: &Bivector, case: SurfaceCase) -> Bivector {
    let mut out = Bivector::zero();
    for (k, &(target, sign)) in star_table(case).iter().enumerate() {
        out.c[target] += b.c[k] * sign;
    }
    out
}

/// Eigenvalue of ∗ on the plus family: 1 in real cases, √−1 in Lorentzian ones.
pub fn star_eigenvalue(case: SurfaceCase) -> C64 {
    if case.is_lorentzian() {
        I
    } else {
        ONE
    }
}

pub fn selfdual_split(b: &Bivector, case: SurfaceCase) -> (Bivector, Bivector) {
    let s = star_eigenvalue(case);
    let plus = b.add(&hodge_star(b, case).scale(s.inv())).scale(C64::new(0.5, 0.0));
    let minus = b.sub(&plus);
    (plus, minus)
}

/// Signature of the orthonormal frame e₁..e₄ used for bivectors of a case.
pub fn e_signature(case: SurfaceCase) -> [f64; 4] {
    let s = case.frame_signs();
    let ord = case.e_order();
    [s[ord[0]], s[ord[1]], s[ord[2]], s[ord[3]]]
}

/// The plus family and minus family of Θ bivectors in e-frame components.
///
/// Real cases: plus spans the +1 eigenspace of ∗, minus the −1 eigenspace.
/// Lorentzian: plus is Θ₁..Θ₃ and minus its conjugate.
pub fn theta_families(case: SurfaceCase) -> ([Bivector; 3], [Bivector; 3]) {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let e = |i, j| Bivector::basis(i, j);
    let comb = |a: Bivector, b: Bivector, s: C64| a.add(&b.scale(s)).scale(C64::new(r, 0.0));
    let th = |s: f64| {
        let s = C64::new(s, 0.0);
        [
            comb(e(0, 1), e(2, 3), s),
            comb(e(0, 2), e(3, 1), s),
            comb(e(0, 3), e(1, 2), s),
        ]
    };
    match star_kind(case) {
        StarKind::Riemannian => (th(1.0), th(-1.0)),
        StarKind::Neutral => {
            let (p, m) = (th(1.0), th(-1.0));
            ([m[0], p[1], p[2]], [p[0], m[1], m[2]])
        }
        StarKind::Lorentzian => {
            let plus = [
                comb(e(0, 1), e(2, 3), I),
                comb(e(0, 2), e(3, 1), I),
                comb(e(1, 2), e(0, 3), I),
            ];
            (plus, plus.map(|b| b.conj()))
        }
    }
}

/// Θ family that the hat-connection matrices of a case act on, indexed by
/// family slot (0 for s = +1, 1 for s = −1; Lorentzian cases have one slot).
pub fn hat_family(case: SurfaceCase, slot: usize) -> [Bivector; 3] {
    let (p, m) = theta_families(case);
    match case {
        SurfaceCase::Riem | SurfaceCase::NeutSpace | SurfaceCase::NeutTime => {
            if slot == 0 {
                p
            } else {
                m
            }
        }
        SurfaceCase::LorSpace => {
            if slot == 0 {
                p
            } else {
                m
            }
        }
        SurfaceCase::LorTime => {
            if slot == 0 {
                m
            } else {
                p
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct ThetaBasis {
    pub case: SurfaceCase,
    /// e₁..e₄ as ambient vectors, in the case's orientation order.
    pub frame: [Vec<f64>; 4],
    pub plus: [Bivector; 3],
    pub minus: [Bivector; 3],
}

/// Θ basis attached to the tangent-normal frame stored in columns 0..4 of `frame`.
pub fn theta_basis(frame: &Frame, lambda: f64, model: &SpaceFormModel, tol: f64) -> Result<ThetaBasis> {
    let res = crate::spaceform::validate_frame(frame, lambda, model);
    let scale = (2.0 * lambda).exp().max(1.0);
    if res.max_abs() > tol * scale {
        return Err(Error::InvalidInitialFrame { residual: res.max_abs() });
    }
    let d = model.ambient.dim();
    let inv = (-lambda).exp();
    let ord = model.case.e_order();
    let col = |c: usize| (0..d).map(|k| frame[(k, c)] * inv).collect::<Vec<_>>();
    let (plus, minus) = theta_families(model.case);
    Ok(ThetaBasis {
        case: model.case,
        frame: [col(ord[0]), col(ord[1]), col(ord[2]), col(ord[3])],
        plus,
        minus,
    })
}

/// Derivation induced on bivectors by ω (∇e_j = Σ_i e_i ω_ij).
pub fn bivector_derivation(omega: &Matrix4<f64>) -> Matrix6<C64> {
    let mut m = Matrix6::<C64>::zeros();
    for (col, &(i, j)) in PAIRS.iter().enumerate() {
        let mut img = Bivector::zero();
        for k in 0..4 {
            img = img
                .add(&Bivector::basis(k, j).scale(C64::new(omega[(k, i)], 0.0)))
                .add(&Bivector::basis(i, k).scale(C64::new(omega[(k, j)], 0.0)));
        }
        for r in 0..6 {
            m[(r, col)] = img.c[r];
        }
    }
    m
}

/// Second compound: e_i∧e_j ↦ Pe_i ∧ Pe_j.
pub fn bivector_compound(p: &Matrix4<f64>) -> Matrix6<C64> {
    let mut m = Matrix6::<C64>::zeros();
    for (col, &(i, j)) in PAIRS.iter().enumerate() {
        let a: [C64; 4] = std::array::from_fn(|k| C64::new(p[(k, i)], 0.0));
        let b: [C64; 4] = std::array::from_fn(|k| C64::new(p[(k, j)], 0.0));
        let img = Bivector::wedge(&a, &b);
        for r in 0..6 {
            m[(r, col)] = img.c[r];
        }
    }
    m
}

/// Matrix of `op` on `family` in the basis (family, complement), returning the
/// family block and the largest coefficient leaking into the complement.
pub fn project_on_family(op: &Matrix6<C64>, family: &[Bivector; 3], complement: &[Bivector; 3]) -> (Matrix3<C64>, f64) {
    let mut basis = Matrix6::<C64>::zeros();
    for (k, b) in family.iter().chain(complement.iter()).enumerate() {
        for r in 0..6 {
            basis[(r, k)] = b.c[r];
        }
    }
    let lu = basis.lu();
    let mut block = Matrix3::<C64>::zeros();
    let mut leak: f64 = 0.0;
    for (k, b) in family.iter().enumerate() {
        let img = op * b.to_vector();
        let coords = lu.solve(&img).expect("Θ basis is invertible");
        for r in 0..3 {
            block[(r, k)] = coords[r];
            leak = leak.max(coords[r + 3].norm());
        }
    }
    (block, leak)
}

pub fn complement_family(case: SurfaceCase, family: &[Bivector; 3]) -> [Bivector; 3] {
    let (p, m) = theta_families(case);
    if family[0].sub(&p[0]).max_abs() < 1e-15 {
        m
    } else {
        p
    }
}
