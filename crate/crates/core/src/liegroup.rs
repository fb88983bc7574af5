//! SO₀(3,1) generators, their action on Θ₁, Θ₂, Θ₃ and the homomorphism
//! into SO(3, ℂ).

use crate::error::{Error, Result};
use crate::geomcore::{bivector_compound, project_on_family, theta_families};
use crate::spaceform::SurfaceCase;
use nalgebra::{Matrix3, Matrix4};
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub k: u8,
    pub l: u8,
    pub param: f64,
}

impl GeneratorSpec {
    pub fn new(k: u8, l: u8, param: f64) -> Result<Self> {
        if !(1..=3).contains(&k) || !(1..=2).contains(&l) {
            return Err(Error::Parse(format!("generator P_({k},{l}) does not exist")));
        }
        if !param.is_finite() {
            return Err(Error::Parse("generator parameter must be finite".into()));
        }
        Ok(Self { k, l, param })
    }
}

/// Minkowski form diag(1, 1, 1, −1).
pub fn minkowski() -> Matrix4<f64> {
    Matrix4::from_diagonal(&nalgebra::Vector4::new(1.0, 1.0, 1.0, -1.0))
}

pub fn lorentz_generator(g: &GeneratorSpec) -> Matrix4<f64> {
    let mut p = Matrix4::identity();
    let x = g.param;
    // (plane, rotation?) per generator
    let (a, b, rotation) = match (g.k, g.l) {
        (1, 1) => (0, 1, true),
        (1, 2) => (2, 3, false),
        (2, 1) => (0, 2, true),
        (2, 2) => (1, 3, false),
        (3, 1) => (1, 2, true),
        _ => (0, 3, false),
    };
    if rotation {
        let (s, c) = x.sin_cos();
        p[(a, a)] = c;
        p[(a, b)] = -s;
        p[(b, a)] = s;
        p[(b, b)] = c;
    } else {
        let (s, c) = (x.sinh(), x.cosh());
        p[(a, a)] = c;
        p[(a, b)] = s;
        p[(b, a)] = s;
        p[(b, b)] = c;
    }
    p
}

/// Closed-form images Q_{k,l} in SO(3, ℂ).
pub fn q_generator(g: &GeneratorSpec) -> Matrix3<C64> {
    let x = g.param;
    let one = C64::new(1.0, 0.0);
    let zero = C64::new(0.0, 0.0);
    let (c, s, ch, sh) = (x.cos(), x.sin(), x.cosh(), x.sinh());
    let r = |v: f64| C64::new(v, 0.0);
    let im = |v: f64| C64::new(0.0, v);
    let m = |e: [[C64; 3]; 3]| Matrix3::from_fn(|i, j| e[i][j]);
    match (g.k, g.l) {
        (1, 1) => m([[one, zero, zero], [zero, r(c), r(-s)], [zero, r(s), r(c)]]),
        (1, 2) => m([[one, zero, zero], [zero, r(ch), im(sh)], [zero, im(-sh), r(ch)]]),
        (2, 1) => m([[r(c), zero, r(s)], [zero, one, zero], [r(-s), zero, r(c)]]),
        (2, 2) => m([[r(ch), zero, im(sh)], [zero, one, zero], [im(-sh), zero, r(ch)]]),
        (3, 1) => m([[r(c), r(-s), zero], [r(s), r(c), zero], [zero, zero, one]]),
        _ => m([[r(ch), im(sh), zero], [im(-sh), r(ch), zero], [zero, zero, one]]),
    }
}

pub fn lorentz_defect(p: &Matrix4<f64>) -> f64 {
    let eta = minkowski();
    (p.transpose() * eta * p - eta).amax()
}

/// Matrix of T̃_P on span(Θ₁, Θ₂, Θ₃) in that basis.
pub fn induced_action(p: &Matrix4<f64>) -> Result<Matrix3<C64>> {
    let defect = lorentz_defect(p);
    if defect > 1e-9 * p.amax().max(1.0).powi(2) {
        return Err(Error::NonLorentz { residual: defect });
    }
    let (plus, minus) = theta_families(SurfaceCase::LorSpace);
    let (q, _) = project_on_family(&bivector_compound(p), &plus, &minus);
    Ok(q)
}

pub fn word_product(word: &[GeneratorSpec]) -> Matrix4<f64> {
    word.iter().fold(Matrix4::identity(), |acc, g| acc * lorentz_generator(g))
}

fn max_abs(m: &Matrix3<C64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WordResidual {
    /// ‖Φ(P₁⋯P_n) − Φ(P₁)⋯Φ(P_n)‖.
    pub homomorphism: f64,
    /// ‖QᵀQ − I‖ for the image of the product.
    pub orthogonality: f64,
    /// |det Q − 1|.
    pub determinant: f64,
}

impl WordResidual {
    pub fn max(&self) -> f64 {
        self.homomorphism.max(self.orthogonality).max(self.determinant)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhiReport {
    pub words: Vec<WordResidual>,
    pub max_residual: f64,
}

pub fn phi_check(words: &[Vec<GeneratorSpec>]) -> Result<PhiReport> {
    let mut out = Vec::with_capacity(words.len());
    for word in words {
        let q = induced_action(&word_product(word))?;
        let mut prod = Matrix3::<C64>::identity();
        for g in word {
            prod *= induced_action(&lorentz_generator(g))?;
        }
        out.push(WordResidual {
            homomorphism: max_abs(&(q - prod)),
            orthogonality: max_abs(&(q.transpose() * q - Matrix3::identity())),
            determinant: (q.determinant() - C64::new(1.0, 0.0)).norm(),
        });
    }
    let max_residual = out.iter().map(|w| w.max()).fold(0.0, f64::max);
    Ok(PhiReport { words: out, max_residual })
}

/// Reproducible random words with parameters uniform in [−range, range].
pub fn random_words(seed: u64, count: usize, len: usize, range: f64) -> Vec<Vec<GeneratorSpec>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            (0..len)
                .map(|_| GeneratorSpec {
                    k: rng.gen_range(1..=3),
                    l: rng.gen_range(1..=2),
                    param: rng.gen_range(-range..=range),
                })
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_at_zero() {
        let g = GeneratorSpec::new(1, 1, 0.0).unwrap();
        assert_eq!(lorentz_generator(&g), Matrix4::identity());
        assert!(GeneratorSpec::new(4, 1, 0.0).is_err());
    }

    #[test]
    fn boost_entries() {
        let t = 0.7;
        let p = lorentz_generator(&GeneratorSpec::new(1, 2, t).unwrap());
        assert_eq!(p[(2, 2)], t.cosh());
        assert_eq!(p[(2, 3)], t.sinh());
        assert_eq!(p[(3, 2)], t.sinh());
        assert_eq!(p[(3, 3)], t.cosh());
        let b = lorentz_generator(&GeneratorSpec::new(3, 2, 1.3).unwrap());
        assert!(lorentz_defect(&b) < 1e-13);
    }

    #[test]
    fn minus_identity_acts_trivially() {
        let q = induced_action(&(-Matrix4::identity())).unwrap();
        assert_eq!(q, Matrix3::identity());
    }

    #[test]
    fn empty_word() {
        let r = phi_check(&[vec![]]).unwrap();
        assert_eq!(r.max_residual, 0.0);
    }

    #[test]
    fn rejects_non_lorentz() {
        let mut p = Matrix4::identity();
        p[(0, 0)] = 2.0;
        assert!(matches!(induced_action(&p), Err(Error::NonLorentz { .. })));
    }
}
