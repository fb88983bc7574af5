use num_complex::Complex64 as C64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spaceform::integrability::*;
use spaceform::presets;
use spaceform::spaceform::{ambient_model, Coeffs, PointJet};
use spaceform::{FundamentalData, Grid, Stencil, SurfaceCase};

fn coeffs(rng: &mut ChaCha8Rng) -> Coeffs {
    let mut r = || rng.gen_range(-2.0..2.0);
    Coeffs { lu: r(), lv: r(), e2l: 0.0, a: [r(), r(), r()], b: [r(), r(), r()], m: [r(), r()] }
}

/// Random jet with symmetric λ_uv and the chain rule for e^{2λ}.
fn jet(rng: &mut ChaCha8Rng) -> PointJet {
    let lambda: f64 = rng.gen_range(-1.0..1.0);
    let mut val = coeffs(rng);
    val.e2l = (2.0 * lambda).exp();
    let mut du = coeffs(rng);
    let mut dv = coeffs(rng);
    dv.lu = du.lv;
    du.e2l = 2.0 * val.lu * val.e2l;
    dv.e2l = 2.0 * val.lv * val.e2l;
    PointJet { lambda, val, du, dv }
}

fn gcr_vec(g: &Gcr) -> [f64; 6] {
    [g.gauss, g.codazzi[0], g.codazzi[1], g.codazzi[2], g.codazzi[3], g.ricci]
}

#[test]
fn zero_data_is_integrable_in_every_case() {
    let g = Grid::square(-1.0, 1.0, 11).unwrap();
    for case in SurfaceCase::ALL {
        let d = presets::zero(case, 0.0, &g);
        assert!(gcr_residuals(&d, Stencil::Second).iter().all(|r| r.max_abs() == 0.0));
        assert!(lax_residual(&d, Stencil::Second).iter().all(|r| *r == 0.0));
    }
}

#[test]
fn constant_alpha2_breaks_gauss() {
    let g = Grid::square(-1.0, 1.0, 11).unwrap();
    let mut d = FundamentalData::zeros(ambient_model(SurfaceCase::Riem, 0.0), g);
    d.alpha[1] = vec![1.0; g.len()];
    let r = gcr_residuals(&d, Stencil::Second);
    assert!(r.iter().all(|x| (x.gauss + 1.0).abs() < 1e-15 && x.ricci == 0.0));
    assert!(r.iter().all(|x| x.codazzi.iter().all(|c| *c == 0.0)));
}

#[test]
fn sphere_residuals_are_second_order() {
    let max = |n: usize| {
        let g = Grid::square(-1.0, 1.0, n).unwrap();
        let d = presets::sphere(&g);
        let gcr = gcr_residuals(&d, Stencil::Second).iter().map(Gcr::max_abs).fold(0.0, f64::max);
        let lax = lax_residual(&d, Stencil::Second).into_iter().fold(0.0, f64::max);
        (gcr, lax, g.h())
    };
    let (g1, l1, h) = max(101);
    let (g2, l2, _) = max(201);
    assert!(g1 < 10.0 * h * h && l1 < 10.0 * h * h, "{g1} {l1}");
    assert!((3.2..4.8).contains(&(g1 / g2)), "{}", g1 / g2);
    assert!((3.2..4.8).contains(&(l1 / l2)), "{}", l1 / l2);
}

#[test]
fn random_data_is_not_integrable() {
    let g = Grid::square(-1.0, 1.0, 41).unwrap();
    for (n, case) in SurfaceCase::ALL.into_iter().enumerate() {
        let d = presets::random_smooth(case, 1.0, &g, 7 + n as u64);
        let lax = lax_residual(&d, Stencil::Fourth).into_iter().fold(0.0, f64::max);
        assert!(lax > 0.1, "{case}: {lax}");
    }
}

#[test]
fn wxyz_form_matches_gcr_on_random_data() {
    let g = Grid::square(-1.0, 1.0, 31).unwrap();
    for case in SurfaceCase::ALL {
        for seed in 0..5 {
            let d = presets::random_smooth(case, 0.7, &g, seed);
            let e = equivalence_check(&d, Stencil::Second);
            let worst = e.iter().flatten().fold(0.0f64, |m, x| m.max(x.abs()));
            assert!(worst < 1e-11, "{case}: {worst}");
        }
    }
}

/// Every W/X/Y/Z residual component is a {−1, 0, 1} combination of the six
/// Gauss/Codazzi/Ricci residuals; find it by exhaustive search on random jets.
fn brute_force(case: SurfaceCase, component: impl Fn(&WxyzResidual) -> f64) -> [i32; 6] {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let jets: Vec<PointJet> = (0..6).map(|_| jet(&mut rng)).collect();
    let samples: Vec<([f64; 6], f64)> = jets
        .iter()
        .map(|p| (gcr_vec(&gcr_at(case, 0.8, p)), component(&wxyz_at(case, 0.8, p))))
        .collect();
    let mut found = Vec::new();
    for code in 0..729 {
        let mut c = [0i32; 6];
        let mut k = code;
        for x in c.iter_mut() {
            *x = k % 3 - 1;
            k /= 3;
        }
        if samples.iter().all(|(g, t)| (g.iter().zip(&c).map(|(a, s)| a * *s as f64).sum::<f64>() - t).abs() < 1e-10) {
            found.push(c);
        }
    }
    assert_eq!(found.len(), 1, "{case}");
    found[0]
}

#[test]
fn predicted_signs_match_exhaustive_search() {
    type Pick = fn(&WxyzResidual) -> [C64; 2];
    let picks: [Pick; 3] = [|r| r.gr, |r| r.ca, |r| r.cb];
    for case in SurfaceCase::ALL {
        for pick in picks {
            for slot in 0..2 {
                for imag in [false, true] {
                    let part = |z: C64| if imag { z.im } else { z.re };
                    let c = brute_force(case, |r| part(pick(r)[slot]));
                    let mut basis = [0.0; 6];
                    for (k, b) in basis.iter_mut().enumerate() {
                        let mut v = [0.0; 6];
                        v[k] = 1.0;
                        let g = Gcr { gauss: v[0], codazzi: [v[1], v[2], v[3], v[4]], ricci: v[5] };
                        *b = part(pick(&predicted_wxyz(case, &g))[slot]);
                    }
                    let want: Vec<f64> = c.iter().map(|x| *x as f64).collect();
                    assert_eq!(basis.to_vec(), want, "{case} slot {slot} imag {imag}");
                }
            }
        }
    }
}

#[test]
fn lax_vanishes_with_gcr() {
    let g = Grid::square(-0.5, 0.5, 61).unwrap();
    let tol = 10.0 * g.h() * g.h();
    let d = presets::sphere(&g);
    let gcr = gcr_residuals(&d, Stencil::Second).iter().map(Gcr::max_abs).fold(0.0, f64::max);
    let lax = lax_residual(&d, Stencil::Second).into_iter().fold(0.0, f64::max);
    assert!(gcr < tol && lax < tol);
    for case in SurfaceCase::ALL {
        let d = presets::totally_geodesic(case, 1.0, &g).unwrap();
        let gcr = gcr_residuals(&d, Stencil::Fourth).iter().map(Gcr::max_abs).fold(0.0, f64::max);
        let lax = lax_residual(&d, Stencil::Fourth).into_iter().fold(0.0, f64::max);
        assert!(gcr < tol && lax < tol, "{case}: {gcr} {lax}");
    }
}

#[test]
fn summary_reports_location() {
    let g = Grid::square(0.0, 1.0, 3).unwrap();
    let mut v = vec![0.0; 9];
    v[5] = -2.0;
    let s = ResidualSummary::of(&g, &v);
    assert_eq!((s.max, s.argmax_i, s.argmax_j), (2.0, 1, 2));
    assert_eq!((s.argmax_u, s.argmax_v), (0.5, 1.0));
}

fn case() -> impl Strategy<Value = SurfaceCase> {
    prop::sample::select(SurfaceCase::ALL.to_vec())
}

proptest! {
    #[test]
    fn lax_entries_are_gcr_combinations(case in case(), seed in 0u64..1000, l0 in -2.0f64..2.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = jet(&mut rng);
        let lax = lax_at(case, l0, &p);
        let g = gcr_vec(&gcr_at(case, l0, &p));
        let gmax = g.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        // every entry is ± one residual, scaled by at most e^{2λ}
        for x in lax.iter() {
            prop_assert!(x.abs() <= gmax * (1.0 + p.val.e2l) + 1e-9);
        }
        prop_assert!(lax.amax() > 0.0 || gmax < 1e-12);
    }

    #[test]
    fn equivalence_is_exact_on_jets(case in case(), seed in 0u64..1000, l0 in -2.0f64..2.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = jet(&mut rng);
        let e = equivalence_at(case, l0, &p);
        prop_assert!(e.iter().all(|x| x.abs() < 1e-12));
    }
}
