use nalgebra::{Matrix3, Matrix4, Matrix5};
use num_complex::Complex64 as C64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spaceform::geomcore::*;
use spaceform::spaceform::{assemble, Coeffs};
use spaceform::twistor::*;
use spaceform::{presets, Error, FundamentalData, Grid, Stencil, SurfaceCase};

const I: C64 = C64::new(0.0, 1.0);

fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

fn random_coeffs(rng: &mut ChaCha8Rng) -> Coeffs {
    let mut r = || rng.gen_range(-2.0..2.0);
    Coeffs { lu: r(), lv: r(), e2l: 0.0, a: [r(), r(), r()], b: [r(), r(), r()], m: [r(), r()] }
}

/// Connection of the normalised e-frame: S or T minus λ·I, reordered to e₁..e₄.
fn e_connection(case: SurfaceCase, m: &Matrix5<f64>, dl: f64) -> Matrix4<f64> {
    let ord = case.e_order();
    Matrix4::from_fn(|i, j| m[(ord[i], ord[j])] - if i == j { dl } else { 0.0 })
}

fn projected(case: SurfaceCase, slot: usize, omega: &Matrix4<f64>) -> (Matrix3<C64>, f64) {
    let fam = hat_family(case, slot);
    project_on_family(&bivector_derivation(omega), &fam, &complement_family(case, &fam))
}

#[test]
fn zero_invariants() {
    for case in SurfaceCase::ALL {
        let v = invariants_at(case, &Coeffs::default());
        assert_eq!(v, InvariantsAt::default());
        assert_eq!(delta_at(case, &v), [C64::default(); 2]);
    }
}

#[test]
fn sphere_invariants() {
    let g = Grid::square(-1.0, 1.0, 11).unwrap();
    let d = presets::sphere(&g);
    let inv = twistor_invariants(&d, Stencil::Second);
    for k in 0..g.len() {
        let e = d.lambda[k].exp();
        for s in 0..2 {
            let sg = if s == 0 { -1.0 } else { 1.0 };
            assert_eq!(inv.w[s][k], C64::default());
            assert_eq!(inv.x[s][k], C64::default());
            assert!((inv.y[s][k] - re(sg * e)).norm() < 1e-14);
            assert!((inv.z[s][k] - re(sg * e)).norm() < 1e-14);
            assert!((inv.delta[s][k] + re(e * e)).norm() < 1e-13);
        }
    }
    assert_eq!(inv.identity_residual().0, 0.0);
}

#[test]
fn lorentzian_space_like_example() {
    let c = Coeffs { a: [0.0, 1.0, 0.0], b: [2.0, 0.0, 0.0], ..Default::default() };
    let v = invariants_at(SurfaceCase::LorSpace, &c);
    assert_eq!(v.w[0], C64::new(1.0, -2.0));
    assert_eq!(v.w[1], v.w[0].conj());
}

#[test]
fn hat_matrices_match_projected_connection() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for case in SurfaceCase::ALL {
        for _ in 0..20 {
            let mut c = random_coeffs(&mut rng);
            c.e2l = rng.gen_range(0.2..3.0);
            let l0 = rng.gen_range(-2.0..2.0);
            let p = assemble(case, l0, &c, 1.0);
            let h = hat_at(case, &invariants_at(case, &c));
            for slot in 0..2 {
                let (a, la) = projected(case, slot, &e_connection(case, &p.s, c.lu));
                let (b, lb) = projected(case, slot, &e_connection(case, &p.t, c.lv));
                assert!(la < 1e-12 && lb < 1e-12, "{case}");
                assert!(max_entry(&(a - h[slot].0)) < 1e-12, "{case} slot {slot}");
                assert!(max_entry(&(b - h[slot].1)) < 1e-12, "{case} slot {slot}");
            }
        }
    }
}

#[test]
fn curvature_rhs_matches_ambient_curvature() {
    // R(T1, T2) = L0 (⟨T2, ·⟩ T1 − ⟨T1, ·⟩ T2) on the tangent-normal frame
    for case in SurfaceCase::ALL {
        let s = case.frame_signs();
        let k = 0.7;
        let mut om = Matrix4::zeros();
        om[(0, 1)] = k * s[1];
        om[(1, 0)] = -k * s[0];
        let ord = case.e_order();
        let om_e = Matrix4::from_fn(|i, j| om[(ord[i], ord[j])]);
        let rhs = curvature_rhs(case, k);
        for slot in 0..2 {
            let (m, leak) = projected(case, slot, &om_e);
            assert!(leak < 1e-14);
            assert!(max_entry(&(m - rhs[slot])) < 1e-14, "{case} slot {slot}");
        }
    }
}

#[test]
fn totally_geodesic_rhs_entry() {
    assert_eq!(curvature_rhs(SurfaceCase::Riem, 2.5)[0][(1, 2)], re(2.5));
}

#[test]
fn sphere_curvature_residual_is_second_order() {
    let worst = |n: usize| {
        let g = Grid::square(-1.0, 1.0, n).unwrap();
        let r = curvature_residual(&presets::sphere(&g), Stencil::Second);
        r.iter().flat_map(|p| p.iter().map(max_entry)).fold(0.0, f64::max)
    };
    let (a, b) = (worst(51), worst(101));
    assert!((3.2..4.8).contains(&(a / b)), "{a} {b}");
}

#[test]
fn totally_geodesic_curvature_vanishes() {
    let g = Grid::square(-0.5, 0.5, 41).unwrap();
    for case in SurfaceCase::ALL {
        let d = presets::totally_geodesic(case, 1.0, &g).unwrap();
        let r = curvature_residual(&d, Stencil::Fourth);
        let w = r.iter().flat_map(|p| p.iter().map(max_entry)).fold(0.0, f64::max);
        assert!(w < 10.0 * g.h() * g.h(), "{case}: {w}");
    }
}

#[test]
fn degeneracy_dichotomy() {
    let g = Grid::square(-0.6, 0.6, 41).unwrap();
    let tol = 10.0 * g.h() * g.h();
    let z = degeneracy_report(&presets::zero(SurfaceCase::Riem, 0.0, &g), Stencil::Second);
    assert!(!z.nondegenerate && z.dichotomy_consistent(tol));
    let s = degeneracy_report(&presets::sphere(&g), Stencil::Second);
    assert!(s.nondegenerate && s.max_k_minus_l0 > 0.5 && s.dichotomy_consistent(tol));
    let small_grid = Grid::square(-0.4, 0.4, 41).unwrap();
    let tg = degeneracy_report(&presets::totally_geodesic(SurfaceCase::NeutSpace, -1.0, &small_grid).unwrap(), Stencil::Fourth);
    assert!(!tg.nondegenerate && tg.dichotomy_consistent(tol), "{} {} {}", tg.min_scaled_delta, tg.max_k_minus_l0, tg.max_rperp);
    let small = degeneracy_report(&presets::small_sphere(SurfaceCase::LorSpace, 0.5, &g).unwrap(), Stencil::Fourth);
    assert!(small.nondegenerate && small.dichotomy_consistent(tol));
}

#[test]
fn ab_functions_examples() {
    let g = Grid::square(-0.5, 0.5, 21).unwrap();
    let one = vec![re(1.0); g.len()];
    let inv = TwistorInvariants::from_wxyz(
        SurfaceCase::Riem,
        g,
        [one.clone(), one.clone()],
        [one.clone(), one.clone()],
        [one.clone(), one.clone()],
        [one.clone(), one.clone()],
    )
    .unwrap();
    let ab = ab_functions(&inv, Stencil::Second).unwrap();
    assert!(ab.a.iter().chain(&ab.b).flatten().all(|z| z.norm() == 0.0));

    let inv = twistor_invariants(&presets::zero(SurfaceCase::Riem, 0.0, &g), Stencil::Second);
    assert!(matches!(ab_functions(&inv, Stencil::Second), Err(Error::DegenerateDelta { .. })));
}

#[test]
fn ab_functions_recover_sphere_lambda_derivatives() {
    let g = Grid::square(-0.5, 0.5, 101).unwrap();
    let d = presets::sphere(&g);
    let inv = twistor_invariants(&d, Stencil::Fourth);
    let ab = ab_functions(&inv, Stencil::Fourth).unwrap();
    for k in 0..g.len() {
        for s in 0..2 {
            assert!((ab.a[s][k] - inv.phi[s][k]).norm() < 1e-6);
            assert!((ab.b[s][k] - inv.psi[s][k]).norm() < 1e-6);
        }
    }
}

fn random_invariants(case: SurfaceCase, rng: &mut ChaCha8Rng) -> InvariantsAt {
    let mut c = || C64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
    let mut v = InvariantsAt { w: [c(), c()], x: [c(), c()], y: [c(), c()], z: [c(), c()], ..Default::default() };
    if case.is_lorentzian() {
        for f in [&mut v.w, &mut v.x, &mut v.y, &mut v.z] {
            f[1] = f[0].conj();
        }
    }
    v
}

#[test]
fn ab_matches_closed_forms() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..50 {
        let case = SurfaceCase::Riem;
        let (v, vu, vv) = (random_invariants(case, &mut rng), random_invariants(case, &mut rng), random_invariants(case, &mut rng));
        let delta = delta_at(case, &v);
        let (a, b) = ab_at(case, &v, &vu, &vv).unwrap();
        for k in 0..2 {
            let (s, o) = (if k == 0 { 1.0 } else { -1.0 }, 1 - k);
            let l1 = vv.y[k] - s * vu.x[k];
            let l2 = vv.w[o] + s * vu.z[o];
            let f = re(-s) / delta[k];
            let want_a = f * (-v.x[k] * l1 + v.z[o] * l2);
            let want_b = f * (s * v.y[k] * l1 + s * v.w[o] * l2);
            assert!((a[k] - want_a).norm() < 1e-9 * (1.0 + want_a.norm()));
            assert!((b[o] - want_b).norm() < 1e-9 * (1.0 + want_b.norm()));
        }

        let case = SurfaceCase::LorSpace;
        let (v, vu, vv) = (random_invariants(case, &mut rng), random_invariants(case, &mut rng), random_invariants(case, &mut rng));
        let d = delta_at(case, &v)[0];
        let (a, b) = ab_at(case, &v, &vu, &vv).unwrap();
        let l1 = vv.y[0] + I * vu.x[0];
        let l2 = vv.w[0] + I * vu.z[0];
        let want_a = (I * v.x[0] * l1 - I * v.z[0] * l2) / d;
        let want_b = (v.y[0] * l1 - v.w[0] * l2) / d;
        assert!((a[0] - want_a).norm() < 1e-9 * (1.0 + want_a.norm()));
        assert!((b[0] - want_b).norm() < 1e-9 * (1.0 + want_b.norm()));
        assert_eq!(a[1], a[0].conj());
    }
}

#[test]
fn delbar_is_half_of_a_plus_i_b() {
    let g = Grid::square(-0.5, 0.5, 9).unwrap();
    let d = presets::random_smooth(SurfaceCase::LorSpace, 0.0, &g, 4);
    let got = delbar_residual(&d).unwrap();
    let hat = hat_connection_matrices(&d, Stencil::Second);
    for k in 0..g.len() {
        let col = (hat.a[0][k] + hat.b[0][k] * I) * re(0.5);
        assert!((col[(1, 0)] - got[k].0).norm() < 1e-14);
        assert!((col[(2, 0)] - got[k].1).norm() < 1e-14);
    }
    assert!(matches!(delbar_residual(&presets::sphere(&g)), Err(Error::WrongCase { .. })));
}

#[test]
fn dependence_examples() {
    let d = dependence_at([1.0, 0.0, -1.0], [-1.0, 0.0, 1.0], 1e-12);
    assert!(d.dependent && d.delbar_vanishing);
    assert_eq!(d.branch, Some(DependenceBranch::ZeroMeanCurvature));
    let d = dependence_at([2.0, 0.0, 2.0], [2.0, 0.0, 2.0], 1e-12);
    assert_eq!(d.branch, Some(DependenceBranch::PVanishes));
    let d = dependence_at([0.0; 3], [0.0; 3], 1e-12);
    assert_eq!(d.branch, Some(DependenceBranch::Both));
    let d = dependence_at([1.0, 0.0, 0.0], [0.0, 0.0, 2.0], 1e-12);
    assert!(!d.dependent && !d.delbar_vanishing && d.branch.is_none());
}

#[test]
fn minimal_delbar_surface_is_zero_mean_curvature_branch() {
    use spaceform::reconstruct::{construct_delbar, DelbarInput, HolomorphicSpec, LambdaSource};
    let g = Grid::square(-0.4, 0.4, 21).unwrap();
    let input = DelbarInput {
        grid: g,
        l0: 1.0,
        lambda: LambdaSource::Liouville,
        gamma: None,
        p: HolomorphicSpec::Identity,
        r: 0.0,
        liouville_tol: None,
    };
    let data: FundamentalData = construct_delbar(&input).unwrap();
    let checks = linear_dependence_check(&data, 1e-9);
    assert!(checks.iter().all(|c| c.dependent && c.delbar_vanishing));
    assert!(checks.iter().all(|c| matches!(c.branch, Some(DependenceBranch::ZeroMeanCurvature | DependenceBranch::Both))));
}

#[test]
fn so3c_form_is_the_projected_derivation() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..20 {
        let mut om = Matrix4::zeros();
        for i in 0..4 {
            for j in (i + 1)..4 {
                let x = rng.gen_range(-1.0..1.0);
                om[(i, j)] = x;
                om[(j, i)] = if j == 3 { x } else { -x };
            }
        }
        let (p, m) = theta_families(SurfaceCase::LorSpace);
        let (want, leak) = project_on_family(&bivector_derivation(&om), &p, &m);
        let got = so3c_connection_form(&om, 1e-12).unwrap();
        assert!(leak < 1e-14);
        assert!(max_entry(&(got - want)) < 1e-14);
    }
}

fn case() -> impl Strategy<Value = SurfaceCase> {
    prop::sample::select(SurfaceCase::ALL.to_vec())
}

proptest! {
    #[test]
    fn invariant_identities_hold(case in case(), seed in 0u64..500) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let v = invariants_at(case, &random_coeffs(&mut rng));
        if case.is_lorentzian() {
            prop_assert!((v.w[0].re - v.x[0].re).abs() < 1e-14);
            prop_assert!((v.y[0].re - v.z[0].re).abs() < 1e-14);
        } else {
            prop_assert!((v.w[0] + v.w[1] - v.x[0] - v.x[1]).norm() < 1e-14);
            prop_assert!((v.y[0] + v.y[1] - v.z[0] - v.z[1]).norm() < 1e-14);
        }
    }

    #[test]
    fn hat_matrices_preserve_the_family_form(case in case(), seed in 0u64..500) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = hat_at(case, &invariants_at(case, &random_coeffs(&mut rng)));
        let sig = e_signature(case);
        let g4 = [sig[0], sig[1], sig[2], sig[3]];
        for slot in 0..2 {
            let fam = hat_family(case, slot);
            let gram = Matrix3::from_fn(|i, j| fam[i].inner(&fam[j], &g4));
            for m in [h[slot].0, h[slot].1] {
                let skew = gram * m + m.transpose() * gram;
                prop_assert!(max_entry(&skew) < 1e-12, "{} slot {}", case, slot);
            }
        }
    }

    #[test]
    fn so3c_output_is_skew(x in prop::array::uniform6(-3.0f64..3.0)) {
        let mut om = Matrix4::zeros();
        let pairs = [(0, 1), (0, 2), (1, 2), (0, 3), (1, 3), (2, 3)];
        for ((i, j), v) in pairs.into_iter().zip(x) {
            om[(i, j)] = v;
            om[(j, i)] = if j == 3 { v } else { -v };
        }
        let w = so3c_connection_form(&om, 1e-12).unwrap();
        prop_assert!(max_entry(&(w + w.transpose())) < 1e-15);
    }
}
