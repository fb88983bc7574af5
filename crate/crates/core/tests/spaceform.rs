use proptest::prelude::*;
use spaceform::presets;
use spaceform::spaceform::*;
use spaceform::{Error, Grid};

fn grid() -> Grid {
    Grid::square(-1.0, 1.0, 9).unwrap()
}

#[test]
fn ambient_examples() {
    let m = ambient_model(SurfaceCase::Riem, -1.0);
    assert_eq!(m.ambient.label(), "E5_1");
    assert_eq!(m.quadric_const, Some(-1.0));
    let m = ambient_model(SurfaceCase::LorSpace, 0.0);
    assert_eq!(m.ambient.label(), "E4_1");
    assert_eq!(m.quadric_const, None);
    assert_eq!(ambient_model(SurfaceCase::NeutSpace, 1.0).ambient.label(), "E5_2");
    assert_eq!(ambient_model(SurfaceCase::NeutSpace, -1.0).ambient.label(), "E5_3");
    assert_eq!(ambient_model(SurfaceCase::LorTime, -2.0).ambient.label(), "E5_2");
    assert_eq!(ambient_model(SurfaceCase::Riem, 3.0).ambient.label(), "E5");
}

#[test]
fn zero_data_unit_entries() {
    let d = presets::zero(SurfaceCase::Riem, 0.0, &grid());
    let p = build_connection_matrices(&d, 3, 4).unwrap();
    let mut s = nalgebra::Matrix5::zeros();
    s[(0, 4)] = 1.0;
    let mut t = nalgebra::Matrix5::zeros();
    t[(1, 4)] = 1.0;
    assert_eq!(p.s, s);
    assert_eq!(p.t, t);
}

#[test]
fn curvature_entries_on_the_last_row() {
    let d = presets::zero(SurfaceCase::Riem, 1.0, &grid());
    let p = build_connection_matrices(&d, 0, 0).unwrap();
    assert_eq!(p.s[(4, 0)], -1.0);
    assert_eq!(p.t[(4, 1)], -1.0);
    assert_eq!(p.s.iter().filter(|x| **x != 0.0).count(), 2);
}

#[test]
fn sphere_entries() {
    let g = Grid::square(-1.0, 1.0, 21).unwrap();
    let d = presets::sphere(&g);
    let (i, j) = (7, 12);
    let p = build_connection_matrices(&d, i, j).unwrap();
    let (u, v) = (g.u(i), g.v(j));
    let e = 2.0 / (1.0 + u * u + v * v);
    assert!((p.s[(2, 0)] + e).abs() < 1e-14);
    assert!((p.s[(0, 2)] - e).abs() < 1e-14);
    assert!((p.t[(2, 1)] + e).abs() < 1e-14);
    assert!(matches!(build_connection_matrices(&d, 21, 0), Err(Error::IndexOutOfRange { .. })));
}

#[test]
fn validate_frame_examples() {
    let m = ambient_model(SurfaceCase::Riem, 0.0);
    let f = Frame::identity();
    assert_eq!(validate_frame(&f, 0.0, &m).max_abs(), 0.0);

    // admissible neutral time-like frame, then N2 replaced by a space-like vector
    let m = ambient_model(SurfaceCase::NeutTime, 0.0);
    let mut f = Frame::zeros();
    f[(0, 0)] = 1.0;
    f[(2, 1)] = 1.0;
    f[(1, 2)] = 1.0;
    f[(3, 3)] = 1.0;
    assert_eq!(validate_frame(&f, 0.0, &m).max_abs(), 0.0);
    f[(3, 3)] = 0.0;
    f[(1, 3)] = 1.0;
    f[(1, 2)] = 0.0;
    f[(0, 2)] = 0.0;
    let r = validate_frame(&f, 0.0, &m);
    assert_eq!(r.pairs[9], -2.0);

    let m = ambient_model(SurfaceCase::Riem, 1.0);
    let mut f = Frame::identity();
    f[(4, 4)] = 1.0;
    assert_eq!(validate_frame(&f, 0.0, &m).quadric, Some(0.0));
}

#[test]
fn grid_and_field_validation() {
    assert!(Grid::new(0.0, 0.0, 0.1, 0.1, 2, 5).is_err());
    assert!(Grid::new(0.0, 0.0, -0.1, 0.1, 5, 5).is_err());
    let g = grid();
    let mut f: [Vec<f64>; 9] = std::array::from_fn(|_| vec![0.0; g.len()]);
    f[3][4] = f64::NAN;
    let m = ambient_model(SurfaceCase::Riem, 0.0);
    assert!(matches!(FundamentalData::from_fields(m.clone(), g, f), Err(Error::InvalidField { .. })));
    let f: [Vec<f64>; 9] = std::array::from_fn(|k| vec![0.0; g.len() - (k == 2) as usize]);
    assert!(FundamentalData::from_fields(m, g, f).is_err());
}

#[test]
fn case_names_round_trip() {
    for c in SurfaceCase::ALL {
        assert_eq!(c.tag().parse::<SurfaceCase>().unwrap(), c);
    }
    assert!("hyperbolic".parse::<SurfaceCase>().is_err());
}

fn case() -> impl Strategy<Value = SurfaceCase> {
    prop::sample::select(SurfaceCase::ALL.to_vec())
}

fn coeffs() -> impl Strategy<Value = Coeffs> {
    (prop::array::uniform3(-3.0f64..3.0), prop::array::uniform3(-3.0f64..3.0), prop::array::uniform2(-3.0f64..3.0), -2.0f64..2.0, -2.0f64..2.0, 0.1f64..4.0)
        .prop_map(|(a, b, m, lu, lv, e2l)| Coeffs { lu, lv, e2l, a, b, m })
}

proptest! {
    #[test]
    fn tangent_normal_diagonal_is_lambda_derivative(case in case(), c in coeffs(), l0 in -2.0f64..2.0) {
        let p = assemble(case, l0, &c, 1.0);
        for k in 0..4 {
            prop_assert_eq!(p.s[(k, k)], c.lu);
            prop_assert_eq!(p.t[(k, k)], c.lv);
        }
        // the F column carries only the unit insertion
        for r in 0..5 {
            prop_assert_eq!(p.s[(r, 4)], if r == 0 { 1.0 } else { 0.0 });
            prop_assert_eq!(p.t[(r, 4)], if r == 1 { 1.0 } else { 0.0 });
        }
        prop_assert_eq!(p.s[(4, 0)], -l0 * c.e2l);
        prop_assert_eq!(p.t[(4, 0)], 0.0);
        prop_assert_eq!(p.t[(4, 1)].abs(), (l0 * c.e2l).abs());
    }

    #[test]
    fn linear_in_shape_fields(case in case(), c1 in coeffs(), c2 in coeffs(), t in -2.0f64..2.0) {
        let mut c2 = c2;
        c2.lu = c1.lu;
        c2.lv = c1.lv;
        c2.e2l = c1.e2l;
        let mix = Coeffs {
            a: std::array::from_fn(|k| c1.a[k] + t * c2.a[k]),
            b: std::array::from_fn(|k| c1.b[k] + t * c2.b[k]),
            m: std::array::from_fn(|k| c1.m[k] + t * c2.m[k]),
            ..c1
        };
        let zero = Coeffs { a: [0.0; 3], b: [0.0; 3], m: [0.0; 2], ..c1 };
        let base = assemble(case, 1.0, &zero, 1.0);
        let p1 = assemble(case, 1.0, &c1, 1.0);
        let p2 = assemble(case, 1.0, &c2, 1.0);
        let pm = assemble(case, 1.0, &mix, 1.0);
        let want = p1.s + (p2.s - base.s) * t;
        prop_assert!((pm.s - want).amax() < 1e-12);
        let want = p1.t + (p2.t - base.t) * t;
        prop_assert!((pm.t - want).amax() < 1e-12);
    }
}
