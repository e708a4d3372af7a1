use num_complex::Complex;
use proptest::prelude::*;
use spinorbit::dynamics::{hamiltonian, H1, H2};
use spinorbit::liepencil::{
    bracket_a, casimir_c1, casimir_c2, jacobi_residual, pauli_lubansky, transversality, CasimirC1, CasimirC2,
    Coordinate, PoincareState,
};
use spinorbit::quadrature::{l_from_w, quartic_coeffs, reduce, reduce_direct};
use spinorbit::twistor::{
    flag_invert, momentum_map_massive, momentum_map_massless, observables_from_coords, pullback, FlagPoint, Mat2C,
    TwistorPoint,
};
use spinorbit::{Params, Vec3};

fn state() -> impl Strategy<Value = PoincareState<f64>> {
    prop::array::uniform10(-2.0..2.0f64).prop_map(|v| PoincareState::from_slice(&v))
}

fn deformation() -> impl Strategy<Value = f64> {
    prop_oneof![Just(-1.0), Just(-0.5), Just(0.0), Just(0.5), Just(1.0), -1.0..=1.0f64]
}

fn cplx() -> impl Strategy<Value = Complex<f64>> {
    (-1.5..1.5f64, -1.5..1.5f64).prop_map(|(re, im)| Complex::new(re, im))
}

fn positive_twistor() -> impl Strategy<Value = TwistorPoint<f64>> {
    (cplx(), cplx(), cplx(), 0.3..3.0f64)
        .prop_map(|(a, b, c, al)| TwistorPoint::new(a, b, c, al))
        .prop_filter("positive", |t| t.delta() > 0.05)
}

fn flag() -> impl Strategy<Value = FlagPoint<f64>> {
    (cplx(), prop::array::uniform4(-1.0..1.0f64), prop::array::uniform3(-0.6..0.6f64), 1.0..2.0f64, any::<bool>(), 0.5..3.0f64, 0.5..3.0f64)
        .prop_filter_map("definite", |(x0, re, im, y0, neg, a1, a2)| {
            let y0 = if neg { -y0 } else { y0 };
            let z = Mat2C::from_four_vector(re) + Mat2C::from_four_vector([y0, im[0], im[1], im[2]]) * Complex::new(0.0, 1.0);
            FlagPoint::new([x0, Complex::new(1.0, 0.0)], z, a1, a2).ok()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pencil_satisfies_jacobi(x in state(), a in deformation(), b in deformation(), eps in -2.0..2.0f64,
                               i in 0..10usize, j in 0..10usize, k in 0..10usize) {
        prop_assert!(jacobi_residual(i, j, k, &x, a, b, eps).abs() < 1e-10);
    }

    #[test]
    fn casimirs_are_central(x in state(), a in deformation(), k in 0..10usize) {
        let scale = 1.0 + x.to_array().iter().fold(0.0f64, |m, v| m.max(v.abs())).powi(3);
        prop_assert!(bracket_a(&CasimirC1(a), &Coordinate(k), &x, a).unwrap().abs() < 1e-12 * scale);
        prop_assert!(bracket_a(&CasimirC2(a), &Coordinate(k), &x, a).unwrap().abs() < 1e-11 * scale);
    }

    #[test]
    fn integrals_commute(x in state(), a in deformation(), b in deformation()) {
        let v = bracket_a(&H1(b), &H2(b), &x, a).unwrap();
        prop_assert!(v.abs() < 1e-9, "{v}");
    }

    #[test]
    fn transversality_holds(x in state(), a in deformation()) {
        let s = pauli_lubansky(&x, a);
        prop_assert!(transversality(x.p0, &x.p, &s, a).abs() < 1e-12);
    }

    #[test]
    fn l_from_w_inverts_pauli_lubansky(x in state()) {
        let s = pauli_lubansky(&x, -1.0);
        prop_assume!(s.w0.abs() > 1e-2);
        // L is determined up to its component along P; fix that through ξ = J·L
        let l = l_from_w(&x.p, &x.j, &s.w, x.j.dot(&x.l)).unwrap();
        let back = pauli_lubansky(&PoincareState::new(x.p0, x.p, l, x.j), -1.0);
        prop_assert!((back.w - s.w).max_abs() < 1e-10 * (1.0 + s.w.max_abs()));
    }

    #[test]
    fn reduction_variants_agree(x in state(), b in deformation()) {
        let p = Params::new(-1.0, b, 1.0, 0.5).unwrap();
        let r = reduce(&x, &p);
        let d = reduce_direct(&x, &p);
        prop_assert!((r.w0 - d.w0).abs() < 1e-12 && (r.z - d.z).abs() < 1e-10 * (1.0 + r.z.abs()));
        prop_assert!((r.y - d.y).abs() < 1e-10 * (1.0 + r.y.abs()));
        let q = quartic_coeffs(&r, &p);
        prop_assert!(q.relative_residual(r.w0, r.p0 * r.z).abs() < 1e-10);
    }

    #[test]
    fn massless_image_is_lightlike_with_helicity(v in positive_twistor()) {
        let m = momentum_map_massless(&v).unwrap();
        let x = m.state;
        let scale = 1.0 + x.p0 * x.p0;
        prop_assert!(casimir_c1(&x, -1.0).abs() < 1e-12 * scale);
        prop_assert!(casimir_c2(&x, -1.0).abs() < 1e-11 * scale * (1.0 + x.j.norm2() + x.l.norm2()));
        let s = pauli_lubansky(&x, -1.0);
        prop_assert!((s.w - x.p * (v.alpha / 2.0)).max_abs() < 1e-12 * scale * (1.0 + v.alpha));
        let c = observables_from_coords(&v).unwrap().state();
        prop_assert!(c.max_abs_diff(&x) < 1e-10 * (1.0 + x.to_array().iter().fold(0.0f64, |a, b| a.max(b.abs()))));
    }

    #[test]
    fn pullback_inverts_coordinates(v in positive_twistor()) {
        let x = observables_from_coords(&v).unwrap().state();
        prop_assume!((x.p0 - x.p[2]).abs() > 1e-3);
        let back = pullback(&x).unwrap();
        let scale = 1.0 + v.zeta1.norm() + v.zeta2.norm() + v.zeta.norm();
        prop_assert!((back.zeta1 - v.zeta1).norm() < 1e-10 * scale);
        prop_assert!((back.zeta2 - v.zeta2).norm() < 1e-10 * scale);
        prop_assert!((back.zeta - v.zeta).norm() < 1e-10 * scale);
        prop_assert!((back.alpha - v.alpha).abs() < 1e-10 * (1.0 + v.alpha));
    }

    #[test]
    fn flag_identities(f in flag()) {
        let img = momentum_map_massive(&f).unwrap();
        let (p, w) = (img.obs.p, img.obs.w);
        prop_assert!((p * w).trace().norm() < 1e-10 * (1.0 + p.max_abs() * w.max_abs()));
        let lhs = w.det();
        let rhs = -p.det() * (f.s() * f.s());
        prop_assert!((lhs - rhs).norm() < 1e-9 * lhs.norm().max(rhs.norm()).max(1e-12));
        let (xs, ys) = f.spacetime();
        let c = flag_invert(&img.state, img.w0, &img.w, img.delta, xs[0]).unwrap();
        let tol = 1e-9 * (1.0 + f.z.max_abs());
        prop_assert!((c.y0 - ys[0]).abs() < tol);
        prop_assert!((c.x - Vec3([xs[1], xs[2], xs[3]])).max_abs() < tol);
        prop_assert!((c.y - Vec3([ys[1], ys[2], ys[3]])).max_abs() < tol);
    }

    #[test]
    fn hamiltonian_combines_integrals(x in state(), b in deformation(), c in -2.0..2.0f64, d in -2.0..2.0f64) {
        let p = Params::new(-1.0, b, c, d).unwrap();
        let h = hamiltonian(&x, &p);
        prop_assert!((h.h - 0.5 * (c * h.h1 + d * h.h2)).abs() < 1e-12 * (1.0 + h.h.abs()));
    }
}
