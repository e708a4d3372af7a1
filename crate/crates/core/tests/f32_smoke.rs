// The library is generic over the scalar; exercise the main entry points in f32.

use num_complex::Complex;
use spinorbit::dynamics::{conservation_audit, integrate, ChartPoint, IntegrateOptions};
use spinorbit::liepencil::{casimir_c1, jacobi_residual, PencilParams, PoincareState};
use spinorbit::quadrature::{quartic_coeffs, reduce};
use spinorbit::twistor::{momentum_map_massless, TwistorPoint};
use spinorbit::Vec3;

fn state() -> PoincareState<f32> {
    PoincareState::new(2.0, Vec3([0.3, -0.4, 0.5]), Vec3([0.2, 0.1, -0.3]), Vec3([0.4, -0.2, 0.6]))
}

#[test]
fn flow_in_single_precision() {
    let p = PencilParams::<f32>::new(-1.0, 0.3, 1.0, 0.5).unwrap();
    let opts = IntegrateOptions { rel_tol: 1e-5, abs_tol: 1e-6, samples: 11, ..Default::default() };
    let tr = integrate(&ChartPoint::Pl(state()), &p, (0.0, 1.0), &opts).unwrap();
    let rep = conservation_audit(&tr, &p);
    assert!(rep.max_rel_drift() < 1e-3, "{}", rep.max_rel_drift());
}

#[test]
fn brackets_and_quartic_in_single_precision() {
    let x = state();
    assert!(jacobi_residual(0, 4, 8, &x, -1.0f32, 0.5, 0.3).abs() < 1e-5);
    let p = PencilParams::<f32>::new(-1.0, 0.3, 1.0, 0.5).unwrap();
    let r = reduce(&x, &p);
    assert!(quartic_coeffs(&r, &p).relative_residual(r.w0, r.p0 * r.z).abs() < 1e-4);
}

#[test]
fn twistor_in_single_precision() {
    let v = TwistorPoint::new(Complex::new(0.3f32, 0.1), Complex::new(-0.2, -0.4), Complex::new(0.5, -0.3), 1.5);
    let m = momentum_map_massless(&v).unwrap();
    assert!(casimir_c1(&m.state, -1.0).abs() < 1e-4 * (1.0 + m.state.p0 * m.state.p0));
}
