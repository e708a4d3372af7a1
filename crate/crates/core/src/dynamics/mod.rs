//! The Hamiltonian `h = (c h₁ + d h₂)/2`, its flow in the PL, PW, reduced,
//! angle and twistor charts, an adaptive integrator and a conservation audit.

mod fields;
pub mod ode;
mod trajectory;

pub use fields::{printed_angle_rates, vf_angles, vf_pl, vf_pw, vf_reduced, PwState};
pub use trajectory::{
    conservation_audit, integrate, integrate_at, integrate_partial, AnglesState, AuditRecord,
    AuditReport, Chart, ChartPoint, Drift, IntegrateOptions, PartialTrajectory, Trajectory,
};

use crate::liepencil::{c2_gradient, casimir_c1, casimir_c2, Observable, PencilParams, PoincareState, STATE_DIM};
use crate::scalar::Real;

/// `h` together with the two integrals it is built from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HamiltonianValue<T> {
    pub h: T,
    pub h1: T,
    pub h2: T,
}

/// `h₁ = b(P⁰)² + P·P`, the first Casimir of `{·,·}_b`.
pub fn h1<T: Real>(x: &PoincareState<T>, b: T) -> T {
    casimir_c1(x, b)
}

/// `h₂ = b(P·J)² + |bP⁰J + L×P|²`, the second Casimir of `{·,·}_b`.
pub fn h2<T: Real>(x: &PoincareState<T>, b: T) -> T {
    casimir_c2(x, b)
}

pub fn hamiltonian<T: Real>(x: &PoincareState<T>, params: &PencilParams<T>) -> HamiltonianValue<T> {
    let v1 = h1(x, params.b);
    let v2 = h2(x, params.b);
    HamiltonianValue { h: (params.c * v1 + params.d * v2) * T::half(), h1: v1, h2: v2 }
}

/// `(b−a)/2·(c(P⁰)² + d(b−a)(P⁰)²J² − (d/a)W² + 2dP⁰W·J)` with the
/// Pauli–Lubansky vector taken at deformation `a`. Undefined for `a = 0`.
///
/// This differs from [`hamiltonian`] by the Casimir combination
/// `(c·c₁ + (b/a)·d·c₂)/2`, so both generate the same flow.
pub fn hamiltonian_third_expression<T: Real>(x: &PoincareState<T>, params: &PencilParams<T>) -> Option<T> {
    let PencilParams { a, b, c, d } = *params;
    if a == T::zero() {
        return None;
    }
    let w = crate::liepencil::pauli_lubansky(x, a).w;
    let p0 = x.p0;
    let g = b - a;
    Some(g * T::half() * (c * p0 * p0 + d * g * p0 * p0 * x.j.norm2() - d / a * w.norm2() + T::two() * d * p0 * w.dot(&x.j)))
}

/// `h₁` as an observable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct H1<T>(pub T);

impl<T: Real> Observable<T> for H1<T> {
    fn value(&self, x: &PoincareState<T>) -> T {
        h1(x, self.0)
    }
    fn gradient(&self, x: &PoincareState<T>) -> Option<[T; STATE_DIM]> {
        crate::liepencil::CasimirC1(self.0).gradient(x)
    }
}

/// `h₂` as an observable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct H2<T>(pub T);

impl<T: Real> Observable<T> for H2<T> {
    fn value(&self, x: &PoincareState<T>) -> T {
        h2(x, self.0)
    }
    fn gradient(&self, x: &PoincareState<T>) -> Option<[T; STATE_DIM]> {
        Some(c2_gradient(x, self.0))
    }
}

/// The Hamiltonian `h` as an observable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hamiltonian<T>(pub PencilParams<T>);

impl<T: Real> Observable<T> for Hamiltonian<T> {
    fn value(&self, x: &PoincareState<T>) -> T {
        hamiltonian(x, &self.0).h
    }
    fn gradient(&self, x: &PoincareState<T>) -> Option<[T; STATE_DIM]> {
        let p = &self.0;
        let g1 = H1(p.b).gradient(x)?;
        let g2 = c2_gradient(x, p.b);
        let mut g = [T::zero(); STATE_DIM];
        for i in 0..STATE_DIM {
            g[i] = (p.c * g1[i] + p.d * g2[i]) * T::half();
        }
        Some(g)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liepencil::{bracket_a, casimir_c2};
    use crate::vec3::Vec3;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_state(rng: &mut ChaCha8Rng) -> PoincareState<f64> {
        let v: Vec<f64> = (0..STATE_DIM).map(|_| rng.gen_range(-1.5..1.5)).collect();
        PoincareState::from_slice(&v)
    }

    #[test]
    fn h1_examples() {
        let x = PoincareState::new(1.0, Vec3([1.0, 0.0, 0.0]), Vec3::zero(), Vec3::zero());
        assert_eq!(h1(&x, -1.0), 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let x = random_state(&mut rng);
        assert_eq!(h1(&x, 0.0), x.p.norm2());
        assert_eq!(h1(&x, 0.4), casimir_c1(&x, 0.4));
    }

    #[test]
    fn h2_examples() {
        let x = PoincareState::new(1.0, Vec3([1.0, 2.0, 0.0]), Vec3::zero(), Vec3::zero());
        assert_eq!(h2(&x, 0.3), 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let x = random_state(&mut rng);
        assert_eq!(h2(&x, -0.5), casimir_c2(&x, -0.5));
        let jp = x.p.dot(&x.j);
        let v = x.j * (0.3 * x.p0) + x.l.cross(&x.p);
        assert!((h2(&x, 0.3) - (0.3 * jp * jp + v.norm2())).abs() < 1e-13);
    }

    #[test]
    fn involution_at_random_states() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let x = random_state(&mut rng);
            let a = rng.gen_range(-1.0..=1.0);
            let b = rng.gen_range(-1.0..=1.0);
            assert!(bracket_a(&H1(b), &H2(b), &x, a).unwrap().abs() < 1e-9);
        }
    }

    #[test]
    fn hamiltonian_special_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let x = random_state(&mut rng);
        let zero = PencilParams::new(-1.0, 0.3, 0.0, 0.0).unwrap();
        assert_eq!(hamiltonian(&x, &zero).h, 0.0);
        let p = PencilParams::new(-1.0, 0.3, 2.0, 0.0).unwrap();
        let want = 1.0 * (0.3 * x.p0 * x.p0 + x.p.norm2());
        assert!((hamiltonian(&x, &p).h - want).abs() < 1e-14);
    }

    #[test]
    fn third_expression_differs_by_casimirs() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let p = PencilParams::new(-1.0, 0.3, 1.0, 0.5).unwrap();
        for _ in 0..50 {
            let x = random_state(&mut rng);
            let h = hamiltonian(&x, &p).h;
            let h3 = hamiltonian_third_expression(&x, &p).unwrap();
            let shift = (p.c * casimir_c1(&x, p.a) + p.b / p.a * p.d * casimir_c2(&x, p.a)) / 2.0;
            assert!((h - h3 - shift).abs() < 1e-9 * (1.0 + h.abs()));
        }
        let galilei = PencilParams::new(0.0, 0.3, 1.0, 0.5).unwrap();
        assert!(hamiltonian_third_expression(&random_state(&mut rng), &galilei).is_none());
    }

    #[test]
    fn hamiltonian_gradient_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let p = PencilParams::new(-0.4, 0.7, 1.3, -0.6).unwrap();
        let x = random_state(&mut rng);
        let g = Hamiltonian(p).gradient(&x).unwrap();
        let fd = crate::liepencil::central_difference_gradient(
            &crate::liepencil::FnObservable::new(move |s: &PoincareState<f64>| hamiltonian(s, &p).h),
            &x,
        );
        for k in 0..STATE_DIM {
            assert!((g[k] - fd[k]).abs() < 1e-6);
        }
    }
}
