use super::{gauss_kronrod, ReducedState};
use crate::dynamics::{AnglesState, PwState, Trajectory};
use crate::error::{Error, Result};
use crate::liepencil::{PencilParams, PoincareState};
use crate::scalar::Real;
use crate::vec3::Vec3;

const GEOMETRY_TOL: f64 = 1e-8;

/// Rebuilds `(P, W)` with `J = (0, 0, |J|)` from reduced coordinates and the
/// polar angles of the transverse parts:
/// `P = (ρ_P cos φ, ρ_P sin φ, −W⁰/|J|)`, `W = (ρ_W cos ψ, ρ_W sin ψ, y/|J|)`.
///
/// Fails with `GeometricInconsistency` when the angles disagree with `z` or
/// with `aP⁰W⁰ + P·W = 0`.
pub fn reconstruct_pw<T: Real>(r: &ReducedState<T>, phi: T, psi: T, params: &PencilParams<T>) -> Result<PwState<T>> {
    let a = params.a;
    let j = r.jmag2.sqrt();
    if !(j > T::zero()) {
        return Err(Error::UndefinedChart { reason: "J = 0" });
    }
    let rp2 = r.c1 - a * r.p0 * r.p0 - r.w0 * r.w0 / r.jmag2;
    let rw2 = r.c2 - a * r.w0 * r.w0 - r.y * r.y / r.jmag2;
    let tol = T::lit(GEOMETRY_TOL);
    let scale = T::one().max(r.c1.abs()).max(r.c2.abs());
    if rp2 < -tol * scale {
        return Err(Error::GeometricInconsistency { value: rp2.as_f64() });
    }
    if rw2 < -tol * scale {
        return Err(Error::GeometricInconsistency { value: rw2.as_f64() });
    }
    let (rp, rw) = (rp2.max(T::zero()).sqrt(), rw2.max(T::zero()).sqrt());
    let p = Vec3([rp * phi.cos(), rp * phi.sin(), -r.w0 / j]);
    let w = Vec3([rw * psi.cos(), rw * psi.sin(), r.y / j]);
    let jv = Vec3([T::zero(), T::zero(), j]);
    let s = PwState { p0: r.p0, j: jv, p, w };

    let z_mismatch = jv.dot(&p.cross(&w)) - r.z;
    let transverse = a * r.p0 * r.w0 + p.dot(&w);
    let zscale = T::one().max(j * rp * rw);
    if z_mismatch.abs() > tol * zscale {
        return Err(Error::GeometricInconsistency { value: z_mismatch.as_f64() });
    }
    if transverse.abs() > tol * zscale {
        return Err(Error::GeometricInconsistency { value: transverse.as_f64() });
    }
    Ok(s)
}

/// Polar angles `(φ, ψ)` of the transverse parts of `P` and `W`. Needs
/// `J = (0, 0, |J|)` with `|J| > 0`.
pub fn extract_angles<T: Real>(s: &PwState<T>) -> Result<(T, T)> {
    if s.j[0] != T::zero() || s.j[1] != T::zero() || !(s.j[2] > T::zero()) {
        return Err(Error::UndefinedChart { reason: "J must point along +e3" });
    }
    Ok((s.p[1].atan2(s.p[0]), s.w[1].atan2(s.w[0])))
}

/// The angle-chart point of a state with `J = (0, 0, |J|)`.
pub fn angles_state<T: Real>(x: &PoincareState<T>, params: &PencilParams<T>) -> Result<AnglesState<T>> {
    let s = PwState::from_state(x, params.a);
    let (phi, psi) = extract_angles(&s)?;
    Ok(AnglesState { reduced: super::reduce_pw(&s, params), phi, psi })
}

/// `L = −(J×W + ξP)/W⁰` with `ξ = J·L`, inverting `W = aP⁰J + L×P` on the
/// slice `W⁰ = −J·P ≠ 0`.
pub fn l_from_w<T: Real>(p: &Vec3<T>, j: &Vec3<T>, w: &Vec3<T>, xi: T) -> Result<Vec3<T>> {
    let w0 = -j.dot(p);
    if w0 == T::zero() || !w0.is_finite() {
        return Err(Error::ChartSingularity { what: "W0", value: w0.as_f64() });
    }
    Ok(-(j.cross(w) + *p * xi) * (T::one() / w0))
}

/// `d(ξ/W⁰)/dt`, which depends on the reduced coordinates only.
pub fn xi_rate<T: Real>(r: &ReducedState<T>, params: &PencilParams<T>) -> T {
    let PencilParams { a, b, c, d } = *params;
    let g = b - a;
    let w2 = r.w0 * r.w0;
    g * r.p0 * (-c * w2 + d * (-g * r.jmag2 * w2 - r.jmag2 * r.c2 + r.y * r.y)) / w2
}

/// `ξ(t) = J·L(t)` along a trajectory, given `ξ` at its start:
/// `ξ(t) = W⁰(t)(ξ₀/W⁰(t₀) + ∫ d(ξ/W⁰)/dt)`.
///
/// Fails with `DivisionSingularity` if `W⁰` vanishes on the way.
pub fn xi_of_t<T: Real>(traj: &Trajectory<T>, t: T, xi0: T) -> Result<T> {
    let params = traj.params;
    let t0 = traj.t_start();
    let r0 = traj.reduced_at(t0)?;
    let rt = traj.reduced_at(t)?;
    if t == t0 {
        return Ok(xi0);
    }
    let (lo, hi) = (t0.min(t), t0.max(t));
    let mut knots: Vec<T> = traj.mesh().into_iter().filter(|&m| m > lo && m < hi).collect();
    knots.insert(0, lo);
    knots.push(hi);
    let sign0 = r0.w0.signum();
    for &k in &knots {
        let w0 = traj.reduced_at(k)?.w0;
        if w0 == T::zero() || w0.signum() != sign0 {
            return Err(Error::DivisionSingularity { t: k.as_f64() });
        }
    }
    let mut failure = None;
    let mut total = T::zero();
    for pair in knots.windows(2) {
        let f = |s: T| match traj.reduced_at(s) {
            Ok(r) => xi_rate(&r, &params),
            Err(e) => {
                failure.get_or_insert(e);
                T::zero()
            }
        };
        total += gauss_kronrod::integrate(f, pair[0], pair[1], T::lit(1e-14), T::lit(1e-12))?.value;
    }
    if let Some(e) = failure {
        return Err(e);
    }
    if t < t0 {
        total = -total;
    }
    Ok(rt.w0 * (xi0 / r0.w0 + total))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{integrate, ChartPoint, IntegrateOptions};
    use crate::liepencil::pauli_lubansky;
    use crate::quadrature::reduce;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn state_along_e3(rng: &mut ChaCha8Rng) -> PoincareState<f64> {
        let v = |rng: &mut ChaCha8Rng| Vec3([rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)]);
        PoincareState::new(rng.gen_range(0.5..1.5), v(rng), v(rng), Vec3([0.0, 0.0, rng.gen_range(0.5..1.5)]))
    }

    #[test]
    fn angles_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for &(a, b) in &[(-1.0, 0.3), (0.4, -0.2), (0.0, 1.0)] {
            let p = PencilParams::new(a, b, 1.0, 0.5).unwrap();
            for _ in 0..20 {
                let x = state_along_e3(&mut rng);
                let ang = angles_state(&x, &p).unwrap();
                let s = reconstruct_pw(&ang.reduced, ang.phi, ang.psi, &p).unwrap();
                let orig = PwState::from_state(&x, a);
                assert!((s.p - orig.p).max_abs() < 1e-9);
                assert!((s.w - orig.w).max_abs() < 1e-9);
            }
        }
    }

    #[test]
    fn inconsistent_angles_are_rejected() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let p = PencilParams::new(-1.0, 0.3, 1.0, 0.5).unwrap();
        let x = state_along_e3(&mut rng);
        let ang = angles_state(&x, &p).unwrap();
        let err = reconstruct_pw(&ang.reduced, ang.phi + 0.7, ang.psi, &p);
        assert!(matches!(err, Err(Error::GeometricInconsistency { .. })));
    }

    #[test]
    fn tilted_j_has_no_angle_chart() {
        let x = PoincareState::new(1.0, Vec3([0.1, 0.2, 0.3]), Vec3([0.0, 0.1, 0.0]), Vec3([0.1, 0.0, 1.0]));
        let p = PencilParams::new(-1.0, 0.3, 1.0, 0.5).unwrap();
        assert!(matches!(angles_state(&x, &p), Err(Error::UndefinedChart { .. })));
    }

    #[test]
    fn l_from_w_inverts_pauli_lubansky() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..50 {
            let a = rng.gen_range(-1.0..1.0);
            let v: Vec<f64> = (0..10).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let x = PoincareState::from_slice(&v);
            let s = pauli_lubansky(&x, a);
            if s.w0.abs() < 1e-3 {
                continue;
            }
            let l = l_from_w(&x.p, &x.j, &s.w, x.j.dot(&x.l)).unwrap();
            assert!((l - x.l).max_abs() < 1e-9 / s.w0.abs());
        }
        let j = Vec3([0.0, 0.0, 1.0]);
        let p = Vec3([1.0, 0.0, 0.0]);
        assert!(matches!(l_from_w(&p, &j, &p, 0.0), Err(Error::ChartSingularity { .. })));
    }

    #[test]
    fn xi_of_t_matches_flow() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        for &(c, d) in &[(1.0, 0.5), (0.7, 0.0)] {
            let p = PencilParams::new(-1.0, 0.3, c, d).unwrap();
            let mut tries = 0;
            loop {
                tries += 1;
                assert!(tries < 200);
                let x = state_along_e3(&mut rng);
                let tr = integrate(&ChartPoint::Pl(x), &p, (0.0, 4.0), &IntegrateOptions::default()).unwrap();
                let w0s: Vec<f64> = tr.points.iter().map(|q| reduce(&q.to_poincare().unwrap(), &p).w0).collect();
                let sign = w0s[0].signum();
                if w0s.iter().any(|w| w.signum() != sign || w.abs() < 0.05) {
                    continue;
                }
                for (k, pt) in tr.points.iter().enumerate().step_by(10) {
                    let xs = pt.to_poincare().unwrap();
                    let xi = xi_of_t(&tr, tr.times[k], x.j.dot(&x.l)).unwrap();
                    assert!((xi - xs.j.dot(&xs.l)).abs() < 1e-7, "{xi} vs {}", xs.j.dot(&xs.l));
                }
                break;
            }
        }
    }

    #[test]
    fn xi_of_t_reports_vanishing_w0() {
        // P ⟂ J and d = 0: W⁰ ≡ 0
        let x = PoincareState::new(1.0, Vec3([0.4, 0.1, 0.0]), Vec3([0.1, 0.3, 0.2]), Vec3([0.0, 0.0, 1.0]));
        let p = PencilParams::new(-1.0, 0.3, 1.0, 0.0).unwrap();
        let tr = integrate(&ChartPoint::Pl(x), &p, (0.0, 1.0), &IntegrateOptions::default()).unwrap();
        assert!(matches!(xi_of_t(&tr, 0.5, 0.2), Err(Error::DivisionSingularity { .. })));
    }
}
