//! Closed-form layer of the flow: the quartic first integral for `W⁰`, the
//! quadrature time map, reconstruction of `(P, W, L)`, the `ξ(t)` integral and
//! the particle worldline.

pub mod gauss_kronrod;
mod reconstruct;
mod worldline;

pub use reconstruct::{angles_state, extract_angles, l_from_w, reconstruct_pw, xi_of_t, xi_rate};
pub use worldline::{worldline_x, Worldline, WorldlineConfig};

use crate::dynamics::PwState;
use crate::error::{Error, Result};
use crate::liepencil::{pauli_lubansky, PencilParams, PoincareState};
use crate::scalar::Real;

/// `(W⁰, y, z)` with `y = J·W`, `z = J·(P×W)`, plus the integrals frozen by the flow.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ReducedState<T> {
    pub w0: T,
    pub y: T,
    pub z: T,
    pub p0: T,
    pub jmag2: T,
    pub c1: T,
    pub c2: T,
    pub h2: T,
    pub beta: T,
}

/// Coefficients of `(P⁰z)² = q₄(W⁰)⁴ + q₂(W⁰)² + q₀`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuarticCoeffs<T> {
    pub q4: T,
    pub q2: T,
    pub q0: T,
}

impl<T: Real> QuarticCoeffs<T> {
    pub fn eval(&self, w0: T) -> T {
        let u = w0 * w0;
        (self.q4 * u + self.q2) * u + self.q0
    }

    /// `((P⁰z)² − Q(W⁰))` relative to the largest of its terms.
    pub fn relative_residual(&self, w0: T, p0z: T) -> T {
        let u = w0 * w0;
        let lhs = p0z * p0z;
        let scale = self.q0.abs().max((self.q2 * u).abs()).max((self.q4 * u * u).abs()).max(lhs).max(T::min_positive_value());
        (lhs - self.eval(w0)) / scale
    }

    /// Real roots of `Q(W) = 0`, sorted, with multiplicity flags.
    pub fn real_roots(&self) -> Vec<QuarticRoot<T>> {
        let mut out = Vec::new();
        let mut push_u = |u: T, double: bool| {
            if u > T::zero() {
                let r = u.sqrt();
                out.push(QuarticRoot { w: -r, double });
                out.push(QuarticRoot { w: r, double });
            } else if u == T::zero() {
                out.push(QuarticRoot { w: T::zero(), double: true });
            }
        };
        let (a, b, c) = (self.q4, self.q2, self.q0);
        if a == T::zero() {
            if b != T::zero() {
                push_u(-c / b, false);
            }
        } else {
            let disc = b * b - T::lit(4.0) * a * c;
            let scale = (b * b).max((T::lit(4.0) * a * c).abs()).max(T::min_positive_value());
            if disc.abs() <= T::lit(64.0) * T::epsilon() * scale {
                push_u(-b / (T::two() * a), true);
            } else if disc > T::zero() {
                // stable quadratic roots
                let s = disc.sqrt();
                let qq = -(b + b.signum() * s) * T::half();
                let u1 = qq / a;
                let u2 = if qq != T::zero() { c / qq } else { -u1 };
                push_u(u1, false);
                push_u(u2, false);
            }
        }
        out.sort_by(|x, y| x.w.partial_cmp(&y.w).unwrap_or(std::cmp::Ordering::Equal));
        out
    }

    /// `Q(W)/(W − r)` for a simple root `r` of `Q`.
    fn deflated(&self, r: T, w: T) -> T {
        if self.q4 == T::zero() {
            return self.q2 * (w + r);
        }
        // Q = q₄(W² − r²)(W² − u'), with u'·r² = q₀/q₄ and u' + r² = −q₂/q₄
        let u_other = -self.q2 / self.q4 - r * r;
        self.q4 * (w + r) * (w * w - u_other)
    }
}

/// A real root `W` of the quartic; `double` marks a multiple root.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuarticRoot<T> {
    pub w: T,
    pub double: bool,
}

impl<T: Real> ReducedState<T> {
    /// Reduced point from its coordinates and frozen data; `β` is computed.
    #[allow(clippy::too_many_arguments)]
    pub fn from_parts(w0: T, y: T, z: T, p0: T, jmag2: T, c1: T, c2: T, h2: T, params: &PencilParams<T>) -> Self {
        freeze(w0, y, z, p0, jmag2, c1, c2, h2, params)
    }
}

#[allow(clippy::too_many_arguments)]
fn freeze<T: Real>(w0: T, y: T, z: T, p0: T, jmag2: T, c1: T, c2: T, h2: T, params: &PencilParams<T>) -> ReducedState<T> {
    let mut r = ReducedState { w0, y, z, p0, jmag2, c1, c2, h2, beta: T::zero() };
    let q = quartic_coeffs(&r, params);
    let p0z = p0 * z;
    let u = w0 * w0;
    r.beta = p0z * p0z - q.q4 * u * u - q.q2 * u;
    r
}

/// Reduced coordinates of a state, with `β` fixed by it.
pub fn reduce<T: Real>(x: &PoincareState<T>, params: &PencilParams<T>) -> ReducedState<T> {
    reduce_pw(&PwState::from_state(x, params.a), params)
}

/// Reduced coordinates of a point of the `(P, W)` chart.
pub fn reduce_pw<T: Real>(s: &PwState<T>, params: &PencilParams<T>) -> ReducedState<T> {
    let (a, b) = (params.a, params.b);
    let w0 = s.w0();
    let y = s.j.dot(&s.w);
    let z = s.j.dot(&s.p.cross(&s.w));
    let c1 = a * s.p0 * s.p0 + s.p.norm2();
    let c2 = a * w0 * w0 + s.w.norm2();
    let h2 = b * w0 * w0 + (s.w + s.j * ((b - a) * s.p0)).norm2();
    freeze(w0, y, z, s.p0, s.j.norm2(), c1, c2, h2, params)
}

/// Same as [`reduce`] but computing `W` directly; used by tests as a cross-check.
pub fn reduce_direct<T: Real>(x: &PoincareState<T>, params: &PencilParams<T>) -> ReducedState<T> {
    let s = pauli_lubansky(x, params.a);
    let y = x.j.dot(&s.w);
    let z = x.j.dot(&x.p.cross(&s.w));
    freeze(
        s.w0,
        y,
        z,
        x.p0,
        x.j.norm2(),
        crate::liepencil::casimir_c1(x, params.a),
        crate::liepencil::casimir_c2(x, params.a),
        crate::dynamics::h2(x, params.b),
        params,
    )
}

/// `K = P⁰y + (W⁰)²/2`, expressed through the frozen integrals when `b ≠ a`.
fn k_constant<T: Real>(r: &ReducedState<T>, params: &PencilParams<T>) -> T {
    let g = params.b - params.a;
    if g == T::zero() {
        r.p0 * r.y + r.w0 * r.w0 * T::half()
    } else {
        (r.h2 - r.c2) / (T::two() * g) - g * r.p0 * r.p0 * r.jmag2 * T::half()
    }
}

/// Quartic coefficients obtained by integrating `z dz` along the reduced flow
/// with `y` eliminated. `q₄ = −(c₁ − a(P⁰)²)/4 = −|P|²/4`.
pub fn quartic_coeffs<T: Real>(r: &ReducedState<T>, params: &PencilParams<T>) -> QuarticCoeffs<T> {
    let a = params.a;
    let p02 = r.p0 * r.p0;
    let q4 = -(r.c1 - a * p02) / T::lit(4.0);
    let q2 = -r.c2 * p02 - r.c1 * a * p02 * r.jmag2 + (r.c1 + a * p02) * k_constant(r, params);
    QuarticCoeffs { q4, q2, q0: r.beta }
}

/// The coefficients as printed with the closed-form solution, kept for comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrintedQuartic<T> {
    /// Leading coefficient under the radical of `z(t)`: `−(c₁ + a(P⁰)²)/4`.
    pub q4_z: T,
    /// Leading coefficient under the radical of the time integral: `−c₁/4`.
    pub q4_t: T,
    /// `c₁(h₂ − c₂ − (b² − a²)(P⁰)²J²)/(2(b − a))`.
    pub q2: T,
}

pub fn printed_quartic_coeffs<T: Real>(r: &ReducedState<T>, params: &PencilParams<T>) -> PrintedQuartic<T> {
    let (a, b) = (params.a, params.b);
    let p02 = r.p0 * r.p0;
    PrintedQuartic {
        q4_z: -(r.c1 + a * p02) / T::lit(4.0),
        q4_t: -r.c1 / T::lit(4.0),
        q2: r.c1 * (r.h2 - r.c2 - (b * b - a * a) * p02 * r.jmag2) / (T::two() * (b - a)),
    }
}

/// `y = −(W⁰)²/(2P⁰) + (h₂ − c₂)/(2P⁰(b−a)) − (b−a)P⁰|J|²/2`.
pub fn y_of_w0<T: Real>(w0: T, r: &ReducedState<T>, params: &PencilParams<T>) -> Result<T> {
    let g = params.b - params.a;
    if r.p0 == T::zero() {
        return Err(Error::UndefinedChart { reason: "P0 = 0" });
    }
    if g == T::zero() {
        return Err(Error::UndefinedChart { reason: "b = a" });
    }
    Ok(-w0 * w0 / (T::two() * r.p0) + (r.h2 - r.c2) / (T::two() * r.p0 * g) - g * r.p0 * r.jmag2 * T::half())
}

/// `z = branch·√Q(W⁰)/P⁰`; `branch` is `+1` or `−1`.
pub fn z_of_w0<T: Real>(w0: T, r: &ReducedState<T>, params: &PencilParams<T>, branch: T) -> Result<T> {
    if r.p0 == T::zero() {
        return Err(Error::UndefinedChart { reason: "P0 = 0" });
    }
    let q = quartic_coeffs(r, params);
    let rad = q.eval(w0);
    if rad < -T::lit(1e-12) {
        return Err(Error::NegativeRadicand { value: rad.as_f64() });
    }
    Ok(branch.signum() * rad.max(T::zero()).sqrt() / r.p0)
}

/// Elapsed evolution time for `W⁰` to move from `w0_from` to `w0_to` inside
/// one monotone band: `∫ dW / (|(b−a)d| √Q(W))`.
///
/// Both halves of the interval are integrated after the substitution
/// `W = e ± s²` about their outer endpoint `e`; when `e` is a simple root the
/// deflated quartic removes the inverse square-root singularity exactly.
pub fn time_of_w0<T: Real>(w0_from: T, w0_to: T, r: &ReducedState<T>, params: &PencilParams<T>) -> Result<T> {
    let rate = (params.b - params.a) * params.d;
    if rate == T::zero() {
        return Err(Error::FrozenW0);
    }
    let q = quartic_coeffs(r, params);
    Ok(band_integral(&q, w0_from, w0_to)? / rate.abs())
}

/// `∫ dW/√Q(W)` between two points of one band (always non-negative).
pub fn band_integral<T: Real>(q: &QuarticCoeffs<T>, w0_from: T, w0_to: T) -> Result<T> {
    if w0_from == w0_to {
        return Ok(T::zero());
    }
    let roots = q.real_roots();
    let (lo, hi) = (w0_from.min(w0_to), w0_from.max(w0_to));
    let scale = T::one().max(lo.abs()).max(hi.abs());
    let snap = T::lit(1e-7) * scale;
    let qscale = q.q0.abs().max((q.q2 * scale * scale).abs()).max((q.q4 * scale.powi(4)).abs());

    for root in &roots {
        if root.w > lo + snap && root.w < hi - snap {
            return Err(Error::BandCrossing { root: root.w.as_f64() });
        }
    }
    for &e in &[lo, hi] {
        let v = q.eval(e);
        if v < -T::lit(1e-10) * qscale.max(T::one()) {
            return Err(Error::NegativeRadicand { value: v.as_f64() });
        }
    }

    let mid = (lo + hi) * T::half();
    let mut total = T::zero();
    for &e in &[lo, hi] {
        let near = roots.iter().find(|rt| (rt.w - e).abs() <= snap);
        let sigma = if mid > e { T::one() } else { -T::one() };
        let piece = match near {
            Some(rt) if rt.double => return Err(Error::AsymptoticBand { root: rt.w.as_f64() }),
            Some(rt) => {
                let r0 = rt.w;
                let smax = (mid - r0).abs().sqrt();
                let integrand = |s: T| {
                    let w = r0 + sigma * s * s;
                    let dv = sigma * q.deflated(r0, w);
                    T::two() / dv.max(T::min_positive_value()).sqrt()
                };
                // remove the excursion from the snapped root to the actual endpoint
                let extra = if (e - r0) * sigma > T::zero() {
                    let s_e = (e - r0).abs().sqrt();
                    gauss_kronrod::integrate(integrand, T::zero(), s_e, T::lit(1e-15), T::lit(1e-13))?.value
                } else {
                    T::zero()
                };
                gauss_kronrod::integrate(integrand, T::zero(), smax, T::lit(1e-15), T::lit(1e-13))?.value - extra
            }
            None => {
                let smax = (mid - e).abs().sqrt();
                let integrand = |s: T| {
                    let w = e + sigma * s * s;
                    T::two() * s / q.eval(w).max(T::min_positive_value()).sqrt()
                };
                gauss_kronrod::integrate(integrand, T::zero(), smax, T::lit(1e-15), T::lit(1e-13))?.value
            }
        };
        total += piece;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{integrate, ChartPoint, IntegrateOptions};
    use crate::liepencil::STATE_DIM;
    use crate::vec3::Vec3;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_state(rng: &mut ChaCha8Rng) -> PoincareState<f64> {
        let v: Vec<f64> = (0..STATE_DIM).map(|_| rng.gen_range(-1.0..1.0)).collect();
        PoincareState::from_slice(&v)
    }

    fn params() -> PencilParams<f64> {
        PencilParams::new(-1.0, 0.3, 1.0, 0.5).unwrap()
    }

    #[test]
    fn reduce_trivial_cases() {
        let p = params();
        let x = PoincareState::new(1.2, Vec3([0.3, 0.1, -0.4]), Vec3([0.5, 0.2, 0.1]), Vec3::zero());
        let r = reduce(&x, &p);
        assert_eq!((r.w0, r.y, r.z, r.beta), (0.0, 0.0, 0.0, 0.0));
        let pv = Vec3([0.3, -0.2, 0.6]);
        let x = PoincareState::new(1.1, pv, Vec3::zero(), pv * 1.7);
        assert!(reduce(&x, &p).z.abs() < 1e-15);
    }

    #[test]
    fn reduce_variants_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let p = params();
        let x = random_state(&mut rng);
        let r1 = reduce(&x, &p);
        let r2 = reduce_direct(&x, &p);
        for (u, v) in [(r1.w0, r2.w0), (r1.y, r2.y), (r1.z, r2.z), (r1.c2, r2.c2), (r1.h2, r2.h2), (r1.beta, r2.beta)] {
            assert!((u - v).abs() < 1e-13);
        }
    }

    #[test]
    fn printed_leading_coefficient_example() {
        // a = −1, P⁰ = 3, c₁ = −4
        let r = ReducedState { p0: 3.0, c1: -4.0, ..Default::default() };
        let p = params();
        assert_eq!(printed_quartic_coeffs(&r, &p).q4_z, 13.0 / 4.0);
        assert_eq!(printed_quartic_coeffs(&r, &p).q4_t, 1.0);
        assert_eq!(quartic_coeffs(&r, &p).q4, -5.0 / 4.0);
    }

    #[test]
    fn zero_spin_has_double_root_at_origin() {
        let p = params();
        let x = PoincareState::new(1.2, Vec3([0.3, 0.1, -0.4]), Vec3([0.5, 0.2, 0.1]), Vec3::zero());
        let q = quartic_coeffs(&reduce(&x, &p), &p);
        assert_eq!(q.q0, 0.0);
        assert!(q.real_roots().iter().any(|r| r.w == 0.0 && r.double));
    }

    #[test]
    fn y_of_w0_properties() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let p = params();
        let x = random_state(&mut rng);
        let r = reduce(&x, &p);
        assert!((y_of_w0(r.w0, &r, &p).unwrap() - r.y).abs() < 1e-10);
        let h = 1e-4;
        let d = (y_of_w0(r.w0 + h, &r, &p).unwrap() - y_of_w0(r.w0 - h, &r, &p).unwrap()) / (2.0 * h);
        assert!((d + r.w0 / r.p0).abs() < 1e-9);
        let flat = PencilParams::new(0.2, 0.2, 1.0, 1.0).unwrap();
        assert!(matches!(y_of_w0(0.1, &r, &flat), Err(Error::UndefinedChart { .. })));
    }

    #[test]
    fn z_of_w0_branches_and_domain() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let p = params();
        let x = random_state(&mut rng);
        let r = reduce(&x, &p);
        let z = z_of_w0(r.w0, &r, &p, r.z.signum()).unwrap();
        assert!((z - r.z).abs() < 1e-10);
        let q = quartic_coeffs(&r, &p);
        for root in q.real_roots().iter().filter(|rt| !rt.double) {
            assert!(z_of_w0(root.w, &r, &p, 1.0).unwrap().abs() < 1e-6);
        }
        let big = 1e3;
        if q.eval(big) < 0.0 {
            assert!(matches!(z_of_w0(big, &r, &p, 1.0), Err(Error::NegativeRadicand { .. })));
        }
    }

    #[test]
    fn first_integral_is_conserved_along_flow() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let p = params();
        for _ in 0..3 {
            let x = random_state(&mut rng);
            let tr = integrate(&ChartPoint::Pl(x), &p, (0.0, 10.0), &IntegrateOptions::default()).unwrap();
            let r0 = reduce(&x, &p);
            let q = quartic_coeffs(&r0, &p);
            for pt in &tr.points {
                let r = reduce(&pt.to_poincare().unwrap(), &p);
                assert!(q.relative_residual(r.w0, r.p0 * r.z).abs() < 1e-8);
                assert!((r.beta - r0.beta).abs() < 1e-8 * r0.beta.abs().max(1.0));
                assert!((r.y - y_of_w0(r.w0, &r0, &p).unwrap()).abs() < 1e-7);
            }
        }
    }

    #[test]
    fn time_map_trivial_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let p = params();
        let r = reduce(&random_state(&mut rng), &p);
        assert_eq!(time_of_w0(r.w0, r.w0, &r, &p).unwrap(), 0.0);
        let frozen = PencilParams::new(-1.0, 0.3, 1.0, 0.0).unwrap();
        assert_eq!(time_of_w0(0.0, 0.1, &r, &frozen), Err(Error::FrozenW0));
    }

    #[test]
    fn band_integral_between_roots() {
        // Q = −(W² − 1)(W² − 4)/4
        let q = QuarticCoeffs { q4: -0.25, q2: 1.25, q0: -1.0 };
        assert_eq!(q.real_roots().len(), 4);
        let full = band_integral(&q, 1.0, 2.0).unwrap();
        // 2∫₁² dW/√((W²−1)(4−W²)) = K(√3/2) = π/(2·agm(1, 1/2))
        let (mut x, mut y) = (1.0_f64, 0.5_f64);
        for _ in 0..8 {
            (x, y) = (0.5 * (x + y), (x * y).sqrt());
        }
        let want = std::f64::consts::FRAC_PI_2 / x;
        assert!((full - want).abs() < 1e-9, "{full} {want}");
        let back = band_integral(&q, 2.0, 1.0).unwrap();
        assert!((back - full).abs() < 1e-13);
        let part = band_integral(&q, 1.2, 1.7).unwrap();
        assert!((part - adaptive_reference(&q, 1.2, 1.7)).abs() < 1e-9);
        assert!(matches!(band_integral(&q, 0.5, 1.5), Err(Error::BandCrossing { .. })));
    }

    #[test]
    fn band_integral_unbounded_band() {
        // Q = (W² − 1)/…: q₄ = 0, so dW/√(W²−1) integrates to arccosh
        let q = QuarticCoeffs { q4: 0.0, q2: 1.0, q0: -1.0 };
        let v = band_integral(&q, 1.0, 3.0).unwrap();
        assert!((v - 3f64.acosh()).abs() < 1e-9);
        let v = band_integral(&q, 1.5, 3.0).unwrap();
        assert!((v - (3f64.acosh() - 1.5f64.acosh())).abs() < 1e-9);
    }

    #[test]
    fn band_integral_rejects_double_root() {
        let q = QuarticCoeffs { q4: -1.0, q2: 1.0, q0: 0.0 };
        assert!(matches!(band_integral(&q, 0.0, 0.5), Err(Error::AsymptoticBand { .. })));
    }

    // independent reference: tanh-sinh style substitution W = mid + half·tanh(π/2 sinh u)
    // tanh-sinh; only for endpoints away from the roots
    fn adaptive_reference(q: &QuarticCoeffs<f64>, lo: f64, hi: f64) -> f64 {
        let mid = 0.5 * (lo + hi);
        let half = 0.5 * (hi - lo);
        let h = 1.0 / 64.0;
        let mut s = 0.0;
        for k in -400..=400 {
            let u = k as f64 * h;
            let arg = std::f64::consts::FRAC_PI_2 * u.sinh();
            let w = mid + half * arg.tanh();
            let dw = half * std::f64::consts::FRAC_PI_2 * u.cosh() / arg.cosh().powi(2);
            let v = q.eval(w);
            if v > 0.0 && dw > 0.0 {
                s += dw / v.sqrt();
            }
        }
        s * h
    }
}
