//! Positive flags `[v] ⊂ z` and the massive momentum map.

use num_complex::Complex;

use super::mat2::{inner, Mat2C, Spinor, C};
use super::massless::{form, w_vector_from_matrix, SpinObservables, TwistorPoint};
use crate::error::{Error, Result};
use crate::liepencil::PoincareState;
use crate::scalar::Real;
use crate::vec3::Vec3;

/// Orthogonality tolerance for [`flag_from_pair`], relative to `√(Δ₁Δ₂)`.
pub const ORTHOGONALITY_TOL: f64 = 1e-10;

/// A flag in the coordinates `([ξ], Z)`: `v = (Zξ, ξ)`, `z = {(Zξ', ξ')}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlagPoint<T> {
    pub xi: Spinor<T>,
    pub z: Mat2C<T>,
    pub alpha1: T,
    pub alpha2: T,
}

impl<T: Real> FlagPoint<T> {
    /// Normalizes `ξ₂ = 1` when possible and checks that `Im Z` is definite.
    pub fn new(xi: Spinor<T>, z: Mat2C<T>, alpha1: T, alpha2: T) -> Result<Self> {
        let scale = xi[0].norm().max(xi[1].norm());
        if !(scale > T::zero()) {
            return Err(Error::DegenerateFlag { reason: "xi = 0" });
        }
        let xi = if xi[1].norm() > T::epsilon() * scale { [xi[0] / xi[1], Complex::new(T::one(), T::zero())] } else { xi };
        let f = FlagPoint { xi, z, alpha1, alpha2 };
        let y = f.im_z();
        let det = y.det().re;
        if !(det > T::lit(1e-14) * y.max_abs() * y.max_abs()) {
            return Err(Error::DegenerateFlag { reason: "Im Z is not definite" });
        }
        if f.denominator().norm() <= T::lit(1e-14) * (T::one() + f.z.max_abs()) {
            return Err(Error::DegenerateFlag { reason: "xi'(Z - Z')xi = 0" });
        }
        Ok(f)
    }

    /// `(Z − Z†)/(2i)`.
    pub fn im_z(&self) -> Mat2C<T> {
        self.z.imaginary_part()
    }

    /// `Im Z` positive definite (the printed orbit condition) gives `P⁰ < 0`
    /// under this twistor form; flags from positive twistor pairs have `Im Z`
    /// negative definite and `P⁰ > 0`.
    pub fn is_future_pointing(&self) -> bool {
        self.im_z().trace().re < T::zero()
    }

    /// `s = (α₁ − α₂)/4`
    pub fn s(&self) -> T {
        (self.alpha1 - self.alpha2) / T::lit(4.0)
    }

    /// `δ = −(α₁ + α₂)/4`
    pub fn delta(&self) -> T {
        -(self.alpha1 + self.alpha2) / T::lit(4.0)
    }

    fn zz(&self) -> Mat2C<T> {
        self.z - self.z.adjoint()
    }

    /// `ξ†(Z − Z†)ξ`
    pub fn denominator(&self) -> C<T> {
        inner(&self.xi, &self.zz().apply(&self.xi))
    }

    /// `(X^μ, Y^μ)` with `Z = ½(X^μ + iY^μ)σ_μ`.
    pub fn spacetime(&self) -> ([T; 4], [T; 4]) {
        let c = self.z.components();
        (c.map(|e| e.re * T::two()), c.map(|e| e.im * T::two()))
    }
}

/// Image of a flag under the reduced momentum map.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MassiveImage<T> {
    /// `P`, `M = ZP − ½Tr(ZP)`, and `W`, `R` from `M·tilde(P) = R − iW`.
    pub obs: SpinObservables<T>,
    /// `W` by its closed form in `(ξ, Z)`.
    pub w_closed: Mat2C<T>,
    pub state: PoincareState<T>,
    pub w0: T,
    pub w: Vec3<T>,
    pub s: T,
    pub delta: T,
    /// `[[ZP − iδ, −ZPZ†], [P, −PZ† − iδ]]`
    pub block: [[C<T>; 4]; 4],
}

pub fn momentum_map_massive<T: Real>(f: &FlagPoint<T>) -> Result<MassiveImage<T>> {
    let i = Complex::new(T::zero(), T::one());
    let zz = f.zz();
    let den = f.denominator();
    let det = zz.det();
    if den.norm() == T::zero() || det.norm() == T::zero() {
        return Err(Error::DegenerateFlag { reason: "vanishing denominator" });
    }
    let (a1, a2) = (f.alpha1, f.alpha2);
    let delta = f.delta();
    let xx = Mat2C::outer(&f.xi, &f.xi);
    let tzz = zz.tilde();
    let p = xx * (-i * a1 / den) + tzz * xx.tilde() * tzz * (-i * a2 / (det * den));
    let zp = f.z * p;
    let m = zp - Mat2C::scalar(zp.trace() * T::half());
    let obs = SpinObservables::from_pm(p, m);
    let w_closed = xx.tilde() * (-i * delta * a1 / den)
        + zz * (-i * a1 * a2 / (det * T::two()))
        + zz * xx * zz * (-i * delta * a2 / (det * den));
    let state = obs.state();
    let (w0, w) = w_vector_from_matrix(&obs.w);

    let zpz = zp * f.z.adjoint();
    let pz = p * f.z.adjoint();
    let dl = Mat2C::scalar(i * delta);
    let quads = [[zp - dl, -zpz], [p, -pz - dl]];
    let mut block = [[Complex::new(T::zero(), T::zero()); 4]; 4];
    for (br, row) in quads.iter().enumerate() {
        for (bc, q) in row.iter().enumerate() {
            for r in 0..2 {
                for c in 0..2 {
                    block[2 * br + r][2 * bc + c] = q.m[r][c];
                }
            }
        }
    }
    Ok(MassiveImage { obs, w_closed, state, w0, w, s: f.s(), delta, block })
}

/// `M` expanded in `(ξ, Z)`, with the left factor `Z` on the `α₂` term.
/// Equals `ZP − ½Tr(ZP)` and is used as a cross-check.
pub fn m_expanded<T: Real>(f: &FlagPoint<T>) -> Mat2C<T> {
    let i = Complex::new(T::zero(), T::one());
    let zz = f.zz();
    let den = f.denominator();
    let det = zz.det();
    let (a1, a2) = (f.alpha1, f.alpha2);
    let xx = Mat2C::outer(&f.xi, &f.xi);
    let s2 = Mat2C::pauli(2);
    let tzz = zz.tilde();
    let scalar = inner(&f.xi, &(zz * s2 * f.z.conj() * s2 * zz).apply(&f.xi)).conj();
    f.z * xx * (-i * a1 / den)
        + Mat2C::scalar(inner(&f.xi, &f.z.apply(&f.xi)) * (i * a1 / (den * T::two())))
        - f.z * tzz * xx.tilde() * tzz * (i * a2 / (det * den))
        + Mat2C::scalar(scalar * (i * a2 / (det * den * T::two())))
}

/// `s² = ((α₁−α₂)/4)² + (α₁α₂/4)|v₁†Φv₂|²/(Δ₁Δ₂)`, invariant under SU(2,2).
pub fn s_squared<T: Real>(v1: &TwistorPoint<T>, v2: &TwistorPoint<T>) -> T {
    s_squared_vectors(&v1.vector(), v1.alpha, &v2.vector(), v2.alpha)
}

/// [`s_squared`] for unnormalized twistors.
pub fn s_squared_vectors<T: Real>(v1: &[C<T>; 4], alpha1: T, v2: &[C<T>; 4], alpha2: T) -> T {
    let d1 = form(v1, v1).re;
    let d2 = form(v2, v2).re;
    let x = form(v1, v2).norm_sqr();
    let s = (alpha1 - alpha2) / T::lit(4.0);
    s * s + alpha1 * alpha2 / T::lit(4.0) * x / (d1 * d2)
}

/// The flag `[v₁] ⊂ span(v₁, v₂)` of two orthogonal positive twistors:
/// `Z = [η₁ η₂][ξ₁ ξ₂]⁻¹`, `ξ = ξ₁`.
pub fn flag_from_pair<T: Real>(v1: &TwistorPoint<T>, v2: &TwistorPoint<T>) -> Result<FlagPoint<T>> {
    let d1 = v1.delta_checked()?;
    let d2 = v2.delta_checked()?;
    let overlap = form(&v1.vector(), &v2.vector()).norm() / (d1 * d2).sqrt();
    if overlap > T::lit(ORTHOGONALITY_TOL) {
        return Err(Error::DegenerateFlag { reason: "twistors are not orthogonal" });
    }
    let (e1, e2, x1, x2) = (v1.eta(), v2.eta(), v1.xi(), v2.xi());
    let eta = Mat2C::new([[e1[0], e2[0]], [e1[1], e2[1]]]);
    let xi = Mat2C::new([[x1[0], x2[0]], [x1[1], x2[1]]]);
    let xi_inv = xi.inverse().map_err(|_| Error::DegenerateFlag { reason: "xi_1, xi_2 are parallel" })?;
    FlagPoint::new(x1, eta * xi_inv, v1.alpha, v2.alpha)
}

/// `(Y⁰, Y)` and `(X⁰, X)` recovered from the observables of a massive state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlagCoords<T> {
    pub x0: T,
    pub x: Vec3<T>,
    pub y0: T,
    pub y: Vec3<T>,
}

/// Inverts `M = ZP − ½Tr(ZP)` for the spacetime coordinates, given `δ` and
/// the free parameter `X⁰`. With `D = det P`:
/// `Y⁰ = (W⁰ + 2δP⁰)/D`, `Y = −(W + 2δP)/D`,
/// `X = J×P/D + P⁰L/D − ((P·L) + D X⁰)P/(P⁰D)`.
pub fn flag_invert<T: Real>(x: &PoincareState<T>, w0: T, w: &Vec3<T>, delta: T, x0: T) -> Result<FlagCoords<T>> {
    let d = x.p0 * x.p0 - x.p.norm2();
    let scale = T::one().max(x.p0 * x.p0);
    if d.abs() <= T::lit(1e-12) * scale {
        return Err(Error::MassiveRejected { reason: "det P = 0" });
    }
    if x.p0 == T::zero() {
        return Err(Error::MassiveRejected { reason: "P0 = 0" });
    }
    let inv = T::one() / d;
    let two_delta = T::two() * delta;
    Ok(FlagCoords {
        x0,
        x: x.j.cross(&x.p) * inv + x.l * (x.p0 * inv) - x.p * ((x.p.dot(&x.l) + d * x0) * inv / x.p0),
        y0: (w0 + two_delta * x.p0) * inv,
        y: -(*w + x.p * two_delta) * inv,
    })
}

/// `L = X⁰P + P⁰X − Y×P`, `J = Y⁰P + P⁰Y + X×P`.
pub fn flag_forward<T: Real>(p0: T, p: &Vec3<T>, c: &FlagCoords<T>) -> (Vec3<T>, Vec3<T>) {
    let l = *p * c.x0 + c.x * p0 - c.y.cross(p);
    let j = *p * c.y0 + c.y * p0 + c.x.cross(p);
    (l, j)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liepencil::pauli_lubansky;
    use crate::twistor::massless::momentum_map_massless;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    type V4 = [C<f64>; 4];
    type M4 = [[C<f64>; 4]; 4];

    fn cplx(rng: &mut ChaCha8Rng) -> C<f64> {
        Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    }

    fn random_flag(rng: &mut ChaCha8Rng) -> FlagPoint<f64> {
        loop {
            let xi = [cplx(rng), cplx(rng)];
            let x = Mat2C::from_four_vector([0, 1, 2, 3].map(|_| rng.gen_range(-1.0..1.0)));
            // definite Im Z of random sign
            let y3 = [0.0; 3].map(|_: f64| rng.gen_range(-0.6..0.6));
            let y0: f64 = rng.gen_range(1.0..2.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
            let y = Mat2C::from_four_vector([y0, y3[0], y3[1], y3[2]]);
            let z = x + y * Complex::new(0.0, 1.0);
            if let Ok(f) = FlagPoint::new(xi, z, rng.gen_range(0.5..3.0), rng.gen_range(0.5..3.0)) {
                return f;
            }
        }
    }

    fn random_positive(rng: &mut ChaCha8Rng) -> V4 {
        loop {
            let v = [cplx(rng), cplx(rng), cplx(rng), cplx(rng)];
            if form(&v, &v).re > 0.2 {
                return v;
            }
        }
    }

    fn orthogonal_pair(rng: &mut ChaCha8Rng) -> (TwistorPoint<f64>, TwistorPoint<f64>) {
        loop {
            let v1 = random_positive(rng);
            let w = random_positive(rng);
            let c = form(&v1, &w) / form(&v1, &v1);
            let v2: V4 = [0, 1, 2, 3].map(|k| w[k] - v1[k] * c);
            if form(&v2, &v2).re < 0.1 {
                continue;
            }
            let t1 = TwistorPoint::from_vector(&v1, rng.gen_range(0.5..3.0)).unwrap();
            let t2 = TwistorPoint::from_vector(&v2, rng.gen_range(0.5..3.0)).unwrap();
            return (t1, t2);
        }
    }

    fn mat4_mul(a: &M4, b: &M4) -> M4 {
        let mut out = [[Complex::new(0.0, 0.0); 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                for k in 0..4 {
                    out[i][j] += a[i][k] * b[k][j];
                }
            }
        }
        out
    }

    // exp by scaling and squaring of a Taylor polynomial
    fn mat4_exp(a: &M4) -> M4 {
        let mut x = a.map(|r| r.map(|e| e / 1024.0));
        let mut term = x;
        let mut sum = [[Complex::new(0.0, 0.0); 4]; 4];
        for k in 0..4 {
            sum[k][k] = Complex::new(1.0, 0.0);
        }
        for n in 1..20 {
            for i in 0..4 {
                for j in 0..4 {
                    sum[i][j] += term[i][j];
                }
            }
            term = mat4_mul(&term, &x).map(|r| r.map(|e| e / (n as f64 + 1.0)));
        }
        for _ in 0..10 {
            sum = mat4_mul(&sum, &sum);
        }
        x = sum;
        x
    }

    // U = exp(Φ⁻¹A), A anti-Hermitian, preserves Φ; Φ⁻¹ = Φ
    fn random_su22(rng: &mut ChaCha8Rng) -> M4 {
        let mut a = [[Complex::new(0.0, 0.0); 4]; 4];
        for i in 0..4 {
            for j in 0..i {
                let z = cplx(rng) * 0.5;
                a[i][j] = z;
                a[j][i] = -z.conj();
            }
            a[i][i] = Complex::new(0.0, rng.gen_range(-0.5..0.5));
        }
        let phi = super::super::massless::twistor_form::<f64>();
        mat4_exp(&mat4_mul(&phi, &a))
    }

    fn apply4(u: &M4, v: &V4) -> V4 {
        [0, 1, 2, 3].map(|i| (0..4).fold(Complex::new(0.0, 0.0), |s, k| s + u[i][k] * v[k]))
    }

    #[test]
    fn unit_imaginary_flag() {
        // Z = i·1, ξ = (0, 1), α₁ = α₂ = α
        let alpha: f64 = 2.0;
        let z = Mat2C::identity() * Complex::new(0.0, 1.0);
        let f = FlagPoint::new([Complex::new(0.0, 0.0), Complex::new(1.0, 0.0)], z, alpha, alpha).unwrap();
        assert!((f.im_z() - Mat2C::identity()).max_abs() < 1e-15);
        assert!(!f.is_future_pointing());
        let img = momentum_map_massive(&f).unwrap();
        // ξ†(Z−Z†)ξ = 2i, det(Z−Z†) = −4: P = −(α/2)diag(0,1) − (α/2)diag(1,0)
        let want = Mat2C::identity() * Complex::new(-alpha / 2.0, 0.0);
        assert!((img.obs.p - want).max_abs() < 1e-14);
        assert!((img.obs.p * img.obs.w).trace().norm() < 1e-14);
        let tr_py = (img.obs.p * f.im_z()).trace();
        assert!((tr_py.re - 2.0 * f.delta()).abs() < 1e-14 && tr_py.im.abs() < 1e-14);
        assert_eq!(f.s(), 0.0);
        assert!(img.obs.w.max_abs() < 1e-14);
    }

    #[test]
    fn massive_identities() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            let f = random_flag(&mut rng);
            let img = momentum_map_massive(&f).unwrap();
            let (p, w) = (img.obs.p, img.obs.w);
            let scale = p.max_abs() * w.max_abs();
            assert!(p.hermiticity_residual() < 1e-12 * p.max_abs());
            assert!((p * w).trace().norm() < 1e-10 * scale.max(1.0));
            let dp = p.det();
            let dw = w.det();
            assert!((dw + dp * (f.s() * f.s())).norm() < 1e-9 * dw.norm().max(dp.norm() * f.s() * f.s()).max(1e-300));
            let tr_py = (p * f.im_z()).trace();
            assert!((tr_py - Complex::new(2.0 * f.delta(), 0.0)).norm() < 1e-10 * (1.0 + p.max_abs()));
            assert!((img.w_closed - w).max_abs() < 1e-10 * w.max_abs().max(1.0));
            assert!((m_expanded(&f) - img.obs.m).max_abs() < 1e-11 * img.obs.m.max_abs().max(1.0));
            // vector W is the Pauli–Lubansky vector of the state
            let s = pauli_lubansky(&img.state, -1.0);
            assert!((s.w0 - img.w0).abs() < 1e-9 * (1.0 + s.w0.abs()));
            assert!((s.w - img.w).max_abs() < 1e-9 * (1.0 + s.w.max_abs()));
            assert_eq!(f.is_future_pointing(), img.state.p0 > 0.0);
            // block is trace-free
            let tr = (0..4).fold(Complex::new(0.0, 0.0), |a, k| a + img.block[k][k]);
            assert!(tr.norm() < 1e-10 * (1.0 + p.max_abs()));
        }
    }

    #[test]
    fn invert_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..100 {
            let f = random_flag(&mut rng);
            let img = momentum_map_massive(&f).unwrap();
            let (x, y) = f.spacetime();
            let c = flag_invert(&img.state, img.w0, &img.w, img.delta, x[0]).unwrap();
            let tol = 1e-9 * (1.0 + f.z.max_abs());
            assert!((c.y0 - y[0]).abs() < tol, "{} vs {}", c.y0, y[0]);
            assert!((c.y - Vec3([y[1], y[2], y[3]])).max_abs() < tol);
            assert!((c.x - Vec3([x[1], x[2], x[3]])).max_abs() < tol);
            let (l, j) = flag_forward(img.state.p0, &img.state.p, &c);
            assert!((l - img.state.l).max_abs() < 1e-9 * (1.0 + l.max_abs()));
            assert!((j - img.state.j).max_abs() < 1e-9 * (1.0 + j.max_abs()));
        }
    }

    #[test]
    fn invert_degenerate_terms() {
        // δ = 0, J = L = 0: Y = −W/det P, X is the P-line through the origin
        let x = PoincareState::new(2.0, Vec3([0.3, 0.4, -0.2]), Vec3::zero(), Vec3::zero());
        let w = Vec3([0.1, -0.5, 0.7]);
        let c = flag_invert(&x, 0.0, &w, 0.0, 0.8).unwrap();
        let d = 4.0 - x.p.norm2();
        assert!((c.y + w * (1.0 / d)).max_abs() < 1e-15);
        assert!((c.x + x.p * (0.8 / 2.0)).max_abs() < 1e-15);
        let massless = PoincareState::new(1.0, Vec3([1.0, 0.0, 0.0]), Vec3::zero(), Vec3::zero());
        assert!(matches!(flag_invert(&massless, 0.0, &w, 0.0, 0.0), Err(Error::MassiveRejected { .. })));
    }

    #[test]
    fn pair_flag_is_sum_of_massless_maps() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let (t1, t2) = orthogonal_pair(&mut rng);
            let f = flag_from_pair(&t1, &t2).unwrap();
            assert!(f.is_future_pointing());
            let img = momentum_map_massive(&f).unwrap();
            let m1 = momentum_map_massless(&t1).unwrap();
            let m2 = momentum_map_massless(&t2).unwrap();
            let p = m1.obs.p + m2.obs.p;
            let m = m1.obs.m + m2.obs.m;
            assert!((img.obs.p - p).max_abs() < 1e-9 * (1.0 + p.max_abs()));
            assert!((img.obs.m - m).max_abs() < 1e-9 * (1.0 + m.max_abs()));
            let s2 = s_squared(&t1, &t2);
            assert!((s2 - f.s() * f.s()).abs() < 1e-10);
        }
    }

    #[test]
    fn pair_requires_orthogonality() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let v = random_positive(&mut rng);
        let w = random_positive(&mut rng);
        let t1 = TwistorPoint::from_vector(&v, 1.0).unwrap();
        let t2 = TwistorPoint::from_vector(&w, 1.0).unwrap();
        assert!(matches!(flag_from_pair(&t1, &t2), Err(Error::DegenerateFlag { .. })));
        let y = Mat2C::identity() * Complex::new(0.0, 1.0);
        let zero = Complex::new(0.0, 0.0);
        assert!(FlagPoint::new([zero, zero], y, 1.0, 1.0).is_err());
        assert!(FlagPoint::new([zero, Complex::new(1.0, 0.0)], Mat2C::identity(), 1.0, 1.0).is_err());
    }

    #[test]
    fn s_squared_cases_and_invariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let v = random_positive(&mut rng);
        let t = TwistorPoint::from_vector(&v, 1.4).unwrap();
        assert!((s_squared(&t, &t) - 1.4 * 1.4 / 4.0).abs() < 1e-13);
        let (t1, t2) = orthogonal_pair(&mut rng);
        let want = ((t1.alpha - t2.alpha) / 4.0).powi(2);
        assert!((s_squared(&t1, &t2) - want).abs() < 1e-12);
        for _ in 0..20 {
            let a = random_positive(&mut rng);
            let b = random_positive(&mut rng);
            let u = random_su22(&mut rng);
            let phi = super::super::massless::twistor_form::<f64>();
            // U†ΦU = Φ
            let mut udag = [[Complex::new(0.0, 0.0); 4]; 4];
            for i in 0..4 {
                for j in 0..4 {
                    udag[i][j] = u[j][i].conj();
                }
            }
            let g = mat4_mul(&udag, &mat4_mul(&phi, &u));
            for i in 0..4 {
                for j in 0..4 {
                    assert!((g[i][j] - phi[i][j]).norm() < 1e-12);
                }
            }
            let before = s_squared_vectors(&a, 1.1, &b, 2.3);
            let after = s_squared_vectors(&apply4(&u, &a), 1.1, &apply4(&u, &b), 2.3);
            assert!((before - after).abs() < 1e-10 * before.abs().max(1.0));
        }
    }
}
