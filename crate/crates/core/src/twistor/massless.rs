//! Positive projective twistors and the massless momentum map.

use num_complex::Complex;

use super::mat2::{finite, inner, Mat2C, Spinor, C};
use crate::error::{Error, Result};
use crate::liepencil::{casimir_c1, casimir_c2, pauli_lubansky, PoincareState};
use crate::scalar::Real;
use crate::vec3::Vec3;

/// Homogeneous coordinates `(ζ₁, ζ₂, ζ)` of a projective twistor
/// `v = (η, ξ)`, `η = (ζ₁, ζ₂)`, `ξ = (ζ, 1)`, together with the helicity
/// scale `α` of its symplectic form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwistorPoint<T> {
    pub zeta1: C<T>,
    pub zeta2: C<T>,
    pub zeta: C<T>,
    pub alpha: T,
}

impl<T: Real> TwistorPoint<T> {
    pub fn new(zeta1: C<T>, zeta2: C<T>, zeta: C<T>, alpha: T) -> Self {
        TwistorPoint { zeta1, zeta2, zeta, alpha }
    }

    pub fn eta(&self) -> Spinor<T> {
        [self.zeta1, self.zeta2]
    }

    pub fn xi(&self) -> Spinor<T> {
        [self.zeta, Complex::new(T::one(), T::zero())]
    }

    /// `v = (η, ξ)` in ℂ⁴.
    pub fn vector(&self) -> [C<T>; 4] {
        let (e, x) = (self.eta(), self.xi());
        [e[0], e[1], x[0], x[1]]
    }

    /// Chart point of `[v]`; needs `v₄ ≠ 0`.
    pub fn from_vector(v: &[C<T>; 4], alpha: T) -> Result<Self> {
        if v[3].norm() <= T::epsilon() * v.iter().fold(T::zero(), |m, e| m.max(e.norm())) {
            return Err(Error::UndefinedChart { reason: "xi_2 = 0" });
        }
        let s = v[3].inv();
        Ok(TwistorPoint { zeta1: v[0] * s, zeta2: v[1] * s, zeta: v[2] * s, alpha })
    }

    /// `Δ = v†Φv = i(ζ̄ζ₁ − ζζ̄₁ + ζ₂ − ζ̄₂) = 2 Im(η†ξ)`.
    pub fn delta(&self) -> T {
        let i = Complex::new(T::zero(), T::one());
        let d = i * (self.zeta.conj() * self.zeta1 - self.zeta * self.zeta1.conj() + self.zeta2 - self.zeta2.conj());
        d.re
    }

    /// `Δ`, or an error unless the twistor is positive and `α > 0`.
    pub fn delta_checked(&self) -> Result<T> {
        let d = self.delta();
        if !(d > T::zero()) {
            return Err(Error::NotPositive { delta: d.as_f64() });
        }
        if !(self.alpha > T::zero()) {
            return Err(Error::MasslessRejected { reason: "alpha must be positive" });
        }
        Ok(d)
    }

    pub fn is_finite(&self) -> bool {
        finite(&self.zeta1) && finite(&self.zeta2) && finite(&self.zeta) && self.alpha.is_finite()
    }
}

/// `(P, M, W, R)` as 2×2 matrices: `P = P^μσ_μ`, `M = ½(L + iJ)·σ`,
/// `M·tilde(P) = R − iW` with `R`, `W` Hermitian.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinObservables<T> {
    pub p: Mat2C<T>,
    pub m: Mat2C<T>,
    pub w: Mat2C<T>,
    pub r: Mat2C<T>,
}

impl<T: Real> SpinObservables<T> {
    /// Builds `W` and `R` from `P` and `M`.
    pub fn from_pm(p: Mat2C<T>, m: Mat2C<T>) -> Self {
        let x = m * p.tilde();
        SpinObservables { p, m, w: -x.imaginary_part(), r: x.hermitian_part() }
    }

    /// `(P⁰, P, L, J)` read off the matrices.
    pub fn state(&self) -> PoincareState<T> {
        let pc = self.p.components();
        let mut l = Vec3::zero();
        let mut j = Vec3::zero();
        for k in 0..3 {
            let t = (self.m * Mat2C::pauli(k + 1)).trace();
            l[k] = t.re;
            j[k] = t.im;
        }
        PoincareState::new(pc[0].re, Vec3([pc[1].re, pc[2].re, pc[3].re]), l, j)
    }

    /// `M·tilde(P) − (R − iW)`.
    pub fn reconstruction_residual(&self) -> T {
        let i = Complex::new(T::zero(), T::one());
        (self.m * self.p.tilde() - (self.r - self.w * i)).max_abs()
    }
}

/// `−½·tilde(W^μσ_μ)`, the matrix `W` of `M·tilde(P) = R − iW` in terms of
/// the Pauli–Lubansky four-vector.
pub fn w_matrix_from_vector<T: Real>(w0: T, w: &Vec3<T>) -> Mat2C<T> {
    Mat2C::from_four_vector([w0, w[0], w[1], w[2]]).tilde() * (-T::half())
}

/// Pauli–Lubansky four-vector from the matrix `W`.
pub fn w_vector_from_matrix<T: Real>(w: &Mat2C<T>) -> (T, Vec3<T>) {
    let c = (w.tilde() * (-T::two())).components();
    (c[0].re, Vec3([c[1].re, c[2].re, c[3].re]))
}

/// Image of a twistor under the momentum map: the spin observables, the
/// Poincaré state, the dilatation `d`, the acceleration block `A` and the full
/// 4×4 block matrix `iα(1/4 − vv†Φ/Δ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MasslessImage<T> {
    pub obs: SpinObservables<T>,
    pub state: PoincareState<T>,
    pub dilatation: C<T>,
    pub acceleration: Mat2C<T>,
    pub block: [[C<T>; 4]; 4],
}

/// `Φ = i[[0, −1], [1, 0]]` in 2×2 blocks.
pub fn twistor_form<T: Real>() -> [[C<T>; 4]; 4] {
    let z = Complex::new(T::zero(), T::zero());
    let mut f = [[z; 4]; 4];
    for k in 0..2 {
        f[k][k + 2] = Complex::new(T::zero(), -T::one());
        f[k + 2][k] = Complex::new(T::zero(), T::one());
    }
    f
}

/// `u†Φv`.
pub fn form<T: Real>(u: &[C<T>; 4], v: &[C<T>; 4]) -> C<T> {
    let f = twistor_form::<T>();
    let mut s = Complex::new(T::zero(), T::zero());
    for i in 0..4 {
        for j in 0..4 {
            s = s + u[i].conj() * f[i][j] * v[j];
        }
    }
    s
}

/// `P = iα(η†ξ − ξ†η)⁻¹ ξξ†`, `M = iα(η†ξ − ξ†η)⁻¹(ηξ† − ½ξ†η·1)`.
pub fn momentum_map_massless<T: Real>(v: &TwistorPoint<T>) -> Result<MasslessImage<T>> {
    v.delta_checked()?;
    let (eta, xi) = (v.eta(), v.xi());
    let i = Complex::new(T::zero(), T::one());
    let denom = inner(&eta, &xi) - inner(&xi, &eta);
    let n = i * v.alpha / denom;
    let p = Mat2C::outer(&xi, &xi) * n;
    let m = (Mat2C::outer(&eta, &xi) - Mat2C::scalar(inner(&xi, &eta) * T::half())) * n;
    let obs = SpinObservables::from_pm(p, m);
    let state = obs.state();

    let vec = v.vector();
    let f = twistor_form::<T>();
    let delta = v.delta();
    let mut block = [[Complex::new(T::zero(), T::zero()); 4]; 4];
    for r in 0..4 {
        for col in 0..4 {
            let mut vvf = Complex::new(T::zero(), T::zero());
            for k in 0..4 {
                vvf = vvf + vec[r] * vec[k].conj() * f[k][col];
            }
            let id = if r == col { T::lit(0.25) } else { T::zero() };
            block[r][col] = i * v.alpha * (Complex::new(id, T::zero()) - vvf / delta);
        }
    }
    // upper-left block is ½d·1 + M
    let dilatation = (block[0][0] - m.m[0][0]) * T::two();
    let acceleration = Mat2C::new([[block[0][2], block[0][3]], [block[1][2], block[1][3]]]);
    Ok(MasslessImage { obs, state, dilatation, acceleration, block })
}

/// The Poincaré observables and Pauli–Lubansky vector of a twistor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoordObservables<T> {
    pub p0: T,
    pub p: Vec3<T>,
    pub l: Vec3<T>,
    pub j: Vec3<T>,
    pub w0: T,
    pub w: Vec3<T>,
}

impl<T: Real> CoordObservables<T> {
    pub fn state(&self) -> PoincareState<T> {
        PoincareState::new(self.p0, self.p, self.l, self.j)
    }
}

/// Canonical `(P⁰, P, L, J, W⁰, W)` from the matrix momentum map.
pub fn observables_from_coords<T: Real>(v: &TwistorPoint<T>) -> Result<CoordObservables<T>> {
    let img = momentum_map_massless(v)?;
    let x = img.state;
    let s = pauli_lubansky(&x, -T::one());
    Ok(CoordObservables { p0: x.p0, p: x.p, l: x.l, j: x.j, w0: s.w0, w: s.w })
}

/// The coordinate formulas as printed next to the matrix map. They carry
/// complex convention factors; see [`KAPPA_P`] and friends.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrintedCoords<T> {
    pub p: [C<T>; 4],
    pub l: [C<T>; 3],
    pub j: [C<T>; 3],
    pub w: [C<T>; 4],
}

/// canonical `P^μ` = κ_P · printed
pub const KAPPA_P: (f64, f64) = (0.0, 1.0);
/// canonical spatial `W` = κ · printed
pub const KAPPA_W: (f64, f64) = (0.0, 1.0);
/// canonical `W⁰` = κ · printed
pub const KAPPA_W0: (f64, f64) = (0.0, -1.0);
/// canonical `L`, `J` = printed
pub const KAPPA_LJ: (f64, f64) = (1.0, 0.0);

pub fn kappa<T: Real>(k: (f64, f64)) -> C<T> {
    Complex::new(T::lit(k.0), T::lit(k.1))
}

pub fn printed_coords<T: Real>(v: &TwistorPoint<T>) -> PrintedCoords<T> {
    let i = Complex::new(T::zero(), T::one());
    let one = Complex::new(T::one(), T::zero());
    let (z1, z2, z) = (v.zeta1, v.zeta2, v.zeta);
    let (b1, b2, bz) = (z1.conj(), z2.conj(), z.conj());
    let delta = v.delta();
    let al = v.alpha;
    let k = Complex::new(al / (T::two() * delta), T::zero());
    let kw = Complex::new(al * al / (T::lit(4.0) * delta), T::zero());
    let zz = z * bz;
    PrintedCoords {
        p: [-i * k * (zz + one), -i * k * (z + bz), -k * (bz - z), -i * k * (zz - one)],
        l: [k * (z2 * bz + b2 * z + z1 + b1), i * k * (-z2 * bz + b2 * z + z1 - b1), k * (z1 * bz + b1 * z - z2 - b2)],
        j: [
            -i * k * (z2 * bz - b2 * z + z1 - b1),
            -k * (z2 * bz + b2 * z - z1 - b1),
            -i * k * (z1 * bz - b1 * z - z2 + b2),
        ],
        w: [i * kw * (zz + one), -i * kw * (z + bz), -kw * (bz - z), -i * kw * (zz - one)],
    }
}

/// Maps massless-orbit data (`c₁ = c₂ = 0` at `a = −1`) back to the twistor
/// chart by inverting the matrix momentum map:
/// `ζ = P₀₁/P₁₁`, `ζ₁ = M₀₁/P₁₁`, `ζ₂ = (M₁₁ − M₀₀)/P₁₁ + ζ₁ζ̄`, `α = P₁₁Δ`.
pub fn pullback<T: Real>(x: &PoincareState<T>) -> Result<TwistorPoint<T>> {
    let scale = T::one().max(x.p0 * x.p0).max(x.p.norm2());
    let tol = T::lit(1e-8);
    let c1 = casimir_c1(x, -T::one());
    if c1.abs() > tol * scale {
        return Err(Error::MasslessRejected { reason: "c1 != 0" });
    }
    let c2 = casimir_c2(x, -T::one());
    let spin_scale = scale * T::one().max(x.l.norm2()).max(x.j.norm2());
    if c2.abs() > tol * spin_scale {
        return Err(Error::MasslessRejected { reason: "c2 != 0" });
    }
    let p11 = x.p0 - x.p[2];
    if p11.abs() <= T::lit(1e-12) * scale.sqrt() {
        return Err(Error::ChartSingularity { what: "P0 - P3", value: p11.as_f64() });
    }
    let i = Complex::new(T::zero(), T::one());
    let half = T::half();
    let v = [0, 1, 2].map(|k| Complex::new(x.l[k], x.j[k]) * half);
    let m00 = v[2];
    let m11 = -v[2];
    let m01 = v[0] - v[1] * i;
    let zeta = Complex::new(x.p[0], -x.p[1]) / p11;
    let zeta1 = m01 / p11;
    let zeta2 = (m11 - m00) / p11 + zeta1 * zeta.conj();
    let mut t = TwistorPoint { zeta1, zeta2, zeta, alpha: T::one() };
    t.alpha = p11 * t.delta();
    t.delta_checked()?;
    Ok(t)
}

/// `(ζ₁, ζ₂, ζ)` exactly as printed for the pullback; only `ζ` agrees with
/// [`pullback`] without a factor.
pub fn printed_pullback<T: Real>(x: &PoincareState<T>) -> [C<T>; 3] {
    let i = Complex::new(T::zero(), T::one());
    let (p0, p, l, j) = (x.p0, x.p, x.l, x.j);
    let d = p[2] - p0;
    let z1 = (Complex::new(l[1] - j[0], T::zero()) + i * (l[0] + j[1])) / (T::two() * d);
    let num = Complex::new(p[0], p[1]) * (Complex::new(l[1] - j[0], T::zero()) + i * (l[0] - j[1]))
        - Complex::new(d, T::zero()) * (Complex::new(j[2], T::zero()) - i * l[2]);
    let z2 = num / (-T::two() * d * d);
    let z = Complex::new(p[0], -p[1]) / (p0 - p[2]);
    [z1, z2, z]
}
