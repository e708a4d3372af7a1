//! 2×2 complex matrices, two-component spinors and the Pauli basis.

use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Real;

pub type C<T> = Complex<T>;

/// A two-component complex spinor.
pub type Spinor<T> = [C<T>; 2];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2C<T> {
    pub m: [[C<T>; 2]; 2],
}

fn c<T: Real>(re: T, im: T) -> C<T> {
    Complex::new(re, im)
}

impl<T: Real> Mat2C<T> {
    pub fn new(m: [[C<T>; 2]; 2]) -> Self {
        Mat2C { m }
    }

    pub fn zero() -> Self {
        let z = C::new(T::zero(), T::zero());
        Mat2C { m: [[z, z], [z, z]] }
    }

    pub fn identity() -> Self {
        Self::scalar(C::new(T::one(), T::zero()))
    }

    pub fn scalar(s: C<T>) -> Self {
        let z = C::new(T::zero(), T::zero());
        Mat2C { m: [[s, z], [z, s]] }
    }

    /// `σ_μ`, μ = 0..3, with `σ₂ = [[0, −i], [i, 0]]`.
    pub fn pauli(mu: usize) -> Self {
        let (o, z) = (T::one(), T::zero());
        let m = match mu {
            0 => [[c(o, z), c(z, z)], [c(z, z), c(o, z)]],
            1 => [[c(z, z), c(o, z)], [c(o, z), c(z, z)]],
            2 => [[c(z, z), c(z, -o)], [c(z, o), c(z, z)]],
            3 => [[c(o, z), c(z, z)], [c(z, z), c(-o, z)]],
            _ => panic!("Pauli index {mu} out of range"),
        };
        Mat2C { m }
    }

    /// `Σ x^μ σ_μ` for complex coefficients.
    pub fn from_components(x: [C<T>; 4]) -> Self {
        (0..4).fold(Self::zero(), |acc, mu| acc + Self::pauli(mu) * x[mu])
    }

    /// `Σ x^μ σ_μ` for real coefficients (a Hermitian matrix).
    pub fn from_four_vector(x: [T; 4]) -> Self {
        Self::from_components(x.map(|v| C::new(v, T::zero())))
    }

    /// Coefficients `Tr(M σ_μ)/2`.
    pub fn components(&self) -> [C<T>; 4] {
        let mut out = [C::new(T::zero(), T::zero()); 4];
        for (mu, o) in out.iter_mut().enumerate() {
            *o = (*self * Self::pauli(mu)).trace() * T::half();
        }
        out
    }

    /// `u v†`.
    pub fn outer(u: &Spinor<T>, v: &Spinor<T>) -> Self {
        Mat2C { m: [[u[0] * v[0].conj(), u[0] * v[1].conj()], [u[1] * v[0].conj(), u[1] * v[1].conj()]] }
    }

    pub fn adjoint(&self) -> Self {
        let m = &self.m;
        Mat2C { m: [[m[0][0].conj(), m[1][0].conj()], [m[0][1].conj(), m[1][1].conj()]] }
    }

    pub fn transpose(&self) -> Self {
        let m = &self.m;
        Mat2C { m: [[m[0][0], m[1][0]], [m[0][1], m[1][1]]] }
    }

    pub fn conj(&self) -> Self {
        Mat2C { m: self.m.map(|r| r.map(|e| e.conj())) }
    }

    pub fn trace(&self) -> C<T> {
        self.m[0][0] + self.m[1][1]
    }

    pub fn det(&self) -> C<T> {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    /// `σ₂ Bᵀ σ₂`, the adjugate: `B·tilde(B) = det(B)·1`.
    pub fn tilde(&self) -> Self {
        let m = &self.m;
        Mat2C { m: [[m[1][1], -m[0][1]], [-m[1][0], m[0][0]]] }
    }

    pub fn inverse(&self) -> Result<Self> {
        let d = self.det();
        let scale = self.max_abs();
        if d.norm() <= T::epsilon() * scale * scale || !finite(&d) {
            return Err(Error::SingularMatrix);
        }
        Ok(self.tilde() * d.inv())
    }

    pub fn apply(&self, v: &Spinor<T>) -> Spinor<T> {
        [self.m[0][0] * v[0] + self.m[0][1] * v[1], self.m[1][0] * v[0] + self.m[1][1] * v[1]]
    }

    /// Hermitian part `(M + M†)/2`.
    pub fn hermitian_part(&self) -> Self {
        (*self + self.adjoint()) * C::new(T::half(), T::zero())
    }

    /// `(M − M†)/(2i)`, Hermitian.
    pub fn imaginary_part(&self) -> Self {
        (*self - self.adjoint()) * C::new(T::zero(), -T::half())
    }

    pub fn max_abs(&self) -> T {
        self.m.iter().flatten().fold(T::zero(), |a, e| a.max(e.norm()))
    }

    pub fn hermiticity_residual(&self) -> T {
        (*self - self.adjoint()).max_abs()
    }

    pub fn is_finite(&self) -> bool {
        self.m.iter().flatten().all(finite)
    }
}

/// Both parts finite.
pub fn finite<T: Real>(z: &C<T>) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

/// `u† v`.
pub fn inner<T: Real>(u: &Spinor<T>, v: &Spinor<T>) -> C<T> {
    u[0].conj() * v[0] + u[1].conj() * v[1]
}

impl<T: Real> Add for Mat2C<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        let mut m = self.m;
        for i in 0..2 {
            for j in 0..2 {
                m[i][j] = m[i][j] + o.m[i][j];
            }
        }
        Mat2C { m }
    }
}

impl<T: Real> AddAssign for Mat2C<T> {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl<T: Real> Sub for Mat2C<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        self + (-o)
    }
}

impl<T: Real> Neg for Mat2C<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Mat2C { m: self.m.map(|r| r.map(|e| -e)) }
    }
}

impl<T: Real> Mul for Mat2C<T> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let (a, b) = (&self.m, &o.m);
        let mut m = Self::zero().m;
        for i in 0..2 {
            for j in 0..2 {
                m[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        Mat2C { m }
    }
}

impl<T: Real> Mul<C<T>> for Mat2C<T> {
    type Output = Self;
    fn mul(self, s: C<T>) -> Self {
        Mat2C { m: self.m.map(|r| r.map(|e| e * s)) }
    }
}

impl<T: Real> Mul<T> for Mat2C<T> {
    type Output = Self;
    fn mul(self, s: T) -> Self {
        Mat2C { m: self.m.map(|r| r.map(|e| e * s)) }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random(rng: &mut ChaCha8Rng) -> Mat2C<f64> {
        let mut m = Mat2C::zero().m;
        for e in m.iter_mut().flatten() {
            *e = C::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        }
        Mat2C::new(m)
    }

    #[test]
    fn tilde_of_identity() {
        assert_eq!(Mat2C::<f64>::identity().tilde(), Mat2C::identity());
    }

    #[test]
    fn tilde_is_sigma2_transpose_sigma2() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let b = random(&mut rng);
        let s2 = Mat2C::pauli(2);
        assert!((s2 * b.transpose() * s2 - b.tilde()).max_abs() < 1e-15);
    }

    #[test]
    fn tilde_identities() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..100 {
            let a = random(&mut rng);
            let b = random(&mut rng);
            assert!((b * b.tilde() - Mat2C::scalar(b.det())).max_abs() < 1e-13);
            assert!(((a * b).tilde() - b.tilde() * a.tilde()).max_abs() < 1e-13);
            let lhs = (a + b).det();
            let rhs = a.det() + b.det() + (a.tilde() * b).trace();
            assert!((lhs - rhs).norm() < 1e-13);
        }
    }

    #[test]
    fn pauli_algebra() {
        let i = C::new(0.0, 1.0);
        let s = |k| Mat2C::<f64>::pauli(k);
        assert!((s(1) * s(2) - s(3) * i).max_abs() < 1e-15);
        assert!((s(2) * s(3) - s(1) * i).max_abs() < 1e-15);
        for k in 0..4 {
            assert!((s(k) * s(k) - Mat2C::identity()).max_abs() < 1e-15);
            assert_eq!(s(k).hermiticity_residual(), 0.0);
        }
        // det(x^μσ_μ) is the Minkowski square
        let x: [f64; 4] = [1.5, 0.2, -0.7, 0.4];
        let d = Mat2C::from_four_vector(x).det();
        assert!((d.re - (x[0] * x[0] - x[1] * x[1] - x[2] * x[2] - x[3] * x[3])).abs() < 1e-15);
    }

    #[test]
    fn components_round_trip_and_inverse() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = random(&mut rng);
        assert!((Mat2C::from_components(a.components()) - a).max_abs() < 1e-15);
        let inv = a.inverse().unwrap();
        assert!((a * inv - Mat2C::identity()).max_abs() < 1e-13);
        let u = [C::new(1.0, 2.0), C::new(-0.5, 0.1)];
        assert!(matches!(Mat2C::outer(&u, &u).inverse(), Err(Error::SingularMatrix)));
        assert!((Mat2C::outer(&u, &u).apply(&u)[0] - u[0] * inner(&u, &u)).norm() < 1e-15);
        let h = a.hermitian_part() + a.imaginary_part() * C::new(0.0, 1.0);
        assert!((h - a).max_abs() < 1e-15);
    }
}
