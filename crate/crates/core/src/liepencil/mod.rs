//! The deformed metric pencil, the dual-space state, the Lie–Poisson bracket
//! family `{·,·}_a`, its Casimirs and the coadjoint action of `E_a(1,3)`.
//!
//! `a = -1` is the Poincaré algebra, `a = 0` the Galilei algebra and `a = 1`
//! the Euclidean algebra in four dimensions.

mod bracket;
mod coadjoint;

pub use bracket::{
    bracket_a, bracket_with_gradients, central_difference_gradient, jacobi_residual, pencil_bracket, CasimirC1,
    CasimirC2, PencilJacobi, Coordinate, FnObservable, Observable,
};
pub(crate) use bracket::{c2_gradient, gradient_of};
pub use coadjoint::{
    coadjoint, matrix_to_state, pairing, state_to_matrix, AlgebraElement, GroupElement,
};

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::vec3::Vec3;

/// The four scalars selecting the bracket (`a`), the second bracket of the
/// pencil (`b`) and the Hamiltonian coefficients (`c`, `d`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PencilParams<T> {
    pub a: T,
    pub b: T,
    pub c: T,
    pub d: T,
}

impl<T: Real> PencilParams<T> {
    pub fn new(a: T, b: T, c: T, d: T) -> Result<Self> {
        check_deformation("a", a)?;
        check_deformation("b", b)?;
        if !c.is_finite() {
            return Err(Error::ParameterOutOfRange { name: "c", value: c.as_f64() });
        }
        if !d.is_finite() {
            return Err(Error::ParameterOutOfRange { name: "d", value: d.as_f64() });
        }
        Ok(PencilParams { a, b, c, d })
    }

    /// `b - a`, the factor carried by every term of the flow.
    #[inline]
    pub fn gap(&self) -> T {
        self.b - self.a
    }
}

fn check_deformation<T: Real>(name: &'static str, v: T) -> Result<()> {
    if v.is_finite() && v >= -T::one() && v <= T::one() {
        Ok(())
    } else {
        Err(Error::ParameterOutOfRange { name, value: v.as_f64() })
    }
}

/// The pencil metric `diag(a, 1, 1, 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Metric<T> {
    diag: [T; 4],
}

/// Builds the pencil metric for deformation parameter `a ∈ [-1, 1]`.
pub fn metric<T: Real>(a: T) -> Result<Metric<T>> {
    check_deformation("a", a)?;
    Ok(Metric { diag: [a, T::one(), T::one(), T::one()] })
}

impl<T: Real> Metric<T> {
    pub fn diagonal(&self) -> [T; 4] {
        self.diag
    }

    pub fn entries(&self) -> [[T; 4]; 4] {
        let mut m = [[T::zero(); 4]; 4];
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = self.diag[i];
        }
        m
    }

    /// `η_{μν} u^μ v^ν`.
    pub fn contract(&self, u: &[T; 4], v: &[T; 4]) -> T {
        (0..4).fold(T::zero(), |acc, i| acc + self.diag[i] * u[i] * v[i])
    }
}

/// A point `(P⁰, P, L, J)` of the dual of the algebra.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PoincareState<T> {
    pub p0: T,
    pub p: Vec3<T>,
    pub l: Vec3<T>,
    pub j: Vec3<T>,
}

/// Number of coordinates of a [`PoincareState`].
pub const STATE_DIM: usize = 10;

impl<T: Real> PoincareState<T> {
    pub fn new(p0: T, p: Vec3<T>, l: Vec3<T>, j: Vec3<T>) -> Self {
        PoincareState { p0, p, l, j }
    }

    pub fn zero() -> Self {
        PoincareState { p0: T::zero(), p: Vec3::zero(), l: Vec3::zero(), j: Vec3::zero() }
    }

    /// Coordinates in the fixed order `(P⁰, P¹, P², P³, L₁, L₂, L₃, J₁, J₂, J₃)`.
    pub fn to_array(&self) -> [T; STATE_DIM] {
        let (p, l, j) = (self.p.0, self.l.0, self.j.0);
        [self.p0, p[0], p[1], p[2], l[0], l[1], l[2], j[0], j[1], j[2]]
    }

    pub fn from_slice(v: &[T]) -> Self {
        assert!(v.len() >= STATE_DIM, "state slice needs {STATE_DIM} entries");
        PoincareState {
            p0: v[0],
            p: Vec3([v[1], v[2], v[3]]),
            l: Vec3([v[4], v[5], v[6]]),
            j: Vec3([v[7], v[8], v[9]]),
        }
    }

    pub fn four_momentum(&self) -> [T; 4] {
        [self.p0, self.p[0], self.p[1], self.p[2]]
    }

    pub fn is_finite(&self) -> bool {
        self.to_array().iter().all(|v| v.is_finite())
    }

    pub fn max_abs_diff(&self, o: &Self) -> T {
        self.to_array()
            .iter()
            .zip(o.to_array().iter())
            .fold(T::zero(), |m, (x, y)| m.max((*x - *y).abs()))
    }
}

/// Pauli–Lubansky four-vector `(W⁰, W)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SpinVector<T> {
    pub w0: T,
    pub w: Vec3<T>,
}

/// `c₁ = a(P⁰)² + P·P`.
pub fn casimir_c1<T: Real>(x: &PoincareState<T>, a: T) -> T {
    a * x.p0 * x.p0 + x.p.norm2()
}

/// `c₂ = a(W⁰)² + W·W` with `W` from [`pauli_lubansky`].
pub fn casimir_c2<T: Real>(x: &PoincareState<T>, a: T) -> T {
    let s = pauli_lubansky(x, a);
    a * s.w0 * s.w0 + s.w.norm2()
}

/// `W⁰ = -J·P`, `W = aP⁰J + L×P`.
pub fn pauli_lubansky<T: Real>(x: &PoincareState<T>, a: T) -> SpinVector<T> {
    SpinVector { w0: -x.j.dot(&x.p), w: x.j * (a * x.p0) + x.l.cross(&x.p) }
}

/// `a P⁰ W⁰ + P·W`; vanishes identically for the output of [`pauli_lubansky`].
pub fn transversality<T: Real>(p0: T, p: &Vec3<T>, spin: &SpinVector<T>, a: T) -> T {
    a * p0 * spin.w0 + p.dot(&spin.w)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn st(p0: f64, p: [f64; 3], l: [f64; 3], j: [f64; 3]) -> PoincareState<f64> {
        PoincareState::new(p0, Vec3(p), Vec3(l), Vec3(j))
    }

    #[test]
    fn metric_cases() {
        assert_eq!(metric(-1.0).unwrap().diagonal(), [-1.0, 1.0, 1.0, 1.0]);
        assert_eq!(metric(0.0).unwrap().diagonal(), [0.0, 1.0, 1.0, 1.0]);
        assert_eq!(metric(1.0).unwrap().diagonal(), [1.0, 1.0, 1.0, 1.0]);
        let e = metric(0.25).unwrap().entries();
        for i in 0..4 {
            for k in 0..4 {
                assert_eq!(e[i][k], e[k][i]);
            }
        }
        assert!(matches!(metric(1.5), Err(Error::ParameterOutOfRange { name: "a", .. })));
        assert!(metric(f64::NAN).is_err());
    }

    #[test]
    fn params_reject_out_of_range() {
        assert!(PencilParams::new(-1.0, 0.3, 1.0, 0.5).is_ok());
        assert!(PencilParams::new(-1.0, 1.3, 1.0, 0.5).is_err());
        assert!(PencilParams::new(-1.0, 0.3, f64::INFINITY, 0.5).is_err());
    }

    #[test]
    fn c1_examples() {
        assert_eq!(casimir_c1(&st(2.0, [0.0, 0.0, 1.0], [0.0; 3], [0.0; 3]), -1.0), -3.0);
        assert_eq!(casimir_c1(&st(0.0, [3.0, 4.0, 0.0], [0.0; 3], [0.0; 3]), 1.0), 25.0);
    }

    #[test]
    fn c1_matches_metric_contraction() {
        let x = st(0.7, [0.2, -1.1, 0.4], [0.3, 0.1, -0.2], [1.0, 0.5, 0.2]);
        for a in [-1.0, -0.3, 0.0, 0.8] {
            let pm = x.four_momentum();
            let via_metric = metric(a).unwrap().contract(&pm, &pm);
            assert!((casimir_c1(&x, a) - via_metric).abs() < 1e-14);
        }
    }

    #[test]
    fn c2_special_cases() {
        let l = [0.3, -0.8, 0.5];
        let p = [1.2, 0.1, -0.4];
        let x = st(0.9, p, l, [0.0; 3]);
        let lxp = Vec3(l).cross(&Vec3(p));
        assert!((casimir_c2(&x, -1.0) - lxp.norm2()).abs() < 1e-14);

        // L parallel to P at a = -1
        let p = Vec3([0.4, -0.2, 1.0]);
        let x = PoincareState::new(1.3, p, p * 2.5, Vec3([0.2, 0.7, -0.1]));
        let jp: f64 = x.j.dot(&p);
        let expected = -jp.powi(2) + 1.3f64.powi(2) * x.j.norm2();
        assert!((casimir_c2(&x, -1.0) - expected).abs() < 1e-13);
    }

    #[test]
    fn pauli_lubansky_parallel_example() {
        let (p, j, l) = (0.7, 1.9, -0.4);
        let x = st(1.0, [0.0, 0.0, p], [0.0, 0.0, l], [0.0, 0.0, j]);
        let s = pauli_lubansky(&x, -1.0);
        assert_eq!(s.w0, -j * p);
        assert_eq!(s.w, Vec3([0.0, 0.0, -j]));
        let zero = pauli_lubansky(&st(1.0, [1.0, 2.0, 3.0], [0.0; 3], [0.0; 3]), -1.0);
        assert_eq!(zero, SpinVector::default());
    }

    #[test]
    fn state_array_round_trip() {
        let x = st(0.1, [0.2, 0.3, 0.4], [0.5, 0.6, 0.7], [0.8, 0.9, 1.0]);
        assert_eq!(PoincareState::from_slice(&x.to_array()), x);
    }
}
