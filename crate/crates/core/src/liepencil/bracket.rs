use super::{pauli_lubansky, PoincareState, STATE_DIM};
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::vec3::Vec3;
use std::marker::PhantomData;

/// A smooth function on the dual space. Implementors may supply an analytic
/// gradient; otherwise a central difference is used.
pub trait Observable<T: Real> {
    fn value(&self, x: &PoincareState<T>) -> T;

    /// Gradient in the coordinate order of [`PoincareState::to_array`].
    fn gradient(&self, _x: &PoincareState<T>) -> Option<[T; STATE_DIM]> {
        None
    }
}

impl<T: Real, O: Observable<T> + ?Sized> Observable<T> for &O {
    fn value(&self, x: &PoincareState<T>) -> T {
        (**self).value(x)
    }
    fn gradient(&self, x: &PoincareState<T>) -> Option<[T; STATE_DIM]> {
        (**self).gradient(x)
    }
}

/// Coordinate function selecting entry `k` of [`PoincareState::to_array`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Coordinate(pub usize);

impl<T: Real> Observable<T> for Coordinate {
    fn value(&self, x: &PoincareState<T>) -> T {
        x.to_array()[self.0]
    }
    fn gradient(&self, _x: &PoincareState<T>) -> Option<[T; STATE_DIM]> {
        let mut g = [T::zero(); STATE_DIM];
        g[self.0] = T::one();
        Some(g)
    }
}

/// `c₁` as an observable for a fixed deformation parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CasimirC1<T>(pub T);

impl<T: Real> Observable<T> for CasimirC1<T> {
    fn value(&self, x: &PoincareState<T>) -> T {
        super::casimir_c1(x, self.0)
    }
    fn gradient(&self, x: &PoincareState<T>) -> Option<[T; STATE_DIM]> {
        let two = T::two();
        let mut g = [T::zero(); STATE_DIM];
        g[0] = two * self.0 * x.p0;
        for k in 0..3 {
            g[1 + k] = two * x.p[k];
        }
        Some(g)
    }
}

/// `c₂` as an observable for a fixed deformation parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CasimirC2<T>(pub T);

impl<T: Real> Observable<T> for CasimirC2<T> {
    fn value(&self, x: &PoincareState<T>) -> T {
        super::casimir_c2(x, self.0)
    }
    fn gradient(&self, x: &PoincareState<T>) -> Option<[T; STATE_DIM]> {
        Some(c2_gradient(x, self.0))
    }
}

/// Gradient of `a(W⁰)² + W·W` at deformation `a`.
pub(crate) fn c2_gradient<T: Real>(x: &PoincareState<T>, a: T) -> [T; STATE_DIM] {
    let two = T::two();
    let s = pauli_lubansky(x, a);
    let d_p0 = two * a * s.w.dot(&x.j);
    let d_p = x.j * (-two * a * s.w0) + s.w.cross(&x.l) * two;
    let d_l = x.p.cross(&s.w) * two;
    let d_j = x.p * (-two * a * s.w0) + s.w * (two * a * x.p0);
    pack(d_p0, d_p, d_l, d_j)
}

pub(crate) fn pack<T: Real>(p0: T, p: Vec3<T>, l: Vec3<T>, j: Vec3<T>) -> [T; STATE_DIM] {
    PoincareState::new(p0, p, l, j).to_array()
}

/// Gradient evaluator type used when an [`FnObservable`] has none.
pub type NoGradient<T> = fn(&PoincareState<T>) -> [T; STATE_DIM];

/// Observable backed by closures.
pub struct FnObservable<T, F, G = NoGradient<T>> {
    value: F,
    gradient: Option<G>,
    _scalar: PhantomData<fn() -> T>,
}

impl<T: Real, F: Fn(&PoincareState<T>) -> T> FnObservable<T, F> {
    /// Value only; the gradient falls back to central differences.
    pub fn new(value: F) -> Self {
        FnObservable { value, gradient: None, _scalar: PhantomData }
    }
}

impl<T, F, G> FnObservable<T, F, G> {
    pub fn with_gradient(value: F, gradient: G) -> Self {
        FnObservable { value, gradient: Some(gradient), _scalar: PhantomData }
    }
}

impl<T, F, G> Observable<T> for FnObservable<T, F, G>
where
    T: Real,
    F: Fn(&PoincareState<T>) -> T,
    G: Fn(&PoincareState<T>) -> [T; STATE_DIM],
{
    fn value(&self, x: &PoincareState<T>) -> T {
        (self.value)(x)
    }
    fn gradient(&self, x: &PoincareState<T>) -> Option<[T; STATE_DIM]> {
        self.gradient.as_ref().map(|g| g(x))
    }
}

/// Central-difference gradient with per-coordinate step `h·max(1, |xᵢ|)`.
pub fn central_difference_gradient<T: Real, O: Observable<T> + ?Sized>(
    f: &O,
    x: &PoincareState<T>,
) -> [T; STATE_DIM] {
    // 1e-6 for f64; coarser for f32 where that step drowns in roundoff
    let base = T::lit(1e-6).max(T::epsilon().cbrt() * T::lit(0.1));
    let v = x.to_array();
    let mut g = [T::zero(); STATE_DIM];
    for i in 0..STATE_DIM {
        let h = base * T::one().max(v[i].abs());
        let mut up = v;
        let mut dn = v;
        up[i] += h;
        dn[i] -= h;
        let fu = f.value(&PoincareState::from_slice(&up));
        let fd = f.value(&PoincareState::from_slice(&dn));
        g[i] = (fu - fd) / (up[i] - dn[i]);
    }
    g
}

pub(crate) fn gradient_of<T: Real, O: Observable<T> + ?Sized>(
    f: &O,
    x: &PoincareState<T>,
) -> Result<[T; STATE_DIM]> {
    let g = f.gradient(x).unwrap_or_else(|| central_difference_gradient(f, x));
    if g.iter().all(|v| v.is_finite()) {
        Ok(g)
    } else {
        Err(Error::InvalidGradient)
    }
}

/// `{f, g}_a(x)` for observables with analytic or finite-difference gradients.
pub fn bracket_a<T, F, G>(f: &F, g: &G, x: &PoincareState<T>, a: T) -> Result<T>
where
    T: Real,
    F: Observable<T> + ?Sized,
    G: Observable<T> + ?Sized,
{
    let df = gradient_of(f, x)?;
    let dg = gradient_of(g, x)?;
    Ok(bracket_with_gradients(&df, &dg, x, a))
}

/// The bracket evaluated directly on two gradient vectors.
pub fn bracket_with_gradients<T: Real>(
    df: &[T; STATE_DIM],
    dg: &[T; STATE_DIM],
    x: &PoincareState<T>,
    a: T,
) -> T {
    let f = PoincareState::from_slice(df);
    let g = PoincareState::from_slice(dg);
    let (fp0, fp, fl, fj) = (f.p0, f.p, f.l, f.j);
    let (gp0, gp, gl, gj) = (g.p0, g.p, g.l, g.j);

    a * x.p0 * (fp.dot(&gl) - fl.dot(&gp))
        + x.j.dot(&(fl.cross(&gl) * a + fj.cross(&gj)))
        + gp0 * x.p.dot(&fl)
        - fp0 * x.p.dot(&gl)
        + x.p.dot(&(fp.cross(&gj) + fj.cross(&gp)))
        + x.l.dot(&(fl.cross(&gj) + fj.cross(&gl)))
}

/// `{f, g}_a + ε{f, g}_b` on gradients.
pub fn pencil_bracket<T: Real>(df: &[T; STATE_DIM], dg: &[T; STATE_DIM], x: &PoincareState<T>, a: T, b: T, eps: T) -> T {
    bracket_with_gradients(df, dg, x, a) + eps * bracket_with_gradients(df, dg, x, b)
}

fn unit<T: Real>(k: usize) -> [T; STATE_DIM] {
    let mut e = [T::zero(); STATE_DIM];
    e[k] = T::one();
    e
}

/// The pencil `{·,·}_a + ε{·,·}_b` with the inner brackets of coordinate
/// pairs tabulated. `{xⱼ, xₖ}` is linear in the state, so its gradient is
/// read off the unit states exactly.
#[derive(Debug, Clone)]
pub struct PencilJacobi<T> {
    a: T,
    b: T,
    eps: T,
    inner: Vec<[T; STATE_DIM]>,
}

impl<T: Real> PencilJacobi<T> {
    pub fn new(a: T, b: T, eps: T) -> Self {
        let mut inner = vec![[T::zero(); STATE_DIM]; STATE_DIM * STATE_DIM];
        for u in 0..STATE_DIM {
            for v in 0..STATE_DIM {
                for m in 0..STATE_DIM {
                    let e = PoincareState::from_slice(&unit::<T>(m));
                    inner[u * STATE_DIM + v][m] = pencil_bracket(&unit(u), &unit(v), &e, a, b, eps);
                }
            }
        }
        PencilJacobi { a, b, eps, inner }
    }

    /// `{xᵢ,{xⱼ,xₖ}} + {xⱼ,{xₖ,xᵢ}} + {xₖ,{xᵢ,xⱼ}}`
    pub fn residual(&self, i: usize, j: usize, k: usize, x: &PoincareState<T>) -> T {
        let g = |u: usize, v: usize| &self.inner[u * STATE_DIM + v];
        let pb = |f: usize, dg: &[T; STATE_DIM]| pencil_bracket(&unit(f), dg, x, self.a, self.b, self.eps);
        pb(i, g(j, k)) + pb(j, g(k, i)) + pb(k, g(i, j))
    }
}

/// Jacobi cyclic sum on a coordinate triple, see [`PencilJacobi`].
pub fn jacobi_residual<T: Real>(i: usize, j: usize, k: usize, x: &PoincareState<T>, a: T, b: T, eps: T) -> T {
    PencilJacobi::new(a, b, eps).residual(i, j, k, x)
}
