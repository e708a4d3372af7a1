use crate::error::{Error, Result};
use crate::liepencil::{pauli_lubansky, PencilParams, PoincareState, SpinVector};
use crate::quadrature::ReducedState;
use crate::scalar::Real;
use crate::vec3::Vec3;

/// Point of the `(P, W)` chart; `P⁰` and `J` are frozen integrals.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PwState<T> {
    pub p0: T,
    pub j: Vec3<T>,
    pub p: Vec3<T>,
    pub w: Vec3<T>,
}

impl<T: Real> PwState<T> {
    pub fn from_state(x: &PoincareState<T>, a: T) -> Self {
        PwState { p0: x.p0, j: x.j, p: x.p, w: pauli_lubansky(x, a).w }
    }

    /// `W⁰ = −J·P`.
    pub fn w0(&self) -> T {
        -self.j.dot(&self.p)
    }

    pub fn spin(&self) -> SpinVector<T> {
        SpinVector { w0: self.w0(), w: self.w }
    }
}

/// Right side of the flow in the PL chart: `(dP⁰, dP, dL, dJ)` packed as a state.
pub fn vf_pl<T: Real>(x: &PoincareState<T>, params: &PencilParams<T>) -> PoincareState<T> {
    let PencilParams { a, b, c, d } = *params;
    let g = b - a;
    let (p0, p, l, j) = (x.p0, x.p, x.l, x.j);
    let pxl = p.cross(&l);
    let dp = (p.cross(&pxl) + j.cross(&p) * (b * p0)) * (g * d * p0);
    let dl = (p * (c * p0)
        + p * (b * d * p0 * j.norm2())
        + l.cross(&pxl) * (d * p0)
        + j.cross(&l) * (d * p.norm2())
        - j.cross(&p) * (d * p.dot(&l))
        + j.cross(&l) * (b * d * p0 * p0))
        * g;
    PoincareState { p0: T::zero(), p: dp, l: dl, j: Vec3::zero() }
}

/// Right side of the flow in the `(P, W)` chart: `(dP/dt, dW/dt)`.
pub fn vf_pw<T: Real>(s: &PwState<T>, params: &PencilParams<T>) -> (Vec3<T>, Vec3<T>) {
    let PencilParams { a, b, d, .. } = *params;
    let g = b - a;
    let (p0, j, p, w) = (s.p0, s.j, s.p, s.w);
    let pj = p.dot(&j);
    let dp = (-p.cross(&w) + j.cross(&p) * (g * p0)) * (g * d * p0);
    let dw = (p.cross(&w) * pj + j.cross(&w) * (b * p0 * p0) + j.cross(&p) * (a * p0 * pj)) * (g * d);
    (dp, dw)
}

/// Right side of the reduced flow `(dW⁰, dy, dz)/dt`.
///
/// The `z` equation carries the term `a(b−a)dP⁰(W⁰)³` which the chain rule
/// from the `(P, W)` flow produces.
pub fn vf_reduced<T: Real>(r: &ReducedState<T>, params: &PencilParams<T>) -> [T; 3] {
    let PencilParams { a, b, d, .. } = *params;
    let g = b - a;
    let (w0, y, z, p0, j2) = (r.w0, r.y, r.z, r.p0, r.jmag2);
    let (c1, c2) = (r.c1, r.c2);
    let dw0 = g * d * p0 * z;
    let dy = -g * d * w0 * z;
    let dz = -g * d * w0 * (c2 * p0 + c1 * a * p0 * j2 - (c1 + a * p0 * p0) * y) + a * g * d * p0 * w0 * w0 * w0;
    [dw0, dy, dz]
}

fn angle_denominators<T: Real>(r: &ReducedState<T>, a: T) -> Result<(T, T, T)> {
    let j = r.jmag2.sqrt();
    if !(j > T::zero()) {
        return Err(Error::ChartSingularity { what: "|J|", value: j.as_f64() });
    }
    let tol = T::lit(1e-10);
    let rho_p = r.c1 - a * r.p0 * r.p0 - r.w0 * r.w0 / r.jmag2;
    let rho_w = r.c2 - a * r.w0 * r.w0 - r.y * r.y / r.jmag2;
    if !(rho_p.abs() > tol) {
        return Err(Error::ChartSingularity { what: "|P_perp|^2", value: rho_p.as_f64() });
    }
    if !(rho_w.abs() > tol) {
        return Err(Error::ChartSingularity { what: "|W_perp|^2", value: rho_w.as_f64() });
    }
    Ok((j, rho_p, rho_w))
}

/// Angular velocities `(dφ/dt, dψ/dt)` of the transverse parts of `P` and `W`
/// about `J = (0, 0, |J|)`, obtained by projecting the `(P, W)` flow.
pub fn vf_angles<T: Real>(r: &ReducedState<T>, params: &PencilParams<T>) -> Result<(T, T)> {
    let PencilParams { a, b, d, .. } = *params;
    let g = b - a;
    let (j, rho_p, rho_w) = angle_denominators(r, a)?;
    let (w0, y, p0) = (r.w0, r.y, r.p0);
    let p_sq = r.c1 - a * p0 * p0;
    let w_sq = r.c2 - a * w0 * w0;
    let dphi = g * d * p0 * (g * p0 * j + (y * p_sq - a * p0 * w0 * w0) / (j * rho_p));
    let dpsi = g
        * d
        * (b * p0 * p0 * j + w0 * w0 * (w_sq - T::two() * a * p0 * y + a * a * p0 * p0 * r.jmag2) / (j * rho_w));
    Ok((dphi, dpsi))
}

/// The angular rates in the form printed alongside the closed-form solution
/// (with the coefficient `d₂` read as `d`). They do not agree with
/// [`vf_angles`] and are kept for comparison only.
pub fn printed_angle_rates<T: Real>(r: &ReducedState<T>, params: &PencilParams<T>) -> (T, T) {
    let PencilParams { a, b, d, .. } = *params;
    let g = b - a;
    let j = r.jmag2.sqrt();
    let (w0, y, p0, j2) = (r.w0, r.y, r.p0, r.jmag2);
    let dphi = g
        * d
        * p0
        * (b * p0 * j + (y - a * p0 * j2) / j - w0 * w0 * (y + a * p0 * j2) / (w0 * w0 - r.c1 * j2 + a * j2 * p0 * p0));
    let dpsi = g
        * d
        * p0
        * (b * p0 * j + (y * y - a * a * p0 * p0 * j2 * j2) / (j * p0 * (r.c2 * j2 - a * j2 * w0 * w0 - y * y))
            - w0 * w0 / (p0 * j));
    (dphi, dpsi)
}
