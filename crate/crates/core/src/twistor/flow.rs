use num_complex::Complex;

use super::bracket::{bracket_matrix, Pulled, TwistorObservable};
use super::mat2::{finite, C};
use super::massless::{momentum_map_massless, TwistorPoint};
use crate::dynamics::Hamiltonian;
use crate::error::{Error, Result};
use crate::liepencil::PencilParams;
use crate::scalar::Real;

/// `dζᵢ/dt = {ζᵢ, h∘J⁺} = Σⱼ B_ij ∂_{ζ̄ⱼ}(h∘J⁺)`. Needs `a = −1`.
pub fn twistor_vf<T: Real>(v: &TwistorPoint<T>, params: &PencilParams<T>) -> Result<[C<T>; 3]> {
    if params.a != -T::one() {
        return Err(Error::UndefinedChart { reason: "twistor chart requires a = -1" });
    }
    v.delta_checked()?;
    let dh = Pulled(Hamiltonian(*params)).wirtinger(v);
    if dh.iter().any(|z| !finite(z)) {
        return Err(Error::NonFiniteDerivative { t: f64::NAN });
    }
    let b = bracket_matrix(v);
    let mut out = [Complex::new(T::zero(), T::zero()); 3];
    for (i, o) in out.iter_mut().enumerate() {
        for j in 0..3 {
            *o = *o + b[i][j] * dh[j + 3];
        }
    }
    Ok(out)
}

/// canonical `dζ/dt` = κ · printed
pub const KAPPA_ZETA_RATE: f64 = -1.0;

/// The rates as printed for the twistor-side flow, kept for comparison.
/// Only the `ζ` component matches [`twistor_vf`], up to [`KAPPA_ZETA_RATE`].
pub fn printed_twistor_rates<T: Real>(v: &TwistorPoint<T>, params: &PencilParams<T>) -> Result<[C<T>; 3]> {
    let img = momentum_map_massless(v)?;
    let PencilParams { a, b, c, d } = *params;
    let g = b - a;
    let i = Complex::new(T::zero(), T::one());
    let one = Complex::new(T::one(), T::zero());
    let (z1, z2, z) = (v.zeta1, v.zeta2, v.zeta);
    let (b1, b2, bz) = (z1.conj(), z2.conj(), z.conj());
    let delta = v.delta();
    let al = v.alpha;
    let p0 = img.state.p0;
    let j2 = img.state.j.norm2();
    let zz = z * bz;
    let k = |x: f64| Complex::new(T::lit(x), T::zero());

    let s1 = k(-6.0) * z2 * b2 * z * z * bz + k(4.0) * z1 * z2 * z * bz - k(4.0) * z1 * b1 * z * z * bz
        + k(4.0) * z1 * b2 * z * bz
        + k(3.0) * z1 * z1 * z * bz * bz
        + k(2.0) * b1 * b2 * z * z
        + k(2.0) * b1 * z2 * z * z
        - k(4.0) * z2 * b2 * z
        + b1 * b1 * z * z * z
        + z2 * z2 * z
        + b2 * b2 * z
        + k(2.0) * z1 * z1 * bz
        + k(2.0) * z1 * b2
        + k(2.0) * z1 * z2 * z * z * bz * bz
        + k(2.0) * z1 * b1 * z * z * bz;
    let dz1 = -(zz + one) * (al / (T::lit(4.0) * delta) * g)
        * (z * (c - d * al * al / T::lit(4.0)) - s1 * (al * al / (T::lit(4.0) * delta * delta) * d * g));

    let s2 = k(-2.0) * z1 * b1 * zz - k(2.0) * z1 * b1 - k(4.0) * z2 * b2 * zz - k(2.0) * z2 * b2
        + k(2.0) * z1 * b2 * bz
        - b2
        + z2 * z2
        + b2 * b2
        + k(2.0) * z2 * z2 * zz
        + k(2.0) * b1 * b2 * z
        + b1 * b1 * z * z
        + z1 * z1 * bz * bz
        + k(2.0) * b2 * z
        - k(2.0) * z1
        - z1 * bz
        + b1 * z
        - z2;
    let dz2 = i * (zz - one) * (T::half() * g * p0 * (c - d * al * al / T::lit(4.0) + d * g * j2))
        + s2 * (al * d / (T::lit(4.0) * delta) * g * g * p0 * p0);

    let w = zz + one;
    let dz = -(w * w * w) * (z2 * z - z1) * (al * al * al / (T::lit(8.0) * delta * delta * delta) * d * g * g);
    Ok([dz1, dz2, dz])
}
