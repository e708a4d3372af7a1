//! The Poisson bracket of the twistor symplectic form in the chart
//! `(ζ₁, ζ₂, ζ)`, with Wirtinger derivatives.

use num_complex::Complex;

use super::mat2::{Mat2C, C};
use super::massless::{momentum_map_massless, TwistorPoint};
use crate::error::Result;
use crate::liepencil::{gradient_of, Observable, STATE_DIM};
use crate::scalar::Real;

/// Wirtinger derivatives `[∂ζ₁, ∂ζ₂, ∂ζ, ∂ζ̄₁, ∂ζ̄₂, ∂ζ̄]`.
pub type Wirtinger<T> = [C<T>; 6];

/// A function on the twistor chart.
pub trait TwistorObservable<T: Real> {
    fn value(&self, v: &TwistorPoint<T>) -> C<T>;

    /// Defaults to central differences on real and imaginary parts.
    fn wirtinger(&self, v: &TwistorPoint<T>) -> Wirtinger<T> {
        wirtinger_fd(self, v)
    }
}

impl<T: Real, O: TwistorObservable<T> + ?Sized> TwistorObservable<T> for &O {
    fn value(&self, v: &TwistorPoint<T>) -> C<T> {
        (**self).value(v)
    }
    fn wirtinger(&self, v: &TwistorPoint<T>) -> Wirtinger<T> {
        (**self).wirtinger(v)
    }
}

fn coord<T: Real>(v: &TwistorPoint<T>, k: usize) -> C<T> {
    match k {
        0 => v.zeta1,
        1 => v.zeta2,
        _ => v.zeta,
    }
}

fn with_coord<T: Real>(v: &TwistorPoint<T>, k: usize, z: C<T>) -> TwistorPoint<T> {
    let mut out = *v;
    match k {
        0 => out.zeta1 = z,
        1 => out.zeta2 = z,
        _ => out.zeta = z,
    }
    out
}

/// `∂ = ½(∂ₓ − i∂ᵧ)`, `∂̄ = ½(∂ₓ + i∂ᵧ)` by central differences.
pub fn wirtinger_fd<T: Real, F: TwistorObservable<T> + ?Sized>(f: &F, v: &TwistorPoint<T>) -> Wirtinger<T> {
    let zero = Complex::new(T::zero(), T::zero());
    let mut out = [zero; 6];
    let i = Complex::new(T::zero(), T::one());
    for k in 0..3 {
        let z = coord(v, k);
        let h = T::lit(1e-6) * T::one().max(z.norm());
        let two_h = T::two() * h;
        let fx = (f.value(&with_coord(v, k, z + h)) - f.value(&with_coord(v, k, z - h))) / two_h;
        let fy = (f.value(&with_coord(v, k, z + i * h)) - f.value(&with_coord(v, k, z - i * h))) / two_h;
        out[k] = (fx - i * fy) * T::half();
        out[k + 3] = (fx + i * fy) * T::half();
    }
    out
}

/// One of the chart coordinates or its conjugate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ZetaCoord {
    /// 0, 1, 2 for ζ₁, ζ₂, ζ
    pub index: usize,
    pub conjugate: bool,
}

impl<T: Real> TwistorObservable<T> for ZetaCoord {
    fn value(&self, v: &TwistorPoint<T>) -> C<T> {
        let z = coord(v, self.index);
        if self.conjugate {
            z.conj()
        } else {
            z
        }
    }
    fn wirtinger(&self, _v: &TwistorPoint<T>) -> Wirtinger<T> {
        let mut out = [Complex::new(T::zero(), T::zero()); 6];
        out[self.index + if self.conjugate { 3 } else { 0 }] = Complex::new(T::one(), T::zero());
        out
    }
}

/// A closure on the chart, differentiated numerically.
pub struct FnTwistor<F>(pub F);

impl<T: Real, F: Fn(&TwistorPoint<T>) -> C<T>> TwistorObservable<T> for FnTwistor<F> {
    fn value(&self, v: &TwistorPoint<T>) -> C<T> {
        (self.0)(v)
    }
}

/// `F∘J⁺` for an observable `F` on the Poincaré dual, differentiated through
/// the momentum map analytically.
pub struct Pulled<O>(pub O);

impl<T: Real, O: Observable<T>> TwistorObservable<T> for Pulled<O> {
    fn value(&self, v: &TwistorPoint<T>) -> C<T> {
        match momentum_map_massless(v) {
            Ok(img) => Complex::new(self.0.value(&img.state), T::zero()),
            Err(_) => Complex::new(T::nan(), T::nan()),
        }
    }
    fn wirtinger(&self, v: &TwistorPoint<T>) -> Wirtinger<T> {
        let nan = [Complex::new(T::nan(), T::nan()); 6];
        let Ok(img) = momentum_map_massless(v) else { return nan };
        let Ok(g) = gradient_of(&self.0, &img.state) else { return nan };
        let jet = state_jet(v);
        let mut out = [Complex::new(T::zero(), T::zero()); 6];
        for w in 0..3 {
            let mut s = Complex::new(T::zero(), T::zero());
            for k in 0..STATE_DIM {
                s = s + jet[w][k] * g[k];
            }
            out[w] = s;
            out[w + 3] = s.conj();
        }
        out
    }
}

/// `(∂_w P, ∂_w M)` for the six chart variables, `w` in Wirtinger order.
fn matrix_jets<T: Real>(v: &TwistorPoint<T>) -> [(Mat2C<T>, Mat2C<T>); 6] {
    let i = Complex::new(T::zero(), T::one());
    let zero = Complex::new(T::zero(), T::zero());
    let one = Complex::new(T::one(), T::zero());
    let delta = v.delta();
    let n = v.alpha / delta;
    let (eta, xi) = (v.eta(), v.xi());
    let (z1, z) = (v.zeta1, v.zeta);
    let xi_xi = Mat2C::outer(&xi, &xi);
    let xi_dag_eta = xi[0].conj() * eta[0] + xi[1].conj() * eta[1];
    let m_shape = Mat2C::outer(&eta, &xi) - Mat2C::scalar(xi_dag_eta * T::half());
    let d_delta = [i * z.conj(), i, -i * z1.conj(), -i * z, -i, i * z1];
    let e0 = [one, zero];
    let e1 = [zero, one];
    let mut out = [(Mat2C::zero(), Mat2C::zero()); 6];
    for w in 0..6 {
        let dn = -d_delta[w] * (n / delta);
        let mut dp = xi_xi * dn;
        let mut dm = m_shape * dn;
        match w {
            // ∂η
            0 | 1 => {
                let de = if w == 0 { e0 } else { e1 };
                let xi_dag_de = xi[0].conj() * de[0] + xi[1].conj() * de[1];
                dm += (Mat2C::outer(&de, &xi) - Mat2C::scalar(xi_dag_de * T::half())) * n;
            }
            // ∂ξ (holomorphic ζ)
            2 => dp += Mat2C::outer(&e0, &xi) * n,
            // ∂ξ† (ζ̄)
            5 => {
                dp += Mat2C::outer(&xi, &e0) * n;
                dm += (Mat2C::outer(&eta, &e0) - Mat2C::scalar(eta[0] * T::half())) * n;
            }
            _ => {}
        }
        out[w] = (dp, dm);
    }
    out
}

/// `∂x_k/∂ζᵢ` for the ten Poincaré coordinates `x = (P⁰, P, L, J)` of `J⁺(v)`
/// and the holomorphic chart variables. Conjugates give the `ζ̄` derivatives.
pub fn state_jet<T: Real>(v: &TwistorPoint<T>) -> [[C<T>; STATE_DIM]; 3] {
    let jets = matrix_jets(v);
    let mut out = [[Complex::new(T::zero(), T::zero()); STATE_DIM]; 3];
    let half = T::half();
    let neg_half_i = Complex::new(T::zero(), -T::half());
    for w in 0..3 {
        let (dp, dm) = jets[w];
        let dm_bar_dag = jets[w + 3].1.adjoint();
        let pc = dp.components();
        out[w][..4].copy_from_slice(&pc);
        for k in 0..3 {
            let s = Mat2C::pauli(k + 1);
            let a = (dm * s).trace();
            let b = (dm_bar_dag * s).trace();
            out[w][4 + k] = (a + b) * half;
            out[w][7 + k] = (a - b) * neg_half_i;
        }
    }
    out
}

/// `B` with `{F, G} = Σ B_ij (∂_{ζᵢ}F ∂_{ζ̄ⱼ}G − ∂_{ζ̄ⱼ}F ∂_{ζᵢ}G)`; entries
/// `B_ij = {ζᵢ, ζ̄ⱼ}`.
pub fn bracket_matrix<T: Real>(v: &TwistorPoint<T>) -> [[C<T>; 3]; 3] {
    let s = v.delta() / v.alpha;
    let one = Complex::new(T::one(), T::zero());
    let zero = Complex::new(T::zero(), T::zero());
    let (z1, z2, z) = (v.zeta1, v.zeta2, v.zeta);
    let k = [[zero, z1, one], [-z1.conj(), z2 - z2.conj(), -z.conj()], [-one, z, zero]];
    k.map(|r| r.map(|e| e * s))
}

/// Coefficient matrix of the symplectic form: rows `dζ̄ⱼ`, columns `dζᵢ`.
pub fn form_matrix<T: Real>(v: &TwistorPoint<T>) -> [[C<T>; 3]; 3] {
    let delta = v.delta();
    let s = Complex::new(T::zero(), -v.alpha / (delta * delta));
    let one = Complex::new(T::one(), T::zero());
    let (z1, z2, z) = (v.zeta1, v.zeta2, v.zeta);
    let (b1, b2, bz) = (z1.conj(), z2.conj(), z.conj());
    let a = [
        [-z * bz, -z, bz * z1 + z2 - b2],
        [-bz, -one, b1],
        [z * b1 - z2 + b2, z1, -z1 * b1],
    ];
    a.map(|r| r.map(|e| e * s))
}

/// `{F, G}` of the twistor symplectic form.
pub fn twistor_bracket<T, F, G>(f: &F, g: &G, v: &TwistorPoint<T>) -> Result<C<T>>
where
    T: Real,
    F: TwistorObservable<T> + ?Sized,
    G: TwistorObservable<T> + ?Sized,
{
    v.delta_checked()?;
    let b = bracket_matrix(v);
    let (df, dg) = (f.wirtinger(v), g.wirtinger(v));
    let mut s = Complex::new(T::zero(), T::zero());
    for i in 0..3 {
        for j in 0..3 {
            s = s + b[i][j] * (df[i] * dg[j + 3] - df[j + 3] * dg[i]);
        }
    }
    Ok(s)
}
