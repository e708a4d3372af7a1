use super::{metric, PoincareState, STATE_DIM};
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::vec3::Vec3;

type M4<T> = [[T; 4]; 4];
type M5<T> = [[T; 5]; 5];

/// Element `(τ, Λ)` of `E_a(1,3)`, represented on 5×5 matrices as
/// `[[1, 0], [τ, Λ]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroupElement<T> {
    pub tau: [T; 4],
    pub lambda: M4<T>,
}

fn identity4<T: Real>() -> M4<T> {
    let mut m = [[T::zero(); 4]; 4];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = T::one();
    }
    m
}

impl<T: Real> GroupElement<T> {
    pub fn new(tau: [T; 4], lambda: M4<T>) -> Self {
        GroupElement { tau, lambda }
    }

    pub fn identity() -> Self {
        GroupElement { tau: [T::zero(); 4], lambda: identity4() }
    }

    pub fn translation(tau: [T; 4]) -> Self {
        GroupElement { tau, lambda: identity4() }
    }

    /// Rotation by `angle` about spatial axis `axis ∈ {0, 1, 2}`, right-handed.
    pub fn rotation(axis: usize, angle: T) -> Self {
        let (k, l) = ((axis + 1) % 3, (axis + 2) % 3);
        let (s, c) = angle.sin_cos();
        let mut m = identity4();
        m[1 + k][1 + k] = c;
        m[1 + l][1 + l] = c;
        m[1 + l][1 + k] = s;
        m[1 + k][1 + l] = -s;
        GroupElement { tau: [T::zero(); 4], lambda: m }
    }

    /// One-parameter subgroup generated by the boost along `axis` at
    /// deformation `a`: hyperbolic for `a < 0`, shear for `a = 0`, circular for `a > 0`.
    pub fn boost(axis: usize, theta: T, a: T) -> Self {
        let (ch, sh_over) = if a < T::zero() {
            let r = (-a).sqrt();
            ((r * theta).cosh(), (r * theta).sinh() / r)
        } else if a > T::zero() {
            let r = a.sqrt();
            ((r * theta).cos(), (r * theta).sin() / r)
        } else {
            (T::one(), theta)
        };
        let mut m = identity4();
        let k = 1 + axis;
        m[0][0] = ch;
        m[k][k] = ch;
        m[k][0] = sh_over;
        m[0][k] = -a * sh_over;
        GroupElement { tau: [T::zero(); 4], lambda: m }
    }

    /// Group product `self · other`.
    pub fn compose(&self, other: &Self) -> Self {
        let mut lambda = [[T::zero(); 4]; 4];
        let mut tau = self.tau;
        for i in 0..4 {
            for k in 0..4 {
                tau[i] += self.lambda[i][k] * other.tau[k];
                for l in 0..4 {
                    lambda[i][k] += self.lambda[i][l] * other.lambda[l][k];
                }
            }
        }
        GroupElement { tau, lambda }
    }

    /// Max entry of `|Λ ηᵃ Λᵀ − ηᵃ|`.
    pub fn isometry_residual(&self, a: T) -> T {
        let eta = [a, T::one(), T::one(), T::one()];
        let mut r = T::zero();
        for i in 0..4 {
            for k in 0..4 {
                let mut s = T::zero();
                for l in 0..4 {
                    s += self.lambda[i][l] * eta[l] * self.lambda[k][l];
                }
                let target = if i == k { eta[i] } else { T::zero() };
                r = r.max((s - target).abs());
            }
        }
        r
    }

    fn matrix(&self) -> M5<T> {
        let mut g = [[T::zero(); 5]; 5];
        g[0][0] = T::one();
        for i in 0..4 {
            g[1 + i][0] = self.tau[i];
            for k in 0..4 {
                g[1 + i][1 + k] = self.lambda[i][k];
            }
        }
        g
    }

    fn inverse_matrix(&self) -> Result<M5<T>> {
        let li = invert4(&self.lambda)?;
        let mut g = [[T::zero(); 5]; 5];
        g[0][0] = T::one();
        for i in 0..4 {
            let mut t = T::zero();
            for k in 0..4 {
                t += li[i][k] * self.tau[k];
                g[1 + i][1 + k] = li[i][k];
            }
            g[1 + i][0] = -t;
        }
        Ok(g)
    }
}

fn invert4<T: Real>(m: &M4<T>) -> Result<M4<T>> {
    let mut a = *m;
    let mut inv = identity4::<T>();
    let scale = m.iter().flatten().fold(T::zero(), |s, v| s.max(v.abs()));
    let tiny = T::epsilon() * T::lit(16.0) * scale.max(T::one());
    for col in 0..4 {
        let piv = (col..4)
            .max_by(|&i, &k| a[i][col].abs().partial_cmp(&a[k][col].abs()).unwrap_or(std::cmp::Ordering::Equal))
            .unwrap_or(col);
        if !(a[piv][col].abs() > tiny) {
            return Err(Error::SingularMatrix);
        }
        a.swap(col, piv);
        inv.swap(col, piv);
        let d = a[col][col];
        for k in 0..4 {
            a[col][k] /= d;
            inv[col][k] /= d;
        }
        for r in 0..4 {
            if r != col {
                let f = a[r][col];
                for k in 0..4 {
                    a[r][k] -= f * a[col][k];
                    inv[r][k] -= f * inv[col][k];
                }
            }
        }
    }
    Ok(inv)
}

/// Basis element `e_i` of the algebra dual to coordinate `i`, so that
/// `Tr(e_i ρ) = x_i`.
pub(crate) fn basis<T: Real>(i: usize, a: T) -> M5<T> {
    let mut e = [[T::zero(); 5]; 5];
    match i {
        0..=3 => e[1 + i][0] = T::one(),
        4..=6 => {
            let k = i - 4;
            e[2 + k][1] = T::one();
            e[1][2 + k] = -a;
        }
        7..=9 => {
            let n = i - 7;
            let (k, l) = ((n + 1) % 3, (n + 2) % 3);
            e[2 + l][2 + k] = T::one();
            e[2 + k][2 + l] = -T::one();
        }
        _ => panic!("basis index {i} out of range"),
    }
    e
}

/// Algebra element `χ = Σ χᵢ eᵢ`, coefficients in state-coordinate order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlgebraElement<T> {
    pub coeffs: [T; STATE_DIM],
}

impl<T: Real> AlgebraElement<T> {
    pub fn new(coeffs: [T; STATE_DIM]) -> Self {
        AlgebraElement { coeffs }
    }

    /// 5×5 matrix of the element in the representation with deformation `a`.
    pub fn matrix(&self, a: T) -> M5<T> {
        let mut m = [[T::zero(); 5]; 5];
        for (i, &c) in self.coeffs.iter().enumerate() {
            let e = basis(i, a);
            for r in 0..5 {
                for s in 0..5 {
                    m[r][s] += c * e[r][s];
                }
            }
        }
        m
    }
}

fn mul5<T: Real>(x: &M5<T>, y: &M5<T>) -> M5<T> {
    let mut m = [[T::zero(); 5]; 5];
    for i in 0..5 {
        for k in 0..5 {
            let mut s = T::zero();
            for l in 0..5 {
                s += x[i][l] * y[l][k];
            }
            m[i][k] = s;
        }
    }
    m
}

fn trace_product<T: Real>(x: &M5<T>, y: &M5<T>) -> T {
    let mut s = T::zero();
    for i in 0..5 {
        for k in 0..5 {
            s += x[i][k] * y[k][i];
        }
    }
    s
}

/// `⟨χ, ρ⟩ = Tr(χ ρ)`.
pub fn pairing<T: Real>(chi: &AlgebraElement<T>, rho: &M5<T>, a: T) -> T {
    trace_product(&chi.matrix(a), rho)
}

/// Strictly upper triangular matrix: row 0 carries `P`, row 1 carries `L`,
/// the lower-right 3×3 block carries `εₖₗₙJₙ`.
pub fn state_to_matrix<T: Real>(x: &PoincareState<T>) -> M5<T> {
    let mut m = [[T::zero(); 5]; 5];
    let pm = x.four_momentum();
    for mu in 0..4 {
        m[0][1 + mu] = pm[mu];
    }
    for k in 0..3 {
        m[1][2 + k] = x.l[k];
    }
    m[2][3] = x.j[2];
    m[2][4] = -x.j[1];
    m[3][4] = x.j[0];
    m
}

/// Inverse of [`state_to_matrix`]; any non-zero entry outside the layout is rejected.
pub fn matrix_to_state<T: Real>(rho: &M5<T>) -> Result<PoincareState<T>> {
    for r in 0..5 {
        for c in 0..5 {
            let allowed = (r == 0 && c >= 1) || (r == 1 && c >= 2) || (r >= 2 && c > r);
            if !allowed && rho[r][c] != T::zero() {
                return Err(Error::OffPattern { row: r, col: c });
            }
        }
    }
    Ok(PoincareState {
        p0: rho[0][1],
        p: Vec3([rho[0][2], rho[0][3], rho[0][4]]),
        l: Vec3([rho[1][2], rho[1][3], rho[1][4]]),
        j: Vec3([rho[3][4], -rho[2][4], rho[2][3]]),
    })
}

/// Coadjoint action `Ad*_g x`, read off as `xᵢ' = Tr(eᵢ g ρ g⁻¹)`.
pub fn coadjoint<T: Real>(g: &GroupElement<T>, x: &PoincareState<T>, a: T) -> Result<PoincareState<T>> {
    metric(a)?;
    let residual = g.isometry_residual(a);
    if !(residual <= T::lit(1e-12).max(T::epsilon() * T::lit(64.0))) {
        return Err(Error::NonIsometric { residual: residual.as_f64() });
    }
    let rho = state_to_matrix(x);
    let conj = mul5(&mul5(&g.matrix(), &rho), &g.inverse_matrix()?);
    let mut out = [T::zero(); STATE_DIM];
    for (i, o) in out.iter_mut().enumerate() {
        *o = trace_product(&basis(i, a), &conj);
    }
    Ok(PoincareState::from_slice(&out))
}
