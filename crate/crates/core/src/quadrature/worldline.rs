use super::xi_of_t;
use crate::dynamics::{ChartPoint, PwState, Trajectory};
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::vec3::Vec3;

/// Settings for [`worldline_x`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WorldlineConfig<T> {
    /// Speed `c` of the time coordinate: `X⁰ = c t`.
    pub light_speed: T,
    /// `ξ = J·L` at the start of the trajectory. Required unless the
    /// trajectory lives in the PL chart, where `ξ` is read off directly.
    pub xi0: Option<T>,
    /// Shift `δ` of the second (imaginary) position `Y`.
    pub delta: T,
}

impl<T: Real> Default for WorldlineConfig<T> {
    fn default() -> Self {
        WorldlineConfig { light_speed: T::one(), xi0: None, delta: T::zero() }
    }
}

/// Position of the particle at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Worldline<T> {
    pub t: T,
    pub x0: T,
    pub x: Vec3<T>,
    pub y0: T,
    pub y: Vec3<T>,
}

/// Worldline of a massive particle (`a = −1`, `m² = −c₁ > 0`) from the
/// `(P, J, W)` data and `ξ`:
///
/// `X = J×(P − (P⁰/W⁰)W)/m² − (X⁰ + ξ/W⁰ + z/(m²W⁰)) P/P⁰`,
/// `Y⁰ = (W⁰ + 2δP⁰)/m²`, `Y = −(W + 2δP)/m²`.
pub fn worldline_x<T: Real>(traj: &Trajectory<T>, t: T, cfg: &WorldlineConfig<T>) -> Result<Worldline<T>> {
    let params = traj.params;
    if params.a != -T::one() {
        return Err(Error::UndefinedChart { reason: "worldline needs a = -1" });
    }
    let point = traj.point_at(t)?;
    let (s, xi) = match point {
        ChartPoint::Pl(x) => (PwState::from_state(&x, params.a), x.j.dot(&x.l)),
        ChartPoint::Pw(s) => {
            let xi0 = cfg.xi0.ok_or(Error::UndefinedChart { reason: "xi0 is required outside the PL chart" })?;
            (s, xi_of_t(traj, t, xi0)?)
        }
        _ => return Err(Error::ChartMismatch { expected: "PL or PW", found: traj.chart.name() }),
    };
    let p0 = s.p0;
    let m2 = p0 * p0 - s.p.norm2();
    if !(m2 > T::zero()) {
        return Err(Error::MassiveRejected { reason: "c1 must be negative" });
    }
    let w0 = s.w0();
    if w0 == T::zero() {
        return Err(Error::ChartSingularity { what: "W0", value: 0.0 });
    }
    if p0 == T::zero() {
        return Err(Error::ChartSingularity { what: "P0", value: 0.0 });
    }
    let z = s.j.dot(&s.p.cross(&s.w));
    let x0 = cfg.light_speed * t;
    let inv = T::one() / m2;
    let x = s.j.cross(&(s.p - s.w * (p0 / w0))) * inv - s.p * ((x0 + xi / w0 + z * inv / w0) / p0);
    let two_delta = T::two() * cfg.delta;
    Ok(Worldline {
        t,
        x0,
        x,
        y0: (w0 + two_delta * p0) * inv,
        y: -(s.w + s.p * two_delta) * inv,
    })
}
