use super::fields::{vf_angles, vf_pl, vf_pw, vf_reduced, PwState};
use super::ode::{solve, DenseOutput, OdeOptions, OdeStats};
use super::{hamiltonian, HamiltonianValue};
use crate::error::{Error, Result};
use crate::liepencil::{casimir_c1, casimir_c2, pauli_lubansky, transversality, PencilParams, PoincareState};
use crate::quadrature::{quartic_coeffs, ReducedState};
use crate::scalar::Real;
use crate::twistor::{momentum_map_massless, twistor_vf, TwistorPoint};
use crate::vec3::Vec3;
use num_complex::Complex;

/// Coordinate chart a trajectory is integrated in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Chart {
    Pl,
    Pw,
    Reduced,
    Angles,
    Twistor,
}

impl Chart {
    pub fn name(self) -> &'static str {
        match self {
            Chart::Pl => "PL",
            Chart::Pw => "PW",
            Chart::Reduced => "REDUCED",
            Chart::Angles => "ANGLES",
            Chart::Twistor => "TWISTOR",
        }
    }

    /// Names of the evolving coordinates, in storage order.
    pub fn components(self) -> &'static [&'static str] {
        match self {
            Chart::Pl => &["p0", "p1", "p2", "p3", "l1", "l2", "l3", "j1", "j2", "j3"],
            Chart::Pw => &["p1", "p2", "p3", "w1", "w2", "w3"],
            Chart::Reduced => &["w0", "y", "z"],
            Chart::Angles => &["w0", "y", "z", "phi", "psi"],
            Chart::Twistor => &["re_zeta1", "im_zeta1", "re_zeta2", "im_zeta2", "re_zeta", "im_zeta"],
        }
    }
}

impl std::str::FromStr for Chart {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "PL" => Ok(Chart::Pl),
            "PW" => Ok(Chart::Pw),
            "REDUCED" => Ok(Chart::Reduced),
            "ANGLES" => Ok(Chart::Angles),
            "TWISTOR" => Ok(Chart::Twistor),
            _ => Err(Error::UndefinedChart { reason: "unknown chart name" }),
        }
    }
}

impl std::fmt::Display for Chart {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Reduced coordinates together with the polar angles of the transverse parts
/// of `P` and `W` about `J = (0, 0, |J|)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnglesState<T> {
    pub reduced: ReducedState<T>,
    pub phi: T,
    pub psi: T,
}

/// A point in one of the charts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ChartPoint<T> {
    Pl(PoincareState<T>),
    Pw(PwState<T>),
    Reduced(ReducedState<T>),
    Angles(AnglesState<T>),
    Twistor(TwistorPoint<T>),
}

impl<T: Real> ChartPoint<T> {
    pub fn chart(&self) -> Chart {
        match self {
            ChartPoint::Pl(_) => Chart::Pl,
            ChartPoint::Pw(_) => Chart::Pw,
            ChartPoint::Reduced(_) => Chart::Reduced,
            ChartPoint::Angles(_) => Chart::Angles,
            ChartPoint::Twistor(_) => Chart::Twistor,
        }
    }

    /// Evolving coordinates in the order of [`Chart::components`].
    pub fn dynamic(&self) -> Vec<T> {
        match self {
            ChartPoint::Pl(x) => x.to_array().to_vec(),
            ChartPoint::Pw(s) => vec![s.p[0], s.p[1], s.p[2], s.w[0], s.w[1], s.w[2]],
            ChartPoint::Reduced(r) => vec![r.w0, r.y, r.z],
            ChartPoint::Angles(a) => vec![a.reduced.w0, a.reduced.y, a.reduced.z, a.phi, a.psi],
            ChartPoint::Twistor(v) => vec![v.zeta1.re, v.zeta1.im, v.zeta2.re, v.zeta2.im, v.zeta.re, v.zeta.im],
        }
    }

    /// Same frozen data, evolving coordinates replaced by `v`.
    pub fn with_dynamic(&self, v: &[T]) -> Self {
        match self {
            ChartPoint::Pl(_) => ChartPoint::Pl(PoincareState::from_slice(v)),
            ChartPoint::Pw(s) => {
                ChartPoint::Pw(PwState { p: Vec3([v[0], v[1], v[2]]), w: Vec3([v[3], v[4], v[5]]), ..*s })
            }
            ChartPoint::Reduced(r) => ChartPoint::Reduced(ReducedState { w0: v[0], y: v[1], z: v[2], ..*r }),
            ChartPoint::Angles(a) => ChartPoint::Angles(AnglesState {
                reduced: ReducedState { w0: v[0], y: v[1], z: v[2], ..a.reduced },
                phi: v[3],
                psi: v[4],
            }),
            ChartPoint::Twistor(t) => ChartPoint::Twistor(TwistorPoint {
                zeta1: Complex::new(v[0], v[1]),
                zeta2: Complex::new(v[2], v[3]),
                zeta: Complex::new(v[4], v[5]),
                alpha: t.alpha,
            }),
        }
    }

    /// Time derivative of the evolving coordinates.
    pub fn vector_field(&self, params: &PencilParams<T>) -> Result<Vec<T>> {
        Ok(match self {
            ChartPoint::Pl(x) => vf_pl(x, params).to_array().to_vec(),
            ChartPoint::Pw(s) => {
                let (dp, dw) = vf_pw(s, params);
                vec![dp[0], dp[1], dp[2], dw[0], dw[1], dw[2]]
            }
            ChartPoint::Reduced(r) => vf_reduced(r, params).to_vec(),
            ChartPoint::Angles(a) => {
                let [dw0, dy, dz] = vf_reduced(&a.reduced, params);
                let (dphi, dpsi) = vf_angles(&a.reduced, params)?;
                vec![dw0, dy, dz, dphi, dpsi]
            }
            ChartPoint::Twistor(v) => {
                let [d1, d2, d3] = twistor_vf(v, params)?;
                vec![d1.re, d1.im, d2.re, d2.im, d3.re, d3.im]
            }
        })
    }

    /// Checks the preconditions of the chart.
    pub fn validate(&self, params: &PencilParams<T>) -> Result<()> {
        if !self.dynamic().iter().all(|v| v.is_finite()) {
            return Err(Error::UndefinedChart { reason: "non-finite initial data" });
        }
        match self {
            ChartPoint::Angles(a) if !(a.reduced.jmag2 > T::zero()) => {
                Err(Error::UndefinedChart { reason: "angle chart needs J != 0" })
            }
            ChartPoint::Angles(a) => vf_angles(&a.reduced, params).map(|_| ()),
            ChartPoint::Twistor(v) => {
                if params.a != -T::one() {
                    return Err(Error::UndefinedChart { reason: "twistor chart requires a = -1" });
                }
                v.delta_checked().map(|_| ())
            }
            _ => Ok(()),
        }
    }

    /// Poincaré-chart state when the chart determines one.
    pub fn to_poincare(&self) -> Option<PoincareState<T>> {
        match self {
            ChartPoint::Pl(x) => Some(*x),
            ChartPoint::Twistor(v) => momentum_map_massless(v).ok().map(|m| m.state),
            _ => None,
        }
    }

    /// Conserved quantities and constraint residual at this point.
    pub fn audit(&self, params: &PencilParams<T>) -> AuditRecord<T> {
        let a = params.a;
        let from_state = |x: &PoincareState<T>| {
            let HamiltonianValue { h, h1, h2 } = hamiltonian(x, params);
            let s = pauli_lubansky(x, a);
            AuditRecord {
                c1: casimir_c1(x, a),
                c2: casimir_c2(x, a),
                h1,
                h2,
                h,
                residual: transversality(x.p0, &x.p, &s, a),
            }
        };
        match self {
            ChartPoint::Pl(x) => from_state(x),
            ChartPoint::Twistor(v) => match momentum_map_massless(v) {
                Ok(m) => from_state(&m.state),
                Err(_) => AuditRecord::nan(),
            },
            ChartPoint::Pw(s) => {
                let b = params.b;
                let (p0, w0) = (s.p0, s.w0());
                let c1 = a * p0 * p0 + s.p.norm2();
                let c2 = a * w0 * w0 + s.w.norm2();
                let h1 = b * p0 * p0 + s.p.norm2();
                // L×P = W − aP⁰J
                let h2 = b * w0 * w0 + (s.w + s.j * ((b - a) * p0)).norm2();
                AuditRecord {
                    c1,
                    c2,
                    h1,
                    h2,
                    h: (params.c * h1 + params.d * h2) * T::half(),
                    residual: transversality(p0, &s.p, &s.spin(), a),
                }
            }
            ChartPoint::Reduced(r) => reduced_audit(r, params),
            ChartPoint::Angles(s) => reduced_audit(&s.reduced, params),
        }
    }
}

fn reduced_audit<T: Real>(r: &ReducedState<T>, params: &PencilParams<T>) -> AuditRecord<T> {
    let g = params.b - params.a;
    let h1 = r.c1 + g * r.p0 * r.p0;
    let h2 = r.c2 + g * (r.w0 * r.w0 + T::two() * r.p0 * r.y + g * r.p0 * r.p0 * r.jmag2);
    AuditRecord {
        c1: r.c1,
        c2: r.c2,
        h1,
        h2,
        h: (params.c * h1 + params.d * h2) * T::half(),
        residual: quartic_coeffs(r, params).relative_residual(r.w0, r.p0 * r.z),
    }
}

/// Conserved quantities at one sample plus the chart's constraint residual:
/// transversality `aP⁰W⁰ + P·W` in the PL, PW and twistor charts, the relative
/// first-integral residual of the quartic in the reduced and angle charts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AuditRecord<T> {
    pub c1: T,
    pub c2: T,
    pub h1: T,
    pub h2: T,
    pub h: T,
    pub residual: T,
}

impl<T: Real> AuditRecord<T> {
    pub const NAMES: [&'static str; 5] = ["c1", "c2", "h1", "h2", "h"];

    fn nan() -> Self {
        let n = T::nan();
        AuditRecord { c1: n, c2: n, h1: n, h2: n, h: n, residual: n }
    }

    pub fn quantities(&self) -> [T; 5] {
        [self.c1, self.c2, self.h1, self.h2, self.h]
    }
}

/// Settings for [`integrate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegrateOptions<T> {
    pub rel_tol: T,
    pub abs_tol: T,
    /// Number of uniformly spaced output samples including both ends.
    pub samples: usize,
    pub max_steps: usize,
}

impl<T: Real> Default for IntegrateOptions<T> {
    fn default() -> Self {
        IntegrateOptions { rel_tol: T::lit(1e-10), abs_tol: T::lit(1e-12), samples: 101, max_steps: 1_000_000 }
    }
}

impl<T: Real> IntegrateOptions<T> {
    fn ode(&self) -> OdeOptions<T> {
        OdeOptions { rel_tol: self.rel_tol, abs_tol: self.abs_tol, max_steps: self.max_steps, ..Default::default() }
    }
}

/// Sampled solution of one integration.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<T> {
    pub chart: Chart,
    pub params: PencilParams<T>,
    pub times: Vec<T>,
    pub points: Vec<ChartPoint<T>>,
    pub audit: Vec<AuditRecord<T>>,
    pub stats: OdeStats,
    initial: ChartPoint<T>,
    dense: DenseOutput<T>,
}

impl<T: Real> Trajectory<T> {
    pub fn initial(&self) -> &ChartPoint<T> {
        &self.initial
    }

    pub fn t_start(&self) -> T {
        self.dense.t_start()
    }

    pub fn t_end(&self) -> T {
        self.dense.t_end()
    }

    /// Accepted step boundaries of the integrator.
    pub fn mesh(&self) -> Vec<T> {
        self.dense.mesh()
    }

    /// Chart point at any `t` in the integrated span, by dense interpolation.
    pub fn point_at(&self, t: T) -> Result<ChartPoint<T>> {
        Ok(self.initial.with_dynamic(&self.dense.eval(t)?))
    }

    /// Reduced coordinates `(W⁰, y, z)` and frozen data at time `t`.
    pub fn reduced_at(&self, t: T) -> Result<ReducedState<T>> {
        let base = match &self.initial {
            ChartPoint::Reduced(r) => Some(*r),
            ChartPoint::Angles(a) => Some(a.reduced),
            _ => None,
        };
        match (base, self.point_at(t)?) {
            (Some(_), ChartPoint::Reduced(r)) => Ok(r),
            (Some(_), ChartPoint::Angles(a)) => Ok(a.reduced),
            (_, ChartPoint::Pw(s)) => Ok(crate::quadrature::reduce_pw(&s, &self.params)),
            (_, p) => p
                .to_poincare()
                .map(|x| crate::quadrature::reduce(&x, &self.params))
                .ok_or(Error::ChartMismatch { expected: "chart with reduced coordinates", found: self.chart.name() }),
        }
    }
}

/// Trajectory computed up to a failure, and the failure if there was one.
#[derive(Debug, Clone, PartialEq)]
pub struct PartialTrajectory<T> {
    pub trajectory: Trajectory<T>,
    pub error: Option<Error>,
}

fn uniform_grid<T: Real>(t0: T, t1: T, samples: usize) -> Vec<T> {
    if samples <= 1 {
        return vec![t0];
    }
    let n = T::from_usize(samples - 1).unwrap_or(T::one());
    (0..samples)
        .map(|k| if k + 1 == samples { t1 } else { t0 + (t1 - t0) * T::from_usize(k).unwrap_or(T::zero()) / n })
        .collect()
}

/// Integrates the flow of `h` from `x0` over `span`, sampling uniformly.
pub fn integrate<T: Real>(
    x0: &ChartPoint<T>,
    params: &PencilParams<T>,
    span: (T, T),
    opts: &IntegrateOptions<T>,
) -> Result<Trajectory<T>> {
    let p = integrate_partial(x0, params, span, opts)?;
    match p.error {
        None => Ok(p.trajectory),
        Some(e) => Err(e),
    }
}

/// Like [`integrate`], but a failure during the integration still returns the
/// samples computed before it. Invalid requests are reported as `Err`.
pub fn integrate_partial<T: Real>(
    x0: &ChartPoint<T>,
    params: &PencilParams<T>,
    span: (T, T),
    opts: &IntegrateOptions<T>,
) -> Result<PartialTrajectory<T>> {
    if opts.samples == 0 {
        return Err(Error::InvalidTolerance);
    }
    let times = uniform_grid(span.0, span.1, opts.samples);
    run(x0, params, span, &times, opts)
}

/// Integrates and samples at the given sorted times inside `[t0, t_last]`.
pub fn integrate_at<T: Real>(
    x0: &ChartPoint<T>,
    params: &PencilParams<T>,
    t0: T,
    times: &[T],
    opts: &IntegrateOptions<T>,
) -> Result<Trajectory<T>> {
    let t1 = times.last().copied().ok_or(Error::InvalidSpan)?;
    let p = run(x0, params, (t0, t1), times, opts)?;
    match p.error {
        None => Ok(p.trajectory),
        Some(e) => Err(e),
    }
}

fn run<T: Real>(
    x0: &ChartPoint<T>,
    params: &PencilParams<T>,
    span: (T, T),
    times: &[T],
    opts: &IntegrateOptions<T>,
) -> Result<PartialTrajectory<T>> {
    x0.validate(params)?;
    let template = *x0;
    let rhs = |_t: T, y: &[T], dy: &mut [T]| -> Result<()> {
        let v = template.with_dynamic(y).vector_field(params)?;
        dy.copy_from_slice(&v);
        Ok(())
    };
    let (sol, error) = match solve(rhs, span.0, &x0.dynamic(), span.1, times, &opts.ode()) {
        Ok(sol) => (sol, None),
        Err(f) => {
            if matches!(f.error, Error::InvalidSpan | Error::InvalidTolerance) {
                return Err(f.error);
            }
            (f.partial, Some(f.error))
        }
    };
    let points: Vec<ChartPoint<T>> = sol.states.iter().map(|s| template.with_dynamic(s)).collect();
    let audit = points.iter().map(|p| p.audit(params)).collect();
    Ok(PartialTrajectory {
        trajectory: Trajectory {
            chart: x0.chart(),
            params: *params,
            times: sol.times,
            points,
            audit,
            stats: sol.stats,
            initial: template,
            dense: sol.dense,
        },
        error,
    })
}

/// Drift of one conserved quantity relative to its initial value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Drift<T> {
    pub name: &'static str,
    pub initial: T,
    pub max_abs: T,
    /// `max |q(t) − q(t₀)| / max(|q(t₀)|, 1)`.
    pub max_rel: T,
}

/// Output of [`conservation_audit`].
#[derive(Debug, Clone, PartialEq)]
pub struct AuditReport<T> {
    pub records: Vec<AuditRecord<T>>,
    pub drifts: Vec<Drift<T>>,
    pub max_residual: T,
}

impl<T: Real> AuditReport<T> {
    pub fn max_rel_drift(&self) -> T {
        self.drifts.iter().fold(T::zero(), |m, d| if d.max_rel.is_nan() { T::nan() } else { m.max(d.max_rel) })
    }
}

/// Re-evaluates the conserved quantities on every sample and measures drift.
pub fn conservation_audit<T: Real>(traj: &Trajectory<T>, params: &PencilParams<T>) -> AuditReport<T> {
    let records: Vec<AuditRecord<T>> = traj.points.iter().map(|p| p.audit(params)).collect();
    let mut drifts = Vec::with_capacity(5);
    for (k, name) in AuditRecord::<T>::NAMES.iter().enumerate() {
        let q0 = records.first().map_or(T::zero(), |r| r.quantities()[k]);
        let scale = q0.abs().max(T::one());
        let mut max_abs = T::zero();
        for r in &records {
            let d = (r.quantities()[k] - q0).abs();
            max_abs = if d.is_nan() { T::nan() } else { max_abs.max(d) };
        }
        drifts.push(Drift { name, initial: q0, max_abs, max_rel: max_abs / scale });
    }
    let max_residual = records
        .iter()
        .fold(T::zero(), |m, r| if r.residual.is_nan() { T::nan() } else { m.max(r.residual.abs()) });
    AuditReport { records, drifts, max_residual }
}
