//! Randomized invariant suites. Each suite reports one residual per named
//! check against a fixed tolerance.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use spinorbit::dynamics::{conservation_audit, integrate, vf_pl, ChartPoint, IntegrateOptions, PwState, Trajectory, H1, H2};
use spinorbit::liepencil::{
    bracket_a, casimir_c1, casimir_c2, pauli_lubansky, CasimirC1, CasimirC2, Coordinate, PencilJacobi, PencilParams,
    PoincareState, STATE_DIM,
};
use spinorbit::quadrature::{
    angles_state, extract_angles, l_from_w, quartic_coeffs, reconstruct_pw, reduce, time_of_w0, worldline_x, QuarticCoeffs,
    WorldlineConfig,
};
use spinorbit::twistor::{
    flag_from_pair, flag_invert, form, m_expanded, momentum_map_massive, momentum_map_massless, observables_from_coords,
    pullback, twistor_bracket, FlagPoint, Mat2C, Pulled, TwistorPoint,
};
use spinorbit::{Error, Vec3};

use crate::CliError;

/// Deformation values used wherever a suite sweeps `a` or `b`.
pub const DEFORMATIONS: [f64; 5] = [-1.0, -0.5, 0.0, 0.5, 1.0];
/// Pencil weights `ε` of `{·,·}_a + ε{·,·}_b`.
pub const PENCIL_WEIGHTS: [f64; 3] = [-1.0, 0.3, 2.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Suite {
    Brackets,
    Casimirs,
    Involution,
    ChartEquivalence,
    Quadrature,
    TwistorMassless,
    TwistorFlow,
    FlagMassive,
}

impl Suite {
    pub const ALL: [Suite; 8] = [
        Suite::Brackets,
        Suite::Casimirs,
        Suite::Involution,
        Suite::ChartEquivalence,
        Suite::Quadrature,
        Suite::TwistorMassless,
        Suite::TwistorFlow,
        Suite::FlagMassive,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Brackets => "brackets",
            Suite::Casimirs => "casimirs",
            Suite::Involution => "involution",
            Suite::ChartEquivalence => "chart-equivalence",
            Suite::Quadrature => "quadrature",
            Suite::TwistorMassless => "twistor-massless",
            Suite::TwistorFlow => "twistor-flow",
            Suite::FlagMassive => "flag-massive",
        }
    }

    /// Random states (or scenarios, for the flow suites) drawn by default.
    pub fn default_trials(self) -> usize {
        match self {
            Suite::Involution => 1000,
            Suite::ChartEquivalence | Suite::Quadrature => 20,
            Suite::TwistorFlow => 5,
            _ => 100,
        }
    }
}

impl FromStr for Suite {
    type Err = CliError;
    fn from_str(s: &str) -> Result<Self, CliError> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| CliError::Usage(format!("unknown suite '{s}'")))
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

/// One residual against its tolerance. `value` is `NaN` (written as `null`)
/// when a sample raised an error.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub samples: usize,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Check {
    pub fn new(name: &str, value: f64, tolerance: f64, samples: usize) -> Self {
        let status = if value <= tolerance { Status::Pass } else { Status::Fail };
        Check { name: name.to_string(), value, tolerance, samples, status, note: None }
    }

    pub fn skipped(name: &str, why: &str) -> Self {
        Check {
            name: name.to_string(),
            value: f64::NAN,
            tolerance: f64::NAN,
            samples: 0,
            status: Status::Skipped,
            note: Some(why.to_string()),
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    pub fn failed(&self) -> bool {
        self.status == Status::Fail
    }

    pub fn line(&self) -> String {
        match self.status {
            Status::Skipped => format!("  {:<34} skipped ({})", self.name, self.note.as_deref().unwrap_or("")),
            s => format!(
                "  {:<34} {:>11.3e}  tol {:.0e}  n={:<6} {}",
                self.name,
                self.value,
                self.tolerance,
                self.samples,
                if s == Status::Pass { "ok" } else { "FAIL" }
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    pub trials: usize,
    pub checks: Vec<Check>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        !self.checks.iter().any(Check::failed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn render(&self) -> String {
        let mut s = format!("suite {} (seed {}, trials {})\n", self.suite, self.seed, self.trials);
        for c in &self.checks {
            s.push_str(&c.line());
            s.push('\n');
        }
        s.push_str(&format!("{}: {}\n", self.suite, if self.passed() { "PASS" } else { "FAIL" }));
        s
    }
}

/// Running maximum that turns sticky `NaN` on any error.
#[derive(Debug, Clone, Copy, Default)]
pub struct Worst {
    pub value: f64,
    pub n: usize,
}

impl Worst {
    pub fn add(&mut self, v: f64) {
        self.n += 1;
        if v.is_nan() || self.value.is_nan() {
            self.value = f64::NAN;
        } else {
            self.value = self.value.max(v);
        }
    }

    pub fn add_result(&mut self, v: Result<f64, Error>) {
        self.add(v.unwrap_or(f64::NAN));
    }

    pub fn check(&self, name: &str, tol: f64) -> Check {
        Check::new(name, self.value, tol, self.n)
    }
}

/// `|u − v| / max(1, |u|)`
pub fn rel(u: f64, v: f64) -> f64 {
    (u - v).abs() / u.abs().max(1.0)
}

pub fn rel3(u: &Vec3<f64>, v: &Vec3<f64>) -> f64 {
    (0..3).fold(0.0, |m, k| m.max(rel(u[k], v[k])))
}

pub fn run_suite(suite: Suite, seed: u64, trials: usize) -> SuiteReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let trials = trials.max(1);
    let checks = match suite {
        Suite::Brackets => brackets(&mut rng, trials),
        Suite::Casimirs => casimirs(&mut rng, trials),
        Suite::Involution => involution(&mut rng, trials),
        Suite::ChartEquivalence => chart_equivalence(&mut rng, trials),
        Suite::Quadrature => quadrature(&mut rng, trials),
        Suite::TwistorMassless => twistor_massless(&mut rng, trials),
        Suite::TwistorFlow => twistor_flow(&mut rng, trials),
        Suite::FlagMassive => flag_massive(&mut rng, trials),
    };
    SuiteReport { suite: suite.name().to_string(), seed, trials, checks }
}

pub fn random_state(rng: &mut ChaCha8Rng, scale: f64) -> PoincareState<f64> {
    let v: Vec<f64> = (0..STATE_DIM).map(|_| rng.gen_range(-scale..scale)).collect();
    PoincareState::from_slice(&v)
}

fn pick(rng: &mut ChaCha8Rng, xs: &[f64]) -> f64 {
    xs[rng.gen_range(0..xs.len())]
}

/// Generic parameters with `b ≠ a` and `d ≠ 0`.
pub fn random_params(rng: &mut ChaCha8Rng, a: f64) -> PencilParams<f64> {
    let b = loop {
        let b = pick(rng, &DEFORMATIONS);
        if b != a {
            break b;
        }
    };
    let c = rng.gen_range(-1.0..1.0);
    let d = rng.gen_range(0.2..1.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
    PencilParams::new(a, b, c, d).expect("admissible parameters")
}

fn cplx(rng: &mut ChaCha8Rng) -> Complex<f64> {
    Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

/// Positive twistor with `Δ > 0.1` away from the `P⁰ = P³` chart edge.
pub fn random_twistor(rng: &mut ChaCha8Rng) -> TwistorPoint<f64> {
    loop {
        let v = TwistorPoint::new(cplx(rng), cplx(rng), cplx(rng), rng.gen_range(0.5..2.0));
        if v.delta() <= 0.1 {
            continue;
        }
        let Ok(m) = momentum_map_massless(&v) else { continue };
        let x = m.state;
        if (x.p0 - x.p[2]).abs() > 1e-2 * x.p0.abs().max(1.0) {
            return v;
        }
    }
}

pub fn random_flag(rng: &mut ChaCha8Rng) -> FlagPoint<f64> {
    loop {
        let re = Mat2C::from_four_vector([0; 4].map(|_| rng.gen_range(-1.0..1.0)));
        let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let im = Mat2C::from_four_vector([
            sign * rng.gen_range(1.0..2.0),
            rng.gen_range(-0.6..0.6),
            rng.gen_range(-0.6..0.6),
            rng.gen_range(-0.6..0.6),
        ]);
        let z = re + im * Complex::new(0.0, 1.0);
        let xi = [cplx(rng), Complex::new(1.0, 0.0)];
        if let Ok(f) = FlagPoint::new(xi, z, rng.gen_range(0.5..3.0), rng.gen_range(0.5..3.0)) {
            return f;
        }
    }
}

fn brackets(rng: &mut ChaCha8Rng, trials: usize) -> Vec<Check> {
    let states: Vec<_> = (0..trials).map(|_| random_state(rng, 2.0)).collect();
    let triples: Vec<(usize, usize, usize)> = (0..STATE_DIM)
        .flat_map(|i| (i + 1..STATE_DIM).flat_map(move |j| (j + 1..STATE_DIM).map(move |k| (i, j, k))))
        .collect();
    let mut single = Worst::default();
    let mut pencil = Worst::default();
    for &a in &DEFORMATIONS {
        let table = PencilJacobi::new(a, a, 0.0);
        for x in &states {
            for &(i, j, k) in &triples {
                single.add(table.residual(i, j, k, x).abs());
            }
        }
        for &b in &DEFORMATIONS {
            for &eps in &PENCIL_WEIGHTS {
                let table = PencilJacobi::new(a, b, eps);
                for x in &states {
                    for &(i, j, k) in &triples {
                        pencil.add(table.residual(i, j, k, x).abs());
                    }
                }
            }
        }
    }
    vec![single.check("jacobi", 1e-10), pencil.check("jacobi-pencil", 1e-10)]
}

fn casimirs(rng: &mut ChaCha8Rng, trials: usize) -> Vec<Check> {
    let mut w1 = Worst::default();
    let mut w2 = Worst::default();
    for _ in 0..trials {
        let x = random_state(rng, 2.0);
        for &a in &DEFORMATIONS {
            for k in 0..STATE_DIM {
                w1.add_result(bracket_a(&CasimirC1(a), &Coordinate(k), &x, a).map(f64::abs));
                w2.add_result(bracket_a(&CasimirC2(a), &Coordinate(k), &x, a).map(f64::abs));
            }
        }
    }
    vec![w1.check("c1-central", 1e-10), w2.check("c2-central", 1e-10)]
}

fn involution(rng: &mut ChaCha8Rng, trials: usize) -> Vec<Check> {
    let mut w = Worst::default();
    for _ in 0..trials {
        let x = random_state(rng, 2.0);
        let a = pick(rng, &DEFORMATIONS);
        let b = pick(rng, &DEFORMATIONS);
        w.add_result(bracket_a(&H1(b), &H2(b), &x, a).map(f64::abs));
    }
    vec![w.check("h1-h2", 1e-9)]
}

/// Flow comparisons over `[0, 10]`.
pub const FLOW_SPAN: (f64, f64) = (0.0, 10.0);

/// Largest relative component gap between the PL trajectory and the same
/// initial data integrated in the PW and reduced charts.
pub fn chart_gaps(x0: &PoincareState<f64>, p: &PencilParams<f64>, span: (f64, f64), opts: &IntegrateOptions<f64>) -> Result<(Trajectory<f64>, f64, f64), Error> {
    let pl = integrate(&ChartPoint::Pl(*x0), p, span, opts)?;
    let pw = integrate(&ChartPoint::Pw(PwState::from_state(x0, p.a)), p, span, opts)?;
    let red = integrate(&ChartPoint::Reduced(reduce(x0, p)), p, span, opts)?;
    let (mut gw, mut gr) = (0.0f64, 0.0f64);
    for k in 0..pl.points.len() {
        let x = pl.points[k].to_poincare().expect("PL chart");
        let s = PwState::from_state(&x, p.a);
        if let ChartPoint::Pw(q) = &pw.points[k] {
            gw = gw.max(rel3(&s.p, &q.p)).max(rel3(&s.w, &q.w));
        }
        let r = reduce(&x, p);
        if let ChartPoint::Reduced(q) = &red.points[k] {
            gr = gr.max(rel(r.w0, q.w0)).max(rel(r.y, q.y)).max(rel(r.z, q.z));
        }
    }
    Ok((pl, gw, gr))
}

fn chart_equivalence(rng: &mut ChaCha8Rng, trials: usize) -> Vec<Check> {
    let mut drift = Worst::default();
    let mut gw = Worst::default();
    let mut gr = Worst::default();
    let opts = IntegrateOptions::default();
    for _ in 0..trials {
        let a = pick(rng, &DEFORMATIONS);
        let p = random_params(rng, a);
        let x0 = random_state(rng, 1.0);
        match chart_gaps(&x0, &p, FLOW_SPAN, &opts) {
            Ok((pl, w, r)) => {
                drift.add(conservation_audit(&pl, &p).max_rel_drift());
                gw.add(w);
                gr.add(r);
            }
            Err(_) => {
                drift.add(f64::NAN);
                gw.add(f64::NAN);
                gr.add(f64::NAN);
            }
        }
    }
    vec![drift.check("conservation-drift", 1e-8), gw.check("pl-vs-pw", 1e-6), gr.check("pl-vs-reduced", 1e-6)]
}

/// Least-squares fit of `(P⁰z)² = q₄u² + q₂u + q₀` in `u = (W⁰)²`, on a
/// centred and scaled variable with modified Gram–Schmidt.
pub fn fit_quartic(samples: &[(f64, f64)]) -> Option<QuarticCoeffs<f64>> {
    let n = samples.len();
    if n < 3 {
        return None;
    }
    let us: Vec<f64> = samples.iter().map(|s| s.0 * s.0).collect();
    let mean = us.iter().sum::<f64>() / n as f64;
    let spread = us.iter().fold(0.0f64, |m, u| m.max((u - mean).abs()));
    if !(spread > 0.0) {
        return None;
    }
    let s: Vec<f64> = us.iter().map(|u| (u - mean) / spread).collect();
    let mut cols: Vec<Vec<f64>> = vec![vec![1.0; n], s.clone(), s.iter().map(|v| v * v).collect()];
    let mut rhs: Vec<f64> = samples.iter().map(|x| x.1).collect();
    let mut r = [[0.0f64; 3]; 3];
    let mut qtb = [0.0f64; 3];
    for k in 0..3 {
        for j in 0..k {
            let d: f64 = (0..n).map(|i| cols[j][i] * cols[k][i]).sum();
            r[j][k] = d;
            for i in 0..n {
                cols[k][i] -= d * cols[j][i];
            }
        }
        let norm = cols[k].iter().map(|v| v * v).sum::<f64>().sqrt();
        if !(norm > 1e-300) {
            return None;
        }
        r[k][k] = norm;
        for v in cols[k].iter_mut() {
            *v /= norm;
        }
        let d: f64 = (0..n).map(|i| cols[k][i] * rhs[i]).sum();
        qtb[k] = d;
        for i in 0..n {
            rhs[i] -= d * cols[k][i];
        }
    }
    let mut c = [0.0f64; 3];
    for k in (0..3).rev() {
        c[k] = (qtb[k] - (k + 1..3).map(|j| r[k][j] * c[j]).sum::<f64>()) / r[k][k];
    }
    let (m, h) = (mean, spread);
    Some(QuarticCoeffs { q4: c[2] / (h * h), q2: c[1] / h - 2.0 * c[2] * m / (h * h), q0: c[0] - c[1] * m / h + c[2] * m * m / (h * h) })
}

/// Result of comparing the elapsed-time quadrature with an ODE trajectory.
#[derive(Debug, Clone, Copy, Default)]
pub struct QuadratureGaps {
    pub first_integral: f64,
    pub band_time: f64,
    pub bands: usize,
    pub fit: f64,
}

/// Along a trajectory: the first-integral residual with the initial
/// coefficients, `time_of_w0` against elapsed time on every monotone run of
/// `W⁰` (two samples trimmed at each end), and the fitted quartic.
pub fn quadrature_gaps(traj: &Trajectory<f64>, p: &PencilParams<f64>) -> Result<QuadratureGaps, Error> {
    let reds = traj.times.iter().map(|&t| traj.reduced_at(t)).collect::<Result<Vec<_>, _>>()?;
    let r0 = reds[0];
    let q = quartic_coeffs(&r0, p);
    let mut out = QuadratureGaps::default();
    for r in &reds {
        out.first_integral = out.first_integral.max(q.relative_residual(r.w0, r.p0 * r.z).abs());
    }
    let fit = fit_quartic(&reds.iter().map(|r| (r.w0, (r.p0 * r.z).powi(2))).collect::<Vec<_>>());
    let scale = q.q4.abs().max(q.q2.abs()).max(q.q0.abs()).max(f64::MIN_POSITIVE);
    out.fit = match fit {
        Some(f) => (f.q4 - q.q4).abs().max((f.q2 - q.q2).abs()).max((f.q0 - q.q0).abs()) / scale,
        None => f64::NAN,
    };
    // monotone runs
    let w: Vec<f64> = reds.iter().map(|r| r.w0).collect();
    let mut start = 0;
    while start + 1 < w.len() {
        let dir = (w[start + 1] - w[start]).signum();
        let mut end = start + 1;
        while end + 1 < w.len() && (w[end + 1] - w[end]).signum() == dir {
            end += 1;
        }
        if dir != 0.0 && end >= start + 5 {
            let (i, j) = (start + 2, end - 2);
            let t = time_of_w0(w[i], w[j], &r0, p)?;
            let dt = traj.times[j] - traj.times[i];
            out.band_time = out.band_time.max((t - dt).abs());
            out.bands += 1;
        }
        start = end;
    }
    Ok(out)
}

/// Closed-form free drift (`d = 0`): `L(t) = L₀ + t·L̇₀` with everything
/// else frozen, and `X(t) = X(0) + t·((b−a)c − 1/P⁰)P`.
pub fn free_drift_gaps(traj: &Trajectory<f64>, p: &PencilParams<f64>) -> Result<(f64, f64), Error> {
    let x0 = traj.points[0].to_poincare().ok_or(Error::ChartMismatch { expected: "PL", found: traj.chart.name() })?;
    let dl = vf_pl(&x0, p).l;
    let cfg = WorldlineConfig::default();
    let start = worldline_x(traj, traj.times[0], &cfg)?;
    let v = x0.p * ((p.b - p.a) * p.c - cfg.light_speed / x0.p0);
    let (mut gl, mut gx) = (0.0f64, 0.0f64);
    for (k, &t) in traj.times.iter().enumerate() {
        let x = traj.points[k].to_poincare().expect("PL chart");
        let dt = t - traj.times[0];
        let want = PoincareState::new(x0.p0, x0.p, x0.l + dl * dt, x0.j);
        let a = x.to_array();
        let b = want.to_array();
        gl = (0..STATE_DIM).fold(gl, |m, i| m.max(rel(b[i], a[i])));
        let wl = worldline_x(traj, t, &cfg)?;
        gx = gx.max(rel3(&(start.x + v * dt), &wl.x));
    }
    Ok((gl, gx))
}

fn massive_state(rng: &mut ChaCha8Rng) -> PoincareState<f64> {
    loop {
        let mut x = random_state(rng, 1.0);
        x.p0 = rng.gen_range(1.5..2.5);
        if pauli_lubansky(&x, -1.0).w0.abs() > 0.1 {
            return x;
        }
    }
}

fn quadrature(rng: &mut ChaCha8Rng, trials: usize) -> Vec<Check> {
    let mut fi = Worst::default();
    let mut bt = Worst::default();
    let mut fit = Worst::default();
    let mut bands = 0;
    let opts = IntegrateOptions { samples: 1001, ..Default::default() };
    let mut made = 0;
    let mut attempts = 0;
    while made < trials && attempts < 50 * trials {
        attempts += 1;
        let a = pick(rng, &DEFORMATIONS);
        let p = random_params(rng, a);
        let x0 = random_state(rng, 1.0);
        let traj = match integrate(&ChartPoint::Pl(x0), &p, FLOW_SPAN, &opts) {
            Ok(t) => t,
            Err(_) => continue,
        };
        // need a resolvable band for the fit
        let w: Vec<f64> = traj.points.iter().map(|pt| reduce(&pt.to_poincare().unwrap(), &p).w0).collect();
        let (lo, hi) = w.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), v| (l.min(*v), h.max(*v)));
        if hi - lo < 0.05 * (1.0 + hi.abs().max(lo.abs())) {
            continue;
        }
        made += 1;
        match quadrature_gaps(&traj, &p) {
            Ok(g) => {
                fi.add(g.first_integral);
                bt.add(g.band_time);
                fit.add(g.fit);
                bands += g.bands;
            }
            Err(_) => {
                fi.add(f64::NAN);
                bt.add(f64::NAN);
                fit.add(f64::NAN);
            }
        }
    }
    if made < trials {
        fi.add(f64::NAN);
    }

    // angle chart round trip and the inverse of the Pauli–Lubansky map
    let mut ang = Worst::default();
    let mut lw = Worst::default();
    for _ in 0..trials.max(100) {
        let a = pick(rng, &DEFORMATIONS);
        let p = random_params(rng, a);
        let mut x = random_state(rng, 1.0);
        x.j = Vec3([0.0, 0.0, x.j.norm()]);
        ang.add_result((|| {
            let s = angles_state(&x, &p)?;
            let pw = reconstruct_pw(&s.reduced, s.phi, s.psi, &p)?;
            let want = PwState::from_state(&x, p.a);
            let (phi, psi) = extract_angles(&pw)?;
            let dphi = (phi - s.phi).sin().abs();
            let dpsi = (psi - s.psi).sin().abs();
            Ok(rel3(&want.p, &pw.p).max(rel3(&want.w, &pw.w)).max(dphi).max(dpsi))
        })());
        let y = random_state(rng, 1.0);
        let a = pick(rng, &DEFORMATIONS);
        let s = pauli_lubansky(&y, a);
        if s.w0.abs() > 1e-2 {
            lw.add_result(l_from_w(&y.p, &y.j, &s.w, y.j.dot(&y.l)).map(|l| rel3(&y.l, &l)));
        }
    }

    // free drift: d = 0
    let mut fl = Worst::default();
    let mut fx = Worst::default();
    for _ in 0..trials {
        let b = pick(rng, &DEFORMATIONS[1..]);
        let p = PencilParams::new(-1.0, b, rng.gen_range(-1.0..1.0), 0.0).unwrap();
        let x0 = massive_state(rng);
        let res = integrate(&ChartPoint::Pl(x0), &p, FLOW_SPAN, &IntegrateOptions::default())
            .and_then(|t| free_drift_gaps(&t, &p));
        match res {
            Ok((l, x)) => {
                fl.add(l);
                fx.add(x);
            }
            Err(_) => {
                fl.add(f64::NAN);
                fx.add(f64::NAN);
            }
        }
    }

    vec![
        fi.check("first-integral", 1e-8),
        bt.check("band-time", 1e-6).with_note(format!("{bands} monotone bands")),
        fit.check("quartic-fit", 1e-6),
        ang.check("angles-round-trip", 1e-8),
        lw.check("l-from-w", 1e-10),
        fl.check("free-drift-l", 1e-9),
        fx.check("free-drift-x", 1e-9),
    ]
}

/// Residuals of the massless image of one twistor: `(c₁, c₂, helicity)`,
/// each relative to its natural scale.
pub fn massless_residuals(v: &TwistorPoint<f64>) -> Result<(f64, f64, f64), Error> {
    let x = momentum_map_massless(v)?.state;
    let s2 = x.p0 * x.p0;
    let c1 = casimir_c1(&x, -1.0).abs() / s2.max(1.0);
    let c2 = casimir_c2(&x, -1.0).abs() / (s2 * (1.0 + x.j.norm2() + x.l.norm2())).max(1.0);
    let w = pauli_lubansky(&x, -1.0).w;
    let hel = (w - x.p * (v.alpha / 2.0)).max_abs() / (x.p.max_abs() * v.alpha).max(1.0);
    Ok((c1, c2, hel))
}

fn twistor_massless(rng: &mut ChaCha8Rng, trials: usize) -> Vec<Check> {
    let mut c1 = Worst::default();
    let mut c2 = Worst::default();
    let mut hel = Worst::default();
    let mut pm = Worst::default();
    let mut rt = Worst::default();
    for _ in 0..trials {
        let v = random_twistor(rng);
        match massless_residuals(&v) {
            Ok((a, b, h)) => {
                c1.add(a);
                c2.add(b);
                hel.add(h);
            }
            Err(_) => {
                c1.add(f64::NAN);
                c2.add(f64::NAN);
                hel.add(f64::NAN);
            }
        }
        let x = match momentum_map_massless(&v) {
            Ok(m) => m.state,
            Err(_) => {
                pm.add(f64::NAN);
                continue;
            }
        };
        let scale = x.to_array().iter().fold(1.0f64, |m, v| m.max(v.abs()));
        for i in 0..STATE_DIM {
            for j in i + 1..STATE_DIM {
                let lhs = twistor_bracket(&Pulled(Coordinate(i)), &Pulled(Coordinate(j)), &v);
                let rhs = bracket_a(&Coordinate(i), &Coordinate(j), &x, -1.0);
                pm.add_result(lhs.and_then(|l| rhs.map(|r| (l - Complex::new(r, 0.0)).norm() / scale)));
            }
        }
        rt.add_result(observables_from_coords(&v).and_then(|c| pullback(&c.state())).map(|b| {
            let s = 1.0 + v.zeta1.norm() + v.zeta2.norm() + v.zeta.norm();
            let d = (b.zeta1 - v.zeta1).norm().max((b.zeta2 - v.zeta2).norm()).max((b.zeta - v.zeta).norm()) / s;
            d.max((b.alpha - v.alpha).abs() / (1.0 + v.alpha))
        }));
    }
    vec![
        c1.check("c1", 1e-12),
        c2.check("c2", 1e-12),
        hel.check("helicity", 1e-12),
        pm.check("poisson-map", 1e-8),
        rt.check("pullback-round-trip", 1e-10),
    ]
}

/// Twistor comparisons over `[0, 5]`.
pub const TWISTOR_SPAN: (f64, f64) = (0.0, 5.0);

/// Sup-norm gap between the pullback of the PL trajectory of `J⁺(v)` and the
/// twistor-chart trajectory of `v`, sampled on `samples` points.
pub fn twistor_flow_gap(v: &TwistorPoint<f64>, p: &PencilParams<f64>, span: (f64, f64), samples: usize) -> Result<f64, Error> {
    let opts = IntegrateOptions { samples, rel_tol: 1e-12, abs_tol: 1e-14, ..Default::default() };
    let x0 = momentum_map_massless(v)?.state;
    let pl = integrate(&ChartPoint::Pl(x0), p, span, &opts)?;
    let tw = integrate(&ChartPoint::Twistor(*v), p, span, &opts)?;
    let mut gap = 0.0f64;
    for (a, b) in pl.points.iter().zip(&tw.points) {
        let u = pullback(&a.to_poincare().expect("PL chart"))?;
        let ChartPoint::Twistor(w) = b else { unreachable!() };
        gap = gap
            .max((u.zeta1 - w.zeta1).norm())
            .max((u.zeta2 - w.zeta2).norm())
            .max((u.zeta - w.zeta).norm())
            .max((u.alpha - w.alpha).abs());
    }
    Ok(gap)
}

fn twistor_flow(rng: &mut ChaCha8Rng, trials: usize) -> Vec<Check> {
    let mut w = Worst::default();
    for _ in 0..trials {
        let p = random_params(rng, -1.0);
        let v = random_twistor(rng);
        w.add_result(twistor_flow_gap(&v, &p, TWISTOR_SPAN, 101));
    }
    vec![w.check("pullback-vs-twistor", 1e-5)]
}

fn orthogonal_pair(rng: &mut ChaCha8Rng) -> (TwistorPoint<f64>, TwistorPoint<f64>) {
    loop {
        let v1 = random_twistor(rng);
        let w = random_twistor(rng);
        let (a, b) = (v1.vector(), w.vector());
        let c = form(&a, &b) / form(&a, &a);
        let v2: [Complex<f64>; 4] = [0, 1, 2, 3].map(|k| b[k] - a[k] * c);
        if form(&v2, &v2).re < 0.1 {
            continue;
        }
        if let Ok(t2) = TwistorPoint::from_vector(&v2, rng.gen_range(0.5..2.0)) {
            return (v1, t2);
        }
    }
}

fn flag_massive(rng: &mut ChaCha8Rng, trials: usize) -> Vec<Check> {
    let mut tr = Worst::default();
    let mut det = Worst::default();
    let mut inv = Worst::default();
    let mut mx = Worst::default();
    let mut pair = Worst::default();
    for _ in 0..trials {
        let f = random_flag(rng);
        let img = match momentum_map_massive(&f) {
            Ok(i) => i,
            Err(_) => {
                tr.add(f64::NAN);
                continue;
            }
        };
        let (p, w) = (img.obs.p, img.obs.w);
        tr.add((p * w).trace().norm() / (p.max_abs() * w.max_abs()).max(1.0));
        let lhs = w.det();
        let rhs = -p.det() * (f.s() * f.s());
        det.add((lhs - rhs).norm() / lhs.norm().max(rhs.norm()).max(1e-300));
        let (xs, ys) = f.spacetime();
        inv.add_result(flag_invert(&img.state, img.w0, &img.w, img.delta, xs[0]).map(|c| {
            let s = 1.0 + f.z.max_abs();
            let e = (c.y0 - ys[0])
                .abs()
                .max((c.x - Vec3([xs[1], xs[2], xs[3]])).max_abs())
                .max((c.y - Vec3([ys[1], ys[2], ys[3]])).max_abs());
            e / s
        }));
        mx.add((m_expanded(&f) - img.obs.m).max_abs() / img.obs.m.max_abs().max(1.0));

        let (t1, t2) = orthogonal_pair(rng);
        pair.add_result(flag_from_pair(&t1, &t2).and_then(|g| {
            let img = momentum_map_massive(&g)?;
            let m1 = momentum_map_massless(&t1)?;
            let m2 = momentum_map_massless(&t2)?;
            let p = m1.obs.p + m2.obs.p;
            let m = m1.obs.m + m2.obs.m;
            let e = (img.obs.p - p).max_abs() / p.max_abs().max(1.0);
            Ok(e.max((img.obs.m - m).max_abs() / m.max_abs().max(1.0)))
        }));
    }
    vec![
        tr.check("tr-pw", 1e-10),
        det.check("det-w", 1e-9),
        inv.check("round-trip", 1e-9),
        mx.check("m-expansion", 1e-11),
        pair.check("pair-sum", 1e-9),
    ]
}
