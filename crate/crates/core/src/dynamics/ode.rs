//! Dormand–Prince 5(4) with the Hairer–Wanner continuous extension and PI
//! step-size control.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Step control settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeOptions<T> {
    pub rel_tol: T,
    pub abs_tol: T,
    /// Initial step; chosen automatically when `None`.
    pub h_init: Option<T>,
    pub h_max: Option<T>,
    pub max_steps: usize,
}

impl<T: Real> Default for OdeOptions<T> {
    fn default() -> Self {
        OdeOptions {
            rel_tol: T::lit(1e-10),
            abs_tol: T::lit(1e-12),
            h_init: None,
            h_max: None,
            max_steps: 1_000_000,
        }
    }
}

impl<T: Real> OdeOptions<T> {
    pub fn with_tolerances(rel_tol: T, abs_tol: T) -> Self {
        OdeOptions { rel_tol, abs_tol, ..Default::default() }
    }

    fn validate(&self) -> Result<()> {
        let ok = |v: T| v.is_finite() && v > T::zero();
        if ok(self.rel_tol) && ok(self.abs_tol) && self.max_steps > 0 && self.h_max.map_or(true, ok) {
            Ok(())
        } else {
            Err(Error::InvalidTolerance)
        }
    }
}

/// Counters for one integration.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct OdeStats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
}

/// Interpolation data of one accepted step.
#[derive(Debug, Clone, PartialEq)]
struct Segment<T> {
    t: T,
    h: T,
    rcont: [Vec<T>; 5],
}

impl<T: Real> Segment<T> {
    fn eval(&self, t: T, out: &mut [T]) {
        let theta = (t - self.t) / self.h;
        let theta1 = T::one() - theta;
        let [r1, r2, r3, r4, r5] = &self.rcont;
        for i in 0..out.len() {
            out[i] = r1[i] + theta * (r2[i] + theta1 * (r3[i] + theta * (r4[i] + theta1 * r5[i])));
        }
    }
}

/// Continuous solution over the accepted steps.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseOutput<T> {
    t0: T,
    y0: Vec<T>,
    segments: Vec<Segment<T>>,
}

impl<T: Real> DenseOutput<T> {
    pub fn t_start(&self) -> T {
        self.t0
    }

    pub fn t_end(&self) -> T {
        self.segments.last().map_or(self.t0, |s| s.t + s.h)
    }

    pub fn dim(&self) -> usize {
        self.y0.len()
    }

    /// Step boundaries `t₀ < t₁ < …` of the accepted steps.
    pub fn mesh(&self) -> Vec<T> {
        let mut m = Vec::with_capacity(self.segments.len() + 1);
        m.push(self.t0);
        m.extend(self.segments.iter().map(|s| s.t + s.h));
        m
    }

    /// Interpolated state at `t` inside the covered span.
    pub fn eval(&self, t: T) -> Result<Vec<T>> {
        let tol = T::epsilon() * T::lit(64.0) * (T::one() + t.abs());
        if !(t >= self.t0 - tol && t <= self.t_end() + tol) {
            return Err(Error::OutOfSpan { t: t.as_f64() });
        }
        if self.segments.is_empty() || t <= self.t0 {
            return Ok(self.y0.clone());
        }
        let idx = self
            .segments
            .partition_point(|s| s.t + s.h < t)
            .min(self.segments.len() - 1);
        let mut out = vec![T::zero(); self.dim()];
        self.segments[idx].eval(t.min(self.t_end()), &mut out);
        Ok(out)
    }
}

/// Output of [`solve`].
#[derive(Debug, Clone, PartialEq)]
pub struct OdeSolution<T> {
    pub times: Vec<T>,
    pub states: Vec<Vec<T>>,
    pub dense: DenseOutput<T>,
    pub stats: OdeStats,
}

/// Failed integration: what was computed before the failure, and why it stopped.
#[derive(Debug, Clone, PartialEq)]
pub struct OdeFailure<T> {
    pub partial: OdeSolution<T>,
    pub error: Error,
}

// Dormand–Prince tableau
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

struct Tableau<T> {
    c: [T; 4],
    a: [[T; 6]; 6],
    e: [T; 7],
    d: [T; 7],
}

impl<T: Real> Tableau<T> {
    fn new() -> Self {
        let l = T::lit;
        let z = T::zero();
        Tableau {
            c: [l(C2), l(C3), l(C4), l(C5)],
            a: [
                [l(A21), z, z, z, z, z],
                [l(A31), l(A32), z, z, z, z],
                [l(A41), l(A42), l(A43), z, z, z],
                [l(A51), l(A52), l(A53), l(A54), z, z],
                [l(A61), l(A62), l(A63), l(A64), l(A65), z],
                [l(A71), z, l(A73), l(A74), l(A75), l(A76)],
            ],
            e: [l(E1), z, l(E3), l(E4), l(E5), l(E6), l(E7)],
            d: [l(D1), z, l(D3), l(D4), l(D5), l(D6), l(D7)],
        }
    }
}

/// Integrates `y' = f(t, y)` from `t0` to `t1`, reporting the state at each
/// entry of `sample_times` (sorted, inside `[t0, t1]`) by dense interpolation.
///
/// `f` writes the derivative into its last argument. Errors returned by `f`
/// abort the integration; non-finite trial derivatives shrink the step.
pub fn solve<T, F>(
    mut f: F,
    t0: T,
    y0: &[T],
    t1: T,
    sample_times: &[T],
    opts: &OdeOptions<T>,
) -> std::result::Result<OdeSolution<T>, OdeFailure<T>>
where
    T: Real,
    F: FnMut(T, &[T], &mut [T]) -> Result<()>,
{
    let n = y0.len();
    let mut sol = OdeSolution {
        times: Vec::with_capacity(sample_times.len()),
        states: Vec::with_capacity(sample_times.len()),
        dense: DenseOutput { t0, y0: y0.to_vec(), segments: Vec::new() },
        stats: OdeStats::default(),
    };
    macro_rules! fail {
        ($e:expr) => {
            return Err(OdeFailure { partial: sol, error: $e })
        };
    }
    if let Err(e) = opts.validate() {
        fail!(e);
    }
    if !(t1 > t0) {
        fail!(Error::InvalidSpan);
    }
    if sample_times.windows(2).any(|w| !(w[1] >= w[0])) || sample_times.iter().any(|&s| s < t0 || s > t1) {
        fail!(Error::InvalidSpan);
    }

    let tab = Tableau::<T>::new();
    let (rtol, atol) = (opts.rel_tol, opts.abs_tol);
    let h_max = opts.h_max.unwrap_or(t1 - t0);

    let mut next_sample = 0;
    while next_sample < sample_times.len() && sample_times[next_sample] <= t0 {
        sol.times.push(sample_times[next_sample]);
        sol.states.push(y0.to_vec());
        next_sample += 1;
    }

    let mut t = t0;
    let mut y = y0.to_vec();
    let mut k: [Vec<T>; 7] = std::array::from_fn(|_| vec![T::zero(); n]);
    let mut ytmp = vec![T::zero(); n];
    let mut y1 = vec![T::zero(); n];

    if let Err(e) = f(t, &y, &mut k[0]) {
        fail!(e);
    }
    sol.stats.evaluations += 1;
    if k[0].iter().any(|v| !v.is_finite()) {
        fail!(Error::NonFiniteDerivative { t: t.as_f64() });
    }

    let mut h = match opts.h_init {
        Some(h) => h.min(h_max),
        None => match initial_step(&mut f, t, &y, &k[0], t1 - t0, rtol, atol) {
            Ok(h) => h.min(h_max),
            Err(e) => fail!(e),
        },
    };
    sol.stats.evaluations += 1;

    let beta = T::lit(0.04);
    let expo1 = T::lit(0.2) - beta * T::lit(0.75);
    let safe = T::lit(0.9);
    let facc1 = T::lit(5.0);
    let facc2 = T::lit(0.1);
    let mut facold = T::lit(1e-4);
    let mut last_rejected = false;
    let mut steps = 0usize;

    loop {
        if steps >= opts.max_steps {
            fail!(Error::TooManySteps { t: t.as_f64() });
        }
        steps += 1;
        let mut finishing = false;
        if t + h * T::lit(1.01) >= t1 {
            h = t1 - t;
            finishing = true;
        }
        if h.abs() <= T::epsilon() * T::lit(16.0) * t.abs().max(T::one()) {
            fail!(Error::StepSizeUnderflow {
                t: t.as_f64(),
                h: h.as_f64(),
                last_state: y.iter().map(|v| v.as_f64()).collect(),
            });
        }

        // stages 2..7
        let mut bad = false;
        for s in 1..7 {
            for i in 0..n {
                let mut acc = T::zero();
                for (j, kj) in k.iter().enumerate().take(s) {
                    acc += tab.a[s - 1][j] * kj[i];
                }
                ytmp[i] = y[i] + h * acc;
            }
            let ts = if s < 5 { t + tab.c[s - 1] * h } else { t + h };
            if s == 6 {
                y1.copy_from_slice(&ytmp);
            }
            if let Err(e) = f(ts, &ytmp, &mut k[s]) {
                fail!(e);
            }
            sol.stats.evaluations += 1;
            if k[s].iter().any(|v| !v.is_finite()) {
                bad = true;
                break;
            }
        }
        if bad {
            sol.stats.rejected += 1;
            h *= T::lit(0.1);
            last_rejected = true;
            continue;
        }
        // the 7th stage is evaluated at y1 (FSAL)
        let mut err = T::zero();
        for i in 0..n {
            let mut e = T::zero();
            for (j, kj) in k.iter().enumerate() {
                e += tab.e[j] * kj[i];
            }
            let sk = atol + rtol * y[i].abs().max(y1[i].abs());
            let r = h * e / sk;
            err += r * r;
        }
        err = (err / T::from_usize(n.max(1)).unwrap_or(T::one())).sqrt();
        if !err.is_finite() {
            sol.stats.rejected += 1;
            h *= T::lit(0.1);
            last_rejected = true;
            continue;
        }

        let fac11 = err.powf(expo1);
        let fac = (fac11 / facold.powf(beta) / safe).max(facc2).min(facc1);
        let mut hnew = h / fac;

        if err <= T::one() {
            facold = err.max(T::lit(1e-4));
            sol.stats.accepted += 1;

            let mut rcont: [Vec<T>; 5] = std::array::from_fn(|_| vec![T::zero(); n]);
            for i in 0..n {
                let ydiff = y1[i] - y[i];
                let bspl = h * k[0][i] - ydiff;
                rcont[0][i] = y[i];
                rcont[1][i] = ydiff;
                rcont[2][i] = bspl;
                rcont[3][i] = ydiff - h * k[6][i] - bspl;
                let mut dd = T::zero();
                for (j, kj) in k.iter().enumerate() {
                    dd += tab.d[j] * kj[i];
                }
                rcont[4][i] = h * dd;
            }
            let seg = Segment { t, h, rcont };
            let t_new = if finishing { t1 } else { t + h };
            while next_sample < sample_times.len() && sample_times[next_sample] <= t_new {
                let ts = sample_times[next_sample];
                let mut out = vec![T::zero(); n];
                if ts == t_new {
                    out.copy_from_slice(&y1);
                } else {
                    seg.eval(ts, &mut out);
                }
                sol.times.push(ts);
                sol.states.push(out);
                next_sample += 1;
            }
            sol.dense.segments.push(seg);

            let k7 = std::mem::take(&mut k[6]);
            k[6] = std::mem::replace(&mut k[0], k7);
            std::mem::swap(&mut y, &mut y1);
            t = t_new;
            if finishing {
                break;
            }
            hnew = hnew.min(h_max);
            if last_rejected {
                hnew = hnew.min(h);
            }
            last_rejected = false;
        } else {
            hnew = h / facc1.min(fac11 / safe);
            sol.stats.rejected += 1;
            last_rejected = true;
        }
        h = hnew;
    }
    Ok(sol)
}

/// Starting step from the Hairer–Nørsett–Wanner heuristic.
fn initial_step<T, F>(f: &mut F, t: T, y: &[T], f0: &[T], span: T, rtol: T, atol: T) -> Result<T>
where
    T: Real,
    F: FnMut(T, &[T], &mut [T]) -> Result<()>,
{
    let n = y.len();
    let nn = T::from_usize(n.max(1)).unwrap_or(T::one());
    let mut dnf = T::zero();
    let mut dny = T::zero();
    for i in 0..n {
        let sk = atol + rtol * y[i].abs();
        dnf += (f0[i] / sk).powi(2);
        dny += (y[i] / sk).powi(2);
    }
    let tiny = T::lit(1e-10);
    let mut h = if dnf <= tiny || dny <= tiny { T::lit(1e-6) } else { (dny / dnf).sqrt() * T::lit(0.01) };
    h = h.min(span);
    let y1: Vec<T> = (0..n).map(|i| y[i] + h * f0[i]).collect();
    let mut f1 = vec![T::zero(); n];
    f(t + h, &y1, &mut f1)?;
    let mut der2 = T::zero();
    for i in 0..n {
        let sk = atol + rtol * y[i].abs();
        der2 += ((f1[i] - f0[i]) / sk).powi(2);
    }
    let der2 = (der2 / nn).sqrt() / h;
    let der12 = der2.max((dnf / nn).sqrt());
    let h1 = if der12 <= T::lit(1e-15) {
        T::lit(1e-6).max(h * T::lit(1e-3))
    } else {
        (T::lit(0.01) / der12).powf(T::lit(0.2))
    };
    let h = (h * T::lit(100.0)).min(h1).min(span);
    if h.is_finite() && h > T::zero() {
        Ok(h)
    } else {
        Ok(span * T::lit(1e-3))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_decay_with_dense_samples() {
        let times: Vec<f64> = (0..=20).map(|i| i as f64 * 0.25).collect();
        let sol = solve(
            |_, y, dy| {
                dy[0] = -y[0];
                Ok(())
            },
            0.0,
            &[1.0],
            5.0,
            &times,
            &OdeOptions::default(),
        )
        .unwrap();
        assert_eq!(sol.times, times);
        for (t, y) in sol.times.iter().zip(&sol.states) {
            assert!((y[0] - (-t).exp()).abs() < 1e-10, "t={t}");
        }
        assert!((sol.dense.eval(1.3).unwrap()[0] - (-1.3f64).exp()).abs() < 1e-10);
    }

    #[test]
    fn harmonic_oscillator_keeps_energy() {
        let sol = solve(
            |_, y, dy| {
                dy[0] = y[1];
                dy[1] = -y[0];
                Ok(())
            },
            0.0,
            &[1.0, 0.0],
            20.0,
            &[20.0],
            &OdeOptions::default(),
        )
        .unwrap();
        let y = &sol.states[0];
        assert!((y[0] - 20f64.cos()).abs() < 1e-8);
        assert!((y[0] * y[0] + y[1] * y[1] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn blow_up_reports_underflow_or_non_finite() {
        let res = solve(
            |_, y, dy| {
                dy[0] = y[0] * y[0];
                Ok(())
            },
            0.0,
            &[1.0],
            2.0,
            &[0.5, 1.5],
            &OdeOptions::default(),
        );
        let fail = res.unwrap_err();
        assert!(fail.error.is_singularity(), "{:?}", fail.error);
        assert_eq!(fail.partial.times, vec![0.5]);
        assert!((fail.partial.states[0][0] - 2.0_f64).abs() < 1e-8);
    }

    #[test]
    fn rejects_bad_requests() {
        let f = |_: f64, _: &[f64], dy: &mut [f64]| {
            dy[0] = 0.0;
            Ok(())
        };
        assert_eq!(solve(f, 1.0, &[0.0], 0.0, &[], &OdeOptions::default()).unwrap_err().error, Error::InvalidSpan);
        let bad = OdeOptions { rel_tol: -1.0, ..OdeOptions::default() };
        assert_eq!(solve(f, 0.0, &[0.0], 1.0, &[], &bad).unwrap_err().error, Error::InvalidTolerance);
    }

    #[test]
    fn f32_runs() {
        let opts = OdeOptions::<f32>::with_tolerances(1e-5, 1e-7);
        let sol = solve(
            |_, y: &[f32], dy: &mut [f32]| {
                dy[0] = -y[0];
                Ok(())
            },
            0.0f32,
            &[1.0f32],
            1.0,
            &[1.0],
            &opts,
        )
        .unwrap();
        assert!((sol.states[0][0] - (-1.0f32).exp()).abs() < 1e-4);
    }
}
