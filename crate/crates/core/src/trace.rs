//! Curvature dynamics and the profile curve on `S^2(ρ)`.
//!
//! The phase `u` obeys the regular second-order equation
//! `u'' = (2u/(9p^2)) (2Q(u) + u Q'(u))`, and the angle advances by
//! `ψ' = (1-p)√(ρd) u^((n+4)/2) / (d u^3 - ρp^2)`. Both are integrated by a
//! Taylor-series method: the coefficients follow from power-series
//! recurrences, the step from the decay of the last two, and the series of
//! each step doubles as its dense output.

use crate::closure::{ClosureSolution, ClosureTarget};
use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::params::{pow_half, ModelParams};
use crate::polyq::{QAnalysis, DEGENERATE_GAP};
use crate::quad::{closure_integral, period};

/// Upper bound on the number of integration steps of one path.
pub const MAX_STEPS: usize = 2_000_000;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CurveSample {
    pub s: f64,
    pub u: f64,
    /// `du/ds`
    pub du: f64,
    pub kappa: f64,
    pub psi: f64,
    pub x: [f64; 3],
}

#[derive(Clone, Debug, PartialEq)]
pub struct CurveTrace {
    pub params: ModelParams,
    pub target: Option<ClosureTarget>,
    /// Curvature period from quadrature.
    pub period: f64,
    pub closure_integral: f64,
    pub samples: Vec<CurveSample>,
    /// `|x(end) - x(0)|`
    pub closure_gap: f64,
}

/// First-integral residual `(9p^2/4) u^-5 u'^2 + (1-p)^2 u^(n-2) + ρp^2 u^-3 - d`.
pub fn first_integral_residual(params: &ModelParams, u: f64, du: f64) -> f64 {
    let p = params.p_f64();
    2.25 * p * p * du * du / u.powi(5)
        + params.leading() * u.powi(params.n() as i32 - 2)
        + params.constant() / (u * u * u)
        - params.d()
}

/// Right-hand side `u''` of the phase equation.
pub fn phase_acceleration(params: &ModelParams, u: f64) -> f64 {
    let p = params.p_f64();
    let n = params.n() as i32;
    2.0 / (9.0 * p * p)
        * (-((n + 3) as f64) * params.leading() * u.powi(n + 2) + 5.0 * params.d() * u.powi(4)
            - 2.0 * params.constant() * u)
}

/// Angular speed `ψ'` around the pole.
pub fn angular_speed(params: &ModelParams, u: f64) -> f64 {
    let pole = params.d() * u * u * u - params.constant();
    params.one_minus_p() * (params.rho() * params.d()).sqrt() * pow_half(u, params.n() as i32 + 4)
        / pole
}

/// Taylor coefficients of `w = u^m` from those of `u` (with `u_0 > 0`), filled
/// up to index `k` given `w[..k]`.
fn power_coefficient(u: &[f64], w: &[f64], m: f64, k: usize) -> f64 {
    let sum: f64 = (1..=k)
        .map(|j| (m * j as f64 - (k - j) as f64) * u[j] * w[k - j])
        .sum();
    sum / (k as f64 * u[0])
}

#[derive(Clone, Debug)]
struct Step {
    s0: f64,
    h: f64,
    u: Vec<f64>,
    psi: Vec<f64>,
}

impl Step {
    fn eval(&self, tau: f64) -> (f64, f64, f64) {
        let mut u = 0.0;
        let mut du = 0.0;
        for k in (0..self.u.len()).rev() {
            u = u * tau + self.u[k];
            if k > 0 {
                du = du * tau + k as f64 * self.u[k];
            }
        }
        let psi = self.psi.iter().rev().fold(0.0, |acc, &c| acc * tau + c);
        (u, du, psi)
    }

    fn velocity_slope(&self, tau: f64) -> f64 {
        (2..self.u.len())
            .rev()
            .fold(0.0, |acc, k| acc * tau + (k * (k - 1)) as f64 * self.u[k])
    }
}

/// Integrated `(s, u, u', ψ)` path with dense output.
#[derive(Clone, Debug)]
pub struct PhasePath {
    params: ModelParams,
    steps: Vec<Step>,
    duration: f64,
    max_drift: f64,
    /// Times where `u'` crosses from positive to negative: maxima of `u`.
    maxima: Vec<f64>,
}

impl PhasePath {
    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn duration(&self) -> f64 {
        self.duration
    }

    pub fn step_count(&self) -> usize {
        self.steps.len()
    }

    /// Largest first-integral residual relative to `d` seen at step ends.
    pub fn max_drift(&self) -> f64 {
        self.max_drift
    }

    /// Maxima of `u` after the start.
    pub fn maxima(&self) -> &[f64] {
        &self.maxima
    }

    /// Curvature period measured as the first return to the maximum `u = α`.
    pub fn return_time(&self) -> Option<f64> {
        self.maxima.first().copied()
    }

    /// `(u, u', ψ)` at arc length `s ∈ [0, duration]`.
    pub fn at(&self, s: f64) -> (f64, f64, f64) {
        let i = self
            .steps
            .partition_point(|st| st.s0 <= s)
            .saturating_sub(1);
        let step = &self.steps[i];
        step.eval((s - step.s0).clamp(0.0, step.h))
    }
}

fn series_order(ode_tol: f64) -> usize {
    ((-0.5 * ode_tol.ln()).ceil() as usize + 4).clamp(8, 40)
}

/// Integrates from `u = α`, `u' = 0`, `ψ = 0` over `[0, duration]`.
pub fn integrate_phase(
    analysis: &QAnalysis,
    duration: f64,
    tolerances: &Tolerances,
) -> Result<PhasePath> {
    tolerances.validate()?;
    if !(duration > 0.0 && duration.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "duration",
            value: duration.to_string(),
            reason: "must be positive and finite",
        });
    }
    let params = analysis.params;
    let p = params.p_f64();
    let n = params.n() as i32;
    let order = series_order(tolerances.ode_tol);
    let accel = 2.0 / (9.0 * p * p);
    let high = -((n + 3) as f64) * params.leading();
    let mid = 5.0 * params.d();
    let low = -2.0 * params.constant();
    let psi_scale = params.one_minus_p() * (params.rho() * params.d()).sqrt();
    let (m_high, m_psi) = ((n + 2) as f64, 0.5 * (n + 4) as f64);

    let mut u = vec![0.0; order + 1];
    let mut psi = vec![0.0; order + 1];
    let mut w_high = vec![0.0; order + 1];
    let mut w4 = vec![0.0; order + 1];
    let mut w3 = vec![0.0; order + 1];
    let mut w_psi = vec![0.0; order + 1];
    let mut rate = vec![0.0; order + 1];

    let (mut s, mut u0, mut v0, mut psi0) = (0.0, analysis.alpha, 0.0f64, 0.0);
    let mut steps = Vec::new();
    let mut maxima = Vec::new();
    let mut max_drift: f64 = 0.0;
    while s < duration {
        if steps.len() >= MAX_STEPS {
            return Err(Error::IntegrationFailure {
                s,
                reason: "step budget exhausted",
            });
        }
        if !(u0 > 0.0 && u0.is_finite() && v0.is_finite()) {
            return Err(Error::IntegrationFailure {
                s,
                reason: "state left the positive half-line",
            });
        }
        u[0] = u0;
        u[1] = v0;
        psi[0] = psi0;
        w_high[0] = u0.powi(n + 2);
        w4[0] = u0.powi(4);
        w3[0] = u0.powi(3);
        w_psi[0] = pow_half(u0, n + 4);
        let pole0 = params.d() * w3[0] - params.constant();
        if !(pole0 > 0.0) {
            return Err(Error::PoleCondition { s, value: pole0 });
        }
        for k in 0..order {
            if k > 0 {
                w_high[k] = power_coefficient(&u, &w_high, m_high, k);
                w4[k] = power_coefficient(&u, &w4, 4.0, k);
                w3[k] = power_coefficient(&u, &w3, 3.0, k);
                w_psi[k] = power_coefficient(&u, &w_psi, m_psi, k);
            }
            let linear = if k == 0 { u0 } else { u[k] };
            if k + 2 <= order {
                let f = accel * (high * w_high[k] + mid * w4[k] + low * linear);
                u[k + 2] = f / ((k + 1) * (k + 2)) as f64;
            }
            // rate = w_psi / (d w3 - ρp^2)
            let conv: f64 = (1..=k).map(|j| params.d() * w3[j] * rate[k - j]).sum();
            rate[k] = (psi_scale * w_psi[k] - conv) / pole0;
            psi[k + 1] = rate[k] / (k + 1) as f64;
        }

        // truncation of u, u' and ψ judged by their last two series terms
        let eps = tolerances.ode_tol * u0.abs().min(1.0);
        let mut h = f64::INFINITY;
        for k in [order - 1, order] {
            for (c, power) in [(u[k], k), (k as f64 * u[k], k - 1), (psi[k], k)] {
                if c != 0.0 {
                    h = h.min((eps / c.abs()).powf(1.0 / power as f64));
                }
            }
        }
        h *= (-0.7 / (order as f64 - 1.0)).exp();
        if !h.is_finite() {
            h = duration - s;
        }
        if h <= 1e-14 * (1.0 + s.abs()) {
            return Err(Error::IntegrationFailure {
                s,
                reason: "step size underflow",
            });
        }
        let last = s + h >= duration;
        if last {
            h = duration - s;
        }

        let step = Step {
            s0: s,
            h,
            u: u.clone(),
            psi: psi.clone(),
        };
        let (u1, v1, psi1) = step.eval(h);
        if v0 > 0.0 && v1 <= 0.0 {
            maxima.push(s + crossing(&step, v0));
        }
        steps.push(step);

        let drift = first_integral_residual(&params, u1, v1).abs() / params.d();
        max_drift = max_drift.max(drift);
        let end = if last { duration } else { s + h };
        if drift > tolerances.drift_tol {
            return Err(Error::DriftExceeded { s: end, drift });
        }
        (s, u0, v0, psi0) = (end, u1, v1, psi1);
    }
    Ok(PhasePath {
        params,
        steps,
        duration,
        max_drift,
        maxima,
    })
}

/// Offset in `(0, h]` where `u'` changes sign inside a step.
fn crossing(step: &Step, v_start: f64) -> f64 {
    let (mut lo, mut hi) = (0.0, step.h);
    let velocity = |tau: f64| step.eval(tau).1;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if (velocity(mid) > 0.0) == (v_start > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut tau = 0.5 * (lo + hi);
    let slope = step.velocity_slope(tau);
    if slope != 0.0 {
        let next = tau - velocity(tau) / slope;
        if next >= lo && next <= hi {
            tau = next;
        }
    }
    tau
}

/// Resamples a path at `points` uniform arc lengths over `[0, duration]` and
/// maps each sample onto the sphere.
pub fn synthesize_curve(
    path: &PhasePath,
    target: Option<ClosureTarget>,
    points: usize,
    quad_period: f64,
    closure_value: f64,
) -> Result<CurveTrace> {
    if points < 2 {
        return Err(Error::InsufficientData { got: points, need: 2 });
    }
    let params = path.params;
    let p = params.p_f64();
    let (rho, d) = (params.rho(), params.d());
    let mut samples = Vec::with_capacity(points);
    for i in 0..points {
        let s = if i + 1 == points {
            path.duration
        } else {
            path.duration * i as f64 / (points - 1) as f64
        };
        let (u, du, psi) = path.at(s);
        let u3 = u * u * u;
        let pole = d * u3 - params.constant();
        if !(pole > 0.0) {
            return Err(Error::PoleCondition { s, value: pole });
        }
        let scale = 1.0 / (rho * d * u3).sqrt();
        let radial = pole.sqrt();
        let (sin, cos) = psi.sin_cos();
        samples.push(CurveSample {
            s,
            u,
            du,
            kappa: params.kappa(u),
            psi,
            x: [scale * rho.sqrt() * p, scale * radial * sin, scale * radial * cos],
        });
    }
    let closure_gap = gap(&samples);
    Ok(CurveTrace {
        params,
        target,
        period: quad_period,
        closure_integral: closure_value,
        samples,
        closure_gap,
    })
}

pub(crate) fn gap(samples: &[CurveSample]) -> f64 {
    match (samples.first(), samples.last()) {
        (Some(a), Some(b)) => a
            .x
            .iter()
            .zip(&b.x)
            .map(|(x, y)| (x - y) * (x - y))
            .sum::<f64>()
            .sqrt(),
        _ => 0.0,
    }
}

fn refuse_degenerate(analysis: &QAnalysis) -> Result<()> {
    if analysis.is_degenerate() {
        return Err(Error::DegenerateOrbit {
            relative_gap: analysis.relative_gap(),
            threshold: DEGENERATE_GAP,
        });
    }
    Ok(())
}

/// Open trace over `periods` curvature periods at a given level.
pub fn trace_level(
    params: ModelParams,
    periods: u32,
    points: usize,
    tolerances: &Tolerances,
) -> Result<CurveTrace> {
    let analysis = QAnalysis::new(params)?;
    refuse_degenerate(&analysis)?;
    let rho_period = period(&analysis, &tolerances.quad)?;
    let value = closure_integral(&analysis, &tolerances.quad)?;
    let path = integrate_phase(&analysis, periods.max(1) as f64 * rho_period, tolerances)?;
    synthesize_curve(&path, None, points, rho_period, value)
}

/// Closed curve over `r` periods at a solved level.
pub fn assemble_closed(
    solution: &ClosureSolution,
    points: usize,
    tolerances: &Tolerances,
) -> Result<CurveTrace> {
    let analysis = QAnalysis::new(solution.params)?;
    refuse_degenerate(&analysis)?;
    let duration = solution.target.r() as f64 * solution.period;
    let path = integrate_phase(&analysis, duration, tolerances)?;
    let trace = synthesize_curve(
        &path,
        Some(solution.target),
        points,
        solution.period,
        solution.i_value,
    )?;
    let tolerance = tolerances.verify.closure / solution.params.rho().sqrt();
    if trace.closure_gap > tolerance {
        return Err(Error::ClosureFailure {
            gap: trace.closure_gap,
            tolerance,
            psi_total: trace.samples.last().map_or(0.0, |s| s.psi),
        });
    }
    Ok(trace)
}
