//! Independent certification of a traced curve and of the rotational
//! hypersurface it generates.
//!
//! Only `(s, u, u', κ, ψ, x)` and the level are read from a trace; every
//! derivative is recomputed from `u` and `u'` through the phase equation and
//! cross-checked by finite differences of the stored samples.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use robust::{orient2d, Coord};
use serde::Serialize;

use crate::config::{Tolerances, VerifyTolerances};
use crate::error::{Error, Result};
use crate::params::{pow_half, ModelParams};
use crate::polyq::{build_q, count_positive_roots, QAnalysis};
use crate::quad::{closure_integral, period};
use crate::trace::{angular_speed, first_integral_residual, gap, phase_acceleration, CurveSample, CurveTrace};

/// Fewest samples accepted by the curve-level checks.
pub const MIN_SAMPLES: usize = 1000;
/// Samples drawn for the finite-difference checks of the principal curvatures.
pub const FD_SAMPLES: usize = 32;
const FD_SEED: u64 = 0x5eed_b1c0;
/// Segment pairs closer to parallel than this are skipped when counting crossings.
const PARALLEL_THRESHOLD: f64 = 1e-9;

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct CurveReport {
    pub sphere_residual: f64,
    pub speed_residual: f64,
    pub el_residual: f64,
    /// Relative to `d`.
    pub first_integral_residual: f64,
    pub kappa_residual: f64,
    /// Unit speed of the stored points by five-point differences.
    pub fd_speed_residual: f64,
    /// Stored `u'` and the phase equation against differences of `u`.
    pub fd_phase_residual: f64,
    /// Largest excursion of `u` outside `[β, α]`, relative to `u_*`.
    pub phase_excursion: f64,
    pub psi_monotone: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct HypersurfaceReport {
    /// `max |3μ + (n-2)λ| / (|μ| + |λ|)`
    pub biconservative_residual: f64,
    /// Samples where `λμ >= 0`.
    pub same_sign_samples: usize,
    /// `max ||μ| - κ| / κ`
    pub curvature_match_residual: f64,
    /// `[min H, max H]`
    pub mean_curvature_range: [f64; 2],
    pub scalar_curvature_relspread: f64,
    /// Principal-curvature inputs against differences of the stored `x_1`.
    pub fd_residual: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct TopologyReport {
    pub closure_gap: f64,
    pub psi_total: f64,
    /// Angle swept around the pole by the stored points, in turns.
    pub turns: f64,
    pub winding: i64,
    pub lobes: usize,
    pub self_intersections: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct ConsistencyReport {
    pub period: f64,
    pub period_mismatch: f64,
    pub closure_integral: f64,
    pub closure_integral_mismatch: f64,
    /// `|I - 2πl/r|` for closed traces.
    pub closure_condition: Option<f64>,
    /// Positive roots of `Q` at the same level with `ρ` replaced by `0` and `-ρ`.
    pub nonpositive_rho_roots: [usize; 2],
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerificationReport {
    pub n: u32,
    pub rho: f64,
    pub d: f64,
    pub l: Option<u32>,
    pub r: Option<u32>,
    pub samples: usize,
    pub curve: CurveReport,
    pub hypersurface: HypersurfaceReport,
    pub topology: TopologyReport,
    pub consistency: ConsistencyReport,
    pub passed: BTreeMap<String, bool>,
    pub all_passed: bool,
}

fn require_samples(trace: &CurveTrace) -> Result<()> {
    if trace.samples.len() < MIN_SAMPLES {
        return Err(Error::InsufficientData {
            got: trace.samples.len(),
            need: MIN_SAMPLES,
        });
    }
    Ok(())
}

/// Arc-length spacing when it is uniform to `1e-9` relative.
fn uniform_spacing(samples: &[CurveSample]) -> Option<f64> {
    let h = (samples.last()?.s - samples.first()?.s) / (samples.len() - 1) as f64;
    let uniform = samples
        .windows(2)
        .all(|w| ((w[1].s - w[0].s) - h).abs() <= 1e-9 * h);
    (h > 0.0 && uniform).then_some(h)
}

fn first_difference(f: impl Fn(usize) -> f64, i: usize, h: f64) -> f64 {
    (f(i - 2) - 8.0 * f(i - 1) + 8.0 * f(i + 1) - f(i + 2)) / (12.0 * h)
}

fn second_difference(f: impl Fn(usize) -> f64, i: usize, h: f64) -> f64 {
    (-f(i - 2) + 16.0 * f(i - 1) - 30.0 * f(i) + 16.0 * f(i + 1) - f(i + 2)) / (12.0 * h * h)
}

/// Terms `(P_ss, ρ P', (1-p) κ^(p+1))` of the Euler-Lagrange equation with
/// `P' = p κ^(p-1) = p u^(-3/2)`.
fn euler_lagrange_terms(params: &ModelParams, u: f64, du: f64) -> (f64, f64, f64) {
    let p = params.p_f64();
    let ddu = phase_acceleration(params, u);
    let pss = 3.75 * p * pow_half(u, -7) * du * du - 1.5 * p * pow_half(u, -5) * ddu;
    let restoring = params.rho() * p * pow_half(u, -3);
    let source = params.one_minus_p() * pow_half(u, 2 * params.n() as i32 - 1);
    (pss, restoring, source)
}

/// Normalized Euler-Lagrange residual at one state.
pub fn euler_lagrange_residual(params: &ModelParams, u: f64, du: f64) -> f64 {
    let (a, b, c) = euler_lagrange_terms(params, u, du);
    (a + b - c).abs() / a.abs().max(b.abs()).max(c.abs())
}

/// Sphere, speed, Euler-Lagrange and first-integral residuals.
pub fn check_curve(trace: &CurveTrace, _tolerances: &VerifyTolerances) -> Result<CurveReport> {
    require_samples(trace)?;
    let params = &trace.params;
    let p = params.p_f64();
    let (rho, d) = (params.rho(), params.d());
    let samples = &trace.samples;
    let mut report = CurveReport {
        psi_monotone: samples.windows(2).all(|w| w[1].psi > w[0].psi),
        ..CurveReport::default()
    };

    for smp in samples {
        let u = smp.u;
        let r2: f64 = smp.x.iter().map(|c| c * c).sum();
        report.sphere_residual = report.sphere_residual.max((rho * r2 - 1.0).abs());

        let x1_rate = -1.5 * p * smp.du * pow_half(u, -5) / d.sqrt();
        let radius2 = 1.0 / rho - p * p / (d * u * u * u);
        if !(radius2 > 0.0) {
            return Err(Error::PoleCondition {
                s: smp.s,
                value: d * u * u * u - params.constant(),
            });
        }
        let radius = radius2.sqrt();
        let radius_rate = 1.5 * p * p * smp.du / (d * u.powi(4) * radius);
        let turn_rate = angular_speed(params, u);
        let speed = (x1_rate * x1_rate + radius_rate * radius_rate + radius2 * turn_rate * turn_rate).sqrt();
        report.speed_residual = report.speed_residual.max((speed - 1.0).abs());

        report.el_residual = report.el_residual.max(euler_lagrange_residual(params, u, smp.du));
        report.first_integral_residual = report
            .first_integral_residual
            .max(first_integral_residual(params, u, smp.du).abs() / d);
        let kappa = params.kappa(u);
        report.kappa_residual = report.kappa_residual.max((smp.kappa - kappa).abs() / kappa);
    }

    if let Ok(analysis) = QAnalysis::new(*params) {
        let scale = analysis.derived.u_star;
        report.phase_excursion = samples
            .iter()
            .map(|smp| (analysis.beta - smp.u).max(smp.u - analysis.alpha).max(0.0) / scale)
            .fold(0.0, f64::max);
    } else {
        report.phase_excursion = f64::INFINITY;
    }

    if let Some(h) = uniform_spacing(samples) {
        let accel_scale = samples
            .iter()
            .map(|smp| phase_acceleration(params, smp.u).abs())
            .fold(0.0, f64::max);
        let rate_scale = samples.iter().map(|smp| smp.du.abs()).fold(0.0, f64::max);
        for i in 2..samples.len() - 2 {
            let v: Vec<f64> = (0..3)
                .map(|k| first_difference(|j| samples[j].x[k], i, h))
                .collect();
            let fd_speed = v.iter().map(|c| c * c).sum::<f64>().sqrt();
            report.fd_speed_residual = report.fd_speed_residual.max((fd_speed - 1.0).abs());
            let du = first_difference(|j| samples[j].u, i, h);
            let ddu = second_difference(|j| samples[j].u, i, h);
            let phase = ((du - samples[i].du).abs() / rate_scale.max(f64::MIN_POSITIVE))
                .max((ddu - phase_acceleration(params, samples[i].u)).abs() / accel_scale);
            report.fd_phase_residual = report.fd_phase_residual.max(phase);
        }
    } else {
        report.fd_speed_residual = f64::INFINITY;
        report.fd_phase_residual = f64::INFINITY;
    }
    Ok(report)
}

/// `(x_1, x_1', x_1'')` from the phase state.
fn height(params: &ModelParams, u: f64, du: f64) -> (f64, f64, f64) {
    let p = params.p_f64();
    let root_d = params.d().sqrt();
    let ddu = phase_acceleration(params, u);
    let x1 = p * pow_half(u, -3) / root_d;
    let x1_rate = -1.5 * p * du * pow_half(u, -5) / root_d;
    let x1_accel = -1.5 * p * (pow_half(u, -5) * ddu - 2.5 * pow_half(u, -7) * du * du) / root_d;
    (x1, x1_rate, x1_accel)
}

/// Principal curvatures `(μ, λ)` of the rotational hypersurface at a sample.
pub fn principal_curvatures(params: &ModelParams, smp: &CurveSample) -> Result<(f64, f64)> {
    let (x1, x1_rate, x1_accel) = height(params, smp.u, smp.du);
    let w = 1.0 - params.rho() * x1 * x1 - x1_rate * x1_rate;
    if !(w > 0.0) {
        return Err(Error::GeometryViolation { s: smp.s, value: w });
    }
    let root = w.sqrt();
    Ok(((x1_accel + params.rho() * x1) / root, -root / x1))
}

/// Biconservative relation, mean and scalar curvature of the hypersurface.
pub fn check_hypersurface(
    trace: &CurveTrace,
    n: u32,
    _tolerances: &VerifyTolerances,
) -> Result<HypersurfaceReport> {
    require_samples(trace)?;
    let params = &trace.params;
    if params.n() != n {
        return Err(Error::InvalidParameter {
            name: "n",
            value: n.to_string(),
            reason: "does not match the dimension of the trace",
        });
    }
    let nf = n as f64;
    let rho = params.rho();
    let mut report = HypersurfaceReport {
        mean_curvature_range: [f64::INFINITY, f64::NEG_INFINITY],
        ..HypersurfaceReport::default()
    };
    let (mut r_min, mut r_max, mut r_abs) = (f64::INFINITY, f64::NEG_INFINITY, 0.0f64);
    for smp in &trace.samples {
        let (mu, lambda) = principal_curvatures(params, smp)?;
        let relation = (3.0 * mu + (nf - 2.0) * lambda).abs() / (mu.abs() + lambda.abs());
        report.biconservative_residual = report.biconservative_residual.max(relation);
        if lambda * mu >= 0.0 {
            report.same_sign_samples += 1;
        }
        let kappa = params.kappa(smp.u);
        report.curvature_match_residual = report
            .curvature_match_residual
            .max((mu.abs() - kappa).abs() / kappa);
        let h = -2.0 * mu / (nf - 1.0);
        report.mean_curvature_range[0] = report.mean_curvature_range[0].min(h);
        report.mean_curvature_range[1] = report.mean_curvature_range[1].max(h);
        let scalar = (nf - 1.0) * (nf - 2.0) * rho + 3.0 * mu * mu - (nf - 2.0) * lambda * lambda;
        r_min = r_min.min(scalar);
        r_max = r_max.max(scalar);
        r_abs = r_abs.max(scalar.abs());
    }
    report.scalar_curvature_relspread = (r_max - r_min) / r_abs;

    let samples = &trace.samples;
    if let Some(h) = uniform_spacing(samples) {
        let mut rng = ChaCha8Rng::seed_from_u64(FD_SEED);
        let heights: Vec<(f64, f64, f64)> = samples
            .iter()
            .map(|smp| height(params, smp.u, smp.du))
            .collect();
        let rate_scale = heights.iter().map(|v| v.1.abs()).fold(0.0, f64::max);
        let accel_scale = heights.iter().map(|v| v.2.abs()).fold(0.0, f64::max);
        for _ in 0..FD_SAMPLES {
            let i = rng.gen_range(2..samples.len() - 2);
            let x1 = |j: usize| samples[j].x[0];
            let rate = (first_difference(x1, i, h) - heights[i].1).abs() / rate_scale;
            let accel = (second_difference(x1, i, h) - heights[i].2).abs() / accel_scale;
            let value = (x1(i) - heights[i].0).abs() / heights[i].0;
            report.fd_residual = report.fd_residual.max(rate).max(accel).max(value);
        }
    } else {
        report.fd_residual = f64::INFINITY;
    }
    Ok(report)
}

/// Local maxima of `u`, cyclically when `closed`.
fn count_maxima(u: &[f64], closed: bool) -> usize {
    let m = u.len();
    if m < 3 {
        return 0;
    }
    (0..m)
        .filter(|&i| {
            let (prev, next) = if closed {
                ((i + m - 1) % m, (i + 1) % m)
            } else if i == 0 || i + 1 == m {
                return false;
            } else {
                (i - 1, i + 1)
            };
            u[i] > u[prev] && u[i] >= u[next]
        })
        .count()
}

/// Proper crossings between non-adjacent segments of a polyline.
pub fn count_self_intersections(points: &[[f64; 2]], closed: bool) -> usize {
    let m = points.len();
    let segments = if closed { m } else { m.saturating_sub(1) };
    if segments < 3 {
        return 0;
    }
    let seg = |i: usize| (points[i], points[(i + 1) % m]);
    let boxes: Vec<[f64; 4]> = (0..segments)
        .map(|i| {
            let (a, b) = seg(i);
            [a[0].min(b[0]), a[0].max(b[0]), a[1].min(b[1]), a[1].max(b[1])]
        })
        .collect();
    let c = |p: [f64; 2]| Coord { x: p[0], y: p[1] };
    // zero orientations count as positive, so a crossing through a shared
    // vertex is attributed to exactly one of the two segments meeting there
    let side = |a, b, p| orient2d(c(a), c(b), c(p)) >= 0.0;
    (0..segments)
        .into_par_iter()
        .map(|i| {
            let (a, b) = seg(i);
            let mut count = 0;
            for j in i + 2..segments {
                if closed && i == 0 && j + 1 == segments {
                    continue;
                }
                let (bi, bj) = (&boxes[i], &boxes[j]);
                if bi[1] < bj[0] || bj[1] < bi[0] || bi[3] < bj[2] || bj[3] < bi[2] {
                    continue;
                }
                let (p, q) = seg(j);
                let (e, f) = ([b[0] - a[0], b[1] - a[1]], [q[0] - p[0], q[1] - p[1]]);
                let cross = e[0] * f[1] - e[1] * f[0];
                let norms = e[0].hypot(e[1]) * f[0].hypot(f[1]);
                if cross.abs() <= PARALLEL_THRESHOLD * norms {
                    continue;
                }
                if side(a, b, p) != side(a, b, q) && side(p, q, a) != side(p, q, b) {
                    count += 1;
                }
            }
            count
        })
        .sum()
}

/// Closure gap, winding, lobe count and self-intersections.
pub fn check_closure_and_topology(trace: &CurveTrace) -> TopologyReport {
    let samples = &trace.samples;
    let closure_gap = gap(samples);
    let psi_total = match (samples.first(), samples.last()) {
        (Some(a), Some(b)) => b.psi - a.psi,
        _ => 0.0,
    };
    let mut swept = 0.0;
    for w in samples.windows(2) {
        let a0 = w[0].x[1].atan2(w[0].x[2]);
        let a1 = w[1].x[1].atan2(w[1].x[2]);
        let mut delta = a1 - a0;
        if delta > PI {
            delta -= 2.0 * PI;
        } else if delta < -PI {
            delta += 2.0 * PI;
        }
        swept += delta;
    }
    let turns = swept / (2.0 * PI);
    let radius = 1.0 / trace.params.rho().sqrt();
    let closed = trace.target.is_some() && closure_gap <= 1e-3 * radius;
    let unique = if closed { &samples[..samples.len() - 1] } else { &samples[..] };
    let u: Vec<f64> = unique.iter().map(|smp| smp.u).collect();
    let projected: Vec<[f64; 2]> = unique.iter().map(|smp| [smp.x[1], smp.x[2]]).collect();
    TopologyReport {
        closure_gap,
        psi_total,
        turns,
        winding: turns.round() as i64,
        lobes: count_maxima(&u, closed),
        self_intersections: count_self_intersections(&projected, closed),
    }
}

fn consistency(trace: &CurveTrace, tolerances: &Tolerances) -> Result<ConsistencyReport> {
    let params = trace.params;
    let analysis = QAnalysis::new(params)?;
    let period = period(&analysis, &tolerances.quad)?;
    let closure_value = closure_integral(&analysis, &tolerances.quad)?;
    let mut roots = [0; 2];
    for (slot, rho) in roots.iter_mut().zip([0.0, -params.rho()]) {
        let shifted = ModelParams::new(params.n(), rho, params.d())?;
        *slot = count_positive_roots(&build_q(&shifted), &shifted);
    }
    Ok(ConsistencyReport {
        period,
        period_mismatch: (period - trace.period).abs() / period,
        closure_integral: closure_value,
        closure_integral_mismatch: (closure_value - trace.closure_integral).abs() / closure_value,
        closure_condition: trace.target.map(|t| (closure_value - t.angle()).abs()),
        nonpositive_rho_roots: roots,
    })
}

/// Runs every check and records a pass flag for each.
pub fn verify_trace(trace: &CurveTrace, tolerances: &Tolerances) -> Result<VerificationReport> {
    let tol = &tolerances.verify;
    let curve = check_curve(trace, tol)?;
    let n = trace.params.n();
    let hypersurface = check_hypersurface(trace, n, tol)?;
    let topology = check_closure_and_topology(trace);
    let consistency = consistency(trace, tolerances)?;

    let mut passed = BTreeMap::new();
    let mut flag = |name: &str, ok: bool| {
        passed.insert(name.to_string(), ok);
    };
    flag("sphere", curve.sphere_residual <= tol.sphere);
    flag("speed", curve.speed_residual <= tol.speed);
    flag("euler_lagrange", curve.el_residual <= tol.euler_lagrange);
    flag("first_integral", curve.first_integral_residual <= tol.first_integral);
    flag("kappa", curve.kappa_residual <= tol.kappa);
    flag("phase_bounds", curve.phase_excursion <= 1e-9);
    flag("psi_monotone", curve.psi_monotone);
    flag(
        "finite_differences",
        curve.fd_speed_residual <= tol.finite_difference
            && curve.fd_phase_residual <= tol.finite_difference
            && hypersurface.fd_residual <= tol.finite_difference,
    );
    flag("biconservative", hypersurface.biconservative_residual <= tol.biconservative);
    flag("opposite_principal_signs", hypersurface.same_sign_samples == 0);
    flag("curvature_match", hypersurface.curvature_match_residual <= tol.biconservative);
    let [h_min, h_max] = hypersurface.mean_curvature_range;
    flag(
        "mean_curvature_nonconstant",
        h_max - h_min > tol.scalar_spread * h_min.abs().max(h_max.abs()),
    );
    let spread = hypersurface.scalar_curvature_relspread;
    flag(
        "scalar_curvature",
        if n == 5 { spread <= tol.scalar_spread } else { spread > tol.scalar_spread },
    );
    flag("period", consistency.period_mismatch <= 1e-8);
    flag("closure_integral", consistency.closure_integral_mismatch <= 1e-8);
    flag("nonpositive_rho", consistency.nonpositive_rho_roots == [1, 1]);
    if let Some(target) = trace.target {
        let radius = 1.0 / trace.params.rho().sqrt();
        flag("closure_condition", consistency.closure_condition.unwrap_or(f64::INFINITY) <= tol.closure);
        flag("closure_gap", topology.closure_gap <= tol.closure * radius);
        flag("winding", topology.winding == target.l() as i64);
        flag("lobes", topology.lobes == target.r() as usize);
        flag("self_intersections", topology.self_intersections >= 1);
    }
    let all_passed = passed.values().all(|ok| *ok);
    Ok(VerificationReport {
        n,
        rho: trace.params.rho(),
        d: trace.params.d(),
        l: trace.target.map(|t| t.l()),
        r: trace.target.map(|t| t.r()),
        samples: trace.samples.len(),
        curve,
        hypersurface,
        topology,
        consistency,
        passed,
        all_passed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closure::{solve_level, ClosureTarget};
    use crate::params::Family;
    use crate::trace::{assemble_closed, trace_level};

    fn closed(n: u32, l: u32, r: u32, points: usize) -> CurveTrace {
        let t = Tolerances::default();
        let sol = solve_level(ClosureTarget::new(l, r).unwrap(), &Family::sphere(n).unwrap(), &t).unwrap();
        assemble_closed(&sol, points, &t).unwrap()
    }

    #[test]
    fn closed_trace_passes_everything() {
        let trace = closed(5, 2, 3, 4096);
        let report = verify_trace(&trace, &Tolerances::default()).unwrap();
        assert!(report.all_passed, "{report:#?}");
        assert_eq!(report.topology.winding, 2);
        assert_eq!(report.topology.lobes, 3);
    }

    #[test]
    fn too_few_samples() {
        let trace = closed(5, 2, 3, 500);
        assert!(matches!(
            check_curve(&trace, &VerifyTolerances::default()),
            Err(Error::InsufficientData { got: 500, need: 1000 })
        ));
    }

    #[test]
    fn circle_is_not_critical() {
        // constant curvature away from the equilibrium of the phase equation
        let params = ModelParams::new(5, 1.0, 1.0).unwrap();
        let u: f64 = 1.1;
        let expected = {
            let p = 0.5;
            let a = p * u.powf(-1.5);
            let b = 0.5 * u.powf(4.5);
            (a - b).abs() / a.max(b)
        };
        let residual = euler_lagrange_residual(&params, u, 0.0);
        // the phase equation supplies P_ss, so compare with the full residual
        let (pss, b, c) = euler_lagrange_terms(&params, u, 0.0);
        assert!(pss != 0.0);
        assert!(((pss + b - c).abs() / pss.abs().max(b).max(c) - residual).abs() < 1e-15);
        assert!(expected > 1e-2);
        let samples: Vec<CurveSample> = (0..1200)
            .map(|i| {
                let psi = i as f64 * 1e-3;
                CurveSample {
                    s: psi,
                    u,
                    du: 0.0,
                    kappa: params.kappa(u),
                    psi,
                    x: [0.5, 0.0, 0.0],
                }
            })
            .collect();
        let trace = CurveTrace {
            params,
            target: None,
            period: 1.0,
            closure_integral: 4.0,
            samples,
            closure_gap: 0.0,
        };
        let report = check_curve(&trace, &VerifyTolerances::default()).unwrap();
        assert!(report.el_residual > 1e-2);
    }

    #[test]
    fn segment_crossings() {
        let square = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];
        assert_eq!(count_self_intersections(&square, true), 0);
        let bowtie = [[0.0, 0.0], [1.0, 1.0], [1.0, 0.0], [0.0, 1.0]];
        assert_eq!(count_self_intersections(&bowtie, true), 1);
        assert_eq!(count_self_intersections(&bowtie, false), 1);
        // a polyline whose crossing hits a vertex is counted once
        let through = [[0.0, 0.0], [2.0, 0.0], [2.0, 1.0], [1.0, 0.0], [1.0, -1.0]];
        assert_eq!(count_self_intersections(&through, false), 1);
        // pentagram
        let star: Vec<[f64; 2]> = (0..5)
            .map(|k| {
                let t = 4.0 * PI * k as f64 / 5.0;
                [t.cos(), t.sin()]
            })
            .collect();
        assert_eq!(count_self_intersections(&star, true), 5);
    }

    #[test]
    fn maxima_count() {
        let u: Vec<f64> = (0..300).map(|i| (2.0 * PI * 3.0 * i as f64 / 300.0).cos()).collect();
        assert_eq!(count_maxima(&u, true), 3);
        assert_eq!(count_maxima(&u, false), 2);
    }

    #[test]
    fn one_period_is_simple() {
        let t = Tolerances::default();
        let sol = solve_level(ClosureTarget::new(3, 5).unwrap(), &Family::sphere(4).unwrap(), &t).unwrap();
        let trace = trace_level(sol.params, 1, 2000, &t).unwrap();
        let topo = check_closure_and_topology(&trace);
        assert_eq!(topo.self_intersections, 0);
        assert_eq!(topo.winding, 1);
    }
}
