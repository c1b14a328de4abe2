//! Integrals over one curvature oscillation with the inverse square-root
//! singularity of `1/√Q` at both turning points.
//!
//! Substituting `u = (α+β)/2 + ((α-β)/2) cos θ` turns `du/√Q` into
//! `dθ/√G`, so the integrand becomes bounded and analytic. When the
//! integrand has a singularity just below `β` (the pole of the closure
//! integrand at large `d`, or `u = 0` in the period) the θ-interval is split
//! into panels graded geometrically toward `θ = π`.

use std::f64::consts::{PI, SQRT_2};
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::params::pow_half;
use crate::polyq::QAnalysis;

/// Value of the closure integral in the limit `d → d_*`.
pub const NEAR_CRITICAL_LIMIT: f64 = SQRT_2 * PI;
/// Value of the closure integral in the limit `d → ∞`.
pub const LARGE_LEVEL_LIMIT: f64 = PI;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureConfig {
    /// Nodes per panel on the first pass.
    pub initial_nodes: usize,
    /// Total node budget across all panels.
    pub max_nodes: usize,
    /// Successive doublings must agree to this relative tolerance.
    pub rel_tol: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            initial_nodes: 64,
            max_nodes: 1 << 20,
            rel_tol: 1e-11,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        if self.initial_nodes < 8 {
            return Err(Error::InvalidParameter {
                name: "quad_initial_nodes",
                value: self.initial_nodes.to_string(),
                reason: "must be at least 8",
            });
        }
        if self.max_nodes < self.initial_nodes {
            return Err(Error::InvalidParameter {
                name: "quad_max_nodes",
                value: self.max_nodes.to_string(),
                reason: "must be at least quad_initial_nodes",
            });
        }
        if !(self.rel_tol > 10.0 * f64::EPSILON && self.rel_tol < 1.0) {
            return Err(Error::InvalidParameter {
                name: "quad_rel_tol",
                value: self.rel_tol.to_string(),
                reason: "must lie in (10 eps, 1)",
            });
        }
        Ok(())
    }
}

/// A quadrature node on `[β, α]`, carrying both endpoint gaps exactly.
#[derive(Clone, Copy, Debug)]
pub struct Node {
    pub u: f64,
    /// `u - β`
    pub below: f64,
    /// `α - u`
    pub above: f64,
}

/// Square-root weight `√Q = √((u-β)(α-u)) √G` of a singular integral.
pub trait EndpointWeight {
    fn beta(&self) -> f64;
    fn alpha(&self) -> f64;
    /// `G` at the node with the given gaps.
    fn factor(&self, below: f64, above: f64) -> f64;
}

impl EndpointWeight for QAnalysis {
    fn beta(&self) -> f64 {
        self.beta
    }
    fn alpha(&self) -> f64 {
        self.alpha
    }
    fn factor(&self, below: f64, above: f64) -> f64 {
        QAnalysis::factor(self, below, above)
    }
}

enum Panel {
    /// The whole θ-range with the midpoint rule; the integrand extends to an
    /// even periodic function, so the rule converges spectrally.
    Periodic,
    /// `φ = π - θ ∈ [a, b]`, integrated by composite Gauss-Legendre.
    Graded(f64, f64),
}

const GAUSS_ORDER: usize = 16;

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
fn gauss_legendre() -> &'static [(f64, f64); GAUSS_ORDER] {
    static RULE: OnceLock<[(f64, f64); GAUSS_ORDER]> = OnceLock::new();
    RULE.get_or_init(|| {
        let n = GAUSS_ORDER;
        let mut rule = [(0.0, 0.0); GAUSS_ORDER];
        for (i, slot) in rule.iter_mut().enumerate() {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            *slot = (x, 2.0 / ((1.0 - x * x) * dp * dp));
        }
        rule
    })
}

fn panels(half_width: f64, grading: Option<f64>) -> Vec<Panel> {
    let Some(distance) = grading else {
        return vec![Panel::Periodic];
    };
    let phi_s = (2.0 * distance / half_width).sqrt();
    if !(phi_s < 0.5) {
        return vec![Panel::Periodic];
    }
    let mut out = Vec::new();
    let mut a = 0.0;
    let mut b = 0.25 * phi_s;
    while b < 0.5 * PI {
        out.push(Panel::Graded(a, b));
        a = b;
        b *= 2.0;
    }
    out.push(Panel::Graded(a, PI));
    out
}

/// `∫_β^α f(u)/√Q(u) du`, with `grading` the distance below `β` of the nearest
/// singularity of the integrand, if one may come close.
pub fn singular_integral<W, F>(
    f: F,
    weight: &W,
    grading: Option<f64>,
    config: &QuadratureConfig,
) -> Result<f64>
where
    W: EndpointWeight + ?Sized,
    F: Fn(&Node) -> f64,
{
    config.validate()?;
    let (beta, alpha) = (weight.beta(), weight.alpha());
    let h = 0.5 * (alpha - beta);
    if !(h > 0.0) {
        return Err(Error::Domain(format!(
            "empty integration interval [{beta}, {alpha}]"
        )));
    }

    // integrand in φ = π - θ
    let g = |phi: f64| {
        let (s, c) = (0.5 * phi).sin_cos();
        let below = 2.0 * h * s * s;
        let above = 2.0 * h * c * c;
        let u = if below <= above { beta + below } else { alpha - above };
        let node = Node { u, below, above };
        f(&node) / weight.factor(below, above).sqrt()
    };

    let panels = panels(h, grading);
    let estimate = |nodes: usize| -> f64 {
        panels
            .iter()
            .map(|panel| match *panel {
                Panel::Periodic => {
                    let step = PI / nodes as f64;
                    (0..nodes).map(|k| g((k as f64 + 0.5) * step)).sum::<f64>() * step
                }
                Panel::Graded(a, b) => {
                    let pieces = (nodes / GAUSS_ORDER).max(1);
                    let width = (b - a) / pieces as f64;
                    (0..pieces)
                        .map(|j| {
                            let mid = a + (j as f64 + 0.5) * width;
                            gauss_legendre()
                                .iter()
                                .map(|&(x, w)| w * g(mid + 0.5 * width * x))
                                .sum::<f64>()
                                * 0.5
                                * width
                        })
                        .sum::<f64>()
                }
            })
            .sum()
    };

    let mut nodes = config.initial_nodes;
    let mut previous = estimate(nodes);
    loop {
        let next_nodes = nodes * 2;
        if next_nodes * panels.len() > config.max_nodes {
            let last = if nodes == config.initial_nodes { previous } else { estimate(nodes) };
            return Err(Error::QuadratureFailure {
                nodes: nodes * panels.len(),
                last,
                previous,
            });
        }
        let current = estimate(next_nodes);
        if !current.is_finite() {
            return Err(Error::QuadratureFailure {
                nodes: next_nodes * panels.len(),
                last: current,
                previous,
            });
        }
        if (current - previous).abs() <= config.rel_tol * current.abs() {
            return Ok(current);
        }
        previous = current;
        nodes = next_nodes;
    }
}

/// Curvature period `ϱ = 3p ∫_β^α du/(u√Q)`; twice the transit time from
/// `β` to `α` under `u_s = (2u/3p)√Q`.
pub fn period(analysis: &QAnalysis, config: &QuadratureConfig) -> Result<f64> {
    let p = analysis.params.p_f64();
    let integral = singular_integral(|node| 1.0 / node.u, analysis, Some(analysis.beta), config)?;
    Ok(3.0 * p * integral)
}

/// Closure integral `I(d)`: the advance of the angle `ψ` over one curvature
/// period.
pub fn closure_integral(analysis: &QAnalysis, config: &QuadratureConfig) -> Result<f64> {
    let params = &analysis.params;
    let (p, q) = (params.p_f64(), params.one_minus_p());
    let exponent = params.n() as i32 + 2;
    let integrand = |node: &Node| pow_half(node.u, exponent) / analysis.pole_factor(node.below);
    let grading = analysis.pole_distance().min(analysis.beta);
    let integral = singular_integral(integrand, analysis, Some(grading), config)?;
    Ok(3.0 * p * q * (params.rho() * params.d()).sqrt() * integral)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::ModelParams;

    struct Unit(f64, f64);
    impl EndpointWeight for Unit {
        fn beta(&self) -> f64 {
            self.0
        }
        fn alpha(&self) -> f64 {
            self.1
        }
        fn factor(&self, _: f64, _: f64) -> f64 {
            1.0
        }
    }

    fn cfg() -> QuadratureConfig {
        QuadratureConfig::default()
    }

    fn analysis(n: u32, rho: f64, d: f64) -> QAnalysis {
        QAnalysis::new(ModelParams::new(n, rho, d).unwrap()).unwrap()
    }

    fn d_star(n: u32, rho: f64) -> f64 {
        ModelParams::new(n, rho, 1.0).unwrap().derived().unwrap().d_star
    }

    #[test]
    fn chebyshev_weight() {
        let v = singular_integral(|_| 1.0, &Unit(-0.3, 2.0), None, &cfg()).unwrap();
        assert!((v - PI).abs() < 1e-14);
        // ∫_0^2 u/√(u(2-u)) du = π
        let v = singular_integral(|n| n.u, &Unit(0.0, 2.0), None, &cfg()).unwrap();
        assert!((v - PI).abs() < 1e-13);
        // graded panels give the same answer for smooth integrands
        let v = singular_integral(|n| n.u * n.u, &Unit(0.0, 2.0), Some(1e-9), &cfg()).unwrap();
        assert!((v - 1.5 * PI).abs() < 1e-12, "{v}");
    }

    #[test]
    fn near_endpoint_pole_is_resolved() {
        // ∫_0^1 du / ((u + δ) √(u(1-u))) = π / √(δ(1+δ))
        for delta in [1e-2, 1e-6, 1e-12, 1e-20] {
            let v = singular_integral(|n| 1.0 / (n.below + delta), &Unit(0.0, 1.0), Some(delta), &cfg())
                .unwrap();
            let exact = PI / (delta * (1.0 + delta)).sqrt();
            assert!((v - exact).abs() <= 1e-10 * exact, "δ={delta}: {v} vs {exact}");
        }
    }

    #[test]
    fn budget_exhaustion_is_an_error() {
        let tight = QuadratureConfig {
            initial_nodes: 8,
            max_nodes: 16,
            rel_tol: 1e-14,
        };
        let r = singular_integral(|n| 1.0 / (n.below + 1e-3), &Unit(0.0, 1.0), None, &tight);
        assert!(matches!(r, Err(Error::QuadratureFailure { .. })));
        let bad = QuadratureConfig {
            initial_nodes: 4,
            ..QuadratureConfig::default()
        };
        assert!(bad.validate().is_err());
    }

    // Reference values from an independent mpmath computation at 110 digits
    // (Gauss-Legendre on a dyadic θ-partition).
    #[test]
    fn oracle_values() {
        let a5 = analysis(5, 1.0, 1.0);
        assert!((closure_integral(&a5, &cfg()).unwrap() - 4.074_719_732_024_625).abs() < 1e-10);
        assert!((period(&a5, &cfg()).unwrap() - PI).abs() < 1e-10);
        let a3 = analysis(3, 1.0, 1.0);
        assert!((closure_integral(&a3, &cfg()).unwrap() - 4.022_024_232_625_315).abs() < 1e-10);
        assert!((period(&a3, &cfg()).unwrap() - 3.568_649_498_308_391_4).abs() < 1e-10);
    }

    #[test]
    fn oracle_table() {
        let table: [(u32, [f64; 9]); 4] = [
            (3, [4.44288293014, 4.43490461038, 4.13092716326, 3.93796355496, 3.52613181678, 3.36757364879, 3.18666241063, 3.15123559229, 3.14168903466]),
            (4, [4.4428829323, 4.43705186606, 4.21059996244, 4.05655995264, 3.65989647761, 3.46139714346, 3.19641696761, 3.15008351278, 3.14162032655]),
            (5, [4.4428829326, 4.43735866342, 4.2222985246, 4.07471973202, 3.68436759849, 3.48062769397, 3.19844031823, 3.14957985268, 3.14160754854]),
            (10, [4.44288293068, 4.43544137038, 4.15046098971, 3.96617830544, 3.55415379751, 3.3857451658, 3.18864646957, 3.15118383121, 3.14167565144]),
        ];
        let factors = [1.0 + 1e-8, 1.01, 1.5, 2.0, 5.0, 10.0, 100.0, 1e3, 1e6];
        for (n, values) in table {
            for (f, expected) in factors.iter().zip(values) {
                let a = analysis(n, 1.0, d_star(n, 1.0) * f);
                let got = closure_integral(&a, &cfg()).unwrap();
                let tol = if *f < 1.0 + 1e-6 { 1e-7 } else { 2e-11 };
                assert!((got - expected).abs() < tol, "n={n} f={f}: {got} vs {expected}");
            }
        }
    }

    #[test]
    fn period_is_pi_for_n5_unit_sphere() {
        // For p = 1/2, w = u^-3 obeys w'' = -4w + const, so ϱ = π/√ρ at every level.
        for f in [1.001, 1.3, 4.0, 1e3, 1e6] {
            for rho in [1.0, 4.0] {
                let a = analysis(5, rho, d_star(5, rho) * f);
                let rho_period = period(&a, &cfg()).unwrap();
                assert!((rho_period - PI / rho.sqrt()).abs() < 1e-9, "f={f}: {rho_period}");
            }
        }
    }

    #[test]
    fn scaling_invariance() {
        for n in [3, 4, 5, 8] {
            let p = ModelParams::new(n, 1.0, 1.0).unwrap().p_f64();
            for rho in [0.25, 1.0, 4.0] {
                for f in [1.01, 2.0, 10.0] {
                    let d = d_star(n, rho) * f;
                    let scaled = analysis(n, rho, d);
                    let unit = analysis(n, 1.0, d * rho.powf(-p));
                    let (i1, i2) = (closure_integral(&scaled, &cfg()).unwrap(), closure_integral(&unit, &cfg()).unwrap());
                    assert!((i1 - i2).abs() <= 1e-9, "n={n} rho={rho} f={f}");
                    let (p1, p2) = (period(&scaled, &cfg()).unwrap(), period(&unit, &cfg()).unwrap());
                    assert!((p1 - p2 / rho.sqrt()).abs() <= 1e-9 * p1);
                }
            }
        }
    }

    #[test]
    fn continuity_in_level() {
        let n = 6;
        let base = d_star(n, 1.0) * 1.7;
        let i0 = closure_integral(&analysis(n, 1.0, base), &cfg()).unwrap();
        let i1 = closure_integral(&analysis(n, 1.0, base * (1.0 + 1e-4)), &cfg()).unwrap();
        assert!((i1 - i0).abs() < 1e-3 * 1e-4 * 1e3);
        assert!(i1 < i0);
    }
}
