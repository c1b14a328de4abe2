//! The phase polynomial `Q(u) = -(1-p)^2 u^(n+1) + d u^3 - ρ p^2` and its
//! positive roots `β < α`, which bound the oscillation of `u = κ^(2(1-p)/3)`.

use crate::error::{Error, Result};
use crate::params::{DerivedConstants, ModelParams};

/// Relative gap `(α-β)/u_*` below which an orbit counts as collapsed onto its
/// equilibrium.
pub const DEGENERATE_GAP: f64 = 1e-6;

/// Dense coefficients of `Q`, lowest degree first.
#[derive(Clone, Debug, PartialEq)]
pub struct PhasePolynomial {
    coefficients: Vec<f64>,
}

impl PhasePolynomial {
    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn degree(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn eval(&self, u: f64) -> f64 {
        horner(&self.coefficients, u)
    }

    pub fn eval_derivative(&self, u: f64) -> f64 {
        self.coefficients
            .iter()
            .enumerate()
            .skip(1)
            .rev()
            .fold(0.0, |acc, (k, &c)| acc * u + k as f64 * c)
    }

    /// Number of sign changes in the coefficient sequence (zeros skipped).
    pub fn sign_variations(&self) -> usize {
        let signs: Vec<bool> = self
            .coefficients
            .iter()
            .filter(|c| **c != 0.0)
            .map(|c| *c > 0.0)
            .collect();
        signs.windows(2).filter(|w| w[0] != w[1]).count()
    }
}

/// Builds `Q` for the given parameters.
pub fn build_q(params: &ModelParams) -> PhasePolynomial {
    let mut coefficients = vec![0.0; params.degree() + 1];
    coefficients[params.degree()] = -params.leading();
    coefficients[3] = params.d();
    coefficients[0] = -params.constant();
    PhasePolynomial { coefficients }
}

/// Exact number of positive roots of `Q` (counted without multiplicity for a
/// double root): Descartes' bound, sharpened by the sign of `Q` at its only
/// positive critical point.
pub fn count_positive_roots(q: &PhasePolynomial, params: &ModelParams) -> usize {
    match q.sign_variations() {
        0 => 0,
        1 => 1,
        _ => {
            let u = params.u_star();
            let top = q.eval(u);
            let scale = params.d() * u.powi(3) + params.constant();
            if top.abs() <= 1e-14 * scale {
                1
            } else if top > 0.0 {
                2
            } else {
                0
            }
        }
    }
}

/// Positive roots `(β, α)` of `Q` for `d > d_*` on the sphere.
pub fn isolate_roots(
    q: &PhasePolynomial,
    params: &ModelParams,
    derived: &DerivedConstants,
) -> Result<(f64, f64)> {
    let f = |u: f64| q.eval(u);
    // Q(u_pole) = -(1-p)^2 u_pole^(n+1) < 0, which rounding can hide.
    let below_pole = |u: f64| if u <= derived.u_pole { -1.0 } else { f(u) };
    let beta = bisect(below_pole, derived.u_pole, derived.u_star)?;

    let mut hi = 2.0 * derived.u_star;
    let mut doublings = 0;
    while f(hi) >= 0.0 {
        hi *= 2.0;
        doublings += 1;
        if doublings > 2000 || !hi.is_finite() {
            return Err(Error::BracketFailure {
                lo: derived.u_star,
                hi,
                q_lo: f(derived.u_star),
                q_hi: f(hi),
            });
        }
    }
    let alpha = bisect(f, derived.u_star, hi)?;

    let beta = polish(q, beta);
    let alpha = polish(q, alpha);
    for root in [beta, alpha] {
        let bound = 1e-13 * (params.d() * root.powi(3)).abs();
        if q.eval(root).abs() > bound {
            return Err(Error::BracketFailure {
                lo: beta,
                hi: alpha,
                q_lo: q.eval(beta),
                q_hi: q.eval(alpha),
            });
        }
    }
    Ok((beta, alpha))
}

/// Coefficients of `G` with `Q(u) = (u-β)(α-u) G(u)`, by two synthetic divisions.
pub fn deflate(q: &PhasePolynomial, beta: f64, alpha: f64) -> Result<Vec<f64>> {
    let first = divide_linear(q.coefficients(), beta)?;
    let second = divide_linear(&first, alpha)?;
    Ok(second.into_iter().map(|c| -c).collect())
}

fn divide_linear(coefficients: &[f64], root: f64) -> Result<Vec<f64>> {
    let degree = coefficients.len() - 1;
    let mut quotient = vec![0.0; degree];
    let mut carry = 0.0;
    for k in (1..=degree).rev() {
        carry = coefficients[k] + root * carry;
        quotient[k - 1] = carry;
    }
    let remainder = coefficients[0] + root * carry;
    let scale: f64 = coefficients
        .iter()
        .enumerate()
        .map(|(k, c)| c.abs() * root.abs().powi(k as i32))
        .sum();
    let bound = 1e-9 * scale;
    if remainder.abs() > bound {
        return Err(Error::DeflationFailure { remainder, bound });
    }
    Ok(quotient)
}

fn horner(coefficients: &[f64], u: f64) -> f64 {
    coefficients.iter().rev().fold(0.0, |acc, &c| acc * u + c)
}

fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> Result<f64> {
    let (f_lo, f_hi) = (f(lo), f(hi));
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if (f_lo > 0.0) == (f_hi > 0.0) || !f_lo.is_finite() || !f_hi.is_finite() {
        return Err(Error::BracketFailure {
            lo,
            hi,
            q_lo: f_lo,
            q_hi: f_hi,
        });
    }
    let rising = f_hi > 0.0;
    for _ in 0..2200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let v = f(mid);
        if v == 0.0 {
            return Ok(mid);
        }
        if (v > 0.0) == rising {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(if f(lo).abs() <= f(hi).abs() { lo } else { hi })
}

/// Newton steps that are kept only while they reduce `|Q|`.
fn polish(q: &PhasePolynomial, mut root: f64) -> f64 {
    let mut value = q.eval(root).abs();
    for _ in 0..3 {
        let slope = q.eval_derivative(root);
        if slope == 0.0 || value == 0.0 {
            break;
        }
        let next = root - q.eval(root) / slope;
        let next_value = q.eval(next).abs();
        if next_value < value {
            root = next;
            value = next_value;
        } else {
            break;
        }
    }
    root
}

/// `Σ_{j<k} u^j r^(k-1-j) = (u^k - r^k)/(u - r)`, evaluated without cancellation.
fn complete_sum(u: f64, r: f64, k: usize) -> f64 {
    let mut sum = 1.0;
    let mut r_pow = 1.0;
    for _ in 1..k {
        r_pow *= r;
        sum = sum * u + r_pow;
    }
    sum
}

/// Full root analysis of `Q` for a level with a periodic orbit.
#[derive(Clone, Debug, PartialEq)]
pub struct QAnalysis {
    pub params: ModelParams,
    pub derived: DerivedConstants,
    pub q: PhasePolynomial,
    pub positive_root_count: usize,
    pub beta: f64,
    pub alpha: f64,
    pub factor_g: Vec<f64>,
}

impl QAnalysis {
    /// Builds, classifies, isolates and deflates `Q`. Fails unless `ρ > 0`
    /// and `d > d_*`.
    pub fn new(params: ModelParams) -> Result<Self> {
        let derived = params.derived()?;
        let q = build_q(&params);
        let positive_root_count = count_positive_roots(&q, &params);
        if positive_root_count != 2 {
            return Err(Error::Domain(format!(
                "level d = {} has {} positive roots of Q; periodic orbits need d > d_* = {}",
                params.d(),
                positive_root_count,
                derived.d_star
            )));
        }
        let (beta, alpha) = isolate_roots(&q, &params, &derived)?;
        let factor_g = deflate(&q, beta, alpha)?;
        Ok(QAnalysis {
            params,
            derived,
            q,
            positive_root_count,
            beta,
            alpha,
            factor_g,
        })
    }

    /// `(α-β)/u_*`; tiny values mean the orbit has collapsed onto `u_*`.
    pub fn relative_gap(&self) -> f64 {
        (self.alpha - self.beta) / self.derived.u_star
    }

    pub fn is_degenerate(&self) -> bool {
        self.relative_gap() < DEGENERATE_GAP
    }

    /// `G` from the deflated coefficients.
    pub fn factor_from_coefficients(&self, u: f64) -> f64 {
        horner(&self.factor_g, u)
    }

    /// `Q(u)/(u-β)` as a sum of positive-term blocks; accurate below the midpoint.
    fn quotient_below(&self, u: f64) -> f64 {
        let p = &self.params;
        p.d() * complete_sum(u, self.beta, 3) - p.leading() * complete_sum(u, self.beta, p.degree())
    }

    /// `Q(u)/(α-u)`; accurate above the midpoint.
    fn quotient_above(&self, u: f64) -> f64 {
        let p = &self.params;
        p.leading() * complete_sum(u, self.alpha, p.degree()) - p.d() * complete_sum(u, self.alpha, 3)
    }

    /// `G(u) = Q(u)/((u-β)(α-u))` at the point with gaps `below = u-β` and
    /// `above = α-u`. Stays accurate when `β` sits next to the pole at large `d`,
    /// where the coefficient form loses every digit.
    pub fn factor(&self, below: f64, above: f64) -> f64 {
        if below <= above {
            self.quotient_below(self.beta + below) / above
        } else {
            self.quotient_above(self.alpha - above) / below
        }
    }

    /// `d u^3 - ρ p^2` at `u = β + below`, rewritten around `β` so that the
    /// positive value `(1-p)^2 β^(n+1)` at the root is never lost to cancellation.
    pub fn pole_factor(&self, below: f64) -> f64 {
        let p = &self.params;
        let b = self.beta;
        let u = b + below;
        p.leading() * b.powi(p.degree() as i32) + p.d() * below * (u * u + u * b + b * b)
    }

    /// Distance from `β` down to the pole `u_pole`.
    pub fn pole_distance(&self) -> f64 {
        let p = &self.params;
        let (b, o) = (self.beta, self.derived.u_pole);
        p.leading() * b.powi(p.degree() as i32) / (p.d() * (b * b + b * o + o * o))
    }
}
