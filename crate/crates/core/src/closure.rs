//! Closure targets `(l, r)` and the level solver for `I(d) = 2πl/r`.

use std::f64::consts::PI;
use std::fmt;

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::params::{Family, ModelParams};
use crate::polyq::QAnalysis;
use crate::quad::{closure_integral, period, QuadratureConfig};

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// `gcd(l, r) = 1` and `r < 2l < √2 r`, in exact integer arithmetic.
pub fn is_admissible(l: u32, r: u32) -> bool {
    let (l, r) = (l as u64, r as u64);
    l > 0 && r > 0 && gcd(l, r) == 1 && r < 2 * l && 2 * l * l < r * r
}

/// A closed curve that winds `l` times around the pole in `r` lobes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ClosureTarget {
    l: u32,
    r: u32,
}

impl ClosureTarget {
    pub fn new(l: u32, r: u32) -> Result<Self> {
        if is_admissible(l, r) {
            Ok(ClosureTarget { l, r })
        } else {
            Err(Error::InadmissibleTarget { l, r })
        }
    }

    pub fn l(&self) -> u32 {
        self.l
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    /// Required advance of `ψ` per curvature period, `2πl/r ∈ (π, √2π)`.
    pub fn angle(&self) -> f64 {
        2.0 * PI * self.l as f64 / self.r as f64
    }
}

impl fmt::Display for ClosureTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.l, self.r)
    }
}

/// All admissible targets with `r <= max_r`, sorted by `r` then `l`.
pub fn enumerate_targets(max_r: u32) -> Vec<ClosureTarget> {
    (3..=max_r)
        .flat_map(|r| {
            (r / 2 + 1..r)
                .filter(move |&l| is_admissible(l, r))
                .map(move |l| ClosureTarget { l, r })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClosureSolution {
    pub target: ClosureTarget,
    pub params: ModelParams,
    pub d_solved: f64,
    pub i_value: f64,
    pub period: f64,
    /// Final bracket `(d_lo, d_hi)` of the root search.
    pub bracket: (f64, f64),
}

/// Scan exponents `k` of `d = d_*(1 + 10^k)`.
const SCAN_FIRST: f64 = -6.0;
const SCAN_LAST: f64 = 10.0;
const SCAN_STEP: f64 = 0.25;
const MAX_REFINEMENTS: usize = 400;

fn closure_at(family: &Family, d: f64, quad: &QuadratureConfig) -> Result<f64> {
    let analysis = QAnalysis::new(family.at_level(d)?)?;
    closure_integral(&analysis, quad)
}

/// Level `d_{l,r}` with `I(d) = 2πl/r`: the first crossing on a log scan from
/// `d_*`, refined by Illinois regula falsi.
pub fn solve_level(
    target: ClosureTarget,
    family: &Family,
    tolerances: &Tolerances,
) -> Result<ClosureSolution> {
    tolerances.validate()?;
    let d_star = family.critical_level()?;
    let angle = target.angle();
    let quad = &tolerances.quad;
    let residual = |d: f64| closure_at(family, d, quad).map(|i| i - angle);

    let mut samples = Vec::new();
    let mut bracket = None;
    let steps = ((SCAN_LAST - SCAN_FIRST) / SCAN_STEP).round() as usize;
    for j in 0..=steps {
        let k = SCAN_FIRST + j as f64 * SCAN_STEP;
        let d = d_star * (1.0 + 10f64.powf(k));
        let f = residual(d)?;
        samples.push((d, f + angle));
        if f <= 0.0 {
            if j == 0 {
                break;
            }
            let (d_prev, i_prev) = samples[j - 1];
            bracket = Some(((d_prev, i_prev - angle), (d, f)));
            break;
        }
    }
    let Some(((mut lo, mut f_lo), (mut hi, mut f_hi))) = bracket else {
        return Err(Error::NoBracket {
            angle,
            d_max: samples.last().map_or(d_star, |s| s.0),
            samples,
        });
    };

    let tol = tolerances.solver_tol;
    let (mut best, mut f_best) = if f_lo.abs() < f_hi.abs() { (lo, f_lo) } else { (hi, f_hi) };
    let mut side = 0i8;
    let mut iterations = 0;
    while f_best.abs() > tol {
        iterations += 1;
        let mut d = (lo * f_hi - hi * f_lo) / (f_hi - f_lo);
        // regula falsi can crawl on a flat tail; fall back to bisection
        if !(d > lo && d < hi) || iterations % 8 == 0 {
            d = 0.5 * (lo + hi);
        }
        if d <= lo || d >= hi || iterations > MAX_REFINEMENTS {
            return Err(Error::SolverStalled {
                d_lo: lo,
                d_hi: hi,
                residual: f_best.abs(),
            });
        }
        let f = residual(d)?;
        if f.abs() < f_best.abs() {
            best = d;
            f_best = f;
        }
        if f > 0.0 {
            lo = d;
            f_lo = f;
            if side == 1 {
                f_hi *= 0.5;
            }
            side = 1;
        } else {
            hi = d;
            f_hi = f;
            if side == -1 {
                f_lo *= 0.5;
            }
            side = -1;
        }
    }

    // independent re-evaluation on a finer initial grid
    let params = family.at_level(best)?;
    let analysis = QAnalysis::new(params)?;
    let check_config = QuadratureConfig {
        initial_nodes: quad.initial_nodes * 2,
        max_nodes: quad.max_nodes.max(quad.initial_nodes * 4),
        ..*quad
    };
    let i_value = closure_integral(&analysis, &check_config)?;
    if (i_value - angle).abs() > tol {
        return Err(Error::SolverStalled {
            d_lo: lo,
            d_hi: hi,
            residual: (i_value - angle).abs(),
        });
    }
    Ok(ClosureSolution {
        target,
        params,
        d_solved: best,
        i_value,
        period: period(&analysis, quad)?,
        bracket: (lo, hi),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn admissibility() {
        assert!(is_admissible(2, 3));
        assert!(is_admissible(3, 5));
        assert!(!is_admissible(1, 1));
        assert!(!is_admissible(1, 2));
        assert!(!is_admissible(2, 4));
        assert!(!is_admissible(3, 4)); // 2l = 6 > √2·4
        assert!(!is_admissible(0, 3));
        assert!(matches!(ClosureTarget::new(1, 1), Err(Error::InadmissibleTarget { l: 1, r: 1 })));
    }

    #[test]
    fn enumeration() {
        let pairs = |m| enumerate_targets(m).iter().map(|t| (t.l(), t.r())).collect::<Vec<_>>();
        assert!(pairs(0).is_empty());
        assert!(pairs(2).is_empty());
        assert_eq!(pairs(3), vec![(2, 3)]);
        assert_eq!(pairs(5), vec![(2, 3), (3, 5)]);
        assert_eq!(pairs(7), vec![(2, 3), (3, 5), (4, 7)]);
        for t in enumerate_targets(200) {
            assert_ne!(t.l(), 1);
            assert!(t.angle() > PI && t.angle() < 2f64.sqrt() * PI);
        }
        let all = enumerate_targets(60);
        for w in all.windows(2) {
            assert!((w[0].r(), w[0].l()) < (w[1].r(), w[1].l()));
        }
        // brute force over a box
        let brute: usize = (1..=60u32)
            .map(|r| (1..=60u32).filter(|&l| is_admissible(l, r)).count())
            .sum();
        assert_eq!(all.len(), brute);
    }

    #[test]
    fn solves_canonical_target() {
        let t = ClosureTarget::new(2, 3).unwrap();
        let s = solve_level(t, &Family::sphere(5).unwrap(), &Tolerances::default()).unwrap();
        assert!((s.i_value - 4.0 * PI / 3.0).abs() <= 1e-10);
        assert!(s.d_solved > 0.5);
        assert!(s.bracket.0 <= s.d_solved && s.d_solved <= s.bracket.1);
        assert!((s.period - PI).abs() < 1e-10);
    }
}
