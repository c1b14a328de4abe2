//! Tolerance record shared by every stage, and its `key = value` file form.
//!
//! ```text
//! # comment
//! ode_tol = 1e-12
//! quad_initial_nodes = 64
//! ```

use std::collections::HashSet;
use std::path::Path;

use crate::error::{Error, Result};
use crate::quad::QuadratureConfig;

/// Environment variable that may name a tolerance file.
pub const CONFIG_ENV: &str = "BICONSERVE_CONFIG";

/// Acceptance thresholds of the verifier.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VerifyTolerances {
    /// `|ρ|x|^2 - 1|`
    pub sphere: f64,
    /// `||x'| - 1|`
    pub speed: f64,
    /// Euler-Lagrange residual relative to the size of its terms.
    pub euler_lagrange: f64,
    /// First-integral residual relative to `d`.
    pub first_integral: f64,
    /// `|3μ + (n-2)λ| / (|μ| + |λ|)`
    pub biconservative: f64,
    /// Stored curvature against `u^((n+1)/2)`, relative.
    pub kappa: f64,
    /// Relative spread of the scalar curvature separating constant from varying.
    pub scalar_spread: f64,
    /// Closure gap, in units of the sphere radius `1/√ρ`.
    pub closure: f64,
    /// Finite-difference cross-checks of analytic derivatives.
    pub finite_difference: f64,
}

impl Default for VerifyTolerances {
    fn default() -> Self {
        VerifyTolerances {
            sphere: 1e-10,
            speed: 1e-8,
            euler_lagrange: 1e-7,
            first_integral: 1e-8,
            biconservative: 1e-6,
            kappa: 1e-12,
            scalar_spread: 1e-8,
            closure: 1e-6,
            finite_difference: 1e-4,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    /// Local error target of the phase integrator, relative.
    pub ode_tol: f64,
    /// Largest first-integral drift relative to `d` accepted while integrating.
    pub drift_tol: f64,
    pub quad: QuadratureConfig,
    /// Closure-angle tolerance `|I(d) - 2πl/r|` of the level solver.
    pub solver_tol: f64,
    pub verify: VerifyTolerances,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            ode_tol: 1e-12,
            drift_tol: 1e-8,
            quad: QuadratureConfig::default(),
            solver_tol: 1e-10,
            verify: VerifyTolerances::default(),
        }
    }
}

impl Tolerances {
    pub fn validate(&self) -> Result<()> {
        self.quad.validate()?;
        let v = &self.verify;
        let reals = [
            ("ode_tol", self.ode_tol),
            ("drift_tol", self.drift_tol),
            ("solver_tol", self.solver_tol),
            ("sphere_tol", v.sphere),
            ("speed_tol", v.speed),
            ("el_tol", v.euler_lagrange),
            ("first_integral_tol", v.first_integral),
            ("biconservative_tol", v.biconservative),
            ("kappa_tol", v.kappa),
            ("scalar_spread_tol", v.scalar_spread),
            ("closure_tol", v.closure),
            ("fd_tol", v.finite_difference),
        ];
        for (name, value) in reals {
            if !(value > 0.0 && value.is_finite()) {
                return Err(Error::InvalidParameter {
                    name,
                    value: value.to_string(),
                    reason: "tolerances must be positive and finite",
                });
            }
        }
        if self.ode_tol >= 1e-2 {
            return Err(Error::InvalidParameter {
                name: "ode_tol",
                value: self.ode_tol.to_string(),
                reason: "must be below 1e-2",
            });
        }
        Ok(())
    }

    /// Defaults overridden by the lines of a tolerance file.
    pub fn parse(text: &str) -> Result<Self> {
        let mut t = Tolerances::default();
        let mut seen = HashSet::new();
        for (index, raw) in text.lines().enumerate() {
            let line = index + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let err = |message: String| Error::Config { line, message };
            let (key, value) = content
                .split_once('=')
                .ok_or_else(|| err(format!("expected `key = value`, got `{content}`")))?;
            let (key, value) = (key.trim(), value.trim());
            if !seen.insert(key.to_string()) {
                return Err(err(format!("duplicate key `{key}`")));
            }
            let real = || -> Result<f64> {
                match value.parse::<f64>() {
                    Ok(x) if x > 0.0 && x.is_finite() => Ok(x),
                    _ => Err(err(format!("`{key}` needs a positive finite number, got `{value}`"))),
                }
            };
            let count = || -> Result<usize> {
                value
                    .parse::<usize>()
                    .map_err(|_| err(format!("`{key}` needs a non-negative integer, got `{value}`")))
            };
            match key {
                "ode_tol" => t.ode_tol = real()?,
                "drift_tol" => t.drift_tol = real()?,
                "quad_initial_nodes" => t.quad.initial_nodes = count()?,
                "quad_max_nodes" => t.quad.max_nodes = count()?,
                "quad_rel_tol" => t.quad.rel_tol = real()?,
                "solver_tol" => t.solver_tol = real()?,
                "sphere_tol" => t.verify.sphere = real()?,
                "speed_tol" => t.verify.speed = real()?,
                "el_tol" => t.verify.euler_lagrange = real()?,
                "first_integral_tol" => t.verify.first_integral = real()?,
                "biconservative_tol" => t.verify.biconservative = real()?,
                "kappa_tol" => t.verify.kappa = real()?,
                "scalar_spread_tol" => t.verify.scalar_spread = real()?,
                "closure_tol" => t.verify.closure = real()?,
                "fd_tol" => t.verify.finite_difference = real()?,
                _ => return Err(err(format!("unknown key `{key}`"))),
            }
        }
        t.validate()?;
        Ok(t)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }
}
