//! Model parameters and the closed-form constants derived from them.
//!
//! The exponent `p = (n-2)/(n+1)` is kept as an exact rational. Every power
//! that appears downstream (`n+1`, `(n+2)/2`, `(n+4)/2`, ...) is derived from
//! `n` with integer arithmetic.

use num_rational::Ratio;

use crate::error::{Error, Result};

/// Largest ambient dimension accepted. Keeps `u^(n+4)/2` within `i32` exponents
/// and the phase polynomial away from overflow for any admissible level.
pub const MAX_DIMENSION: u32 = 4096;

/// Exponent of the curvature energy `∫ κ^p` whose critical curves profile
/// the biconservative hypersurfaces of `S^n`.
pub fn exponent_for_dimension(n: u32) -> Result<Ratio<i64>> {
    if !(3..=MAX_DIMENSION).contains(&n) {
        return Err(Error::InvalidDimension(n));
    }
    Ok(Ratio::new(n as i64 - 2, n as i64 + 1))
}

/// Critical level `d_* = ρ^p p^p (1-p)^(1-p)`; periodic curvature needs `d > d_*`.
pub fn critical_level(p: Ratio<i64>, rho: f64) -> Result<f64> {
    let pf = ratio_to_f64(p);
    if !(pf > 0.0 && pf < 1.0) {
        return Err(Error::Domain(format!("exponent p = {p} must lie in (0, 1)")));
    }
    if !(rho > 0.0 && rho.is_finite()) {
        return Err(Error::Domain(format!(
            "critical level needs rho > 0, got {rho}"
        )));
    }
    let q = 1.0 - pf;
    Ok(rho.powf(pf) * pf.powf(pf) * q.powf(q))
}

pub(crate) fn ratio_to_f64(r: Ratio<i64>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// `u^(k/2)` with the half-integer exponent handled exactly.
#[inline]
pub(crate) fn pow_half(u: f64, k: i32) -> f64 {
    if k % 2 == 0 {
        u.powi(k / 2)
    } else {
        u.powi(k.div_euclid(2)) * u.sqrt()
    }
}

/// Dimension and ambient curvature: everything except the energy level `d`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Family {
    n: u32,
    p: Ratio<i64>,
    rho: f64,
}

impl Family {
    pub fn new(n: u32, rho: f64) -> Result<Self> {
        let p = exponent_for_dimension(n)?;
        if !rho.is_finite() {
            return Err(Error::InvalidParameter {
                name: "rho",
                value: rho.to_string(),
                reason: "must be finite",
            });
        }
        Ok(Family { n, p, rho })
    }

    /// Family on the unit sphere.
    pub fn sphere(n: u32) -> Result<Self> {
        Family::new(n, 1.0)
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn p(&self) -> Ratio<i64> {
        self.p
    }

    pub fn p_f64(&self) -> f64 {
        ratio_to_f64(self.p)
    }

    /// `1 - p = 3/(n+1)`.
    pub fn one_minus_p(&self) -> f64 {
        3.0 / (self.n as f64 + 1.0)
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn critical_level(&self) -> Result<f64> {
        critical_level(self.p, self.rho)
    }

    pub fn at_level(&self, d: f64) -> Result<ModelParams> {
        ModelParams::from_family(*self, d)
    }
}

/// Full parameter set `(n, p, ρ, d)` of one p-elastic curve.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModelParams {
    family: Family,
    d: f64,
}

impl ModelParams {
    pub fn new(n: u32, rho: f64, d: f64) -> Result<Self> {
        Self::from_family(Family::new(n, rho)?, d)
    }

    fn from_family(family: Family, d: f64) -> Result<Self> {
        if !(d > 0.0 && d.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "d",
                value: d.to_string(),
                reason: "first-integral level must be positive and finite",
            });
        }
        Ok(ModelParams { family, d })
    }

    pub fn family(&self) -> Family {
        self.family
    }
    pub fn n(&self) -> u32 {
        self.family.n
    }
    pub fn p(&self) -> Ratio<i64> {
        self.family.p
    }
    pub fn p_f64(&self) -> f64 {
        self.family.p_f64()
    }
    pub fn one_minus_p(&self) -> f64 {
        self.family.one_minus_p()
    }
    pub fn rho(&self) -> f64 {
        self.family.rho
    }
    pub fn d(&self) -> f64 {
        self.d
    }

    /// Degree of the phase polynomial, `3/(1-p) = n+1`.
    pub fn degree(&self) -> usize {
        self.n() as usize + 1
    }

    /// `(1-p)^2`, the magnitude of the leading coefficient of `Q`.
    pub fn leading(&self) -> f64 {
        let q = self.one_minus_p();
        q * q
    }

    /// `ρ p^2`, the magnitude of the constant coefficient of `Q`.
    pub fn constant(&self) -> f64 {
        let p = self.p_f64();
        self.rho() * p * p
    }

    /// Constants that only exist on the sphere (`ρ > 0`).
    pub fn derived(&self) -> Result<DerivedConstants> {
        let d_star = self.family.critical_level()?;
        let u_star = self.u_star();
        let u_pole = (self.constant() / self.d).cbrt();
        Ok(DerivedConstants {
            d_star,
            u_star,
            u_pole,
            kappa_exponent: Ratio::new(self.n() as i64 + 1, 2),
        })
    }

    /// Unique positive critical point of `Q`: `(d/(1-p))^(1/(n-2))`.
    pub fn u_star(&self) -> f64 {
        (self.d / self.one_minus_p()).powf(1.0 / (self.n() as f64 - 2.0))
    }

    /// Curvature `κ = u^((n+1)/2)`.
    pub fn kappa(&self, u: f64) -> f64 {
        pow_half(u, self.n() as i32 + 1)
    }
}

/// Closed-form constants of a parameter set on the sphere.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DerivedConstants {
    pub d_star: f64,
    /// Location of the positive maximum of `Q`.
    pub u_star: f64,
    /// Real root of `d u^3 - ρ p^2`; the pole of the parametrization.
    pub u_pole: f64,
    /// `κ = u^kappa_exponent`.
    pub kappa_exponent: Ratio<i64>,
}
