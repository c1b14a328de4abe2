//! Curve JSON, report JSON and sweep CSV.
//!
//! Floats are written in scientific notation with 17 significant digits, which
//! reproduces every `f64` exactly on reading; non-finite values become `null`.

use std::io::{self, Write};

use serde::{Deserialize, Serialize};
use serde_json::ser::{Formatter, Serializer};

use crate::closure::ClosureTarget;
use crate::error::{Error, Result};
use crate::params::{exponent_for_dimension, ModelParams};
use crate::trace::{gap, CurveSample, CurveTrace};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Writes floats as `d.dddddddddddddddde±x`.
#[derive(Clone, Copy, Debug, Default)]
pub struct FullPrecision;

impl Formatter for FullPrecision {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }
}

/// Serializes with [`FullPrecision`] floats.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut out = Vec::new();
    let mut ser = Serializer::with_formatter(&mut out, FullPrecision);
    value.serialize(&mut ser)?;
    out.push(b'\n');
    Ok(String::from_utf8(out).expect("serde_json emits UTF-8"))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveMeta {
    pub n: u32,
    /// Exponent as `"num/den"`.
    pub p: String,
    pub rho: f64,
    pub d: f64,
    pub l: Option<u32>,
    pub r: Option<u32>,
    pub period: f64,
    pub closure_integral: f64,
    pub tool_version: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampleRecord {
    pub s: f64,
    pub u: f64,
    pub du: f64,
    pub kappa: f64,
    pub psi: f64,
    pub x: [f64; 3],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveFile {
    pub meta: CurveMeta,
    pub samples: Vec<SampleRecord>,
}

impl From<&CurveTrace> for CurveFile {
    fn from(trace: &CurveTrace) -> Self {
        let params = &trace.params;
        CurveFile {
            meta: CurveMeta {
                n: params.n(),
                p: params.p().to_string(),
                rho: params.rho(),
                d: params.d(),
                l: trace.target.map(|t| t.l()),
                r: trace.target.map(|t| t.r()),
                period: trace.period,
                closure_integral: trace.closure_integral,
                tool_version: TOOL_VERSION.to_string(),
            },
            samples: trace
                .samples
                .iter()
                .map(|s| SampleRecord {
                    s: s.s,
                    u: s.u,
                    du: s.du,
                    kappa: s.kappa,
                    psi: s.psi,
                    x: s.x,
                })
                .collect(),
        }
    }
}

impl CurveFile {
    /// Schema checks beyond the JSON shape; returns the trace they describe.
    pub fn into_trace(self) -> Result<CurveTrace> {
        let meta = &self.meta;
        let p = exponent_for_dimension(meta.n).map_err(|e| Error::Schema(e.to_string()))?;
        let (num, den) = meta
            .p
            .split_once('/')
            .ok_or_else(|| Error::Schema(format!("meta.p = {:?} is not \"num/den\"", meta.p)))?;
        let parsed = (num.trim().parse::<i64>(), den.trim().parse::<i64>());
        match parsed {
            (Ok(a), Ok(b)) if b != 0 && a * *p.denom() == b * *p.numer() => {}
            _ => {
                return Err(Error::Schema(format!(
                    "meta.p = {:?} does not equal {p} for n = {}",
                    meta.p, meta.n
                )))
            }
        }
        if !(meta.rho > 0.0 && meta.rho.is_finite()) {
            return Err(Error::Schema(format!("meta.rho = {} must be positive", meta.rho)));
        }
        let params = ModelParams::new(meta.n, meta.rho, meta.d).map_err(|e| Error::Schema(e.to_string()))?;
        let target = match (meta.l, meta.r) {
            (Some(l), Some(r)) => Some(ClosureTarget::new(l, r)?),
            (None, None) => None,
            _ => return Err(Error::Schema("meta.l and meta.r must both be set or both be null".into())),
        };
        for (name, value) in [("period", meta.period), ("closure_integral", meta.closure_integral)] {
            if !(value > 0.0 && value.is_finite()) {
                return Err(Error::Schema(format!("meta.{name} = {value} must be positive")));
            }
        }
        if self.samples.is_empty() {
            return Err(Error::Schema("no samples".into()));
        }
        let mut samples = Vec::with_capacity(self.samples.len());
        for (i, r) in self.samples.into_iter().enumerate() {
            let values = [r.s, r.u, r.du, r.kappa, r.psi, r.x[0], r.x[1], r.x[2]];
            if values.iter().any(|v| !v.is_finite()) {
                return Err(Error::Schema(format!("sample {i} has a non-finite value")));
            }
            if !(r.u > 0.0) {
                return Err(Error::Schema(format!("sample {i}: u = {} must be positive", r.u)));
            }
            if let Some(prev) = samples.last().map(|s: &CurveSample| s.s) {
                if !(r.s > prev) {
                    return Err(Error::Schema(format!("sample {i}: s is not increasing")));
                }
            }
            samples.push(CurveSample {
                s: r.s,
                u: r.u,
                du: r.du,
                kappa: r.kappa,
                psi: r.psi,
                x: r.x,
            });
        }
        let closure_gap = gap(&samples);
        Ok(CurveTrace {
            params,
            target,
            period: meta.period,
            closure_integral: meta.closure_integral,
            samples,
            closure_gap,
        })
    }
}

pub fn write_curve(trace: &CurveTrace) -> Result<String> {
    to_json(&CurveFile::from(trace))
}

/// Parses and validates Curve JSON.
pub fn parse_curve(bytes: &[u8]) -> Result<CurveTrace> {
    let file: CurveFile = serde_json::from_slice(bytes).map_err(|e| Error::Schema(e.to_string()))?;
    file.into_trace()
}

/// One row of a level sweep.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub d: f64,
    pub closure_integral: f64,
    pub period: f64,
    pub alpha: f64,
    pub beta: f64,
    /// Orbit collapsed onto the equilibrium: the closure integral is reported
    /// next to its limit `√2π`.
    pub limit_regime: bool,
    pub limit_value: Option<f64>,
}

pub const SWEEP_HEADER: &str = "d,closure_integral,period,alpha,beta,regime,limit_value";

pub fn write_sweep_csv<W: Write + ?Sized>(out: &mut W, rows: &[SweepRow]) -> io::Result<()> {
    writeln!(out, "{SWEEP_HEADER}")?;
    for row in rows {
        let limit = row.limit_value.map(|v| format!("{v:.16e}")).unwrap_or_default();
        writeln!(
            out,
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{},{}",
            row.d,
            row.closure_integral,
            row.period,
            row.alpha,
            row.beta,
            if row.limit_regime { "limit" } else { "regular" },
            limit
        )?;
    }
    Ok(())
}
