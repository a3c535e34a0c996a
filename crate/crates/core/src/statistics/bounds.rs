//! Closed-form tail bounds for multilinear statistics of high-temperature
//! Ising models, the empty-graph lower bound, and the bound on summed
//! marginals. All logarithms are natural.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{IsingModel, DEFAULT_BRUTE_FORCE_CAP};

/// Radius constant of the bilinear bound.
pub const BILINEAR_RADIUS_CONSTANT: f64 = 300.0;
/// Exponent constant of the bilinear bound.
pub const BILINEAR_EXPONENT_CONSTANT: f64 = 1735.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailBoundQuery {
    pub n: usize,
    pub eta: f64,
    pub inf_norm: f64,
    pub degree: usize,
    pub radius: f64,
}

impl TailBoundQuery {
    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::InvalidArgument(format!(
                "tail bounds need n >= 2 (n ln n vanishes), got {}",
                self.n
            )));
        }
        if !(self.eta > 0.0 && self.eta <= 1.0) {
            return Err(Error::NotHighTemperature { slack: self.eta });
        }
        if !self.radius.is_finite() || self.radius <= 0.0 {
            return Err(Error::InvalidArgument(format!("radius must be > 0, got {}", self.radius)));
        }
        if self.degree == 0 {
            return Err(Error::InvalidArgument("degree must be >= 1".into()));
        }
        if !self.inf_norm.is_finite() || self.inf_norm <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "coefficient sup-norm must be > 0, got {}",
                self.inf_norm
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailBound {
    /// `min(raw, 1)`.
    pub bound: f64,
    pub raw: f64,
    /// Whether the radius is large enough for the bound to be claimed.
    pub radius_valid: bool,
}

impl TailBound {
    fn new(raw: f64, radius_valid: bool) -> Self {
        TailBound {
            bound: raw.min(1.0),
            raw,
            radius_valid,
        }
    }
}

/// `P(|f - E f| >= r) <= 5 exp(-eta r / (1735 |a|_inf n ln n))` for
/// `r >= 300 |a|_inf n ln^2 n / eta + 2`.
pub fn bilinear_tail_bound(q: &TailBoundQuery) -> Result<TailBound> {
    q.validate()?;
    if q.degree != 2 {
        return Err(Error::InvalidArgument(format!(
            "bilinear bound needs degree 2, got {}",
            q.degree
        )));
    }
    let n = q.n as f64;
    let ln = n.ln();
    let raw = 5.0 * (-q.eta * q.radius / (BILINEAR_EXPONENT_CONSTANT * q.inf_norm * n * ln)).exp();
    let threshold = BILINEAR_RADIUS_CONSTANT * q.inf_norm * n * ln * ln / q.eta + 2.0;
    Ok(TailBound::new(raw, q.radius >= threshold))
}

/// Degree-dependent constants of the d-linear bound.
///
/// Only the degree-2 values are known; the defaults for `d > 2` scale them by
/// `d!` and are placeholders, not derived values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailConstants {
    pub c1: f64,
    pub c2: f64,
}

impl TailConstants {
    pub fn default_for(degree: usize) -> Self {
        let scale = if degree > 2 {
            (3..=degree).fold(2.0, |acc, k| acc * k as f64)
        } else {
            1.0
        };
        TailConstants {
            c1: BILINEAR_RADIUS_CONSTANT * scale,
            c2: BILINEAR_EXPONENT_CONSTANT * scale,
        }
    }
}

/// `P(|f - E f| > r) <= 2 exp(-eta r^{2/d} / (C2 |a|^{2/d} n ln n))` for
/// `r >= C1 |a| (n ln^2 n / eta)^{d/2}`.
pub fn multilinear_tail_bound(q: &TailBoundQuery, c: TailConstants) -> Result<TailBound> {
    q.validate()?;
    if !(c.c1 > 0.0 && c.c2 > 0.0) || !c.c1.is_finite() || !c.c2.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "tail constants must be positive, got C1={} C2={}",
            c.c1, c.c2
        )));
    }
    let n = q.n as f64;
    let ln = n.ln();
    let d = q.degree as f64;
    let raw = 2.0
        * (-q.eta * q.radius.powf(2.0 / d) / (c.c2 * q.inf_norm.powf(2.0 / d) * n * ln)).exp();
    let threshold = c.c1 * q.inf_norm * (n * ln * ln / q.eta).powf(d / 2.0);
    Ok(TailBound::new(raw, q.radius >= threshold))
}

/// Lower bound `e^{-9/4} e^{-9r/(8n)}` on the upper tail of
/// `sum_{u != v} X_u X_v` for independent uniform spins.
pub fn empty_graph_lower_bound(n: usize, r: f64) -> Result<f64> {
    if r.is_nan() || r <= 0.0 {
        return Err(Error::InvalidArgument(format!("radius must be > 0, got {r}")));
    }
    if n == 0 {
        return Err(Error::InvalidArgument("n must be >= 1".into()));
    }
    Ok((-9.0f64 / 4.0).exp() * (-9.0 * r / (8.0 * n as f64)).exp())
}

/// `2 (4 n d ln n / eta)^{d/2}`.
pub fn marginal_sum_bound(n: usize, eta: f64, d: u32) -> Result<f64> {
    if eta.is_nan() || eta <= 0.0 {
        return Err(Error::NotHighTemperature { slack: eta });
    }
    let n = n as f64;
    Ok(2.0 * (4.0 * n * d as f64 * n.ln() / eta).powf(d as f64 / 2.0))
}

/// `|sum_{u_1..u_d} E[X_{u_1} ... X_{u_d}]| = |E[(sum_v X_v)^d]|` by enumeration.
pub fn marginal_sum_exact(model: &IsingModel, d: u32) -> Result<f64> {
    marginal_sum_exact_with_cap(model, d, DEFAULT_BRUTE_FORCE_CAP)
}

pub fn marginal_sum_exact_with_cap(model: &IsingModel, d: u32, cap: usize) -> Result<f64> {
    let dist = model.exact_pmf_with_cap(cap)?;
    let moment = dist.expectation(|x| Ok((x.magnetization() as f64).powi(d as i32)))?;
    Ok(moment.abs())
}
