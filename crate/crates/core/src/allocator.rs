//! Closed-form expected utility and the optimal risk-limited holding.
//!
//! For a holding `h` in an asset with GED returns of location `α`, the
//! expected budget-threshold utility is
//!
//! ```text
//! E[U](h) = h (α - σ τ(κ) sign h),   τ(κ) = Γ(2κ+1) / (2^(2-κ) Γ(κ+1))
//! ```
//!
//! which is linear on each side of zero. Under a position limit `|h| ≤ L`
//! the maximiser is therefore `L sign α` when `|α|` beats the risk cost
//! `σ τ(κ)`, and flat otherwise.

use std::f64::consts::LN_2;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::ged::{check_finite, check_kappa, check_positive, unit_variance};
use crate::special::ln_gamma;

/// `sign(0) = 0`, including for `-0.0`.
#[inline]
pub fn sign(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Risk-scaling function `τ(κ) = Γ(2κ+1) / (2^(2-κ) Γ(κ+1))`.
pub fn tau(kappa: f64) -> Result<f64> {
    check_kappa(kappa)?;
    Ok((ln_gamma(2.0 * kappa + 1.0) - ln_gamma(kappa + 1.0) - (2.0 - kappa) * LN_2).exp())
}

/// Risk cost `σ τ(κ)` in return units.
pub fn risk_cost_sigma(sigma: f64, kappa: f64) -> Result<f64> {
    check_positive("sigma", sigma)?;
    Ok(sigma * tau(kappa)?)
}

/// Multiplier of the standard deviation in the risk cost,
/// `¼ √(Γ(κ)/Γ(3κ)) Γ(2κ+1)/Γ(κ+1)`.
pub fn risk_cost_std_factor(kappa: f64) -> Result<f64> {
    check_kappa(kappa)?;
    Ok((-2.0 * LN_2
        + 0.5 * (ln_gamma(kappa) - ln_gamma(3.0 * kappa))
        + ln_gamma(2.0 * kappa + 1.0)
        - ln_gamma(kappa + 1.0))
    .exp())
}

/// Risk cost expressed through the standard deviation `s` of returns.
pub fn risk_cost_std(s: f64, kappa: f64) -> Result<f64> {
    check_positive("s", s)?;
    Ok(s * risk_cost_std_factor(kappa)?)
}

/// `h (α - σ τ(κ) sign h)`.
pub fn expected_utility_closed(h: f64, alpha: f64, sigma: f64, kappa: f64) -> Result<f64> {
    check_finite("holding", h)?;
    check_finite("alpha", alpha)?;
    let cost = risk_cost_sigma(sigma, kappa)?;
    Ok(h * (alpha - cost * sign(h)))
}

/// How the dispersion of returns is specified.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Scale {
    /// GED scale parameter.
    Sigma(f64),
    /// Standard deviation of returns.
    StdDev(f64),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AllocationQuery {
    pub alpha: f64,
    pub scale: Scale,
    pub kappa: f64,
    pub limit: f64,
    pub k_const: Option<f64>,
}

impl AllocationQuery {
    pub fn new(
        alpha: f64,
        scale: Scale,
        kappa: f64,
        limit: f64,
        k_const: Option<f64>,
    ) -> Result<Self> {
        let q = AllocationQuery {
            alpha,
            scale,
            kappa,
            limit,
            k_const,
        };
        q.validate()?;
        Ok(q)
    }

    pub fn validate(&self) -> Result<()> {
        check_finite("alpha", self.alpha)?;
        match self.scale {
            Scale::Sigma(v) => check_positive("sigma", v)?,
            Scale::StdDev(v) => check_positive("s", v)?,
        }
        check_kappa(self.kappa)?;
        check_positive("limit", self.limit)?;
        if let Some(k) = self.k_const {
            check_k(k)?;
        }
        Ok(())
    }

    /// GED scale `σ`, converting from `s` where necessary.
    pub fn sigma(&self) -> Result<f64> {
        match self.scale {
            Scale::Sigma(v) => Ok(v),
            Scale::StdDev(s) => Ok(s / unit_variance(self.kappa)?.sqrt()),
        }
    }

    /// Standard deviation `s`, converting from `σ` where necessary.
    pub fn std_dev(&self) -> Result<f64> {
        match self.scale {
            Scale::Sigma(v) => Ok(v * unit_variance(self.kappa)?.sqrt()),
            Scale::StdDev(s) => Ok(s),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum HoldingRule {
    Parametric,
    SemiEmpirical,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HoldingDecision {
    /// One of `-L`, `0`, `+L`.
    pub holding: f64,
    /// Threshold `|α|` must exceed, in return units.
    pub risk_cost: f64,
    /// `|α| - risk_cost`.
    pub margin: f64,
    pub rule: HoldingRule,
}

fn check_k(k: f64) -> Result<()> {
    if k >= 0.0 && !k.is_nan() {
        Ok(())
    } else {
        Err(Error::domain(format!("K must be non-negative, got {k}")))
    }
}

fn three_state(alpha: f64, risk_cost: f64, limit: f64, rule: HoldingRule) -> HoldingDecision {
    let margin = alpha.abs() - risk_cost;
    let holding = if alpha.abs() > risk_cost {
        limit * sign(alpha)
    } else {
        0.0
    };
    HoldingDecision {
        holding,
        risk_cost,
        margin,
        rule,
    }
}

/// Expected-utility maximising holding on `[-L, L]` (parametric rule).
pub fn optimal_holding(q: &AllocationQuery) -> Result<HoldingDecision> {
    q.validate()?;
    let cost = risk_cost_sigma(q.sigma()?, q.kappa)?;
    Ok(three_state(q.alpha, cost, q.limit, HoldingRule::Parametric))
}

/// `L sign α` if `|α| > K s`, else flat.
///
/// `K = 0` gives the binary long/short rule and `K = ∞` is always flat.
pub fn semi_empirical_holding(
    alpha: f64,
    s: f64,
    limit: f64,
    k_const: f64,
) -> Result<HoldingDecision> {
    check_finite("alpha", alpha)?;
    check_positive("s", s)?;
    check_positive("limit", limit)?;
    check_k(k_const)?;
    let cost = if k_const == 0.0 { 0.0 } else { k_const * s };
    Ok(three_state(alpha, cost, limit, HoldingRule::SemiEmpirical))
}

/// Semi-empirical rule when the query carries `K`, parametric otherwise.
pub fn decide(q: &AllocationQuery) -> Result<HoldingDecision> {
    q.validate()?;
    match q.k_const {
        Some(k) => semi_empirical_holding(q.alpha, q.std_dev()?, q.limit, k),
        None => optimal_holding(q),
    }
}

/// Relative position `h/L` against standardised alpha `α/s`.
pub fn holding_curve(alphas_over_s: &[f64], k_const: f64) -> Result<Vec<(f64, f64)>> {
    check_k(k_const)?;
    alphas_over_s
        .iter()
        .map(|&x| {
            check_finite("standardised alpha", x)?;
            Ok((x, if x.abs() > k_const { sign(x) } else { 0.0 }))
        })
        .collect()
}
