use crate::error::{Error, Result};
use crate::ged::check_positive;

use super::series::ReturnSeries;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EstimatorKind {
    /// Mean and sample standard deviation of the trailing `window` returns.
    RollingMeanSd,
    /// Exponentially weighted mean and variance with decay `2/(window+1)`.
    Ewma,
}

impl std::str::FromStr for EstimatorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rolling" | "rolling_mean_sd" => Ok(EstimatorKind::RollingMeanSd),
            "ewma" => Ok(EstimatorKind::Ewma),
            _ => Err(Error::domain(format!("unknown estimator {s:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StrategyConfig {
    /// Threshold multiple of `s`. `0` is the binary rule; `+∞` never trades.
    pub k_const: f64,
    pub limit: f64,
    pub estimator_window: usize,
    pub estimator_kind: EstimatorKind,
    /// Index of the first period that takes a position.
    pub warmup: usize,
}

impl StrategyConfig {
    pub fn new(
        k_const: f64,
        limit: f64,
        estimator_window: usize,
        estimator_kind: EstimatorKind,
        warmup: usize,
    ) -> Result<Self> {
        let cfg = StrategyConfig {
            k_const,
            limit,
            estimator_window,
            estimator_kind,
            warmup,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.k_const.is_nan() || self.k_const < 0.0 {
            return Err(Error::domain(format!(
                "K must be non-negative, got {}",
                self.k_const
            )));
        }
        check_positive("limit", self.limit)?;
        if self.estimator_window < 2 {
            return Err(Error::domain("estimator window must be at least 2"));
        }
        if self.estimator_kind == EstimatorKind::RollingMeanSd
            && self.warmup < self.estimator_window
        {
            return Err(Error::domain(format!(
                "warmup ({}) must be at least the rolling window ({})",
                self.warmup, self.estimator_window
            )));
        }
        Ok(())
    }

    pub fn with_k(&self, k_const: f64) -> Self {
        StrategyConfig { k_const, ..*self }
    }
}

/// `alpha[i]`, `s[i]` are the estimates at period `start + i`.
#[derive(Clone, Debug, PartialEq)]
pub struct ConditionalMoments {
    pub start: usize,
    pub alpha: Vec<f64>,
    pub s: Vec<f64>,
}

impl ConditionalMoments {
    pub fn at(&self, t: usize) -> Option<(f64, f64)> {
        let i = t.checked_sub(self.start)?;
        Some((*self.alpha.get(i)?, *self.s.get(i)?))
    }

    /// Supplied moments if the series has them, otherwise estimates.
    pub fn for_series(series: &ReturnSeries, cfg: &StrategyConfig) -> Result<Self> {
        match series.supplied_moments() {
            Some((a, s)) => Ok(ConditionalMoments {
                start: 0,
                alpha: a.to_vec(),
                s: s.to_vec(),
            }),
            None => estimate_conditional_moments(series, cfg),
        }
    }
}

/// Causal moment estimates: the values at `t` use `r_0..=r_t` only.
///
/// A window of identical returns yields exactly that value and `s = 0`.
pub fn estimate_conditional_moments(
    series: &ReturnSeries,
    cfg: &StrategyConfig,
) -> Result<ConditionalMoments> {
    cfg.validate()?;
    let r = series.returns();
    if r.len() <= cfg.warmup {
        return Err(Error::InsufficientData(format!(
            "series has {} periods, warmup is {}",
            r.len(),
            cfg.warmup
        )));
    }
    let w = cfg.estimator_window;
    match cfg.estimator_kind {
        EstimatorKind::RollingMeanSd => {
            if r.len() < w {
                return Err(Error::InsufficientData(format!(
                    "series has {} periods, window is {w}",
                    r.len()
                )));
            }
            let (alpha, s) = r.windows(w).map(window_mean_sd).unzip();
            Ok(ConditionalMoments {
                start: w - 1,
                alpha,
                s,
            })
        }
        EstimatorKind::Ewma => {
            let lambda = 2.0 / (w as f64 + 1.0);
            let mut mean = r[0];
            let mut var = 0.0;
            let mut alpha = Vec::with_capacity(r.len());
            let mut s = Vec::with_capacity(r.len());
            alpha.push(mean);
            s.push(0.0);
            for &x in &r[1..] {
                let d = x - mean;
                mean += lambda * d;
                var = (1.0 - lambda) * (var + lambda * d * d);
                alpha.push(mean);
                s.push(var.sqrt());
            }
            Ok(ConditionalMoments { start: 0, alpha, s })
        }
    }
}

fn window_mean_sd(x: &[f64]) -> (f64, f64) {
    let first = x[0];
    if x.iter().all(|&v| v == first) {
        return (first, 0.0);
    }
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let ss: f64 = x.iter().map(|v| (v - mean) * (v - mean)).sum();
    (mean, (ss / (n - 1.0)).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn cfg(kind: EstimatorKind, window: usize) -> StrategyConfig {
        StrategyConfig::new(0.4, 1.0, window, kind, window).unwrap()
    }

    #[test]
    fn rolling_values() {
        let s = ReturnSeries::from_returns(vec![1.0, 2.0, 3.0, 4.0, 10.0]).unwrap();
        let m = estimate_conditional_moments(&s, &cfg(EstimatorKind::RollingMeanSd, 3)).unwrap();
        assert_eq!(m.start, 2);
        assert_eq!(m.alpha, vec![2.0, 3.0, 17.0 / 3.0]);
        assert_relative_eq!(m.s[0], 1.0);
        assert_eq!(m.at(1), None);
        assert_eq!(m.at(3), Some((3.0, 1.0)));
    }

    #[test]
    fn constant_series_is_degenerate() {
        let s = ReturnSeries::from_returns(vec![0.013; 40]).unwrap();
        for kind in [EstimatorKind::RollingMeanSd, EstimatorKind::Ewma] {
            let m = estimate_conditional_moments(&s, &cfg(kind, 10)).unwrap();
            assert!(m.alpha.iter().all(|&a| a == 0.013));
            assert!(m.s.iter().all(|&v| v == 0.0));
        }
    }

    #[test]
    fn shift_equivariance() {
        let r: Vec<f64> = (0..200)
            .map(|i| ((i * 37 % 101) as f64 - 50.0) * 1e-3)
            .collect();
        let s = ReturnSeries::from_returns(r).unwrap();
        let shifted = s.map_returns(|x| x + 0.05, 1.0).unwrap();
        for kind in [EstimatorKind::RollingMeanSd, EstimatorKind::Ewma] {
            let a = estimate_conditional_moments(&s, &cfg(kind, 20)).unwrap();
            let b = estimate_conditional_moments(&shifted, &cfg(kind, 20)).unwrap();
            for i in 0..a.alpha.len() {
                assert!((b.alpha[i] - a.alpha[i] - 0.05).abs() < 1e-12);
                assert!((b.s[i] - a.s[i]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn ewma_weights() {
        let s = ReturnSeries::from_returns(vec![0.0, 1.0]).unwrap();
        let m = estimate_conditional_moments(
            &s,
            &StrategyConfig::new(0.4, 1.0, 3, EstimatorKind::Ewma, 0).unwrap(),
        )
        .unwrap();
        // λ = 0.5: mean 0.5, var = (1 - λ)(0 + λ·1²) = 0.25
        assert_eq!(m.alpha, vec![0.0, 0.5]);
        assert_eq!(m.s[1], 0.5);
    }

    #[test]
    fn config_validation() {
        assert!(StrategyConfig::new(-0.1, 1.0, 10, EstimatorKind::Ewma, 10).is_err());
        assert!(StrategyConfig::new(f64::NAN, 1.0, 10, EstimatorKind::Ewma, 10).is_err());
        assert!(StrategyConfig::new(0.4, 0.0, 10, EstimatorKind::Ewma, 10).is_err());
        assert!(StrategyConfig::new(0.4, 1.0, 1, EstimatorKind::Ewma, 10).is_err());
        assert!(StrategyConfig::new(0.4, 1.0, 10, EstimatorKind::RollingMeanSd, 9).is_err());
        assert!(StrategyConfig::new(0.4, 1.0, 10, EstimatorKind::Ewma, 0).is_ok());
        assert!(StrategyConfig::new(f64::INFINITY, 1.0, 10, EstimatorKind::Ewma, 0).is_ok());
        assert_eq!(
            "ewma".parse::<EstimatorKind>().unwrap(),
            EstimatorKind::Ewma
        );
        assert!("garch".parse::<EstimatorKind>().is_err());
    }

    #[test]
    fn insufficient_data() {
        let s = ReturnSeries::from_returns(vec![0.1; 5]).unwrap();
        let err =
            estimate_conditional_moments(&s, &cfg(EstimatorKind::RollingMeanSd, 5)).unwrap_err();
        assert!(matches!(err, Error::InsufficientData(_)));
    }
}
