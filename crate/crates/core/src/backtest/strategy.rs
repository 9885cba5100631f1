use crate::allocator::semi_empirical_holding;
use crate::error::{Error, Result};
use crate::utility::utility;

use super::calibrate::KSweepRow;
use super::estimate::{ConditionalMoments, StrategyConfig};
use super::series::ReturnSeries;

#[derive(Clone, Debug, PartialEq)]
pub struct PeriodRecord {
    pub timestamp: String,
    pub alpha: f64,
    pub s: f64,
    pub position: f64,
    pub next_return: f64,
    pub pnl: f64,
    pub realized_utility: f64,
    /// `s = 0`: no position is taken.
    pub degenerate: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Summary {
    pub periods: usize,
    pub k_const: f64,
    pub limit: f64,
    pub total_pnl: f64,
    pub total_realized_utility: f64,
    /// Periods whose position differs from the previous one (the first
    /// period is compared with flat).
    pub trades: usize,
    pub time_in_market: f64,
    pub degenerate_periods: usize,
    /// Same moments, `K = 0`.
    pub binary_total_pnl: f64,
    pub binary_total_realized_utility: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BacktestReport {
    pub records: Vec<PeriodRecord>,
    pub summary: Summary,
    /// Filled by calibration; empty for a single run.
    pub k_sweep: Vec<KSweepRow>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub(crate) struct Totals {
    pub pnl: f64,
    pub realized_utility: f64,
    pub trades: usize,
    pub in_market: usize,
    pub degenerate: usize,
    pub periods: usize,
}

pub(crate) fn check_length(series: &ReturnSeries, cfg: &StrategyConfig) -> Result<()> {
    if series.len() < cfg.warmup + 2 {
        return Err(Error::InsufficientData(format!(
            "series has {} periods; warmup {} needs at least {}",
            series.len(),
            cfg.warmup,
            cfg.warmup + 2
        )));
    }
    Ok(())
}

/// Runs the rule with threshold `k` over periods `warmup..n-1`, calling
/// `sink` for every period.
pub(crate) fn execute(
    series: &ReturnSeries,
    moments: &ConditionalMoments,
    cfg: &StrategyConfig,
    k: f64,
    mut sink: impl FnMut(PeriodRecord),
) -> Result<Totals> {
    let r = series.returns();
    let mut totals = Totals::default();
    let mut prev = 0.0;
    for t in cfg.warmup..r.len() - 1 {
        let (alpha, s) = moments
            .at(t)
            .ok_or_else(|| Error::InsufficientData(format!("no moment estimate at period {t}")))?;
        let degenerate = s.is_nan() || s <= 0.0;
        let position = if degenerate {
            0.0
        } else {
            semi_empirical_holding(alpha, s, cfg.limit, k)?.holding
        };
        let next_return = r[t + 1];
        let pnl = position * next_return;
        let realized_utility = utility(position * alpha, pnl);

        totals.pnl += pnl;
        totals.realized_utility += realized_utility;
        totals.trades += usize::from(position != prev);
        totals.in_market += usize::from(position != 0.0);
        totals.degenerate += usize::from(degenerate);
        totals.periods += 1;
        prev = position;

        sink(PeriodRecord {
            timestamp: series.timestamps()[t].raw.clone(),
            alpha,
            s,
            position,
            next_return,
            pnl,
            realized_utility,
            degenerate,
        });
    }
    Ok(totals)
}

/// Backtests the semi-empirical rule `L sign α_t` if `|α_t| > K s_t`.
///
/// Supplied moments are used when the series carries them; otherwise they
/// are estimated with `cfg`'s estimator.
pub fn run_strategy(series: &ReturnSeries, cfg: &StrategyConfig) -> Result<BacktestReport> {
    cfg.validate()?;
    check_length(series, cfg)?;
    let moments = ConditionalMoments::for_series(series, cfg)?;
    run_with_moments(series, &moments, cfg)
}

pub(crate) fn run_with_moments(
    series: &ReturnSeries,
    moments: &ConditionalMoments,
    cfg: &StrategyConfig,
) -> Result<BacktestReport> {
    let mut records = Vec::with_capacity(series.len() - cfg.warmup - 1);
    let totals = execute(series, moments, cfg, cfg.k_const, |rec| records.push(rec))?;
    let binary = execute(series, moments, cfg, 0.0, |_| {})?;
    Ok(BacktestReport {
        records,
        summary: Summary {
            periods: totals.periods,
            k_const: cfg.k_const,
            limit: cfg.limit,
            total_pnl: totals.pnl,
            total_realized_utility: totals.realized_utility,
            trades: totals.trades,
            time_in_market: totals.in_market as f64 / totals.periods as f64,
            degenerate_periods: totals.degenerate,
            binary_total_pnl: binary.pnl,
            binary_total_realized_utility: binary.realized_utility,
        },
        k_sweep: Vec::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::backtest::estimate::EstimatorKind;

    fn wave(n: usize) -> ReturnSeries {
        let r = (0..n)
            .map(|i| 0.002 + 0.01 * ((i as f64) * 0.7).sin() + 0.004 * ((i * 13 % 7) as f64 - 3.0))
            .collect();
        ReturnSeries::from_returns(r).unwrap()
    }

    fn cfg(k: f64) -> StrategyConfig {
        StrategyConfig::new(k, 2.0, 10, EstimatorKind::RollingMeanSd, 10).unwrap()
    }

    #[test]
    fn record_count_and_accounting() {
        let s = wave(100);
        let rep = run_strategy(&s, &cfg(0.1)).unwrap();
        assert_eq!(rep.records.len(), 100 - 10 - 1);
        for rec in &rep.records {
            assert!([-2.0, 0.0, 2.0].contains(&rec.position));
            assert_eq!(rec.pnl, rec.position * rec.next_return);
            assert_eq!(rec.realized_utility, rec.pnl.min(rec.position * rec.alpha));
        }
        let total: f64 = rep.records.iter().map(|r| r.pnl).sum();
        assert_eq!(total, rep.summary.total_pnl);
    }

    #[test]
    fn infinite_k_is_flat() {
        let rep = run_strategy(&wave(100), &cfg(f64::INFINITY)).unwrap();
        assert!(rep.records.iter().all(|r| r.position == 0.0));
        assert_eq!(rep.summary.total_pnl, 0.0);
        assert_eq!(rep.summary.trades, 0);
        assert_eq!(rep.summary.time_in_market, 0.0);
    }

    #[test]
    fn zero_k_is_binary() {
        let rep = run_strategy(&wave(100), &cfg(0.0)).unwrap();
        for rec in &rep.records {
            assert_eq!(rec.position, 2.0 * crate::allocator::sign(rec.alpha));
        }
        assert_eq!(rep.summary.total_pnl, rep.summary.binary_total_pnl);
    }

    #[test]
    fn degenerate_periods_are_flat() {
        let mut r = vec![0.01; 30];
        r.extend((0..30).map(|i| 0.01 * (i as f64).cos()));
        let s = ReturnSeries::from_returns(r).unwrap();
        let rep = run_strategy(&s, &cfg(0.0)).unwrap();
        assert!(rep.records[0].degenerate);
        assert_eq!(rep.records[0].position, 0.0);
        // 31 equal returns (cos 0 = 1), so windows ending at t = 9..=30 are constant
        assert_eq!(rep.summary.degenerate_periods, 31 - 10);
    }

    #[test]
    fn causality() {
        let s = wave(120);
        let base = run_strategy(&s, &cfg(0.2)).unwrap();
        for cut in [30, 60, 100] {
            let mut r = s.returns().to_vec();
            for x in &mut r[cut + 1..] {
                *x = -3.0 * *x + 0.05;
            }
            let other = run_strategy(&ReturnSeries::from_returns(r).unwrap(), &cfg(0.2)).unwrap();
            // positions at t ≤ cut use returns up to t only
            for t in 10..=cut {
                assert_eq!(
                    base.records[t - 10].position,
                    other.records[t - 10].position
                );
            }
        }
    }

    #[test]
    fn deterministic() {
        let a = run_strategy(&wave(200), &cfg(0.3)).unwrap();
        let b = run_strategy(&wave(200), &cfg(0.3)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn supplied_moments_take_precedence() {
        let s = wave(50);
        let n = s.len();
        let s = s.with_moments(vec![0.01; n], vec![0.02; n]).unwrap();
        let rep = run_strategy(&s, &cfg(0.4)).unwrap();
        assert!(rep
            .records
            .iter()
            .all(|r| r.position == 2.0 && r.alpha == 0.01));
    }

    #[test]
    fn too_short() {
        let err = run_strategy(&wave(11), &cfg(0.3)).unwrap_err();
        assert!(matches!(err, Error::InsufficientData(_)));
    }
}
