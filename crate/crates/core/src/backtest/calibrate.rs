use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::format::round_sig;

use super::estimate::{ConditionalMoments, StrategyConfig};
use super::series::ReturnSeries;
use super::strategy::{check_length, execute, run_with_moments, BacktestReport};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KSweepRow {
    pub k: f64,
    pub total_pnl: f64,
    pub total_realized_utility: f64,
    pub trades: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Calibration {
    /// One row per grid value, in grid order.
    pub table: Vec<KSweepRow>,
    /// Maximiser of total realized utility; ties go to the smaller `K`.
    pub best_k: f64,
    /// Full run at `best_k`, with `k_sweep` set to `table`.
    pub report: BacktestReport,
}

/// `start, start+step, ...` up to `stop` inclusive, each rounded to 9
/// significant digits so that e.g. `0.3` is exactly the literal `0.3`.
pub fn k_grid(start: f64, stop: f64, step: f64) -> Result<Vec<f64>> {
    if !(step.is_finite() && step > 0.0)
        || start.is_nan()
        || start <= 0.0
        || stop.is_nan()
        || stop < start
        || !stop.is_finite()
    {
        return Err(Error::domain(format!("bad K grid {start}:{stop}:{step}")));
    }
    let n = ((stop - start) / step + 1e-9).floor() as usize;
    Ok((0..=n)
        .map(|i| round_sig(start + i as f64 * step))
        .collect())
}

pub fn calibrate_k(
    series: &ReturnSeries,
    cfg: &StrategyConfig,
    k_grid: &[f64],
) -> Result<Calibration> {
    calibrate_k_with(series, cfg, k_grid, Execution::default())
}

/// Runs the strategy for each `K` in `k_grid` and picks the one with the
/// largest total realized utility. Grid points are independent and may run
/// concurrently; the table is always in grid order.
pub fn calibrate_k_with(
    series: &ReturnSeries,
    cfg: &StrategyConfig,
    k_grid: &[f64],
    exec: Execution,
) -> Result<Calibration> {
    cfg.validate()?;
    if k_grid.is_empty() {
        return Err(Error::domain("K grid is empty"));
    }
    if let Some(k) = k_grid.iter().find(|&&k| k.is_nan() || k <= 0.0) {
        return Err(Error::domain(format!(
            "K grid values must be positive, got {k}"
        )));
    }
    check_length(series, cfg)?;
    let moments = ConditionalMoments::for_series(series, cfg)?;

    let table = exec
        .map_slice(k_grid, |&k| {
            execute(series, &moments, cfg, k, |_| {}).map(|t| KSweepRow {
                k,
                total_pnl: t.pnl,
                total_realized_utility: t.realized_utility,
                trades: t.trades,
            })
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;

    let best = table
        .iter()
        .copied()
        .reduce(|best, row| {
            let better = row.total_realized_utility > best.total_realized_utility
                || (row.total_realized_utility == best.total_realized_utility && row.k < best.k);
            if better {
                row
            } else {
                best
            }
        })
        .expect("grid is non-empty");

    let mut report = run_with_moments(series, &moments, &cfg.with_k(best.k))?;
    report.k_sweep = table.clone();
    Ok(Calibration {
        table,
        best_k: best.k,
        report,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::backtest::estimate::EstimatorKind;
    use crate::backtest::strategy::run_strategy;

    fn series() -> ReturnSeries {
        let r = (0..400)
            .map(|i| 0.001 + 0.01 * ((i as f64) * 0.37).sin() * ((i * 7 % 11) as f64 - 5.0) / 5.0)
            .collect();
        ReturnSeries::from_returns(r).unwrap()
    }

    fn cfg() -> StrategyConfig {
        StrategyConfig::new(0.4, 1.0, 20, EstimatorKind::RollingMeanSd, 20).unwrap()
    }

    #[test]
    fn grid_construction() {
        let g = k_grid(0.1, 1.0, 0.1).unwrap();
        assert_eq!(g.len(), 10);
        assert_eq!(g[2], 0.3);
        assert_eq!(g[9], 1.0);
        assert_eq!(k_grid(0.05, 1.0, 0.05).unwrap().len(), 20);
        assert!(k_grid(0.0, 1.0, 0.1).is_err());
        assert!(k_grid(0.1, 1.0, 0.0).is_err());
    }

    #[test]
    fn table_matches_single_runs() {
        let s = series();
        let grid = k_grid(0.1, 1.0, 0.1).unwrap();
        let cal = calibrate_k(&s, &cfg(), &grid).unwrap();
        assert_eq!(cal.table.len(), grid.len());
        for row in &cal.table {
            let rep = run_strategy(&s, &cfg().with_k(row.k)).unwrap();
            assert_eq!(
                rep.summary.total_realized_utility,
                row.total_realized_utility
            );
            assert_eq!(rep.summary.total_pnl, row.total_pnl);
            assert_eq!(rep.summary.trades, row.trades);
        }
        let max = cal
            .table
            .iter()
            .map(|r| r.total_realized_utility)
            .fold(f64::MIN, f64::max);
        let best = cal.table.iter().find(|r| r.k == cal.best_k).unwrap();
        assert_eq!(best.total_realized_utility, max);
        assert_eq!(cal.report.k_sweep, cal.table);
        assert_eq!(cal.report.summary.k_const, cal.best_k);
    }

    #[test]
    fn ties_go_to_smaller_k() {
        // every K in the grid keeps the strategy flat, so all totals are 0
        let s = series();
        let cal = calibrate_k(&s, &cfg(), &[50.0, 30.0, 40.0]).unwrap();
        assert_eq!(cal.best_k, 30.0);
    }

    #[test]
    fn single_point_grid() {
        assert_eq!(calibrate_k(&series(), &cfg(), &[0.7]).unwrap().best_k, 0.7);
    }

    #[test]
    fn modes_agree() {
        let grid = k_grid(0.05, 1.0, 0.05).unwrap();
        let a = calibrate_k_with(&series(), &cfg(), &grid, Execution::Sequential).unwrap();
        let b = calibrate_k_with(&series(), &cfg(), &grid, Execution::Parallel).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn scale_invariance() {
        let s = series();
        let grid = k_grid(0.05, 1.0, 0.05).unwrap();
        let base = calibrate_k(&s, &cfg(), &grid).unwrap().best_k;
        for c in [0.5, 4.0] {
            let scaled = s.map_returns(|x| c * x, c).unwrap();
            assert_eq!(calibrate_k(&scaled, &cfg(), &grid).unwrap().best_k, base);
        }
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(calibrate_k(&series(), &cfg(), &[]).is_err());
        assert!(calibrate_k(&series(), &cfg(), &[0.1, 0.0]).is_err());
    }
}
