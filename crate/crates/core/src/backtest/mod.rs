//! Backtesting of the three-state rule on a return series.
//!
//! At period `t` the trader holds `h_t` chosen from conditional moment
//! estimates `(α_t, s_t)` that use returns up to and including `r_t`. The
//! position is marked against the next return: `pnl_t = h_t r_{t+1}`, and the
//! realized utility applies the budget `h_t α_t`:
//! `min(pnl_t, h_t α_t)`. Each period is a separate single-horizon bet; there
//! is no compounding and no transaction cost.

mod calibrate;
mod estimate;
mod report;
mod series;
mod simulate;
mod strategy;

pub use calibrate::{calibrate_k, calibrate_k_with, k_grid, Calibration, KSweepRow};
pub use estimate::{
    estimate_conditional_moments, ConditionalMoments, EstimatorKind, StrategyConfig,
};
pub use report::{k_sweep_table, records_table, summary_key_values, RECORD_COLUMNS, SWEEP_COLUMNS};
pub use series::{read_series, read_series_file, write_series, ReturnSeries, TimeKey, Timestamp};
pub use simulate::{simulate_conditional, simulate_iid};
pub use strategy::{run_strategy, BacktestReport, PeriodRecord, Summary};
