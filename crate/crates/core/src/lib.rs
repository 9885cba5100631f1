//! Risk-limited single-horizon allocation for an investor with a
//! budget-threshold utility when returns follow a Generalized Error
//! distribution.
//!
//! The crate is organised bottom-up:
//!
//! * [`ged`]: the return distribution (density, moments, partial moments,
//!   seeded sampling) together with the adaptive [`quadrature`] engine used
//!   by every numerical oracle.
//! * [`utility`]: the budget-threshold utility and two independent
//!   estimators of its expectation (quadrature and Monte Carlo).
//! * [`allocator`]: the risk-scaling function `tau`, the risk cost in scale
//!   and standard-deviation units, the closed-form expected utility and the
//!   three-state holding rules.
//! * [`backtest`]: series ingestion, causal moment estimation, strategy
//!   execution and empirical calibration of the semi-empirical constant `K`.
//!
//! Data-parallel loops (sampling, Monte Carlo, K sweeps) run on rayon when
//! the `parallel` feature is enabled and fall back to plain iterators
//! otherwise. Results are identical either way.

pub mod allocator;
pub mod backtest;
pub mod error;
pub mod exec;
pub mod format;
pub mod ged;
pub mod gof;
pub mod quadrature;
pub mod special;
pub mod utility;

pub use allocator::{
    expected_utility_closed, holding_curve, optimal_holding, risk_cost_sigma, risk_cost_std,
    semi_empirical_holding, tau, AllocationQuery, HoldingDecision, HoldingRule, Scale,
};
pub use error::{Error, Result};
pub use exec::Execution;
pub use ged::GedParams;
pub use quadrature::QuadratureSpec;
pub use utility::{BudgetUtility, WealthModel};
