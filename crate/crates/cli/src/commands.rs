use anyhow::{bail, Context, Result};

use threshold_alloc::allocator::{
    decide, expected_utility_closed, holding_curve, risk_cost_std_factor, tau, AllocationQuery,
    Scale,
};
use threshold_alloc::backtest::{
    calibrate_k, k_grid, k_sweep_table, read_series_file, records_table, run_strategy,
    simulate_conditional, simulate_iid, summary_key_values, EstimatorKind, StrategyConfig,
};
use threshold_alloc::format::{round_sig, Cell, KeyValues, Table};
use threshold_alloc::ged::GedParams;
use threshold_alloc::quadrature::QuadratureSpec;
use threshold_alloc::utility::{expected_utility_quadrature, utility};

use crate::output::{emit_kv, emit_side, emit_table, kv_text};
use crate::{Cli, Command, KappaGrid, StrategyArgs};

pub fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Tau(grid) => cmd_tau(cli, grid),
        Command::UtilityCurve {
            beta,
            w_min,
            w_max,
            points,
        } => cmd_utility_curve(cli, beta, *w_min, *w_max, *points),
        Command::RiskScaling(grid) => cmd_risk_scaling(cli, grid),
        Command::HoldingCurve {
            k,
            x_min,
            x_max,
            points,
        } => cmd_holding_curve(cli, *k, *x_min, *x_max, *points),
        Command::Allocate {
            alpha,
            sigma,
            s,
            kappa,
            limit,
            k,
        } => {
            let scale = match (sigma, s) {
                (Some(v), None) => Scale::Sigma(*v),
                (None, Some(v)) => Scale::StdDev(*v),
                _ => bail!("exactly one of --sigma and --s is required"),
            };
            cmd_allocate(
                cli,
                AllocationQuery::new(*alpha, scale, *kappa, *limit, *k)?,
            )
        }
        Command::Eu {
            h,
            alpha,
            sigma,
            kappa,
            oracle,
        } => cmd_eu(cli, *h, *alpha, *sigma, *kappa, *oracle),
        Command::Simulate {
            mu,
            sigma,
            kappa,
            n,
            alpha_spread,
        } => cmd_simulate(cli, *mu, *sigma, *kappa, *n, *alpha_spread),
        Command::Backtest { input, strategy } => {
            let cfg = strategy_config(strategy)?;
            let series =
                read_series_file(input).with_context(|| format!("reading {}", input.display()))?;
            let report = run_strategy(&series, &cfg)?;
            emit_table(cli, &records_table(&report))?;
            emit_side(
                strategy.summary.as_deref(),
                &kv_text(cli, &summary_key_values(&report.summary)),
            )
        }
        Command::Calibrate {
            input,
            strategy,
            k_min,
            k_max,
            k_step,
        } => {
            let cfg = strategy_config(strategy)?;
            let grid = k_grid(*k_min, *k_max, *k_step)?;
            let series =
                read_series_file(input).with_context(|| format!("reading {}", input.display()))?;
            let cal = calibrate_k(&series, &cfg, &grid)?;
            emit_table(cli, &k_sweep_table(&cal.table))?;
            let mut kv = KeyValues::default();
            kv.push("best_k", Cell::Num(cal.best_k));
            kv.0.extend(summary_key_values(&cal.report.summary).0);
            emit_side(strategy.summary.as_deref(), &kv_text(cli, &kv))
        }
    }
}

/// `from, from+step, ...` up to `to` (inclusive within rounding).
fn range_grid(from: f64, to: f64, step: f64) -> Result<Vec<f64>> {
    if !(from.is_finite() && to.is_finite() && step.is_finite()) || step <= 0.0 || to < from {
        bail!("bad grid: from {from}, to {to}, step {step}");
    }
    let n = ((to - from) / step + 1e-9).floor() as usize;
    if n > 10_000_000 {
        bail!("grid too large ({n} points)");
    }
    Ok((0..=n).map(|i| round_sig(from + i as f64 * step)).collect())
}

fn kappa_values(grid: &KappaGrid) -> Result<Vec<f64>> {
    match grid.kappa {
        Some(k) => Ok(vec![k]),
        None => range_grid(grid.from, grid.to, grid.step),
    }
}

/// `points` values from `lo` to `hi`; symmetric ranges give exactly
/// negated pairs.
fn linspace(lo: f64, hi: f64, points: usize) -> Result<Vec<f64>> {
    if !(lo.is_finite() && hi.is_finite()) || hi <= lo || points < 2 {
        bail!("bad range: [{lo}, {hi}] with {points} points");
    }
    let m = (points - 1) as f64;
    Ok((0..points)
        .map(|i| {
            let i = i as f64;
            (lo * (m - i) + hi * i) / m
        })
        .collect())
}

fn cmd_tau(cli: &Cli, grid: &KappaGrid) -> Result<()> {
    let mut t = Table::new(["kappa", "tau"]);
    for k in kappa_values(grid)? {
        t.push(vec![Cell::Num(k), Cell::Num(tau(k)?)]);
    }
    emit_table(cli, &t)
}

fn cmd_utility_curve(
    cli: &Cli,
    betas: &[f64],
    w_min: f64,
    w_max: f64,
    points: usize,
) -> Result<()> {
    if betas.is_empty() {
        bail!("at least one budget is required");
    }
    let wealth = linspace(w_min, w_max, points)?;
    let mut t = Table::new(["beta", "wealth", "utility"]);
    for &b in betas {
        if !b.is_finite() {
            bail!("budget must be finite");
        }
        for &w in &wealth {
            t.push(vec![Cell::Num(b), Cell::Num(w), Cell::Num(utility(b, w))]);
        }
    }
    emit_table(cli, &t)
}

fn cmd_risk_scaling(cli: &Cli, grid: &KappaGrid) -> Result<()> {
    let normal = risk_cost_std_factor(0.5)?;
    let mut t = Table::new(["kappa", "risk_cost_factor", "normal_reference"]);
    for k in kappa_values(grid)? {
        t.push(vec![
            Cell::Num(k),
            Cell::Num(risk_cost_std_factor(k)?),
            Cell::Num(normal),
        ]);
    }
    emit_table(cli, &t)
}

fn cmd_holding_curve(cli: &Cli, k: f64, x_min: f64, x_max: f64, points: usize) -> Result<()> {
    let xs = linspace(x_min, x_max, points)?;
    let mut t = Table::new(["alpha_over_s", "relative_position"]);
    for (x, v) in holding_curve(&xs, k)? {
        t.push(vec![Cell::Num(x), Cell::Num(v)]);
    }
    emit_table(cli, &t)
}

fn cmd_allocate(cli: &Cli, q: AllocationQuery) -> Result<()> {
    let d = decide(&q)?;
    let mut kv = KeyValues::default();
    kv.push(
        "rule",
        Cell::Text(
            match d.rule {
                threshold_alloc::HoldingRule::Parametric => "parametric",
                threshold_alloc::HoldingRule::SemiEmpirical => "semi_empirical",
            }
            .into(),
        ),
    );
    kv.push("holding", Cell::Num(d.holding));
    kv.push("risk_cost", Cell::Num(d.risk_cost));
    kv.push("margin", Cell::Num(d.margin));
    emit_kv(cli, &kv)
}

fn cmd_eu(cli: &Cli, h: f64, alpha: f64, sigma: f64, kappa: f64, oracle: bool) -> Result<()> {
    let closed = expected_utility_closed(h, alpha, sigma, kappa)?;
    let mut kv = KeyValues::default();
    kv.push("closed_form", Cell::Num(closed));
    if oracle {
        let p = GedParams::new(alpha, sigma, kappa)?;
        let quad = expected_utility_quadrature(h, &p, &QuadratureSpec::default())?;
        kv.push("quadrature", Cell::Num(quad));
        kv.push("abs_diff", Cell::Num((closed - quad).abs()));
    }
    emit_kv(cli, &kv)
}

fn cmd_simulate(
    cli: &Cli,
    mu: f64,
    sigma: f64,
    kappa: f64,
    n: usize,
    spread: Option<f64>,
) -> Result<()> {
    let p = GedParams::new(mu, sigma, kappa)?;
    let series = match spread {
        Some(x) => simulate_conditional(&p, x, n, cli.seed)?,
        None => simulate_iid(&p, n, cli.seed)?,
    };
    emit_table(cli, &series.to_table())
}

fn strategy_config(a: &StrategyArgs) -> Result<StrategyConfig> {
    let kind: EstimatorKind = a.estimator.parse()?;
    Ok(StrategyConfig::new(
        a.k,
        a.limit,
        a.window,
        kind,
        a.warmup.unwrap_or(a.window),
    )?)
}
