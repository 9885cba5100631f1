use crate::format::{Cell, KeyValues, Table};

use super::calibrate::KSweepRow;
use super::strategy::{BacktestReport, Summary};

pub const RECORD_COLUMNS: [&str; 8] = [
    "timestamp",
    "alpha",
    "s",
    "position",
    "next_return",
    "pnl",
    "realized_utility",
    "degenerate",
];

pub const SWEEP_COLUMNS: [&str; 4] = ["k", "total_pnl", "total_realized_utility", "trades"];

pub fn records_table(report: &BacktestReport) -> Table {
    let mut t = Table::new(RECORD_COLUMNS);
    for r in &report.records {
        t.push(vec![
            Cell::Text(r.timestamp.clone()),
            Cell::Num(r.alpha),
            Cell::Num(r.s),
            Cell::Num(r.position),
            Cell::Num(r.next_return),
            Cell::Num(r.pnl),
            Cell::Num(r.realized_utility),
            Cell::Int(i64::from(r.degenerate)),
        ]);
    }
    t
}

pub fn summary_key_values(summary: &Summary) -> KeyValues {
    let mut kv = KeyValues::default();
    kv.push("periods", Cell::Int(summary.periods as i64));
    kv.push("k", Cell::Num(summary.k_const));
    kv.push("limit", Cell::Num(summary.limit));
    kv.push("total_pnl", Cell::Num(summary.total_pnl));
    kv.push(
        "total_realized_utility",
        Cell::Num(summary.total_realized_utility),
    );
    kv.push("trades", Cell::Int(summary.trades as i64));
    kv.push("time_in_market", Cell::Num(summary.time_in_market));
    kv.push(
        "degenerate_periods",
        Cell::Int(summary.degenerate_periods as i64),
    );
    kv.push("binary_total_pnl", Cell::Num(summary.binary_total_pnl));
    kv.push(
        "binary_total_realized_utility",
        Cell::Num(summary.binary_total_realized_utility),
    );
    kv
}

pub fn k_sweep_table(rows: &[KSweepRow]) -> Table {
    let mut t = Table::new(SWEEP_COLUMNS);
    for r in rows {
        t.push(vec![
            Cell::Num(r.k),
            Cell::Num(r.total_pnl),
            Cell::Num(r.total_realized_utility),
            Cell::Int(r.trades as i64),
        ]);
    }
    t
}
