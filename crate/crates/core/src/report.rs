//! Plot-ready CSV output.

use std::io::Write;

use crate::error::Result;
use crate::metrics::MetricsReport;
use crate::sim::SweepRow;

pub const SWEEP_COLUMNS: [&str; 9] = [
    "n",
    "x",
    "p",
    "traffic_mode",
    "trials",
    "mean_ttr",
    "std_err",
    "timeouts",
    "seed",
];

/// Lower bound on MTTR_h for a minimum-MCTTR pair: `(h+1)N` for `h <= N-2`
/// and `N²` at `h = N-1`.
pub fn mttr_h_lower_bound(n: usize, h: usize) -> usize {
    if h + 1 >= n {
        n * n
    } else {
        (h + 1) * n
    }
}

/// Columns `h,mttr_h,lower_bound`; `h_max` truncates the curve. Undefined
/// values are left empty.
pub fn write_mttr_h_csv<W: Write>(
    report: &MetricsReport,
    h_max: Option<usize>,
    out: W,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["h", "mttr_h", "lower_bound"])?;
    let last = h_max.map_or(report.n - 1, |m| m.min(report.n - 1));
    for h in 0..=last {
        let value = report.mttr_h[h].map(|v| v.to_string()).unwrap_or_default();
        w.write_record([
            h.to_string(),
            value,
            mttr_h_lower_bound(report.n, h).to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn float_cell(v: Option<f64>) -> String {
    match v {
        Some(x) if x.is_nan() => "NaN".to_string(),
        Some(x) => x.to_string(),
        None => String::new(),
    }
}

pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SWEEP_COLUMNS)?;
    for r in rows {
        w.write_record([
            r.n.to_string(),
            r.x.to_string(),
            r.p.to_string(),
            r.traffic_mode.as_str().to_string(),
            r.trials.to_string(),
            float_cell(r.mean_ttr),
            float_cell(r.std_err),
            r.timeouts.map(|t| t.to_string()).unwrap_or_default(),
            r.seed.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
