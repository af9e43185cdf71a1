use std::fmt::Write;

use super::records::CellSummary;

/// `e · sqrt((1+η)/8π) · sqrt(log N) / N`, the high-probability bound on
/// `wce(·;2)`. NaN for `N < 2`.
pub fn bound_curve(n: usize, eta: f64) -> f64 {
    if n < 2 {
        return f64::NAN;
    }
    let nf = n as f64;
    std::f64::consts::E * ((1.0 + eta) / (8.0 * std::f64::consts::PI)).sqrt() * nf.ln().sqrt() / nf
}

fn fmt_param(s: Option<f64>) -> String {
    s.map(|v| v.to_string()).unwrap_or_else(|| "-".into())
}

/// Fixed-width text table of every summary cell.
pub fn render_table(cells: &[CellSummary]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<18} {:>7} {:<13} {:>6} {:>7} {:>13} {:>11} {:>13} {:>13} {:>13} {:>10}",
        "kind", "n", "metric", "param", "count", "mean", "se", "median", "q90", "q99", "max_tail"
    );
    for c in cells {
        let _ = writeln!(
            out,
            "{:<18} {:>7} {:<13} {:>6} {:>7} {:>13.6e} {:>11.3e} {:>13.6e} {:>13.6e} {:>13.6e} {:>10.2e}",
            c.kind.name(),
            c.n,
            c.metric,
            fmt_param(c.s),
            c.count,
            c.mean,
            c.se,
            c.median,
            c.q90,
            c.q99,
            c.max_tail_bound
        );
    }
    out
}

/// Tab-separated rows of the worst-case-error cells, one per (kind, N, s),
/// with the `wce(·;2)` bound curve for `eta` (NaN when `s ≠ 2`).
pub fn render_tsv(cells: &[CellSummary], eta: f64) -> String {
    let mut out = String::from("kind\tn\tmetric\ts\tcount\tmedian\tq90\tbound\n");
    for c in cells.iter().filter(|c| c.metric.starts_with("wce")) {
        let bound = if c.s == Some(2.0) { bound_curve(c.n, eta) } else { f64::NAN };
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
            c.kind.name(),
            c.n,
            c.metric,
            fmt_param(c.s),
            c.count,
            c.median,
            c.q90,
            bound
        );
    }
    out
}
