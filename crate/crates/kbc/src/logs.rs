//! Training logs (JSON lines) and grid-search reports.

use kbc_core::training::{GridCell, LogEntry};
use serde::Serialize;

/// One `{"epoch", "loss", "metric"}` object per line.
pub fn training_log_jsonl(log: &[LogEntry]) -> String {
    let mut out = String::new();
    for e in log {
        out.push_str(&serde_json::to_string(e).expect("log entries serialize"));
        out.push('\n');
    }
    out
}

#[derive(Serialize)]
struct GridRow<'a> {
    config: &'a kbc_core::training::TrainConfig,
    metric: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<&'a str>,
}

/// JSON array of `{config, metric}` in grid order; failed cells carry an
/// `error` and a null metric.
pub fn grid_report_json(cells: &[GridCell]) -> String {
    let rows: Vec<GridRow> = cells
        .iter()
        .map(|c| GridRow { config: &c.config, metric: c.metric, error: c.error.as_deref() })
        .collect();
    let mut s = serde_json::to_string_pretty(&rows).expect("grid rows serialize");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_object_per_line() {
        let log = vec![
            LogEntry { epoch: 1, loss: 0.5, metric: None },
            LogEntry { epoch: 2, loss: 0.25, metric: Some(0.75) },
        ];
        let text = training_log_jsonl(&log);
        let parsed: Vec<LogEntry> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
        assert_eq!(parsed, log);
    }
}
