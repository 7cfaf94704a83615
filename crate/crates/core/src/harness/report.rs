//! Multi-seed result aggregation and `mean±std` table rendering.

use serde::{Deserialize, Serialize};

use crate::harness::experiment::Method;

/// A (method, seed) run that did not produce an accuracy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellFailure {
    pub seed: u64,
    pub error: String,
}

/// Results for one (method, dataset, n_train) combination, in accuracy points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportCell {
    pub method: Method,
    pub dataset: String,
    pub n_train: usize,
    pub mean: f64,
    /// Sample standard deviation (n - 1); 0 with fewer than two seeds.
    pub std: f64,
    pub seeds: Vec<u64>,
    pub per_seed: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub failures: Vec<CellFailure>,
}

impl ReportCell {
    pub fn new(method: Method, dataset: impl Into<String>, n_train: usize, seeds: Vec<u64>, per_seed: Vec<f64>) -> Self {
        let (mean, std) = mean_std(&per_seed);
        ReportCell {
            method,
            dataset: dataset.into(),
            n_train,
            mean,
            std,
            seeds,
            per_seed,
            failures: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    /// False when any cell lost a seed to a failure.
    pub complete: bool,
    pub std_kind: String,
    pub cells: Vec<ReportCell>,
}

impl EvalReport {
    pub fn new(cells: Vec<ReportCell>) -> Self {
        EvalReport {
            complete: cells.iter().all(|c| c.failures.is_empty()),
            std_kind: "sample".into(),
            cells,
        }
    }

    pub fn cell(&self, method: Method) -> Option<&ReportCell> {
        self.cells.iter().find(|c| c.method == method)
    }
}

/// Mean and sample standard deviation; NaN-free for empty or single inputs.
pub fn mean_std(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (0.0, 0.0);
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// `"85.48±0.57"`.
pub fn format_cell(mean: f64, std: f64) -> String {
    format!("{mean:.2}±{std:.2}")
}

fn rounded(x: f64) -> i64 {
    (x * 100.0).round() as i64
}

/// Renders a methods × (dataset, n_train) grid plus the JSON form.
///
/// The best mean in each column is bold (`**85.48**±0.57`, all tied cells
/// marked); cells whose mean is below the baseline row carry a trailing `↓`.
/// Means are compared at the displayed precision.
pub fn render_report(report: &EvalReport) -> (String, String) {
    let mut methods: Vec<Method> = Vec::new();
    let mut columns: Vec<(String, usize)> = Vec::new();
    for c in &report.cells {
        if !methods.contains(&c.method) {
            methods.push(c.method);
        }
        let col = (c.dataset.clone(), c.n_train);
        if !columns.contains(&col) {
            columns.push(col);
        }
    }
    let find = |m: Method, col: &(String, usize)| {
        report
            .cells
            .iter()
            .find(|c| c.method == m && c.dataset == col.0 && c.n_train == col.1 && !c.per_seed.is_empty())
    };

    let mut header = vec!["method".to_string()];
    header.extend(columns.iter().map(|(d, n)| format!("{d} (n={n})")));
    let mut rows: Vec<Vec<String>> = Vec::new();
    for &m in &methods {
        let mut row = vec![m.name().to_string()];
        for col in &columns {
            let text = match find(m, col) {
                None => "n/a".to_string(),
                Some(cell) => {
                    let best = methods
                        .iter()
                        .filter_map(|&o| find(o, col))
                        .map(|c| rounded(c.mean))
                        .max()
                        .expect("cell exists");
                    let baseline = find(Method::Baseline, col).map(|c| rounded(c.mean));
                    let mean = if rounded(cell.mean) == best {
                        format!("**{:.2}**", cell.mean)
                    } else {
                        format!("{:.2}", cell.mean)
                    };
                    let below = m != Method::Baseline && baseline.is_some_and(|b| rounded(cell.mean) < b);
                    format!("{mean}±{:.2}{}", cell.std, if below { " ↓" } else { "" })
                }
            };
            row.push(text);
        }
        rows.push(row);
    }

    let widths: Vec<usize> = (0..header.len())
        .map(|i| {
            rows.iter()
                .map(|r| r[i].chars().count())
                .chain(std::iter::once(header[i].chars().count()))
                .max()
                .unwrap_or(0)
        })
        .collect();
    let line = |cells: &[String]| {
        let padded: Vec<String> = cells
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c}{}", " ".repeat(w - c.chars().count())))
            .collect();
        format!("| {} |\n", padded.join(" | "))
    };
    let mut text = line(&header);
    let rule: Vec<String> = widths.iter().map(|w| "-".repeat(*w)).collect();
    text.push_str(&format!("|-{}-|\n", rule.join("-|-")));
    for r in &rows {
        text.push_str(&line(r));
    }
    text.push_str("\nTest accuracy (%), mean±std over seeds (sample std). **bold**: best mean in column; ↓: mean below baseline.\n");
    if !report.complete {
        text.push_str("INCOMPLETE: some (method, seed) runs failed and are excluded:\n");
        for c in &report.cells {
            for f in &c.failures {
                text.push_str(&format!("  {} seed {}: {}\n", c.method.name(), f.seed, f.error));
            }
        }
    }

    let mut json = serde_json::to_string_pretty(report).expect("report serializes");
    json.push('\n');
    (text, json)
}
