//! Report rows, the anchor registry and file emission.

use std::fs;
use std::io::Write as _;
use std::path::Path;

use serde::Serialize;

pub const CSV_HEADER: &str = "suite,check,anchor,measured,predicted,tol,pass,seconds";

/// Every anchor a report row may cite.
pub const ANCHORS: &[&str] = &[
    "volume-closed-form",
    "volume-envelope",
    "volume-comparison",
    "heat-kernel-mass",
    "heat-kernel-pde",
    "heat-semigroup",
    "sharp-kernel-envelope",
    "morrey-membership",
    "lp-non-membership",
    "holder-inequality",
    "morrey-inclusion",
    "sup-dispersive-flat",
    "morrey-dispersive-flat",
    "dispersive-hyperbolic",
    "interpolation",
    "comparison-principle",
    "mass-conservation",
    "smoothing-flat",
    "smoothing-hyperbolic",
    "smallness-condition",
    "riesz-isometry",
    "riesz-morrey-bound",
    "riesz-kernel-split",
    "fixed-point",
    "mild-flat",
    "mild-hyperbolic-damped",
    "mild-scaling",
];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRow {
    pub suite: String,
    pub check: String,
    pub anchor: &'static str,
    pub measured: f64,
    pub predicted: f64,
    pub tol: f64,
    pub pass: bool,
    /// Error text of a check that could not run; kept out of the CSV.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    /// Wall time of the check group, on the group's first row; kept out of the CSV.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seconds: Option<f64>,
}

impl ReportRow {
    pub fn csv_line(&self, budget: f64) -> String {
        format!(
            "{},{},{},{},{},{},{},{}",
            self.suite,
            self.check,
            self.anchor,
            num(self.measured),
            num(self.predicted),
            num(self.tol),
            self.pass,
            num(budget)
        )
    }
}

fn num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.9e}")
    } else {
        format!("{x}")
    }
}

/// `(t, value)` samples for external plotting.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Curve {
    pub name: String,
    pub points: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteOutput {
    pub suite: &'static str,
    /// Runtime budget in seconds, written to the CSV `seconds` column.
    pub budget: f64,
    pub rows: Vec<ReportRow>,
    #[serde(skip)]
    pub curves: Vec<Curve>,
    pub seconds: f64,
}

impl SuiteOutput {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }
}

pub fn csv_body(outputs: &[SuiteOutput]) -> String {
    let mut s = String::from(CSV_HEADER);
    s.push('\n');
    for o in outputs {
        for r in &o.rows {
            s.push_str(&r.csv_line(o.budget));
            s.push('\n');
        }
    }
    s
}

#[derive(Debug, Serialize)]
struct Summary<'a> {
    command: &'a str,
    started_unix: u64,
    total_seconds: f64,
    threads: usize,
    passed: usize,
    failed: usize,
    suites: &'a [SuiteOutput],
}

fn write_atomic(path: &Path, body: &str) -> std::io::Result<()> {
    let tmp = path.with_extension("tmp");
    let mut f = fs::File::create(&tmp)?;
    f.write_all(body.as_bytes())?;
    f.sync_all()?;
    fs::rename(tmp, path)
}

/// Writes `<command>.csv`, `<command>.json` and `plots/<suite>__<curve>.csv`.
pub fn write_outputs(
    dir: &Path,
    command: &str,
    outputs: &[SuiteOutput],
    started_unix: u64,
    total_seconds: f64,
    threads: usize,
) -> std::io::Result<()> {
    fs::create_dir_all(dir.join("plots"))?;
    write_atomic(&dir.join(format!("{command}.csv")), &csv_body(outputs))?;
    for o in outputs {
        for c in &o.curves {
            let mut body = String::from("t,value\n");
            for (t, v) in &c.points {
                body.push_str(&format!("{},{}\n", num(*t), num(*v)));
            }
            write_atomic(&dir.join("plots").join(format!("{}__{}.csv", o.suite, c.name)), &body)?;
        }
    }
    let (passed, failed) = outputs
        .iter()
        .flat_map(|o| &o.rows)
        .fold((0, 0), |(p, f), r| if r.pass { (p + 1, f) } else { (p, f + 1) });
    let summary = Summary { command, started_unix, total_seconds, threads, passed, failed, suites: outputs };
    let json = serde_json::to_string_pretty(&summary).map_err(std::io::Error::other)?;
    write_atomic(&dir.join(format!("{command}.json")), &json)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_lines_are_stable() {
        let row = ReportRow {
            suite: "volumes".into(),
            check: "h3-r1".into(),
            anchor: "volume-closed-form",
            measured: 1.5e-16,
            predicted: 0.0,
            tol: 1e-10,
            pass: true,
            note: None,
            seconds: None,
        };
        assert_eq!(
            row.csv_line(1.0),
            "volumes,h3-r1,volume-closed-form,1.500000000e-16,0.000000000e0,1.000000000e-10,true,1.000000000e0"
        );
        assert_eq!(CSV_HEADER.split(',').count(), row.csv_line(1.0).split(',').count());
    }
}
