//! Acceptance suite: runs every verification suite once with the default
//! configuration and prints one PASS/FAIL line per criterion.

use std::collections::BTreeSet;

use morrey_heat::cli::config::Config;
use morrey_heat::cli::report::{ReportRow, SuiteOutput};
use morrey_heat::cli::run_suites;
use morrey_heat::cli::suites::Suite;

struct Criterion {
    id: u32,
    title: &'static str,
    anchors: &'static [&'static str],
    /// Runtime limit in seconds for the checks behind the criterion.
    limit: f64,
}

const CRITERIA: &[Criterion] = &[
    Criterion { id: 1, title: "ball volumes match closed forms", anchors: &["volume-closed-form"], limit: 1.0 },
    Criterion { id: 2, title: "volume envelopes and comparison", anchors: &["volume-envelope", "volume-comparison"], limit: 5.0 },
    Criterion {
        id: 3,
        title: "heat kernel mass, PDE residual, composition",
        anchors: &["heat-kernel-mass", "heat-kernel-pde", "heat-semigroup"],
        limit: 60.0,
    },
    Criterion { id: 4, title: "sharp envelope comparability on H3", anchors: &["sharp-kernel-envelope"], limit: 10.0 },
    Criterion { id: 5, title: "flat sup-norm decay of r^-1", anchors: &["sup-dispersive-flat"], limit: 30.0 },
    Criterion { id: 6, title: "flat Morrey dispersive power law", anchors: &["morrey-dispersive-flat"], limit: 300.0 },
    Criterion { id: 7, title: "H3 sup-norm decay of a member profile", anchors: &["dispersive-hyperbolic"], limit: 300.0 },
    Criterion { id: 8, title: "gradient smoothing on R3 and H3", anchors: &["smoothing-flat", "smoothing-hyperbolic"], limit: 300.0 },
    Criterion {
        id: 9,
        title: "Riesz isometry, Morrey ratios, kernel split",
        anchors: &["riesz-isometry", "riesz-morrey-bound", "smallness-condition", "riesz-kernel-split"],
        limit: 600.0,
    },
    Criterion { id: 10, title: "abstract fixed point", anchors: &["fixed-point"], limit: 1.0 },
    Criterion {
        id: 11,
        title: "mild surrogate on R3 and damped H3",
        anchors: &["mild-flat", "mild-hyperbolic-damped", "mild-scaling"],
        limit: 300.0,
    },
    Criterion {
        id: 12,
        title: "member profile finite, not in L2",
        anchors: &["morrey-membership", "lp-non-membership"],
        limit: 120.0,
    },
    Criterion {
        id: 13,
        title: "structural inequalities on every snapshot",
        anchors: &["interpolation", "holder-inequality", "morrey-inclusion", "comparison-principle", "mass-conservation"],
        limit: f64::INFINITY,
    },
];

const BUNDLE_LIMIT: f64 = 900.0;

fn describe(r: &ReportRow) -> String {
    let note = r.note.as_deref().map(|n| format!(" [{n}]")).unwrap_or_default();
    format!("{}/{}: measured {:e}, predicted {:e}, tol {:e}{note}", r.suite, r.check, r.measured, r.predicted, r.tol)
}

#[test]
fn acceptance_criteria() {
    let outputs: Vec<SuiteOutput> = run_suites(&Suite::ALL, &Config::default(), 1);
    let rows: Vec<&ReportRow> = outputs.iter().flat_map(|o| &o.rows).collect();

    let covered: BTreeSet<&str> = CRITERIA.iter().flat_map(|c| c.anchors.iter().copied()).collect();
    let stray: Vec<_> = rows.iter().filter(|r| !covered.contains(r.anchor)).map(|r| describe(r)).collect();
    assert!(stray.is_empty(), "rows outside every criterion: {stray:?}");

    let mut failed = Vec::new();
    for c in CRITERIA {
        let mine: Vec<&&ReportRow> = rows.iter().filter(|r| c.anchors.contains(&r.anchor)).collect();
        let seconds: f64 = mine.iter().filter_map(|r| r.seconds).sum();
        let bad: Vec<_> = mine.iter().filter(|r| !r.pass).collect();
        let ok = !mine.is_empty() && bad.is_empty() && seconds < c.limit;
        println!(
            "{} criterion {:>2}: {} ({} checks, {:.1} s)",
            if ok { "PASS" } else { "FAIL" },
            c.id,
            c.title,
            mine.len(),
            seconds
        );
        for r in bad {
            println!("       {}", describe(r));
        }
        if seconds >= c.limit {
            println!("       runtime {seconds:.1} s over the {} s limit", c.limit);
        }
        if !ok {
            failed.push(c.id);
        }
    }
    let total: f64 = outputs.iter().map(|o| o.seconds).sum();
    let bundle_ok = total < BUNDLE_LIMIT;
    println!("{} full bundle in {total:.1} s (limit {BUNDLE_LIMIT} s)", if bundle_ok { "PASS" } else { "FAIL" });
    assert!(failed.is_empty() && bundle_ok, "failed criteria: {failed:?}, bundle {total:.1} s");
}
