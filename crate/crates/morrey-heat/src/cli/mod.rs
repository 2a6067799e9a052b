//! Command-line orchestration: configuration, suite runners and report files.

pub mod config;
pub mod report;
pub mod suites;

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use config::Config;
use report::SuiteOutput;
use suites::Suite;

/// Runs `suites` on up to `threads` workers; outputs keep the input order.
pub fn run_suites(suites: &[Suite], cfg: &Config, threads: usize) -> Vec<SuiteOutput> {
    let next = AtomicUsize::new(0);
    let slots: Vec<Mutex<Option<SuiteOutput>>> = suites.iter().map(|_| Mutex::new(None)).collect();
    std::thread::scope(|scope| {
        for _ in 0..threads.clamp(1, suites.len().max(1)) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(suite) = suites.get(i) else { break };
                let out = suite.run(cfg);
                *slots[i].lock().unwrap_or_else(|e| e.into_inner()) = Some(out);
            });
        }
    });
    slots
        .into_iter()
        .filter_map(|s| s.into_inner().unwrap_or_else(|e| e.into_inner()))
        .collect()
}
