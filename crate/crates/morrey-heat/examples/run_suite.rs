//! Runs a verification suite from Rust and prints its CSV report.
//! `cargo run --example run_suite -- fixed-point`

use morrey_heat::cli::config::Config;
use morrey_heat::cli::report::csv_body;
use morrey_heat::cli::suites::Suite;

fn main() {
    let wanted = std::env::args().nth(1).unwrap_or_else(|| "volumes".into());
    let Some(suite) = Suite::ALL.into_iter().find(|s| s.id() == wanted) else {
        eprintln!("unknown suite {wanted}; one of {:?}", Suite::ALL.map(Suite::id));
        std::process::exit(2);
    };
    let cfg = Config::parse(r#"{"volumes": {"radii": [0.5, 2.0, 8.0]}}"#).expect("valid config");
    let out = suite.run(&cfg);
    print!("{}", csv_body(std::slice::from_ref(&out)));
    println!("{} in {:.2} s", if out.passed() { "PASS" } else { "FAIL" }, out.seconds);
}
