//! Run every corpus entry through the full pipeline and print the checks.

use catalytic::corpus;

fn main() {
    let mut failures = 0;
    for name in corpus::list() {
        let t = std::time::Instant::now();
        let report = corpus::validate(name).expect("known entry");
        println!("{name}: {} ({:.2}s)", if report.passed() { "pass" } else { "FAIL" }, t.elapsed().as_secs_f64());
        if let Some(e) = &report.error {
            println!("  error: {e}");
        }
        for c in &report.checks {
            println!("  [{}] {:<22} expected {:<28} observed {}", if c.pass { "ok" } else { "!!" }, c.key, c.expected, c.observed);
        }
        for w in &report.warnings {
            println!("  warning: {w}");
        }
        failures += usize::from(!report.passed());
    }
    std::process::exit(i32::from(failures > 0));
}
