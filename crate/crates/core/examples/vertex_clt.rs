//! Vertices in random planar maps: mean n/2, variance 5n/32.

use catalytic::analysis::{analyze, AnalysisOptions};
use catalytic::corpus;
use catalytic::numeric::rat_to_string;

fn main() -> catalytic::Result<()> {
    let eq = corpus::load("planar-maps-vertices")?.equation;
    let a = analyze(&eq, &AnalysisOptions { clt: true, moment_terms: 16, ..Default::default() })?;
    let r = a.clt.expect("requested");
    let d = &r.derivatives;
    println!("rho(1)   {}", d.rho1.to_decimal(20));
    println!("rho'(1)  {}  +- {}", d.d1.to_decimal(20), d.d1_error.to_decimal(3));
    println!("rho''(1) {}  +- {}", d.d2.to_decimal(20), d.d2_error.to_decimal(3));
    println!("mu       {}", r.mu.to_decimal(15));
    println!("sigma^2  {}", r.sigma2.to_decimal(15));
    for m in r.empirical.iter().step_by(3) {
        println!("  n = {:>2}  E = {:<6} Var = {}", m.n, rat_to_string(&m.mean), rat_to_string(&m.variance));
    }
    for s in &r.rho_grid {
        println!("  rho({}) = {}", rat_to_string(&s.x), s.rho.to_decimal(15));
    }
    Ok(())
}
