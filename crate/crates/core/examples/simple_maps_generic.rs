//! Simple maps have an equation with negative coefficients. Generic mode
//! still finds z0 = 1/8 and the (1 - 8z)^(3/2) singularity, without the
//! positivity certificates.

use catalytic::analysis::{analyze, AnalysisOptions, Singular};
use catalytic::corpus;
use catalytic::numeric::{rat, rat_to_string};

fn main() -> catalytic::Result<()> {
    let eq = corpus::load("simple-maps")?.equation;
    let opts = AnalysisOptions { coefficients: Some(10), expect_z0: Some(rat(1, 8)), ..Default::default() };
    let a = analyze(&eq, &opts)?;
    println!("class    {}", a.classification.class);
    let m0 = a.coefficients.as_ref().expect("requested");
    println!("S(z,1)-1 {}", m0.coeffs().iter().map(rat_to_string).collect::<Vec<_>>().join(", "));
    if let Some(Singular::Nonlinear { point, expansion, .. }) = &a.singular {
        println!("z0       {}", point.z0.to_decimal(25));
        println!("a3       {}  (3/2 term: {})", expansion.a3.to_decimal(15), expansion.three_halves());
        println!("|a1|     {}", expansion.fit.coeffs[1].abs().to_decimal(3));
    }
    for w in &a.warnings {
        println!("warning: {w}");
    }
    Ok(())
}
