//! Degenerate linear equations have rational M(z,0).

use catalytic::analysis::{analyze, AnalysisOptions};
use catalytic::equation::CatalyticEquation;
use catalytic::numeric::rat_to_string;

fn main() -> catalytic::Result<()> {
    for text in ["M = u + z^2*M + z*D", "M = u^3 + z^2*M + z*D", "M = 1 + z*(z+u)*M + z*u*D"] {
        let eq = CatalyticEquation::parse(text)?;
        let a = analyze(&eq, &AnalysisOptions { coefficients: Some(12), ..Default::default() })?;
        let k = a.kernel.expect("linear");
        println!("{text}");
        println!("  {}", a.classification.class);
        if let Some(r) = &k.solution.rational_form {
            println!("  M(z,0) = ({}) / ({})", r.num, r.den);
        }
        let c = a.coefficients.expect("requested");
        println!("  {}", c.coeffs().iter().map(rat_to_string).collect::<Vec<_>>().join(", "));
    }
    Ok(())
}
