//! Kernel method on Motzkin paths: the root u(z), M(z,0), and the square-root
//! singularity at z = 1/3.

use catalytic::analysis::{analyze, AnalysisOptions, Singular};
use catalytic::equation::CatalyticEquation;
use catalytic::numeric::rat_to_string;

fn main() -> catalytic::Result<()> {
    let eq = CatalyticEquation::parse("M = 1 + z*(u+1)*M + z*D")?;
    let opts = AnalysisOptions { coefficients: Some(12), asymptotics: true, asymptotic_terms: 2000, ..Default::default() };
    let a = analyze(&eq, &opts)?;

    let k = a.kernel.as_ref().expect("linear equation");
    let show = |c: &[catalytic::numeric::Rat]| c.iter().map(rat_to_string).collect::<Vec<_>>().join(", ");
    println!("u(z)        {}", show(&k.solution.u_series.coeffs()[..10]));
    println!("M(z,0)      {}", show(&k.solution.m0_formula.coeffs()[..10]));
    println!("identity    {}", k.identity.holds());

    if let Some(Singular::Linear { point, expansion }) = &a.singular {
        println!("z0, u0      {}, {}", point.z0.to_decimal(25), point.u0.to_decimal(25));
        println!("a0, a1, a2  {}, {}, {}", expansion.a0.to_decimal(15), expansion.a1.to_decimal(15), expansion.a2.to_decimal(15));
    }
    let asy = a.asymptotics.expect("requested");
    // 3 sqrt(3) / (2 sqrt(pi)) = 1.4658075357...
    println!("c           {} ({} terms)", asy.constants[0].value.to_decimal(20), asy.n_max);
    Ok(())
}
