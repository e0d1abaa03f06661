//! Rooted planar maps by edges: exact counts, the singular system and
//! M_n ~ (2/sqrt(pi)) n^(-5/2) 12^n.

use catalytic::analysis::{analyze, AnalysisOptions};
use catalytic::corpus;
use catalytic::report::render_text;

fn main() -> catalytic::Result<()> {
    let eq = corpus::load("planar-maps")?.equation;
    let opts = AnalysisOptions { coefficients: Some(10), asymptotics: true, ..Default::default() };
    let a = analyze(&eq, &opts)?;
    print!("{}", render_text(&a));
    let asy = a.asymptotics.expect("requested");
    let c = asy.constants[0].value.to_f64();
    println!("\nc / (2/sqrt(pi)) = {:.12}", c * std::f64::consts::PI.sqrt() / 2.0);
    Ok(())
}
