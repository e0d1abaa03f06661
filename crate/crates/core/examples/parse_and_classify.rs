//! Parse a few equations and show how they are routed.

use catalytic::equation::{classify, dependency_digraph, CatalyticEquation};

fn main() {
    let inputs = [
        // division by u is outside the grammar; this one shows a parse error
        "M = 1 + z*(u + 1/u)*M - z/u*M0",
        "M = 1 + z*(u+1)*M + z*D",
        "M = u^2 + z^2*M + z*D",
        "M = 1 + z*(u+1)^2*M^2 + z*(u+1)*M + z*(u+1)*D",
        "M = 1 + u*M + z*(1+M)*D",
        "M = -M^2 + u*M*D + z*(u+1)*(u*(1+M)^2 + 1 + M + (1+u)*D + u*M*D)",
    ];
    for text in inputs {
        let eq = match CatalyticEquation::parse(text) {
            Ok(eq) => eq,
            Err(e) => {
                println!("{text}\n  {e}\n");
                continue;
            }
        };
        let c = classify(&eq);
        println!("{}", eq.to_text());
        println!("  class {} / form {} / positive {}", c.class, c.form, c.positive);
        if let Ok(g) = dependency_digraph(&eq) {
            println!("  digraph strongly connected: {}", g.strongly_connected);
        }
        for w in &c.warnings {
            println!("  warning: {w}");
        }
        println!();
    }
}
