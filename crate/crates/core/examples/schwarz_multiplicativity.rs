//! Schwarz inequality and the multiplicative domain of a random unital CP map.

use noetherq::channels::schwarz_defect;
use noetherq::fixed::multiplicative_domain;
use noetherq::random::{random_operator, random_structured_unital_cp, rng};
use noetherq::Tolerances;

fn main() -> noetherq::Result<()> {
    let tol = Tolerances::default();
    let mut g = rng(1);
    for d in 2..=4 {
        let phi = random_structured_unital_cp(&mut g, d).to_super();
        let mut worst = f64::INFINITY;
        for _ in 0..20 {
            let a = random_operator(&mut g, d);
            let defect = schwarz_defect(&phi, &a, &tol)?;
            let min = defect.symmetric_eigenvalues().min();
            worst = worst.min(min);
        }
        let mult = multiplicative_domain(&phi, &tol)?;
        println!(
            "d = {d}: min eigenvalue of Φ(a*a) − Φ(a)*Φ(a) over 20 draws {worst:.2e}; multiplicative domain dim {} (algebra: {})",
            mult.len(),
            mult.is_algebra()
        );
    }
    Ok(())
}
