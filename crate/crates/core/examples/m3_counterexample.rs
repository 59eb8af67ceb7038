//! A unital CP map on M_3 whose fixed points are not an algebra.
//!
//! `Φ(X) = PXP + (x11 + x22)/2 · E33` with `P = diag(1, 1, 0)`.

use noetherq::fixed::constants_scale;
use noetherq::random::m3_like_channel;
use noetherq::Tolerances;

fn main() -> noetherq::Result<()> {
    let tol = Tolerances::default();
    let phi = m3_like_channel(3).to_super();
    let rep = constants_scale(&phi, &tol)?;
    println!("dim Fix(Φ)          = {}", rep.fix.len());
    println!("dim multiplicative  = {}", rep.mult_domain.len());
    println!("dim bimodule        = {}", rep.bimodule.len());
    println!("dim Fix ∩ mult      = {}", rep.constants2.len());
    println!("Fix(Φ) is an algebra: {}", rep.fix_is_algebra);
    if let Some(a) = rep.witnesses.first() {
        let a2 = a * a;
        println!("witness a = {a:.3}");
        println!("Φ(a²) − a² has norm {:.3}", (phi.apply(&a2)? - &a2).norm());
    }
    println!("structure identities hold: {}", rep.consistent());
    Ok(())
}
