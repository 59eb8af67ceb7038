//! Ergodic projection of a block-diagonal channel and its conditional-expectation check.

use noetherq::fixed::fixed_point_space;
use noetherq::random::{random_block_unital_channel, rng};
use noetherq::semigroup::{conditional_expectation_check, ergodic_projection_discrete};
use noetherq::Tolerances;

fn main() -> noetherq::Result<()> {
    let tol = Tolerances::default();
    let mut g = rng(3);
    let phi = random_block_unital_channel(&mut g, 4, 2, 2).to_super();
    let erg = ergodic_projection_discrete(&phi, &tol)?;
    let p = &erg.projection;
    println!("method: {:?}, spectral gap {:.3}", erg.method, erg.spectral_gap);
    println!("‖P² − P‖ = {:.2e}", p.compose(p)?.sub(p)?.norm());
    println!("‖P(I) − I‖ = {:.2e}", p.unital_residual());
    println!("Choi min eigenvalue of P: {:.2e}", p.choi_min_eigenvalue());
    let fix = fixed_point_space(&phi, &tol);
    let ce = conditional_expectation_check(p, &tol)?;
    println!("dim range P = {}, dim Fix(Φ) = {}, distance {:.2e}", ce.range.len(), fix.len(), ce.range.distance(&fix));
    println!("conditional expectation: {} (range is an algebra: {})", ce.passes, ce.range_is_algebra);
    Ok(())
}
