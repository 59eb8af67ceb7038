//! Constants of motion of a dephasing Lindblad semigroup.

use noetherq::channels::Picture;
use noetherq::linalg::{diag, r};
use noetherq::semigroup::{constants_of_motion, evolve, growth_bound, yosida_approx, LindbladGenerator, SemigroupSpec};
use noetherq::AnalysisOptions;

fn main() -> noetherq::Result<()> {
    let opts = AnalysisOptions::default();
    let sz = diag(&[1.0, -1.0]);
    let gen = LindbladGenerator::new(vec![&sz * r(0.5)], &sz * r(0.3), Picture::Heisenberg)?;
    let spec = SemigroupSpec::lindblad(gen);
    let com = constants_of_motion(&spec, &opts)?;
    println!("constants of motion: dim {} (algebra: {})", com.subspace.len(), com.subspace.is_algebra());
    for (t, dist) in &com.time_checks {
        println!("  t = {t:>4}: distance to Fix(Ψ_t) {dist:.2e}");
    }
    println!("growth bound: {:.3e}", growth_bound(&spec)?);
    let exact = evolve(&spec, 1.0)?;
    for lambda in [10.0, 100.0, 1000.0] {
        let approx = yosida_approx(&spec, 1.0, lambda, &opts.tol)?;
        println!("Yosida λ = {lambda:>6}: error {:.3e}", approx.sub(&exact)?.norm());
    }
    Ok(())
}
