//! The transpose map is positive but not 2-positive.

use noetherq::channels::{positivity_profile, transpose_map, KPositivity};
use noetherq::Tolerances;

fn main() -> noetherq::Result<()> {
    let tol = Tolerances::default();
    let t = transpose_map(2)?;
    let profile = positivity_profile(&t, 3, 500, &tol, 7);
    println!("unital: {}  trace preserving: {}", profile.unital, profile.trace_preserving);
    println!("Choi min eigenvalue: {:.3}", profile.choi_min_eigenvalue);
    for p in &profile.k_positivity {
        match p {
            KPositivity::Violated { k, min_eigenvalue, canonical, .. } => {
                println!("k = {k}: violated (min eigenvalue {min_eigenvalue:.3}, canonical witness: {canonical})")
            }
            KPositivity::NoViolationFound { k, samples, min_eigenvalue_seen } => {
                println!("k = {k}: no violation in {samples} samples (min eigenvalue seen {min_eigenvalue_seen:.2e})")
            }
        }
    }
    Ok(())
}
