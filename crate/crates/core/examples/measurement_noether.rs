//! Discrete and measurement Noether verdicts for a Lüders operation.

use noetherq::channels::build_luders;
use noetherq::fixed::{noether_discrete, noether_measurement};
use noetherq::linalg::diag;
use noetherq::{AnalysisOptions, NoetherVerdict};

fn show(title: &str, v: &NoetherVerdict) {
    println!("{title} (consistent: {})", v.consistent);
    for c in &v.clauses {
        let group = c.group.as_deref().unwrap_or("-");
        println!("  [{group:>11}] {:<55} {:<5} residual {:.2e}", c.name, c.holds, c.residual);
    }
}

fn main() -> noetherq::Result<()> {
    let opts = AnalysisOptions::default();
    let p0 = diag(&[1.0, 0.0]);
    let p1 = diag(&[0.0, 1.0]);
    let pinching = build_luders(&[p0, p1], &opts.tol)?.to_super();
    let sz = diag(&[1.0, -1.0]);
    let sx = noetherq::linalg::real_matrix(2, &[0.0, 1.0, 1.0, 0.0]);
    show("pinching, A = σz", &noether_discrete(&pinching, &sz, &opts)?);
    show("pinching, A = σx", &noether_discrete(&pinching, &sx, &opts)?);
    show("pinching, measured A = σz", &noether_measurement(&pinching, &sz, &opts)?);
    Ok(())
}
