//! A Markov chain conserving O but not O², and its quantum embedding.

use nalgebra::DMatrix;
use noetherq::classical::{
    classical_noether_discrete, counterexample_search_classical, embed_diagonal, ClassicalChain, Embedding, ObservableVector,
    DISCRETE_CORRESPONDENCE,
};
use noetherq::fixed::noether_discrete;
use noetherq::AnalysisOptions;

fn main() -> noetherq::Result<()> {
    let opts = AnalysisOptions::default();
    // state 1 moves to 0 or 2 with equal probability
    let u = DMatrix::from_row_slice(3, 3, &[1.0, 0.5, 0.0, 0.0, 0.0, 0.0, 0.0, 0.5, 1.0]);
    let chain = ClassicalChain::stochastic(u)?;
    let o = ObservableVector::new(vec![1.0, 0.0, -1.0])?;
    let v = classical_noether_discrete(&chain, &o, &opts)?;
    println!("O conserved: {}, O² conserved: {}", v.holds("O conserved"), v.holds("O^2 conserved"));

    if let Embedding::Channel(ch) = embed_diagonal(&chain, &opts.tol)? {
        let q = noether_discrete(&ch.to_super(), &o.to_operator(), &opts)?;
        for (cn, qn) in DISCRETE_CORRESPONDENCE {
            println!("  {cn:<28} {:<5} | {qn:<38} {}", v.holds(cn), q.holds(qn));
        }
    }

    let found = counterexample_search_classical(4, 11, &opts.tol);
    println!(
        "search: {} states, by search {}, residuals {:.1e} / {:.3}",
        found.chain.n_states(),
        found.found_by_search,
        found.first_moment_residual,
        found.second_moment_residual
    );
    Ok(())
}
