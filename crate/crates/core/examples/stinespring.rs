//! Stinespring dilation of a random unital channel.

use noetherq::channels::stinespring_dilation;
use noetherq::random::{random_operator, random_unital_channel, rng};
use noetherq::Tolerances;

fn main() -> noetherq::Result<()> {
    let tol = Tolerances::default();
    let mut g = rng(5);
    let ch = random_unital_channel(&mut g, 3, 2);
    let st = stinespring_dilation(&ch, &tol)?;
    let (d, m) = st.dims;
    println!("V: C^{d} → C^{d} ⊗ C^{m}");
    println!("reconstruction error: {:.2e}", st.reconstruction_error(&ch));
    println!("‖V*V‖ − 1 = {:.2e}", st.contraction_margin());
    let a = random_operator(&mut g, d);
    let direct = ch.apply(&a)?;
    println!("‖V*(a ⊗ I)V − Φ(a)‖ = {:.2e}", (st.reconstruct(&a) - direct).norm());
    Ok(())
}
