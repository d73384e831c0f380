//! One amplifier fed by a coherent state: herald rate and the heralded
//! photon-added coherent state.
//!
//!     cargo run --example single_amplifier

use num_complex::Complex64;
use spacs_sim::amplifier::{evolve_cascade, CascadeLayout};
use spacs_sim::herald::{project, HeraldPattern};
use spacs_sim::{analysis, fock, states};

fn main() -> spacs_sim::Result<()> {
    let lambda = 0.01;
    println!("{:>5} {:>14} {:>14} {:>12} {:>10}", "alpha", "p(click)", "l^2(1+|a|^2)", "F(|a,1>)", "Mandel Q");
    for a in [0.0, 0.5, 1.0, 2.0] {
        let alpha = Complex64::new(a, 0.0);
        let dim = fock::default_signal_dim(alpha);
        let layout = CascadeLayout::uniform(dim, 1, lambda)?;
        let out = evolve_cascade(&layout.input(&states::coherent(dim, alpha)?)?, &layout)?;
        let click = project(&out, &HeraldPattern::exact(vec![1], vec![1]))?;
        let signal = click.conditional.expect("the idler clicks at lambda > 0");
        let f = analysis::fidelity(&signal, &states::pacs(dim, alpha, 1)?)?;
        let q = analysis::mandel_q(&signal)?.unwrap_or(f64::NAN);
        println!(
            "{a:>5.1} {:>14.6e} {:>14.6e} {f:>12.9} {q:>10.5}",
            click.probability,
            lambda * lambda * (1.0 + a * a)
        );
    }
    Ok(())
}
