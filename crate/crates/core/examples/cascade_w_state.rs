//! N amplifiers sharing one signal. Any single idler click heralds the same
//! photon-added signal while the idlers collapse into a W state.
//!
//!     cargo run --example cascade_w_state

use num_complex::Complex64;
use spacs_sim::amplifier::{evolve_cascade, CascadeLayout};
use spacs_sim::herald::{project, HeraldPattern};
use spacs_sim::{analysis, fock, states};

fn main() -> spacs_sim::Result<()> {
    let alpha = Complex64::new(1.0, 0.0);
    let dim = fock::default_signal_dim(alpha);
    let mut p1 = None;
    for n in 1..=4 {
        let layout = CascadeLayout::uniform(dim, n, 0.01)?;
        let out = evolve_cascade(&layout.input(&states::coherent(dim, alpha)?)?, &layout)?;
        let idlers: Vec<usize> = (1..=n).collect();
        let any = project(&out, &HeraldPattern::any_single_click(idlers))?;
        let p1 = *p1.get_or_insert(any.probability);
        let f_signal = any.signal_fidelity(&states::pacs(dim, alpha, 1)?)?.unwrap_or(f64::NAN);
        print!("N={n}  p={:.6e}  p/p1={:.5}  F(signal)={f_signal:.9}", any.probability, any.probability / p1);
        if n >= 2 {
            let f_w = any.idler_fidelity(&states::w_state(n)?)?.unwrap_or(f64::NAN);
            let s = analysis::von_neumann_entropy(any.idler.as_ref().expect("defined"));
            print!("  F(W_{n})={f_w:.9}  S(idlers)={s:.3e}");
        }
        println!();
    }
    Ok(())
}
