//! Two idler clicks herald two added photons. Compares the measured rates
//! against the two candidate prefactors.
//!
//!     cargo run --example coincidence_two_photon

use num_complex::Complex64;
use spacs_sim::amplifier::{evolve_cascade, CascadeLayout};
use spacs_sim::herald::{self, coincidence_select, project, HeraldPattern};
use spacs_sim::{fock, states};

fn main() -> spacs_sim::Result<()> {
    let (alpha, lambda) = (Complex64::new(1.0, 0.0), 0.01);
    let dim = fock::default_signal_dim(alpha);

    for n in [2, 3] {
        let layout = CascadeLayout::uniform(dim, n, lambda)?;
        let out = evolve_cascade(&layout.input(&states::coherent(dim, alpha)?)?, &layout)?;
        let idlers: Vec<usize> = (1..=n).collect();

        let pair = coincidence_select(&out, idlers.clone(), (0, 1))?;
        let f2 = pair.signal_fidelity(&states::pacs(dim, alpha, 2)?)?.unwrap_or(f64::NAN);
        println!("N={n}: coincidence on idlers 1,2  p={:.6e}  F(|a,2>)={f2:.9}", pair.probability);

        let two = project(&out, &HeraldPattern::clicks(idlers, 2))?;
        let with_n = herald::herald_probability_reference(n, 2, alpha, lambda)?;
        let comb = herald::combinatorial_probability_reference(n, 2, alpha, lambda)?;
        println!(
            "      any two clicks  p={:.6e}  N-prefactor {with_n:.6e}  C(N,2)-prefactor {comb:.6e}",
            two.probability
        );
        if n == 3 {
            let f = two.idler_fidelity(&states::ii3_state())?.unwrap_or(f64::NAN);
            println!("      idler state vs (|110>+|101>+|011>)/sqrt3: F={f:.9}");
        }
    }
    Ok(())
}
