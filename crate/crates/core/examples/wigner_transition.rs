//! Wigner function of the heralded state as the coherent amplitude grows,
//! from a one-photon Fock state towards a classical coherent state. Pass a
//! path to also write the alpha = 0.1 grid as CSV.
//!
//!     cargo run --example wigner_transition -- /tmp/w.csv

use num_complex::Complex64;
use spacs_sim::analysis::{self, GridSpec};
use spacs_sim::{fock, states};

fn main() -> spacs_sim::Result<()> {
    let grid = GridSpec::square(4.0, 81);
    println!("{:>5} {:>10} {:>10} {:>10}", "alpha", "W(0,0)", "min W", "integral");
    for a in [0.0, 0.1, 0.5, 1.0, 1.5, 2.0] {
        let alpha = Complex64::new(a, 0.0);
        let rho = states::pacs(fock::default_signal_dim(alpha), alpha, 1)?.to_density();
        let w = analysis::wigner(&rho, &grid)?;
        println!("{a:>5.1} {:>10.5} {:>10.5} {:>10.5}", analysis::wigner_point(&rho, 0.0, 0.0), w.min(), w.integral());
    }
    if let Some(path) = std::env::args().nth(1) {
        let alpha = Complex64::new(0.1, 0.0);
        let rho = states::pacs(fock::default_signal_dim(alpha), alpha, 1)?;
        std::fs::write(&path, analysis::wigner(&rho, &grid)?.to_csv()).expect("writable output path");
        println!("wrote {path}");
    }
    Ok(())
}
