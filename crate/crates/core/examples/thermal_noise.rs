//! Displaced thermal input: the herald rate grows with the thermal
//! occupation while the heralded state drifts away from the ideal one.
//!
//!     cargo run --example thermal_noise

use num_complex::Complex64;
use spacs_sim::{analysis, thermal};

fn main() -> spacs_sim::Result<()> {
    let alpha = Complex64::new(1.0, 0.0);
    let lambda = 0.01;
    let dim = thermal::default_thermal_dim(alpha, 0.5);
    let base = thermal::thermal_spacs(dim, 4, alpha, 0.0, lambda)?.probability;
    println!("{:>5} {:>8} {:>13} {:>9} {:>11} {:>10}", "nbar", "u", "p", "p/p(0)", "F(|a,1>)", "W(0,0)");
    for nbar in [0.0, 0.05, 0.1, 0.2, 0.5] {
        let (u, _) = thermal::bogoliubov_coeffs(nbar)?;
        let h = thermal::thermal_spacs(dim, 4, alpha, nbar, lambda)?;
        let rho = h.signal.as_ref().expect("defined at lambda > 0");
        println!(
            "{nbar:>5.2} {u:>8.5} {:>13.6e} {:>9.5} {:>11.8} {:>10.5}",
            h.probability,
            h.probability / base,
            h.spacs_fidelity.unwrap_or(f64::NAN),
            analysis::wigner_point(rho, 0.0, 0.0)
        );
    }

    // the same thermal state from the doubled space, tilde mode traced out
    let tfd = thermal::thermo_vacuum(15, 0.3)?.reduced(&[0])?;
    let direct = spacs_sim::states::thermal(15, 0.3)?;
    println!("thermo-field double vs direct thermal state: trace distance {:.2e}", analysis::trace_distance(&tfd, &direct)?);
    Ok(())
}
