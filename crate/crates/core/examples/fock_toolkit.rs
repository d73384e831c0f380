//! Building blocks: ladder operators, displacement, tensor products,
//! partial traces and the two-mode squeezer.
//!
//!     cargo run --example fock_toolkit

use num_complex::Complex64;
use spacs_sim::{amplifier, analysis, fock, states, FockVector};

fn main() -> spacs_sim::Result<()> {
    let dim = 20;
    let alpha = Complex64::new(0.8, 0.6);

    // D(α)|0⟩ against the analytic coherent state
    let vac = FockVector::basis(vec![dim], &[0])?;
    let displaced = fock::apply(&fock::displacement(dim, alpha)?, &vac)?;
    let f = analysis::fidelity(&displaced, &states::coherent(dim, alpha)?)?;
    println!("|<alpha|D(alpha)|0>|^2 = {f:.12}");

    // [a, a†] = 1 away from the truncation edge
    let a = fock::annihilation(dim)?;
    let comm = a.compose(&a.adjoint())?.elements() - a.adjoint().compose(&a)?.elements();
    println!("[a, a+] diagonal: {:.3} ... {:.3} (last entry)", comm[(0, 0)].re, comm[(dim - 1, dim - 1)].re);

    // two-mode squeezed vacuum: reduced state is thermal
    let u = amplifier::amplifier_unitary(dim, dim, 0.3)?;
    let tmsv = fock::apply(&u, &FockVector::basis(vec![dim, dim], &[0, 0])?)?;
    let signal = tmsv.reduced(&[0])?;
    let nbar = 0.3f64.sinh().powi(2);
    let d = analysis::trace_distance(&signal, &states::thermal(dim, nbar)?)?;
    println!("squeezed vacuum at lambda=0.3: <n> = {:.6} (sinh^2 = {nbar:.6}), trace distance to thermal {d:.2e}", signal.mean_number(0)?);
    println!("entanglement entropy: {:.6} bits", analysis::entanglement_entropy(&tmsv, &[0])?);
    Ok(())
}
