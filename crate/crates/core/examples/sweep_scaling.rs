//! Scaling laws from sweeps: rate against coupling and against the number
//! of amplifiers.
//!
//!     cargo run --example sweep_scaling

use num_complex::Complex64;
use spacs_sim::scenarios::{sweep, ScenarioConfig, ScenarioKind, SweepParam};

fn main() -> spacs_sim::Result<()> {
    let one = Complex64::new(1.0, 0.0);
    let mut single = ScenarioConfig::new(ScenarioKind::Single, one, 0.01);
    single.analyses = Some(vec![]);
    let lambdas = [0.04, 0.02, 0.01, 0.005];
    for (l, r) in lambdas.iter().zip(sweep(&single, SweepParam::Lambda, &lambdas)?) {
        let p = r.heralds[0].probability;
        println!("lambda={l:<6} p={p:.6e}  p/lambda^2={:.6}", p / (l * l));
    }

    let mut cascade = ScenarioConfig::new(ScenarioKind::Cascade, one, 0.01);
    cascade.analyses = Some(vec![]);
    let ns = [1.0, 2.0, 3.0, 4.0, 5.0];
    let reports = sweep(&cascade, SweepParam::NAmplifiers, &ns)?;
    let p1 = reports[0].heralds[0].probability;
    for (n, r) in ns.iter().zip(&reports) {
        println!("N={n}  p/p1={:.5}", r.heralds[0].probability / p1);
    }

    let mut warm = ScenarioConfig::new(ScenarioKind::Thermal, one, 0.01);
    warm.analyses = Some(vec![]);
    for (nbar, r) in [0.0, 0.1, 0.2].iter().zip(sweep(&warm, SweepParam::Nbar, &[0.0, 0.1, 0.2])?) {
        println!("nbar={nbar}  p={:.6e}", r.heralds[0].probability);
    }
    Ok(())
}
