//! Thermal noise on the signal input: displaced thermal states, their
//! evolution through one amplifier and the heralded, thermalized
//! photon-added state.
//!
//! Thermal states live on the physical mode as density matrices. The
//! thermo-field double construction, a pure state on the mode and its tilde
//! partner, is kept as [`thermo_vacuum`] for cross-checks at small
//! dimension.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::amplifier::{self, LEAKAGE_LIMIT};
use crate::error::{Error, Result};
use crate::fock::{self, DensityMatrix, FockVector, ModeOperator};
use crate::linalg;
use crate::states::{self, THERMAL_DEFICIT_TOL};

/// Mean thermal occupation and the matching heating parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermalParams {
    nbar: f64,
    theta: f64,
}

impl ThermalParams {
    pub fn new(nbar: f64) -> Result<Self> {
        check_nbar(nbar)?;
        Ok(Self { nbar, theta: nbar.sqrt().asinh() })
    }

    pub fn nbar(&self) -> f64 {
        self.nbar
    }

    /// `θ` with `sinh²θ = n̄`.
    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn u(&self) -> f64 {
        self.theta.cosh()
    }

    pub fn v(&self) -> f64 {
        self.theta.sinh()
    }
}

fn check_nbar(nbar: f64) -> Result<()> {
    if !(nbar >= 0.0) || !nbar.is_finite() {
        return Err(Error::invalid(format!("mean thermal occupation {nbar} must be >= 0")));
    }
    Ok(())
}

/// `(u, v) = (√(n̄+1), √n̄)`
pub fn bogoliubov_coeffs(nbar: f64) -> Result<(f64, f64)> {
    check_nbar(nbar)?;
    Ok(((nbar + 1.0).sqrt(), nbar.sqrt()))
}

/// Smallest signal dimension accepted for a displaced thermal state.
pub fn thermal_input_guard(alpha: C64, nbar: f64) -> usize {
    fock::coherent_guard(alpha) + states::thermal_min_dim(nbar)
}

/// Default signal truncation for a displaced thermal input.
pub fn default_thermal_dim(alpha: C64, nbar: f64) -> usize {
    fock::default_signal_dim(alpha) + states::thermal_min_dim(nbar)
}

/// `D(α) ρ_th(n̄) D(α)†`. The state is built in a padded space and cropped
/// to `dim`; the cropped trace deficit must stay below the thermal
/// tolerance.
pub fn thermal_coherent_input(dim: usize, alpha: C64, nbar: f64) -> Result<DensityMatrix> {
    check_nbar(nbar)?;
    fock::check_guard(dim, fock::coherent_guard(alpha), "displaced thermal state")?;
    let padded = dim.max(states::thermal_min_dim(nbar)) + fock::coherent_guard(alpha);
    let rho = states::thermal(padded, nbar)?;
    let shifted = fock::apply_dm(&fock::displacement_unguarded(padded, alpha)?, &rho)?;
    let cropped = shifted.elements().view((0, 0), (dim, dim)).clone_owned();
    let deficit = 1.0 - linalg::trace(&cropped).re;
    if deficit > THERMAL_DEFICIT_TOL {
        return Err(Error::TruncationTooSmall {
            dim,
            required: thermal_input_guard(alpha, nbar),
            what: format!("displaced thermal trace deficit {deficit:e}"),
        });
    }
    DensityMatrix::new(vec![dim], cropped)?.normalized()
}

/// `U (ρ ⊗ |0⟩⟨0|) U†` for one amplifier; the output modes are (signal, idler).
pub fn evolve_thermal(rho: &DensityMatrix, lambda: f64, idler_dim: usize) -> Result<DensityMatrix> {
    if rho.n_modes() != 1 {
        return Err(Error::NotSingleMode { dims: rho.dims().to_vec() });
    }
    let signal_dim = rho.dims()[0];
    let u = amplifier::amplifier_unitary(signal_dim, idler_dim, lambda)?;
    let vac = states::fock(idler_dim, 0)?.to_density();
    let joint = DensityMatrix::new(vec![signal_dim, idler_dim], linalg::kron(rho.elements(), vac.elements()))?;
    let out = fock::apply_dm(&u, &joint)?;
    let leakage = out.top_level_population();
    if leakage > LEAKAGE_LIMIT {
        return Err(Error::NormLeakage { leakage, limit: LEAKAGE_LIMIT });
    }
    Ok(out)
}

/// Signal state conditioned on `count` photons in the idler.
#[derive(Debug, Clone, PartialEq)]
pub struct ThermalHerald {
    pub probability: f64,
    /// `None` when the outcome never occurs.
    pub signal: Option<DensityMatrix>,
    /// `⟨α,1|ρ|α,1⟩` against the ideal photon-added coherent state.
    pub spacs_fidelity: Option<f64>,
}

impl ThermalHerald {
    pub fn is_defined(&self) -> bool {
        self.signal.is_some()
    }
}

/// Unnormalized block `⟨k_i|ρ|k_i⟩` of a (signal, idler) density matrix.
fn idler_block(rho_out: &DensityMatrix, count: usize) -> Result<DMatrix<C64>> {
    if rho_out.n_modes() != 2 {
        return Err(Error::invalid(format!("expected a (signal, idler) state, got dims {:?}", rho_out.dims())));
    }
    let (ds, di) = (rho_out.dims()[0], rho_out.dims()[1]);
    if count >= di {
        return Err(Error::OutOfRange { n: count, dim: di });
    }
    let el = rho_out.elements();
    Ok(DMatrix::from_fn(ds, ds, |i, j| el[(i * di + count, j * di + count)]))
}

/// Projects the idler of a (signal, idler) state onto `count` photons.
pub fn herald_idler_count(rho_out: &DensityMatrix, count: usize) -> Result<(Option<DensityMatrix>, f64)> {
    let block = idler_block(rho_out, count)?;
    let probability = linalg::trace(&block).re.max(0.0);
    if probability == 0.0 {
        return Ok((None, 0.0));
    }
    let ds = block.nrows();
    let signal = DensityMatrix::new(vec![ds], block * C64::new(1.0 / probability, 0.0))?;
    Ok((Some(signal), probability))
}

/// One-photon herald on the idler, with the fidelity of the result to the
/// ideal photon-added coherent state of amplitude `alpha`.
pub fn heralded_thermal_spacs(rho_out: &DensityMatrix, alpha: C64) -> Result<ThermalHerald> {
    let (signal, probability) = herald_idler_count(rho_out, 1)?;
    let spacs_fidelity = match &signal {
        Some(rho) => Some(rho.expectation_pure(&states::pacs(rho.dims()[0], alpha, 1)?)?),
        None => None,
    };
    Ok(ThermalHerald { probability, signal, spacs_fidelity })
}

/// Full pipeline: displaced thermal input, one amplifier, one-photon herald.
pub fn thermal_spacs(signal_dim: usize, idler_dim: usize, alpha: C64, nbar: f64, lambda: f64) -> Result<ThermalHerald> {
    let input = thermal_coherent_input(signal_dim, alpha, nbar)?;
    heralded_thermal_spacs(&evolve_thermal(&input, lambda, idler_dim)?, alpha)
}

/// Heating operator `exp[θ(a† ã† − a ã)]` on (mode, tilde mode).
pub fn heating_operator(dim: usize, theta: f64) -> Result<ModeOperator> {
    let k = amplifier::generator(dim, dim)?;
    ModeOperator::square(vec![dim, dim], linalg::expm(&(k.elements() * C64::new(theta, 0.0))))
}

/// Thermal vacuum `H(θ)|0, 0̃⟩` on the doubled space (mode, tilde mode).
pub fn thermo_vacuum(dim: usize, nbar: f64) -> Result<FockVector> {
    let params = ThermalParams::new(nbar)?;
    let vac = FockVector::basis(vec![dim, dim], &[0, 0])?;
    fock::apply(&heating_operator(dim, params.theta())?, &vac)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::{self, fidelity, trace_distance};

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn coefficients() {
        assert_eq!(bogoliubov_coeffs(0.0).unwrap(), (1.0, 0.0));
        let (u, v) = bogoliubov_coeffs(0.1).unwrap();
        assert!((u - 1.04881).abs() < 1e-5 && (v - 0.31623).abs() < 1e-5);
        for nbar in [0.0, 0.5, 3.0] {
            let p = ThermalParams::new(nbar).unwrap();
            assert!((p.u() * p.u() - p.v() * p.v() - 1.0).abs() < 1e-12);
            assert!((p.v() * p.v() - nbar).abs() < 1e-12);
            let (u, v) = bogoliubov_coeffs(nbar).unwrap();
            assert!((u - p.u()).abs() < 1e-12 && (v - p.v()).abs() < 1e-12);
        }
        assert!(bogoliubov_coeffs(-0.1).is_err());
        assert!(ThermalParams::new(f64::NAN).is_err());
    }

    #[test]
    fn displaced_thermal_limits() {
        let a = c(1.0);
        let cold = thermal_coherent_input(20, a, 0.0).unwrap();
        assert!(fidelity(&cold, &states::coherent(20, a).unwrap()).unwrap() > 1.0 - 1e-10);
        let undisplaced = thermal_coherent_input(20, c(0.0), 0.3).unwrap();
        assert!(trace_distance(&undisplaced, &states::thermal(20, 0.3).unwrap()).unwrap() < 1e-8);
        let rho = thermal_coherent_input(40, a, 0.2).unwrap();
        assert!((rho.mean_number(0).unwrap() - 1.2).abs() < 1e-6);
        assert!(rho.is_hermitian(1e-12));
        assert!(matches!(thermal_coherent_input(12, c(2.0), 0.2), Err(Error::TruncationTooSmall { .. })));
    }

    #[test]
    fn zero_coupling_leaves_input_untouched() {
        let rho = thermal_coherent_input(20, c(1.0), 0.1).unwrap();
        let out = evolve_thermal(&rho, 0.0, 4).unwrap();
        let vac = states::fock(4, 0).unwrap().to_density();
        let want = linalg::kron(rho.elements(), vac.elements());
        assert!(linalg::max_abs(&(out.elements() - want)) < 1e-14);
        let h = heralded_thermal_spacs(&out, c(1.0)).unwrap();
        assert_eq!(h.probability, 0.0);
        assert!(!h.is_defined() && h.spacs_fidelity.is_none());
    }

    #[test]
    fn cold_input_matches_pure_pipeline() {
        let a = c(1.0);
        let dim = default_thermal_dim(a, 0.0);
        let h = thermal_spacs(dim, 4, a, 0.0, 0.01).unwrap();
        assert!(h.spacs_fidelity.unwrap() >= 0.9999);
        // λ²(1 + |α|²)
        assert!((h.probability / 2e-4 - 1.0).abs() < 1e-3);
    }

    #[test]
    fn noise_raises_probability_and_lowers_fidelity() {
        let a = c(1.0);
        let grid = [0.0, 0.05, 0.1, 0.2];
        let runs: Vec<ThermalHerald> = grid
            .iter()
            .map(|&n| thermal_spacs(default_thermal_dim(a, 0.2), 4, a, n, 0.01).unwrap())
            .collect();
        for w in runs.windows(2) {
            assert!(w[1].probability > w[0].probability);
            assert!(w[1].spacs_fidelity.unwrap() < w[0].spacs_fidelity.unwrap());
        }
        // first order: p ∝ 1 + |α|² + n̄
        let ratio = runs[2].probability / runs[0].probability;
        assert!((ratio - 2.1 / 2.0).abs() < 1e-3, "{ratio}");
        assert!(runs[2].spacs_fidelity.unwrap() < 1.0);
    }

    #[test]
    fn noise_smears_wigner_negativity() {
        let a = c(0.1);
        let dim = default_thermal_dim(a, 0.2);
        let w0 = |nbar: f64| {
            let h = thermal_spacs(dim, 4, a, nbar, 0.01).unwrap();
            analysis::wigner_point(h.signal.as_ref().unwrap(), 0.0, 0.0)
        };
        let (cold, warm) = (w0(0.0), w0(0.2));
        assert!(cold < 0.0);
        assert!(warm > cold);
        // parity oracle: W(0) = (2/π) Σ (−1)^n p_n
        let h = thermal_spacs(dim, 4, a, 0.2, 0.01).unwrap();
        let parity: f64 = h.signal.unwrap().diagonal().iter().enumerate().map(|(n, p)| if n % 2 == 0 { *p } else { -*p }).sum();
        assert!((warm - parity * 2.0 / std::f64::consts::PI).abs() < 1e-12);
    }

    #[test]
    fn doubled_space_reproduces_thermal_state() {
        for (dim, nbar) in [(15, 0.0), (15, 0.1), (15, 0.3), (15, 0.5), (12, 0.2)] {
            let tfd = thermo_vacuum(dim, nbar).unwrap();
            assert!(tfd.is_normalized());
            let reduced = tfd.reduced(&[0]).unwrap();
            let d = trace_distance(&reduced, &states::thermal(dim, nbar).unwrap()).unwrap();
            assert!(d < 1e-6, "dim {dim} nbar {nbar}: {d}");
        }
    }

    #[test]
    fn quasi_particle_number_is_nbar() {
        // ⟨b†b⟩ on the tilde vacuum with b = u a + v ã†
        let (dim, nbar) = (15, 0.3);
        let p = ThermalParams::new(nbar).unwrap();
        let a = fock::annihilation(dim).unwrap();
        let id = ModeOperator::identity(vec![dim]).unwrap();
        let a_s = fock::tensor_op(&[&a, &id]).unwrap();
        let a_t = fock::tensor_op(&[&id, &a]).unwrap();
        let b = a_s.elements() * c(p.u()) + a_t.adjoint().elements() * c(p.v());
        let vac = FockVector::basis(vec![dim, dim], &[0, 0]).unwrap();
        let bv = &b * vac.amplitudes();
        assert!((bv.norm_squared() - nbar).abs() < 1e-12);
    }
}
