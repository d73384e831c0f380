//! Constructors for the named states of the scheme: Fock, coherent,
//! photon-added coherent, thermal, entangled coherent, W and the
//! two-excitation three-mode state.
//!
//! Every constructor returns a unit-norm state.

use std::f64::consts::FRAC_PI_4;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::fock::{self, DensityMatrix, FockVector};

/// Largest acceptable norm deficit of a truncated coherent expansion.
pub const COHERENT_DEFICIT_TOL: f64 = 1e-8;
/// Largest acceptable trace deficit of a truncated thermal distribution.
pub const THERMAL_DEFICIT_TOL: f64 = 1e-6;

/// Photon-added coherent state parameters `|α, m⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PacsSpec {
    pub alpha: C64,
    pub m: usize,
}

impl PacsSpec {
    /// `m! · L_m(−|α|²)`, the squared norm of `(a†)^m |α⟩`.
    pub fn norm_sqr(&self) -> f64 {
        factorial(self.m) * fock::laguerre(self.m, -self.alpha.norm_sqr())
    }

    pub fn build(&self, dim: usize) -> Result<FockVector> {
        pacs(dim, self.alpha, self.m)
    }
}

/// Amplitudes of the two Sanders entangled-coherent-state branches.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EcsSpec {
    pub alpha: C64,
    pub beta: C64,
}

impl EcsSpec {
    pub fn build(&self, dim: usize) -> Result<FockVector> {
        ecs(dim, self.alpha, self.beta)
    }

    /// Modulus of the largest coherent amplitude appearing in either branch.
    pub fn max_amplitude(&self) -> f64 {
        self.alpha.norm().max(self.beta.norm())
    }
}

pub(crate) fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

pub fn fock(dim: usize, n: usize) -> Result<FockVector> {
    if dim < 2 {
        return Err(Error::InvalidDimension { dim });
    }
    if n >= dim {
        return Err(Error::OutOfRange { n, dim });
    }
    FockVector::basis(vec![dim], &[n])
}

/// Untruncated coherent amplitudes `e^{−|α|²/2} α^n / √n!` for `n < len`.
fn coherent_amplitudes(alpha: C64, len: usize) -> Vec<C64> {
    let mut out = Vec::with_capacity(len);
    let mut c = C64::new((-0.5 * alpha.norm_sqr()).exp(), 0.0);
    for n in 0..len {
        if n > 0 {
            c = c * alpha / (n as f64).sqrt();
        }
        out.push(c);
    }
    out
}

fn renormalize_checked(dims: Vec<usize>, amps: Vec<C64>, what: &str) -> Result<FockVector> {
    let v = FockVector::from_vec(dims, amps)?;
    let deficit = (1.0 - v.norm() * v.norm()).abs();
    if deficit > COHERENT_DEFICIT_TOL {
        return Err(Error::TruncationTooSmall {
            dim: v.dims()[0],
            required: v.dims()[0] + 1,
            what: format!("{what} norm deficit {deficit:e}"),
        });
    }
    v.normalized()
}

/// Coherent state `|α⟩`, renormalized after truncation.
pub fn coherent(dim: usize, alpha: C64) -> Result<FockVector> {
    if dim < 2 {
        return Err(Error::InvalidDimension { dim });
    }
    fock::check_guard(dim, fock::coherent_guard(alpha), "coherent state")?;
    renormalize_checked(vec![dim], coherent_amplitudes(alpha, dim), "coherent state")
}

/// Photon-added coherent state `(a†)^m|α⟩ / √(m! L_m(−|α|²))`.
pub fn pacs(dim: usize, alpha: C64, m: usize) -> Result<FockVector> {
    if m == 0 {
        return coherent(dim, alpha);
    }
    if dim < 2 {
        return Err(Error::InvalidDimension { dim });
    }
    fock::check_guard(dim, fock::coherent_guard(alpha) + m, "photon-added coherent state")?;
    let spec = PacsSpec { alpha, m };
    let inv_norm = 1.0 / spec.norm_sqr().sqrt();
    let base = coherent_amplitudes(alpha, dim - m);
    let mut amps = vec![C64::new(0.0, 0.0); dim];
    for (k, b) in base.into_iter().enumerate() {
        let n = k + m;
        // √(n!/k!) from applying a† m times to |k⟩
        let ladder: f64 = ((k + 1)..=n).map(|j| j as f64).product::<f64>().sqrt();
        amps[n] = b * ladder * inv_norm;
    }
    renormalize_checked(vec![dim], amps, "photon-added coherent state")
}

/// Bose–Einstein diagonal state with mean occupation `nbar`.
pub fn thermal(dim: usize, nbar: f64) -> Result<DensityMatrix> {
    if dim < 2 {
        return Err(Error::InvalidDimension { dim });
    }
    if !(nbar >= 0.0) || !nbar.is_finite() {
        return Err(Error::invalid(format!("mean thermal occupation {nbar} must be >= 0")));
    }
    let ratio = nbar / (1.0 + nbar);
    let probs: Vec<f64> = (0..dim).map(|n| ratio.powi(n as i32) / (1.0 + nbar)).collect();
    let total: f64 = probs.iter().sum();
    if 1.0 - total > THERMAL_DEFICIT_TOL {
        return Err(Error::TruncationTooSmall {
            dim,
            required: thermal_min_dim(nbar),
            what: format!("thermal trace deficit {:e}", 1.0 - total),
        });
    }
    let diag = DVector::from_iterator(dim, probs.iter().map(|p| C64::new(p / total, 0.0)));
    DensityMatrix::new(vec![dim], DMatrix::from_diagonal(&diag))
}

/// Smallest dimension whose thermal trace deficit is below the tolerance.
pub fn thermal_min_dim(nbar: f64) -> usize {
    if nbar <= 0.0 {
        return 2;
    }
    let ratio = nbar / (1.0 + nbar);
    // deficit after d levels is ratio^d
    ((THERMAL_DEFICIT_TOL * 0.1).ln() / ratio.ln()).ceil().max(2.0) as usize
}

/// Unit-phase factors `e^{∓iπ/4}` of the two entangled-coherent branches.
fn ecs_phases() -> (C64, C64) {
    (C64::from_polar(1.0, -FRAC_PI_4), C64::from_polar(1.0, FRAC_PI_4))
}

fn superpose(c1: C64, b1: &FockVector, c2: C64, b2: &FockVector) -> Result<FockVector> {
    b1.scaled(c1).add(&b2.scaled(c2))?.normalized()
}

/// Sanders entangled coherent state
/// `e^{−iπ/4}|iβ⟩|iα⟩ + e^{iπ/4}|−α⟩|β⟩`, normalized by the exact branch
/// overlap.
pub fn ecs(dim: usize, alpha: C64, beta: C64) -> Result<FockVector> {
    let i = C64::new(0.0, 1.0);
    let (p1, p2) = ecs_phases();
    let first = fock::tensor(&[&coherent(dim, i * beta)?, &coherent(dim, i * alpha)?])?;
    let second = fock::tensor(&[&coherent(dim, -alpha)?, &coherent(dim, beta)?])?;
    superpose(p1, &first, p2, &second)
}

/// Entangled SPACS with the photon added to the first (upper) mode:
/// `e^{−iπ/4}|iβ,1⟩|iα⟩ + e^{iπ/4}|−α,1⟩|β⟩`, explicitly normalized.
pub fn espacs_upper(dim: usize, alpha: C64, beta: C64) -> Result<FockVector> {
    let i = C64::new(0.0, 1.0);
    let (p1, p2) = ecs_phases();
    let first = fock::tensor(&[&pacs(dim, i * beta, 1)?, &coherent(dim, i * alpha)?])?;
    let second = fock::tensor(&[&pacs(dim, -alpha, 1)?, &coherent(dim, beta)?])?;
    superpose(p1, &first, p2, &second)
}

/// Entangled SPACS with the photon added to the second (lower) mode:
/// `e^{−iπ/4}|iβ⟩|iα,1⟩ + e^{iπ/4}|−α⟩|β,1⟩`, explicitly normalized.
pub fn espacs_lower(dim: usize, alpha: C64, beta: C64) -> Result<FockVector> {
    let i = C64::new(0.0, 1.0);
    let (p1, p2) = ecs_phases();
    let first = fock::tensor(&[&coherent(dim, i * beta)?, &pacs(dim, i * alpha, 1)?])?;
    let second = fock::tensor(&[&coherent(dim, -alpha)?, &pacs(dim, beta, 1)?])?;
    superpose(p1, &first, p2, &second)
}

/// Equal superposition of all `n_modes`-qubit basis states with exactly
/// `excitations` ones.
pub fn dicke_state(n_modes: usize, excitations: usize) -> Result<FockVector> {
    if n_modes == 0 || excitations > n_modes {
        return Err(Error::invalid(format!("no {excitations}-excitation states on {n_modes} modes")));
    }
    let dims = vec![2; n_modes];
    let len = 1usize << n_modes;
    let amps: Vec<C64> = (0..len)
        .map(|i: usize| {
            if i.count_ones() as usize == excitations {
                C64::new(1.0, 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        })
        .collect();
    FockVector::from_vec(dims, amps)?.normalized()
}

/// `(1/√N) Σ_k |0…1_k…0⟩` on `n_modes` two-level modes.
pub fn w_state(n_modes: usize) -> Result<FockVector> {
    if n_modes < 2 {
        return Err(Error::invalid(format!("W state needs at least 2 modes, got {n_modes}")));
    }
    dicke_state(n_modes, 1)
}

/// `(|110⟩ + |011⟩ + |101⟩)/√3`.
pub fn ii3_state() -> FockVector {
    dicke_state(3, 2).expect("three modes hold two excitations")
}
