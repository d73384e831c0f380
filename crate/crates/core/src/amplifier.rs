//! Two-mode parametric amplification `exp[λ(a_s† a_i† − a_s a_i)]` and its
//! cascades.
//!
//! The generator is anti-Hermitian on the truncated space, so its
//! exponential is unitary there to rounding error; truncation shows up as
//! population reaching the top level of a mode, which is what the cascade
//! leakage check measures.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::fock::{self, FockVector, ModeOperator, DEFAULT_IDLER_DIM, DEFAULT_LAMBDA_MAX};
use crate::linalg;
use crate::states;

/// Largest top-level population tolerated in a cascade output.
pub const LEAKAGE_LIMIT: f64 = 1e-6;

/// `a_s† a_i† − a_s a_i` on (signal, idler).
pub fn generator(signal_dim: usize, idler_dim: usize) -> Result<ModeOperator> {
    let a_s = fock::annihilation(signal_dim)?;
    let a_i = fock::annihilation(idler_dim)?;
    let lower = fock::tensor_op(&[&a_s, &a_i])?;
    let raise = lower.adjoint();
    ModeOperator::square(vec![signal_dim, idler_dim], raise.elements() - lower.elements())
}

/// Exact single-amplifier propagator on the (signal, idler) pair.
pub fn amplifier_unitary(signal_dim: usize, idler_dim: usize, lambda: f64) -> Result<ModeOperator> {
    fock::check_lambda(lambda, DEFAULT_LAMBDA_MAX)?;
    unitary_unchecked(signal_dim, idler_dim, lambda)
}

fn unitary_unchecked(signal_dim: usize, idler_dim: usize, lambda: f64) -> Result<ModeOperator> {
    let k = generator(signal_dim, idler_dim)?;
    ModeOperator::square(
        vec![signal_dim, idler_dim],
        linalg::expm(&(k.elements() * C64::new(lambda, 0.0))),
    )
}

/// Series expansion of a single amplifier acting on `|α⟩|0⟩`, to first or
/// second order in λ. The terms are produced by applying the generator
/// literally (`ψ + λKψ + λ²K²ψ/2`) and the result is left unnormalized.
/// The idler mode uses the default idler truncation.
pub fn perturbative_output(alpha: C64, lambda: f64, order: usize, signal_dim: usize) -> Result<FockVector> {
    if !(1..=2).contains(&order) {
        return Err(Error::UnsupportedOrder(order));
    }
    fock::check_lambda(lambda, DEFAULT_LAMBDA_MAX)?;
    let input = fock::tensor(&[&states::coherent(signal_dim, alpha)?, &states::fock(DEFAULT_IDLER_DIM, 0)?])?;
    let k = generator(signal_dim, DEFAULT_IDLER_DIM)?;
    let first = fock::apply(&k, &input)?;
    let mut out = input.add(&first.scaled(C64::new(lambda, 0.0)))?;
    if order == 2 {
        let second = fock::apply(&k, &first)?;
        out = out.add(&second.scaled(C64::new(lambda * lambda / 2.0, 0.0)))?;
    }
    Ok(out)
}

/// Mode layout of an N-amplifier cascade: mode 0 is the shared signal,
/// modes `1..=N` are the idlers, amplifier `j` couples the signal to idler `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct CascadeLayout {
    signal_dim: usize,
    idler_dims: Vec<usize>,
    lambdas: Vec<f64>,
}

impl CascadeLayout {
    /// `n` identical amplifiers with coupling `lambda` and default idler truncation.
    pub fn uniform(signal_dim: usize, n: usize, lambda: f64) -> Result<Self> {
        Self::new(signal_dim, vec![DEFAULT_IDLER_DIM; n], vec![lambda; n])
    }

    pub fn new(signal_dim: usize, idler_dims: Vec<usize>, lambdas: Vec<f64>) -> Result<Self> {
        Self::with_limit(signal_dim, idler_dims, lambdas, DEFAULT_LAMBDA_MAX)
    }

    pub fn with_limit(signal_dim: usize, idler_dims: Vec<usize>, lambdas: Vec<f64>, lambda_max: f64) -> Result<Self> {
        if idler_dims.is_empty() {
            return Err(Error::invalid("a cascade needs at least one amplifier"));
        }
        if idler_dims.len() != lambdas.len() {
            return Err(Error::invalid(format!(
                "{} idler modes but {} couplings",
                idler_dims.len(),
                lambdas.len()
            )));
        }
        if let Some(&dim) = std::iter::once(&signal_dim).chain(&idler_dims).find(|&&d| d < 2) {
            return Err(Error::InvalidDimension { dim });
        }
        for &l in &lambdas {
            fock::check_lambda(l, lambda_max)?;
        }
        Ok(Self { signal_dim, idler_dims, lambdas })
    }

    pub fn n_amplifiers(&self) -> usize {
        self.lambdas.len()
    }

    pub fn signal_dim(&self) -> usize {
        self.signal_dim
    }

    pub fn idler_dims(&self) -> &[usize] {
        &self.idler_dims
    }

    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }

    /// Dimensions of the full (signal, idler_1, ..., idler_N) space.
    pub fn dims(&self) -> Vec<usize> {
        std::iter::once(self.signal_dim).chain(self.idler_dims.iter().copied()).collect()
    }

    /// `|ψ_s⟩ ⊗ |0⟩^{⊗N}`
    pub fn input(&self, signal: &FockVector) -> Result<FockVector> {
        if signal.dims() != [self.signal_dim] {
            return Err(Error::ShapeMismatch { expected: vec![self.signal_dim], found: signal.dims().to_vec() });
        }
        let vacua = self
            .idler_dims
            .iter()
            .map(|&d| states::fock(d, 0))
            .collect::<Result<Vec<_>>>()?;
        let mut parts = vec![signal];
        parts.extend(vacua.iter());
        fock::tensor(&parts)
    }
}

/// Passes `input` through the amplifiers in index order, amplifier `j`
/// acting on (signal, idler `j`). Fails when truncation leakage exceeds
/// [`LEAKAGE_LIMIT`].
pub fn evolve_cascade(input: &FockVector, layout: &CascadeLayout) -> Result<FockVector> {
    let dims = layout.dims();
    if input.dims() != dims.as_slice() {
        return Err(Error::ShapeMismatch { expected: dims, found: input.dims().to_vec() });
    }
    let couplings: Vec<Coupling> = layout
        .lambdas
        .iter()
        .enumerate()
        .map(|(j, &lambda)| Coupling { signal: 0, idler: j + 1, lambda })
        .collect();
    // couplings were range-checked when the layout was built
    evolve_network(input, &couplings, f64::INFINITY)
}

/// One amplifier between two modes of a larger state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coupling {
    pub signal: usize,
    pub idler: usize,
    pub lambda: f64,
}

/// Applies amplifiers in listed order to arbitrary (signal, idler) mode
/// pairs, each coupling in `[0, lambda_max)`. Fails on leakage like
/// [`evolve_cascade`].
pub fn evolve_network(input: &FockVector, couplings: &[Coupling], lambda_max: f64) -> Result<FockVector> {
    let dims = input.dims();
    let mut state = input.clone();
    for c in couplings {
        fock::check_lambda(c.lambda, lambda_max)?;
        if c.signal >= dims.len() || c.idler >= dims.len() || c.signal == c.idler {
            return Err(Error::invalid(format!("invalid amplifier modes ({}, {})", c.signal, c.idler)));
        }
        let u = unitary_unchecked(dims[c.signal], dims[c.idler], c.lambda)?;
        state = fock::apply_on_modes(&u, &[c.signal, c.idler], &state)?;
    }
    let leakage = state.top_level_population();
    if leakage > LEAKAGE_LIMIT {
        return Err(Error::NormLeakage { leakage, limit: LEAKAGE_LIMIT });
    }
    state.normalized()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{coherent, fock as fock_state, pacs};

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn zero_coupling_is_identity() {
        let u = amplifier_unitary(6, 4, 0.0).unwrap();
        assert_eq!(u, ModeOperator::identity(vec![6, 4]).unwrap());
    }

    #[test]
    fn unitary_on_truncated_space() {
        let u = amplifier_unitary(21, 4, 0.3).unwrap();
        assert!(u.unitarity_residual() < 1e-12);
        assert!(u.unitarity_residual_below(2) < 1e-8);
    }

    /// Independent order-6 Taylor sum of exp(λK) applied to |0,0⟩.
    fn series_vacuum(lambda: f64, dim: usize) -> FockVector {
        let k = generator(dim, dim).unwrap();
        let mut term = FockVector::basis(vec![dim, dim], &[0, 0]).unwrap();
        let mut total = term.clone();
        for n in 1..=6 {
            term = fock::apply(&k, &term).unwrap().scaled(c(lambda / n as f64));
            total = total.add(&term).unwrap();
        }
        total
    }

    #[test]
    fn two_mode_squeezed_vacuum_amplitude() {
        let lambda: f64 = 0.01;
        // closed form tanh λ / cosh λ, cross-checked against the series
        let closed = lambda.tanh() / lambda.cosh();
        let series = series_vacuum(lambda, 6).amplitude(&[1, 1]).unwrap().re;
        assert!((closed - series).abs() < 1e-13);
        assert!((closed - 0.0099991667).abs() < 1e-10);

        let u = amplifier_unitary(6, 6, lambda).unwrap();
        let out = fock::apply(&u, &FockVector::basis(vec![6, 6], &[0, 0]).unwrap()).unwrap();
        assert!((out.amplitude(&[1, 1]).unwrap() - c(closed)).norm() < 1e-14);
        assert!((out.amplitude(&[2, 2]).unwrap() - c(lambda.tanh().powi(2) / lambda.cosh())).norm() < 1e-14);
    }

    #[test]
    fn first_order_block_is_added_photon() {
        let (lambda, dim) = (0.01, 30);
        let u = amplifier_unitary(dim, 4, lambda).unwrap();
        let input = fock::tensor(&[&coherent(dim, c(1.0)).unwrap(), &fock_state(4, 0).unwrap()]).unwrap();
        let out = fock::apply(&u, &input).unwrap();
        let ad_alpha = fock::apply(&fock::creation(dim).unwrap(), &coherent(dim, c(1.0)).unwrap()).unwrap();
        let mut num = 0.0;
        let mut den = 0.0;
        for n in 0..dim {
            let blk = out.amplitude(&[n, 1]).unwrap();
            let want = ad_alpha.amplitude(&[n]).unwrap() * lambda;
            num += (blk - want).norm_sqr();
            den += want.norm_sqr();
        }
        // the exact block differs from λa†|α⟩ at relative order λ² (≈1.6λ² here)
        assert!((num / den).sqrt() < 10.0 * lambda * lambda);
        let blk_norm: f64 = (0..dim).map(|n| out.amplitude(&[n, 1]).unwrap().norm_sqr()).sum();
        assert!(((blk_norm / den).sqrt() - 1.0).abs() < 10.0 * lambda * lambda);
    }

    #[test]
    fn perturbative_orders() {
        assert!(matches!(perturbative_output(c(1.0), 0.01, 3, 30), Err(Error::UnsupportedOrder(3))));
        let p0 = perturbative_output(c(1.0), 0.0, 1, 30).unwrap();
        let input = fock::tensor(&[&coherent(30, c(1.0)).unwrap(), &fock_state(4, 0).unwrap()]).unwrap();
        assert_eq!(p0, input);

        let lambda = 0.01;
        for alpha in [0.0, 1.0, 2.0] {
            let p1 = perturbative_output(c(alpha), lambda, 1, 40).unwrap();
            let blk: f64 = (0..40).map(|n| p1.amplitude(&[n, 1]).unwrap().norm_sqr()).sum();
            let want = lambda * lambda * (1.0 + alpha * alpha);
            assert!((blk / want - 1.0).abs() < 1e-10, "alpha={alpha}");
        }
    }

    #[test]
    fn second_order_error_is_cubic() {
        // measured: distance / λ³ ≈ 3.36 at α = 1, flat as λ shrinks
        let dim = 30;
        for lambda in [0.04, 0.02, 0.01] {
            let p2 = perturbative_output(c(1.0), lambda, 2, dim).unwrap();
            let u = amplifier_unitary(dim, DEFAULT_IDLER_DIM, lambda).unwrap();
            let input = fock::tensor(&[&coherent(dim, c(1.0)).unwrap(), &fock_state(DEFAULT_IDLER_DIM, 0).unwrap()]).unwrap();
            let exact = fock::apply(&u, &input).unwrap();
            let dist = exact.sub(&p2).unwrap().norm();
            assert!(dist <= 10.0 * lambda.powi(3), "lambda={lambda} dist={dist:e}");
        }
    }

    #[test]
    fn single_cascade_matches_unitary() {
        let layout = CascadeLayout::uniform(21, 1, 0.01).unwrap();
        let input = layout.input(&coherent(21, c(1.0)).unwrap()).unwrap();
        let out = evolve_cascade(&input, &layout).unwrap();
        let direct = fock::apply(&amplifier_unitary(21, 4, 0.01).unwrap(), &input).unwrap();
        assert!(out.sub(&direct).unwrap().norm() < 1e-14);
    }

    #[test]
    fn cascade_n2_structure() {
        let lambda = 0.01;
        let dim = 21;
        let layout = CascadeLayout::uniform(dim, 2, lambda).unwrap();
        let out = evolve_cascade(&layout.input(&coherent(dim, c(1.0)).unwrap()).unwrap(), &layout).unwrap();
        let block = |i1: usize, i2: usize| -> f64 {
            (0..dim).map(|n| out.amplitude(&[n, i1, i2]).unwrap().norm_sqr()).sum::<f64>().sqrt()
        };
        let l1 = 2f64.sqrt(); // √(1 + |α|²)
        assert!((block(1, 0) / (lambda * l1) - 1.0).abs() < 1e-3);
        assert!((block(0, 1) / (lambda * l1) - 1.0).abs() < 1e-3);
        // ‖a†²|α⟩‖ = √(2 L_2(−1)) = √7
        assert!((block(1, 1) / (lambda * lambda * 7f64.sqrt()) - 1.0).abs() < 1e-3);
        // signal factor of the double-click block is |α,2⟩
        let sig: Vec<C64> = (0..dim).map(|n| out.amplitude(&[n, 1, 1]).unwrap()).collect();
        let sig = FockVector::from_vec(vec![dim], sig).unwrap().normalized().unwrap();
        assert!(sig.inner(&pacs(dim, c(1.0), 2).unwrap()).unwrap().norm_sqr() > 0.9999);
    }

    #[test]
    fn cascade_rejects_bad_input() {
        let layout = CascadeLayout::uniform(21, 2, 0.01).unwrap();
        let wrong = FockVector::basis(vec![21, 4], &[0, 0]).unwrap();
        assert!(matches!(evolve_cascade(&wrong, &layout), Err(Error::ShapeMismatch { .. })));
        assert!(CascadeLayout::uniform(21, 0, 0.01).is_err());
        assert!(CascadeLayout::uniform(21, 2, 0.6).is_err());
        assert!(CascadeLayout::new(21, vec![4, 4], vec![0.01]).is_err());
    }

    #[test]
    fn cascade_reports_leakage_overflow() {
        // two-level idlers cannot hold the λ-order population without it sitting on the top level
        let layout = CascadeLayout::new(21, vec![2], vec![0.01]).unwrap();
        let input = layout.input(&coherent(21, c(1.0)).unwrap()).unwrap();
        assert!(matches!(evolve_cascade(&input, &layout), Err(Error::NormLeakage { .. })));
    }
}
