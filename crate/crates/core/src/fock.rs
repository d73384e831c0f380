//! Truncated Fock-space states and operators.
//!
//! Multimode amplitudes are stored row-major with mode 0 varying slowest,
//! so the basis state `|n0, n1, ..., nk⟩` lives at
//! `n0 * stride0 + n1 * stride1 + ... + nk` where `stride_j` is the product
//! of the dimensions after mode `j`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::linalg;

/// Tolerance on `|‖ψ‖ − 1|` for a vector considered normalized.
pub const NORM_TOL: f64 = 1e-10;

/// Default upper bound on the effective coupling λ.
pub const DEFAULT_LAMBDA_MAX: f64 = 0.5;

fn check_dims(dims: &[usize]) -> Result<()> {
    if dims.is_empty() {
        return Err(Error::invalid("at least one mode is required"));
    }
    match dims.iter().find(|&&d| d < 2) {
        Some(&dim) => Err(Error::InvalidDimension { dim }),
        None => Ok(()),
    }
}

/// Row-major strides for `dims`.
pub fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1; dims.len()];
    for k in (0..dims.len().saturating_sub(1)).rev() {
        s[k] = s[k + 1] * dims[k + 1];
    }
    s
}

/// Flat offsets of every basis state over `modes` (row-major in the listed
/// order), with all other modes held at level 0.
pub fn mode_offsets(dims: &[usize], modes: &[usize]) -> Vec<usize> {
    let st = strides(dims);
    let mut offsets = vec![0usize];
    for &m in modes {
        let mut next = Vec::with_capacity(offsets.len() * dims[m]);
        for &o in &offsets {
            for n in 0..dims[m] {
                next.push(o + n * st[m]);
            }
        }
        offsets = next;
    }
    offsets
}

/// Modes of `0..n_modes` not listed in `modes`, in ascending order.
pub fn complement(n_modes: usize, modes: &[usize]) -> Vec<usize> {
    (0..n_modes).filter(|m| !modes.contains(m)).collect()
}

fn check_modes(n_modes: usize, modes: &[usize]) -> Result<()> {
    for (i, &m) in modes.iter().enumerate() {
        if m >= n_modes {
            return Err(Error::invalid(format!("mode {m} out of range for {n_modes} modes")));
        }
        if modes[..i].contains(&m) {
            return Err(Error::invalid(format!("mode {m} listed twice")));
        }
    }
    Ok(())
}

/// Pure state over a truncated (possibly multimode) Fock basis.
#[derive(Debug, Clone, PartialEq)]
pub struct FockVector {
    dims: Vec<usize>,
    amplitudes: DVector<C64>,
}

impl FockVector {
    pub fn new(dims: Vec<usize>, amplitudes: DVector<C64>) -> Result<Self> {
        check_dims(&dims)?;
        let len: usize = dims.iter().product();
        if amplitudes.len() != len {
            return Err(Error::ShapeMismatch {
                expected: vec![len],
                found: vec![amplitudes.len()],
            });
        }
        Ok(Self { dims, amplitudes })
    }

    pub fn from_vec(dims: Vec<usize>, amplitudes: Vec<C64>) -> Result<Self> {
        Self::new(dims, DVector::from_vec(amplitudes))
    }

    pub fn zeros(dims: Vec<usize>) -> Result<Self> {
        check_dims(&dims)?;
        let len = dims.iter().product();
        Ok(Self { dims, amplitudes: DVector::zeros(len) })
    }

    /// Multimode basis state `|levels⟩`.
    pub fn basis(dims: Vec<usize>, levels: &[usize]) -> Result<Self> {
        let mut v = Self::zeros(dims)?;
        let idx = v.flat_index(levels)?;
        v.amplitudes[idx] = C64::new(1.0, 0.0);
        Ok(v)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn n_modes(&self) -> usize {
        self.dims.len()
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> DVector<C64> {
        self.amplitudes
    }

    pub fn flat_index(&self, levels: &[usize]) -> Result<usize> {
        if levels.len() != self.dims.len() {
            return Err(Error::ShapeMismatch {
                expected: self.dims.clone(),
                found: levels.to_vec(),
            });
        }
        let st = strides(&self.dims);
        let mut idx = 0;
        for ((&n, &d), s) in levels.iter().zip(&self.dims).zip(st) {
            if n >= d {
                return Err(Error::OutOfRange { n, dim: d });
            }
            idx += n * s;
        }
        Ok(idx)
    }

    pub fn amplitude(&self, levels: &[usize]) -> Result<C64> {
        Ok(self.amplitudes[self.flat_index(levels)?])
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm() - 1.0).abs() <= NORM_TOL
    }

    /// Unit-norm copy. Fails on the zero vector.
    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::invalid("cannot normalize a zero vector"));
        }
        Ok(self.scaled(C64::new(1.0 / n, 0.0)))
    }

    pub fn scaled(&self, factor: C64) -> Self {
        Self { dims: self.dims.clone(), amplitudes: &self.amplitudes * factor }
    }

    fn check_same_dims(&self, other: &FockVector) -> Result<()> {
        if self.dims != other.dims {
            return Err(Error::ShapeMismatch {
                expected: self.dims.clone(),
                found: other.dims.clone(),
            });
        }
        Ok(())
    }

    /// `⟨self|other⟩`
    pub fn inner(&self, other: &FockVector) -> Result<C64> {
        self.check_same_dims(other)?;
        Ok(self.amplitudes.dotc(&other.amplitudes))
    }

    pub fn add(&self, other: &FockVector) -> Result<FockVector> {
        self.check_same_dims(other)?;
        Ok(Self { dims: self.dims.clone(), amplitudes: &self.amplitudes + &other.amplitudes })
    }

    pub fn sub(&self, other: &FockVector) -> Result<FockVector> {
        self.check_same_dims(other)?;
        Ok(Self { dims: self.dims.clone(), amplitudes: &self.amplitudes - &other.amplitudes })
    }

    /// Projector `|ψ⟩⟨ψ|`.
    pub fn to_density(&self) -> DensityMatrix {
        DensityMatrix {
            dims: self.dims.clone(),
            elements: &self.amplitudes * self.amplitudes.adjoint(),
        }
    }

    /// Population of the top retained level of every mode, summed over
    /// modes. This is the weight a further raising step would push out of
    /// the truncated space.
    pub fn top_level_population(&self) -> f64 {
        let probs: Vec<f64> = self.amplitudes.iter().map(|z| z.norm_sqr()).collect();
        top_level_population(&self.dims, &probs)
    }

    /// Reduced density matrix over `keep` (in the listed order).
    pub fn reduced(&self, keep: &[usize]) -> Result<DensityMatrix> {
        check_modes(self.n_modes(), keep)?;
        if keep.is_empty() {
            return Err(Error::invalid("partial trace must keep at least one mode"));
        }
        let rest = complement(self.n_modes(), keep);
        let ko = mode_offsets(&self.dims, keep);
        let ro = mode_offsets(&self.dims, &rest);
        let m = DMatrix::from_fn(ko.len(), ro.len(), |i, j| self.amplitudes[ko[i] + ro[j]]);
        Ok(DensityMatrix {
            dims: keep.iter().map(|&k| self.dims[k]).collect(),
            elements: &m * m.adjoint(),
        })
    }

    /// Mean occupation of mode `m`.
    pub fn mean_number(&self, mode: usize) -> Result<f64> {
        check_modes(self.n_modes(), &[mode])?;
        let st = strides(&self.dims);
        let d = self.dims[mode];
        Ok(self
            .amplitudes
            .iter()
            .enumerate()
            .map(|(i, z)| ((i / st[mode]) % d) as f64 * z.norm_sqr())
            .sum())
    }

    /// Same amplitudes embedded into (or cropped to) new per-mode
    /// dimensions. Cropping requires the dropped amplitudes to vanish
    /// within `tol`.
    pub fn reshaped(&self, dims: Vec<usize>, tol: f64) -> Result<FockVector> {
        if dims.len() != self.dims.len() {
            return Err(Error::ShapeMismatch { expected: self.dims.clone(), found: dims });
        }
        let mut out = FockVector::zeros(dims.clone())?;
        let old_st = strides(&self.dims);
        let new_st = strides(&dims);
        for (i, z) in self.amplitudes.iter().enumerate() {
            let mut j = 0;
            let mut fits = true;
            for k in 0..dims.len() {
                let n = (i / old_st[k]) % self.dims[k];
                if n >= dims[k] {
                    fits = false;
                    break;
                }
                j += n * new_st[k];
            }
            if fits {
                out.amplitudes[j] = *z;
            } else if z.norm() > tol {
                return Err(Error::TruncationTooSmall {
                    dim: dims.iter().product(),
                    required: self.amplitudes.len(),
                    what: "reshape would drop populated levels".into(),
                });
            }
        }
        Ok(out)
    }
}

pub(crate) fn top_level_population(dims: &[usize], probs: &[f64]) -> f64 {
    let st = strides(dims);
    let mut total = 0.0;
    for (k, &d) in dims.iter().enumerate() {
        total += probs
            .iter()
            .enumerate()
            .filter(|(i, _)| (i / st[k]) % d == d - 1)
            .map(|(_, p)| p)
            .sum::<f64>();
    }
    total
}

/// Mixed state over a truncated Fock basis.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    dims: Vec<usize>,
    elements: DMatrix<C64>,
}

impl DensityMatrix {
    pub fn new(dims: Vec<usize>, elements: DMatrix<C64>) -> Result<Self> {
        check_dims(&dims)?;
        let len: usize = dims.iter().product();
        if elements.nrows() != len || elements.ncols() != len {
            return Err(Error::ShapeMismatch {
                expected: vec![len, len],
                found: vec![elements.nrows(), elements.ncols()],
            });
        }
        Ok(Self { dims, elements })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn n_modes(&self) -> usize {
        self.dims.len()
    }

    pub fn elements(&self) -> &DMatrix<C64> {
        &self.elements
    }

    pub fn trace(&self) -> f64 {
        linalg::trace(&self.elements).re
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        linalg::max_abs(&(&self.elements - self.elements.adjoint())) <= tol
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        linalg::hermitian_eigenvalues(&self.elements)
    }

    /// Unit-trace copy. Fails when the trace vanishes.
    pub fn normalized(&self) -> Result<Self> {
        let t = self.trace();
        if t <= 0.0 || !t.is_finite() {
            return Err(Error::invalid("cannot normalize a density matrix with zero trace"));
        }
        Ok(Self { dims: self.dims.clone(), elements: &self.elements * C64::new(1.0 / t, 0.0) })
    }

    /// `⟨ψ|ρ|ψ⟩`
    pub fn expectation_pure(&self, psi: &FockVector) -> Result<f64> {
        if psi.dims() != self.dims.as_slice() {
            return Err(Error::ShapeMismatch { expected: self.dims.clone(), found: psi.dims().to_vec() });
        }
        let v = psi.amplitudes();
        Ok(v.dotc(&(&self.elements * v)).re)
    }

    pub fn diagonal(&self) -> Vec<f64> {
        self.elements.diagonal().iter().map(|z| z.re).collect()
    }

    pub fn top_level_population(&self) -> f64 {
        top_level_population(&self.dims, &self.diagonal())
    }

    pub fn mean_number(&self, mode: usize) -> Result<f64> {
        check_modes(self.n_modes(), &[mode])?;
        let st = strides(&self.dims);
        let d = self.dims[mode];
        Ok(self
            .diagonal()
            .iter()
            .enumerate()
            .map(|(i, p)| ((i / st[mode]) % d) as f64 * p)
            .sum())
    }

    /// Partial trace keeping `keep` in the listed order.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix> {
        check_modes(self.n_modes(), keep)?;
        if keep.is_empty() {
            return Err(Error::invalid("partial trace must keep at least one mode"));
        }
        let rest = complement(self.n_modes(), keep);
        let ko = mode_offsets(&self.dims, keep);
        let ro = mode_offsets(&self.dims, &rest);
        let out = DMatrix::from_fn(ko.len(), ko.len(), |i, j| {
            ro.iter().map(|&r| self.elements[(ko[i] + r, ko[j] + r)]).sum()
        });
        Ok(DensityMatrix { dims: keep.iter().map(|&k| self.dims[k]).collect(), elements: out })
    }
}

/// Linear operator between truncated Fock spaces.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeOperator {
    dims_in: Vec<usize>,
    dims_out: Vec<usize>,
    elements: DMatrix<C64>,
}

impl ModeOperator {
    pub fn new(dims_in: Vec<usize>, dims_out: Vec<usize>, elements: DMatrix<C64>) -> Result<Self> {
        check_dims(&dims_in)?;
        check_dims(&dims_out)?;
        let (rows, cols) = (dims_out.iter().product::<usize>(), dims_in.iter().product::<usize>());
        if elements.nrows() != rows || elements.ncols() != cols {
            return Err(Error::ShapeMismatch {
                expected: vec![rows, cols],
                found: vec![elements.nrows(), elements.ncols()],
            });
        }
        Ok(Self { dims_in, dims_out, elements })
    }

    /// Square operator on `dims`.
    pub fn square(dims: Vec<usize>, elements: DMatrix<C64>) -> Result<Self> {
        Self::new(dims.clone(), dims, elements)
    }

    pub fn identity(dims: Vec<usize>) -> Result<Self> {
        let n = dims.iter().product();
        Self::square(dims, DMatrix::identity(n, n))
    }

    pub fn dims_in(&self) -> &[usize] {
        &self.dims_in
    }

    pub fn dims_out(&self) -> &[usize] {
        &self.dims_out
    }

    pub fn elements(&self) -> &DMatrix<C64> {
        &self.elements
    }

    pub fn adjoint(&self) -> ModeOperator {
        ModeOperator {
            dims_in: self.dims_out.clone(),
            dims_out: self.dims_in.clone(),
            elements: self.elements.adjoint(),
        }
    }

    /// Operator product `self · rhs`.
    pub fn compose(&self, rhs: &ModeOperator) -> Result<ModeOperator> {
        if self.dims_in != rhs.dims_out {
            return Err(Error::ShapeMismatch { expected: self.dims_in.clone(), found: rhs.dims_out.clone() });
        }
        Ok(ModeOperator {
            dims_in: rhs.dims_in.clone(),
            dims_out: self.dims_out.clone(),
            elements: &self.elements * &rhs.elements,
        })
    }

    /// `‖U†U − I‖_max`
    pub fn unitarity_residual(&self) -> f64 {
        let n = self.elements.ncols();
        linalg::max_abs(&(self.elements.adjoint() * &self.elements - DMatrix::identity(n, n)))
    }

    /// `‖U†U − I‖_max` restricted to input basis states whose every mode
    /// sits at least `margin` levels below its top level.
    pub fn unitarity_residual_below(&self, margin: usize) -> f64 {
        let g = self.elements.adjoint() * &self.elements;
        let st = strides(&self.dims_in);
        let inside = |i: usize| {
            self.dims_in
                .iter()
                .zip(&st)
                .all(|(&d, &s)| (i / s) % d + margin < d)
        };
        let mut worst = 0.0f64;
        for j in (0..g.ncols()).filter(|&j| inside(j)) {
            for i in (0..g.nrows()).filter(|&i| inside(i)) {
                let want = if i == j { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) };
                worst = worst.max((g[(i, j)] - want).norm());
            }
        }
        worst
    }
}

/// Effective coupling of a cascade of identical amplifiers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingParams {
    lambda: f64,
    n_amplifiers: usize,
}

impl CouplingParams {
    pub fn new(lambda: f64, n_amplifiers: usize) -> Result<Self> {
        Self::with_limit(lambda, n_amplifiers, DEFAULT_LAMBDA_MAX)
    }

    pub fn with_limit(lambda: f64, n_amplifiers: usize, lambda_max: f64) -> Result<Self> {
        check_lambda(lambda, lambda_max)?;
        if n_amplifiers == 0 {
            return Err(Error::invalid("at least one amplifier is required"));
        }
        Ok(Self { lambda, n_amplifiers })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn n_amplifiers(&self) -> usize {
        self.n_amplifiers
    }
}

pub(crate) fn check_lambda(lambda: f64, lambda_max: f64) -> Result<()> {
    if !lambda.is_finite() || lambda < 0.0 || lambda >= lambda_max {
        return Err(Error::invalid(format!("lambda {lambda} outside [0, {lambda_max})")));
    }
    Ok(())
}

/// Ladder operator `a` with `⟨n−1|a|n⟩ = √n`.
pub fn annihilation(dim: usize) -> Result<ModeOperator> {
    check_dims(&[dim])?;
    let m = DMatrix::from_fn(dim, dim, |i, j| {
        if j == i + 1 {
            C64::new((j as f64).sqrt(), 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    ModeOperator::square(vec![dim], m)
}

pub fn creation(dim: usize) -> Result<ModeOperator> {
    Ok(annihilation(dim)?.adjoint())
}

/// Smallest dimension that holds a coherent state of amplitude `|alpha|`
/// under the default guard `|α|² + 6|α| + 10`.
pub fn coherent_guard(alpha: C64) -> usize {
    let r = alpha.norm();
    (r * r + 6.0 * r + 10.0).ceil() as usize
}

/// Default signal truncation `⌈|α|²⌉ + 8⌈|α|⌉ + 12`.
pub fn default_signal_dim(alpha: C64) -> usize {
    let r = alpha.norm();
    (r * r).ceil() as usize + 8 * r.ceil() as usize + 12
}

/// Default idler truncation in the perturbative regime.
pub const DEFAULT_IDLER_DIM: usize = 4;

pub(crate) fn check_guard(dim: usize, required: usize, what: &str) -> Result<()> {
    if dim < required {
        return Err(Error::TruncationTooSmall { dim, required, what: what.to_string() });
    }
    Ok(())
}

/// Displacement operator `exp(α a† − α* a)` on a truncated mode.
pub fn displacement(dim: usize, alpha: C64) -> Result<ModeOperator> {
    check_dims(&[dim])?;
    check_guard(dim, coherent_guard(alpha), "displacement")?;
    displacement_unguarded(dim, alpha)
}

/// [`displacement`] without the truncation guard.
pub fn displacement_unguarded(dim: usize, alpha: C64) -> Result<ModeOperator> {
    let a = annihilation(dim)?;
    let ad = a.adjoint();
    let generator = ad.elements() * alpha - a.elements() * alpha.conj();
    ModeOperator::square(vec![dim], linalg::expm(&generator))
}

/// Laguerre polynomial `L_m(x)` from its finite sum
/// `Σ_{n=0}^{m} (−1)^n x^n m! / ((n!)² (m−n)!)`.
pub fn laguerre(m: usize, x: f64) -> f64 {
    let mut total = 0.0;
    // term_n = (−x)^n C(m, n) / n!, built incrementally
    let mut term = 1.0;
    for n in 0..=m {
        total += term;
        if n < m {
            term *= -x * (m - n) as f64 / ((n + 1) as f64 * (n + 1) as f64);
        }
    }
    total
}

/// Kronecker product of states in listed order.
pub fn tensor(parts: &[&FockVector]) -> Result<FockVector> {
    let (first, rest) = parts
        .split_first()
        .ok_or_else(|| Error::invalid("tensor of an empty list"))?;
    let mut dims = first.dims.clone();
    let mut amps = first.amplitudes.clone();
    for p in rest {
        dims.extend_from_slice(&p.dims);
        amps = linalg::kron_vec(&amps, &p.amplitudes);
    }
    FockVector::new(dims, amps)
}

/// Kronecker product of operators in listed order.
pub fn tensor_op(parts: &[&ModeOperator]) -> Result<ModeOperator> {
    let (first, rest) = parts
        .split_first()
        .ok_or_else(|| Error::invalid("tensor of an empty list"))?;
    let mut out = (*first).clone();
    for p in rest {
        out.dims_in.extend_from_slice(&p.dims_in);
        out.dims_out.extend_from_slice(&p.dims_out);
        out.elements = linalg::kron(&out.elements, &p.elements);
    }
    Ok(out)
}

/// Matrix-vector product; no renormalization.
pub fn apply(op: &ModeOperator, state: &FockVector) -> Result<FockVector> {
    if op.dims_in != state.dims {
        return Err(Error::ShapeMismatch { expected: op.dims_in.clone(), found: state.dims.clone() });
    }
    FockVector::new(op.dims_out.clone(), &op.elements * &state.amplitudes)
}

/// Conjugation `U ρ U†`.
pub fn apply_dm(op: &ModeOperator, rho: &DensityMatrix) -> Result<DensityMatrix> {
    if op.dims_in != rho.dims {
        return Err(Error::ShapeMismatch { expected: op.dims_in.clone(), found: rho.dims.clone() });
    }
    DensityMatrix::new(op.dims_out.clone(), &op.elements * &rho.elements * op.elements.adjoint())
}

/// Applies a square operator acting on `modes` (in the listed order) of a
/// larger state, leaving the other modes untouched.
pub fn apply_on_modes(op: &ModeOperator, modes: &[usize], state: &FockVector) -> Result<FockVector> {
    check_modes(state.n_modes(), modes)?;
    let local: Vec<usize> = modes.iter().map(|&m| state.dims[m]).collect();
    if op.dims_in != local || op.dims_out != local {
        return Err(Error::ShapeMismatch { expected: local, found: op.dims_in.clone() });
    }
    let rest = complement(state.n_modes(), modes);
    let lo = mode_offsets(&state.dims, modes);
    let ro = mode_offsets(&state.dims, &rest);
    let mut out = DVector::<C64>::zeros(state.amplitudes.len());
    let mut buf = DVector::<C64>::zeros(lo.len());
    for &r in &ro {
        for (k, &l) in lo.iter().enumerate() {
            buf[k] = state.amplitudes[r + l];
        }
        let res = &op.elements * &buf;
        for (k, &l) in lo.iter().enumerate() {
            out[r + l] = res[k];
        }
    }
    FockVector::new(state.dims.clone(), out)
}
