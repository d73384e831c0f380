//! State diagnostics: fidelity, Wigner function, Mandel Q, photon-number
//! distribution and entanglement entropy.
//!
//! Wigner convention: `W(β) = (2/π) Tr[ρ D(β) Π D(β)†]` with `Π` the photon
//! parity and `β = x + i p`, i.e. `x = (a + a†)/2`, `p = (a − a†)/2i`. With
//! this choice `W(0) = ±2/π` for the vacuum and the one-photon state and
//! `∫ W dx dp = 1`.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::fock::{DensityMatrix, FockVector};
use crate::linalg;

/// Eigenvalues in `[−CLIP, 0)` are treated as zero before taking logs.
pub const EIGEN_CLIP: f64 = 1e-9;

/// Borrowed pure or mixed state.
#[derive(Debug, Clone, Copy)]
pub enum StateRef<'a> {
    Pure(&'a FockVector),
    Mixed(&'a DensityMatrix),
}

impl<'a> From<&'a FockVector> for StateRef<'a> {
    fn from(v: &'a FockVector) -> Self {
        StateRef::Pure(v)
    }
}

impl<'a> From<&'a DensityMatrix> for StateRef<'a> {
    fn from(r: &'a DensityMatrix) -> Self {
        StateRef::Mixed(r)
    }
}

impl StateRef<'_> {
    pub fn dims(&self) -> &[usize] {
        match self {
            StateRef::Pure(v) => v.dims(),
            StateRef::Mixed(r) => r.dims(),
        }
    }

    fn density(&self) -> DensityMatrix {
        match self {
            StateRef::Pure(v) => v.to_density(),
            StateRef::Mixed(r) => (*r).clone(),
        }
    }

    fn single_mode_density(&self) -> Result<DensityMatrix> {
        if self.dims().len() != 1 {
            return Err(Error::NotSingleMode { dims: self.dims().to_vec() });
        }
        Ok(self.density())
    }
}

/// `|⟨a|b⟩|²` for pure states, `⟨ψ|ρ|ψ⟩` for pure/mixed pairs and the
/// Uhlmann fidelity `(Tr √(√ρ σ √ρ))² = ‖√ρ √σ‖₁²` for two mixed states.
pub fn fidelity<'a, 'b>(a: impl Into<StateRef<'a>>, b: impl Into<StateRef<'b>>) -> Result<f64> {
    let (a, b) = (a.into(), b.into());
    if a.dims() != b.dims() {
        return Err(Error::ShapeMismatch { expected: a.dims().to_vec(), found: b.dims().to_vec() });
    }
    match (a, b) {
        (StateRef::Pure(x), StateRef::Pure(y)) => Ok(x.inner(y)?.norm_sqr()),
        (StateRef::Pure(x), StateRef::Mixed(r)) | (StateRef::Mixed(r), StateRef::Pure(x)) => r.expectation_pure(x),
        (StateRef::Mixed(r), StateRef::Mixed(s)) => {
            let prod = linalg::psd_sqrt(r.elements()) * linalg::psd_sqrt(s.elements());
            let nuclear: f64 = prod.singular_values().iter().sum();
            Ok(nuclear * nuclear)
        }
    }
}

/// `½ Tr|ρ − σ|`
pub fn trace_distance(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    if a.dims() != b.dims() {
        return Err(Error::ShapeMismatch { expected: a.dims().to_vec(), found: b.dims().to_vec() });
    }
    let diff = a.elements() - b.elements();
    Ok(0.5 * linalg::hermitian_eigenvalues(&diff).iter().map(|l| l.abs()).sum::<f64>())
}

/// Phase-space window and sampling of a Wigner grid. Both ends are
/// included, so `nx` points span `[x_min, x_max]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub p_min: f64,
    pub p_max: f64,
    pub nx: usize,
    pub np: usize,
}

impl GridSpec {
    /// Square grid `[−half, half]²` with `n` points per axis.
    pub fn square(half: f64, n: usize) -> Self {
        Self { x_min: -half, x_max: half, p_min: -half, p_max: half, nx: n, np: n }
    }

    fn validate(&self) -> Result<()> {
        if self.nx < 2 || self.np < 2 {
            return Err(Error::invalid("a Wigner grid needs at least 2 points per axis"));
        }
        if !(self.x_max > self.x_min) || !(self.p_max > self.p_min) {
            return Err(Error::invalid("empty Wigner grid range"));
        }
        Ok(())
    }

    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / (self.nx - 1) as f64
    }

    pub fn dp(&self) -> f64 {
        (self.p_max - self.p_min) / (self.np - 1) as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x_min + i as f64 * self.dx()
    }

    pub fn p(&self, j: usize) -> f64 {
        self.p_min + j as f64 * self.dp()
    }
}

impl Default for GridSpec {
    fn default() -> Self {
        Self::square(4.0, 81)
    }
}

/// Sampled Wigner function; `values[j][i]` is `W(x_i, p_j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct WignerGrid {
    pub spec: GridSpec,
    pub values: Vec<Vec<f64>>,
}

impl WignerGrid {
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[j][i]
    }

    /// `Σ W Δx Δp`
    pub fn integral(&self) -> f64 {
        self.values.iter().flatten().sum::<f64>() * self.spec.dx() * self.spec.dp()
    }

    pub fn min(&self) -> f64 {
        self.values.iter().flatten().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().flatten().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// `∫ W dp` at each grid `x`.
    pub fn x_marginal(&self) -> Vec<f64> {
        (0..self.spec.nx)
            .map(|i| self.values.iter().map(|row| row[i]).sum::<f64>() * self.spec.dp())
            .collect()
    }

    /// CSV with header `x,p,w`, rows ordered p-major then x, LF endings.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,p,w\n");
        for (j, row) in self.values.iter().enumerate() {
            for (i, w) in row.iter().enumerate() {
                out.push_str(&format!(
                    "{},{},{}\n",
                    crate::canonical::format_float(self.spec.x(i)),
                    crate::canonical::format_float(self.spec.p(j)),
                    crate::canonical::format_float(*w)
                ));
            }
        }
        out
    }
}

/// Wigner function of a single-mode density matrix at `β = x + ip`, summed
/// with the Fock-basis recurrence for the cross-Wigner functions of
/// `|m⟩⟨n|`.
pub fn wigner_point(rho: &DensityMatrix, x: f64, p: f64) -> f64 {
    let el = rho.elements();
    let dim = el.nrows();
    let beta = C64::new(x, p);
    let two_beta = beta * 2.0;
    let two_beta_conj = beta.conj() * 2.0;
    let mut wl: Vec<C64> = vec![C64::new(0.0, 0.0); dim];
    wl[0] = C64::new(2.0 / PI * (-2.0 * beta.norm_sqr()).exp(), 0.0);
    let mut w = el[(0, 0)].re * wl[0].re;
    for n in 1..dim {
        wl[n] = two_beta * wl[n - 1] / (n as f64).sqrt();
        w += 2.0 * (el[(0, n)] * wl[n]).re;
    }
    for m in 1..dim {
        let sm = (m as f64).sqrt();
        let mut temp = wl[m];
        wl[m] = (two_beta_conj * temp - wl[m - 1] * sm) / sm;
        w += (el[(m, m)] * wl[m]).re;
        for n in (m + 1)..dim {
            let next = (two_beta * wl[n - 1] - temp * sm) / (n as f64).sqrt();
            temp = wl[n];
            wl[n] = next;
            w += 2.0 * (el[(m, n)] * wl[n]).re;
        }
    }
    w
}

pub fn wigner<'a>(state: impl Into<StateRef<'a>>, spec: &GridSpec) -> Result<WignerGrid> {
    spec.validate()?;
    let rho = state.into().single_mode_density()?;
    let values = (0..spec.np)
        .map(|j| (0..spec.nx).map(|i| wigner_point(&rho, spec.x(i), spec.p(j))).collect())
        .collect();
    Ok(WignerGrid { spec: *spec, values })
}

/// `p_n = ⟨n|ρ|n⟩` of a single-mode state.
pub fn photon_distribution<'a>(state: impl Into<StateRef<'a>>) -> Result<Vec<f64>> {
    match state.into() {
        StateRef::Pure(v) if v.n_modes() == 1 => Ok(v.amplitudes().iter().map(|z| z.norm_sqr()).collect()),
        StateRef::Mixed(r) if r.n_modes() == 1 => Ok(r.diagonal()),
        s => Err(Error::NotSingleMode { dims: s.dims().to_vec() }),
    }
}

/// `(⟨n²⟩ − ⟨n⟩²)/⟨n⟩ − 1`, or `None` for the vacuum.
pub fn mandel_q<'a>(state: impl Into<StateRef<'a>>) -> Result<Option<f64>> {
    let dist = photon_distribution(state)?;
    let (mut m1, mut m2) = (0.0, 0.0);
    for (n, p) in dist.iter().enumerate() {
        let n = n as f64;
        m1 += n * p;
        m2 += n * n * p;
    }
    if m1 == 0.0 {
        return Ok(None);
    }
    Ok(Some((m2 - m1 * m1) / m1 - 1.0))
}

/// Base-2 von Neumann entropy.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    rho.eigenvalues()
        .into_iter()
        .map(|l| if l < 0.0 && l >= -EIGEN_CLIP { 0.0 } else { l })
        .filter(|&l| l > 0.0)
        .map(|l| -l * l.log2())
        .sum()
}

/// Entropy of the reduced state on `partition` of a pure multimode state.
pub fn entanglement_entropy(state: &FockVector, partition: &[usize]) -> Result<f64> {
    if partition.is_empty() || partition.len() >= state.n_modes() {
        return Err(Error::invalid("partition must be a nonempty proper subset of the modes"));
    }
    Ok(von_neumann_entropy(&state.reduced(partition)?))
}

/// Normalized oscillator eigenfunctions `⟨x|n⟩` for the quadrature
/// `x = (a + a†)/2`, `n < dim`.
fn quadrature_basis(dim: usize, x: f64) -> Vec<f64> {
    let y = 2f64.sqrt() * x;
    let scale = 2f64.powf(0.25);
    let mut h = vec![0.0; dim];
    h[0] = PI.powf(-0.25) * (-y * y / 2.0).exp();
    if dim > 1 {
        h[1] = 2f64.sqrt() * y * h[0];
    }
    for n in 1..dim.saturating_sub(1) {
        let nf = n as f64;
        h[n + 1] = (2.0 / (nf + 1.0)).sqrt() * y * h[n] - (nf / (nf + 1.0)).sqrt() * h[n - 1];
    }
    h.iter().map(|v| v * scale).collect()
}

/// Probability density of the quadrature `x = (a + a†)/2` at each point.
pub fn quadrature_distribution<'a>(state: impl Into<StateRef<'a>>, xs: &[f64]) -> Result<Vec<f64>> {
    let rho = state.into().single_mode_density()?;
    let el = rho.elements();
    let dim = el.nrows();
    Ok(xs
        .iter()
        .map(|&x| {
            let phi = quadrature_basis(dim, x);
            let mut total = 0.0;
            for m in 0..dim {
                for n in 0..dim {
                    total += (el[(m, n)] * phi[m] * phi[n]).re;
                }
            }
            total
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{apply_dm, displacement_unguarded};
    use crate::states::{coherent, fock, pacs, thermal, w_state};

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    /// Independent route: displace ρ back to the origin by matrix
    /// exponential and sum the parity-weighted populations.
    fn wigner_by_parity(rho: &DensityMatrix, x: f64, p: f64, pad: usize) -> f64 {
        let dim = rho.dims()[0];
        let big = dim + pad;
        let mut el = nalgebra::DMatrix::<C64>::zeros(big, big);
        el.view_mut((0, 0), (dim, dim)).copy_from(rho.elements());
        let rho_big = DensityMatrix::new(vec![big], el).unwrap();
        let d = displacement_unguarded(big, -C64::new(x, p)).unwrap();
        let shifted = apply_dm(&d, &rho_big).unwrap();
        let parity: f64 = shifted.diagonal().iter().enumerate().map(|(n, v)| if n % 2 == 0 { *v } else { -*v }).sum();
        2.0 / PI * parity
    }

    #[test]
    fn fidelity_basics() {
        let a = coherent(20, C64::new(0.4, 0.3)).unwrap();
        assert!((fidelity(&a, &a).unwrap() - 1.0).abs() < 1e-14);
        assert_eq!(fidelity(&fock(5, 1).unwrap(), &fock(5, 2).unwrap()).unwrap(), 0.0);
        assert!(fidelity(&fock(5, 1).unwrap(), &fock(6, 1).unwrap()).is_err());
    }

    #[test]
    fn spacs_overlap_with_coherent_is_half() {
        // ⟨α|a†|α⟩ = α*, so |⟨α|α,1⟩|² = |α|²/(1+|α|²) = 1/2 at α = 1
        let f = fidelity(&pacs(40, c(1.0), 1).unwrap(), &coherent(40, c(1.0)).unwrap()).unwrap();
        let brute: C64 = pacs(40, c(1.0), 1)
            .unwrap()
            .amplitudes()
            .iter()
            .zip(coherent(40, c(1.0)).unwrap().amplitudes().iter())
            .map(|(x, y)| x.conj() * y)
            .sum();
        assert!((brute.norm_sqr() - 0.5).abs() < 1e-10);
        assert!((f - 0.5).abs() < 1e-10);
    }

    #[test]
    fn mixed_fidelity_routes_agree() {
        let psi = coherent(15, c(0.7)).unwrap();
        let rho = thermal(15, 0.3).unwrap();
        let pm = fidelity(&psi, &rho).unwrap();
        let mm = fidelity(&psi.to_density(), &rho).unwrap();
        assert!((pm - mm).abs() < 1e-9);
        let uhl = fidelity(&rho, &rho).unwrap();
        assert!((uhl - 1.0).abs() < 1e-9);
    }

    #[test]
    fn wigner_origin_values() {
        let spec = GridSpec::square(1.0, 3);
        let vac = wigner(&fock(10, 0).unwrap(), &spec).unwrap();
        assert!((vac.at(1, 1) - 2.0 / PI).abs() < 1e-12);
        assert!((vac.at(1, 1) - 0.63662).abs() < 1e-5);
        let one = wigner(&fock(10, 1).unwrap(), &spec).unwrap();
        assert!((one.at(1, 1) + 2.0 / PI).abs() < 1e-12);
    }

    #[test]
    fn small_amplitude_spacs_is_negative_at_origin() {
        let rho = pacs(20, c(0.1), 1).unwrap().to_density();
        let w = wigner_point(&rho, 0.0, 0.0);
        // series oracle (2/π) Σ (−1)^n ⟨n|ρ|n⟩ at β = 0
        let series: f64 = rho.diagonal().iter().enumerate().map(|(n, v)| if n % 2 == 0 { *v } else { -*v }).sum::<f64>() * 2.0 / PI;
        assert!((w - series).abs() < 1e-12);
        assert!(w < 0.0);
    }

    #[test]
    fn recurrence_matches_displaced_parity() {
        let alpha = C64::new(0.6, -0.4);
        let states = [
            coherent(25, alpha).unwrap().to_density(),
            pacs(25, alpha, 1).unwrap().to_density(),
            thermal(25, 0.2).unwrap(),
        ];
        for rho in &states {
            for &(x, p) in &[(0.0, 0.0), (0.3, -0.2), (-0.7, 0.5), (1.1, 0.9)] {
                let a = wigner_point(rho, x, p);
                let b = wigner_by_parity(rho, x, p, 30);
                assert!((a - b).abs() < 1e-9, "({x},{p}) {a} vs {b}");
            }
        }
    }

    #[test]
    fn coherent_state_peaks_at_alpha() {
        let alpha = C64::new(1.0, 0.5);
        let rho = coherent(30, alpha).unwrap().to_density();
        assert!((wigner_point(&rho, 1.0, 0.5) - 2.0 / PI).abs() < 1e-8);
        assert!(wigner_point(&rho, 1.0, -0.5) < 0.1);
    }

    #[test]
    fn wigner_rejects_multimode() {
        let w = w_state(2).unwrap();
        assert!(matches!(wigner(&w, &GridSpec::default()), Err(Error::NotSingleMode { .. })));
    }

    #[test]
    fn grid_normalization_and_marginal() {
        let spec = GridSpec::square(6.0, 121);
        let xs: Vec<f64> = (0..spec.nx).map(|i| spec.x(i)).collect();
        let candidates = [
            fock(30, 0).unwrap().to_density(),
            pacs(30, c(1.0), 1).unwrap().to_density(),
            coherent(30, C64::new(1.2, 0.8)).unwrap().to_density(),
            fock(30, 4).unwrap().to_density(),
        ];
        for rho in &candidates {
            let grid = wigner(rho, &spec).unwrap();
            assert!((grid.integral() - 1.0).abs() < 0.02);
            let marginal = grid.x_marginal();
            let exact = quadrature_distribution(rho, &xs).unwrap();
            let l1: f64 = marginal.iter().zip(&exact).map(|(a, b)| (a - b).abs()).sum::<f64>() * spec.dx();
            assert!(l1 < 0.01, "L1 {l1}");
        }
    }

    #[test]
    fn csv_layout() {
        let grid = wigner(&fock(4, 0).unwrap(), &GridSpec::square(1.0, 2)).unwrap();
        let csv = grid.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "x,p,w");
        assert_eq!(lines.len(), 5);
        assert!(lines[1].starts_with("-1.0000000000000000e0,-1.0000000000000000e0,"));
        assert!(lines[2].starts_with("1.0000000000000000e0,-1.0000000000000000e0,"));
        assert!(!csv.contains('\r'));
    }

    #[test]
    fn mandel_q_values() {
        assert!(mandel_q(&coherent(40, c(1.0)).unwrap()).unwrap().unwrap().abs() < 1e-8);
        assert!((mandel_q(&fock(5, 1).unwrap()).unwrap().unwrap() + 1.0).abs() < 1e-14);
        assert_eq!(mandel_q(&fock(5, 0).unwrap()).unwrap(), None);
        let q = mandel_q(&pacs(40, c(1.0), 1).unwrap()).unwrap().unwrap();
        // oracle: moments of p_n = e^{−1} n / (n−1)! / 2 (n ≥ 1)
        let mut fact = 1.0;
        let (mut m1, mut m2) = (0.0, 0.0);
        for n in 1..60usize {
            if n > 1 {
                fact *= (n - 1) as f64;
            }
            let p = (-1.0f64).exp() * n as f64 / fact / 2.0;
            m1 += n as f64 * p;
            m2 += (n * n) as f64 * p;
        }
        let oracle = (m2 - m1 * m1) / m1 - 1.0;
        assert!((q - oracle).abs() < 1e-10);
        assert!(q > -1.0 && q < 0.0);
    }

    #[test]
    fn spacs_q_rises_toward_zero() {
        let qs: Vec<f64> = [0.5, 1.0, 2.0, 4.0]
            .iter()
            .map(|&a| mandel_q(&pacs(60, c(a), 1).unwrap()).unwrap().unwrap())
            .collect();
        for w in qs.windows(2) {
            assert!(w[0] < w[1]);
        }
        assert!(qs[3] < 0.0);
    }

    #[test]
    fn distributions() {
        let d = photon_distribution(&fock(4, 2).unwrap()).unwrap();
        assert_eq!(d, vec![0.0, 0.0, 1.0, 0.0]);
        let d = photon_distribution(&coherent(30, c(1.0)).unwrap()).unwrap();
        assert!((d[0] - 0.36788).abs() < 1e-5);
        let d = photon_distribution(&pacs(30, c(1.0), 1).unwrap()).unwrap();
        assert_eq!(d[0], 0.0);
        assert!((d[1] - (-1.0f64).exp() / 2.0).abs() < 1e-10);
        assert!((d.iter().sum::<f64>() - 1.0).abs() < 1e-10);
        assert!(photon_distribution(&w_state(2).unwrap()).is_err());
    }

    #[test]
    fn entropies() {
        let prod = crate::fock::tensor(&[&coherent(14, c(0.5)).unwrap(), &fock(3, 1).unwrap()]).unwrap();
        assert!(entanglement_entropy(&prod, &[0]).unwrap().abs() < 1e-10);
        assert!((entanglement_entropy(&w_state(2).unwrap(), &[0]).unwrap() - 1.0).abs() < 1e-12);
        let h = -(1.0f64 / 3.0) * (1.0f64 / 3.0).log2() - (2.0f64 / 3.0) * (2.0f64 / 3.0).log2();
        assert!((entanglement_entropy(&w_state(3).unwrap(), &[0]).unwrap() - h).abs() < 1e-12);
        assert!((h - 0.91830).abs() < 1e-5);
        assert!(entanglement_entropy(&w_state(3).unwrap(), &[]).is_err());
        assert!(entanglement_entropy(&w_state(3).unwrap(), &[0, 1, 2]).is_err());
    }

    #[test]
    fn entropy_bounded_by_subsystem_size() {
        for n in 2..=5 {
            let w = w_state(n).unwrap();
            for k in 1..n {
                let part: Vec<usize> = (0..k).collect();
                let s = entanglement_entropy(&w, &part).unwrap();
                let bound = (((1usize << k).min(1 << (n - k))) as f64).log2();
                assert!(s >= 0.0 && s <= bound + 1e-9);
            }
        }
    }
}
