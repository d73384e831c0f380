//! Conditional measurement on idler modes with ideal photon-number-resolving
//! detectors.
//!
//! A [`HeraldPattern`] names the idler modes of a state and the detector
//! outcome(s) accepted. Projection returns the outcome probability together
//! with the normalized conditional state. Patterns that accept a class of
//! outcomes (any single click, any pair of clicks) keep the heralded idlers
//! as two-level modes in the conditional state, so the idler part can be
//! compared directly with W-type states.

use nalgebra::DVector;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::fock::{self, DensityMatrix, FockVector};
use crate::states::factorial;

/// Accepted detector outcome(s). Idler positions are indices into
/// [`HeraldPattern::idlers`], not state mode indices.
#[derive(Debug, Clone, PartialEq)]
pub enum HeraldKind {
    /// One exact photon count per idler.
    ExactCounts(Vec<usize>),
    /// Every outcome with exactly `clicks` of the idlers in `among` holding
    /// one photon each and every other idler empty. `None` means all idlers.
    Clicks { clicks: usize, among: Option<Vec<usize>> },
    /// One photon in each idler of the pair, vacuum elsewhere.
    CoincidencePair(usize, usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct HeraldPattern {
    /// State mode index of each idler.
    pub idlers: Vec<usize>,
    pub kind: HeraldKind,
}

impl HeraldPattern {
    pub fn exact(idlers: Vec<usize>, counts: Vec<usize>) -> Self {
        Self { idlers, kind: HeraldKind::ExactCounts(counts) }
    }

    pub fn any_single_click(idlers: Vec<usize>) -> Self {
        Self::clicks(idlers, 1)
    }

    pub fn clicks(idlers: Vec<usize>, clicks: usize) -> Self {
        Self { idlers, kind: HeraldKind::Clicks { clicks, among: None } }
    }

    pub fn coincidence(idlers: Vec<usize>, pair: (usize, usize)) -> Self {
        Self { idlers, kind: HeraldKind::CoincidencePair(pair.0, pair.1) }
    }

    /// Restricts a click-class pattern to a subset of idler positions; the
    /// remaining idlers must be empty.
    pub fn among(mut self, subset: Vec<usize>) -> Self {
        if let HeraldKind::Clicks { among, .. } = &mut self.kind {
            *among = Some(subset);
        }
        self
    }

    fn validate(&self, dims: &[usize]) -> Result<()> {
        if self.idlers.is_empty() {
            return Err(Error::invalid("herald pattern names no idler modes"));
        }
        for (k, &m) in self.idlers.iter().enumerate() {
            if m >= dims.len() {
                return Err(Error::invalid(format!("idler mode {m} out of range for {} modes", dims.len())));
            }
            if self.idlers[..k].contains(&m) {
                return Err(Error::invalid(format!("idler mode {m} listed twice")));
            }
        }
        if self.idlers.len() == dims.len() {
            return Err(Error::invalid("every mode is an idler; no signal left to herald"));
        }
        let n = self.idlers.len();
        match &self.kind {
            HeraldKind::ExactCounts(counts) => {
                if counts.len() != n {
                    return Err(Error::invalid(format!("{} counts for {n} idlers", counts.len())));
                }
                for (&c, &m) in counts.iter().zip(&self.idlers) {
                    if c >= dims[m] {
                        return Err(Error::OutOfRange { n: c, dim: dims[m] });
                    }
                }
            }
            HeraldKind::Clicks { clicks, among } => {
                let subset = self.click_subset();
                if let Some(a) = among {
                    for (k, &i) in a.iter().enumerate() {
                        if i >= n || a[..k].contains(&i) {
                            return Err(Error::invalid(format!("invalid idler position {i} in click subset")));
                        }
                    }
                }
                if *clicks == 0 || *clicks > subset.len() {
                    return Err(Error::invalid(format!("{clicks} clicks among {} idlers", subset.len())));
                }
            }
            HeraldKind::CoincidencePair(i, j) => {
                if i == j || *i >= n || *j >= n {
                    return Err(Error::invalid(format!("invalid coincidence pair ({i}, {j}) for {n} idlers")));
                }
            }
        }
        Ok(())
    }

    fn click_subset(&self) -> Vec<usize> {
        match &self.kind {
            HeraldKind::Clicks { among: Some(a), .. } => a.clone(),
            _ => (0..self.idlers.len()).collect(),
        }
    }
}

/// Outcome of a herald projection.
#[derive(Debug, Clone, PartialEq)]
pub struct HeraldResult {
    pub probability: f64,
    /// Normalized conditional state: the signal modes for exact patterns,
    /// signal modes followed by the heralded idlers (two levels each) for
    /// click classes. `None` when the outcome never occurs.
    pub conditional: Option<FockVector>,
    /// Reduced state of the signal modes.
    pub signal: Option<DensityMatrix>,
    /// Reduced state of the heralded idlers (click classes only).
    pub idler: Option<DensityMatrix>,
    /// State mode indices of the signal modes, in order.
    pub signal_modes: Vec<usize>,
}

impl HeraldResult {
    pub fn is_defined(&self) -> bool {
        self.conditional.is_some()
    }

    /// `⟨ψ|ρ_signal|ψ⟩`
    pub fn signal_fidelity(&self, target: &FockVector) -> Result<Option<f64>> {
        self.signal.as_ref().map(|rho| rho.expectation_pure(target)).transpose()
    }

    /// `⟨ψ|ρ_idler|ψ⟩`
    pub fn idler_fidelity(&self, target: &FockVector) -> Result<Option<f64>> {
        self.idler.as_ref().map(|rho| rho.expectation_pure(target)).transpose()
    }

    /// `|⟨ψ|conditional⟩|²`
    pub fn conditional_fidelity(&self, target: &FockVector) -> Result<Option<f64>> {
        self.conditional.as_ref().map(|c| Ok(c.inner(target)?.norm_sqr())).transpose()
    }

    /// Pure conditional signal state, available when the pattern accepts a
    /// single outcome.
    pub fn signal_state(&self) -> Option<&FockVector> {
        match &self.conditional {
            Some(c) if c.n_modes() == self.signal_modes.len() => Some(c),
            _ => None,
        }
    }
}

/// Signal-mode block of `state` for one exact idler outcome.
fn signal_block(state: &FockVector, idlers: &[usize], counts: &[usize], signal_offsets: &[usize]) -> DVector<C64> {
    let st = fock::strides(state.dims());
    let base: usize = idlers.iter().zip(counts).map(|(&m, &c)| c * st[m]).sum();
    DVector::from_iterator(signal_offsets.len(), signal_offsets.iter().map(|&o| state.amplitudes()[base + o]))
}

/// Projects `state` onto the outcomes accepted by `pattern`.
pub fn project(state: &FockVector, pattern: &HeraldPattern) -> Result<HeraldResult> {
    pattern.validate(state.dims())?;
    let dims = state.dims();
    let signal_modes = fock::complement(dims.len(), &pattern.idlers);
    let signal_dims: Vec<usize> = signal_modes.iter().map(|&m| dims[m]).collect();
    let offsets = fock::mode_offsets(dims, &signal_modes);
    let n_idlers = pattern.idlers.len();

    let undefined = |probability: f64| HeraldResult {
        probability,
        conditional: None,
        signal: None,
        idler: None,
        signal_modes: signal_modes.clone(),
    };

    let exact_counts = match &pattern.kind {
        HeraldKind::ExactCounts(c) => Some(c.clone()),
        HeraldKind::CoincidencePair(i, j) => {
            let mut c = vec![0; n_idlers];
            c[*i] = 1;
            c[*j] = 1;
            Some(c)
        }
        HeraldKind::Clicks { .. } => None,
    };

    if let Some(counts) = exact_counts {
        let block = signal_block(state, &pattern.idlers, &counts, &offsets);
        let probability = block.norm_squared();
        if probability == 0.0 {
            return Ok(undefined(0.0));
        }
        let cond = FockVector::new(signal_dims, block)?.normalized()?;
        return Ok(HeraldResult {
            probability,
            signal: Some(cond.to_density()),
            conditional: Some(cond),
            idler: None,
            signal_modes,
        });
    }

    let HeraldKind::Clicks { clicks, .. } = pattern.kind else { unreachable!() };
    let subset = pattern.click_subset();
    let q = subset.len();
    let sig_len = offsets.len();
    let mut joint = DVector::<C64>::zeros(sig_len << q);
    let mut probability = 0.0;
    for bits in (0usize..1 << q).filter(|b| b.count_ones() as usize == clicks) {
        let mut counts = vec![0; n_idlers];
        for (k, &pos) in subset.iter().enumerate() {
            // first listed idler is the most significant qubit
            if bits >> (q - 1 - k) & 1 == 1 {
                counts[pos] = 1;
            }
        }
        let block = signal_block(state, &pattern.idlers, &counts, &offsets);
        probability += block.norm_squared();
        for (s, z) in block.iter().enumerate() {
            joint[(s << q) | bits] = *z;
        }
    }
    if probability == 0.0 {
        return Ok(undefined(0.0));
    }
    let mut joint_dims = signal_dims;
    joint_dims.extend(std::iter::repeat(2).take(q));
    let cond = FockVector::new(joint_dims, joint)?.normalized()?;
    let n_sig = signal_modes.len();
    let signal = cond.reduced(&(0..n_sig).collect::<Vec<_>>())?;
    let idler = cond.reduced(&(n_sig..n_sig + q).collect::<Vec<_>>())?;
    Ok(HeraldResult {
        probability,
        conditional: Some(cond),
        signal: Some(signal),
        idler: Some(idler),
        signal_modes,
    })
}

/// Projection onto one photon in each idler of `pair`, vacuum elsewhere.
pub fn coincidence_select(state: &FockVector, idlers: Vec<usize>, pair: (usize, usize)) -> Result<HeraldResult> {
    project(state, &HeraldPattern::coincidence(idlers, pair))
}

/// Probability of every exact idler outcome, in row-major outcome order.
pub fn outcome_distribution(state: &FockVector, idlers: &[usize]) -> Result<Vec<(Vec<usize>, f64)>> {
    let probe = HeraldPattern::exact(idlers.to_vec(), vec![0; idlers.len()]);
    probe.validate(state.dims())?;
    let dims = state.dims();
    let signal_modes = fock::complement(dims.len(), idlers);
    let offsets = fock::mode_offsets(dims, &signal_modes);
    let idler_dims: Vec<usize> = idlers.iter().map(|&m| dims[m]).collect();
    let total: usize = idler_dims.iter().product();
    let ist = fock::strides(&idler_dims);
    Ok((0..total)
        .map(|flat| {
            let counts: Vec<usize> = idler_dims.iter().zip(&ist).map(|(&d, &s)| (flat / s) % d).collect();
            let p = signal_block(state, idlers, &counts, &offsets).norm_squared();
            (counts, p)
        })
        .collect())
}

/// Literal reference value `N λ^{2m} m! L_m(−|α|²)` for the rate of
/// heralding `m` added photons with `N` amplifiers.
pub fn herald_probability_reference(n: usize, m: usize, alpha: C64, lambda: f64) -> Result<f64> {
    if m > n {
        return Err(Error::invalid(format!("cannot herald {m} photons with {n} amplifiers")));
    }
    Ok(n as f64 * added_photon_weight(m, alpha, lambda))
}

/// Alternative reference `C(N, m) λ^{2m} m! L_m(−|α|²)` counting the
/// distinct m-click patterns.
pub fn combinatorial_probability_reference(n: usize, m: usize, alpha: C64, lambda: f64) -> Result<f64> {
    if m > n {
        return Err(Error::invalid(format!("cannot herald {m} photons with {n} amplifiers")));
    }
    Ok(binomial(n, m) * added_photon_weight(m, alpha, lambda))
}

/// `λ^{2m} m! L_m(−|α|²)`
fn added_photon_weight(m: usize, alpha: C64, lambda: f64) -> f64 {
    lambda.powi(2 * m as i32) * factorial(m) * fock::laguerre(m, -alpha.norm_sqr())
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::amplifier::{evolve_cascade, CascadeLayout};
    use crate::states::{coherent, fock as fock_state, pacs, w_state};

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn cascade(alpha: f64, n: usize, lambda: f64) -> FockVector {
        let dim = fock::default_signal_dim(c(alpha));
        let layout = CascadeLayout::uniform(dim, n, lambda).unwrap();
        evolve_cascade(&layout.input(&coherent(dim, c(alpha)).unwrap()).unwrap(), &layout).unwrap()
    }

    fn idlers(n: usize) -> Vec<usize> {
        (1..=n).collect()
    }

    #[test]
    fn no_amplifier_means_no_click() {
        let input = CascadeLayout::uniform(21, 2, 0.01).unwrap().input(&coherent(21, c(1.0)).unwrap()).unwrap();
        let r = project(&input, &HeraldPattern::any_single_click(idlers(2))).unwrap();
        assert_eq!(r.probability, 0.0);
        assert!(!r.is_defined());
        assert_eq!(r.signal_fidelity(&pacs(21, c(1.0), 1).unwrap()).unwrap(), None);
    }

    #[test]
    fn single_amplifier_rate() {
        let state = cascade(1.0, 1, 0.01);
        let r = project(&state, &HeraldPattern::exact(vec![1], vec![1])).unwrap();
        assert!((r.probability / 1e-4 - 2.0).abs() < 1e-3);
        assert!(r.signal_state().is_some());
    }

    #[test]
    fn three_amplifiers_form_w_state() {
        let state = cascade(1.0, 3, 0.01);
        let r = project(&state, &HeraldPattern::any_single_click(idlers(3))).unwrap();
        let dim = state.dims()[0];
        assert!(r.idler_fidelity(&w_state(3).unwrap()).unwrap().unwrap() >= 0.9999);
        assert!(r.signal_fidelity(&pacs(dim, c(1.0), 1).unwrap()).unwrap().unwrap() >= 0.9999);
        assert!(r.signal_state().is_none());
    }

    #[test]
    fn reference_formula() {
        let alpha = c(1.3);
        let lambda = 0.02;
        let p11 = herald_probability_reference(1, 1, alpha, lambda).unwrap();
        assert!((p11 - lambda * lambda * (1.0 + 1.69)).abs() < 1e-15);
        for n in 1..6 {
            let pn1 = herald_probability_reference(n, 1, alpha, lambda).unwrap();
            assert!((pn1 - n as f64 * p11).abs() < 1e-15);
        }
        assert!((herald_probability_reference(1, 1, c(0.0), 0.01).unwrap() - 1e-4).abs() < 1e-18);
        let p22 = herald_probability_reference(2, 2, c(1.0), 0.01).unwrap();
        assert!((p22 - 1.4e-7).abs() < 1e-20);
        assert!(herald_probability_reference(1, 2, c(1.0), 0.01).is_err());
        assert!((combinatorial_probability_reference(2, 2, c(1.0), 0.01).unwrap() - 7e-8).abs() < 1e-20);
    }

    #[test]
    fn measured_double_click_matches_pattern_count() {
        // exact cascade: p_2^2 ≈ 7e-8 = C(2,2)·λ⁴·2·L_2(−1), half the literal N-prefactor value
        let state = cascade(1.0, 2, 0.01);
        let measured = project(&state, &HeraldPattern::clicks(idlers(2), 2)).unwrap().probability;
        let comb = combinatorial_probability_reference(2, 2, c(1.0), 0.01).unwrap();
        let with_n = herald_probability_reference(2, 2, c(1.0), 0.01).unwrap();
        assert!((measured / comb - 1.0).abs() < 0.01);
        assert!((measured / with_n - 0.5).abs() < 0.01);
    }

    #[test]
    fn coincidence_gives_two_photon_addition() {
        let state = cascade(1.0, 2, 0.01);
        let dim = state.dims()[0];
        let r = coincidence_select(&state, idlers(2), (0, 1)).unwrap();
        assert!(r.signal_fidelity(&pacs(dim, c(1.0), 2).unwrap()).unwrap().unwrap() >= 0.999);
    }

    #[test]
    fn coincidence_probability_scales_as_lambda_fourth() {
        let p = |lambda| coincidence_select(&cascade(1.0, 2, lambda), idlers(2), (0, 1)).unwrap().probability;
        let ratio = p(0.02) / p(0.01);
        assert!((ratio / 16.0 - 1.0).abs() < 0.05, "ratio {ratio}");
    }

    #[test]
    fn coincidence_on_vacuum_input() {
        let state = cascade(0.0, 2, 0.01);
        let dim = state.dims()[0];
        let r = coincidence_select(&state, idlers(2), (0, 1)).unwrap();
        // a†²|0⟩ has squared norm 2
        assert!((r.probability / (2.0 * 1e-8) - 1.0).abs() < 0.01);
        assert!(r.signal_fidelity(&fock_state(dim, 2).unwrap()).unwrap().unwrap() >= 0.999);
    }

    #[test]
    fn outcome_probabilities_sum_to_one() {
        let state = cascade(1.5, 3, 0.05);
        let dist = outcome_distribution(&state, &idlers(3)).unwrap();
        assert_eq!(dist.len(), 64);
        let total: f64 = dist.iter().map(|(_, p)| p).sum();
        assert!((total - 1.0).abs() < 1e-10);
    }

    #[test]
    fn which_detector_is_indistinguishable() {
        let lambda = 0.01;
        let state = cascade(1.0, 4, lambda);
        let signals: Vec<FockVector> = (0..4)
            .map(|k| {
                let mut counts = vec![0; 4];
                counts[k] = 1;
                project(&state, &HeraldPattern::exact(idlers(4), counts))
                    .unwrap()
                    .signal_state()
                    .unwrap()
                    .clone()
            })
            .collect();
        for a in &signals {
            for b in &signals {
                assert!(a.inner(b).unwrap().norm_sqr() >= 1.0 - 10.0 * lambda * lambda);
            }
        }
    }

    #[test]
    fn pattern_validation() {
        let state = cascade(1.0, 2, 0.01);
        assert!(project(&state, &HeraldPattern::exact(vec![1, 2], vec![1])).is_err());
        assert!(project(&state, &HeraldPattern::exact(vec![1, 2], vec![4, 0])).is_err());
        assert!(project(&state, &HeraldPattern::coincidence(vec![1, 2], (1, 1))).is_err());
        assert!(project(&state, &HeraldPattern::coincidence(vec![1, 2], (0, 2))).is_err());
        assert!(project(&state, &HeraldPattern::clicks(vec![1, 2], 3)).is_err());
        assert!(project(&state, &HeraldPattern::any_single_click(vec![0, 1, 2])).is_err());
        assert!(project(&state, &HeraldPattern::any_single_click(vec![1, 3])).is_err());
        assert!(project(&state, &HeraldPattern::any_single_click(vec![1, 2]).among(vec![0, 0])).is_err());
    }

    #[test]
    fn restricted_click_class_keeps_other_idlers_empty() {
        let state = cascade(1.0, 3, 0.01);
        let r = project(&state, &HeraldPattern::any_single_click(idlers(3)).among(vec![0, 1])).unwrap();
        assert_eq!(r.conditional.as_ref().unwrap().dims().len(), 3);
        assert!(r.idler_fidelity(&w_state(2).unwrap()).unwrap().unwrap() > 0.9999);
        // two of the three single-click outcomes
        let full = project(&state, &HeraldPattern::any_single_click(idlers(3))).unwrap();
        assert!((r.probability / full.probability - 2.0 / 3.0).abs() < 1e-3);
    }
}
