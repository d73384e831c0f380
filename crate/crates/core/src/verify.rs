//! Built-in end-to-end checks of the heralding scheme, run by `spacs verify`.
//!
//! Every check builds its own scenario, so the suite needs no input files.
//! A check either passes or fails; some also print reported-only
//! comparisons that never fail the run on their own.

use std::fmt;
use std::time::Instant;

use num_complex::Complex64 as C64;

use crate::amplifier::{self, CascadeLayout, LEAKAGE_LIMIT};
use crate::analysis::{self, GridSpec};
use crate::error::Result;
use crate::fock::{self, FockVector};
use crate::herald::{self, HeraldPattern};
use crate::scenarios::{self, HeraldSpec, Output, ScenarioConfig, ScenarioKind};
use crate::states;
use crate::thermal;

const LAMBDA: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
}

/// Outcome of one numbered check. `lines` carry the measured values.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub id: usize,
    pub title: &'static str,
    pub status: Status,
    pub lines: Vec<String>,
}

impl Check {
    fn new(id: usize, title: &'static str) -> Self {
        Self { id, title, status: Status::Pass, lines: Vec::new() }
    }

    /// Records an asserted comparison; a false `ok` fails the check.
    fn assert(&mut self, ok: bool, line: String) {
        if !ok {
            self.status = Status::Fail;
        }
        self.lines.push(format!("[{}] {line}", if ok { "ok" } else { "FAIL" }));
    }

    fn report(&mut self, line: String) {
        self.lines.push(format!("[info] {line}"));
    }

    fn fail_with(&mut self, err: crate::error::Error) {
        self.assert(false, format!("error: {err}"));
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Verification {
    pub checks: Vec<Check>,
    pub seconds: f64,
}

impl Verification {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }
}

impl fmt::Display for Verification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            let tag = if c.passed() { "PASS" } else { "FAIL" };
            writeln!(f, "{tag}  {:>2}. {}", c.id, c.title)?;
            for l in &c.lines {
                writeln!(f, "        {l}")?;
            }
        }
        let passed = self.checks.iter().filter(|c| c.passed()).count();
        writeln!(f, "{passed}/{} checks passed in {:.1} s", self.checks.len(), self.seconds)
    }
}

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

fn cascade(alpha: f64, n: usize) -> ScenarioConfig {
    let mut cfg = ScenarioConfig::new(if n == 1 { ScenarioKind::Single } else { ScenarioKind::Cascade }, c(alpha), LAMBDA);
    if n > 1 {
        cfg.n_amplifiers = Some(n);
    }
    cfg.analyses = Some(vec![scenarios::Analysis::FidelityTargets]);
    cfg
}

fn pure_output(cfg: &ScenarioConfig) -> Result<(FockVector, ScenarioConfig)> {
    let sim = scenarios::simulate(cfg)?;
    match sim.output {
        Output::Pure(v) => Ok((v, sim.config)),
        Output::Mixed(_) => unreachable!("pure kinds only"),
    }
}

fn within(x: f64, target: f64, rel: f64) -> bool {
    ((x - target) / target).abs() <= rel
}

fn guarded(mut check: Check, body: impl FnOnce(&mut Check) -> Result<()>) -> Check {
    if let Err(e) = body(&mut check) {
        check.fail_with(e);
    }
    check
}

/// Single-click probability against `λ²(1 + |α|²)`.
pub fn herald_law() -> Check {
    guarded(Check::new(1, "single-amplifier herald law p = λ²(1+|α|²)"), |ck| {
        for alpha in [0.0, 1.0, 2.0] {
            let mut cfg = cascade(alpha, 1);
            cfg.truncations.signal = Some(fock::default_signal_dim(c(alpha)).max(30));
            let r = scenarios::run(&cfg)?;
            let ratio = r.heralds[0].probability / (LAMBDA * LAMBDA * (1.0 + alpha * alpha));
            ck.assert((0.999..=1.001).contains(&ratio), format!("α={alpha}: p/λ²(1+|α|²) = {ratio:.6}"));
        }
        Ok(())
    })
}

/// Any-single-click probability of N amplifiers against N times one.
pub fn cascade_enhancement() -> Check {
    guarded(Check::new(2, "cascade enhancement p_N = N p_1"), |ck| {
        let p1 = scenarios::run(&cascade(1.0, 1))?.heralds[0].probability;
        for n in [2, 3, 4] {
            let pn = scenarios::run(&cascade(1.0, n))?.heralds[0].probability;
            let ratio = pn / p1;
            ck.assert(within(ratio, n as f64, 1e-3), format!("N={n}: p_N/p_1 = {ratio:.6}"));
        }
        Ok(())
    })
}

pub fn spacs_fidelity() -> Check {
    guarded(Check::new(3, "heralded signal vs photon-added coherent state"), |ck| {
        let floor = 1.0 - 10.0 * LAMBDA * LAMBDA;
        for alpha in [0.5, 1.0, 2.0] {
            let r = scenarios::run(&cascade(alpha, 1))?;
            let f = r.heralds[0].fidelities["pacs"].unwrap_or(0.0);
            ck.assert(f >= floor, format!("α={alpha}: F = {f:.8} (floor {floor})"));
        }
        Ok(())
    })
}

pub fn w_state_formation() -> Check {
    guarded(Check::new(4, "W state in the idlers, indistinguishable signal"), |ck| {
        for n in [2, 3, 4] {
            let cfg = cascade(1.0, n);
            let r = scenarios::run(&cfg)?;
            let f = r.heralds[0].fidelities["w-state"].unwrap_or(0.0);
            ck.assert(f >= 0.999, format!("N={n}: idler F(W_N) = {f:.8}"));

            let (out, _) = pure_output(&cfg)?;
            let idlers: Vec<usize> = (1..=n).collect();
            let signals = (0..n)
                .map(|k| {
                    let mut counts = vec![0; n];
                    counts[k] = 1;
                    let res = herald::project(&out, &HeraldPattern::exact(idlers.clone(), counts))?;
                    Ok(res.conditional.expect("each detector fires at λ > 0"))
                })
                .collect::<Result<Vec<_>>>()?;
            let mut worst = 1.0f64;
            for i in 0..n {
                for j in i + 1..n {
                    worst = worst.min(analysis::fidelity(&signals[i], &signals[j])?);
                }
            }
            ck.assert(worst >= 0.999, format!("N={n}: worst pairwise per-detector signal F = {worst:.12}"));
        }
        Ok(())
    })
}

pub fn two_photon_structure() -> Check {
    guarded(Check::new(5, "two-photon structure: N=2 coincidence and N=3 two clicks"), |ck| {
        let mut cfg = cascade(1.0, 2);
        cfg.herald = Some(HeraldSpec::Coincidence { pair: [0, 1] });
        let r = scenarios::run(&cfg)?;
        let f = r.herald("custom").and_then(|h| h.fidelities["pacs"]).unwrap_or(0.0);
        ck.assert(f >= 0.999, format!("N=2 coincidence: signal F(|α,2⟩) = {f:.8}"));

        let mut cfg = cascade(1.0, 3);
        cfg.herald = Some(HeraldSpec::Clicks { clicks: 2, among: None });
        let r = scenarios::run(&cfg)?;
        let f = r.herald("custom").and_then(|h| h.fidelities["ii3"]).unwrap_or(0.0);
        ck.assert(f >= 0.999, format!("N=3 two clicks: idler F(II_3) = {f:.8}"));
        Ok(())
    })
}

pub fn two_photon_prefactor() -> Check {
    guarded(Check::new(6, "two-photon herald rate: N·(...) vs C(N,m)·(...)"), |ck| {
        for n in [2, 3] {
            let mut cfg = cascade(1.0, n);
            cfg.herald = Some(HeraldSpec::Clicks { clicks: 2, among: None });
            let r = scenarios::run(&cfg)?;
            let h = r.herald("custom").expect("custom herald");
            let (with_n, comb) = (h.references["n-prefactor"], h.references["combinatorial"]);
            ck.report(format!(
                "p_{n}^2 measured {:.6e}; N·λ⁴·2!·L_2 = {with_n:.6e} (ratio {:.4}); C(N,2)·λ⁴·2!·L_2 = {comb:.6e} (ratio {:.4})",
                h.probability,
                h.probability / with_n,
                h.probability / comb
            ));
            let ok = within(h.probability, with_n, 0.05) || within(h.probability, comb, 0.05);
            ck.assert(ok, format!("p_{n}^2 within 5% of at least one candidate"));
        }
        Ok(())
    })
}

pub fn ecs_dual_channel() -> Check {
    guarded(Check::new(7, "entangled coherent input, two channels"), |ck| {
        let cfg = ScenarioConfig::new(ScenarioKind::EcsDual, c(1.0), LAMBDA);
        let r = scenarios::run(&cfg)?;
        let up = r.herald("upper").expect("upper herald");
        let low = r.herald("lower").expect("lower herald");
        let fu = up.fidelities["espacs-upper"].unwrap_or(0.0);
        let fl = low.fidelities["espacs-lower"].unwrap_or(0.0);
        ck.assert(fu >= 0.999, format!("upper herald: F(ESPACS-I) = {fu:.8}"));
        ck.assert(fl >= 0.999, format!("lower herald: F(ESPACS-II) = {fl:.8}"));
        if let Some(f) = up.fidelities.get("espacs-epr").copied().flatten() {
            ck.report(format!("upper herald joint state vs ESPACS-I ⊗ EPR: F = {f:.8}"));
        }
        let ratio = up.probability / low.probability;
        let first_order = up.references["first-order"] / low.references["first-order"];
        ck.report(format!(
            "first-order ratio 2(1+⟨n_us⟩)/(1+⟨n_ds⟩) = {first_order:.6}; orthogonal-branch ratio = {:.6}",
            up.references["orthogonal-branches"] / low.references["orthogonal-branches"]
        ));
        ck.assert(within(ratio, 2.0, 1e-2), format!("upper/lower probability ratio = {ratio:.6} (target 2)"));
        Ok(())
    })
}

pub fn thermal_amplification() -> Check {
    guarded(Check::new(8, "thermal input: amplified rate, degraded state"), |ck| {
        let grid = [0.0, 0.05, 0.1, 0.2];
        let dim = thermal::default_thermal_dim(c(1.0), grid[grid.len() - 1]);
        let runs = grid
            .iter()
            .map(|&n| thermal::thermal_spacs(dim, fock::DEFAULT_IDLER_DIM, c(1.0), n, LAMBDA))
            .collect::<Result<Vec<_>>>()?;
        let probs: Vec<f64> = runs.iter().map(|h| h.probability).collect();
        let fids: Vec<f64> = runs.iter().map(|h| h.spacs_fidelity.unwrap_or(f64::NAN)).collect();
        ck.assert(
            probs.windows(2).all(|w| w[1] > w[0]),
            format!("probability strictly increasing: {}", list(&probs, true)),
        );
        ck.assert(
            fids.windows(2).all(|w| w[1] < w[0]),
            format!("fidelity to ideal state strictly decreasing: {}", list(&fids, false)),
        );
        for (k, &nbar) in grid.iter().enumerate().skip(1) {
            let (u, _) = thermal::bogoliubov_coeffs(nbar)?;
            let ratio = probs[k] / probs[0];
            ck.report(format!(
                "n̄={nbar}: p(n̄)/p(0) = {ratio:.6}; u = {u:.6} (rel {:+.2e}); u² = {:.6} (rel {:+.2e})",
                ratio / u - 1.0,
                u * u,
                ratio / (u * u) - 1.0
            ));
            ck.assert(
                within(ratio, u, 0.05) || within(ratio, u * u, 0.05),
                format!("n̄={nbar}: ratio within 5% of u or u²"),
            );
        }
        Ok(())
    })
}

fn list(xs: &[f64], scientific: bool) -> String {
    xs.iter()
        .map(|x| if scientific { format!("{x:.6e}") } else { format!("{x:.8}") })
        .collect::<Vec<_>>()
        .join(", ")
}

pub fn nonclassicality() -> Check {
    guarded(Check::new(9, "nonclassicality witnesses"), |ck| {
        let q = analysis::mandel_q(&states::pacs(fock::default_signal_dim(c(1.0)), c(1.0), 1)?)?.unwrap_or(f64::NAN);
        ck.assert(q < 0.0, format!("Mandel Q of |1,1⟩ = {q:.6}"));
        let w = analysis::wigner_point(&states::fock(10, 1)?.to_density(), 0.0, 0.0);
        let target = -2.0 / std::f64::consts::PI;
        ck.assert((w - target).abs() <= 1e-6, format!("W(0,0) of |1⟩ = {w:.9} (target {target:.9})"));
        let r = scenarios::simulate(&cascade(0.1, 1))?;
        let rho = r.heralds[0].outcome.signal().expect("heralded state").clone();
        let grid = analysis::wigner(&rho, &GridSpec::default())?;
        ck.assert(grid.min() < 0.0, format!("heralded α=0.1 state: min W = {:.6}", grid.min()));
        Ok(())
    })
}

pub fn numerics_hygiene() -> Check {
    guarded(Check::new(10, "numerics hygiene"), |ck| {
        let ds = fock::default_signal_dim(c(1.0));
        let u = amplifier::amplifier_unitary(ds, fock::DEFAULT_IDLER_DIM, LAMBDA)?;
        let res = u.unitarity_residual();
        ck.assert(res <= 1e-8, format!("amplifier unitarity residual = {res:.3e}"));

        let layout = CascadeLayout::uniform(ds, 4, LAMBDA)?;
        let out = amplifier::evolve_cascade(&layout.input(&states::coherent(ds, c(1.0))?)?, &layout)?;
        let leak = out.top_level_population();
        ck.assert(leak <= LEAKAGE_LIMIT, format!("N=4 cascade leakage = {leak:.3e}"));

        let mut worst = 0.0f64;
        for i in 0..=50 {
            let x = -25.0 * i as f64 / 50.0;
            for m in 1..10 {
                let lhs = (m + 1) as f64 * fock::laguerre(m + 1, x);
                let rhs = (2 * m + 1) as f64 * fock::laguerre(m, x) - x * fock::laguerre(m, x) - m as f64 * fock::laguerre(m - 1, x);
                worst = worst.max((lhs - rhs).abs() / lhs.abs().max(1.0));
            }
        }
        ck.assert(worst <= 1e-10, format!("Laguerre recurrence residual (m ≤ 10) = {worst:.3e}"));

        let cfg = cascade(1.0, 2);
        let a = scenarios::run(&cfg)?.to_canonical_json();
        let b = scenarios::run(&cfg)?.to_canonical_json();
        ck.assert(a == b, format!("canonical report identical across two runs ({} bytes)", a.len()));
        Ok(())
    })
}

/// Runs every check in order.
pub fn run_all() -> Verification {
    let start = Instant::now();
    let checks = vec![
        herald_law(),
        cascade_enhancement(),
        spacs_fidelity(),
        w_state_formation(),
        two_photon_structure(),
        two_photon_prefactor(),
        ecs_dual_channel(),
        thermal_amplification(),
        nonclassicality(),
        numerics_hygiene(),
    ];
    Verification { checks, seconds: start.elapsed().as_secs_f64() }
}
