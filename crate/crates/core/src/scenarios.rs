//! Declarative scenarios.
//!
//! A [`ScenarioConfig`] names one of four set-ups: a single amplifier, an
//! N-amplifier cascade sharing one signal, the two-channel set-up fed by an
//! entangled coherent state, or one amplifier with a displaced thermal
//! input. [`run`] builds the input, evolves it, applies the heralds and
//! returns a [`ScenarioReport`] whose canonical JSON form is byte-stable.
//!
//! Mode order is fixed per kind:
//!
//! | kind      | modes                                   |
//! |-----------|-----------------------------------------|
//! | single    | signal, idler                           |
//! | cascade   | signal, idler 1..N                      |
//! | ecs-dual  | upper signal, lower signal, upper idlers, lower idlers |
//! | thermal   | signal, idler (density matrix)          |

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::amplifier::{self, Coupling, LEAKAGE_LIMIT};
use crate::analysis::{self, GridSpec, StateRef, WignerGrid};
use crate::canonical;
use crate::error::{Error, Result};
use crate::fock::{self, DensityMatrix, FockVector, DEFAULT_IDLER_DIM, DEFAULT_LAMBDA_MAX};
use crate::herald::{self, HeraldPattern, HeraldResult};
use crate::states;
use crate::thermal;

pub const SCHEMA_VERSION: u32 = 1;
pub const REPORT_SCHEMA: &str = "spacs-sim/report/v1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScenarioKind {
    Single,
    Cascade,
    EcsDual,
    Thermal,
}

/// Complex amplitude, written in configs either as a real number or as
/// `[re, im]`. Always serialized as `[re, im]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Amplitude(pub C64);

impl Amplitude {
    pub fn real(re: f64) -> Self {
        Self(C64::new(re, 0.0))
    }
}

impl Serialize for Amplitude {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        [self.0.re, self.0.im].serialize(s)
    }
}

impl<'de> Deserialize<'de> for Amplitude {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Real(f64),
            Pair([f64; 2]),
        }
        match Raw::deserialize(d).map_err(|_| serde::de::Error::custom("expected a number or [re, im]"))? {
            Raw::Real(re) => Ok(Self(C64::new(re, 0.0))),
            Raw::Pair([re, im]) => Ok(Self(C64::new(re, im))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Analysis {
    FidelityTargets,
    Wigner,
    MandelQ,
    Entropy,
    Distribution,
}

impl Analysis {
    pub const ALL: [Analysis; 5] =
        [Analysis::FidelityTargets, Analysis::Wigner, Analysis::MandelQ, Analysis::Entropy, Analysis::Distribution];
}

/// Per-mode truncation overrides. Every signal mode shares `signal`, every
/// idler shares `idler`.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Truncations {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub signal: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub idler: Option<usize>,
}

/// Detector outcome(s) to condition on. Idler positions count from zero
/// over the idler modes of the scenario, in mode order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum HeraldSpec {
    Exact {
        counts: Vec<usize>,
    },
    AnySingleClick,
    Clicks {
        clicks: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        among: Option<Vec<usize>>,
    },
    Coincidence {
        pair: [usize; 2],
    },
}

impl HeraldSpec {
    pub fn to_pattern(&self, idler_modes: &[usize]) -> HeraldPattern {
        let idlers = idler_modes.to_vec();
        match self {
            HeraldSpec::Exact { counts } => HeraldPattern::exact(idlers, counts.clone()),
            HeraldSpec::AnySingleClick => HeraldPattern::any_single_click(idlers),
            HeraldSpec::Clicks { clicks, among } => {
                let p = HeraldPattern::clicks(idlers, *clicks);
                match among {
                    Some(a) => p.among(a.clone()),
                    None => p,
                }
            }
            HeraldSpec::Coincidence { pair } => HeraldPattern::coincidence(idlers, (pair[0], pair[1])),
        }
    }

    /// Number of added photons the pattern heralds, with the number of idlers
    /// it may come from and whether several click patterns are accepted.
    fn photon_count(&self, n_idlers: usize) -> (usize, usize, bool) {
        match self {
            HeraldSpec::Exact { counts } => (counts.iter().sum(), 1, false),
            HeraldSpec::AnySingleClick => (1, n_idlers, true),
            HeraldSpec::Clicks { clicks, among } => (*clicks, among.as_ref().map_or(n_idlers, Vec::len), true),
            HeraldSpec::Coincidence { .. } => (2, 1, false),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WignerTarget {
    /// Signal state after a herald.
    #[default]
    Heralded,
    /// Signal input before the amplifiers.
    Input,
}

/// Phase-space grid and target of the Wigner analysis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WignerConfig {
    #[serde(default)]
    pub target: WignerTarget,
    /// Herald entry whose signal is plotted; the first entry by default.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub herald: Option<String>,
    /// Signal mode kept when the target has several modes.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<usize>,
    #[serde(default = "default_low")]
    pub x_min: f64,
    #[serde(default = "default_high")]
    pub x_max: f64,
    #[serde(default = "default_low")]
    pub p_min: f64,
    #[serde(default = "default_high")]
    pub p_max: f64,
    #[serde(default = "default_points")]
    pub nx: usize,
    #[serde(default = "default_points")]
    pub np: usize,
}

fn default_low() -> f64 {
    GridSpec::default().x_min
}

fn default_high() -> f64 {
    GridSpec::default().x_max
}

fn default_points() -> usize {
    GridSpec::default().nx
}

impl Default for WignerConfig {
    fn default() -> Self {
        let g = GridSpec::default();
        Self {
            target: WignerTarget::Heralded,
            herald: None,
            mode: None,
            x_min: g.x_min,
            x_max: g.x_max,
            p_min: g.p_min,
            p_max: g.p_max,
            nx: g.nx,
            np: g.np,
        }
    }
}

impl WignerConfig {
    pub fn grid(&self) -> GridSpec {
        GridSpec { x_min: self.x_min, x_max: self.x_max, p_min: self.p_min, p_max: self.p_max, nx: self.nx, np: self.np }
    }
}

/// One simulation set-up. Unset optional fields take kind-specific
/// defaults, which [`ScenarioConfig::resolved`] fills in.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub schema_version: u32,
    pub kind: ScenarioKind,
    pub alpha: Amplitude,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<Amplitude>,
    pub lambda: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda_max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_amplifiers: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub upper_n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lower_n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nbar: Option<f64>,
    #[serde(default)]
    pub truncations: Truncations,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub analyses: Option<Vec<Analysis>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub herald: Option<HeraldSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wigner: Option<WignerConfig>,
}

impl ScenarioConfig {
    /// Minimal config of the given kind; kind-specific fields get the
    /// defaults of the two-channel and thermal set-ups.
    pub fn new(kind: ScenarioKind, alpha: C64, lambda: f64) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            kind,
            alpha: Amplitude(alpha),
            beta: (kind == ScenarioKind::EcsDual).then_some(Amplitude(alpha)),
            lambda,
            lambda_max: None,
            n_amplifiers: (kind == ScenarioKind::Cascade).then_some(2),
            upper_n: None,
            lower_n: None,
            nbar: (kind == ScenarioKind::Thermal).then_some(0.0),
            truncations: Truncations::default(),
            analyses: None,
            herald: None,
            wigner: None,
        }
    }

    /// Parses JSON text; errors carry the path of the offending field.
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let cfg: Self = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            Error::config(path, e.into_inner().to_string())
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_canonical_json(&self) -> String {
        canonical::to_canonical_json(&serde_json::to_value(self).expect("configs always serialize"))
    }

    /// Structural checks: schema version and the fields each kind requires
    /// or forbids. Numerical guards run later, inside [`run`].
    pub fn validate(&self) -> Result<()> {
        use ScenarioKind::*;
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::config(
                "schema_version",
                format!("unsupported schema version {} (expected {SCHEMA_VERSION})", self.schema_version),
            ));
        }
        let only = |present: bool, field: &str, kinds: &[ScenarioKind]| -> Result<()> {
            if present && !kinds.contains(&self.kind) {
                return Err(Error::config(field, format!("`{field}` does not apply to kind {}", self.kind)));
            }
            Ok(())
        };
        only(self.beta.is_some(), "beta", &[EcsDual])?;
        only(self.upper_n.is_some(), "upper_n", &[EcsDual])?;
        only(self.lower_n.is_some(), "lower_n", &[EcsDual])?;
        only(self.nbar.is_some(), "nbar", &[Thermal])?;
        only(self.n_amplifiers.is_some(), "n_amplifiers", &[Single, Cascade])?;
        match self.kind {
            Single => {
                if self.n_amplifiers.is_some_and(|n| n != 1) {
                    return Err(Error::config("n_amplifiers", "kind single has exactly one amplifier"));
                }
            }
            Cascade => match self.n_amplifiers {
                None => return Err(Error::config("n_amplifiers", "kind cascade requires `n_amplifiers`")),
                Some(0) => return Err(Error::config("n_amplifiers", "a cascade needs at least one amplifier")),
                _ => {}
            },
            EcsDual => {
                if self.beta.is_none() {
                    return Err(Error::config("beta", "kind ecs-dual requires `beta`"));
                }
                for (field, n) in [("upper_n", self.upper_n), ("lower_n", self.lower_n)] {
                    if n == Some(0) {
                        return Err(Error::config(field, "each channel needs at least one amplifier"));
                    }
                }
            }
            Thermal => {
                if self.nbar.is_none() {
                    return Err(Error::config("nbar", "kind thermal requires `nbar`"));
                }
                if let Some(h) = &self.herald {
                    if !matches!(h, HeraldSpec::Exact { counts } if counts.len() == 1) {
                        return Err(Error::config("herald", "kind thermal accepts only an exact count on its one idler"));
                    }
                }
            }
        }
        if let Some(w) = &self.wigner {
            if w.nx < 2 || w.np < 2 {
                return Err(Error::config("wigner", "a Wigner grid needs at least 2 points per axis"));
            }
        }
        Ok(())
    }

    fn max_amplitude(&self) -> f64 {
        let b = self.beta.map_or(0.0, |b| b.0.norm());
        self.alpha.0.norm().max(b)
    }

    /// Copy with every default made explicit: truncations, coupling limit,
    /// channel counts, analyses and Wigner grid.
    pub fn resolved(&self) -> Result<Self> {
        self.validate()?;
        let mut out = self.clone();
        let signal = match self.kind {
            ScenarioKind::Thermal => {
                let nbar = self.nbar.unwrap_or(0.0);
                if !(nbar >= 0.0) || !nbar.is_finite() {
                    return Err(Error::invalid(format!("mean thermal occupation {nbar} must be >= 0")));
                }
                thermal::default_thermal_dim(self.alpha.0, nbar)
            }
            _ => fock::default_signal_dim(C64::new(self.max_amplitude(), 0.0)),
        };
        out.truncations.signal = Some(self.truncations.signal.unwrap_or(signal));
        out.truncations.idler = Some(self.truncations.idler.unwrap_or(DEFAULT_IDLER_DIM));
        out.lambda_max = Some(self.lambda_max.unwrap_or(DEFAULT_LAMBDA_MAX));
        match self.kind {
            ScenarioKind::Single => out.n_amplifiers = Some(1),
            ScenarioKind::EcsDual => {
                out.upper_n = Some(self.upper_n.unwrap_or(2));
                out.lower_n = Some(self.lower_n.unwrap_or(1));
            }
            _ => {}
        }
        let mut analyses = self.analyses.clone().unwrap_or_else(|| Analysis::ALL.to_vec());
        analyses.sort();
        analyses.dedup();
        out.analyses = Some(analyses);
        out.wigner = Some(self.wigner.clone().unwrap_or_default());
        Ok(out)
    }

    fn signal_dim(&self) -> usize {
        self.truncations.signal.expect("resolved config")
    }

    fn idler_dim(&self) -> usize {
        self.truncations.idler.expect("resolved config")
    }

    fn wants(&self, a: Analysis) -> bool {
        self.analyses.as_ref().is_some_and(|v| v.contains(&a))
    }
}

impl fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ScenarioKind::Single => "single",
            ScenarioKind::Cascade => "cascade",
            ScenarioKind::EcsDual => "ecs-dual",
            ScenarioKind::Thermal => "thermal",
        })
    }
}

/// Evolved state of a scenario.
#[derive(Debug, Clone, PartialEq)]
pub enum Output {
    Pure(FockVector),
    Mixed(DensityMatrix),
}

impl Output {
    pub fn leakage(&self) -> f64 {
        match self {
            Output::Pure(v) => v.top_level_population(),
            Output::Mixed(r) => r.top_level_population(),
        }
    }
}

/// Result of one herald.
#[derive(Debug, Clone, PartialEq)]
pub enum HeraldOutcome {
    Pure(HeraldResult),
    Mixed { probability: f64, signal: Option<DensityMatrix> },
}

impl HeraldOutcome {
    pub fn probability(&self) -> f64 {
        match self {
            HeraldOutcome::Pure(r) => r.probability,
            HeraldOutcome::Mixed { probability, .. } => *probability,
        }
    }

    /// Reduced state of the signal modes, `None` when the outcome never occurs.
    pub fn signal(&self) -> Option<&DensityMatrix> {
        match self {
            HeraldOutcome::Pure(r) => r.signal.as_ref(),
            HeraldOutcome::Mixed { signal, .. } => signal.as_ref(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HeraldRun {
    pub name: String,
    pub spec: HeraldSpec,
    pub outcome: HeraldOutcome,
}

/// Every intermediate state of a scenario, before it is summarized.
#[derive(Debug, Clone, PartialEq)]
pub struct Simulation {
    pub config: ScenarioConfig,
    /// Signal modes before the amplifiers.
    pub input_signal: DensityMatrix,
    pub output: Output,
    pub heralds: Vec<HeraldRun>,
    pub signal_labels: Vec<&'static str>,
    pub idler_modes: Vec<usize>,
}

fn default_heralds(cfg: &ScenarioConfig) -> Vec<(String, HeraldSpec)> {
    let mut out = match cfg.kind {
        ScenarioKind::Single | ScenarioKind::Cascade => vec![("any-single-click".to_string(), HeraldSpec::AnySingleClick)],
        ScenarioKind::EcsDual => {
            let up = cfg.upper_n.expect("resolved config");
            let low = cfg.lower_n.expect("resolved config");
            vec![
                ("upper".to_string(), HeraldSpec::Clicks { clicks: 1, among: Some((0..up).collect()) }),
                ("lower".to_string(), HeraldSpec::Clicks { clicks: 1, among: Some((up..up + low).collect()) }),
            ]
        }
        ScenarioKind::Thermal => vec![("single-photon".to_string(), HeraldSpec::Exact { counts: vec![1] })],
    };
    if let Some(h) = &cfg.herald {
        out.push(("custom".to_string(), h.clone()));
    }
    out
}

/// Two-channel input `|ECS⟩ ⊗ |0⟩^{⊗(upper_n + lower_n)}` with modes
/// (upper signal, lower signal, upper idlers, lower idlers).
pub fn build_ecs_dual_input(config: &ScenarioConfig) -> Result<FockVector> {
    let cfg = config.resolved()?;
    if cfg.kind != ScenarioKind::EcsDual {
        return Err(Error::config("kind", "the two-channel input needs kind ecs-dual"));
    }
    let beta = cfg.beta.expect("validated").0;
    let ecs = states::ecs(cfg.signal_dim(), cfg.alpha.0, beta)?;
    let n_idlers = cfg.upper_n.expect("resolved") + cfg.lower_n.expect("resolved");
    let vac = states::fock(cfg.idler_dim(), 0)?;
    let mut parts = vec![&ecs];
    parts.extend(std::iter::repeat(&vac).take(n_idlers));
    fock::tensor(&parts)
}

/// Builds the input, evolves it and applies every herald.
pub fn simulate(config: &ScenarioConfig) -> Result<Simulation> {
    let cfg = config.resolved()?;
    let lambda_max = cfg.lambda_max.expect("resolved");
    fock::check_lambda(cfg.lambda, lambda_max)?;
    let (ds, di) = (cfg.signal_dim(), cfg.idler_dim());
    let heralds = default_heralds(&cfg);

    let (input_signal, output, idler_modes, signal_labels) = match cfg.kind {
        ScenarioKind::Single | ScenarioKind::Cascade => {
            let n = cfg.n_amplifiers.expect("resolved");
            let layout = amplifier::CascadeLayout::with_limit(ds, vec![di; n], vec![cfg.lambda; n], lambda_max)?;
            let signal = states::coherent(ds, cfg.alpha.0)?;
            let out = amplifier::evolve_cascade(&layout.input(&signal)?, &layout)?;
            (signal.to_density(), Output::Pure(out), (1..=n).collect::<Vec<_>>(), vec!["s"])
        }
        ScenarioKind::EcsDual => {
            let input = build_ecs_dual_input(&cfg)?;
            let up = cfg.upper_n.expect("resolved");
            let low = cfg.lower_n.expect("resolved");
            let couplings: Vec<Coupling> = (0..up)
                .map(|j| Coupling { signal: 0, idler: 2 + j, lambda: cfg.lambda })
                .chain((0..low).map(|j| Coupling { signal: 1, idler: 2 + up + j, lambda: cfg.lambda }))
                .collect();
            let out = amplifier::evolve_network(&input, &couplings, lambda_max)?;
            (input.reduced(&[0, 1])?, Output::Pure(out), (2..2 + up + low).collect(), vec!["us", "ds"])
        }
        ScenarioKind::Thermal => {
            let rho = thermal::thermal_coherent_input(ds, cfg.alpha.0, cfg.nbar.expect("validated"))?;
            let out = thermal::evolve_thermal(&rho, cfg.lambda, di)?;
            (rho, Output::Mixed(out), vec![1], vec!["s"])
        }
    };

    let runs = heralds
        .into_iter()
        .map(|(name, spec)| {
            let outcome = match &output {
                Output::Pure(state) => HeraldOutcome::Pure(herald::project(state, &spec.to_pattern(&idler_modes))?),
                Output::Mixed(rho) => {
                    let HeraldSpec::Exact { counts } = &spec else { unreachable!("validated") };
                    let (signal, probability) = thermal::herald_idler_count(rho, counts[0])?;
                    HeraldOutcome::Mixed { probability, signal }
                }
            };
            Ok(HeraldRun { name, spec, outcome })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(Simulation { config: cfg, input_signal, output, heralds: runs, signal_labels, idler_modes })
}

/// Summary of the Wigner function on the configured grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WignerSummary {
    pub origin: f64,
    pub min: f64,
    pub max: f64,
    pub integral: f64,
}

/// Single-mode diagnostics of one signal mode.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct ModeAnalysis {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mean_photon_number: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mandel_q: Option<Option<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub entropy: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub distribution: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wigner: Option<WignerSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HeraldEntry {
    pub name: String,
    pub pattern: HeraldSpec,
    pub probability: f64,
    /// Whether the outcome occurs at all; conditional quantities are null
    /// otherwise.
    pub defined: bool,
    pub references: BTreeMap<String, f64>,
    pub fidelities: BTreeMap<String, Option<f64>>,
    pub analyses: BTreeMap<String, ModeAnalysis>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Diagnostics {
    pub leakage: f64,
    pub leakage_limit: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioReport {
    pub schema: &'static str,
    pub config: ScenarioConfig,
    pub heralds: Vec<HeraldEntry>,
    /// Scenario-level quantities built from several heralds.
    pub derived: BTreeMap<String, Option<f64>>,
    pub diagnostics: Diagnostics,
}

impl ScenarioReport {
    pub fn herald(&self, name: &str) -> Option<&HeraldEntry> {
        self.heralds.iter().find(|h| h.name == name)
    }

    pub fn to_canonical_json(&self) -> String {
        canonical::to_canonical_json(&serde_json::to_value(self).expect("reports always serialize"))
    }
}

/// `λ^{2m} m! L_m(−|α|²)`, the leading-order rate of one m-click pattern.
fn pattern_weight(m: usize, alpha: C64, lambda: f64) -> f64 {
    lambda.powi(2 * m as i32) * states::factorial(m) * fock::laguerre(m, -alpha.norm_sqr())
}

fn references(sim: &Simulation, spec: &HeraldSpec) -> Result<BTreeMap<String, f64>> {
    let cfg = &sim.config;
    let (alpha, lambda) = (cfg.alpha.0, cfg.lambda);
    let mut refs = BTreeMap::new();
    match cfg.kind {
        ScenarioKind::Single | ScenarioKind::Cascade => {
            let (m, n, class) = spec.photon_count(sim.idler_modes.len());
            if m == 0 || m > n.max(1) || matches!(spec, HeraldSpec::Exact { counts } if counts.iter().any(|&c| c > 1)) {
                return Ok(refs);
            }
            if class {
                refs.insert("n-prefactor".into(), herald::herald_probability_reference(n, m, alpha, lambda)?);
                refs.insert("combinatorial".into(), herald::combinatorial_probability_reference(n, m, alpha, lambda)?);
            } else {
                refs.insert("pattern".into(), pattern_weight(m, alpha, lambda));
            }
        }
        ScenarioKind::EcsDual => {
            // first order: each amplifier on a channel adds λ² (1 + ⟨n⟩)
            let up = cfg.upper_n.expect("resolved");
            if let HeraldSpec::Clicks { clicks: 1, among: Some(a) } = spec {
                let upper = a.iter().all(|&k| k < up);
                let lower = a.iter().all(|&k| k >= up);
                if upper || lower {
                    let mode = if upper { 0 } else { 1 };
                    let mean = sim.input_signal.mean_number(mode)?;
                    let amps = if upper {
                        [cfg.beta.expect("validated").0.norm_sqr(), alpha.norm_sqr()]
                    } else {
                        [alpha.norm_sqr(), cfg.beta.expect("validated").0.norm_sqr()]
                    };
                    let k = a.len() as f64;
                    refs.insert("first-order".into(), k * lambda * lambda * (1.0 + mean));
                    refs.insert(
                        "orthogonal-branches".into(),
                        k * lambda * lambda * (1.0 + (amps[0] + amps[1]) / 2.0),
                    );
                }
            }
        }
        ScenarioKind::Thermal => {
            if spec == &(HeraldSpec::Exact { counts: vec![1] }) {
                let nbar = cfg.nbar.expect("validated");
                let (u, _) = thermal::bogoliubov_coeffs(nbar)?;
                let n_in = sim.input_signal.mean_number(0)?;
                refs.insert("first-order".into(), lambda * lambda * (1.0 + n_in));
                refs.insert("amplitude-reading".into(), lambda * lambda * u * u * (1.0 + alpha.norm_sqr()));
                refs.insert("literal".into(), lambda * u);
            }
        }
    }
    Ok(refs)
}

fn fidelities(sim: &Simulation, run: &HeraldRun) -> Result<BTreeMap<String, Option<f64>>> {
    let cfg = &sim.config;
    let ds = cfg.signal_dim();
    let alpha = cfg.alpha.0;
    let signal = run.outcome.signal();
    let against = |target: &FockVector| -> Result<Option<f64>> { signal.map(|r| r.expectation_pure(target)).transpose() };
    let mut out = BTreeMap::new();
    match cfg.kind {
        ScenarioKind::Single | ScenarioKind::Cascade => {
            let (m, n, class) = run.spec.photon_count(sim.idler_modes.len());
            if m + 1 < ds {
                out.insert("pacs".into(), against(&states::pacs(ds, alpha, m)?)?);
            }
            if class && m >= 1 && m <= n && n >= 2 {
                let name = match (n, m) {
                    (_, 1) => "w-state",
                    (3, 2) => "ii3",
                    _ => "dicke",
                };
                let target = states::dicke_state(n, m)?;
                let value = match &run.outcome {
                    HeraldOutcome::Pure(r) => r.idler_fidelity(&target)?,
                    HeraldOutcome::Mixed { .. } => None,
                };
                out.insert(name.into(), value);
            }
        }
        ScenarioKind::EcsDual => {
            let beta = cfg.beta.expect("validated").0;
            let upper = states::espacs_upper(ds, alpha, beta)?;
            out.insert("espacs-upper".into(), against(&upper)?);
            out.insert("espacs-lower".into(), against(&states::espacs_lower(ds, alpha, beta)?)?);
            let up = cfg.upper_n.expect("resolved");
            let upper_class = HeraldSpec::Clicks { clicks: 1, among: Some((0..up).collect()) };
            if run.spec == upper_class && up >= 2 {
                let target = fock::tensor(&[&upper, &states::w_state(up)?])?;
                let value = match &run.outcome {
                    HeraldOutcome::Pure(r) => r.conditional_fidelity(&target)?,
                    HeraldOutcome::Mixed { .. } => None,
                };
                out.insert("espacs-epr".into(), value);
            }
        }
        ScenarioKind::Thermal => {
            let HeraldSpec::Exact { counts } = &run.spec else { unreachable!("validated") };
            if counts[0] + 1 < ds {
                out.insert("pacs".into(), against(&states::pacs(ds, alpha, counts[0])?)?);
            }
        }
    }
    Ok(out)
}

fn mode_analysis(cfg: &ScenarioConfig, rho: &DensityMatrix) -> Result<ModeAnalysis> {
    let mut a = ModeAnalysis { mean_photon_number: Some(rho.mean_number(0)?), ..Default::default() };
    if cfg.wants(Analysis::MandelQ) {
        a.mandel_q = Some(analysis::mandel_q(rho)?);
    }
    if cfg.wants(Analysis::Entropy) {
        a.entropy = Some(analysis::von_neumann_entropy(rho));
    }
    if cfg.wants(Analysis::Distribution) {
        a.distribution = Some(analysis::photon_distribution(rho)?);
    }
    if cfg.wants(Analysis::Wigner) {
        let grid = analysis::wigner(rho, &cfg.wigner.as_ref().expect("resolved").grid())?;
        a.wigner = Some(WignerSummary {
            origin: analysis::wigner_point(rho, 0.0, 0.0),
            min: grid.min(),
            max: grid.max(),
            integral: grid.integral(),
        });
    }
    Ok(a)
}

fn single_mode(rho: &DensityMatrix, mode: usize) -> Result<DensityMatrix> {
    if rho.n_modes() == 1 {
        Ok(rho.clone())
    } else {
        rho.partial_trace(&[mode])
    }
}

/// Summarizes a finished simulation.
pub fn report(sim: &Simulation) -> Result<ScenarioReport> {
    let cfg = &sim.config;
    let mut heralds = Vec::with_capacity(sim.heralds.len());
    for run in &sim.heralds {
        let mut analyses = BTreeMap::new();
        if let Some(rho) = run.outcome.signal() {
            for (k, label) in sim.signal_labels.iter().enumerate() {
                analyses.insert(label.to_string(), mode_analysis(cfg, &single_mode(rho, k)?)?);
            }
        }
        heralds.push(HeraldEntry {
            name: run.name.clone(),
            pattern: run.spec.clone(),
            probability: run.outcome.probability(),
            defined: run.outcome.signal().is_some(),
            references: references(sim, &run.spec)?,
            fidelities: if cfg.wants(Analysis::FidelityTargets) { fidelities(sim, run)? } else { BTreeMap::new() },
            analyses,
        });
    }
    let mut derived = BTreeMap::new();
    if cfg.kind == ScenarioKind::EcsDual {
        let p = |name: &str| heralds.iter().find(|h| h.name == name).map(|h| h.probability);
        if let (Some(up), Some(low)) = (p("upper"), p("lower")) {
            derived.insert("upper-lower-ratio".to_string(), (low > 0.0).then(|| up / low));
        }
    }
    Ok(ScenarioReport {
        schema: REPORT_SCHEMA,
        config: cfg.clone(),
        heralds,
        derived,
        diagnostics: Diagnostics { leakage: sim.output.leakage(), leakage_limit: LEAKAGE_LIMIT },
    })
}

/// `simulate` followed by `report`.
pub fn run(config: &ScenarioConfig) -> Result<ScenarioReport> {
    report(&simulate(config)?)
}

/// Single-mode state selected by the config's Wigner section.
pub fn wigner_target(sim: &Simulation) -> Result<DensityMatrix> {
    let w = sim.config.wigner.as_ref().expect("resolved");
    let state = match w.target {
        WignerTarget::Input => sim.input_signal.clone(),
        WignerTarget::Heralded => {
            let run = match &w.herald {
                Some(name) => sim
                    .heralds
                    .iter()
                    .find(|h| &h.name == name)
                    .ok_or_else(|| Error::config("wigner.herald", format!("no herald named `{name}`")))?,
                None => &sim.heralds[0],
            };
            run.outcome
                .signal()
                .cloned()
                .ok_or_else(|| Error::invalid(format!("herald `{}` never fires; its state is undefined", run.name)))?
        }
    };
    match (state.n_modes(), w.mode) {
        (1, None) | (1, Some(0)) => Ok(state),
        (n, Some(m)) if m < n => state.partial_trace(&[m]),
        (n, Some(m)) => Err(Error::OutOfRange { n: m, dim: n }),
        (_, None) => Err(Error::NotSingleMode { dims: state.dims().to_vec() }),
    }
}

/// Wigner grid of the configured target.
pub fn wigner_grid(config: &ScenarioConfig) -> Result<WignerGrid> {
    let sim = simulate(config)?;
    let target = wigner_target(&sim)?;
    analysis::wigner(StateRef::from(&target), &sim.config.wigner.as_ref().expect("resolved").grid())
}

/// Parameter varied by [`sweep`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    Lambda,
    Alpha,
    Nbar,
    NAmplifiers,
}

impl SweepParam {
    pub fn name(self) -> &'static str {
        match self {
            SweepParam::Lambda => "lambda",
            SweepParam::Alpha => "alpha",
            SweepParam::Nbar => "nbar",
            SweepParam::NAmplifiers => "n_amplifiers",
        }
    }

    /// Copy of `config` with this parameter set to `value`.
    pub fn apply(self, config: &ScenarioConfig, value: f64) -> Result<ScenarioConfig> {
        let mut c = config.clone();
        match self {
            SweepParam::Lambda => c.lambda = value,
            SweepParam::Alpha => c.alpha = Amplitude::real(value),
            SweepParam::Nbar => {
                if c.kind != ScenarioKind::Thermal {
                    return Err(Error::config("nbar", "sweeping nbar needs kind thermal"));
                }
                c.nbar = Some(value);
            }
            SweepParam::NAmplifiers => {
                if c.kind != ScenarioKind::Cascade {
                    return Err(Error::config("n_amplifiers", "sweeping n_amplifiers needs kind cascade"));
                }
                if value < 1.0 || value.fract() != 0.0 || value > 64.0 {
                    return Err(Error::invalid(format!("n_amplifiers must be a small positive integer, got {value}")));
                }
                c.n_amplifiers = Some(value as usize);
            }
        }
        Ok(c)
    }
}

impl FromStr for SweepParam {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lambda" => Ok(SweepParam::Lambda),
            "alpha" => Ok(SweepParam::Alpha),
            "nbar" => Ok(SweepParam::Nbar),
            "n_amplifiers" | "n-amplifiers" => Ok(SweepParam::NAmplifiers),
            other => Err(Error::invalid(format!(
                "unknown sweep parameter `{other}` (expected lambda, alpha, nbar or n_amplifiers)"
            ))),
        }
    }
}

/// One report per value, in input order. Unset truncations are re-derived
/// for every value.
pub fn sweep(config: &ScenarioConfig, param: SweepParam, values: &[f64]) -> Result<Vec<ScenarioReport>> {
    values.iter().map(|&v| run(&param.apply(config, v)?)).collect()
}

/// JSON Schema of the config format.
pub fn config_schema() -> serde_json::Value {
    let amplitude = serde_json::json!({
        "oneOf": [
            {"type": "number"},
            {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2}
        ]
    });
    let count = serde_json::json!({"type": "integer", "minimum": 1});
    let index_list = serde_json::json!({"type": "array", "items": {"type": "integer", "minimum": 0}});
    serde_json::json!({
        "$schema": "https://json-schema.org/draft/2020-12/schema",
        "title": "spacs-sim scenario config",
        "type": "object",
        "additionalProperties": false,
        "required": ["schema_version", "kind", "alpha", "lambda"],
        "properties": {
            "schema_version": {"const": SCHEMA_VERSION},
            "kind": {"enum": ["single", "cascade", "ecs-dual", "thermal"]},
            "alpha": amplitude,
            "beta": amplitude,
            "lambda": {"type": "number", "minimum": 0},
            "lambda_max": {"type": "number", "exclusiveMinimum": 0, "default": DEFAULT_LAMBDA_MAX},
            "n_amplifiers": count,
            "upper_n": {"type": "integer", "minimum": 1, "default": 2},
            "lower_n": {"type": "integer", "minimum": 1, "default": 1},
            "nbar": {"type": "number", "minimum": 0},
            "truncations": {
                "type": "object",
                "additionalProperties": false,
                "properties": {
                    "signal": {"type": "integer", "minimum": 2},
                    "idler": {"type": "integer", "minimum": 2, "default": DEFAULT_IDLER_DIM}
                }
            },
            "analyses": {
                "type": "array",
                "items": {"enum": ["fidelity-targets", "wigner", "mandel-q", "entropy", "distribution"]}
            },
            "herald": {
                "oneOf": [
                    {"type": "object", "additionalProperties": false, "required": ["type", "counts"],
                     "properties": {"type": {"const": "exact"}, "counts": index_list}},
                    {"type": "object", "additionalProperties": false, "required": ["type"],
                     "properties": {"type": {"const": "any-single-click"}}},
                    {"type": "object", "additionalProperties": false, "required": ["type", "clicks"],
                     "properties": {"type": {"const": "clicks"}, "clicks": count, "among": index_list}},
                    {"type": "object", "additionalProperties": false, "required": ["type", "pair"],
                     "properties": {"type": {"const": "coincidence"},
                                    "pair": {"type": "array", "items": {"type": "integer", "minimum": 0}, "minItems": 2, "maxItems": 2}}}
                ]
            },
            "wigner": {
                "type": "object",
                "additionalProperties": false,
                "properties": {
                    "target": {"enum": ["heralded", "input"], "default": "heralded"},
                    "herald": {"type": "string"},
                    "mode": {"type": "integer", "minimum": 0},
                    "x_min": {"type": "number", "default": default_low()},
                    "x_max": {"type": "number", "default": default_high()},
                    "p_min": {"type": "number", "default": default_low()},
                    "p_max": {"type": "number", "default": default_high()},
                    "nx": {"type": "integer", "minimum": 2, "default": default_points()},
                    "np": {"type": "integer", "minimum": 2, "default": default_points()}
                }
            }
        },
        "allOf": [
            {"if": {"properties": {"kind": {"const": "cascade"}}}, "then": {"required": ["n_amplifiers"]}},
            {"if": {"properties": {"kind": {"const": "ecs-dual"}}}, "then": {"required": ["beta"]}},
            {"if": {"properties": {"kind": {"const": "thermal"}}}, "then": {"required": ["nbar"]}}
        ]
    })
}
