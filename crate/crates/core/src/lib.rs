//! Truncated Fock-space simulation of heralded photon addition.
//!
//! A coherent signal passes through one or more parametric amplifiers, each
//! with its own vacuum idler. A click in the idlers heralds a photon added to
//! the signal, and the idlers themselves end up in a W-type entangled state.
//! The crate builds the states, evolves them exactly in a truncated Fock
//! space, projects on detector outcomes and analyzes what comes out.
//!
//! ```
//! use num_complex::Complex64;
//! use spacs_sim::{amplifier, herald, states};
//!
//! let alpha = Complex64::new(1.0, 0.0);
//! let layout = amplifier::CascadeLayout::uniform(21, 1, 0.01)?;
//! let out = amplifier::evolve_cascade(&layout.input(&states::coherent(21, alpha)?)?, &layout)?;
//! let click = herald::project(&out, &herald::HeraldPattern::any_single_click(vec![1]))?;
//! assert!((click.probability / 2e-4 - 1.0).abs() < 1e-3);
//! # Ok::<(), spacs_sim::Error>(())
//! ```

pub mod amplifier;
pub mod analysis;
pub mod canonical;
pub mod cli;
pub mod error;
pub mod fock;
pub mod herald;
pub mod linalg;
pub mod scenarios;
pub mod states;
pub mod thermal;
pub mod verify;

pub use error::{Error, Result};
pub use fock::{DensityMatrix, FockVector, ModeOperator};
pub use scenarios::{ScenarioConfig, ScenarioKind, ScenarioReport};
