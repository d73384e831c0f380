//! Runs a JSON scenario file and prints the canonical report.
//!
//!     cargo run --example scenario_config -- crates/core/configs/thermal.json

use spacs_sim::scenarios::{self, ScenarioConfig};

fn main() -> spacs_sim::Result<()> {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/configs/single.json").to_string());
    let text = std::fs::read_to_string(&path).expect("readable config");
    let cfg = ScenarioConfig::from_json(&text)?;
    let report = scenarios::run(&cfg)?;
    for h in &report.heralds {
        println!("# {}: p = {:.6e}, defined = {}", h.name, h.probability, h.defined);
    }
    print!("{}", report.to_canonical_json());
    Ok(())
}
