//! The stock scenario files shipped in `scenarios/` must stay in lockstep
//! with the presets the test suite uses.

use std::fs;
use std::path::PathBuf;

use wecs_core::presets;
use wecs_core::scenario::Scenario;

fn load(name: &str) -> Scenario {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../scenarios")
        .join(name);
    let text = fs::read_to_string(&path)
        .unwrap_or_else(|e| panic!("reading {}: {e}", path.display()));
    Scenario::from_toml_str(&text).unwrap_or_else(|e| panic!("parsing {name}: {e}"))
}

#[test]
fn stock_files_match_their_presets() {
    assert_eq!(load("short_circuit.toml"), presets::short_circuit_scenario());
    assert_eq!(load("wind_gust.toml"), presets::wind_gust_scenario());
    assert_eq!(load("load_step.toml"), presets::load_step_scenario());
}
