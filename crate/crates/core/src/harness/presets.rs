//! Experiment presets shipped with the crate.

use super::config::{parse_config, ExperimentConfig};
use crate::error::{Error, Result};

macro_rules! presets {
    ($($name:literal),* $(,)?) => {
        &[$(($name, include_str!(concat!("../../presets/", $name, ".json")))),*]
    };
}

/// `(name, JSON)` for every bundled preset.
pub const PRESETS: &[(&str, &str)] = presets![
    "exact-quadratic",
    "quarterplane-liouville",
    "conic-pin",
    "remark44-eps0",
    "remark44-eps-neg",
    "remark44-eps-pos",
    "eigen-table",
    "octant-eigen",
    "geometry-suite",
    "cube-conditions",
    "square-conditions",
    "construction-profiles",
    "subsolution-cube",
    "subsolution-cube-round",
    "subsolution-octahedron",
    "vertex-barrier-square",
    "vertex-barrier-square-large-f",
    "counterexample-rhs",
    "wedge-edge",
    "wedge-edge-perturbed",
    "interpolation-suite",
    "comparison-suite",
    "c11-witness",
];

pub fn list_presets() -> Vec<&'static str> {
    PRESETS.iter().map(|(n, _)| *n).collect()
}

pub fn load_preset(name: &str) -> Result<ExperimentConfig> {
    let (_, text) = PRESETS
        .iter()
        .find(|(n, _)| *n == name)
        .ok_or_else(|| Error::Config(format!("unknown preset '{name}'")))?;
    parse_config(text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_preset_parses_and_matches_its_name() {
        for name in list_presets() {
            let cfg = load_preset(name).unwrap_or_else(|e| panic!("{name}: {e}"));
            assert_eq!(cfg.id, name);
        }
        assert!(load_preset("nope").is_err());
    }
}
