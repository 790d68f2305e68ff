//! Built-in configurations for the double-well and tilted Duffing experiments.

use crate::config::RunConfig;
use crate::error::{Error, Result};

const PRESETS: &[(&str, &str)] = &[
    ("double_well_uncontrolled", include_str!("../presets/double_well_uncontrolled.json")),
    ("double_well_controlled", include_str!("../presets/double_well_controlled.json")),
    ("tilted_duffing_uncontrolled", include_str!("../presets/tilted_duffing_uncontrolled.json")),
    ("tilted_duffing_controlled", include_str!("../presets/tilted_duffing_controlled.json")),
];

/// Gains shown in the effective-potential sweep.
pub const FIG4_ALPHAS: &[f64] = &[0.0, 0.25, 0.5, 1.0, 2.0];
/// Delays of the large-delay sweep.
pub const FIG6_TAUS: &[f64] = &[0.2, 0.4, 2.0];
/// Base seed used by `reproduce` unless `--seed` is given.
pub const DEFAULT_REPRODUCE_SEED: u64 = 1;

pub fn names() -> impl Iterator<Item = &'static str> {
    PRESETS.iter().map(|(n, _)| *n)
}

pub fn load(name: &str) -> Result<RunConfig> {
    let (_, text) = PRESETS
        .iter()
        .find(|(n, _)| *n == name)
        .ok_or_else(|| Error::invalid(format!("unknown preset {name:?}")))?;
    RunConfig::from_json(text, name)
}

pub fn double_well_uncontrolled() -> RunConfig {
    load("double_well_uncontrolled").expect("built-in preset parses")
}

pub fn double_well_controlled() -> RunConfig {
    load("double_well_controlled").expect("built-in preset parses")
}

pub fn tilted_duffing_uncontrolled() -> RunConfig {
    load("tilted_duffing_uncontrolled").expect("built-in preset parses")
}

pub fn tilted_duffing_controlled() -> RunConfig {
    load("tilted_duffing_controlled").expect("built-in preset parses")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potentials::PotentialSpec;
    use crate::systems::SystemKind;

    #[test]
    fn all_presets_parse() {
        for n in names() {
            load(n).unwrap();
        }
        assert!(load("nope").is_err());
    }

    #[test]
    fn preset_parameters() {
        let c = double_well_controlled();
        assert_eq!(c.system.kind(), SystemKind::ControlledSdde);
        assert_eq!(c.system.control().alpha, 1.0);
        assert_eq!(c.system.control().tau, 0.1);
        assert_eq!(c.system.diffusion().constant_sigma(), Some(0.5));
        assert_eq!(c.system.potential(), &PotentialSpec::double_well());
        let t = tilted_duffing_controlled();
        assert_eq!(t.system.potential(), &PotentialSpec::tilted_duffing_default());
        assert_eq!(t.system.control().alpha, 0.3);
        assert_eq!(t.system.diffusion().constant_sigma(), Some(0.15));
    }
}
