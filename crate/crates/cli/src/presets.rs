//! Configuration presets shipped with the binary.

use crate::config::RawConfig;
use crate::error::{CliError, Result};

pub const PRESETS: &[(&str, &str)] = &[
    ("table-1", include_str!("../presets/table-1.conf")),
    ("table-2", include_str!("../presets/table-2.conf")),
    ("table-3", include_str!("../presets/table-3.conf")),
    ("table-4", include_str!("../presets/table-4.conf")),
    ("gpu-extrapolation", include_str!("../presets/gpu-extrapolation.conf")),
];

pub fn preset(name: &str) -> Result<RawConfig> {
    let (_, text) = PRESETS
        .iter()
        .find(|(n, _)| *n == name)
        .ok_or_else(|| CliError::UnknownPreset(name.to_string()))?;
    RawConfig::parse(text, &format!("preset {name}"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::ExperimentConfig;

    #[test]
    fn all_presets_are_valid() {
        for (name, _) in PRESETS {
            let cfg = ExperimentConfig::from_raw(&preset(name).unwrap()).unwrap();
            cfg.validate_sampling().unwrap();
            assert_eq!(cfg.name, *name);
        }
        assert!(matches!(preset("table-9"), Err(CliError::UnknownPreset(_))));
    }
}
