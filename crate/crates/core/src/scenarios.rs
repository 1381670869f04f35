//! Scenarios bundled with the library.

use crate::config::ScenarioConfig;
use crate::error::{Error, Result};

const BUNDLED: &[(&str, &str)] = &[
    ("contraction", include_str!("../scenarios/contraction.toml")),
    ("heat_decay", include_str!("../scenarios/heat_decay.toml")),
    ("logarithmic_nonlocal", include_str!("../scenarios/logarithmic_nonlocal.toml")),
    ("logarithmic_sign", include_str!("../scenarios/logarithmic_sign.toml")),
    ("obstacle_pointwise", include_str!("../scenarios/obstacle_pointwise.toml")),
    ("obstacle_sign", include_str!("../scenarios/obstacle_sign.toml")),
    ("regular_nonlocal", include_str!("../scenarios/regular_nonlocal.toml")),
    ("regular_sign", include_str!("../scenarios/regular_sign.toml")),
    ("stefan_random", include_str!("../scenarios/stefan_random.toml")),
    ("tanh_front", include_str!("../scenarios/tanh_front.toml")),
    ("zero", include_str!("../scenarios/zero.toml")),
];

/// The six nonlinear scenarios covering every potential with both sign
/// graphs.
pub const NONLINEAR: [&str; 6] = [
    "regular_sign",
    "regular_nonlocal",
    "logarithmic_sign",
    "logarithmic_nonlocal",
    "obstacle_pointwise",
    "obstacle_sign",
];

/// Names of the bundled scenarios, sorted.
pub fn list() -> Vec<&'static str> {
    BUNDLED.iter().map(|(n, _)| *n).collect()
}

/// TOML source of a bundled scenario.
pub fn source(name: &str) -> Result<&'static str> {
    BUNDLED
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, s)| *s)
        .ok_or_else(|| Error::config(format!("no bundled scenario named `{name}` (try one of: {})", list().join(", "))))
}

pub fn get(name: &str) -> Result<ScenarioConfig> {
    ScenarioConfig::from_toml(source(name)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_bundled_scenarios_parse_under_their_own_name() {
        for name in list() {
            let cfg = get(name).unwrap_or_else(|e| panic!("{name}: {e}"));
            assert_eq!(cfg.name, name);
            assert_eq!(ScenarioConfig::from_toml(&cfg.to_toml().unwrap()).unwrap(), cfg);
        }
        let mut sorted = list();
        sorted.sort();
        assert_eq!(sorted, list());
    }

    #[test]
    fn unknown_name_is_a_config_error() {
        assert!(matches!(get("nope"), Err(Error::Config { .. })));
    }
}
