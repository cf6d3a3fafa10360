//! Built-in parameter sets.
//!
//! Every preset has unit decay rates and zero base detunings. The swept
//! probe detuning is absorbed by the detuning of the field that is switched
//! off. Sweep ranges are implementation defaults.

use crate::atom::{ClosureTarget, Field, Scenario};
use crate::error::{Error, Result};
use crate::sweep::{Observable, SweepSpec};

pub const PRESET_NAMES: [&str; 10] = [
    "fig4",
    "fig5",
    "fig6a",
    "fig6b",
    "fig7",
    "fig8",
    "fig9-left",
    "fig9-right",
    "fig10-left",
    "fig10-right",
];

#[derive(Clone, Debug, PartialEq)]
pub struct Preset {
    pub name: &'static str,
    pub scenario: Scenario,
    pub sweep: SweepSpec,
    /// Coherences of interest for this parameter set.
    pub observables: Vec<Observable>,
}

fn scenario(omegas: [f64; 4], target: Field) -> Scenario {
    let [omega_a1, omega_a2, omega_c1, omega_c2] = omegas;
    Scenario {
        omega_a1,
        omega_a2,
        omega_c1,
        omega_c2,
        closure_target: ClosureTarget::Field(target),
        ..Scenario::default()
    }
}

fn keys(keys: &[&str]) -> Vec<Observable> {
    keys.iter()
        .map(|k| k.parse().expect("built-in observable key"))
        .collect()
}

/// Looks up a preset by name.
pub fn preset(name: &str) -> Result<Preset> {
    // Field order: a1, a2, c1, c2.
    let (name, scenario, observables) = match name {
        "fig4" => (
            "fig4",
            scenario([0.0, 15.0, 10.0, 1.0], Field::A1),
            keys(&["cd"]),
        ),
        "fig5" => (
            "fig5",
            scenario([0.0, 15.0, 10.0, 1.0], Field::A1),
            keys(&["cd"]),
        ),
        "fig6a" => (
            "fig6a",
            scenario([0.0, 10.0, 10.0, 1.0], Field::A1),
            keys(&["cd"]),
        ),
        "fig6b" => (
            "fig6b",
            scenario([0.0, 3.0, 10.0, 1.0], Field::A1),
            keys(&["cd"]),
        ),
        "fig7" => (
            "fig7",
            scenario([0.0, 15.0, 10.0, 1.0], Field::A1),
            keys(&["ca", "db"]),
        ),
        "fig8" => (
            "fig8",
            scenario([0.0, 15.0, 10.0, 1.0], Field::A1),
            keys(&["cb"]),
        ),
        "fig9-left" => (
            "fig9-left",
            scenario([0.1, 0.0, 5.0, 0.1], Field::A2),
            keys(&["cd", "ab"]),
        ),
        "fig9-right" => (
            "fig9-right",
            scenario([0.1, 0.0, 1.0, 0.1], Field::A2),
            keys(&["cd", "ab"]),
        ),
        "fig10-left" => (
            "fig10-left",
            scenario([0.1, 10.0, 0.0, 0.1], Field::C1),
            keys(&["cd", "ab"]),
        ),
        "fig10-right" => (
            "fig10-right",
            scenario([0.1, 1.0, 0.0, 0.1], Field::C1),
            keys(&["cd", "ab"]),
        ),
        other => {
            return Err(Error::UnknownPreset {
                name: other.to_string(),
                valid: PRESET_NAMES.join(", "),
            })
        }
    };
    Ok(Preset {
        name,
        scenario,
        sweep: SweepSpec::new(scenario),
        observables,
    })
}

/// All presets in listing order.
pub fn all_presets() -> Vec<Preset> {
    PRESET_NAMES
        .iter()
        .map(|n| preset(n).expect("listed preset"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fig5_parameters() {
        let p = preset("fig5").unwrap();
        let s = p.scenario;
        assert_eq!(
            (s.omega_a1, s.omega_a2, s.omega_c1, s.omega_c2),
            (0.0, 15.0, 10.0, 1.0)
        );
        assert_eq!(s.gammas(), [1.0; 4]);
        assert!(s.has_zero_detunings());
        assert_eq!(s.closure_target, ClosureTarget::Field(Field::A1));
        assert_eq!(
            (p.sweep.delta_min, p.sweep.delta_max, p.sweep.points),
            (-25.0, 25.0, 1001)
        );
    }

    #[test]
    fn shared_parameter_set() {
        let base = preset("fig4").unwrap().scenario;
        for name in ["fig5", "fig7", "fig8"] {
            assert_eq!(preset(name).unwrap().scenario, base);
        }
    }

    #[test]
    fn couple_field_variants() {
        let left = preset("fig9-left").unwrap().scenario;
        let right = preset("fig9-right").unwrap().scenario;
        assert_eq!(
            right,
            Scenario {
                omega_c1: 1.0,
                ..left
            }
        );
        assert_eq!(left.closure_target, ClosureTarget::Field(Field::A2));

        let s = preset("fig10-left").unwrap().scenario;
        assert_eq!(
            (s.omega_a1, s.omega_a2, s.omega_c1, s.omega_c2),
            (0.1, 10.0, 0.0, 0.1)
        );
        assert_eq!(s.closure_target, ClosureTarget::Field(Field::C1));
        assert_eq!(
            preset("fig10-right").unwrap().scenario,
            Scenario { omega_a2: 1.0, ..s }
        );

        assert_eq!(preset("fig6a").unwrap().scenario.omega_a2, 10.0);
        assert_eq!(preset("fig6b").unwrap().scenario.omega_a2, 3.0);
    }

    #[test]
    fn closure_target_is_an_inactive_field() {
        for p in all_presets() {
            let ClosureTarget::Field(f) = p.scenario.closure_target else {
                panic!("{} has no closure target", p.name);
            };
            assert_eq!(p.scenario.omega(f), 0.0, "{}", p.name);
            assert!(p.sweep.validate().is_ok());
        }
    }

    #[test]
    fn unknown_name_lists_valid_names() {
        let err = preset("fig11").unwrap_err().to_string();
        assert!(err.contains("fig11"));
        for name in PRESET_NAMES {
            assert!(err.contains(name));
        }
    }
}
