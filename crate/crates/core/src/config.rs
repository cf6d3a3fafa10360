//! Flat INI-style scenario files.
//!
//! ```text
//! [fields]
//! omega_c1 = 10
//! omega_a2 = 15
//! omega_c2 = 1
//! closure_target = auto   # a1 | a2 | c1 | c2 | none | auto
//!
//! [decays]
//! gamma1 = 1
//!
//! [sweep]
//! delta_min = -25
//! delta_max = 25
//! points = 1001
//!
//! [output]
//! observables = cd, ab
//! out_path = spectrum.csv
//! ```
//!
//! Omitted keys fall back to zero drives and detunings, unit decay rates and
//! the default sweep grid. `auto` picks the detuning of the first inactive
//! field in the order a1, c1, a2, c2, or `none` when all four are driven.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::path::PathBuf;

use crate::atom::{ClosureTarget, Field, Scenario};
use crate::error::{Error, Result};
use crate::sweep::{Observable, SweepSpec};

#[derive(Clone, Debug, PartialEq)]
pub struct OutputOptions {
    pub observables: Vec<Observable>,
    pub out_path: Option<PathBuf>,
}

impl Default for OutputOptions {
    fn default() -> Self {
        Self {
            observables: vec![Observable::Coherence(
                crate::atom::Level::C,
                crate::atom::Level::D,
            )],
            out_path: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Config {
    pub scenario: Scenario,
    pub sweep: SweepSpec,
    pub output: OutputOptions,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Section {
    Fields,
    Decays,
    Sweep,
    Output,
}

impl Section {
    fn parse(name: &str) -> Option<Self> {
        match name {
            "fields" => Some(Section::Fields),
            "decays" => Some(Section::Decays),
            "sweep" => Some(Section::Sweep),
            "output" => Some(Section::Output),
            _ => None,
        }
    }

    fn keys(self) -> &'static [&'static str] {
        match self {
            Section::Fields => &[
                "omega_a1",
                "omega_a2",
                "omega_c1",
                "omega_c2",
                "delta_a1",
                "delta_a2",
                "delta_c1",
                "delta_c2",
                "closure_target",
            ],
            Section::Decays => &["gamma1", "gamma2", "gamma3", "gamma4"],
            Section::Sweep => &["delta_min", "delta_max", "points"],
            Section::Output => &["observables", "out_path"],
        }
    }

    fn name(self) -> &'static str {
        match self {
            Section::Fields => "fields",
            Section::Decays => "decays",
            Section::Sweep => "sweep",
            Section::Output => "output",
        }
    }

    fn owning(key: &str) -> Option<Self> {
        [
            Section::Fields,
            Section::Decays,
            Section::Sweep,
            Section::Output,
        ]
        .into_iter()
        .find(|s| s.keys().contains(&key))
    }
}

fn config_error(line: usize, message: impl Into<String>) -> Error {
    Error::Config {
        line,
        message: message.into(),
    }
}

/// Accepts `[+-]digits[.digits][(e|E)[+-]digits]`, with digits allowed on
/// either side of the point but not absent from both.
fn is_decimal(text: &str) -> bool {
    let bytes = text.as_bytes();
    let mut i = 0;
    let digits = |i: &mut usize| {
        let start = *i;
        while *i < bytes.len() && bytes[*i].is_ascii_digit() {
            *i += 1;
        }
        *i - start
    };
    if i < bytes.len() && (bytes[i] == b'+' || bytes[i] == b'-') {
        i += 1;
    }
    let mut mantissa = digits(&mut i);
    if i < bytes.len() && bytes[i] == b'.' {
        i += 1;
        mantissa += digits(&mut i);
    }
    if mantissa == 0 {
        return false;
    }
    if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
        i += 1;
        if i < bytes.len() && (bytes[i] == b'+' || bytes[i] == b'-') {
            i += 1;
        }
        if digits(&mut i) == 0 {
            return false;
        }
    }
    i == bytes.len()
}

fn parse_number(key: &str, value: &str, line: usize) -> Result<f64> {
    if !is_decimal(value) {
        return Err(config_error(
            line,
            format!("{key}: malformed number '{value}'"),
        ));
    }
    let parsed: f64 = value
        .parse()
        .map_err(|_| config_error(line, format!("{key}: malformed number '{value}'")))?;
    if !parsed.is_finite() {
        return Err(config_error(
            line,
            format!("{key}: value '{value}' is out of range"),
        ));
    }
    Ok(parsed)
}

fn auto_closure_target(s: &Scenario) -> ClosureTarget {
    [Field::A1, Field::C1, Field::A2, Field::C2]
        .into_iter()
        .find(|&f| s.omega(f) == 0.0)
        .map_or(ClosureTarget::None, ClosureTarget::Field)
}

/// Parses a scenario file.
pub fn parse_config(text: &str) -> Result<Config> {
    let mut scenario = Scenario::default();
    let mut sweep = SweepSpec::new(scenario);
    let mut output = OutputOptions::default();
    let mut target: Option<ClosureTarget> = None;
    let mut section: Option<Section> = None;
    let mut seen: HashSet<&'static str> = HashSet::new();

    for (index, raw) in text.lines().enumerate() {
        let line = index + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(rest) = content.strip_prefix('[') {
            let name = rest
                .strip_suffix(']')
                .ok_or_else(|| config_error(line, format!("malformed section header '{content}'")))?
                .trim();
            section = Some(
                Section::parse(name)
                    .ok_or_else(|| config_error(line, format!("unknown section [{name}]")))?,
            );
            continue;
        }
        let (key, value) = content.split_once('=').ok_or_else(|| {
            config_error(line, format!("expected 'key = value', got '{content}'"))
        })?;
        let (key, value) = (key.trim(), value.trim());
        let current = section
            .ok_or_else(|| config_error(line, format!("key '{key}' appears before any section")))?;
        let Some(&key) = current.keys().iter().find(|&&k| k == key) else {
            let hint = match Section::owning(key) {
                Some(s) => format!(" (belongs in [{}])", s.name()),
                None => String::new(),
            };
            return Err(config_error(
                line,
                format!("unknown key '{key}' in [{}]{hint}", current.name()),
            ));
        };
        if !seen.insert(key) {
            return Err(config_error(line, format!("duplicate key '{key}'")));
        }

        match key {
            "closure_target" => {
                target = match value {
                    "auto" => None,
                    other => Some(other.parse().map_err(|e: String| config_error(line, e))?),
                }
            }
            "points" => {
                let points: usize = value.parse().map_err(|_| {
                    config_error(line, format!("points: expected an integer, got '{value}'"))
                })?;
                if points < 2 {
                    return Err(config_error(
                        line,
                        format!("points must be at least 2, got {points}"),
                    ));
                }
                sweep.points = points;
            }
            "observables" => {
                output.observables = value
                    .split(',')
                    .map(str::trim)
                    .filter(|k| !k.is_empty())
                    .map(|k| {
                        k.parse()
                            .map_err(|e: Error| config_error(line, e.to_string()))
                    })
                    .collect::<Result<_>>()?;
            }
            "out_path" => {
                if value.is_empty() {
                    return Err(config_error(line, "out_path must not be empty"));
                }
                output.out_path = Some(PathBuf::from(value));
            }
            _ => {
                let number = parse_number(key, value, line)?;
                let slot = match key {
                    "omega_a1" => &mut scenario.omega_a1,
                    "omega_a2" => &mut scenario.omega_a2,
                    "omega_c1" => &mut scenario.omega_c1,
                    "omega_c2" => &mut scenario.omega_c2,
                    "delta_a1" => &mut scenario.delta_a1,
                    "delta_a2" => &mut scenario.delta_a2,
                    "delta_c1" => &mut scenario.delta_c1,
                    "delta_c2" => &mut scenario.delta_c2,
                    "gamma1" => &mut scenario.gamma1,
                    "gamma2" => &mut scenario.gamma2,
                    "gamma3" => &mut scenario.gamma3,
                    "gamma4" => &mut scenario.gamma4,
                    "delta_min" => &mut sweep.delta_min,
                    "delta_max" => &mut sweep.delta_max,
                    _ => unreachable!("numeric key list covers {key}"),
                };
                if (key.starts_with("omega") || key.starts_with("gamma")) && number < 0.0 {
                    return Err(config_error(
                        line,
                        format!("{key} must be >= 0, got {value}"),
                    ));
                }
                *slot = number;
            }
        }
    }

    scenario.closure_target = target.unwrap_or_else(|| auto_closure_target(&scenario));
    sweep.base = scenario;
    if sweep.delta_min >= sweep.delta_max {
        return Err(Error::InvalidSweep(format!(
            "delta_min ({}) must be below delta_max ({})",
            sweep.delta_min, sweep.delta_max
        )));
    }
    Ok(Config {
        scenario,
        sweep,
        output,
    })
}

/// Canonical text form; `parse_config` reads it back to an identical value.
pub fn render_config(config: &Config) -> String {
    let s = &config.scenario;
    let mut out = String::new();
    let mut put = |key: &str, value: &dyn std::fmt::Display| {
        writeln!(out, "{key} = {value}").expect("writing to a String");
    };
    // `{}` on f64 prints the shortest string that parses back exactly.
    put("[fields]\nomega_a1", &s.omega_a1);
    put("omega_a2", &s.omega_a2);
    put("omega_c1", &s.omega_c1);
    put("omega_c2", &s.omega_c2);
    put("delta_a1", &s.delta_a1);
    put("delta_a2", &s.delta_a2);
    put("delta_c1", &s.delta_c1);
    put("delta_c2", &s.delta_c2);
    put("closure_target", &s.closure_target);
    put("\n[decays]\ngamma1", &s.gamma1);
    put("gamma2", &s.gamma2);
    put("gamma3", &s.gamma3);
    put("gamma4", &s.gamma4);
    put("\n[sweep]\ndelta_min", &config.sweep.delta_min);
    put("delta_max", &config.sweep.delta_max);
    put("points", &config.sweep.points);
    let keys: Vec<String> = config.output.observables.iter().map(|o| o.key()).collect();
    put("\n[output]\nobservables", &keys.join(", "));
    if let Some(path) = &config.output.out_path {
        put("out_path", &path.display());
    }
    out
}

/// Renders just the scenario, with default sweep and output options.
pub fn render_scenario(scenario: &Scenario) -> String {
    render_config(&Config {
        scenario: *scenario,
        sweep: SweepSpec::new(*scenario),
        output: OutputOptions::default(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn line_of(err: Error) -> usize {
        match err {
            Error::Config { line, .. } => line,
            other => panic!("expected a config error, got {other}"),
        }
    }

    #[test]
    fn minimal_document_matches_fig5_parameters() {
        let config = parse_config("[fields]\nomega_c1 = 10\nomega_a2 = 15\nomega_c2 = 1").unwrap();
        let s = config.scenario;
        assert_eq!(
            (s.omega_a1, s.omega_a2, s.omega_c1, s.omega_c2),
            (0.0, 15.0, 10.0, 1.0)
        );
        assert_eq!(s.gammas(), [1.0; 4]);
        assert!(s.has_zero_detunings());
        assert_eq!(s.closure_target, ClosureTarget::Field(Field::A1));
        assert_eq!(s, crate::presets::preset("fig5").unwrap().scenario);
    }

    #[test]
    fn empty_document_gives_defaults() {
        let config = parse_config("").unwrap();
        assert_eq!(
            config.scenario,
            Scenario {
                closure_target: ClosureTarget::Field(Field::A1),
                ..Scenario::default()
            }
        );
        assert_eq!(
            (
                config.sweep.delta_min,
                config.sweep.delta_max,
                config.sweep.points
            ),
            (-25.0, 25.0, 1001)
        );
        assert_eq!(config.output, OutputOptions::default());
    }

    #[test]
    fn auto_target_order() {
        let all = "[fields]\nomega_a1 = 1\nomega_a2 = 1\nomega_c1 = 1\nomega_c2 = 1\n";
        assert_eq!(
            parse_config(all).unwrap().scenario.closure_target,
            ClosureTarget::None
        );
        let no_c1 = "[fields]\nomega_a1 = 1\nomega_a2 = 1\nomega_c2 = 1\n";
        assert_eq!(
            parse_config(no_c1).unwrap().scenario.closure_target,
            ClosureTarget::Field(Field::C1)
        );
        let no_a2 = "[fields]\nomega_a1 = 1\nomega_c1 = 1\nomega_c2 = 1\n";
        assert_eq!(
            parse_config(no_a2).unwrap().scenario.closure_target,
            ClosureTarget::Field(Field::A2)
        );
        let explicit = "[fields]\nclosure_target = none\n";
        assert_eq!(
            parse_config(explicit).unwrap().scenario.closure_target,
            ClosureTarget::None
        );
    }

    #[test]
    fn negative_rate_names_key_and_line() {
        let err = parse_config("# header\n[fields]\nomega_c1 = -3\n").unwrap_err();
        let message = err.to_string();
        assert!(message.contains("omega_c1"), "{message}");
        assert_eq!(line_of(err), 3);
        assert_eq!(
            line_of(parse_config("[decays]\ngamma3 = -0.5").unwrap_err()),
            2
        );
    }

    #[test]
    fn negative_detuning_is_allowed() {
        let config = parse_config("[fields]\ndelta_a1 = -2.5e-1").unwrap();
        assert_eq!(config.scenario.delta_a1, -0.25);
    }

    #[test]
    fn diagnostics_carry_line_numbers() {
        assert_eq!(
            line_of(parse_config("[fields]\n\nomega_x = 1").unwrap_err()),
            3
        );
        assert_eq!(line_of(parse_config("[nope]").unwrap_err()), 1);
        assert_eq!(line_of(parse_config("omega_a1 = 1").unwrap_err()), 1);
        assert_eq!(
            line_of(parse_config("[fields]\nomega_a1 = 1\nomega_a1 = 2").unwrap_err()),
            3
        );
        assert_eq!(
            line_of(parse_config("[fields]\nomega_a1 1").unwrap_err()),
            2
        );
        assert_eq!(line_of(parse_config("[sweep]\npoints = 1").unwrap_err()), 2);
        assert_eq!(
            line_of(parse_config("[sweep]\npoints = 2.5").unwrap_err()),
            2
        );
        assert_eq!(
            line_of(parse_config("[output]\nobservables = cd, xx").unwrap_err()),
            2
        );
        assert_eq!(
            line_of(parse_config("[fields]\nclosure_target = b").unwrap_err()),
            2
        );
        let misplaced = parse_config("[fields]\ngamma1 = 1")
            .unwrap_err()
            .to_string();
        assert!(misplaced.contains("[decays]"), "{misplaced}");
    }

    #[test]
    fn number_grammar() {
        for good in ["1", "-1", "+1", "1.", ".5", "1.5e3", "1E-3", "-0.0", "007"] {
            assert!(is_decimal(good), "{good}");
        }
        for bad in [
            "", ".", "e5", "1e", "1.5.2", "inf", "nan", "0x10", "1_000", "1 2", "--1",
        ] {
            assert!(!is_decimal(bad), "{bad}");
        }
        assert!(parse_config("[fields]\nomega_a1 = 1e400").is_err());
    }

    #[test]
    fn comments_and_whitespace() {
        let text = "  # leading\n[ fields ]\n  omega_c1=10   # trailing\n\n[output]\nout_path = out.csv\nobservables = cd,ab , pop_b";
        let config = parse_config(text).unwrap();
        assert_eq!(config.scenario.omega_c1, 10.0);
        assert_eq!(config.output.out_path, Some(PathBuf::from("out.csv")));
        let keys: Vec<String> = config.output.observables.iter().map(|o| o.key()).collect();
        assert_eq!(keys, ["cd", "ab", "pop_b"]);
    }

    #[test]
    fn sweep_bounds_checked() {
        assert!(parse_config("[sweep]\ndelta_min = 5\ndelta_max = 5").is_err());
        let c = parse_config("[sweep]\ndelta_min = -1\ndelta_max = 2\npoints = 7").unwrap();
        assert_eq!(
            (c.sweep.delta_min, c.sweep.delta_max, c.sweep.points),
            (-1.0, 2.0, 7)
        );
        assert_eq!(c.sweep.base, c.scenario);
    }

    #[test]
    fn presets_round_trip() {
        for p in crate::presets::all_presets() {
            let text = render_scenario(&p.scenario);
            assert_eq!(
                parse_config(&text).unwrap().scenario,
                p.scenario,
                "{}",
                p.name
            );
        }
    }

    fn target_strategy() -> impl Strategy<Value = ClosureTarget> {
        prop_oneof![
            Just(ClosureTarget::None),
            Just(ClosureTarget::Field(Field::A1)),
            Just(ClosureTarget::Field(Field::A2)),
            Just(ClosureTarget::Field(Field::C1)),
            Just(ClosureTarget::Field(Field::C2)),
        ]
    }

    proptest! {
        #[test]
        fn render_parse_round_trip(
            omegas in prop::array::uniform4(0.0f64..1e6),
            deltas in prop::array::uniform4(-1e6f64..1e6),
            gammas in prop::array::uniform4(prop_oneof![Just(0.0), 1e-12f64..1e3]),
            target in target_strategy(),
            points in 2usize..5000,
            span in (-1e3f64..0.0, 1e-6f64..1e3),
            out in proptest::option::of("[a-z]{1,8}\\.csv"),
        ) {
            let scenario = Scenario {
                omega_a1: omegas[0], omega_a2: omegas[1], omega_c1: omegas[2], omega_c2: omegas[3],
                delta_a1: deltas[0], delta_a2: deltas[1], delta_c1: deltas[2], delta_c2: deltas[3],
                gamma1: gammas[0], gamma2: gammas[1], gamma3: gammas[2], gamma4: gammas[3],
                closure_target: target,
            };
            let config = Config {
                scenario,
                sweep: SweepSpec { delta_min: span.0, delta_max: span.1, points, base: scenario },
                output: OutputOptions {
                    observables: vec!["ab".parse().unwrap(), "pop_d".parse().unwrap()],
                    out_path: out.map(PathBuf::from),
                },
            };
            let parsed = parse_config(&render_config(&config)).unwrap();
            prop_assert_eq!(parsed, config);
        }
    }
}
