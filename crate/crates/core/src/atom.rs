//! The four-level diamond system: levels, drive parameters, the
//! rotating-frame Hamiltonian and the spontaneous-decay channels.
//!
//! Levels are ordered `(a, b, c, d)`: `b` is the ground state, `c` the top
//! state, and the four driven transitions close the loop `b–a–c–d–b`.
//! Field labels follow the transitions they drive:
//!
//! | field | transition | Rabi        | detuning   |
//! |-------|------------|-------------|------------|
//! | a1    | a ↔ b      | `omega_a1`  | `delta_a1` |
//! | a2    | d ↔ b      | `omega_a2`  | `delta_a2` |
//! | c1    | c ↔ a      | `omega_c1`  | `delta_c1` |
//! | c2    | c ↔ d      | `omega_c2`  | `delta_c2` |
//!
//! All rates and frequencies are in units of one reference decay rate.

use std::fmt;
use std::str::FromStr;

use crate::algebra::ComplexMatrix;
use crate::error::{Error, Result};

/// Closure mismatch tolerated when no detuning is designated to absorb it.
pub const CLOSURE_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Level {
    A,
    B,
    C,
    D,
}

impl Level {
    pub const ALL: [Level; 4] = [Level::A, Level::B, Level::C, Level::D];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn label(self) -> char {
        match self {
            Level::A => 'a',
            Level::B => 'b',
            Level::C => 'c',
            Level::D => 'd',
        }
    }

    /// The `a ↔ d` relabelling that maps the diamond onto itself.
    pub fn mirrored(self) -> Level {
        match self {
            Level::A => Level::D,
            Level::D => Level::A,
            other => other,
        }
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label())
    }
}

/// One of the four driving fields.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Field {
    A1,
    A2,
    C1,
    C2,
}

impl Field {
    pub fn label(self) -> &'static str {
        match self {
            Field::A1 => "a1",
            Field::A2 => "a2",
            Field::C1 => "c1",
            Field::C2 => "c2",
        }
    }

    pub fn mirrored(self) -> Field {
        match self {
            Field::A1 => Field::A2,
            Field::A2 => Field::A1,
            Field::C1 => Field::C2,
            Field::C2 => Field::C1,
        }
    }
}

/// Which detuning, if any, is rewritten to satisfy loop closure.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ClosureTarget {
    Field(Field),
    None,
}

impl ClosureTarget {
    pub fn label(self) -> &'static str {
        match self {
            ClosureTarget::Field(f) => f.label(),
            ClosureTarget::None => "none",
        }
    }

    pub fn mirrored(self) -> ClosureTarget {
        match self {
            ClosureTarget::Field(f) => ClosureTarget::Field(f.mirrored()),
            ClosureTarget::None => ClosureTarget::None,
        }
    }
}

impl fmt::Display for ClosureTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for ClosureTarget {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "a1" => Ok(ClosureTarget::Field(Field::A1)),
            "a2" => Ok(ClosureTarget::Field(Field::A2)),
            "c1" => Ok(ClosureTarget::Field(Field::C1)),
            "c2" => Ok(ClosureTarget::Field(Field::C2)),
            "none" => Ok(ClosureTarget::None),
            other => Err(format!(
                "unknown closure target '{other}' (valid: a1, a2, c1, c2, none)"
            )),
        }
    }
}

/// The full physical parameter set.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Scenario {
    pub omega_a1: f64,
    pub omega_a2: f64,
    pub omega_c1: f64,
    pub omega_c2: f64,
    pub delta_a1: f64,
    pub delta_a2: f64,
    pub delta_c1: f64,
    pub delta_c2: f64,
    pub gamma1: f64,
    pub gamma2: f64,
    pub gamma3: f64,
    pub gamma4: f64,
    pub closure_target: ClosureTarget,
}

impl Default for Scenario {
    /// No drives, no detunings, unit decay rates.
    fn default() -> Self {
        Self {
            omega_a1: 0.0,
            omega_a2: 0.0,
            omega_c1: 0.0,
            omega_c2: 0.0,
            delta_a1: 0.0,
            delta_a2: 0.0,
            delta_c1: 0.0,
            delta_c2: 0.0,
            gamma1: 1.0,
            gamma2: 1.0,
            gamma3: 1.0,
            gamma4: 1.0,
            closure_target: ClosureTarget::None,
        }
    }
}

impl Scenario {
    pub fn omega(&self, field: Field) -> f64 {
        match field {
            Field::A1 => self.omega_a1,
            Field::A2 => self.omega_a2,
            Field::C1 => self.omega_c1,
            Field::C2 => self.omega_c2,
        }
    }

    pub fn delta(&self, field: Field) -> f64 {
        match field {
            Field::A1 => self.delta_a1,
            Field::A2 => self.delta_a2,
            Field::C1 => self.delta_c1,
            Field::C2 => self.delta_c2,
        }
    }

    pub fn delta_mut(&mut self, field: Field) -> &mut f64 {
        match field {
            Field::A1 => &mut self.delta_a1,
            Field::A2 => &mut self.delta_a2,
            Field::C1 => &mut self.delta_c1,
            Field::C2 => &mut self.delta_c2,
        }
    }

    pub fn gammas(&self) -> [f64; 4] {
        [self.gamma1, self.gamma2, self.gamma3, self.gamma4]
    }

    pub fn all_fields_active(&self) -> bool {
        [Field::A1, Field::A2, Field::C1, Field::C2]
            .iter()
            .all(|&f| self.omega(f) > 0.0)
    }

    /// `δa1 + δc1 − δa2 − δc2`; zero when the loop closes.
    pub fn closure_mismatch(&self) -> f64 {
        self.delta_a1 + self.delta_c1 - self.delta_a2 - self.delta_c2
    }

    pub fn has_zero_detunings(&self) -> bool {
        [self.delta_a1, self.delta_a2, self.delta_c1, self.delta_c2]
            .iter()
            .all(|&d| d == 0.0)
    }

    pub fn validate(&self) -> Result<()> {
        let non_negative = [
            ("omega_a1", self.omega_a1),
            ("omega_a2", self.omega_a2),
            ("omega_c1", self.omega_c1),
            ("omega_c2", self.omega_c2),
            ("gamma1", self.gamma1),
            ("gamma2", self.gamma2),
            ("gamma3", self.gamma3),
            ("gamma4", self.gamma4),
        ];
        for (name, value) in non_negative {
            if !value.is_finite() || value < 0.0 {
                return Err(Error::InvalidScenario(format!(
                    "{name} must be finite and >= 0, got {value}"
                )));
            }
        }
        let detunings = [
            ("delta_a1", self.delta_a1),
            ("delta_a2", self.delta_a2),
            ("delta_c1", self.delta_c1),
            ("delta_c2", self.delta_c2),
        ];
        for (name, value) in detunings {
            if !value.is_finite() {
                return Err(Error::InvalidScenario(format!(
                    "{name} must be finite, got {value}"
                )));
            }
        }
        Ok(())
    }

    /// The `a ↔ d` mirror image: swaps every primed/unprimed pair
    /// (`a1↔a2`, `c1↔c2`, `γ1↔γ2`, `γ3↔γ4`).
    pub fn mirrored(&self) -> Scenario {
        Scenario {
            omega_a1: self.omega_a2,
            omega_a2: self.omega_a1,
            omega_c1: self.omega_c2,
            omega_c2: self.omega_c1,
            delta_a1: self.delta_a2,
            delta_a2: self.delta_a1,
            delta_c1: self.delta_c2,
            delta_c2: self.delta_c1,
            gamma1: self.gamma2,
            gamma2: self.gamma1,
            gamma3: self.gamma4,
            gamma4: self.gamma3,
            closure_target: self.closure_target.mirrored(),
        }
    }
}

/// Rewrites the closure target's detuning so that
/// `δa1 + δc1 = δa2 + δc2`.
///
/// Four fields on a closed loop only admit a time-independent rotating
/// frame when the detunings close. When a field is switched off its
/// detuning is a free frame parameter, which is what lets a probe
/// detuning sweep show up in the Hamiltonian at all.
pub fn closure_complete(s: &Scenario) -> Result<Scenario> {
    s.validate()?;
    let mut out = *s;
    match s.closure_target {
        ClosureTarget::Field(Field::A1) => out.delta_a1 = s.delta_a2 + s.delta_c2 - s.delta_c1,
        ClosureTarget::Field(Field::C1) => out.delta_c1 = s.delta_a2 + s.delta_c2 - s.delta_a1,
        ClosureTarget::Field(Field::A2) => out.delta_a2 = s.delta_a1 + s.delta_c1 - s.delta_c2,
        ClosureTarget::Field(Field::C2) => out.delta_c2 = s.delta_a1 + s.delta_c1 - s.delta_a2,
        ClosureTarget::None => {
            let mismatch = s.closure_mismatch();
            if s.all_fields_active() && mismatch.abs() >= CLOSURE_TOL {
                return Err(Error::ClosureViolated { mismatch });
            }
        }
    }
    Ok(out)
}

/// Real symmetric drive matrix `B` with `H = −ħB`, basis `(a, b, c, d)`.
#[derive(Clone, Debug, PartialEq)]
pub struct HamiltonianMatrix {
    entries: [[f64; 4]; 4],
}

impl HamiltonianMatrix {
    pub fn entries(&self) -> &[[f64; 4]; 4] {
        &self.entries
    }

    pub fn get(&self, row: Level, col: Level) -> f64 {
        self.entries[row.index()][col.index()]
    }

    pub fn to_complex(&self) -> ComplexMatrix {
        ComplexMatrix::from_real_rows(&self.entries)
    }

    /// `P·B·P` with `P` the `a ↔ d` exchange.
    pub fn mirrored(&self) -> HamiltonianMatrix {
        let mut entries = [[0.0; 4]; 4];
        for i in Level::ALL {
            for j in Level::ALL {
                entries[i.index()][j.index()] = self.get(i.mirrored(), j.mirrored());
            }
        }
        HamiltonianMatrix { entries }
    }
}

/// Builds the rotating-frame drive matrix.
///
/// `exclude_probe` zeroes the `c ↔ d` coupling, which is how the dressed
/// states of the three control fields are defined.
pub fn build_hamiltonian(s: &Scenario, exclude_probe: bool) -> HamiltonianMatrix {
    let probe = if exclude_probe { 0.0 } else { s.omega_c2 };
    let top = s.delta_a1 + s.delta_c1;
    HamiltonianMatrix {
        entries: [
            [s.delta_a1, s.omega_a1, s.omega_c1, 0.0],
            [s.omega_a1, 0.0, 0.0, s.omega_a2],
            [s.omega_c1, 0.0, top, probe],
            [0.0, s.omega_a2, probe, s.delta_a2],
        ],
    }
}

/// Spontaneous decay from `from` to `to` at `rate`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DecayChannel {
    pub from: Level,
    pub to: Level,
    pub rate: f64,
}

/// The four decay channels in fixed order: `c→a (γ1)`, `c→d (γ2)`,
/// `a→b (γ3)`, `d→b (γ4)`.
pub fn decay_channels(s: &Scenario) -> [DecayChannel; 4] {
    [
        DecayChannel {
            from: Level::C,
            to: Level::A,
            rate: s.gamma1,
        },
        DecayChannel {
            from: Level::C,
            to: Level::D,
            rate: s.gamma2,
        },
        DecayChannel {
            from: Level::A,
            to: Level::B,
            rate: s.gamma3,
        },
        DecayChannel {
            from: Level::D,
            to: Level::B,
            rate: s.gamma4,
        },
    ]
}
