//! Probe-detuning sweeps of the steady state and the spectral features
//! read off them: transparency windows and gain regions.
//!
//! Grid points are independent and are solved in parallel; each row is
//! keyed by its grid index, so the result does not depend on scheduling.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::atom::{closure_complete, ClosureTarget, Field, Level, Scenario};
use crate::error::{Error, Result};
use crate::lindblad::{build_liouvillian, steady_state, DensityMatrix};

pub const DEFAULT_DELTA_MIN: f64 = -25.0;
pub const DEFAULT_DELTA_MAX: f64 = 25.0;
pub const DEFAULT_POINTS: usize = 1001;
pub const DEFAULT_THRESHOLD_FRACTION: f64 = 0.1;
/// Imaginary parts below `-GAIN_TOL` count as gain.
pub const GAIN_TOL: f64 = 1e-9;

/// A density-matrix entry that can be tabulated along a sweep.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Observable {
    Population(Level),
    /// `ρ_{upper, lower}` as labelled, e.g. `Coherence(C, D)` is `ρ_cd`.
    Coherence(Level, Level),
}

impl Observable {
    pub const KEYS: [&'static str; 11] = [
        "pop_a", "pop_b", "pop_c", "pop_d", "cd", "ca", "db", "cb", "ab", "ad", "bd",
    ];

    /// The seven coherences reported by a sweep, in column order.
    pub const COHERENCES: [Observable; 7] = [
        Observable::Coherence(Level::C, Level::D),
        Observable::Coherence(Level::C, Level::A),
        Observable::Coherence(Level::D, Level::B),
        Observable::Coherence(Level::C, Level::B),
        Observable::Coherence(Level::A, Level::B),
        Observable::Coherence(Level::A, Level::D),
        Observable::Coherence(Level::B, Level::D),
    ];

    pub fn is_coherence(self) -> bool {
        matches!(self, Observable::Coherence(..))
    }

    pub fn key(self) -> String {
        match self {
            Observable::Population(l) => format!("pop_{l}"),
            Observable::Coherence(i, j) => format!("{i}{j}"),
        }
    }
}

impl fmt::Display for Observable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.key())
    }
}

impl FromStr for Observable {
    type Err = Error;

    fn from_str(key: &str) -> Result<Self> {
        use Level::{A, B, C, D};
        let obs = match key {
            "pop_a" => Observable::Population(A),
            "pop_b" => Observable::Population(B),
            "pop_c" => Observable::Population(C),
            "pop_d" => Observable::Population(D),
            "cd" => Observable::Coherence(C, D),
            "ca" => Observable::Coherence(C, A),
            "db" => Observable::Coherence(D, B),
            "cb" => Observable::Coherence(C, B),
            "ab" => Observable::Coherence(A, B),
            "ad" => Observable::Coherence(A, D),
            "bd" => Observable::Coherence(B, D),
            _ => {
                return Err(Error::UnknownObservable {
                    key: key.to_string(),
                    valid: Observable::KEYS.join(", "),
                })
            }
        };
        Ok(obs)
    }
}

/// Reads one observable off a density matrix; populations come back real.
pub fn extract_observable(rho: &DensityMatrix, key: Observable) -> Complex64 {
    match key {
        Observable::Population(l) => Complex64::new(rho.population(l), 0.0),
        Observable::Coherence(i, j) => rho.get(i, j),
    }
}

/// A uniform, endpoint-inclusive grid of probe detunings `δc2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepSpec {
    pub delta_min: f64,
    pub delta_max: f64,
    pub points: usize,
    pub base: Scenario,
}

impl SweepSpec {
    pub fn new(base: Scenario) -> Self {
        Self {
            delta_min: DEFAULT_DELTA_MIN,
            delta_max: DEFAULT_DELTA_MAX,
            points: DEFAULT_POINTS,
            base,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.delta_min.is_finite() && self.delta_max.is_finite()) {
            return Err(Error::InvalidSweep("sweep bounds must be finite".into()));
        }
        if self.delta_min >= self.delta_max {
            return Err(Error::InvalidSweep(format!(
                "delta_min ({}) must be below delta_max ({})",
                self.delta_min, self.delta_max
            )));
        }
        if self.points < 2 {
            return Err(Error::TooFewPoints {
                needed: 2,
                actual: self.points,
            });
        }
        if self.base.closure_target == ClosureTarget::Field(Field::C2) {
            return Err(Error::InvalidSweep(
                "closure target c2 would overwrite the swept probe detuning".into(),
            ));
        }
        self.base.validate()
    }

    pub fn grid_point(&self, k: usize) -> f64 {
        if k + 1 == self.points {
            return self.delta_max;
        }
        let span = self.delta_max - self.delta_min;
        self.delta_min + span * k as f64 / (self.points - 1) as f64
    }

    pub fn grid(&self) -> Vec<f64> {
        (0..self.points).map(|k| self.grid_point(k)).collect()
    }

    pub fn step(&self) -> f64 {
        (self.delta_max - self.delta_min) / (self.points - 1) as f64
    }

    /// The closure-completed scenario at probe detuning `delta`.
    pub fn scenario_at(&self, delta: f64) -> Result<Scenario> {
        closure_complete(&Scenario {
            delta_c2: delta,
            ..self.base
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepPoint {
    pub delta: f64,
    pub rho: DensityMatrix,
}

impl SweepPoint {
    pub fn populations(&self) -> [f64; 4] {
        self.rho.populations()
    }

    pub fn observable(&self, key: Observable) -> Complex64 {
        extract_observable(&self.rho, key)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepResult {
    pub rows: Vec<SweepPoint>,
}

impl SweepResult {
    pub fn deltas(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.delta).collect()
    }

    pub fn series(&self, key: Observable) -> Vec<Complex64> {
        self.rows.iter().map(|r| r.observable(key)).collect()
    }

    /// Imaginary part of a coherence along the sweep.
    pub fn imag_series(&self, key: Observable) -> Result<Vec<f64>> {
        if !key.is_coherence() {
            return Err(Error::NotACoherence(key.key()));
        }
        Ok(self.rows.iter().map(|r| r.observable(key).im).collect())
    }

    /// Row whose detuning is closest to `delta`.
    pub fn nearest(&self, delta: f64) -> Option<&SweepPoint> {
        self.rows
            .iter()
            .min_by(|a, b| (a.delta - delta).abs().total_cmp(&(b.delta - delta).abs()))
    }
}

/// Solves the steady state at every grid point.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepResult> {
    spec.validate()?;
    let rows = (0..spec.points)
        .into_par_iter()
        .map(|k| {
            let delta = spec.grid_point(k);
            solve_point(spec, delta).map_err(|e| Error::SweepPoint {
                delta,
                source: Box::new(e),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepResult { rows })
}

fn solve_point(spec: &SweepSpec, delta: f64) -> Result<SweepPoint> {
    let scenario = spec.scenario_at(delta)?;
    let rho = steady_state(&build_liouvillian(&scenario))?;
    Ok(SweepPoint { delta, rho })
}

/// A transparency window: a dip of an absorption profile below a fraction
/// of its peak.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EitWindow {
    /// Detuning of the deepest point.
    pub center: f64,
    /// Half the distance between the interpolated threshold crossings.
    pub half_width: f64,
    /// Observable value at the centre; always below `threshold`.
    pub depth: f64,
    pub threshold: f64,
}

impl EitWindow {
    /// Depth as a fraction of the threshold.
    pub fn relative_depth(&self) -> f64 {
        self.depth / self.threshold
    }
}

/// Finds transparency windows in `Im(observable)`.
///
/// The threshold is `threshold_fraction × max`. Windows are maximal runs of
/// sub-threshold samples holding at least one local minimum away from the
/// sweep ends; runs split only by a single above-threshold sample merge.
pub fn detect_windows(
    result: &SweepResult,
    observable: Observable,
    threshold_fraction: f64,
) -> Result<Vec<EitWindow>> {
    if result.rows.len() < 3 {
        return Err(Error::TooFewPoints {
            needed: 3,
            actual: result.rows.len(),
        });
    }
    if !(threshold_fraction > 0.0 && threshold_fraction < 1.0) {
        return Err(Error::InvalidSweep(format!(
            "threshold fraction must lie in (0, 1), got {threshold_fraction}"
        )));
    }
    let y = result.imag_series(observable)?;
    let x = result.deltas();
    let peak = y.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let threshold = threshold_fraction * peak;

    let mut runs: Vec<(usize, usize)> = Vec::new();
    let mut k = 0;
    while k < y.len() {
        if y[k] < threshold {
            let start = k;
            while k + 1 < y.len() && y[k + 1] < threshold {
                k += 1;
            }
            match runs.last_mut() {
                Some(prev) if start - prev.1 <= 2 => prev.1 = k,
                _ => runs.push((start, k)),
            }
        }
        k += 1;
    }

    let n = y.len();
    let is_local_min = |i: usize| {
        i > 0
            && i + 1 < n
            && y[i] <= y[i - 1]
            && y[i] <= y[i + 1]
            && (y[i] < y[i - 1] || y[i] < y[i + 1])
    };
    let crossing = |inside: usize, outside: usize| {
        let (yi, yo) = (y[inside], y[outside]);
        let t = (threshold - yi) / (yo - yi);
        x[inside] + t * (x[outside] - x[inside])
    };

    let windows = runs
        .into_iter()
        .filter(|&(start, end)| (start..=end).any(|i| y[i] < threshold && is_local_min(i)))
        .map(|(start, end)| {
            let center_idx = (start..=end)
                .min_by(|&a, &b| y[a].total_cmp(&y[b]).then(a.cmp(&b)))
                .expect("non-empty run");
            let left = if start == 0 {
                x[0]
            } else {
                crossing(start, start - 1)
            };
            let right = if end + 1 == n {
                x[n - 1]
            } else {
                crossing(end, end + 1)
            };
            EitWindow {
                center: x[center_idx],
                half_width: (right - left) / 2.0,
                depth: y[center_idx],
                threshold,
            }
        })
        .collect();
    Ok(windows)
}

/// Maximal detuning intervals where `Im(observable) < −1e-9`.
pub fn detect_gain(result: &SweepResult, observable: Observable) -> Result<Vec<(f64, f64)>> {
    let y = result.imag_series(observable)?;
    let x = result.deltas();
    let mut intervals = Vec::new();
    let mut start: Option<usize> = None;
    for (k, &v) in y.iter().enumerate() {
        match (v < -GAIN_TOL, start) {
            (true, None) => start = Some(k),
            (false, Some(s)) => {
                intervals.push((x[s], x[k - 1]));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        intervals.push((x[s], x[y.len() - 1]));
    }
    Ok(intervals)
}
