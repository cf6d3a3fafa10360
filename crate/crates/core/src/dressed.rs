//! Dressed states of the three control fields and the dark-state census.
//!
//! With the probe (`c ↔ d`) switched off and every field on resonance the
//! drive matrix couples `{a, d}` only to `{b, c}`, so its spectrum comes
//! in `±` pairs with the closed form
//!
//! ```text
//! y = Ωa2² + Ωc1² + Ωa1²,   z = y² − 4 Ωa2² Ωc1²,
//! ε = ±√((y − √z)/2),  ±√((y + √z)/2).
//! ```
//!
//! Eigenvectors come from the numerical solver. A dressed state is dark
//! when it has no amplitude on the probe's upper level `|c⟩`; inside a
//! degenerate eigenspace the count is the dimension of the subspace
//! orthogonal to `|c⟩`, which does not depend on how the solver picked a
//! basis for that eigenspace.

use num_complex::Complex64;

use crate::algebra::{herm_eigen, ComplexMatrix};
use crate::atom::{build_hamiltonian, HamiltonianMatrix, Level, Scenario};
use crate::error::{Error, Result};

/// Relative gap below which neighbouring eigenvalues count as degenerate.
pub const DEGENERACY_TOL: f64 = 1e-9;
/// Magnitude below which a `|c⟩` amplitude counts as zero.
pub const RANK_TOL: f64 = 1e-10;
const NEGATIVE_Z_TOL: f64 = 1e-12;

/// The auxiliary quantities of the closed form plus the four eigenvalues,
/// sorted ascending.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClosedFormSpectrum {
    pub w: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub eigenvalues: [f64; 4],
}

/// Closed-form dressed energies at zero detuning, probe excluded.
///
/// `w` and `x` are reported for diagnostics; only `y` and `z` enter the
/// energies.
pub fn closed_form_eigenvalues(s: &Scenario) -> Result<ClosedFormSpectrum> {
    s.validate()?;
    if !s.has_zero_detunings() {
        return Err(Error::NonZeroDetuning);
    }
    let a1 = s.omega_a1 * s.omega_a1;
    let a2 = s.omega_a2 * s.omega_a2;
    let c1 = s.omega_c1 * s.omega_c1;

    let w = a2 - c1 + a1;
    let x = a2 - c1 - a1;
    let y = a2 + c1 + a1;
    let mut z = y * y - 4.0 * a2 * c1;
    if z < -NEGATIVE_Z_TOL {
        return Err(Error::ClosedFormInconsistent { z });
    }
    if z < 0.0 {
        z = 0.0;
    }
    let root_z = z.sqrt();
    let upper = ((y + root_z) / 2.0).sqrt();
    // (y − √z)/2 rewritten as 2Ωa2²Ωc1²/(y + √z): same value, no cancellation.
    let lower = if y + root_z > 0.0 {
        (2.0 * a2 * c1 / (y + root_z)).sqrt()
    } else {
        0.0
    };
    Ok(ClosedFormSpectrum {
        w,
        x,
        y,
        z,
        eigenvalues: [-upper, -lower, lower, upper],
    })
}

/// Numerical dressed states with their degeneracy structure.
#[derive(Clone, Debug)]
pub struct DressedSpectrum {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
    /// Index clusters of (numerically) equal eigenvalues, in ascending order.
    pub groups: Vec<Vec<usize>>,
}

impl DressedSpectrum {
    /// Diagonalizes an arbitrary drive matrix.
    pub fn from_hamiltonian(b: &HamiltonianMatrix) -> Result<Self> {
        let eig = herm_eigen(&b.to_complex())?;
        let groups = degenerate_groups(&eig.eigenvalues);
        Ok(Self {
            eigenvalues: eig.eigenvalues,
            eigenvectors: eig.eigenvectors,
            groups,
        })
    }

    pub fn eigenvector(&self, k: usize) -> Vec<Complex64> {
        self.eigenvectors.column(k)
    }

    pub fn is_degenerate(&self) -> bool {
        self.groups.iter().any(|g| g.len() > 1)
    }
}

fn degenerate_groups(eigenvalues: &[f64]) -> Vec<Vec<usize>> {
    let scale = eigenvalues.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let tol = DEGENERACY_TOL * (1.0 + scale);
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for (k, &value) in eigenvalues.iter().enumerate() {
        match groups.last_mut() {
            Some(group) if value - eigenvalues[*group.last().unwrap()] < tol => group.push(k),
            _ => groups.push(vec![k]),
        }
    }
    groups
}

/// Dressed states of the control fields: zero detunings, probe excluded.
pub fn dressed_spectrum(s: &Scenario) -> Result<DressedSpectrum> {
    s.validate()?;
    if !s.has_zero_detunings() {
        return Err(Error::NonZeroDetuning);
    }
    DressedSpectrum::from_hamiltonian(&build_hamiltonian(s, true))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DarkReport {
    /// Dark dimension of each degenerate group, aligned with `groups`.
    pub per_group: Vec<usize>,
    pub total_dark: usize,
    pub degenerate: bool,
}

/// Counts dressed directions with no `|c⟩` amplitude.
///
/// For a group of `k` eigenvectors the `c` components form a `1×k` row;
/// the dark dimension is `k` minus the rank of that row.
pub fn dark_classification(spectrum: &DressedSpectrum) -> DarkReport {
    let c = Level::C.index();
    let per_group: Vec<usize> = spectrum
        .groups
        .iter()
        .map(|group| {
            let rank = group
                .iter()
                .any(|&k| spectrum.eigenvectors[(c, k)].norm() > RANK_TOL);
            group.len() - usize::from(rank)
        })
        .collect();
    DarkReport {
        total_dark: per_group.iter().sum(),
        degenerate: spectrum.is_degenerate(),
        per_group,
    }
}
