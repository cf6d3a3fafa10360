//! Master equation: Liouvillian assembly, steady state, time evolution,
//! and an element-by-element transcription of the equations of motion
//! used as an independent check on the superoperator.
//!
//! Density matrices are vectorized row-major, `vec(ρ)[4i + j] = ρ_ij`, with
//! levels ordered `(a, b, c, d)`. Under this convention
//! `vec(X ρ Y) = (X ⊗ Yᵀ) vec(ρ)`.

use num_complex::Complex64;

use crate::algebra::{herm_eigen, solve_linear, ComplexMatrix};
use crate::atom::{build_hamiltonian, decay_channels, Level, Scenario};
use crate::error::{Error, Result};

pub const DIM: usize = 4;
pub const SUPER_DIM: usize = DIM * DIM;

const HERMITIAN_TOL: f64 = 1e-9;
const TRACE_TOL: f64 = 1e-9;
const POSITIVITY_TOL: f64 = 1e-8;
const STEADY_RESIDUAL_TOL: f64 = 1e-10;
/// `‖x‖·‖M‖` above `1/STEADY_CONDITION_TOL` marks a near-singular system.
const STEADY_CONDITION_TOL: f64 = 1e-12;
const STABILITY_LIMIT: f64 = 0.5;

pub const DEFAULT_DT: f64 = 1e-3;
pub const DEFAULT_T_FINAL: f64 = 200.0;

#[inline]
pub fn vec_index(row: Level, col: Level) -> usize {
    DIM * row.index() + col.index()
}

/// A validated 4×4 density matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity.
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if matrix.rows() != DIM || matrix.cols() != DIM {
            return Err(Error::InvalidDensityMatrix(format!(
                "expected 4x4, got {}x{}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        let rho = Self { matrix };
        rho.check().map_err(Error::InvalidDensityMatrix)?;
        Ok(rho)
    }

    /// Wraps a matrix without checking the invariants.
    pub fn new_unchecked(matrix: ComplexMatrix) -> Self {
        Self { matrix }
    }

    /// `|level⟩⟨level|`.
    pub fn pure(level: Level) -> Self {
        let mut m = ComplexMatrix::zeros(DIM, DIM);
        m[(level.index(), level.index())] = Complex64::new(1.0, 0.0);
        Self { matrix: m }
    }

    /// `|ψ⟩⟨ψ|` for a normalized copy of `amplitudes`.
    pub fn from_state(amplitudes: [Complex64; 4]) -> Result<Self> {
        let norm: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidDensityMatrix("zero state vector".into()));
        }
        let psi = amplitudes.map(|z| z / norm);
        Self::new(ComplexMatrix::from_fn(DIM, DIM, |i, j| {
            psi[i] * psi[j].conj()
        }))
    }

    pub fn from_vectorized(v: &[Complex64]) -> Result<Self> {
        Self::new(ComplexMatrix::new(DIM, DIM, v.to_vec())?)
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn vectorized(&self) -> Vec<Complex64> {
        self.matrix.as_slice().to_vec()
    }

    pub fn get(&self, row: Level, col: Level) -> Complex64 {
        self.matrix[(row.index(), col.index())]
    }

    pub fn population(&self, level: Level) -> f64 {
        self.get(level, level).re
    }

    pub fn populations(&self) -> [f64; 4] {
        Level::ALL.map(|l| self.population(l))
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.trace()
    }

    pub fn hermiticity_defect(&self) -> f64 {
        self.matrix.hermiticity_defect()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        // Symmetrize first so the eigensolver's tighter tolerance applies.
        let sym = self.symmetrized();
        herm_eigen(&sym.matrix)
            .map(|e| e.eigenvalues[0])
            .unwrap_or(f64::NEG_INFINITY)
    }

    /// `(ρ + ρ†)/2`.
    pub fn symmetrized(&self) -> Self {
        let m = &self.matrix;
        Self {
            matrix: ComplexMatrix::from_fn(DIM, DIM, |i, j| (m[(i, j)] + m[(j, i)].conj()) * 0.5),
        }
    }

    /// `P ρ P` with `P` the `a ↔ d` exchange.
    pub fn mirrored(&self) -> Self {
        Self {
            matrix: ComplexMatrix::from_fn(DIM, DIM, |i, j| {
                self.get(Level::ALL[i].mirrored(), Level::ALL[j].mirrored())
            }),
        }
    }

    /// Largest entrywise difference.
    pub fn distance(&self, other: &Self) -> f64 {
        (&self.matrix - &other.matrix).max_abs()
    }

    fn check(&self) -> std::result::Result<(), String> {
        if self
            .matrix
            .as_slice()
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err("non-finite entry".into());
        }
        let defect = self.hermiticity_defect();
        if defect >= HERMITIAN_TOL {
            return Err(format!("Hermiticity defect {defect:.3e}"));
        }
        let trace = self.trace();
        if (trace - 1.0).norm() >= TRACE_TOL {
            return Err(format!("trace {trace} differs from 1"));
        }
        let min = self.min_eigenvalue();
        if min < -POSITIVITY_TOL {
            return Err(format!("negative eigenvalue {min:.3e}"));
        }
        Ok(())
    }
}

/// Generator of the master equation acting on `vec(ρ)`.
#[derive(Clone, Debug)]
pub struct Liouvillian {
    matrix: ComplexMatrix,
}

impl Liouvillian {
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn apply(&self, rho: &DensityMatrix) -> ComplexMatrix {
        let out = self.matrix.mul_vec(rho.matrix.as_slice());
        ComplexMatrix::new(DIM, DIM, out).expect("16 entries")
    }

    pub fn norm_inf(&self) -> f64 {
        self.matrix.norm_inf()
    }
}

/// `dρ/dt = i[B, ρ] + Σ_k (γ_k/2)(2 A_k ρ A_k† − A_k†A_k ρ − ρ A_k†A_k)`.
///
/// The sign of the commutator follows from `H = −ħB`. Jump operators are
/// `A_k = |to⟩⟨from|` for each decay channel.
pub fn build_liouvillian(s: &Scenario) -> Liouvillian {
    let b = build_hamiltonian(s, false).to_complex();
    let id = ComplexMatrix::identity(DIM);
    let i = Complex64::new(0.0, 1.0);

    let mut l = (&b.kron(&id) - &id.kron(&b.transpose())).scale(i);
    for channel in decay_channels(s) {
        if channel.rate == 0.0 {
            continue;
        }
        let mut jump = ComplexMatrix::zeros(DIM, DIM);
        jump[(channel.to.index(), channel.from.index())] = Complex64::new(1.0, 0.0);
        let number = &jump.adjoint() * &jump;
        let gain = jump.kron(&jump.conj()).scale(Complex64::new(2.0, 0.0));
        let loss = &number.kron(&id) + &id.kron(&number.transpose());
        let term = (&gain - &loss).scale(Complex64::new(channel.rate / 2.0, 0.0));
        l = &l + &term;
    }
    Liouvillian { matrix: l }
}

/// Right-hand side of the master equation written out element by element.
///
/// Populations and the six upper-triangle coherences are transcribed
/// term by term; the lower triangle follows by conjugation. Kept separate
/// from [`build_liouvillian`] so the two can check each other.
pub fn eom_rhs(s: &Scenario, rho: &DensityMatrix) -> ComplexMatrix {
    let i = Complex64::new(0.0, 1.0);
    let r = |a: Level, b: Level| rho.get(a, b);
    use Level::{A, B, C, D};

    let (oa1, oa2, oc1, oc2) = (s.omega_a1, s.omega_a2, s.omega_c1, s.omega_c2);
    let (da1, da2, dc1) = (s.delta_a1, s.delta_a2, s.delta_c1);
    let (g1, g2, g3, g4) = (s.gamma1, s.gamma2, s.gamma3, s.gamma4);

    let aa = -g3 * r(A, A)
        + g1 * r(C, C)
        + i * oa1 * (r(B, A) - r(A, B))
        + i * oc1 * (r(C, A) - r(A, C));
    let bb =
        g3 * r(A, A) + g4 * r(D, D) + i * oa1 * (r(A, B) - r(B, A)) + i * oa2 * (r(D, B) - r(B, D));
    let cc = -(g1 + g2) * r(C, C) + i * oc1 * (r(A, C) - r(C, A)) + i * oc2 * (r(D, C) - r(C, D));
    let dd =
        g2 * r(C, C) - g4 * r(D, D) + i * oa2 * (r(B, D) - r(D, B)) + i * oc2 * (r(C, D) - r(D, C));

    let ab = (i * da1 - g3 / 2.0) * r(A, B) + i * oa1 * (r(B, B) - r(A, A)) - i * oa2 * r(A, D)
        + i * oc1 * r(C, B);
    let ac = -(i * dc1 + 0.5 * (g1 + g2 + g3)) * r(A, C) + i * oc1 * (r(C, C) - r(A, A))
        - i * oc2 * r(A, D)
        + i * oa1 * r(B, C);
    let ad = (i * (da1 - da2) - 0.5 * (g3 + g4)) * r(A, D) - i * oa2 * r(A, B) - i * oc2 * r(A, C)
        + i * oa1 * r(B, D)
        + i * oc1 * r(C, D);
    let bc = -(i * (dc1 + da1) + 0.5 * (g1 + g2)) * r(B, C) - i * oc1 * r(B, A)
        + i * oa1 * r(A, C)
        + i * oa2 * r(D, C)
        - i * oc2 * r(B, D);
    let bd = -(i * da2 + g4 / 2.0) * r(B, D) - i * oa2 * (r(B, B) - r(D, D)) + i * oa1 * r(A, D)
        - i * oc2 * r(B, C);
    let cd = (i * (da1 + dc1 - da2) - 0.5 * (g1 + g2 + g4)) * r(C, D)
        - i * oc2 * (r(C, C) - r(D, D))
        + i * oc1 * r(A, D)
        - i * oa2 * r(C, B);

    let mut out = ComplexMatrix::zeros(DIM, DIM);
    let mut put = |a: Level, b: Level, v: Complex64| {
        out[(a.index(), b.index())] = v;
        if a != b {
            out[(b.index(), a.index())] = v.conj();
        }
    };
    put(A, A, aa);
    put(B, B, bb);
    put(C, C, cc);
    put(D, D, dd);
    put(A, B, ab);
    put(A, C, ac);
    put(A, D, ad);
    put(B, C, bc);
    put(B, D, bd);
    put(C, D, cd);
    out
}

/// Unique unit-trace null vector of `L`.
///
/// The `(a, a)` row is replaced by the trace condition; the resulting
/// system is solved directly and the answer re-verified against the
/// original generator.
pub fn steady_state(l: &Liouvillian) -> Result<DensityMatrix> {
    let mut system = l.matrix.clone();
    let trace_row = vec_index(Level::A, Level::A);
    for j in 0..SUPER_DIM {
        system[(trace_row, j)] = Complex64::new(0.0, 0.0);
    }
    for level in Level::ALL {
        system[(trace_row, vec_index(level, level))] = Complex64::new(1.0, 0.0);
    }
    let mut rhs = vec![Complex64::new(0.0, 0.0); SUPER_DIM];
    rhs[trace_row] = Complex64::new(1.0, 0.0);

    let norm = system.norm_inf();
    let x = solve_linear(&system, &rhs).map_err(|e| match e {
        Error::Singular { pivot } => {
            Error::NonUniqueSteadyState(format!("singular system at pivot {pivot}"))
        }
        Error::InaccurateSolve { residual, .. } => {
            Error::NonUniqueSteadyState(format!("solve residual {residual:.3e}"))
        }
        other => other,
    })?;
    // Reject near-singular systems whose solution is dominated by rounding.
    let x_norm = x.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if x_norm * STEADY_CONDITION_TOL * norm > 1.0 {
        return Err(Error::NonUniqueSteadyState(format!(
            "ill-conditioned system (|x| = {x_norm:.3e})"
        )));
    }

    let bound = STEADY_RESIDUAL_TOL * (1.0 + l.norm_inf());
    let generator_residual = l
        .matrix
        .mul_vec(&x)
        .iter()
        .fold(0.0f64, |m, z| m.max(z.norm()));
    let system_residual = system
        .mul_vec(&x)
        .iter()
        .zip(&rhs)
        .fold(0.0f64, |m, (p, q)| m.max((p - q).norm()));
    let residual = generator_residual.max(system_residual);
    if residual >= bound {
        return Err(Error::NonUniqueSteadyState(format!(
            "residual {residual:.3e} exceeds {bound:.3e}"
        )));
    }

    let rho = DensityMatrix::new_unchecked(ComplexMatrix::new(DIM, DIM, x)?).symmetrized();
    rho.check().map_err(|detail| {
        Error::NonUniqueSteadyState(format!("solution is not a density matrix: {detail}"))
    })?;
    Ok(rho)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EvolveOptions {
    pub t_final: f64,
    pub dt: f64,
    /// Number of evenly spaced samples to record after `t = 0`; zero
    /// records only the final state.
    pub samples: usize,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        Self {
            t_final: DEFAULT_T_FINAL,
            dt: DEFAULT_DT,
            samples: 0,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub final_state: DensityMatrix,
    /// `(t, ρ(t))`, starting with the initial state when sampling is on.
    pub samples: Vec<(f64, DensityMatrix)>,
    pub steps: usize,
}

/// Integrates the master equation with classical fixed-step RK4.
pub fn evolve(s: &Scenario, rho0: &DensityMatrix, options: EvolveOptions) -> Result<Trajectory> {
    evolve_with(&build_liouvillian(s), rho0, options)
}

pub fn evolve_with(
    l: &Liouvillian,
    rho0: &DensityMatrix,
    options: EvolveOptions,
) -> Result<Trajectory> {
    let EvolveOptions {
        t_final,
        dt,
        samples,
    } = options;
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidEvolution(format!(
            "dt must be positive, got {dt}"
        )));
    }
    if !(t_final >= 0.0 && t_final.is_finite()) {
        return Err(Error::InvalidEvolution(format!(
            "t_final must be >= 0, got {t_final}"
        )));
    }
    let product = dt * l.norm_inf();
    if product >= STABILITY_LIMIT {
        return Err(Error::StepTooLarge { dt, product });
    }

    let steps = (t_final / dt - 1e-9).ceil().max(0.0) as usize;
    let h = if steps == 0 {
        0.0
    } else {
        t_final / steps as f64
    };
    let sample_at: Vec<usize> = if samples == 0 || steps == 0 {
        Vec::new()
    } else {
        (1..=samples)
            .map(|k| ((k as f64 * steps as f64) / samples as f64).round() as usize)
            .collect()
    };

    let m = l.matrix();
    let mut state = rho0.vectorized();
    let mut k1 = vec![Complex64::new(0.0, 0.0); SUPER_DIM];
    let mut k2 = k1.clone();
    let mut k3 = k1.clone();
    let mut k4 = k1.clone();
    let mut scratch = k1.clone();

    let mut recorded = Vec::with_capacity(sample_at.len() + 1);
    if !sample_at.is_empty() {
        recorded.push((0.0, rho0.clone()));
    }
    let mut next_sample = 0;

    for step in 1..=steps {
        m.mul_vec_into(&state, &mut k1);
        for j in 0..SUPER_DIM {
            scratch[j] = state[j] + k1[j] * (h / 2.0);
        }
        m.mul_vec_into(&scratch, &mut k2);
        for j in 0..SUPER_DIM {
            scratch[j] = state[j] + k2[j] * (h / 2.0);
        }
        m.mul_vec_into(&scratch, &mut k3);
        for j in 0..SUPER_DIM {
            scratch[j] = state[j] + k3[j] * h;
        }
        m.mul_vec_into(&scratch, &mut k4);
        for j in 0..SUPER_DIM {
            state[j] += (k1[j] + (k2[j] + k3[j]) * 2.0 + k4[j]) * (h / 6.0);
        }

        while next_sample < sample_at.len() && sample_at[next_sample] == step {
            let rho = DensityMatrix::new_unchecked(ComplexMatrix::new(DIM, DIM, state.clone())?);
            rho.check()
                .map_err(|detail| Error::InvariantViolation { step, detail })?;
            recorded.push((step as f64 * h, rho));
            next_sample += 1;
        }
    }

    let final_state =
        DensityMatrix::new_unchecked(ComplexMatrix::new(DIM, DIM, state)?).symmetrized();
    final_state
        .check()
        .map_err(|detail| Error::InvariantViolation {
            step: steps,
            detail,
        })?;
    Ok(Trajectory {
        final_state,
        samples: recorded,
        steps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atom::{closure_complete, ClosureTarget, Field};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn fig5() -> Scenario {
        Scenario {
            omega_a2: 15.0,
            omega_c2: 1.0,
            omega_c1: 10.0,
            closure_target: ClosureTarget::Field(Field::A1),
            ..Scenario::default()
        }
    }

    fn random_hermitian_unit_trace(rng: &mut ChaCha8Rng) -> DensityMatrix {
        let mut m = ComplexMatrix::zeros(DIM, DIM);
        for i in 0..DIM {
            m[(i, i)] = Complex64::new(rng.gen_range(0.0..1.0), 0.0);
            for j in (i + 1)..DIM {
                let z = Complex64::new(rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5));
                m[(i, j)] = z;
                m[(j, i)] = z.conj();
            }
        }
        let tr = m.trace();
        DensityMatrix::new_unchecked(m.scale(tr.inv()))
    }

    #[test]
    fn no_dynamics_means_zero_generator() {
        let s = Scenario {
            gamma1: 0.0,
            gamma2: 0.0,
            gamma3: 0.0,
            gamma4: 0.0,
            ..Scenario::default()
        };
        assert_eq!(build_liouvillian(&s).matrix().max_abs(), 0.0);
    }

    #[test]
    fn upper_level_decay_rates() {
        let s = Scenario {
            gamma3: 0.0,
            gamma4: 0.0,
            ..Scenario::default()
        };
        let d = build_liouvillian(&s).apply(&DensityMatrix::pure(Level::C));
        assert_eq!(d[(2, 2)], Complex64::new(-2.0, 0.0));
        assert_eq!(d[(0, 0)], Complex64::new(1.0, 0.0));
        assert_eq!(d[(3, 3)], Complex64::new(1.0, 0.0));

        let full = eom_rhs(&Scenario::default(), &DensityMatrix::pure(Level::C));
        assert_eq!(full[(2, 2)].re, -2.0);
        assert_eq!(full[(0, 0)].re, 1.0);
        assert_eq!(full[(3, 3)].re, 1.0);
        assert_eq!(full[(1, 1)].re, 0.0);
    }

    #[test]
    fn ground_state_is_stationary_under_decay() {
        let d = eom_rhs(&Scenario::default(), &DensityMatrix::pure(Level::B));
        assert_eq!(d.max_abs(), 0.0);
    }

    #[test]
    fn generator_matches_equations_of_motion() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for delta in [-10.0, 0.0, 3.5] {
            let s = closure_complete(&Scenario {
                delta_c2: delta,
                ..fig5()
            })
            .unwrap();
            let l = build_liouvillian(&s);
            for _ in 0..100 {
                let rho = random_hermitian_unit_trace(&mut rng);
                let diff = (&l.apply(&rho) - &eom_rhs(&s, &rho)).max_abs();
                assert!(diff < 1e-12, "difference {diff}");
            }
        }
    }

    #[test]
    fn generator_preserves_trace_and_hermiticity() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let s = Scenario {
            omega_a1: 1.3,
            omega_a2: 0.7,
            omega_c1: 2.1,
            omega_c2: 0.4,
            delta_a1: 0.3,
            delta_c1: -1.2,
            delta_a2: 0.5,
            delta_c2: -1.4,
            gamma1: 0.5,
            gamma2: 1.5,
            gamma3: 0.8,
            gamma4: 1.1,
            closure_target: ClosureTarget::None,
        };
        let l = build_liouvillian(&s);
        let m = l.matrix();
        for j in 0..SUPER_DIM {
            let col_sum: Complex64 = Level::ALL.iter().map(|&lv| m[(vec_index(lv, lv), j)]).sum();
            assert!(col_sum.norm() < 1e-12);
        }
        for _ in 0..20 {
            let rho = random_hermitian_unit_trace(&mut rng);
            let d = l.apply(&rho);
            assert!(d.hermiticity_defect() < 1e-12);
        }
    }

    #[test]
    fn steady_state_without_drives_is_ground() {
        let rho = steady_state(&build_liouvillian(&Scenario::default())).unwrap();
        assert!(rho.distance(&DensityMatrix::pure(Level::B)) < 1e-14);
    }

    #[test]
    fn steady_state_needs_dissipation() {
        let none = Scenario {
            gamma1: 0.0,
            gamma2: 0.0,
            gamma3: 0.0,
            gamma4: 0.0,
            ..Scenario::default()
        };
        for s in [
            none,
            Scenario {
                omega_a2: 15.0,
                omega_c1: 10.0,
                omega_c2: 1.0,
                ..none
            },
            Scenario {
                omega_a1: 1.0,
                omega_a2: 2.0,
                omega_c1: 3.0,
                omega_c2: 4.0,
                ..none
            },
            Scenario {
                omega_a1: 0.1,
                omega_c1: 5.0,
                omega_c2: 0.1,
                delta_a2: 2.0,
                ..none
            },
        ] {
            let err = steady_state(&build_liouvillian(&s)).unwrap_err();
            assert!(
                matches!(err, Error::NonUniqueSteadyState(_)),
                "{s:?}: {err}"
            );
        }
    }

    #[test]
    fn steady_state_agrees_with_long_evolution() {
        let s = closure_complete(&fig5()).unwrap();
        let l = build_liouvillian(&s);
        let ss = steady_state(&l).unwrap();
        let traj =
            evolve_with(&l, &DensityMatrix::pure(Level::B), EvolveOptions::default()).unwrap();
        assert!(ss.distance(&traj.final_state) < 1e-6);
    }

    #[test]
    fn upper_level_decays_exponentially() {
        let traj = evolve(
            &Scenario::default(),
            &DensityMatrix::pure(Level::C),
            EvolveOptions {
                t_final: 1.0,
                dt: 1e-3,
                samples: 0,
            },
        )
        .unwrap();
        let cc = traj.final_state.population(Level::C);
        assert!((cc - (-2.0f64).exp()).abs() < 1e-8, "{cc}");
        assert!((cc - 0.135335).abs() < 1e-6);
    }

    #[test]
    fn ground_state_does_not_move() {
        let start = DensityMatrix::pure(Level::B);
        let traj = evolve(
            &Scenario::default(),
            &start,
            EvolveOptions {
                t_final: 5.0,
                dt: 1e-2,
                samples: 10,
            },
        )
        .unwrap();
        assert_eq!(traj.samples.len(), 11);
        for (_, rho) in &traj.samples {
            assert_eq!(rho, &start);
        }
    }

    #[test]
    fn stability_guard() {
        let s = closure_complete(&fig5()).unwrap();
        let err = evolve(
            &s,
            &DensityMatrix::pure(Level::B),
            EvolveOptions {
                t_final: 1.0,
                dt: 0.1,
                samples: 0,
            },
        )
        .unwrap_err();
        assert!(matches!(err, Error::StepTooLarge { .. }));
        let err = evolve(
            &s,
            &DensityMatrix::pure(Level::B),
            EvolveOptions {
                t_final: 1.0,
                dt: 0.0,
                samples: 0,
            },
        )
        .unwrap_err();
        assert!(matches!(err, Error::InvalidEvolution(_)));
    }

    #[test]
    fn zero_duration_returns_initial_state() {
        let start = DensityMatrix::pure(Level::D);
        let traj = evolve(
            &Scenario::default(),
            &start,
            EvolveOptions {
                t_final: 0.0,
                dt: 1e-3,
                samples: 3,
            },
        )
        .unwrap();
        assert_eq!(traj.steps, 0);
        assert_eq!(traj.final_state, start);
    }

    #[test]
    fn fourth_order_convergence() {
        // Error estimates from successive halvings shrink by ~2^4.
        let s = closure_complete(&Scenario {
            delta_c2: 2.0,
            ..fig5()
        })
        .unwrap();
        let start = DensityMatrix::pure(Level::B);
        let run = |dt| {
            evolve(
                &s,
                &start,
                EvolveOptions {
                    t_final: 1.0,
                    dt,
                    samples: 0,
                },
            )
            .unwrap()
            .final_state
        };
        let coarse = run(0.008);
        let mid = run(0.004);
        let fine = run(0.002);
        let e1 = coarse.distance(&mid);
        let e2 = mid.distance(&fine);
        let ratio = e1 / e2;
        assert!(
            ratio > 12.0 && ratio < 20.0,
            "ratio {ratio} ({e1:.3e}, {e2:.3e})"
        );
    }

    #[test]
    fn density_matrix_validation() {
        assert!(DensityMatrix::new(ComplexMatrix::identity(4)).is_err());
        assert!(DensityMatrix::new(ComplexMatrix::identity(3)).is_err());
        let mixed = ComplexMatrix::identity(4).scale(Complex64::new(0.25, 0.0));
        assert!(DensityMatrix::new(mixed).is_ok());
        let mut negative = ComplexMatrix::zeros(4, 4);
        negative[(0, 0)] = Complex64::new(1.5, 0.0);
        negative[(1, 1)] = Complex64::new(-0.5, 0.0);
        assert!(DensityMatrix::new(negative).is_err());
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let z = Complex64::new(0.0, 0.0);
        let superposed =
            DensityMatrix::from_state([z, z, Complex64::new(h, 0.0), Complex64::new(h, 0.0)])
                .unwrap();
        assert!((superposed.get(Level::C, Level::D) - Complex64::new(0.5, 0.0)).norm() < 1e-15);
    }
}
