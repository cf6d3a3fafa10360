//! Deterministic simulation of a four-level diamond atom driven by up to
//! four coherent fields.
//!
//! Levels `b` (ground) and `c` (top) are connected through the intermediate
//! levels `a` and `d`. Fields `a1` (b–a), `c1` (a–c), `c2` (c–d, the probe)
//! and `a2` (d–b) close the loop. The crate provides
//!
//! * the rotating-frame drive matrix and loop-closure completion ([`atom`]),
//! * dressed-state spectra and dark-state classification ([`dressed`]),
//! * the Lindblad generator, its steady state and RK4 evolution ([`lindblad`]),
//! * probe-detuning sweeps with window and gain detection ([`sweep`]),
//! * configuration files, named presets and CSV output.

pub mod algebra;
pub mod atom;
pub mod config;
pub mod csv;
pub mod dressed;
pub mod error;
pub mod lindblad;
pub mod presets;
pub mod sweep;

pub use algebra::{herm_eigen, solve_linear, ComplexMatrix, EigenDecomposition};
pub use atom::{
    build_hamiltonian, closure_complete, decay_channels, ClosureTarget, DecayChannel, Field,
    HamiltonianMatrix, Level, Scenario,
};
pub use config::{parse_config, render_config, render_scenario, Config, OutputOptions};
pub use csv::{render_csv, write_csv, write_csv_to, write_states, write_states_to, CSV_HEADER};
pub use dressed::{
    closed_form_eigenvalues, dark_classification, dressed_spectrum, ClosedFormSpectrum, DarkReport,
    DressedSpectrum,
};
pub use error::{Error, Result};
pub use lindblad::{
    build_liouvillian, eom_rhs, evolve, evolve_with, steady_state, DensityMatrix, EvolveOptions,
    Liouvillian, Trajectory,
};
pub use num_complex::Complex64;
pub use presets::{all_presets, preset, Preset, PRESET_NAMES};
pub use sweep::{
    detect_gain, detect_windows, extract_observable, run_sweep, EitWindow, Observable, SweepPoint,
    SweepResult, SweepSpec,
};
