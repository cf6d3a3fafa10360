use diamond_core::{
    all_presets, parse_config, preset, render_csv, run_sweep, DensityMatrix, Level, Observable,
    SweepSpec,
};

#[test]
fn every_preset_sweep_is_physical() {
    for p in all_presets() {
        let result = run_sweep(&p.sweep).unwrap();
        assert_eq!(result.rows.len(), p.sweep.points, "{}", p.name);
        assert_eq!(result.rows[0].delta, p.sweep.delta_min);
        assert_eq!(result.rows.last().unwrap().delta, p.sweep.delta_max);
        assert!(result.rows.windows(2).all(|w| w[0].delta < w[1].delta));
        for row in &result.rows {
            let rho = row.rho.matrix().clone();
            assert!(
                DensityMatrix::new(rho).is_ok(),
                "{} at {}",
                p.name,
                row.delta
            );
            for key in Observable::COHERENCES {
                assert!(
                    row.observable(key).norm() <= 0.5 + 1e-12,
                    "{} {key}",
                    p.name
                );
            }
        }
    }
}

#[test]
fn csv_is_reproducible() {
    let spec = SweepSpec {
        points: 201,
        ..preset("fig8").unwrap().sweep
    };
    let first = render_csv(&run_sweep(&spec).unwrap());
    let second = render_csv(&run_sweep(&spec).unwrap());
    assert_eq!(first, second);
}

#[test]
fn serial_and_parallel_sweeps_agree_bitwise() {
    let spec = SweepSpec {
        points: 257,
        ..preset("fig9-left").unwrap().sweep
    };
    let serial = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap()
        .install(|| run_sweep(&spec).unwrap());
    let parallel = rayon::ThreadPoolBuilder::new()
        .num_threads(4)
        .build()
        .unwrap()
        .install(|| run_sweep(&spec).unwrap());
    assert_eq!(render_csv(&serial), render_csv(&parallel));
}

#[test]
fn config_document_drives_a_sweep() {
    let text = "\
[fields]
omega_c1 = 10
omega_a2 = 3
omega_c2 = 1

[sweep]
delta_min = -5
delta_max = 5
points = 101
";
    let config = parse_config(text).unwrap();
    assert_eq!(config.scenario, preset("fig6b").unwrap().scenario);
    let result = run_sweep(&config.sweep).unwrap();
    let centre = result.nearest(0.0).unwrap();
    assert_eq!(centre.delta, 0.0);
    let populations: f64 = Level::ALL.iter().map(|&l| centre.rho.population(l)).sum();
    assert!((populations - 1.0).abs() < 1e-12);
}
