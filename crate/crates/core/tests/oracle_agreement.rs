use nmcoh::greens::{solve_u, solve_v};
use nmcoh::oracle::{DiscreteBath, DiscretePropagator, Discretization};
use nmcoh::{BathSpec, GreensTrajectory, SteadyReport, TimeGrid};

fn propagator(spec: &BathSpec, modes: usize) -> DiscretePropagator {
    let bath = DiscreteBath::from_spec(spec, Discretization::for_spec(spec, modes)).unwrap();
    DiscretePropagator::new(&bath).unwrap()
}

#[test]
fn discretization_is_converged_and_unitary() {
    let grid = TimeGrid::new(50.0, 0.05).unwrap();
    for s in [0.5, 1.0, 3.0] {
        for k in [0.01, 2.0] {
            let spec = BathSpec::with_relative_coupling(k, s, 5.0, 1.0).unwrap();
            let fine = propagator(&spec, 2000);
            let coarse = propagator(&spec, 1000);
            let defect = fine.unitarity_defect();
            assert!(defect <= 1e-10, "s={s} k={k} defect={defect:e}");
            let change = grid
                .times()
                .map(|t| (fine.exact_u(t) - coarse.exact_u(t)).norm())
                .fold(0.0, f64::max);
            assert!(change <= 2e-4, "s={s} k={k} N 1000 -> 2000 changed u by {change:e}");
        }
    }
}

#[test]
fn residue_matches_oracle_plateau() {
    // the residue rises from zero at threshold and is flat near 2-3 η_c
    let grid = TimeGrid::new(50.0, 0.5).unwrap();
    for k in [1.2, 1.5, 2.0, 3.0, 5.0] {
        let spec = BathSpec::with_relative_coupling(k, 1.0, 5.0, 0.0).unwrap();
        let z = SteadyReport::analyze(&spec).unwrap().residue();
        let oracle = propagator(&spec, 1000);
        let tail: Vec<f64> = grid.times().filter(|&t| t >= 40.0).map(|t| oracle.exact_u(t).norm()).collect();
        let mean = tail.iter().sum::<f64>() / tail.len() as f64;
        assert!((mean - z).abs() <= 1e-2, "k={k} Z={z} oracle plateau={mean}");
    }
}

#[test]
fn thermal_fluctuation_matches_oracle_midway() {
    let spec = BathSpec::with_relative_coupling(2.0, 0.5, 5.0, 1.0).unwrap();
    let grid = TimeGrid::new(10.0, 0.01).unwrap();
    let u = solve_u(&spec, grid).unwrap();
    let v = solve_v(&spec, grid, &u).unwrap();
    let oracle = propagator(&spec, 2000);
    let exact = oracle.exact_v(1.0, 10.0);
    assert!((v[grid.n_steps()] - exact).abs() <= 1e-4, "v(10)={} oracle={exact}", v[grid.n_steps()]);
}

#[test]
fn below_threshold_everything_decays_to_continuum() {
    // s = 3 is left out: J(ω_0) is so small there that the decay time exceeds t = 50
    let grid = TimeGrid::new(50.0, 0.01).unwrap();
    for s in [0.5, 1.0] {
        let spec = BathSpec::with_relative_coupling(0.5, s, 5.0, 1.0).unwrap();
        let report = SteadyReport::analyze(&spec).unwrap();
        assert!(!report.exists_localized());
        let traj = GreensTrajectory::solve(&spec, grid).unwrap();
        let u_end = traj.u.last().unwrap().norm();
        let v_end = *traj.v.last().unwrap();
        assert!(u_end <= 1e-2, "s={s} |u(50)|={u_end}");
        assert!((v_end - report.v_inf).abs() <= 2e-2 * report.v_inf.max(1.0), "s={s} v(50)={v_end} v_inf={}", report.v_inf);
    }
}
