//! The four run modes. Each writes its artifacts under `output.dir` and
//! returns the paths it wrote.

use std::path::{Path, PathBuf};

use rayon::prelude::*;

use nmcoh::gaussian::{coherence_trajectory, CoherencePoint};
use nmcoh::steady::steady_coherence_surface;
use nmcoh::{GaussianInit, GreensTrajectory, SteadyReport};

use crate::config::RunConfig;
use crate::error::CliError;
use crate::output::{fmt_g17, tag, write_atomic, Csv};
use crate::plot;

pub const EVOLVE_COLUMNS: [&str; 9] =
    ["t", "re_u", "im_u", "abs_u", "v", "nu", "mu_bar", "entropy_bits", "coherence_bits"];
pub const STEADY_COLUMNS: [&str; 3] = ["alpha", "r", "coherence_bits"];
pub const SWEEP_COLUMNS: [&str; 15] = [
    "s",
    "eta",
    "eta_rel",
    "temperature",
    "alpha",
    "alpha_phase",
    "r",
    "n_bar",
    "abs_u_end",
    "v_end",
    "coherence_initial",
    "coherence_final",
    "coherence_min",
    "t_min",
    "revival",
];

pub fn evolve_file_name(init: &GaussianInit) -> String {
    let phase = init.alpha.arg();
    let phase = if phase == 0.0 { String::new() } else { format!("_phase{}", tag(phase)) };
    format!("evolve_alpha{}{phase}_r{}_nbar{}.csv", tag(init.alpha.norm()), tag(init.r), tag(init.n_bar))
}

pub fn steady_file_name(temperature: f64, n_bar: f64) -> String {
    format!("steady_T{}_nbar{}.csv", tag(temperature), tag(n_bar))
}

fn write_all(dir: &Path, files: Vec<(String, String)>) -> Result<Vec<PathBuf>, CliError> {
    files
        .into_par_iter()
        .map(|(name, text)| {
            let path = dir.join(name);
            write_atomic(&path, &text)?;
            Ok(path)
        })
        .collect()
}

pub fn run_evolve(cfg: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    let spec = cfg.bath()?.spec()?;
    let grid = cfg.grid.time_grid()?;
    let traj = GreensTrajectory::solve(&spec, grid)?;
    let rows = grid.strided(cfg.output.stride);
    let states = cfg.state.states()?;

    let files: Vec<(String, String)> = states
        .par_iter()
        .map(|init| -> Result<_, CliError> {
            let mut csv = Csv::new(&EVOLVE_COLUMNS);
            for &i in &rows {
                let u = traj.u[i];
                let p = CoherencePoint::evaluate(init, grid.time(i), u, traj.v[i])?;
                csv.row(&[p.t, u.re, u.im, u.norm(), traj.v[i], p.nu, p.mu_bar, p.entropy, p.coherence]);
            }
            Ok((evolve_file_name(init), csv.into_string()))
        })
        .collect::<Result<_, _>>()?;

    let names: Vec<String> = files.iter().map(|(n, _)| n.clone()).collect();
    let mut paths = write_all(&cfg.output.dir, files)?;
    if cfg.output.plot_script {
        let panels = cfg.state.panels()?;
        let grouped: Vec<(String, Vec<String>)> = panels
            .iter()
            .enumerate()
            .map(|(k, (a, r))| {
                let per = cfg.state.n_bar.len();
                (format!("alpha={a}, r={r}"), names[k * per..(k + 1) * per].to_vec())
            })
            .collect();
        let path = cfg.output.dir.join("plot.py");
        write_atomic(&path, &plot::evolve_script(&grouped))?;
        paths.push(path);
    }
    Ok(paths)
}

pub fn run_steady(cfg: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    let bath = cfg.bath()?;
    let temperatures =
        if cfg.steady.temperatures.is_empty() { vec![bath.temperature] } else { cfg.steady.temperatures.clone() };
    let alphas = cfg.steady.alphas();
    let rs = cfg.steady.rs();

    let reports: Vec<(f64, SteadyReport)> = temperatures
        .par_iter()
        .map(|&temp| Ok((temp, SteadyReport::analyze(&bath.spec_at(temp)?)?)))
        .collect::<Result<_, CliError>>()?;
    for (temp, report) in &reports {
        if !report.exists_localized() {
            eprintln!(
                "warning: no localized mode for s={} eta={} T={temp}; writing the continuum-only result",
                bath.s,
                bath.spec()?.eta
            );
        }
    }

    let cells: Vec<(f64, &SteadyReport, f64)> = reports
        .iter()
        .flat_map(|(temp, rep)| cfg.steady.n_bar.iter().map(move |&n| (*temp, rep, n)))
        .collect();
    let files: Vec<(String, String)> = cells
        .par_iter()
        .map(|&(temp, report, n_bar)| -> Result<_, CliError> {
            let spec = bath.spec_at(temp)?;
            let mut csv = Csv::default();
            csv.comment("s", &tag(spec.s));
            csv.comment("eta", &tag(spec.eta));
            csv.comment("eta_rel", &tag(spec.relative_coupling()));
            csv.comment("omega_c", &tag(spec.omega_c));
            csv.comment("temperature", &tag(temp));
            csv.comment("n_bar", &tag(n_bar));
            match report.localized {
                Some(mode) => {
                    csv.comment("localized_mode", "true");
                    csv.comment("omega_b", &fmt_g17(mode.omega_b));
                }
                None => {
                    csv.comment("localized_mode", "false");
                    csv.comment("omega_b", "none");
                }
            }
            csv.comment("Z", &fmt_g17(report.residue()));
            csv.comment("v_inf", &fmt_g17(report.v_inf));
            csv.header(&STEADY_COLUMNS);
            let surface = steady_coherence_surface(report, &alphas, &rs, n_bar)?;
            for (a, row) in alphas.iter().zip(&surface) {
                for (r, c) in rs.iter().zip(row) {
                    csv.row(&[*a, *r, *c]);
                }
            }
            Ok((steady_file_name(temp, n_bar), csv.into_string()))
        })
        .collect::<Result<_, _>>()?;

    let names: Vec<String> = files.iter().map(|(n, _)| n.clone()).collect();
    let mut paths = write_all(&cfg.output.dir, files)?;
    if cfg.output.plot_script {
        let path = cfg.output.dir.join("plot.py");
        write_atomic(&path, &plot::steady_script(&names, alphas.len(), rs.len()))?;
        paths.push(path);
    }
    Ok(paths)
}

/// Largest step-to-step increase after the global minimum.
fn revival(c: &[f64]) -> (usize, f64) {
    let imin = c.iter().enumerate().min_by(|x, y| x.1.total_cmp(y.1)).map_or(0, |(i, _)| i);
    let rise = c[imin..].windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
    (imin, rise)
}

pub fn run_sweep(cfg: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    let bath = cfg.bath()?;
    let grid = cfg.grid.time_grid()?;
    let states = cfg.state.states()?;
    let pick = |xs: &[f64], fallback: Option<f64>| -> Vec<Option<f64>> {
        if xs.is_empty() {
            vec![fallback]
        } else {
            xs.iter().map(|&x| Some(x)).collect()
        }
    };
    let mut cells = Vec::new();
    for s in pick(&cfg.sweep.s, Some(bath.s)) {
        for k in pick(&cfg.sweep.eta_rel, None) {
            for temp in pick(&cfg.sweep.temperature, Some(bath.temperature)) {
                let mut b = bath.clone();
                b.s = s.unwrap();
                if let Some(k) = k {
                    b.eta = None;
                    b.eta_rel = Some(k);
                }
                cells.push((b, temp.unwrap()));
            }
        }
    }

    let blocks: Vec<Vec<[f64; 15]>> = cells
        .par_iter()
        .map(|(b, temp)| -> Result<_, CliError> {
            let spec = b.spec_at(*temp)?;
            let traj = GreensTrajectory::solve(&spec, grid)?;
            let u_end = traj.u.last().unwrap().norm();
            let v_end = *traj.v.last().unwrap();
            states
                .iter()
                .map(|init| {
                    let c: Vec<f64> = coherence_trajectory(init, &traj)?.iter().map(|p| p.coherence).collect();
                    let (imin, rise) = revival(&c);
                    Ok([
                        spec.s,
                        spec.eta,
                        spec.relative_coupling(),
                        *temp,
                        init.alpha.norm(),
                        init.alpha.arg(),
                        init.r,
                        init.n_bar,
                        u_end,
                        v_end,
                        c[0],
                        *c.last().unwrap(),
                        c[imin],
                        grid.time(imin),
                        rise,
                    ])
                })
                .collect()
        })
        .collect::<Result<_, _>>()?;

    let mut csv = Csv::new(&SWEEP_COLUMNS);
    for row in blocks.iter().flatten() {
        csv.row(row);
    }
    let path = cfg.output.dir.join("sweep_summary.csv");
    write_atomic(&path, &csv.into_string())?;
    Ok(vec![path])
}
