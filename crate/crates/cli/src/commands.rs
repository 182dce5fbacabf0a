//! The six CLI commands. Each returns (file suffix, contents) pairs; the
//! caller prepends the output prefix and writes them.

use num_complex::Complex64 as C64;

use tdtunnel_core::density::{density_grid, envelope};
use tdtunnel_core::model::EnergyPair;
use tdtunnel_core::scenario::{density_solution, solve};
use tdtunnel_core::stationary::exact_rectangular_transmission;
use tdtunnel_core::tdse::{
    init_packet, norm, transmission_probability, GridSpec, PerturbationRegion, Propagator,
    WavePacket,
};
use tdtunnel_core::times::{
    hartman_scan as scan_lengths, measured_time_bound, stop_time_exact, stop_time_simplified,
    traversal_time_transfer_matrix, DispersionProfile,
};
use tdtunnel_core::Error as CoreError;

use crate::config::ScenarioConfig;
use crate::output::{csv, fnum, fopt, jcomplex, json_object};
use crate::CliError;

type Files = Vec<(String, String)>;

pub fn model(cfg: &ScenarioConfig) -> Result<Files, CliError> {
    let sol = solve(
        &cfg.particle,
        &cfg.barrier,
        &cfg.perturbation,
        &cfg.energy_pair,
        Some(cfg.interval),
    )?;
    let record = json_object(&[
        ("k", fnum(sol.k)),
        ("chi_abs", fnum(sol.chi_abs)),
        ("alpha", jcomplex(sol.mc.alpha)),
        ("beta", jcomplex(sol.mc.beta)),
        ("x_kk", jcomplex(sol.x.x_kk)),
        ("x_kj", jcomplex(sol.x.x_kj)),
        ("x_jk", jcomplex(sol.x.x_jk)),
        ("x_jj", jcomplex(sol.x.x_jj)),
        ("y_kj", jcomplex(sol.y.y_kj)),
        ("y_jk", jcomplex(sol.y.y_jk)),
        ("omega0", fnum(sol.rp.omega0)),
        ("omega", fnum(sol.rp.omega)),
        ("omega_kj", fnum(sol.rp.omega_kj)),
    ]);
    Ok(vec![("model.json".into(), record)])
}

pub fn density(cfg: &ScenarioConfig) -> Result<Files, CliError> {
    let sol = density_solution(
        &cfg.particle,
        &cfg.barrier,
        &cfg.perturbation,
        &cfg.energy_pair,
        Some(cfg.interval),
    )?;
    let length = cfg.barrier.length();
    let grid = density_grid(
        &sol,
        0.0,
        cfg.grid_t_max,
        cfg.grid_nt,
        0.0,
        length,
        cfg.grid_nx,
    )?;
    let mut rows = Vec::with_capacity(cfg.grid_nt * cfg.grid_nx);
    for (i, &t) in grid.t_values.iter().enumerate() {
        for (j, &x) in grid.x_values.iter().enumerate() {
            rows.push(format!("{},{},{}", fnum(t), fnum(x), fnum(grid.rho[i][j])));
        }
    }
    let mut files = vec![("density.csv".to_string(), csv("t,x,rho", rows))];
    // the closed-form envelope exists only for the rectangular barrier
    if sol.is_rectangular() {
        let env_rows = grid
            .x_values
            .iter()
            .map(|&x| {
                let (lo, hi) = envelope(&sol, x)?;
                Ok(format!("{},{},{}", fnum(x), fnum(lo), fnum(hi)))
            })
            .collect::<Result<Vec<_>, CliError>>()?;
        files.push(("envelope.csv".to_string(), csv("x,rho_min,rho_max", env_rows)));
    }
    Ok(files)
}

pub fn times(cfg: &ScenarioConfig) -> Result<Files, CliError> {
    let sol = solve(
        &cfg.particle,
        &cfg.barrier,
        &cfg.perturbation,
        &cfg.energy_pair,
        Some(cfg.interval),
    )?;
    // null when the perturbation vanishes or the arcsine argument leaves
    // its domain: no stopping time exists in either case
    let tau_exact = match stop_time_exact(sol.rp.omega0, sol.chi_abs, cfg.particle.mass()) {
        Ok(v) => v,
        Err(CoreError::NoPerturbation) => None,
        Err(e) => return Err(e.into()),
    };
    let u0 = cfg.barrier.segments()[0].u;
    let tau_simplified = stop_time_simplified(&cfg.particle, u0)?;
    let tau_transfer = traversal_time_transfer_matrix(
        sol.mc.alpha.norm(),
        &cfg.barrier,
        cfg.particle.mass(),
        cfg.particle.energy(),
        &DispersionProfile::BarrierDefault,
    )?;
    let tau_bound = measured_time_bound(cfg.particle.energy(), cfg.measurement_e_meas).ok();
    let record = json_object(&[
        ("tau_exact", fopt(tau_exact)),
        ("tau_simplified", fnum(tau_simplified)),
        ("tau_transfer", fnum(tau_transfer)),
        ("tau_bound", fopt(tau_bound)),
        ("omega0", fnum(sol.rp.omega0)),
        ("chi_abs", fnum(sol.chi_abs)),
    ]);
    Ok(vec![("times.json".into(), record)])
}

struct OracleRun {
    grid: GridSpec,
    psi: Vec<C64>,
    final_norm: f64,
    snapshots: Option<String>,
}

fn run_oracle(cfg: &ScenarioConfig) -> Result<OracleRun, CliError> {
    let grid = GridSpec::new(
        cfg.oracle_x_min,
        cfg.oracle_x_max,
        cfg.oracle_n_points,
        cfg.oracle_dt,
    )?;
    let packet = WavePacket {
        x0: cfg.oracle_x0,
        sigma: cfg.oracle_sigma,
        k0: cfg.oracle_k0,
    };
    let mut psi = init_packet(&grid, &packet)?;
    let mut prop = Propagator::new(
        grid,
        &cfg.particle,
        &cfg.barrier,
        PerturbationRegion::BarrierOnly,
    )?;
    let every = cfg.oracle_snapshot_every;
    let mut snap_rows: Vec<String> = Vec::new();
    let mut snapshot = |step: usize, psi: &[C64]| {
        for (i, v) in psi.iter().enumerate() {
            snap_rows.push(format!(
                "{step},{},{}",
                fnum(grid.x_at(i)),
                fnum(v.norm_sqr())
            ));
        }
    };
    if every > 0 {
        snapshot(0, &psi);
    }
    let mut final_norm = norm(&psi, grid.dx());
    for step in 0..cfg.oracle_steps {
        let t_mid = (step as f64 + 0.5) * grid.dt;
        let u_t = cfg.perturbation.at(t_mid)?;
        prop.step(&mut psi, u_t, grid.dt);
        final_norm = norm(&psi, grid.dx());
        if !final_norm.is_finite() {
            return Err(CoreError::NumericalBlowup { step }.into());
        }
        if every > 0 && (step + 1) % every == 0 {
            snapshot(step + 1, &psi);
        }
    }
    Ok(OracleRun {
        grid,
        psi,
        final_norm,
        snapshots: (every > 0).then(|| csv("step,x,abs_psi_sq", snap_rows)),
    })
}

pub fn oracle(cfg: &ScenarioConfig) -> Result<Files, CliError> {
    let run = run_oracle(cfg)?;
    let length = cfg.barrier.length();
    let dx = run.grid.dx();
    let region = |pred: &dyn Fn(f64) -> bool| -> f64 {
        dx * run
            .psi
            .iter()
            .enumerate()
            .filter(|(i, _)| pred(run.grid.x_at(*i)))
            .map(|(_, v)| v.norm_sqr())
            .sum::<f64>()
    };
    let m = cfg.particle.mass();
    let record = json_object(&[
        ("steps", cfg.oracle_steps.to_string()),
        ("final_norm", fnum(run.final_norm)),
        ("transmission", fnum(region(&|x| x > length))),
        ("reflection", fnum(region(&|x| x < 0.0))),
        ("in_barrier", fnum(region(&|x| (0.0..=length).contains(&x)))),
        ("e_inc", fnum(cfg.oracle_k0 * cfg.oracle_k0 / (2.0 * m))),
        // energy spread from the packet's momentum width sigma_k = 1/(2 sigma)
        ("sigma_e", fnum(cfg.oracle_k0 / (2.0 * cfg.oracle_sigma * m))),
    ]);
    let mut files = vec![("oracle.json".to_string(), record)];
    if let Some(snap) = run.snapshots {
        files.push(("snapshots.csv".to_string(), snap));
    }
    Ok(files)
}

pub fn hartman_scan(cfg: &ScenarioConfig) -> Result<Files, CliError> {
    let u0 = cfg.barrier.segments()[0].u;
    let ep = EnergyPair::new(cfg.energy_pair.e_k, cfg.energy_pair.e_j)?;
    let scan = scan_lengths(
        &cfg.particle,
        u0,
        cfg.perturbation.amplitude(),
        &ep,
        &cfg.hartman_lengths,
    )?;
    let rows = scan.iter().map(|row| {
        format!(
            "{},{},{}",
            fnum(row.length),
            row.tau_exact.map(fnum).unwrap_or_default(),
            fnum(row.tau_simplified)
        )
    });
    Ok(vec![(
        "hartman.csv".into(),
        csv("L,tau_exact,tau_simplified", rows),
    )])
}

pub fn compare(cfg: &ScenarioConfig) -> Result<Files, CliError> {
    let sol = density_solution(
        &cfg.particle,
        &cfg.barrier,
        &cfg.perturbation,
        &cfg.energy_pair,
        Some(cfg.interval),
    )?;
    let run = run_oracle(cfg)?;
    let length = cfg.barrier.length();
    let t_final = cfg.oracle_steps as f64 * cfg.oracle_dt;

    // analytic rho on the shared x grid at the final time
    let grid = density_grid(&sol, 0.5 * t_final, t_final, 2, 0.0, length, cfg.grid_nx)?;
    let rho_final = &grid.rho[1];

    // oracle |psi|^2 interpolated onto the same x values
    let dx = run.grid.dx();
    let sample = |x: f64| -> f64 {
        let pos = (x - run.grid.x_min) / dx;
        let i = (pos.floor() as usize).min(run.psi.len() - 2);
        let frac = pos - i as f64;
        run.psi[i].norm_sqr() * (1.0 - frac) + run.psi[i + 1].norm_sqr() * frac
    };
    let rows = grid
        .x_values
        .iter()
        .zip(rho_final)
        .map(|(&x, &rho)| format!("{},{},{}", fnum(x), fnum(rho), fnum(sample(x))));
    let table = csv("x,rho_analytic,abs_psi_sq", rows);

    let transmission = transmission_probability(&run.psi, &run.grid, length)?;
    let exact = if cfg.barrier.is_rectangular() {
        Some(exact_rectangular_transmission(
            &cfg.particle,
            cfg.barrier.segments()[0].u,
            length,
        )?)
    } else {
        None
    };
    let record = json_object(&[
        ("t_final", fnum(t_final)),
        ("transmission_oracle", fnum(transmission)),
        ("transmission_exact", fopt(exact)),
        (
            "relative_deviation",
            fopt(exact.map(|e| (transmission - e) / e)),
        ),
    ]);
    Ok(vec![
        ("compare.csv".into(), table),
        ("compare.json".into(), record),
    ])
}
