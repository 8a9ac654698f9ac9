//! Batch driver: evolve configured scenarios, run convergence sweeps, and
//! cross-check the closed-form / oracle routes.  Outputs are CSV files plus
//! a key = value run manifest; exit codes are 0 (ok), 2 (configuration
//! error), 3 (numerical failure).

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use weylprop::config::{ConfigError, ScenarioConfig};
use weylprop::diag::{assemble_amplitude, max_amp_diff, max_coeff_diff, phase_coefficients};
use weylprop::grid::SuperWaveFunction;
use weylprop::propagator::{
    apply_parametrix, apply_with_kernel, build_kernel, defect_norm, fit_slope, rel_error,
    trotter_compose, PropagatorError,
};
use weylprop::reference::{flat, sharp, split_step_reference};
use weylprop::weylprop_core::hjcoeffs;
use weylprop::weylprop_core::superflow::oracle_phase_and_amplitude;

#[derive(Parser)]
#[command(name = "weylprop", version, about = "Short-time Weyl propagator experiments")]
struct Cli {
    /// Scenario configuration file (key = value lines); defaults apply if omitted
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads for the quadrature kernels (default: all cores)
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output directory for CSVs and the manifest
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Evolve the scenario by Trotter-composed parametrices and by the
    /// split-step reference; write fields, norms, and the final error
    Run,
    /// Sweep a step parameter over a dyadic ladder and fit the order
    Convergence {
        #[arg(long, value_enum)]
        mode: ConvMode,
    },
    /// Compare the coefficient ODE solves against the free closed forms
    FreeCheck,
    /// Compare the flow-based oracle against the coefficient ODE route
    OracleCompare,
}

#[derive(Clone, Copy, ValueEnum)]
enum ConvMode {
    Defect,
    Composition,
    Trotter,
}

enum AppError {
    Config(ConfigError),
    Numerical(String),
    Io(std::io::Error),
}

impl From<ConfigError> for AppError {
    fn from(e: ConfigError) -> Self {
        AppError::Config(e)
    }
}
impl From<PropagatorError> for AppError {
    fn from(e: PropagatorError) -> Self {
        AppError::Numerical(format!("{e}"))
    }
}
impl From<std::io::Error> for AppError {
    fn from(e: std::io::Error) -> Self {
        AppError::Io(e)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(AppError::Config(e)) => {
            eprintln!("configuration error: {e}");
            ExitCode::from(2)
        }
        Err(AppError::Numerical(e)) => {
            eprintln!("numerical failure: {e}");
            ExitCode::from(3)
        }
        Err(AppError::Io(e)) => {
            eprintln!("io error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn dispatch(cli: Cli) -> Result<(), AppError> {
    if let Some(k) = cli.threads {
        // ignore the error if a global pool already exists
        let _ = rayon::ThreadPoolBuilder::new().num_threads(k).build_global();
    }
    let cfg = match &cli.config {
        Some(path) => ScenarioConfig::parse(&fs::read_to_string(path)?)?,
        None => ScenarioConfig::default(),
    };
    fs::create_dir_all(&cli.out)?;
    match cli.cmd {
        Cmd::Run => run(&cfg, &cli.out),
        Cmd::Convergence { mode } => convergence(&cfg, mode, &cli.out),
        Cmd::FreeCheck => free_check(&cfg, &cli.out),
        Cmd::OracleCompare => oracle_compare(&cfg, &cli.out),
    }
}

fn write_manifest(
    out: &Path,
    cfg: &ScenarioConfig,
    wall: f64,
    extra: &[(&str, String)],
) -> Result<(), AppError> {
    let mut text = String::new();
    text.push_str(&format!("version = {}\n", env!("CARGO_PKG_VERSION")));
    text.push_str(&format!("wall_seconds = {wall:.3}\n"));
    for (k, v) in extra {
        text.push_str(&format!("{k} = {v}\n"));
    }
    text.push_str("# effective configuration\n");
    text.push_str(&cfg.echo());
    fs::write(out.join("manifest.txt"), text)?;
    Ok(())
}

fn write_fields(out: &Path, u: &SuperWaveFunction) -> Result<(), AppError> {
    let mut csv = String::from("ix,iy,iz,re_u0,im_u0,re_u1,im_u1\n");
    for idx in 0..u.grid.len() {
        let (ix, iy, iz) = u.grid.coords(idx);
        let (a, b) = (u.u0[idx], u.u1[idx]);
        csv.push_str(&format!(
            "{ix},{iy},{iz},{:.17e},{:.17e},{:.17e},{:.17e}\n",
            a.re, a.im, b.re, b.im
        ));
    }
    fs::write(out.join("fields.csv"), csv)?;
    Ok(())
}

fn run(cfg: &ScenarioConfig, out: &Path) -> Result<(), AppError> {
    let start = Instant::now();
    let hp = cfg.params();
    let pot = cfg.potential();
    let u = cfg.initial_state();
    let delta = (cfg.t - cfg.s) / cfg.slices as f64;

    let mut norms = String::from("step_index,time,norm\n");
    norms.push_str(&format!("0,{:.6},{:.17e}\n", cfg.s, u.norm()));
    let mut state = u.clone();
    if pot.is_zero() || cfg.t == cfg.s {
        for k in 1..=cfg.slices {
            let t0 = cfg.s + (k - 1) as f64 * delta;
            state = apply_parametrix(t0, t0 + delta, &state, &pot, &hp)?;
            norms.push_str(&format!("{k},{:.6},{:.17e}\n", t0 + delta, state.norm()));
        }
    } else {
        // time-independent potentials: one kernel serves every slice
        let kernel = build_kernel(cfg.s, cfg.s + delta, u.grid, &pot, &hp)?;
        for k in 1..=cfg.slices {
            state = apply_with_kernel(&kernel, &state, &hp);
            norms.push_str(&format!(
                "{k},{:.6},{:.17e}\n",
                cfg.s + k as f64 * delta,
                state.norm()
            ));
        }
    }
    fs::write(out.join("norms.csv"), norms)?;
    write_fields(out, &state)?;

    let reference = sharp(&split_step_reference(
        cfg.s,
        cfg.t,
        &flat(&u),
        &pot,
        &hp,
        cfg.dt_coeff,
    ));
    let err = rel_error(&state, &reference);
    write_manifest(
        out,
        cfg,
        start.elapsed().as_secs_f64(),
        &[("final_relative_error", format!("{err:.6e}"))],
    )?;
    println!(
        "run: {} slices over [{}, {}], final relative error vs split-step reference {err:.3e}",
        cfg.slices, cfg.s, cfg.t
    );
    Ok(())
}

fn convergence(cfg: &ScenarioConfig, mode: ConvMode, out: &Path) -> Result<(), AppError> {
    let start = Instant::now();
    let hp = cfg.params();
    let pot = cfg.potential();
    let u = cfg.initial_state();
    let span = cfg.t - cfg.s;
    if span <= 0.0 {
        return Err(AppError::Config(ConfigError::Invalid(
            "convergence sweeps need time.t > time.s".into(),
        )));
    }

    let mut steps = Vec::new();
    let mut errors = Vec::new();
    match mode {
        ConvMode::Defect => {
            let dtau = 1e-4;
            for k in 0..5 {
                let h = span / f64::powi(2.0, k);
                if h <= 2.0 * dtau {
                    break;
                }
                let d = defect_norm(cfg.s, cfg.s + h, &u, &pot, &hp, dtau)? / u.norm();
                steps.push(h);
                errors.push(d);
            }
        }
        ConvMode::Composition => {
            for k in 0..5 {
                let h = span / f64::powi(2.0, k);
                let r = cfg.s + h / 2.0;
                let two = apply_parametrix(
                    r,
                    cfg.s + h,
                    &apply_parametrix(cfg.s, r, &u, &pot, &hp)?,
                    &pot,
                    &hp,
                )?;
                let one = apply_parametrix(cfg.s, cfg.s + h, &u, &pot, &hp)?;
                steps.push(h);
                errors.push(two.sub(&one).norm() / u.norm());
            }
        }
        ConvMode::Trotter => {
            let reference = sharp(&split_step_reference(
                cfg.s,
                cfg.t,
                &flat(&u),
                &pot,
                &hp,
                cfg.dt_coeff,
            ));
            for k in 0..5 {
                let slices = 1usize << k;
                let v = trotter_compose(cfg.s, cfg.t, slices, &u, &pot, &hp)?;
                steps.push(span / slices as f64);
                errors.push(rel_error(&v, &reference));
            }
        }
    }

    let mut csv = String::from("step,error,slope_running\n");
    for i in 0..steps.len() {
        let slope = if i >= 1 {
            fit_slope(&steps[..=i], &errors[..=i])
        } else {
            0.0
        };
        csv.push_str(&format!("{:.8e},{:.8e},{:.4}\n", steps[i], errors[i], slope));
    }
    fs::write(out.join("convergence.csv"), csv)?;
    let slope = fit_slope(&steps, &errors);
    write_manifest(
        out,
        cfg,
        start.elapsed().as_secs_f64(),
        &[("fitted_slope", format!("{slope:.4}"))],
    )?;
    let name = match mode {
        ConvMode::Defect => "defect",
        ConvMode::Composition => "composition",
        ConvMode::Trotter => "trotter",
    };
    println!("convergence ({name}): fitted slope {slope:.3} over {} points", steps.len());
    Ok(())
}

fn free_check(cfg: &ScenarioConfig, out: &Path) -> Result<(), AppError> {
    let start = Instant::now();
    // the closed forms are the zero-potential limit; force ε = 0
    let mut free_cfg = cfg.clone();
    free_cfg.epsilon = 0.0;
    let hp = free_cfg.params();
    let pot = weylprop::weylprop_core::potential::EMPotential::none();
    let tau = (cfg.t - cfg.s).max(1e-3);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut csv = String::from("sample,xi1,xi2,xi3,err_phase,err_amplitude\n");
    let mut max_err: f64 = 0.0;
    let mut emitted = 0;
    while emitted < 20 {
        let dir: [f64; 3] = [
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        ];
        let norm = (dir[0] * dir[0] + dir[1] * dir[1] + dir[2] * dir[2]).sqrt();
        if norm < 1e-6 {
            println!("skipping degenerate xi = 0 sample");
            continue;
        }
        let radius = rng.gen_range(0.2..3.0);
        let xi = [
            dir[0] / norm * radius,
            dir[1] / norm * radius,
            dir[2] / norm * radius,
        ];
        let x = cfg.center;
        let (sc_closed, ac_closed, _, _) = hjcoeffs::closed_form_free(cfg.s, cfg.s + tau, x, xi, &hp)
            .map_err(|e| AppError::Numerical(format!("{e}")))?;
        let sol = hjcoeffs::solve_at(cfg.s, cfg.s + tau, x, xi, &pot, &hp, cfg.dt_coeff)
            .map_err(|e| AppError::Numerical(format!("{e}")))?;
        let es = max_coeff_diff(&sol.s, &sc_closed);
        let ea = max_amp_diff(&sol.a, &ac_closed);
        max_err = max_err.max(es).max(ea);
        csv.push_str(&format!(
            "{emitted},{:.6},{:.6},{:.6},{es:.6e},{ea:.6e}\n",
            xi[0], xi[1], xi[2]
        ));
        emitted += 1;
    }
    fs::write(out.join("free_check.csv"), csv)?;
    write_manifest(
        out,
        cfg,
        start.elapsed().as_secs_f64(),
        &[("max_error", format!("{max_err:.6e}"))],
    )?;
    println!("free-check: max coefficient error {max_err:.3e} over 20 momenta at span {tau}");
    Ok(())
}

fn oracle_compare(cfg: &ScenarioConfig, out: &Path) -> Result<(), AppError> {
    let start = Instant::now();
    let hp = cfg.params();
    let pot = cfg.potential();
    // the flow inversion is a short-time construction; clamp the span
    let tau = (cfg.t - cfg.s).min(0.1).max(1e-3);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut csv = String::from("sample,err_phase,err_amplitude_sq\n");
    let mut max_err: f64 = 0.0;
    for sample in 0..10 {
        let x = [
            cfg.center[0] + rng.gen_range(-1.0..1.0),
            cfg.center[1] + rng.gen_range(-1.0..1.0),
            cfg.center[2] + rng.gen_range(-1.0..1.0),
        ];
        let xi = [
            rng.gen_range(-1.2..1.2),
            rng.gen_range(-1.2..1.2),
            rng.gen_range(-1.2..1.2),
        ];
        let (s_oracle, d_oracle) =
            oracle_phase_and_amplitude(cfg.s, cfg.s + tau, x, xi, &pot, &hp, cfg.dt_coeff)
                .map_err(|e| AppError::Numerical(format!("{e}")))?;
        let sol = hjcoeffs::solve_at(cfg.s, cfg.s + tau, x, xi, &pot, &hp, cfg.dt_coeff)
            .map_err(|e| AppError::Numerical(format!("{e}")))?;
        let es = max_coeff_diff(&phase_coefficients(&s_oracle), &sol.s);
        let amp = assemble_amplitude(&sol.a);
        let ea = (amp * amp - d_oracle).max_abs();
        max_err = max_err.max(es).max(ea);
        csv.push_str(&format!("{sample},{es:.6e},{ea:.6e}\n"));
    }
    fs::write(out.join("oracle_compare.csv"), csv)?;
    write_manifest(
        out,
        cfg,
        start.elapsed().as_secs_f64(),
        &[("max_error", format!("{max_err:.6e}"))],
    )?;
    println!("oracle-compare: max discrepancy {max_err:.3e} over 10 phase-space points at span {tau}");
    Ok(())
}
