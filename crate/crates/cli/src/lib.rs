//! Library side of the `pinlock` command-line tool.
//!
//! Each command reads a JSON job, resolves builtin references and `--set`
//! overrides, runs the solver and writes a JSON report (plus CSV series for
//! `simulate`) into the output directory. Every report embeds the resolved job.

pub mod config;
pub mod reports;

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::ValueEnum;
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::Value;

use pinlock::design::{solve_cardinality, solve_free, solve_identical_bip, DesignProblem, DesignStatus};
use pinlock::game::{
    evaluate_allocation, solve_fixed_attacker_budget, solve_fixed_defender_budget, solve_stackelberg, GameSpec,
    GameStatus,
};
use pinlock::network::coupling_matrix;
use pinlock::numerics::symmetric_eigen;
use pinlock::sim::{convergence_rate, simulate, Trajectory};
use pinlock::sync::{check_sync_general, check_sync_linear, control_matrix_b, PinningScheme};
use pinlock::{PinError, Tolerances};

use config::SCHEMA;
use reports::*;

/// Attack lists longer than this are left out of game reports.
pub const MAX_REPORTED_ATTACKS: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    Analyze,
    Design,
    Game,
    Simulate,
}

/// Process exit status of a finished job.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    /// Synchronized network or a solved problem.
    Success,
    /// Not synchronized, infeasible, unbounded or degenerate.
    Negative,
}

impl Outcome {
    pub fn code(self) -> u8 {
        match self {
            Outcome::Success => 0,
            Outcome::Negative => 2,
        }
    }
}

pub struct Job {
    pub command: Command,
    pub config: String,
    pub out_dir: PathBuf,
    pub overrides: Vec<String>,
}

pub fn run(job: &Job, tol: &Tolerances) -> Result<Outcome> {
    let mut config = config::load(job.command, &job.config)?;
    config::resolve(&mut config)?;
    config::apply_overrides(&mut config, &job.overrides)?;
    config::resolve(&mut config)?;
    fs::create_dir_all(&job.out_dir).with_context(|| format!("creating {}", job.out_dir.display()))?;
    match job.command {
        Command::Analyze => analyze(config, &job.out_dir, tol),
        Command::Design => design(config, &job.out_dir, tol),
        Command::Game => game(config, &job.out_dir, tol),
        Command::Simulate => run_simulation(config, &job.out_dir),
    }
}

fn parse<T: DeserializeOwned>(config: &Value) -> Result<T> {
    serde_json::from_value(config.clone()).context("config does not match the job schema")
}

fn write_json(dir: &Path, name: &str, report: &impl Serialize) -> Result<()> {
    let path = dir.join(name);
    let text = serde_json::to_string_pretty(report)?;
    fs::write(&path, text + "\n").with_context(|| format!("writing {}", path.display()))
}

fn analyze(config: Value, out: &Path, tol: &Tolerances) -> Result<Outcome> {
    let job: AnalyzeJob = parse(&config)?;
    let a = coupling_matrix(&job.topology);
    let scheme = PinningScheme::new(job.beta.clone())?;
    let linear = check_sync_linear(&a, &scheme, &job.dynamics, tol)?;
    let modes = check_sync_general(&a, &scheme, &job.dynamics, tol)?;
    let spectrum = symmetric_eigen(&control_matrix_b(&a, &scheme)?, tol)?.eigenvalues;
    let report = AnalysisReport {
        schema: SCHEMA.into(),
        config,
        tolerances: *tol,
        spectrum,
        lambda_n: job.dynamics.lambda_n(tol)?,
        threshold: linear.threshold,
        mu_n: linear.mu_n,
        margin: linear.margin,
        boundary: linear.boundary,
        synced: linear.synced,
        modes,
    };
    write_json(out, "analysis.json", &report)?;
    println!(
        "{}: mu_N = {:.6}, threshold = {:.6}, margin = {:.3e}",
        if report.synced { "synchronized" } else { "not synchronized" },
        report.mu_n,
        report.threshold,
        report.margin
    );
    Ok(if report.synced { Outcome::Success } else { Outcome::Negative })
}

fn design(config: Value, out: &Path, tol: &Tolerances) -> Result<Outcome> {
    let job: DesignJob = parse(&config)?;
    let mut p = DesignProblem::from_dynamics(coupling_matrix(&job.topology), job.v.clone(), &job.dynamics, tol)?
        .with_gain_ratio(job.gain_ratio)?;
    if let Some(sel) = &job.selectable {
        p = p.with_selectable(sel)?;
    }
    if let Some(k) = job.n_total {
        p = p.with_n_total(k)?;
    }
    let solution = match job.mode {
        DesignMode::Free => solve_free(&p, tol)?,
        DesignMode::Identical => solve_identical_bip(&p, tol)?,
        DesignMode::Cardinality => solve_cardinality(&p, tol)?,
    };
    let report = DesignReport { schema: SCHEMA.into(), config, tolerances: *tol, mode: job.mode, solution };
    write_json(out, "design.json", &report)?;
    let summary = design_summary(&report);
    fs::write(out.join("design.txt"), &summary)?;
    print!("{summary}");
    Ok(match report.solution.status {
        DesignStatus::Infeasible => Outcome::Negative,
        DesignStatus::Optimal | DesignStatus::ToleranceReached => Outcome::Success,
    })
}

fn design_summary(r: &DesignReport) -> String {
    let s = &r.solution;
    let mut text = String::new();
    let _ = writeln!(text, "mode: {:?}  status: {:?}", r.mode, s.status);
    if let Some(d) = &s.diagnostic {
        let _ = writeln!(text, "note: {d}");
    }
    let _ = writeln!(text, "threshold: {:.6}  mu_N: {:.6}  margin: {:.3e}", s.threshold, s.mu_n, s.margin);
    let _ = writeln!(text, "total cost: {:.6}  cuts: {}  B&B nodes: {}", s.total_cost, s.cuts, s.bb_nodes);
    for (i, (b, g)) in s.beta.iter().zip(&s.gains).enumerate().filter(|(_, (b, _))| **b > 0.0) {
        let _ = writeln!(text, "  node {:>3}: beta = {:.6}  gain = {:.6}", i + 1, b, g);
    }
    text
}

fn game(config: Value, out: &Path, tol: &Tolerances) -> Result<Outcome> {
    let job: GameJob = parse(&config)?;
    let mut spec = GameSpec::new(
        coupling_matrix(&job.topology),
        &job.beta_pin,
        job.kappa.clone(),
        job.eta,
        job.gain_ratio,
        &job.dynamics,
        tol,
    )?;
    if let Some(cap) = job.pi_cap {
        spec = spec.with_pi_cap(cap)?;
    }
    let omega = || job.omega.context("fixed-budget modes need `omega`");
    let result = match job.mode {
        GameMode::Stackelberg => solve_stackelberg(&spec, tol),
        GameMode::FixedDefender => solve_fixed_defender_budget(&spec, omega()?, tol),
        GameMode::FixedAttacker => solve_fixed_attacker_budget(&spec, omega()?, tol)
            .and_then(|alloc| evaluate_allocation(&spec, &alloc, tol)),
    };
    let mut outcome = match result {
        Ok(o) => o,
        Err(e @ (PinError::DegenerateGame | PinError::Infeasible(_))) => {
            eprintln!("{e}");
            return Ok(Outcome::Negative);
        }
        Err(e) => return Err(e.into()),
    };
    let attacks_truncated = outcome.successful_attacks > MAX_REPORTED_ATTACKS;
    if attacks_truncated {
        outcome.attacks.clear();
    }
    let report = GameReport {
        schema: SCHEMA.into(),
        config,
        tolerances: *tol,
        mode: job.mode,
        threshold: spec.threshold(),
        status: outcome.status,
        unused_kappa_nodes: spec.unused_kappa_nodes(),
        attacks_truncated,
        outcome,
    };
    write_json(out, "game.json", &report)?;
    let o = &report.outcome;
    match o.status {
        GameStatus::Optimal => {
            println!(
                "equilibrium: attack {:?}, attacker cost {:.6}, defender payoff {:.6}, {} successful attacks",
                o.beta_attack_star.as_ref().map(|a| a.nodes()).unwrap_or_default(),
                o.attack_cost.unwrap_or(f64::NAN),
                o.defender_payoff.unwrap_or(f64::NAN),
                o.successful_attacks
            );
            Ok(Outcome::Success)
        }
        GameStatus::Unbounded => {
            eprintln!("unbounded: the defender payoff grows without limit; set pi_cap to bound the allocation");
            Ok(Outcome::Negative)
        }
    }
}

fn run_simulation(config: Value, out: &Path) -> Result<Outcome> {
    let job: SimulateJob = parse(&config)?;
    let traj = simulate(&job.sim)?;
    write_trajectory(&out.join("trajectory.csv"), &traj)?;
    write_sync_error(&out.join("sync_error.csv"), &traj)?;
    let rate = convergence_rate(&traj)?;
    let report = SimulateReport {
        schema: SCHEMA.into(),
        config,
        seed: job.sim.seed,
        dt: job.sim.dt,
        t_end: job.sim.t_end,
        samples: traj.times.len(),
        diverged: traj.diverged,
        final_time: *traj.times.last().unwrap_or(&0.0),
        final_sync_error: traj.final_error(),
        convergence_rate: rate.rate.is_finite().then_some(rate.rate),
        exact_sync: rate.exact_sync,
    };
    write_json(out, "simulate.json", &report)?;
    println!(
        "final sync error {:.3e} at t = {}{}",
        report.final_sync_error,
        report.final_time,
        if report.diverged { " (diverged)" } else { "" }
    );
    Ok(Outcome::Success)
}

fn write_trajectory(path: &Path, traj: &Trajectory) -> Result<()> {
    let mut w = std::io::BufWriter::new(fs::File::create(path).with_context(|| format!("creating {}", path.display()))?);
    let header: Vec<String> = (1..=traj.node_dim).map(|k| format!("x{k}")).collect();
    writeln!(w, "t,node,{}", header.join(","))?;
    for (k, t) in traj.times.iter().enumerate() {
        for node in 0..traj.nodes {
            let xs: Vec<String> = traj.node_state(k, node).iter().map(|x| x.to_string()).collect();
            writeln!(w, "{t},{},{}", node + 1, xs.join(","))?;
        }
    }
    w.flush()?;
    Ok(())
}

fn write_sync_error(path: &Path, traj: &Trajectory) -> Result<()> {
    let mut w = std::io::BufWriter::new(fs::File::create(path).with_context(|| format!("creating {}", path.display()))?);
    writeln!(w, "t,sync_error")?;
    for (t, e) in traj.times.iter().zip(&traj.sync_error) {
        writeln!(w, "{t},{e}")?;
    }
    w.flush()?;
    Ok(())
}
