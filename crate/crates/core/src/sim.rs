//! Fixed-step RK4 simulation of the pinning-controlled (and possibly attacked) network
//!
//! `ẋᵢ = f(xᵢ) + c·Σⱼ aᵢⱼ·g(xⱼ) − (1 − attᵢ)·βᵢ·c·(g(xᵢ) − g(x̄))`, with `g(x) = a_g·x + b_g`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{input_err, Result};
use crate::game::AttackVector;
use crate::network::Topology;
use crate::numerics::Matrix;
use crate::sync::PinningScheme;

/// States beyond this magnitude count as divergence.
pub const DIVERGENCE_LIMIT: f64 = 1e9;
/// Default seed of the pseudo-random initial cloud.
pub const DEFAULT_SEED: u64 = 20_240_901;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ChenParams {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl Default for ChenParams {
    fn default() -> Self {
        Self { alpha: 35.0, beta: 3.0, gamma: 28.0 }
    }
}

impl ChenParams {
    pub fn eval(&self, x: &[f64; 3]) -> [f64; 3] {
        let Self { alpha, beta, gamma } = *self;
        [
            alpha * (x[1] - x[0]),
            (gamma - alpha) * x[0] - x[0] * x[2] + gamma * x[1],
            x[0] * x[1] - beta * x[2],
        ]
    }

    pub fn jacobian(&self, x: &[f64; 3]) -> Matrix {
        let Self { alpha, beta, gamma } = *self;
        Matrix::from_rows(&[
            vec![-alpha, alpha, 0.0],
            vec![gamma - alpha - x[2], gamma, -x[0]],
            vec![x[1], x[0], -beta],
        ])
        .expect("3x3")
    }
}

/// Chen oscillator with α = 35, β = 3, γ = 28.
pub fn chen_vector_field(x: &[f64; 3]) -> [f64; 3] {
    ChenParams::default().eval(x)
}

/// Per-node vector field `f`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum VectorField {
    Chen(ChenParams),
    /// `f(x) = J·x`.
    Linear { jf: Matrix },
}

impl VectorField {
    pub fn dim(&self) -> usize {
        match self {
            VectorField::Chen(_) => 3,
            VectorField::Linear { jf } => jf.rows(),
        }
    }

    fn eval_into(&self, x: &[f64], out: &mut [f64]) {
        match self {
            VectorField::Chen(p) => out.copy_from_slice(&p.eval(&[x[0], x[1], x[2]])),
            VectorField::Linear { jf } => out.copy_from_slice(&jf.matvec(x)),
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            VectorField::Chen(p) if ![p.alpha, p.beta, p.gamma].iter().all(|v| v.is_finite()) => {
                input_err("Chen parameters must be finite")
            }
            VectorField::Linear { jf } if !jf.is_square() || jf.rows() == 0 || !jf.is_finite() => {
                input_err("linear vector field needs a non-empty finite square matrix")
            }
            _ => Ok(()),
        }
    }
}

fn default_dt() -> f64 {
    1e-3
}

fn default_t_end() -> f64 {
    10.0
}

fn default_seed() -> u64 {
    DEFAULT_SEED
}

fn default_a_g() -> f64 {
    1.0
}

fn default_record_every() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub topology: Topology,
    pub field: VectorField,
    #[serde(default = "default_a_g")]
    pub a_g: f64,
    #[serde(default)]
    pub b_g: f64,
    pub c: f64,
    pub beta: PinningScheme,
    #[serde(default)]
    pub attack: Option<AttackVector>,
    /// Target state; the origin when absent.
    #[serde(default)]
    pub x_bar: Option<Vec<f64>>,
    /// Initial states, one row per node; a seeded cloud around `x̄` when absent.
    #[serde(default)]
    pub x0: Option<Vec<Vec<f64>>>,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_dt")]
    pub dt: f64,
    #[serde(default = "default_t_end")]
    pub t_end: f64,
    /// Keep every k-th step in the recorded trajectory.
    #[serde(default = "default_record_every")]
    pub record_every: usize,
}

impl SimConfig {
    /// Seeded run from the default cloud, with `dt = 1e-3`, `t_end = 10`.
    pub fn new(topology: Topology, field: VectorField, c: f64, beta: PinningScheme) -> Self {
        Self {
            topology,
            field,
            a_g: default_a_g(),
            b_g: 0.0,
            c,
            beta,
            attack: None,
            x_bar: None,
            x0: None,
            seed: DEFAULT_SEED,
            dt: default_dt(),
            t_end: default_t_end(),
            record_every: 1,
        }
    }

    pub fn target(&self) -> Vec<f64> {
        self.x_bar.clone().unwrap_or_else(|| vec![0.0; self.field.dim()])
    }

    pub fn validate(&self) -> Result<()> {
        self.field.validate()?;
        let n = self.topology.n();
        let dim = self.field.dim();
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return input_err(format!("dt must be positive, got {}", self.dt));
        }
        if !(self.t_end >= self.dt && self.t_end.is_finite()) {
            return input_err(format!("t_end must be at least dt, got {}", self.t_end));
        }
        if !(self.c > 0.0 && self.c.is_finite()) {
            return input_err("coupling strength c must be positive");
        }
        if !(self.a_g > 0.0 && self.a_g.is_finite()) || !self.b_g.is_finite() {
            return input_err("a_g must be positive and b_g finite");
        }
        if self.record_every == 0 {
            return input_err("record_every must be at least 1");
        }
        if self.beta.len() != n {
            return input_err(format!("beta has {} entries for {n} nodes", self.beta.len()));
        }
        if let Some(att) = &self.attack {
            if att.len() != n {
                return input_err(format!("attack has {} entries for {n} nodes", att.len()));
            }
        }
        let x_bar = self.target();
        if x_bar.len() != dim || x_bar.iter().any(|v| !v.is_finite()) {
            return input_err(format!("x_bar must hold {dim} finite values"));
        }
        let mut fx = vec![0.0; dim];
        self.field.eval_into(&x_bar, &mut fx);
        let residual = fx.iter().map(|v| v * v).sum::<f64>().sqrt();
        if residual > 1e-9 {
            return input_err(format!("x_bar is not an equilibrium: |f(x_bar)| = {residual:e}"));
        }
        if let Some(x0) = &self.x0 {
            if x0.len() != n || x0.iter().any(|r| r.len() != dim || r.iter().any(|v| !v.is_finite())) {
                return input_err(format!("x0 must be {n} rows of {dim} finite values"));
            }
        }
        Ok(())
    }

    /// Initial states flattened node-major.
    pub fn initial_state(&self) -> Vec<f64> {
        match &self.x0 {
            Some(rows) => rows.concat(),
            None => {
                let x_bar = self.target();
                let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
                (0..self.topology.n()).flat_map(|_| x_bar.iter().map(|c| c + rng.gen_range(-1.0..=1.0)).collect::<Vec<_>>()).collect()
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub nodes: usize,
    pub node_dim: usize,
    pub times: Vec<f64>,
    /// One flattened node-major `N×n` block per recorded instant.
    pub states: Vec<Vec<f64>>,
    /// `maxᵢ ‖xᵢ − x̄‖₂` per recorded instant.
    pub sync_error: Vec<f64>,
    pub diverged: bool,
}

impl Trajectory {
    pub fn node_state(&self, sample: usize, node: usize) -> &[f64] {
        &self.states[sample][node * self.node_dim..(node + 1) * self.node_dim]
    }

    pub fn final_error(&self) -> f64 {
        *self.sync_error.last().expect("trajectory has at least the initial sample")
    }
}

struct Rhs<'a> {
    field: &'a VectorField,
    neighbours: Vec<Vec<usize>>,
    /// `(1 − attᵢ)·βᵢ·c`.
    pin_gain: Vec<f64>,
    c: f64,
    a_g: f64,
    b_g: f64,
    g_bar: Vec<f64>,
    dim: usize,
}

impl Rhs<'_> {
    fn eval(&self, x: &[f64], out: &mut [f64]) {
        let d = self.dim;
        let g = |v: f64| self.a_g * v + self.b_g;
        for (i, nbrs) in self.neighbours.iter().enumerate() {
            let xi = &x[i * d..(i + 1) * d];
            let oi = &mut out[i * d..(i + 1) * d];
            self.field.eval_into(xi, oi);
            for k in 0..d {
                // Σⱼ aᵢⱼ g(xⱼ) written as Σ_{j~i} (g(xⱼ) − g(xᵢ)), exactly zero on the synchronous manifold.
                let gi = g(xi[k]);
                let coupling: f64 = nbrs.iter().map(|&j| g(x[j * d + k]) - gi).sum();
                oi[k] += self.c * coupling - self.pin_gain[i] * (gi - self.g_bar[k]);
            }
        }
    }
}

fn sync_error(x: &[f64], x_bar: &[f64]) -> f64 {
    x.chunks(x_bar.len())
        .map(|xi| xi.iter().zip(x_bar).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt())
        .fold(0.0, f64::max)
}

pub fn simulate(cfg: &SimConfig) -> Result<Trajectory> {
    cfg.validate()?;
    let n = cfg.topology.n();
    let dim = cfg.field.dim();
    let x_bar = cfg.target();
    let mut neighbours = vec![Vec::new(); n];
    for &[i, j] in cfg.topology.edges() {
        neighbours[i - 1].push(j - 1);
        neighbours[j - 1].push(i - 1);
    }
    let pin_gain = (0..n)
        .map(|i| {
            let attacked = cfg.attack.as_ref().map_or(false, |a| a.is_attacked(i));
            if attacked { 0.0 } else { cfg.beta.beta()[i] * cfg.c }
        })
        .collect();
    let rhs = Rhs {
        field: &cfg.field,
        neighbours,
        pin_gain,
        c: cfg.c,
        a_g: cfg.a_g,
        b_g: cfg.b_g,
        g_bar: x_bar.iter().map(|v| cfg.a_g * v + cfg.b_g).collect(),
        dim,
    };

    let steps = (cfg.t_end / cfg.dt).round() as usize;
    let len = n * dim;
    let mut x = cfg.initial_state();
    let mut traj = Trajectory {
        nodes: n,
        node_dim: dim,
        times: vec![0.0],
        states: vec![x.clone()],
        sync_error: vec![sync_error(&x, &x_bar)],
        diverged: false,
    };
    let (mut k1, mut k2, mut k3, mut k4, mut tmp) =
        (vec![0.0; len], vec![0.0; len], vec![0.0; len], vec![0.0; len], vec![0.0; len]);
    let h = cfg.dt;
    for step in 1..=steps {
        rhs.eval(&x, &mut k1);
        for i in 0..len {
            tmp[i] = x[i] + 0.5 * h * k1[i];
        }
        rhs.eval(&tmp, &mut k2);
        for i in 0..len {
            tmp[i] = x[i] + 0.5 * h * k2[i];
        }
        rhs.eval(&tmp, &mut k3);
        for i in 0..len {
            tmp[i] = x[i] + h * k3[i];
        }
        rhs.eval(&tmp, &mut k4);
        for i in 0..len {
            x[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        if x.iter().any(|v| !v.is_finite() || v.abs() > DIVERGENCE_LIMIT) {
            traj.diverged = true;
            break;
        }
        if step % cfg.record_every == 0 || step == steps {
            traj.times.push(step as f64 * h);
            traj.sync_error.push(sync_error(&x, &x_bar));
            traj.states.push(x.clone());
        }
    }
    Ok(traj)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRate {
    /// Per-second exponential rate; `−∞` under exact synchronization.
    pub rate: f64,
    pub exact_sync: bool,
}

/// Least-squares slope of `ln(sync_error)` over the final half of the run.
pub fn convergence_rate(traj: &Trajectory) -> Result<ConvergenceRate> {
    let Some(&t_last) = traj.times.last() else {
        return input_err("empty trajectory");
    };
    let start = traj.times.partition_point(|t| *t < 0.5 * t_last);
    let window: Vec<(f64, f64)> =
        traj.times[start..].iter().copied().zip(traj.sync_error[start..].iter().copied()).collect();
    if window.iter().any(|(_, e)| *e <= 0.0) {
        return Ok(ConvergenceRate { rate: f64::NEG_INFINITY, exact_sync: true });
    }
    if window.len() < 2 {
        return input_err("trajectory too short to fit a convergence rate");
    }
    let m = window.len() as f64;
    let t_mean = window.iter().map(|(t, _)| t).sum::<f64>() / m;
    let y_mean = window.iter().map(|(_, e)| e.ln()).sum::<f64>() / m;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (t, e) in &window {
        sxy += (t - t_mean) * (e.ln() - y_mean);
        sxx += (t - t_mean) * (t - t_mean);
    }
    Ok(ConvergenceRate { rate: sxy / sxx, exact_sync: false })
}
