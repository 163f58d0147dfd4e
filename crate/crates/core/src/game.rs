//! Stackelberg pinning-attack game.
//!
//! The defender spreads protection `π_d` over the pinned set; compromising
//! node `i` then costs the attacker `κᵢ·πᵢ`. An attack (a subset of pinned
//! nodes whose controllers are disabled) succeeds when the residual pinning
//! no longer meets the synchronization threshold. The defender commits first
//! and maximizes the cheapest successful attack minus `η·1ᵀπ_d`.

use serde::{Deserialize, Serialize};

use crate::error::{input_err, PinError, Result};
use crate::network::CouplingMatrix;
use crate::numerics::{solve_lp, symmetric_eigen, LinearProgram, LpSolution, LpStatus, Matrix, Relation};
use crate::sync::{sync_threshold, verdict, NodeDynamics};
use crate::tolerances::Tolerances;

/// Largest pinned set whose attacks are enumerated exhaustively.
pub const MAX_ENUMERATED_PINNED: usize = 25;

/// Binary per-node attack indicator.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<u8>", into = "Vec<u8>")]
pub struct AttackVector(Vec<bool>);

impl TryFrom<Vec<u8>> for AttackVector {
    type Error = PinError;
    fn try_from(v: Vec<u8>) -> Result<Self> {
        if let Some(x) = v.iter().find(|x| **x > 1) {
            return input_err(format!("attack vector entries must be 0 or 1, got {x}"));
        }
        Ok(Self(v.into_iter().map(|x| x == 1).collect()))
    }
}

impl From<AttackVector> for Vec<u8> {
    fn from(a: AttackVector) -> Self {
        a.0.into_iter().map(u8::from).collect()
    }
}

impl AttackVector {
    pub fn new(attacked: Vec<bool>) -> Self {
        Self(attacked)
    }

    /// Attack on the given 1-based node ids.
    pub fn from_nodes(n: usize, ids: &[usize]) -> Result<Self> {
        let mut v = vec![false; n];
        for &id in ids {
            if id == 0 || id > n {
                return input_err(format!("attacked node {id} outside 1..={n}"));
            }
            v[id - 1] = true;
        }
        Ok(Self(v))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// 0-based.
    pub fn is_attacked(&self, i: usize) -> bool {
        self.0[i]
    }

    /// 1-based ids of attacked nodes.
    pub fn nodes(&self) -> Vec<usize> {
        (0..self.0.len()).filter(|&i| self.0[i]).map(|i| i + 1).collect()
    }

    pub fn as_f64(&self) -> Vec<f64> {
        self.0.iter().map(|a| f64::from(u8::from(*a))).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DefenseAllocation {
    pub pi_d: Vec<f64>,
    /// `1ᵀπ_d`.
    pub total: f64,
}

impl DefenseAllocation {
    fn new(pi_d: Vec<f64>) -> Self {
        let total = pi_d.iter().sum();
        Self { pi_d, total }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GameSpec {
    coupling: CouplingMatrix,
    /// 0-based pinned nodes, ascending.
    pinned: Vec<usize>,
    kappa: Vec<f64>,
    eta: f64,
    gain_ratio: f64,
    threshold: f64,
    pi_cap: Option<f64>,
}

impl GameSpec {
    /// Fails unless the unattacked pinning synchronizes the network.
    pub fn new(
        coupling: CouplingMatrix,
        beta_pin: &[f64],
        kappa: Vec<f64>,
        eta: f64,
        gain_ratio: f64,
        dynamics: &NodeDynamics,
        tol: &Tolerances,
    ) -> Result<Self> {
        Self::with_threshold(coupling, beta_pin, kappa, eta, gain_ratio, sync_threshold(dynamics, tol)?, tol)
    }

    pub fn with_threshold(
        coupling: CouplingMatrix,
        beta_pin: &[f64],
        kappa: Vec<f64>,
        eta: f64,
        gain_ratio: f64,
        threshold: f64,
        tol: &Tolerances,
    ) -> Result<Self> {
        coupling.require_connected()?;
        let n = coupling.n();
        if beta_pin.len() != n || kappa.len() != n {
            return input_err(format!(
                "beta_pin has {} and kappa {} entries for {n} nodes",
                beta_pin.len(),
                kappa.len()
            ));
        }
        if beta_pin.iter().any(|b| *b != 0.0 && *b != 1.0) {
            return input_err("beta_pin must be binary");
        }
        if let Some((i, k)) = kappa.iter().enumerate().find(|(_, k)| !(**k > 0.0 && k.is_finite())) {
            return input_err(format!("kappa of node {} must be positive, got {k}", i + 1));
        }
        if !(eta >= 0.0 && eta.is_finite()) {
            return input_err(format!("eta must be nonnegative, got {eta}"));
        }
        if !(gain_ratio > 0.0 && gain_ratio.is_finite()) {
            return input_err(format!("gain ratio must be positive, got {gain_ratio}"));
        }
        if !threshold.is_finite() {
            return input_err("threshold must be finite");
        }
        let pinned: Vec<usize> = (0..n).filter(|&i| beta_pin[i] == 1.0).collect();
        let spec = Self { coupling, pinned, kappa, eta, gain_ratio, threshold, pi_cap: None };
        let v = verdict(spec.residual_mu_n(&[], tol)?, threshold, tol);
        if !v.synced {
            return input_err(format!(
                "the unattacked pinning does not synchronize the network (μ_N = {:.6}, threshold = {:.6})",
                v.mu_n, threshold
            ));
        }
        Ok(spec)
    }

    /// Uniform upper bound on every `πᵢ`.
    pub fn with_pi_cap(mut self, cap: f64) -> Result<Self> {
        if !(cap > 0.0 && cap.is_finite()) {
            return input_err(format!("pi_cap must be positive, got {cap}"));
        }
        self.pi_cap = Some(cap);
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.coupling.n()
    }

    /// 1-based pinned node ids.
    pub fn pinned(&self) -> Vec<usize> {
        self.pinned.iter().map(|i| i + 1).collect()
    }

    pub fn kappa(&self) -> &[f64] {
        &self.kappa
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    pub fn pi_cap(&self) -> Option<f64> {
        self.pi_cap
    }

    /// 1-based nodes whose κ never enters the game (they are not pinned).
    pub fn unused_kappa_nodes(&self) -> Vec<usize> {
        (0..self.n()).filter(|i| !self.pinned.contains(i)).map(|i| i + 1).collect()
    }

    /// `λ_max(A − s·diag(β_pin ∘ (1 − att)))` with `attacked` 0-based.
    fn residual_mu_n(&self, attacked: &[usize], tol: &Tolerances) -> Result<f64> {
        let mut d = vec![0.0; self.n()];
        for &i in &self.pinned {
            if !attacked.contains(&i) {
                d[i] = self.gain_ratio;
            }
        }
        Ok(symmetric_eigen(&self.coupling.minus_diag(&d)?, tol)?.max())
    }

    /// Whether disabling the given attack leaves the network unsynchronized.
    pub fn attack_succeeds(&self, attack: &AttackVector, tol: &Tolerances) -> Result<bool> {
        if attack.len() != self.n() {
            return input_err(format!("attack has {} entries for {} nodes", attack.len(), self.n()));
        }
        let attacked: Vec<usize> = (0..self.n()).filter(|&i| attack.is_attacked(i)).collect();
        Ok(self.residual_mu_n(&attacked, tol)? >= self.threshold - tol.sync_boundary)
    }
}

/// All successful attacks supported on the pinned set. Subsets are read as
/// binary numbers with the lowest-numbered pinned node as the most significant
/// bit, and listed in increasing order.
pub fn enumerate_successful_attacks(spec: &GameSpec, tol: &Tolerances) -> Result<Vec<AttackVector>> {
    let p = spec.pinned.len();
    if p > MAX_ENUMERATED_PINNED {
        return Err(PinError::Capacity(format!(
            "{p} pinned nodes exceed the enumeration limit of {MAX_ENUMERATED_PINNED}; \
             minimal-attack pruning would be needed"
        )));
    }
    let mut out = Vec::new();
    for mask in 0u64..(1u64 << p) {
        let attacked: Vec<usize> =
            (0..p).filter(|&j| (mask >> (p - 1 - j)) & 1 == 1).map(|j| spec.pinned[j]).collect();
        if spec.residual_mu_n(&attacked, tol)? >= spec.threshold - tol.sync_boundary {
            let mut v = vec![false; spec.n()];
            for i in attacked {
                v[i] = true;
            }
            out.push(AttackVector(v));
        }
    }
    Ok(out)
}

/// Row `i` is `κ ∘ β_attack,i − η·1`.
pub fn build_m(attacks: &[AttackVector], kappa: &[f64], eta: f64) -> Matrix {
    Matrix::from_fn(attacks.len(), kappa.len(), |i, j| {
        let hit = if attacks[i].is_attacked(j) { kappa[j] } else { 0.0 };
        hit - eta
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GameStatus {
    Optimal,
    /// The defender's payoff grows without limit; see `ray`.
    Unbounded,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttackRecord {
    /// 1-based attacked nodes.
    pub nodes: Vec<usize>,
    /// `(κ ∘ π_d) · β_attack`, absent when the game is unbounded.
    pub cost: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GameOutcome {
    pub status: GameStatus,
    pub pi_d_star: Option<DefenseAllocation>,
    pub beta_attack_star: Option<AttackVector>,
    /// `𝒰_a`: the cheapest successful attack under `π_d★`.
    pub attack_cost: Option<f64>,
    /// `ℛ_d = 𝒰_a − η·1ᵀπ_d★`.
    pub defender_payoff: Option<f64>,
    /// Direction in `π_d` along which the defender's payoff is unbounded.
    pub ray: Option<Vec<f64>>,
    /// `t₀`.
    pub successful_attacks: usize,
    pub attacks: Vec<AttackRecord>,
}

/// Attacker best response to `pi_d`: the first attack (in enumeration order)
/// whose cost is within 1e-9 relative of the minimum, with that minimum.
pub fn best_response(attacks: &[AttackVector], kappa: &[f64], pi_d: &[f64]) -> Option<(usize, f64)> {
    let costs: Vec<f64> = attacks.iter().map(|a| attack_cost(a, kappa, pi_d)).collect();
    let min = costs.iter().copied().fold(f64::INFINITY, f64::min);
    let eps = 1e-9 * min.abs().max(1.0);
    costs.iter().position(|c| *c <= min + eps).map(|k| (k, min))
}

fn attack_cost(a: &AttackVector, kappa: &[f64], pi_d: &[f64]) -> f64 {
    (0..kappa.len()).filter(|&i| a.is_attacked(i)).map(|i| kappa[i] * pi_d[i]).sum()
}

fn enumerate_nonempty(spec: &GameSpec, tol: &Tolerances) -> Result<Vec<AttackVector>> {
    let attacks = enumerate_successful_attacks(spec, tol)?;
    if attacks.is_empty() {
        return Err(PinError::DegenerateGame);
    }
    Ok(attacks)
}

/// Variables: one `π` per pinned node, then `ε` (free). Maximizes `ε`
/// subject to `Mπ ≥ ε·1`.
fn maximin_lp(spec: &GameSpec, m: &Matrix, budget: Option<f64>) -> LinearProgram {
    let p = spec.pinned.len();
    let mut objective = vec![0.0; p + 1];
    objective[p] = -1.0;
    let mut lp = LinearProgram::new(objective);
    for r in 0..m.rows() {
        let mut row: Vec<f64> = spec.pinned.iter().map(|&i| m[(r, i)]).collect();
        row.push(-1.0);
        lp.constrain(row, Relation::Ge, 0.0);
    }
    if let Some(omega) = budget {
        let mut row = vec![1.0; p];
        row.push(0.0);
        lp.constrain(row, Relation::Le, omega);
    }
    for j in 0..p {
        lp.bound(j, 0.0, spec.pi_cap.unwrap_or(f64::INFINITY));
    }
    lp.bound(p, f64::NEG_INFINITY, f64::INFINITY);
    lp
}

fn expand(spec: &GameSpec, reduced: &[f64]) -> Vec<f64> {
    let mut full = vec![0.0; spec.n()];
    for (j, &i) in spec.pinned.iter().enumerate() {
        full[i] = reduced[j].clamp(0.0, spec.pi_cap.unwrap_or(f64::INFINITY));
    }
    full
}

fn priced(spec: &GameSpec, attacks: &[AttackVector], pi: Vec<f64>, eta: f64) -> GameOutcome {
    let (k, u_a) = best_response(attacks, &spec.kappa, &pi).expect("at least one attack");
    let alloc = DefenseAllocation::new(pi);
    let records = attacks
        .iter()
        .map(|a| AttackRecord { nodes: a.nodes(), cost: Some(attack_cost(a, &spec.kappa, &alloc.pi_d)) })
        .collect();
    GameOutcome {
        status: GameStatus::Optimal,
        beta_attack_star: Some(attacks[k].clone()),
        attack_cost: Some(u_a),
        defender_payoff: Some(u_a - eta * alloc.total),
        pi_d_star: Some(alloc),
        ray: None,
        successful_attacks: attacks.len(),
        attacks: records,
    }
}

fn outcome(spec: &GameSpec, attacks: &[AttackVector], sol: &LpSolution, eta: f64) -> Result<GameOutcome> {
    let t0 = attacks.len();
    match sol.status {
        LpStatus::Optimal => Ok(priced(spec, attacks, expand(spec, &sol.x), eta)),
        LpStatus::Unbounded => Ok(GameOutcome {
            status: GameStatus::Unbounded,
            pi_d_star: None,
            beta_attack_star: None,
            attack_cost: None,
            defender_payoff: None,
            ray: sol.ray.as_ref().map(|r| expand(spec, r)),
            successful_attacks: t0,
            attacks: attacks.iter().map(|a| AttackRecord { nodes: a.nodes(), cost: None }).collect(),
        }),
        LpStatus::Infeasible => Err(PinError::Numerical("maximin LP reported infeasible although π = 0 is feasible".into())),
    }
}

/// Prices every successful attack under a given allocation (no spending penalty).
pub fn evaluate_allocation(spec: &GameSpec, alloc: &DefenseAllocation, tol: &Tolerances) -> Result<GameOutcome> {
    if alloc.pi_d.len() != spec.n() {
        return input_err(format!("allocation has {} entries for {} nodes", alloc.pi_d.len(), spec.n()));
    }
    let attacks = enumerate_nonempty(spec, tol)?;
    Ok(priced(spec, &attacks, alloc.pi_d.clone(), 0.0))
}

/// Defender's max-min allocation and the attacker's best response.
pub fn solve_stackelberg(spec: &GameSpec, tol: &Tolerances) -> Result<GameOutcome> {
    let attacks = enumerate_nonempty(spec, tol)?;
    let m = build_m(&attacks, &spec.kappa, spec.eta);
    let sol = solve_lp(&maximin_lp(spec, &m, None), tol)?;
    outcome(spec, &attacks, &sol, spec.eta)
}

/// Max-min allocation under `1ᵀπ_d ≤ ω_d`, with no penalty on spending.
pub fn solve_fixed_defender_budget(spec: &GameSpec, omega_d: f64, tol: &Tolerances) -> Result<GameOutcome> {
    if !(omega_d > 0.0 && omega_d.is_finite()) {
        return input_err(format!("defender budget must be positive, got {omega_d}"));
    }
    let attacks = enumerate_nonempty(spec, tol)?;
    let m = build_m(&attacks, &spec.kappa, 0.0);
    let sol = solve_lp(&maximin_lp(spec, &m, Some(omega_d)), tol)?;
    outcome(spec, &attacks, &sol, 0.0)
}

/// Cheapest allocation making every successful attack cost at least `ω_a`.
pub fn solve_fixed_attacker_budget(spec: &GameSpec, omega_a: f64, tol: &Tolerances) -> Result<DefenseAllocation> {
    if !(omega_a > 0.0 && omega_a.is_finite()) {
        return input_err(format!("attacker budget must be positive, got {omega_a}"));
    }
    let attacks = enumerate_nonempty(spec, tol)?;
    let m = build_m(&attacks, &spec.kappa, 0.0);
    let p = spec.pinned.len();
    let mut lp = LinearProgram::new(vec![1.0; p]);
    for r in 0..m.rows() {
        lp.constrain(spec.pinned.iter().map(|&i| m[(r, i)]).collect(), Relation::Ge, omega_a);
    }
    if let Some(cap) = spec.pi_cap {
        for j in 0..p {
            lp.bound(j, 0.0, cap);
        }
    }
    let sol = solve_lp(&lp, tol)?;
    match sol.status {
        LpStatus::Optimal => Ok(DefenseAllocation::new(expand(spec, &sol.x))),
        LpStatus::Infeasible => Err(PinError::Infeasible(format!(
            "no allocation raises every successful attack's cost to {omega_a}"
        ))),
        LpStatus::Unbounded => Err(PinError::Numerical("budget-minimization LP reported unbounded".into())),
    }
}
