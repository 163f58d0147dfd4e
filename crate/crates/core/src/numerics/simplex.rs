use serde::{Deserialize, Serialize};

use crate::error::{input_err, PinError, Result};
use crate::tolerances::Tolerances;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub coeffs: Vec<f64>,
    pub relation: Relation,
    pub rhs: f64,
}

/// `lower` may be `-∞` and `upper` may be `+∞`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VarBounds {
    pub lower: f64,
    pub upper: f64,
}

impl VarBounds {
    pub const NONNEG: VarBounds = VarBounds { lower: 0.0, upper: f64::INFINITY };
    pub const FREE: VarBounds = VarBounds { lower: f64::NEG_INFINITY, upper: f64::INFINITY };
}

/// `minimize objective·x` subject to the row constraints and per-variable bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    pub objective: Vec<f64>,
    pub constraints: Vec<Constraint>,
    pub bounds: Vec<VarBounds>,
}

impl LinearProgram {
    /// Minimization over `x ≥ 0` with no constraints yet.
    pub fn new(objective: Vec<f64>) -> Self {
        let n = objective.len();
        Self { objective, constraints: Vec::new(), bounds: vec![VarBounds::NONNEG; n] }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn constrain(&mut self, coeffs: Vec<f64>, relation: Relation, rhs: f64) -> &mut Self {
        self.constraints.push(Constraint { coeffs, relation, rhs });
        self
    }

    pub fn bound(&mut self, var: usize, lower: f64, upper: f64) -> &mut Self {
        self.bounds[var] = VarBounds { lower, upper };
        self
    }

    fn validate(&self) -> Result<()> {
        let n = self.num_vars();
        if self.bounds.len() != n {
            return input_err(format!("{} bounds for {} variables", self.bounds.len(), n));
        }
        if self.objective.iter().any(|c| !c.is_finite()) {
            return input_err("objective has non-finite entries");
        }
        for (i, c) in self.constraints.iter().enumerate() {
            if c.coeffs.len() != n {
                return input_err(format!("constraint {i} has {} coefficients, expected {n}", c.coeffs.len()));
            }
            if !c.rhs.is_finite() || c.coeffs.iter().any(|a| !a.is_finite()) {
                return input_err(format!("constraint {i} has non-finite data"));
            }
        }
        for (j, b) in self.bounds.iter().enumerate() {
            if b.lower.is_nan() || b.upper.is_nan() || b.lower == f64::INFINITY || b.upper == f64::NEG_INFINITY {
                return input_err(format!("variable {j} has invalid bounds [{}, {}]", b.lower, b.upper));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Primal point (meaningful when `Optimal`).
    pub x: Vec<f64>,
    pub objective_value: f64,
    /// One multiplier per original constraint: `≥ 0` on `Ge` rows, `≤ 0` on
    /// `Le` rows, free on `Eq` rows, so that `c − Aᵀy` prices the columns.
    pub duals: Vec<f64>,
    /// Improving direction when `Unbounded`.
    pub ray: Option<Vec<f64>>,
    /// Final phase-1 objective; positive certifies `Infeasible`.
    pub phase1_objective: f64,
    pub pivots: usize,
}

#[derive(Debug, Clone, Copy)]
enum VarMap {
    /// `x = lower + x'`
    Shift { col: usize, lower: f64 },
    /// `x = upper − x'`
    Mirror { col: usize, upper: f64 },
    /// `x = x⁺ − x⁻`
    Split { pos: usize, neg: usize },
}

struct Tableau {
    m: usize,
    width: usize,
    t: Vec<f64>,
    basis: Vec<usize>,
}

enum Phase {
    Optimal,
    Unbounded(usize),
}

impl Tableau {
    fn at(&self, i: usize, j: usize) -> f64 {
        self.t[i * (self.width + 1) + j]
    }

    fn rhs(&self, i: usize) -> f64 {
        self.at(i, self.width)
    }

    fn pivot(&mut self, r: usize, s: usize) {
        let w = self.width + 1;
        let p = self.t[r * w + s];
        for j in 0..w {
            self.t[r * w + j] /= p;
        }
        for i in 0..self.m {
            if i == r {
                continue;
            }
            let f = self.t[i * w + s];
            if f == 0.0 {
                continue;
            }
            for j in 0..w {
                let v = self.t[r * w + j];
                if v != 0.0 {
                    self.t[i * w + j] -= f * v;
                }
            }
            self.t[i * w + s] = 0.0;
        }
        self.basis[r] = s;
    }

    fn reduced_cost(&self, cost: &[f64], j: usize) -> f64 {
        let mut d = cost[j];
        for i in 0..self.m {
            let cb = cost[self.basis[i]];
            if cb != 0.0 {
                d -= cb * self.at(i, j);
            }
        }
        d
    }

    fn objective(&self, cost: &[f64]) -> f64 {
        (0..self.m).map(|i| cost[self.basis[i]] * self.rhs(i)).sum()
    }

    /// Primal simplex with Bland's rule (lowest-index entering column,
    /// lowest-index basic variable among tied leaving rows).
    fn run(&mut self, cost: &[f64], allowed: &[bool], tol: &Tolerances, pivots: &mut usize) -> Result<Phase> {
        let eps = tol.lp_pivot;
        loop {
            let mut in_basis = vec![false; self.width];
            for &b in &self.basis {
                in_basis[b] = true;
            }
            let entering = (0..self.width).find(|&j| allowed[j] && !in_basis[j] && self.reduced_cost(cost, j) < -eps);
            let Some(s) = entering else {
                return Ok(Phase::Optimal);
            };
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.m {
                let a = self.at(i, s);
                if a > eps {
                    let ratio = self.rhs(i).max(0.0) / a;
                    leave = match leave {
                        None => Some((i, ratio)),
                        Some((r, best)) => {
                            let tie = (ratio - best).abs() <= 1e-12 * (1.0 + best.abs());
                            if ratio < best && !tie || tie && self.basis[i] < self.basis[r] {
                                Some((i, ratio))
                            } else {
                                Some((r, best))
                            }
                        }
                    };
                }
            }
            let Some((r, _)) = leave else {
                return Ok(Phase::Unbounded(s));
            };
            *pivots += 1;
            if *pivots > tol.lp_max_pivots {
                return Err(PinError::Numerical(format!("simplex exceeded {} pivots", tol.lp_max_pivots)));
            }
            self.pivot(r, s);
        }
    }
}

/// Two-phase dense-tableau simplex.
pub fn solve_lp(lp: &LinearProgram, tol: &Tolerances) -> Result<LpSolution> {
    lp.validate()?;
    let n = lp.num_vars();

    for b in &lp.bounds {
        if b.lower > b.upper {
            return Ok(LpSolution {
                status: LpStatus::Infeasible,
                x: vec![0.0; n],
                objective_value: f64::NAN,
                duals: vec![0.0; lp.constraints.len()],
                ray: None,
                phase1_objective: b.lower - b.upper,
                pivots: 0,
            });
        }
    }

    // Map every variable onto non-negative structural columns.
    let mut maps = Vec::with_capacity(n);
    let mut ns = 0;
    for b in &lp.bounds {
        let map = if b.lower.is_finite() {
            VarMap::Shift { col: ns, lower: b.lower }
        } else if b.upper.is_finite() {
            VarMap::Mirror { col: ns, upper: b.upper }
        } else {
            ns += 1;
            VarMap::Split { pos: ns - 1, neg: ns }
        };
        ns += 1;
        maps.push(map);
    }

    let mut cost = vec![0.0; ns];
    for (j, map) in maps.iter().enumerate() {
        let c = lp.objective[j];
        match *map {
            VarMap::Shift { col, .. } => cost[col] = c,
            VarMap::Mirror { col, .. } => cost[col] = -c,
            VarMap::Split { pos, neg } => {
                cost[pos] = c;
                cost[neg] = -c;
            }
        }
    }

    struct Row {
        a: Vec<f64>,
        rel: Relation,
        rhs: f64,
        flipped: bool,
    }
    let mut rows = Vec::new();
    for c in &lp.constraints {
        let mut a = vec![0.0; ns];
        let mut rhs = c.rhs;
        for (j, map) in maps.iter().enumerate() {
            let v = c.coeffs[j];
            match *map {
                VarMap::Shift { col, lower } => {
                    a[col] += v;
                    rhs -= v * lower;
                }
                VarMap::Mirror { col, upper } => {
                    a[col] -= v;
                    rhs -= v * upper;
                }
                VarMap::Split { pos, neg } => {
                    a[pos] += v;
                    a[neg] -= v;
                }
            }
        }
        rows.push(Row { a, rel: c.relation, rhs, flipped: false });
    }
    for (j, map) in maps.iter().enumerate() {
        if let VarMap::Shift { col, lower } = *map {
            let upper = lp.bounds[j].upper;
            if upper.is_finite() {
                let mut a = vec![0.0; ns];
                a[col] = 1.0;
                rows.push(Row { a, rel: Relation::Le, rhs: upper - lower, flipped: false });
            }
        }
    }
    for row in rows.iter_mut() {
        if row.rhs < 0.0 {
            row.a.iter_mut().for_each(|v| *v = -*v);
            row.rhs = -row.rhs;
            row.flipped = true;
            row.rel = match row.rel {
                Relation::Le => Relation::Ge,
                Relation::Ge => Relation::Le,
                Relation::Eq => Relation::Eq,
            };
        }
    }

    // Column layout: structural | per-row slack/surplus | per-row artificial.
    let m = rows.len();
    let mut width = ns;
    let mut slack_col = vec![None; m];
    let mut art_col = vec![None; m];
    for (i, row) in rows.iter().enumerate() {
        if row.rel != Relation::Eq {
            slack_col[i] = Some(width);
            width += 1;
        }
    }
    for (i, row) in rows.iter().enumerate() {
        if row.rel != Relation::Le {
            art_col[i] = Some(width);
            width += 1;
        }
    }
    let mut is_art = vec![false; width];
    for c in art_col.iter().flatten() {
        is_art[*c] = true;
    }

    let mut tab = Tableau { m, width, t: vec![0.0; m * (width + 1)], basis: vec![0; m] };
    let w1 = width + 1;
    let mut identity_col = vec![0; m];
    for (i, row) in rows.iter().enumerate() {
        tab.t[i * w1..i * w1 + ns].copy_from_slice(&row.a);
        tab.t[i * w1 + width] = row.rhs;
        if let Some(s) = slack_col[i] {
            tab.t[i * w1 + s] = if row.rel == Relation::Le { 1.0 } else { -1.0 };
        }
        let basic = match row.rel {
            Relation::Le => slack_col[i].unwrap(),
            _ => {
                let a = art_col[i].unwrap();
                tab.t[i * w1 + a] = 1.0;
                a
            }
        };
        tab.basis[i] = basic;
        identity_col[i] = basic;
    }

    let mut pivots = 0;
    let mut phase1_objective = 0.0;
    if is_art.iter().any(|&a| a) {
        let cost1: Vec<f64> = (0..width).map(|j| if is_art[j] { 1.0 } else { 0.0 }).collect();
        let allowed = vec![true; width];
        tab.run(&cost1, &allowed, tol, &mut pivots)?;
        phase1_objective = tab.objective(&cost1);
        let scale = rows.iter().fold(1.0f64, |s, r| s.max(r.rhs.abs()));
        if phase1_objective > tol.lp_feasibility * scale {
            return Ok(LpSolution {
                status: LpStatus::Infeasible,
                x: vec![0.0; n],
                objective_value: f64::NAN,
                duals: vec![0.0; lp.constraints.len()],
                ray: None,
                phase1_objective,
                pivots,
            });
        }
        for i in 0..m {
            if is_art[tab.basis[i]] {
                if let Some(j) = (0..width).find(|&j| !is_art[j] && tab.at(i, j).abs() > tol.lp_pivot * 1e3) {
                    tab.pivot(i, j);
                }
            }
        }
    }

    let mut cost2 = vec![0.0; width];
    cost2[..ns].copy_from_slice(&cost);
    let allowed: Vec<bool> = is_art.iter().map(|a| !a).collect();
    let phase = tab.run(&cost2, &allowed, tol, &mut pivots)?;

    let mut xs = vec![0.0; width];
    for i in 0..m {
        xs[tab.basis[i]] = tab.rhs(i);
    }
    let to_original = |v: &[f64], with_offset: bool| -> Vec<f64> {
        maps.iter()
            .map(|map| match *map {
                VarMap::Shift { col, lower } => v[col] + if with_offset { lower } else { 0.0 },
                VarMap::Mirror { col, upper } => (if with_offset { upper } else { 0.0 }) - v[col],
                VarMap::Split { pos, neg } => v[pos] - v[neg],
            })
            .collect()
    };

    if let Phase::Unbounded(s) = phase {
        let mut dir = vec![0.0; width];
        dir[s] = 1.0;
        for i in 0..m {
            dir[tab.basis[i]] = -tab.at(i, s);
        }
        return Ok(LpSolution {
            status: LpStatus::Unbounded,
            x: to_original(&xs, true),
            objective_value: f64::NEG_INFINITY,
            duals: vec![0.0; lp.constraints.len()],
            ray: Some(to_original(&dir, false)),
            phase1_objective,
            pivots,
        });
    }

    let x = to_original(&xs, true);
    let objective_value = lp.objective.iter().zip(&x).map(|(c, v)| c * v).sum();
    let duals = (0..lp.constraints.len())
        .map(|i| {
            let y: f64 = (0..m).map(|k| cost2[tab.basis[k]] * tab.at(k, identity_col[i])).sum();
            if rows[i].flipped {
                -y
            } else {
                y
            }
        })
        .collect();
    Ok(LpSolution { status: LpStatus::Optimal, x, objective_value, duals, ray: None, phase1_objective, pivots })
}
