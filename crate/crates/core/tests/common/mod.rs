#![allow(dead_code)]

use pinlock::network::{coupling_matrix, CouplingMatrix, Topology};
use pinlock::numerics::{symmetric_eigen, SymMatrix};
use pinlock::Tolerances;
use rand::seq::SliceRandom;
use rand::Rng;

pub fn tol() -> Tolerances {
    Tolerances::default()
}

/// Random spanning tree plus each remaining edge with probability `p`.
pub fn random_connected<R: Rng>(rng: &mut R, n: usize, p: f64) -> Topology {
    let mut order: Vec<usize> = (1..=n).collect();
    order.shuffle(rng);
    let mut edges = Vec::new();
    for k in 1..n {
        let parent = order[rng.gen_range(0..k)];
        edges.push((order[k].min(parent), order[k].max(parent)));
    }
    for i in 1..=n {
        for j in i + 1..=n {
            if !edges.contains(&(i, j)) && rng.gen_bool(p) {
                edges.push((i, j));
            }
        }
    }
    Topology::new(n, edges).expect("valid random topology")
}

pub fn random_coupling<R: Rng>(rng: &mut R, n: usize) -> CouplingMatrix {
    coupling_matrix(&random_connected(rng, n, 0.3))
}

pub fn random_symmetric<R: Rng>(rng: &mut R, n: usize, scale: f64) -> SymMatrix {
    let mut rows = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i..n {
            let x = rng.gen_range(-scale..scale);
            rows[i][j] = x;
            rows[j][i] = x;
        }
    }
    SymMatrix::from_rows(&rows).unwrap()
}

pub fn lambda_max_of(a: &CouplingMatrix, d: &[f64]) -> f64 {
    symmetric_eigen(&a.minus_diag(d).unwrap(), &tol()).unwrap().max()
}

/// Exhaustive binary optimum of `min vᵀβ s.t. λ_max(A − s·diag β) ≤ θ`.
pub fn enumerate_binary(a: &CouplingMatrix, v: &[f64], theta: f64, scale: f64) -> Option<f64> {
    let n = a.n();
    let mut best: Option<f64> = None;
    for mask in 0u32..(1 << n) {
        let d: Vec<f64> = (0..n).map(|i| scale * f64::from((mask >> i) & 1)).collect();
        if lambda_max_of(a, &d) <= theta {
            let cost: f64 = (0..n).filter(|i| (mask >> i) & 1 == 1).map(|i| v[i]).sum();
            best = Some(best.map_or(cost, |b: f64| b.min(cost)));
        }
    }
    best
}

/// Smallest `b` with `λ_max(A − b·e_i) ≤ θ`, by bisection; `None` if unreachable.
pub fn single_node_gain(a: &CouplingMatrix, node: usize, theta: f64) -> Option<f64> {
    let n = a.n();
    let at = |b: f64| {
        let mut d = vec![0.0; n];
        d[node] = b;
        lambda_max_of(a, &d)
    };
    if at(0.0) <= theta {
        return Some(0.0);
    }
    let mut hi = 1.0;
    while at(hi) > theta {
        hi *= 2.0;
        if hi > 1e7 {
            return None;
        }
    }
    let mut lo = 0.0;
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if at(mid) <= theta {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(hi)
}

/// `K = A_SS − θI + A_SR (θI − A_RR)⁻¹ A_RS` for a support `S`; the scheme
/// supported on `S` meets `λ_max(A − diag β) ≤ θ` iff `diag(β_S) − K ⪰ 0`.
/// `None` when `θI − A_RR` is not positive definite (no gains on `S` can help).
pub fn support_reduction(a: &CouplingMatrix, support: &[usize], theta: f64) -> Option<Vec<Vec<f64>>> {
    let n = a.n();
    let m = a.matrix().as_matrix();
    let rest: Vec<usize> = (0..n).filter(|i| !support.contains(i)).collect();
    let r = rest.len();
    // Cholesky of θI − A_RR.
    let mut l = vec![vec![0.0; r]; r];
    for i in 0..r {
        for j in 0..=i {
            let mut s = if i == j { theta - m[(rest[i], rest[i])] } else { -m[(rest[i], rest[j])] };
            for k in 0..j {
                s -= l[i][k] * l[j][k];
            }
            if i == j {
                if s <= 0.0 {
                    return None;
                }
                l[i][i] = s.sqrt();
            } else {
                l[i][j] = s / l[j][j];
            }
        }
    }
    // Solve (θI − A_RR) X = A_RS column by column, then form K.
    let solve = |b: Vec<f64>| -> Vec<f64> {
        let mut y = b;
        for i in 0..r {
            for k in 0..i {
                y[i] -= l[i][k] * y[k];
            }
            y[i] /= l[i][i];
        }
        for i in (0..r).rev() {
            for k in i + 1..r {
                y[i] -= l[k][i] * y[k];
            }
            y[i] /= l[i][i];
        }
        y
    };
    let s = support.len();
    let cols: Vec<Vec<f64>> = support.iter().map(|&q| solve(rest.iter().map(|&p| m[(p, q)]).collect())).collect();
    let mut k = vec![vec![0.0; s]; s];
    for (x, &p) in support.iter().enumerate() {
        for (y, &q) in support.iter().enumerate() {
            let coupling: f64 = rest.iter().enumerate().map(|(t, &u)| m[(p, u)] * cols[y][t]).sum();
            k[x][y] = m[(p, q)] - if x == y { theta } else { 0.0 } + coupling;
        }
    }
    Some(k)
}

/// Cheapest scheme supported on one node.
pub fn single_support_optimum(a: &CouplingMatrix, v: &[f64], i: usize, theta: f64) -> Option<f64> {
    support_reduction(a, &[i], theta).map(|k| v[i] * k[0][0].max(0.0))
}

/// Cheapest scheme supported on `{i, j}` (either gain may be zero), by
/// iterated grid refinement over `β_i`; the cheapest `β_j` for each `β_i`
/// follows from the 2×2 reduced condition.
pub fn pair_optimum(a: &CouplingMatrix, v: &[f64], i: usize, j: usize, theta: f64) -> Option<f64> {
    let k = support_reduction(a, &[i, j], theta)?;
    let (k11, k12, k22) = (k[0][0], k[0][1], k[1][1]);
    if k12.abs() < 1e-14 {
        return Some(v[i] * k11.max(0.0) + v[j] * k22.max(0.0));
    }
    let lo0 = k11.max(0.0);
    let cost = |bi: f64| {
        if bi <= k11 {
            return f64::INFINITY;
        }
        v[i] * bi + v[j] * (k22 + k12 * k12 / (bi - k11)).max(0.0)
    };
    let mut lo = lo0;
    let mut hi = lo0 + 1.0;
    while cost(hi) > v[i] * hi && hi < 1e9 {
        hi = lo0 + 2.0 * (hi - lo0);
    }
    // The optimum lies where v_i·β_i alone stays below cost(hi).
    hi = hi.max(cost(hi) / v[i]);
    let points = 200;
    let mut best = f64::INFINITY;
    for _ in 0..60 {
        let step = (hi - lo) / points as f64;
        let mut arg = lo;
        for p in 0..=points {
            let x = lo + step * p as f64;
            let c = cost(x);
            if c < best {
                best = c;
                arg = x;
            }
        }
        lo = (arg - 2.0 * step).max(lo0);
        hi = arg + 2.0 * step;
    }
    best.is_finite().then_some(best)
}
