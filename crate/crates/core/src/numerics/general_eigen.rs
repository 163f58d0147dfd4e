use num_complex::Complex64;

use crate::error::{input_err, PinError, Result};
use crate::tolerances::Tolerances;

use super::matrix::Matrix;

/// All eigenvalues of a real square matrix.
///
/// Householder reduction to upper Hessenberg form followed by Francis
/// double-shift QR iteration. Complex eigenvalues come out in conjugate
/// pairs. Results are sorted by real part, then imaginary part.
pub fn general_eigenvalues(m: &Matrix, tol: &Tolerances) -> Result<Vec<Complex64>> {
    if !m.is_square() {
        return input_err(format!("eigenvalues need a square matrix, got {}x{}", m.rows(), m.cols()));
    }
    if !m.is_finite() {
        return input_err("matrix has non-finite entries");
    }
    let n = m.rows();
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut h = m.clone();
    hessenberg(&mut h);
    let mut eig = hqr(&mut h, tol.qr_iter_factor * n)?;
    eig.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    Ok(eig)
}

/// Largest real part over the spectrum.
pub fn max_real_part(m: &Matrix, tol: &Tolerances) -> Result<f64> {
    Ok(general_eigenvalues(m, tol)?.iter().fold(f64::NEG_INFINITY, |acc, z| acc.max(z.re)))
}

fn hessenberg(a: &mut Matrix) {
    let n = a.rows();
    if n < 3 {
        return;
    }
    for k in 0..n - 2 {
        let mut v: Vec<f64> = ((k + 1)..n).map(|i| a[(i, k)]).collect();
        let alpha = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if alpha == 0.0 {
            continue;
        }
        let alpha = if v[0] > 0.0 { -alpha } else { alpha };
        v[0] -= alpha;
        let vnorm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if vnorm == 0.0 {
            continue;
        }
        v.iter_mut().for_each(|x| *x /= vnorm);
        // A <- H A
        for j in 0..n {
            let dot: f64 = v.iter().enumerate().map(|(r, vr)| vr * a[(k + 1 + r, j)]).sum();
            for (r, vr) in v.iter().enumerate() {
                a[(k + 1 + r, j)] -= 2.0 * vr * dot;
            }
        }
        // A <- A H
        for i in 0..n {
            let dot: f64 = v.iter().enumerate().map(|(r, vr)| vr * a[(i, k + 1 + r)]).sum();
            for (r, vr) in v.iter().enumerate() {
                a[(i, k + 1 + r)] -= 2.0 * vr * dot;
            }
        }
        for i in (k + 2)..n {
            a[(i, k)] = 0.0;
        }
    }
}

fn sign(a: f64, b: f64) -> f64 {
    if b >= 0.0 {
        a.abs()
    } else {
        -a.abs()
    }
}

// Double-shift QR on an upper Hessenberg matrix (EISPACK hqr structure).
fn hqr(a: &mut Matrix, max_total_iters: usize) -> Result<Vec<Complex64>> {
    let n = a.rows() as isize;
    let mut wr = vec![0.0; n as usize];
    let mut wi = vec![0.0; n as usize];
    let at = |a: &Matrix, i: isize, j: isize| a[(i as usize, j as usize)];

    let mut anorm = 0.0;
    for i in 0..n {
        for j in (i - 1).max(0)..n {
            anorm += at(a, i, j).abs();
        }
    }

    let mut nn = n - 1;
    let mut t = 0.0;
    let mut total_iters = 0usize;
    while nn >= 0 {
        let mut its = 0;
        let mut l;
        loop {
            l = nn;
            while l >= 1 {
                let mut s = at(a, l - 1, l - 1).abs() + at(a, l, l).abs();
                if s == 0.0 {
                    s = anorm;
                }
                if at(a, l, l - 1).abs() + s == s {
                    a[(l as usize, (l - 1) as usize)] = 0.0;
                    break;
                }
                l -= 1;
            }
            let mut x = at(a, nn, nn);
            if l == nn {
                wr[nn as usize] = x + t;
                wi[nn as usize] = 0.0;
                nn -= 1;
                break;
            }
            let mut y = at(a, nn - 1, nn - 1);
            let mut w = at(a, nn, nn - 1) * at(a, nn - 1, nn);
            if l == nn - 1 {
                let p = 0.5 * (y - x);
                let q = p * p + w;
                let mut z = q.abs().sqrt();
                x += t;
                let (i1, i0) = (nn as usize, (nn - 1) as usize);
                if q >= 0.0 {
                    z = p + sign(z, p);
                    wr[i0] = x + z;
                    wr[i1] = x + z;
                    if z != 0.0 {
                        wr[i1] = x - w / z;
                    }
                    wi[i0] = 0.0;
                    wi[i1] = 0.0;
                } else {
                    wr[i0] = x + p;
                    wr[i1] = x + p;
                    wi[i0] = -z;
                    wi[i1] = z;
                }
                nn -= 2;
                break;
            }
            if its >= 30 || total_iters >= max_total_iters {
                return Err(PinError::Numerical(format!(
                    "shifted QR did not converge: {} iterations ({} on the current block), {} eigenvalues unresolved",
                    total_iters,
                    its,
                    nn + 1
                )));
            }
            if its == 10 || its == 20 {
                t += x;
                for i in 0..=nn {
                    a[(i as usize, i as usize)] -= x;
                }
                let s = at(a, nn, nn - 1).abs() + at(a, nn - 1, nn - 2).abs();
                x = 0.75 * s;
                y = x;
                w = -0.4375 * s * s;
            }
            its += 1;
            total_iters += 1;

            let (mut p, mut q, mut r);
            let mut m = nn - 2;
            loop {
                let z = at(a, m, m);
                let rr = x - z;
                let s = y - z;
                p = (rr * s - w) / at(a, m + 1, m) + at(a, m, m + 1);
                q = at(a, m + 1, m + 1) - z - rr - s;
                r = at(a, m + 2, m + 1);
                let s = p.abs() + q.abs() + r.abs();
                p /= s;
                q /= s;
                r /= s;
                if m == l {
                    break;
                }
                let u = at(a, m, m - 1).abs() * (q.abs() + r.abs());
                let v = p.abs() * (at(a, m - 1, m - 1).abs() + z.abs() + at(a, m + 1, m + 1).abs());
                if u + v == v {
                    break;
                }
                m -= 1;
            }
            for i in (m + 2)..=nn {
                a[(i as usize, (i - 2) as usize)] = 0.0;
                if i != m + 2 {
                    a[(i as usize, (i - 3) as usize)] = 0.0;
                }
            }
            let mut k = m;
            while k <= nn - 1 {
                if k != m {
                    p = at(a, k, k - 1);
                    q = at(a, k + 1, k - 1);
                    r = if k != nn - 1 { at(a, k + 2, k - 1) } else { 0.0 };
                    x = p.abs() + q.abs() + r.abs();
                    if x != 0.0 {
                        p /= x;
                        q /= x;
                        r /= x;
                    }
                }
                let s = sign((p * p + q * q + r * r).sqrt(), p);
                if s != 0.0 {
                    if k == m {
                        if l != m {
                            a[(k as usize, (k - 1) as usize)] = -at(a, k, k - 1);
                        }
                    } else {
                        a[(k as usize, (k - 1) as usize)] = -s * x;
                    }
                    p += s;
                    x = p / s;
                    y = q / s;
                    let z = r / s;
                    q /= p;
                    r /= p;
                    for j in k..=nn {
                        let (ku, k1) = (k as usize, (k + 1) as usize);
                        let j = j as usize;
                        let mut pp = a[(ku, j)] + q * a[(k1, j)];
                        if k != nn - 1 {
                            let k2 = (k + 2) as usize;
                            pp += r * a[(k2, j)];
                            a[(k2, j)] -= pp * z;
                        }
                        a[(k1, j)] -= pp * y;
                        a[(ku, j)] -= pp * x;
                    }
                    let mmin = if nn < k + 3 { nn } else { k + 3 };
                    for i in l..=mmin {
                        let (ku, k1, i) = (k as usize, (k + 1) as usize, i as usize);
                        let mut pp = x * a[(i, ku)] + y * a[(i, k1)];
                        if k != nn - 1 {
                            let k2 = (k + 2) as usize;
                            pp += z * a[(i, k2)];
                            a[(i, k2)] -= pp * r;
                        }
                        a[(i, k1)] -= pp * q;
                        a[(i, ku)] -= pp;
                    }
                }
                k += 1;
            }
        }
    }
    Ok(wr.into_iter().zip(wi).map(|(re, im)| Complex64::new(re, im)).collect())
}
