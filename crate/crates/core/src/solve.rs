//! Small numerical toolbox: 1-D root bracketing/bisection with Newton
//! polish, a Nelder-Mead simplex, a damped Gauss-Newton polish for
//! small least-squares systems, and adaptive Simpson quadrature.

use crate::error::{Error, Result};

/// Scans `f` over a geometric grid in `[lo, hi]` and returns the first
/// bracket `[a, b]` with a sign change.
pub fn scan_bracket<F: Fn(f64) -> f64>(
    f: &F,
    lo: f64,
    hi: f64,
    points: usize,
) -> Option<(f64, f64)> {
    let ratio = (hi / lo).powf(1.0 / (points as f64 - 1.0));
    let mut x_prev = lo;
    let mut f_prev = f(lo);
    for i in 1..points {
        let x = lo * ratio.powi(i as i32);
        let fx = f(x);
        if f_prev.is_finite() && fx.is_finite() && f_prev * fx <= 0.0 {
            return Some((x_prev, x));
        }
        x_prev = x;
        f_prev = fx;
    }
    None
}

/// Bisection to a root of `f` inside a sign-changing bracket, with a
/// relative x tolerance and residual tolerance.
pub fn bisect<F: Fn(f64) -> f64>(
    f: &F,
    mut lo: f64,
    mut hi: f64,
    f_tol: f64,
    max_iter: usize,
) -> Result<f64> {
    let mut f_lo = f(lo);
    let f_hi = f(hi);
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if f_lo * f_hi > 0.0 {
        return Err(Error::non_convergence(format!(
            "bisect: no sign change on [{lo}, {hi}] (f = {f_lo}, {f_hi})"
        )));
    }
    for _ in 0..max_iter {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return Ok(mid);
        }
        let fm = f(mid);
        if fm.abs() <= f_tol {
            return Ok(mid);
        }
        if f_lo * fm <= 0.0 {
            hi = mid;
        } else {
            lo = mid;
            f_lo = fm;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Nelder-Mead options.
#[derive(Debug, Clone, Copy)]
pub struct SimplexOptions {
    pub max_iter: usize,
    pub f_tol: f64,
    pub initial_step: f64,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        SimplexOptions {
            max_iter: 2000,
            f_tol: 1e-13,
            initial_step: 0.25,
        }
    }
}

/// Minimizes `f` with the Nelder-Mead simplex. Returns `(x, f(x))`.
pub fn nelder_mead<F: Fn(&[f64]) -> f64>(
    f: &F,
    x0: &[f64],
    opts: SimplexOptions,
) -> (Vec<f64>, f64) {
    let n = x0.len();
    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    simplex.push(x0.to_vec());
    for i in 0..n {
        let mut v = x0.to_vec();
        v[i] += if v[i].abs() > 1e-8 {
            opts.initial_step * v[i].abs()
        } else {
            opts.initial_step
        };
        simplex.push(v);
    }
    let mut values: Vec<f64> = simplex.iter().map(|v| f(v)).collect();

    for _ in 0..opts.max_iter {
        // Order the simplex by value.
        let mut idx: Vec<usize> = (0..=n).collect();
        idx.sort_by(|&a, &b| {
            values[a]
                .partial_cmp(&values[b])
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        let ordered: Vec<Vec<f64>> = idx.iter().map(|&i| simplex[i].clone()).collect();
        let ordered_vals: Vec<f64> = idx.iter().map(|&i| values[i]).collect();
        simplex = ordered;
        values = ordered_vals;

        if (values[n] - values[0]).abs() <= opts.f_tol * (1.0 + values[0].abs()) {
            break;
        }

        let centroid: Vec<f64> = (0..n)
            .map(|j| simplex[..n].iter().map(|v| v[j]).sum::<f64>() / n as f64)
            .collect();
        let worst = simplex[n].clone();
        let reflect: Vec<f64> = (0..n)
            .map(|j| centroid[j] + (centroid[j] - worst[j]))
            .collect();
        let f_reflect = f(&reflect);

        if f_reflect < values[0] {
            let expand: Vec<f64> = (0..n)
                .map(|j| centroid[j] + 2.0 * (centroid[j] - worst[j]))
                .collect();
            let f_expand = f(&expand);
            if f_expand < f_reflect {
                simplex[n] = expand;
                values[n] = f_expand;
            } else {
                simplex[n] = reflect;
                values[n] = f_reflect;
            }
        } else if f_reflect < values[n - 1] {
            simplex[n] = reflect;
            values[n] = f_reflect;
        } else {
            let contract: Vec<f64> = (0..n)
                .map(|j| centroid[j] + 0.5 * (worst[j] - centroid[j]))
                .collect();
            let f_contract = f(&contract);
            if f_contract < values[n] {
                simplex[n] = contract;
                values[n] = f_contract;
            } else {
                // Shrink toward the best vertex.
                let best = simplex[0].clone();
                for v in simplex.iter_mut().skip(1) {
                    for j in 0..n {
                        v[j] = best[j] + 0.5 * (v[j] - best[j]);
                    }
                }
                for (i, v) in simplex.iter().enumerate().skip(1) {
                    values[i] = f(v);
                }
            }
        }
    }
    let mut best = 0;
    for i in 1..=n {
        if values[i] < values[best] {
            best = i;
        }
    }
    (simplex[best].clone(), values[best])
}

/// Central finite-difference gradient.
pub fn fd_gradient<F: Fn(&[f64]) -> f64>(f: &F, x: &[f64]) -> Vec<f64> {
    let n = x.len();
    let mut g = vec![0.0; n];
    let mut xp = x.to_vec();
    for i in 0..n {
        let h = 1e-6 * x[i].abs().max(1e-3);
        xp[i] = x[i] + h;
        let fp = f(&xp);
        xp[i] = x[i] - h;
        let fm = f(&xp);
        xp[i] = x[i];
        g[i] = (fp - fm) / (2.0 * h);
    }
    g
}

/// Damped Gauss-Newton on a small residual system `r(x)`, minimizing
/// `Σ wᵢ rᵢ²` with a finite-difference Jacobian. Suited to the 2x2
/// systems of the elicitation layer.
pub fn gauss_newton<R: Fn(&[f64]) -> Vec<f64>>(
    residuals: &R,
    x0: &[f64],
    weights: &[f64],
    max_iter: usize,
) -> (Vec<f64>, Vec<f64>, usize) {
    let n = x0.len();
    let mut x = x0.to_vec();
    let mut r = residuals(&x);
    let obj = |r: &[f64]| -> f64 { r.iter().zip(weights).map(|(ri, wi)| wi * ri * ri).sum() };
    let mut iterations = 0;
    for _ in 0..max_iter {
        iterations += 1;
        let m = r.len();
        // Jacobian by central differences.
        let mut jac = vec![vec![0.0; n]; m];
        let mut xp = x.clone();
        for j in 0..n {
            let h = 1e-7 * x[j].abs().max(1e-5);
            xp[j] = x[j] + h;
            let rp = residuals(&xp);
            xp[j] = x[j] - h;
            let rm = residuals(&xp);
            xp[j] = x[j];
            for i in 0..m {
                jac[i][j] = (rp[i] - rm[i]) / (2.0 * h);
            }
        }
        // Normal equations JᵀWJ δ = -JᵀWr (n is 1 or 2 here).
        let mut a = vec![vec![0.0; n]; n];
        let mut b = vec![0.0; n];
        for i in 0..m {
            for j in 0..n {
                b[j] -= weights[i] * jac[i][j] * r[i];
                for k in 0..n {
                    a[j][k] += weights[i] * jac[i][j] * jac[i][k];
                }
            }
        }
        let delta = match solve_small(&mut a, &mut b) {
            Some(d) => d,
            None => break,
        };
        // Backtracking line search on the weighted objective.
        let f0 = obj(&r);
        let mut step = 1.0;
        let mut improved = false;
        for _ in 0..30 {
            let trial: Vec<f64> = x
                .iter()
                .zip(&delta)
                .map(|(xi, di)| xi + step * di)
                .collect();
            let rt = residuals(&trial);
            if rt.iter().all(|v| v.is_finite()) && obj(&rt) < f0 {
                x = trial;
                r = rt;
                improved = true;
                break;
            }
            step *= 0.5;
        }
        if !improved {
            break;
        }
        if r.iter().map(|v| v.abs()).fold(0.0, f64::max) < 1e-14 {
            break;
        }
    }
    (x, r, iterations)
}

/// Gaussian elimination for tiny dense systems (n <= 3).
fn solve_small(a: &mut [Vec<f64>], b: &mut [f64]) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        // Partial pivot.
        let mut pivot = col;
        for row in (col + 1)..n {
            if a[row][col].abs() > a[pivot][col].abs() {
                pivot = row;
            }
        }
        if a[pivot][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in (col + 1)..n {
            let factor = a[row][col] / a[col][col];
            let pivot_row = a[col].clone();
            for (k, pv) in pivot_row.iter().enumerate().skip(col) {
                a[row][k] -= factor * pv;
            }
            b[row] -= factor * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for col in (0..n).rev() {
        let mut sum = b[col];
        for k in (col + 1)..n {
            sum -= a[col][k] * x[k];
        }
        x[col] = sum / a[col][col];
    }
    Some(x)
}

/// Adaptive Simpson quadrature of `f` over `[a, b]` to absolute
/// tolerance `tol` (per-interval error control with Richardson
/// extrapolation).
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_recurse(f, a, b, fa, fb, fm, whole, tol, 60)
}

#[allow(clippy::too_many_arguments)]
fn simpson_recurse<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fb: f64,
    fm: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        left + right + delta / 15.0
    } else {
        simpson_recurse(f, a, m, fa, fm, flm, left, 0.5 * tol, depth - 1)
            + simpson_recurse(f, m, b, fm, fb, frm, right, 0.5 * tol, depth - 1)
    }
}
