//! Reference implementations used as test oracles. They are deliberately
//! naive and share no code with the library solvers.

#![allow(dead_code)]

/// Minimizes Σ(y − Xβ − b)² + λ‖β‖² by Nesterov-accelerated gradient
/// descent, stopping once the gradient max-norm falls below `tol`.
pub fn gd_ridge(rows: &[Vec<f64>], y: &[f64], lambda: f64, tol: f64) -> (Vec<f64>, f64) {
    let n = rows.len();
    let p = rows[0].len();
    // Lipschitz bound of the gradient: 2(‖[X 1]‖_F² + λ)
    let frob: f64 = rows.iter().map(|r| r.iter().map(|v| v * v).sum::<f64>() + 1.0).sum();
    let step = 1.0 / (2.0 * (frob + lambda));
    let mut theta = vec![0.0; p + 1];
    let mut prev = theta.clone();
    let mut k = 0usize;
    loop {
        k += 1;
        let mom = (k as f64 - 1.0) / (k as f64 + 2.0);
        let look: Vec<f64> = theta.iter().zip(&prev).map(|(t, q)| t + mom * (t - q)).collect();
        let grad = gradient(rows, y, lambda, &look);
        let gmax = gradient(rows, y, lambda, &theta)
            .iter()
            .fold(0.0f64, |m, g| m.max(g.abs()));
        if gmax < tol || k > 2_000_000 {
            break;
        }
        prev = theta.clone();
        for j in 0..=p {
            theta[j] = look[j] - step * grad[j];
        }
        // restart momentum when it stops helping
        if objective(rows, y, lambda, &theta) > objective(rows, y, lambda, &prev) {
            k = 0;
        }
    }
    let _ = n;
    let b = theta[p];
    theta.truncate(p);
    (theta, b)
}

fn residuals(rows: &[Vec<f64>], y: &[f64], theta: &[f64]) -> Vec<f64> {
    let p = theta.len() - 1;
    rows.iter()
        .zip(y)
        .map(|(r, yi)| yi - theta[p] - r.iter().zip(theta).map(|(a, b)| a * b).sum::<f64>())
        .collect()
}

fn objective(rows: &[Vec<f64>], y: &[f64], lambda: f64, theta: &[f64]) -> f64 {
    let p = theta.len() - 1;
    residuals(rows, y, theta).iter().map(|r| r * r).sum::<f64>()
        + lambda * theta[..p].iter().map(|b| b * b).sum::<f64>()
}

fn gradient(rows: &[Vec<f64>], y: &[f64], lambda: f64, theta: &[f64]) -> Vec<f64> {
    let p = theta.len() - 1;
    let res = residuals(rows, y, theta);
    let mut g = vec![0.0; p + 1];
    for (r, e) in rows.iter().zip(&res) {
        for j in 0..p {
            g[j] -= 2.0 * r[j] * e;
        }
        g[p] -= 2.0 * e;
    }
    for j in 0..p {
        g[j] += 2.0 * lambda * theta[j];
    }
    g
}

/// Max-abs violation of Xᵀ(y − Xβ − b) = λβ and Σ(y − Xβ − b) = 0.
pub fn stationarity_residual(rows: &[Vec<f64>], y: &[f64], lambda: f64, beta: &[f64], b: f64) -> f64 {
    let mut theta = beta.to_vec();
    theta.push(b);
    let res = residuals(rows, y, &theta);
    let mut worst = res.iter().sum::<f64>().abs();
    for j in 0..beta.len() {
        let xr: f64 = rows.iter().zip(&res).map(|(r, e)| r[j] * e).sum();
        worst = worst.max((xr - lambda * beta[j]).abs());
    }
    worst
}

/// Solves the uncentered augmented normal equations by Gauss-Jordan
/// elimination with partial pivoting.
pub fn normal_equations_ridge(rows: &[Vec<f64>], y: &[f64], lambda: f64) -> (Vec<f64>, f64) {
    let p = rows[0].len();
    let m = p + 1;
    let mut a = vec![vec![0.0; m + 1]; m];
    for (r, yi) in rows.iter().zip(y) {
        let z: Vec<f64> = r.iter().copied().chain(std::iter::once(1.0)).collect();
        for i in 0..m {
            for j in 0..m {
                a[i][j] += z[i] * z[j];
            }
            a[i][m] += z[i] * yi;
        }
    }
    for (i, row) in a.iter_mut().enumerate().take(p) {
        row[i] += lambda;
    }
    for col in 0..m {
        let piv = (col..m).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs())).unwrap();
        a.swap(col, piv);
        let d = a[col][col];
        for v in a[col].iter_mut() {
            *v /= d;
        }
        for i in 0..m {
            if i != col {
                let f = a[i][col];
                if f != 0.0 {
                    for j in 0..=m {
                        a[i][j] -= f * a[col][j];
                    }
                }
            }
        }
    }
    let sol: Vec<f64> = a.iter().map(|r| r[m]).collect();
    (sol[..p].to_vec(), sol[p])
}

/// Mean over folds of held-out MSE for each λ, refitting from scratch.
pub fn brute_force_cv(rows: &[Vec<f64>], y: &[f64], grid: &[f64], fold_of: &[usize], folds: usize) -> Vec<f64> {
    grid.iter()
        .map(|&lambda| {
            let mut total = 0.0;
            for f in 0..folds {
                let (mut tr_x, mut tr_y, mut te) = (Vec::new(), Vec::new(), Vec::new());
                for i in 0..rows.len() {
                    if fold_of[i] == f {
                        te.push(i);
                    } else {
                        tr_x.push(rows[i].clone());
                        tr_y.push(y[i]);
                    }
                }
                let (beta, b) = normal_equations_ridge(&tr_x, &tr_y, lambda);
                let mse = te
                    .iter()
                    .map(|&i| {
                        let pred = b + rows[i].iter().zip(&beta).map(|(a, c)| a * c).sum::<f64>();
                        (y[i] - pred).powi(2)
                    })
                    .sum::<f64>()
                    / te.len() as f64;
                total += mse;
            }
            total / folds as f64
        })
        .collect()
}

/// λ minimizing brute-force CV error, ties within 1e-12 to the larger λ.
pub fn brute_force_select(rows: &[Vec<f64>], y: &[f64], grid: &[f64], fold_of: &[usize], folds: usize) -> f64 {
    let errs = brute_force_cv(rows, y, grid, fold_of, folds);
    let mut best = 0;
    for i in 1..grid.len() {
        if errs[i] < errs[best] - 1e-12 || ((errs[i] - errs[best]).abs() <= 1e-12 && grid[i] > grid[best]) {
            best = i;
        }
    }
    grid[best]
}

pub fn naive_pearson(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let cov: f64 = a.iter().zip(b).map(|(x, y)| (x - ma) * (y - mb)).sum();
    let va: f64 = a.iter().map(|x| (x - ma).powi(2)).sum();
    let vb: f64 = b.iter().map(|y| (y - mb).powi(2)).sum();
    cov / (va * vb).sqrt()
}

/// Upper-tail chi-square critical values at p = 0.001.
pub fn chi_square_critical_001(dof: usize) -> f64 {
    [10.828, 13.816, 16.266, 18.467, 20.515, 22.458][dof - 1]
}
