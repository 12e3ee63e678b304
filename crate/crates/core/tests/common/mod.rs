//! Reference implementations used as oracles by the integration tests.
//!
//! Nothing here calls into the library's numeric code: kernels, windows,
//! transforms and the QP are written out directly from their definitions.

#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use pumpnoise::svm::{KernelKind, KernelSpec};

pub fn hamming(n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![1.0];
    }
    (0..n)
        .map(|k| 0.54 - 0.46 * (2.0 * std::f64::consts::PI * k as f64 / (n - 1) as f64).cos())
        .collect()
}

/// One-sided PSD columns by a direct O(n^2) DFT of every segment.
pub fn naive_psd(x: &[f64], window: usize, overlap: usize, nfft: usize, fs: f64) -> Vec<Vec<f64>> {
    let hop = window - overlap;
    let w = hamming(window);
    let norm = fs * w.iter().map(|v| v * v).sum::<f64>();
    let cols = if x.len() < window { 0 } else { (x.len() - overlap) / hop };
    (0..cols)
        .map(|j| {
            let seg = &x[j * hop..j * hop + window];
            (0..=nfft / 2)
                .map(|k| {
                    let (mut re, mut im) = (0.0, 0.0);
                    for (n, (&s, &wn)) in seg.iter().zip(&w).enumerate() {
                        let phase = -2.0 * std::f64::consts::PI * ((k * n) % nfft) as f64 / nfft as f64;
                        re += s * wn * phase.cos();
                        im += s * wn * phase.sin();
                    }
                    let c = if k == 0 || k == nfft / 2 { 1.0 } else { 2.0 };
                    c * (re * re + im * im) / norm
                })
                .collect()
        })
        .collect()
}

pub fn kernel(spec: &KernelSpec<f64>, x: &[f64], z: &[f64]) -> f64 {
    let dot: f64 = x.iter().zip(z).map(|(a, b)| a * b).sum();
    match spec.kind {
        KernelKind::Linear => dot,
        KernelKind::Polynomial => (spec.gamma * dot + spec.coef0).powi(spec.degree as i32),
        KernelKind::Rbf => {
            let d2: f64 = x.iter().zip(z).map(|(a, b)| (a - b) * (a - b)).sum();
            (-spec.gamma * d2).exp()
        }
        KernelKind::Sigmoid => (spec.gamma * dot + spec.coef0).tanh(),
    }
}

/// `Q_ij = y_i y_j K(x_i, x_j)`.
pub fn q_matrix(spec: &KernelSpec<f64>, xs: &[Vec<f64>], y: &[f64]) -> DMatrix<f64> {
    let n = xs.len();
    DMatrix::from_fn(n, n, |i, j| y[i] * y[j] * kernel(spec, &xs[i], &xs[j]))
}

pub fn min_eigenvalue(q: &DMatrix<f64>) -> f64 {
    q.clone().symmetric_eigen().eigenvalues.min()
}

/// `Σα - ½ αᵀQα`.
pub fn dual_objective(q: &DMatrix<f64>, alpha: &[f64]) -> f64 {
    let a = DVector::from_column_slice(alpha);
    a.sum() - 0.5 * a.dot(&(q * &a))
}

pub struct QpSolution {
    pub alpha: Vec<f64>,
    pub bias: f64,
    pub objective: f64,
}

/// Euclidean projection onto `{0 <= a <= c, yᵀa = 0}` by bisection on the
/// multiplier of the equality constraint.
fn project(v: &[f64], y: &[f64], c: f64) -> Vec<f64> {
    let resid = |lambda: f64| -> f64 { v.iter().zip(y).map(|(vi, yi)| (vi - lambda * yi).clamp(0.0, c) * yi).sum() };
    // resid is non-increasing in lambda.
    let span = v.iter().map(|x| x.abs()).fold(0.0, f64::max) + c + 1.0;
    let (mut lo, mut hi) = (-span, span);
    while hi - lo > 1e-15 * span {
        let mid = 0.5 * (lo + hi);
        if resid(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let lambda = 0.5 * (lo + hi);
    v.iter().zip(y).map(|(vi, yi)| (vi - lambda * yi).clamp(0.0, c)).collect()
}

fn gradient(q: &DMatrix<f64>, a: &[f64]) -> Vec<f64> {
    // Gradient of the minimisation form ½aᵀQa - Σa.
    let qa = q * DVector::from_column_slice(a);
    qa.iter().map(|v| v - 1.0).collect()
}

/// Bias from the KKT conditions at `alpha`: mean over free variables, else
/// the midpoint of the interval allowed by the bounded ones.
pub fn kkt_bias(q: &DMatrix<f64>, y: &[f64], alpha: &[f64], c: f64, free_tol: f64) -> f64 {
    let g = gradient(q, alpha);
    // y_i f(x_i) - 1 = g_i + y_i b, so b = -y_i g_i on free variables.
    let free: Vec<f64> = (0..y.len())
        .filter(|&i| alpha[i] > free_tol && alpha[i] < c - free_tol)
        .map(|i| -y[i] * g[i])
        .collect();
    if !free.is_empty() {
        return free.iter().sum::<f64>() / free.len() as f64;
    }
    let (mut lower, mut upper) = (f64::NEG_INFINITY, f64::INFINITY);
    for i in 0..y.len() {
        let at_zero = alpha[i] <= free_tol;
        let v = -y[i] * g[i];
        // At zero: y_i(g_i + y_i b) >= 0; at C: <= 0.
        if (y[i] > 0.0) == at_zero {
            lower = lower.max(v);
        } else {
            upper = upper.min(v);
        }
    }
    0.5 * (lower + upper)
}

/// Accelerated projected gradient (FISTA with restarts) on the SVM dual,
/// finished by re-solving the KKT equations on the identified free set.
pub fn qp_oracle(q: &DMatrix<f64>, y: &[f64], c: f64) -> QpSolution {
    let n = y.len();
    let lmax = q.clone().symmetric_eigen().eigenvalues.max().max(1e-12);
    let step = 1.0 / lmax;
    let mut a = vec![0.0; n];
    let mut z = a.clone();
    let mut t = 1.0f64;
    let n2: Vec<f64> = q.iter().copied().collect();
    // Column-major, symmetric: row i is column i.
    let grad = |x: &[f64]| -> Vec<f64> {
        (0..n)
            .map(|i| n2[i * n..(i + 1) * n].iter().zip(x).map(|(qij, xj)| qij * xj).sum::<f64>() - 1.0)
            .collect()
    };
    let objective = |x: &[f64]| -> f64 {
        let g = grad(x);
        // With g = Qx - 1: Σx - ½xᵀQx = -½ Σ x_i (g_i - 1).
        -0.5 * x.iter().zip(&g).map(|(xi, gi)| xi * (gi - 1.0)).sum::<f64>()
    };
    let mut best = objective(&a);
    for _ in 0..20_000 {
        let g = grad(&z);
        let v: Vec<f64> = z.iter().zip(&g).map(|(zi, gi)| zi - step * gi).collect();
        let next = project(&v, y, c);
        let obj = objective(&next);
        let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
        if obj < best {
            // Restart momentum when the objective stalls.
            z = a.clone();
            t = 1.0;
            continue;
        }
        best = obj;
        let moved = next.iter().zip(&a).map(|(x, xp)| (x - xp).abs()).fold(0.0, f64::max);
        let beta = (t - 1.0) / t_next;
        z = next.iter().zip(&a).map(|(x, xp)| x + beta * (x - xp)).collect();
        a = next;
        t = t_next;
        if moved <= 1e-14 * c {
            break;
        }
    }
    let polished = polish(q, y, c, &a);
    let alpha = match polished {
        Some(p) if dual_objective(q, &p) >= dual_objective(q, &a) => p,
        _ => a,
    };
    let tol = 1e-9 * c.max(1.0);
    QpSolution {
        bias: kkt_bias(q, y, &alpha, c, tol),
        objective: dual_objective(q, &alpha),
        alpha,
    }
}

/// Active-set refinement: fix bounded variables, solve the equality-constrained
/// system for the free ones, and move variables between sets until the KKT
/// conditions hold.
fn polish(q: &DMatrix<f64>, y: &[f64], c: f64, start: &[f64]) -> Option<Vec<f64>> {
    let n = y.len();
    let edge = 1e-7 * c;
    // 0 = lower bound, 1 = free, 2 = upper bound.
    let mut state: Vec<u8> = start
        .iter()
        .map(|&a| if a < edge { 0 } else if a > c - edge { 2 } else { 1 })
        .collect();
    for _ in 0..4 * n + 4 {
        let free: Vec<usize> = (0..n).filter(|&i| state[i] == 1).collect();
        let mut alpha: Vec<f64> = (0..n).map(|i| if state[i] == 2 { c } else { 0.0 }).collect();
        let m = free.len();
        let mut sys = DMatrix::zeros(m + 1, m + 1);
        let mut rhs = DVector::zeros(m + 1);
        for (r, &i) in free.iter().enumerate() {
            for (s, &j) in free.iter().enumerate() {
                sys[(r, s)] = q[(i, j)];
            }
            sys[(r, m)] = y[i];
            sys[(m, r)] = y[i];
            let fixed: f64 = (0..n).filter(|&j| state[j] == 2).map(|j| q[(i, j)] * c).sum();
            rhs[r] = 1.0 - fixed;
        }
        rhs[m] = -(0..n).filter(|&j| state[j] == 2).map(|j| y[j] * c).sum::<f64>();
        let sol = sys.svd(true, true).solve(&rhs, 1e-12).ok()?;
        for (r, &i) in free.iter().enumerate() {
            alpha[i] = sol[r];
        }
        // Free variables that left the box are pinned to the violated bound.
        let mut changed = false;
        for &i in &free {
            if alpha[i] < -1e-12 {
                state[i] = 0;
                changed = true;
            } else if alpha[i] > c + 1e-12 {
                state[i] = 2;
                changed = true;
            }
        }
        if changed {
            continue;
        }
        // Bounded variables whose multiplier has the wrong sign become free.
        let b = if m > 0 { sol[m] } else { kkt_bias(q, y, &alpha, c, 0.0) };
        let g = gradient(q, &alpha);
        for i in 0..n {
            let slack = g[i] + y[i] * b;
            if (state[i] == 0 && slack < -1e-9) || (state[i] == 2 && slack > 1e-9) {
                state[i] = 1;
                changed = true;
            }
        }
        if !changed {
            return Some(alpha.iter().map(|a| a.clamp(0.0, c)).collect());
        }
    }
    None
}

/// Decision value `Σ α_i y_i K(x_i, x) + b`.
pub fn decision(spec: &KernelSpec<f64>, xs: &[Vec<f64>], y: &[f64], alpha: &[f64], bias: f64, x: &[f64]) -> f64 {
    xs.iter()
        .zip(y)
        .zip(alpha)
        .map(|((xi, yi), ai)| ai * yi * kernel(spec, xi, x))
        .sum::<f64>()
        + bias
}

/// Least-squares amplitude of a sinusoid at `freq` Hz in uniformly sampled data.
pub fn fit_amplitude(x: &[f64], fs: f64, freq: f64) -> f64 {
    let w = 2.0 * std::f64::consts::PI * freq / fs;
    let a = DMatrix::from_fn(x.len(), 2, |i, j| if j == 0 { (w * i as f64).sin() } else { (w * i as f64).cos() });
    let b = DVector::from_column_slice(x);
    let coef = (a.transpose() * &a).lu().solve(&(a.transpose() * b)).expect("normal equations solve");
    coef.norm()
}
