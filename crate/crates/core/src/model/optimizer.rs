//! Limited-memory quasi-Newton minimizer with backtracking line search.
//!
//! Standard L-BFGS two-loop recursion over a bounded (s, y) history, Armijo
//! backtracking from a unit step, falling back to steepest descent whenever
//! the quasi-Newton direction loses descent. Entirely deterministic: same
//! objective, start point, and options give the same iterates.

use std::collections::VecDeque;

/// Termination and memory settings.
#[derive(Debug, Clone, Copy)]
pub struct OptimOptions {
    /// Convergence threshold on the gradient max-norm.
    pub tol: f64,
    pub max_iter: usize,
    /// Number of (s, y) pairs kept for the two-loop recursion.
    pub memory: usize,
}

impl Default for OptimOptions {
    fn default() -> Self {
        OptimOptions {
            tol: 1e-8,
            max_iter: 500,
            memory: 10,
        }
    }
}

#[derive(Debug, Clone)]
pub struct OptimResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub grad_max_norm: f64,
    pub iterations: usize,
    pub converged: bool,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn max_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

const ARMIJO_C1: f64 = 1e-4;
const BACKTRACK: f64 = 0.5;
const MIN_STEP: f64 = 1e-20;

/// Minimize `f` (value and gradient) starting from `x0`.
///
/// Accepted steps satisfy the Armijo sufficient-decrease condition up to a
/// machine-epsilon noise floor, so the objective is monotone nonincreasing
/// across iterations to within float resolution.
pub fn minimize<F>(f: F, x0: &[f64], opts: &OptimOptions) -> OptimResult
where
    F: Fn(&[f64]) -> (f64, Vec<f64>),
{
    let mut x = x0.to_vec();
    let (mut fx, mut grad) = f(&x);
    let mut history: VecDeque<(Vec<f64>, Vec<f64>, f64)> = VecDeque::new();
    let mut iterations = 0;

    for _ in 0..opts.max_iter {
        let gnorm = max_norm(&grad);
        if gnorm <= opts.tol {
            break;
        }

        let mut direction = two_loop(&history, &grad);
        let mut slope = dot(&grad, &direction);
        if !slope.is_finite() || slope >= 0.0 {
            history.clear();
            direction = grad.iter().map(|g| -g).collect();
            slope = dot(&grad, &direction);
        }

        // Unit quasi-Newton step once curvature information exists; a
        // gradient-scaled step on the first iterations.
        let mut step = if history.is_empty() {
            1.0 / gnorm.max(1.0)
        } else {
            1.0
        };

        // Near the optimum the true decrease drops below one ulp of f, so
        // the Armijo test carries an epsilon slack; otherwise the final
        // quasi-Newton steps (which collapse the gradient) get rejected.
        let noise_floor = 4.0 * f64::EPSILON * (1.0 + fx.abs());
        let mut accepted = None;
        while step >= MIN_STEP {
            let candidate: Vec<f64> = x
                .iter()
                .zip(&direction)
                .map(|(xi, di)| xi + step * di)
                .collect();
            let (fc, gc) = f(&candidate);
            if fc.is_finite() && fc <= fx + ARMIJO_C1 * step * slope + noise_floor {
                accepted = Some((candidate, fc, gc));
                break;
            }
            step *= BACKTRACK;
        }

        let Some((x_new, f_new, g_new)) = accepted else {
            break; // line search exhausted; report the best point found
        };

        let s: Vec<f64> = x_new.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = g_new.iter().zip(&grad).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        let curvature_floor = 1e-12 * max_norm(&s).max(1e-300) * max_norm(&y).max(1e-300);
        if sy > curvature_floor {
            if history.len() == opts.memory {
                history.pop_front();
            }
            let rho = 1.0 / sy;
            history.push_back((s, y, rho));
        }

        x = x_new;
        fx = f_new;
        grad = g_new;
        iterations += 1;
    }

    let grad_max_norm = max_norm(&grad);
    OptimResult {
        x,
        value: fx,
        grad_max_norm,
        iterations,
        converged: grad_max_norm <= opts.tol,
    }
}

/// Two-loop recursion: approximates `-H · g` with the stored history.
fn two_loop(history: &VecDeque<(Vec<f64>, Vec<f64>, f64)>, grad: &[f64]) -> Vec<f64> {
    let mut q = grad.to_vec();
    let mut alphas = Vec::with_capacity(history.len());
    for (s, y, rho) in history.iter().rev() {
        let alpha = rho * dot(s, &q);
        for (qi, yi) in q.iter_mut().zip(y) {
            *qi -= alpha * yi;
        }
        alphas.push(alpha);
    }
    let gamma = history
        .back()
        .map(|(s, y, _)| dot(s, y) / dot(y, y))
        .unwrap_or(1.0);
    for qi in q.iter_mut() {
        *qi *= gamma;
    }
    for ((s, y, rho), alpha) in history.iter().zip(alphas.into_iter().rev()) {
        let beta = rho * dot(y, &q);
        for (qi, si) in q.iter_mut().zip(s) {
            *qi += (alpha - beta) * si;
        }
    }
    q.iter_mut().for_each(|v| *v = -*v);
    q
}
