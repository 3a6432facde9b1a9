//! Logistic regression with weakly informative Student-t priors.
//!
//! The log posterior is the Bernoulli log-likelihood plus independent
//! `t(ν, 0, s)` log-densities on each coefficient (a wider scale on the
//! intercept). The MAP estimate comes from a deterministic limited-memory
//! quasi-Newton ascent with backtracking; posterior draws come from a
//! Laplace approximation — a Gaussian centered at the mode with covariance
//! equal to the inverse negative Hessian. A gradient-based MCMC backend can
//! be plugged in through [`LogDensity`] without touching callers.

mod optimizer;

pub use optimizer::{OptimOptions, OptimResult};

use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::Path;

use nalgebra::{Cholesky, DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::features::FeatureMatrix;

/// Student-t prior on standardized coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PriorSpec {
    /// Degrees of freedom ν.
    pub df: f64,
    /// Scale s for slope coefficients.
    pub scale: f64,
    /// Scale for the intercept (weaker regularization).
    pub intercept_scale: f64,
}

impl Default for PriorSpec {
    fn default() -> Self {
        PriorSpec {
            df: 7.0,
            scale: 5.0,
            intercept_scale: 10.0,
        }
    }
}

impl PriorSpec {
    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64| v.is_finite() && v > 0.0;
        if !positive(self.df) || !positive(self.scale) || !positive(self.intercept_scale) {
            return Err(Error::InvalidInput(format!(
                "prior parameters must be positive: df={} scale={} intercept_scale={}",
                self.df, self.scale, self.intercept_scale
            )));
        }
        Ok(())
    }

    fn scale_for(&self, index: usize, n_columns: usize) -> f64 {
        if index == n_columns {
            self.intercept_scale
        } else {
            self.scale
        }
    }
}

/// `ln t(x; ν, 0, s)`.
fn ln_t(x: f64, df: f64, scale: f64) -> f64 {
    ln_t_constant(df, scale) - 0.5 * (df + 1.0) * (x * x / (df * scale * scale)).ln_1p()
}

/// `lnΓ((ν+1)/2) − lnΓ(ν/2) − ½ln(νπ) − ln s`.
fn ln_t_constant(df: f64, scale: f64) -> f64 {
    ln_gamma((df + 1.0) / 2.0)
        - ln_gamma(df / 2.0)
        - 0.5 * (df * std::f64::consts::PI).ln()
        - scale.ln()
}

/// d/dx ln t(x; ν, 0, s) = −(ν+1)·x / (ν s² + x²).
fn ln_t_grad(x: f64, df: f64, scale: f64) -> f64 {
    -(df + 1.0) * x / (df * scale * scale + x * x)
}

/// −d²/dx² ln t(x; ν, 0, s) = (ν+1)(ν s² − x²) / (ν s² + x²)².
fn ln_t_neg_curvature(x: f64, df: f64, scale: f64) -> f64 {
    let vs2 = df * scale * scale;
    let denom = vs2 + x * x;
    (df + 1.0) * (vs2 - x * x) / (denom * denom)
}

/// `ln(1 + e^z)` without overflow.
fn softplus(z: f64) -> f64 {
    z.max(0.0) + (-z.abs()).exp().ln_1p()
}

/// Overflow-safe inverse logit.
fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// Inverse-logit of `intercept + row·β`, clamped into the open unit
/// interval so extreme linear predictors never return exactly 0 or 1.
/// `beta` holds the column coefficients followed by the intercept.
pub fn predict_prob(beta: &[f64], row: &[f64]) -> Result<f64> {
    if beta.len() != row.len() + 1 {
        return Err(Error::LengthMismatch {
            expected: row.len() + 1,
            got: beta.len(),
        });
    }
    let z = linear_predictor(beta, row);
    Ok(sigmoid(z).clamp(f64::MIN_POSITIVE, 1.0 - f64::EPSILON / 2.0))
}

fn linear_predictor(beta: &[f64], row: &[f64]) -> f64 {
    let p = row.len();
    let mut z = beta[p];
    for (b, x) in beta[..p].iter().zip(row) {
        z += b * x;
    }
    z
}

fn validate_inputs(
    beta: &[f64],
    matrix: &FeatureMatrix,
    labels: &[f64],
    prior: &PriorSpec,
) -> Result<()> {
    prior.validate()?;
    if beta.len() != matrix.n_cols() + 1 {
        return Err(Error::LengthMismatch {
            expected: matrix.n_cols() + 1,
            got: beta.len(),
        });
    }
    if labels.len() != matrix.n_rows() {
        return Err(Error::LengthMismatch {
            expected: matrix.n_rows(),
            got: labels.len(),
        });
    }
    if let Some(&bad) = labels.iter().find(|&&y| y != 0.0 && y != 1.0) {
        return Err(Error::NonBinaryLabel(bad));
    }
    Ok(())
}

/// Bernoulli log-likelihood plus Student-t log-prior.
pub fn log_posterior(
    beta: &[f64],
    matrix: &FeatureMatrix,
    labels: &[f64],
    prior: &PriorSpec,
) -> Result<f64> {
    validate_inputs(beta, matrix, labels, prior)?;
    let mut ll = 0.0;
    for (i, &y) in labels.iter().enumerate() {
        let z = linear_predictor(beta, matrix.row(i));
        ll += y * z - softplus(z);
    }
    let p = matrix.n_cols();
    let mut lp = 0.0;
    for (j, &b) in beta.iter().enumerate() {
        lp += ln_t(b, prior.df, prior.scale_for(j, p));
    }
    Ok(ll + lp)
}

/// Gradient of [`log_posterior`]: `X̃ᵀ(y − p̂)` plus the prior gradient.
pub fn grad_log_posterior(
    beta: &[f64],
    matrix: &FeatureMatrix,
    labels: &[f64],
    prior: &PriorSpec,
) -> Result<Vec<f64>> {
    validate_inputs(beta, matrix, labels, prior)?;
    let p = matrix.n_cols();
    let mut grad = vec![0.0; p + 1];
    for (i, &y) in labels.iter().enumerate() {
        let row = matrix.row(i);
        let residual = y - sigmoid(linear_predictor(beta, row));
        for (g, x) in grad[..p].iter_mut().zip(row) {
            *g += residual * x;
        }
        grad[p] += residual;
    }
    for (j, (g, &b)) in grad.iter_mut().zip(beta).enumerate() {
        *g += ln_t_grad(b, prior.df, prior.scale_for(j, p));
    }
    Ok(grad)
}

/// Log-density with gradient: the sampling contract for posterior backends.
pub trait LogDensity {
    fn dim(&self) -> usize;
    fn value(&self, x: &[f64]) -> Result<f64>;
    fn grad(&self, x: &[f64]) -> Result<Vec<f64>>;
}

/// The regression posterior as a [`LogDensity`] target.
pub struct PosteriorTarget<'a> {
    pub matrix: &'a FeatureMatrix,
    pub labels: &'a [f64],
    pub prior: &'a PriorSpec,
}

impl LogDensity for PosteriorTarget<'_> {
    fn dim(&self) -> usize {
        self.matrix.n_cols() + 1
    }

    fn value(&self, x: &[f64]) -> Result<f64> {
        log_posterior(x, self.matrix, self.labels, self.prior)
    }

    fn grad(&self, x: &[f64]) -> Result<Vec<f64>> {
        grad_log_posterior(x, self.matrix, self.labels, self.prior)
    }
}

/// MAP optimizer settings.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct FitOptions {
    /// Gradient max-norm tolerance.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions {
            tol: 1e-8,
            max_iter: 500,
        }
    }
}

/// A fitted model: coefficients (columns then intercept), prior, optimizer
/// diagnostics, and the feature-pipeline hash the design matrix carried.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFit {
    pub coefficients: Vec<f64>,
    pub prior: PriorSpec,
    pub pipeline_hash: Option<String>,
    pub converged: bool,
    pub grad_norm: f64,
    pub iterations: usize,
}

impl ModelFit {
    pub fn save_json(&self, path: &Path) -> Result<()> {
        let file = BufWriter::new(File::create(path)?);
        serde_json::to_writer(file, self)?;
        Ok(())
    }

    pub fn load_json(path: &Path) -> Result<Self> {
        let file = BufReader::new(File::open(path)?);
        Ok(serde_json::from_reader(file)?)
    }
}

/// Maximize the log posterior from β = 0 with L-BFGS and backtracking.
///
/// Labels must contain both classes. Non-convergence within `max_iter`
/// returns the best point found with `converged = false`.
pub fn fit_map(
    matrix: &FeatureMatrix,
    labels: &[f64],
    prior: &PriorSpec,
    opts: &FitOptions,
) -> Result<ModelFit> {
    let start = vec![0.0; matrix.n_cols() + 1];
    validate_inputs(&start, matrix, labels, prior)?;
    let positives = labels.iter().filter(|&&y| y == 1.0).count();
    if positives == 0 {
        return Err(Error::DegenerateLabels(0));
    }
    if positives == labels.len() {
        return Err(Error::DegenerateLabels(1));
    }

    let objective = |beta: &[f64]| {
        let value = log_posterior(beta, matrix, labels, prior).expect("validated inputs");
        let grad = grad_log_posterior(beta, matrix, labels, prior).expect("validated inputs");
        (-value, grad.into_iter().map(|g| -g).collect())
    };
    let result = optimizer::minimize(
        objective,
        &start,
        &OptimOptions {
            tol: opts.tol,
            max_iter: opts.max_iter,
            memory: 10,
        },
    );
    Ok(ModelFit {
        coefficients: result.x,
        prior: *prior,
        pipeline_hash: matrix.pipeline_hash().map(String::from),
        converged: result.converged,
        grad_norm: result.grad_max_norm,
        iterations: result.iterations,
    })
}

/// Negative Hessian of the log posterior at `beta`:
/// `X̃ᵀWX̃ + diag(prior curvature)`, `W = diag(p̂(1−p̂))`.
fn neg_hessian(beta: &[f64], matrix: &FeatureMatrix, prior: &PriorSpec) -> DMatrix<f64> {
    let p = matrix.n_cols();
    let dim = p + 1;
    let mut h = DMatrix::zeros(dim, dim);
    for i in 0..matrix.n_rows() {
        let row = matrix.row(i);
        let prob = sigmoid(linear_predictor(beta, row));
        let w = prob * (1.0 - prob);
        for a in 0..dim {
            let xa = if a < p { row[a] } else { 1.0 };
            for b in a..dim {
                let xb = if b < p { row[b] } else { 1.0 };
                h[(a, b)] += w * xa * xb;
            }
        }
    }
    for j in 0..dim {
        h[(j, j)] += ln_t_neg_curvature(beta[j], prior.df, prior.scale_for(j, p));
    }
    // Mirror the upper triangle.
    for a in 0..dim {
        for b in 0..a {
            h[(a, b)] = h[(b, a)];
        }
    }
    h
}

/// How a set of posterior draws was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DrawMethod {
    Laplace,
    External,
}

/// S posterior draws of the coefficient vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PosteriorDraws {
    pub draws: Vec<Vec<f64>>,
    pub method: DrawMethod,
    pub seed: u64,
    pub pipeline_hash: Option<String>,
}

impl PosteriorDraws {
    pub fn count(&self) -> usize {
        self.draws.len()
    }

    /// A single-draw set containing only the MAP point estimate.
    pub fn point_estimate(fit: &ModelFit) -> Self {
        PosteriorDraws {
            draws: vec![fit.coefficients.clone()],
            method: DrawMethod::External,
            seed: 0,
            pipeline_hash: fit.pipeline_hash.clone(),
        }
    }

    pub fn save_json(&self, path: &Path) -> Result<()> {
        let file = BufWriter::new(File::create(path)?);
        serde_json::to_writer(file, self)?;
        Ok(())
    }

    pub fn load_json(path: &Path) -> Result<Self> {
        let file = BufReader::new(File::open(path)?);
        Ok(serde_json::from_reader(file)?)
    }
}

/// Draw `s` samples from the Gaussian Laplace approximation at the mode.
///
/// The covariance is the inverse negative Hessian of the log posterior at
/// the MAP estimate. Requires a converged fit and a positive-definite
/// negative Hessian. Deterministic under a fixed seed.
pub fn laplace_draws(
    fit: &ModelFit,
    matrix: &FeatureMatrix,
    labels: &[f64],
    prior: &PriorSpec,
    s: usize,
    seed: u64,
) -> Result<PosteriorDraws> {
    validate_inputs(&fit.coefficients, matrix, labels, prior)?;
    if !fit.converged {
        return Err(Error::NotConverged);
    }
    if s == 0 {
        return Err(Error::InvalidInput("need at least one draw".into()));
    }
    let h = neg_hessian(&fit.coefficients, matrix, prior);
    let chol = Cholesky::new(h).ok_or(Error::HessianNotPositiveDefinite)?;
    // H = LLᵀ, so Cov = H⁻¹ = L⁻ᵀL⁻¹ and β̂ + L⁻ᵀ z has the target law.
    let l_t = chol.l().transpose();
    let dim = fit.coefficients.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draws = Vec::with_capacity(s);
    for _ in 0..s {
        let z = DVector::from_fn(dim, |_, _| rng.sample::<f64, _>(StandardNormal));
        let x = l_t
            .solve_upper_triangular(&z)
            .ok_or(Error::HessianNotPositiveDefinite)?;
        draws.push(
            fit.coefficients
                .iter()
                .zip(x.iter())
                .map(|(b, d)| b + d)
                .collect(),
        );
    }
    Ok(PosteriorDraws {
        draws,
        method: DrawMethod::Laplace,
        seed,
        pipeline_hash: fit.pipeline_hash.clone(),
    })
}

/// Laplace posterior standard deviations: `sqrt(diag(H⁻¹))` at the mode.
pub fn laplace_posterior_sd(
    fit: &ModelFit,
    matrix: &FeatureMatrix,
    prior: &PriorSpec,
) -> Result<Vec<f64>> {
    let h = neg_hessian(&fit.coefficients, matrix, prior);
    let chol = Cholesky::new(h).ok_or(Error::HessianNotPositiveDefinite)?;
    let cov = chol.inverse();
    Ok((0..fit.coefficients.len())
        .map(|j| cov[(j, j)].sqrt())
        .collect())
}

/// The Laplace covariance matrix itself (row-major), for diagnostics.
pub fn laplace_covariance(
    fit: &ModelFit,
    matrix: &FeatureMatrix,
    prior: &PriorSpec,
) -> Result<Vec<Vec<f64>>> {
    let h = neg_hessian(&fit.coefficients, matrix, prior);
    let chol = Cholesky::new(h).ok_or(Error::HessianNotPositiveDefinite)?;
    let cov = chol.inverse();
    let dim = fit.coefficients.len();
    Ok((0..dim)
        .map(|a| (0..dim).map(|b| cov[(a, b)]).collect())
        .collect())
}

/// One row of the coefficient table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoefficientSummary {
    pub name: String,
    pub map_value: f64,
    pub posterior_mean: f64,
    /// 50% interval (25th–75th percentile of draws).
    pub ci50: (f64, f64),
    /// 95% interval (2.5th–97.5th percentile of draws).
    pub ci95: (f64, f64),
}

/// Empirical quantile with linear interpolation over sorted draws.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let h = q * (n - 1) as f64;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(n - 1);
    let frac = h - lo as f64;
    sorted[lo] + frac * (sorted[hi] - sorted[lo])
}

/// Posterior mean and interval per coefficient, sorted by |posterior mean|
/// descending. `names` are the design-matrix columns; the intercept row is
/// labeled `(intercept)`.
pub fn coefficient_report(
    names: &[String],
    fit: &ModelFit,
    draws: &PosteriorDraws,
) -> Result<Vec<CoefficientSummary>> {
    let dim = names.len() + 1;
    if fit.coefficients.len() != dim {
        return Err(Error::LengthMismatch {
            expected: dim,
            got: fit.coefficients.len(),
        });
    }
    if draws.draws.is_empty() {
        return Err(Error::InvalidInput("no posterior draws".into()));
    }
    for d in &draws.draws {
        if d.len() != dim {
            return Err(Error::LengthMismatch {
                expected: dim,
                got: d.len(),
            });
        }
    }
    let mut rows = Vec::with_capacity(dim);
    for j in 0..dim {
        let mut column: Vec<f64> = draws.draws.iter().map(|d| d[j]).collect();
        column.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mean = column.iter().sum::<f64>() / column.len() as f64;
        let name = if j == names.len() {
            "(intercept)".to_string()
        } else {
            names[j].clone()
        };
        rows.push(CoefficientSummary {
            name,
            map_value: fit.coefficients[j],
            posterior_mean: mean,
            ci50: (quantile(&column, 0.25), quantile(&column, 0.75)),
            ci95: (quantile(&column, 0.025), quantile(&column, 0.975)),
        });
    }
    rows.sort_by(|a, b| {
        b.posterior_mean
            .abs()
            .partial_cmp(&a.posterior_mean.abs())
            .unwrap()
            .then_with(|| a.name.cmp(&b.name))
    });
    Ok(rows)
}
