//! Binary logistic regression fit by iteratively reweighted least squares
//! (full-batch Newton steps with step halving, so the penalized negative
//! log-likelihood never increases). A tiny ridge term on the coefficients
//! (never the intercept) guards against perfect-separation divergence.

use std::path::Path;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{DecayError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogitConfig {
    pub max_iter: usize,
    /// Per-row gradient tolerance: stop when the gradient norm falls below
    /// `tolerance * n_rows`. Scaling by the row count keeps one default
    /// usable across corpus sizes, since the log-likelihood (and the float
    /// noise floor of its gradient) grows linearly with n.
    pub tolerance: f64,
    /// L2 penalty on coefficients (excluding the intercept).
    pub ridge: f64,
    /// Fit on z-scored features; reported coefficients are always mapped
    /// back to the raw scale.
    pub standardize: bool,
}

impl Default for LogitConfig {
    fn default() -> Self {
        LogitConfig { max_iter: 100, tolerance: 1e-8, ridge: 1e-8, standardize: false }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainingMeta {
    pub iterations: usize,
    pub converged: bool,
    pub final_grad_norm: f64,
    pub final_nll: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogitModel {
    pub feature_names: Vec<String>,
    pub intercept: f64,
    /// Raw-scale β, aligned with `feature_names`.
    pub coefficients: Vec<f64>,
    pub config: LogitConfig,
    pub meta: TrainingMeta,
}

pub fn sigmoid(eta: f64) -> f64 {
    if eta >= 0.0 {
        1.0 / (1.0 + (-eta).exp())
    } else {
        let e = eta.exp();
        e / (1.0 + e)
    }
}

/// log(1 + e^eta) without overflow.
fn log1p_exp(eta: f64) -> f64 {
    if eta > 0.0 {
        eta + (-eta).exp().ln_1p()
    } else {
        eta.exp().ln_1p()
    }
}

fn eta_for(row: &[f64], intercept: f64, coefs: &[f64]) -> f64 {
    intercept + row.iter().zip(coefs).map(|(x, b)| x * b).sum::<f64>()
}

/// Penalized negative log-likelihood at the given parameters.
pub fn nll(ds: &Dataset, intercept: f64, coefs: &[f64], ridge: f64) -> Result<f64> {
    if coefs.len() != ds.n_features() {
        return Err(DecayError::LengthMismatch { left: coefs.len(), right: ds.n_features() });
    }
    let mut total = 0.0;
    for r in 0..ds.n_rows() {
        let eta = eta_for(ds.row(r), intercept, coefs);
        total += log1p_exp(eta) - f64::from(ds.classes()[r]) * eta;
    }
    total += 0.5 * ridge * coefs.iter().map(|b| b * b).sum::<f64>();
    if !total.is_finite() {
        return Err(DecayError::NonFinite("log-likelihood".into()));
    }
    Ok(total)
}

/// Gradient of `nll` with respect to (intercept, coefficients).
pub fn nll_gradient(
    ds: &Dataset,
    intercept: f64,
    coefs: &[f64],
    ridge: f64,
) -> Result<(f64, Vec<f64>)> {
    if coefs.len() != ds.n_features() {
        return Err(DecayError::LengthMismatch { left: coefs.len(), right: ds.n_features() });
    }
    let mut g0 = 0.0;
    let mut g = vec![0.0; coefs.len()];
    for r in 0..ds.n_rows() {
        let row = ds.row(r);
        let resid = sigmoid(eta_for(row, intercept, coefs)) - f64::from(ds.classes()[r]);
        g0 += resid;
        for (gk, x) in g.iter_mut().zip(row) {
            *gk += resid * x;
        }
    }
    for (gk, b) in g.iter_mut().zip(coefs) {
        *gk += ridge * b;
    }
    Ok((g0, g))
}

struct Standardizer {
    means: Vec<f64>,
    scales: Vec<f64>,
}

impl Standardizer {
    fn fit(ds: &Dataset) -> Standardizer {
        let n = ds.n_rows() as f64;
        let p = ds.n_features();
        let mut means = vec![0.0; p];
        for r in 0..ds.n_rows() {
            for (m, x) in means.iter_mut().zip(ds.row(r)) {
                *m += x;
            }
        }
        for m in &mut means {
            *m /= n;
        }
        let mut scales = vec![0.0; p];
        for r in 0..ds.n_rows() {
            for (f, s) in scales.iter_mut().enumerate() {
                let d = ds.value(r, f) - means[f];
                *s += d * d;
            }
        }
        for s in &mut scales {
            *s = (*s / n).sqrt();
            if *s == 0.0 {
                *s = 1.0; // constant column: leave unscaled
            }
        }
        Standardizer { means, scales }
    }

    fn apply(&self, ds: &Dataset) -> Dataset {
        let rows: Vec<Vec<f64>> = (0..ds.n_rows())
            .map(|r| {
                ds.row(r)
                    .iter()
                    .enumerate()
                    .map(|(f, x)| (x - self.means[f]) / self.scales[f])
                    .collect()
            })
            .collect();
        Dataset::from_rows(ds.feature_names().to_vec(), &rows, ds.classes().to_vec()).unwrap()
    }

    /// Map standardized-scale parameters back to the raw scale.
    fn unmap(&self, intercept: f64, coefs: &[f64]) -> (f64, Vec<f64>) {
        let raw: Vec<f64> = coefs.iter().zip(&self.scales).map(|(b, s)| b / s).collect();
        let shift: f64 = raw.iter().zip(&self.means).map(|(b, m)| b * m).sum();
        (intercept - shift, raw)
    }
}

pub fn train_logit(ds: &Dataset, config: LogitConfig) -> Result<LogitModel> {
    if ds.is_empty() {
        return Err(DecayError::EmptyInput("logit training needs a non-empty set".into()));
    }
    let (n1, n0) = ds.class_counts();
    if n1 == 0 || n0 == 0 {
        return Err(DecayError::SingleClass);
    }
    for r in 0..ds.n_rows() {
        if ds.row(r).iter().any(|x| !x.is_finite()) {
            return Err(DecayError::NonFinite(format!("feature value in training row {r}")));
        }
    }
    if config.max_iter == 0 || config.tolerance <= 0.0 || config.ridge < 0.0 {
        return Err(DecayError::InvalidConfig(
            "logit config needs max_iter >= 1, tolerance > 0, ridge >= 0".into(),
        ));
    }

    let standardizer = config.standardize.then(|| Standardizer::fit(ds));
    let scaled;
    let work: &Dataset = match &standardizer {
        Some(s) => {
            scaled = s.apply(ds);
            &scaled
        }
        None => ds,
    };

    let p = work.n_features();
    let mut intercept = 0.0;
    let mut coefs = vec![0.0; p];
    let mut cur_nll = nll(work, intercept, coefs.as_slice(), config.ridge)?;
    let mut iterations = 0;
    let mut converged = false;
    let mut grad_norm = f64::INFINITY;
    let grad_limit = config.tolerance * work.n_rows() as f64;

    for _ in 0..config.max_iter {
        let (g0, g) = nll_gradient(work, intercept, &coefs, config.ridge)?;
        grad_norm = (g0 * g0 + g.iter().map(|v| v * v).sum::<f64>()).sqrt();
        if grad_norm < grad_limit {
            converged = true;
            break;
        }
        iterations += 1;

        // Hessian over the (1, x) design, ridge on the coefficient block.
        let dim = p + 1;
        let mut h = DMatrix::<f64>::zeros(dim, dim);
        for r in 0..work.n_rows() {
            let row = work.row(r);
            let mu = sigmoid(eta_for(row, intercept, &coefs));
            let s = mu * (1.0 - mu);
            h[(0, 0)] += s;
            for a in 0..p {
                let sa = s * row[a];
                h[(0, a + 1)] += sa;
                h[(a + 1, 0)] += sa;
                for b in a..p {
                    h[(a + 1, b + 1)] += sa * row[b];
                    if b != a {
                        h[(b + 1, a + 1)] += sa * row[b];
                    }
                }
            }
        }
        for a in 0..p {
            h[(a + 1, a + 1)] += config.ridge;
        }

        let mut rhs = DVector::<f64>::zeros(dim);
        rhs[0] = -g0;
        for (k, v) in g.iter().enumerate() {
            rhs[k + 1] = -v;
        }

        // Cholesky with escalating diagonal jitter for near-singular
        // (saturated or collinear) Hessians.
        let mut jitter = 0.0;
        let direction = loop {
            let mut hj = h.clone();
            if jitter > 0.0 {
                for d in 0..dim {
                    hj[(d, d)] += jitter;
                }
            }
            match hj.cholesky() {
                Some(ch) => break ch.solve(&rhs),
                None if jitter < 1.0 => jitter = if jitter == 0.0 { 1e-10 } else { jitter * 100.0 },
                None => {
                    return Err(DecayError::NonFinite(
                        "logit Hessian is not positive definite".into(),
                    ))
                }
            }
        };

        // Step halving keeps the objective monotone non-increasing.
        let mut step = 1.0;
        let mut accepted = false;
        for _ in 0..60 {
            let cand_intercept = intercept + step * direction[0];
            let cand: Vec<f64> =
                coefs.iter().enumerate().map(|(k, b)| b + step * direction[k + 1]).collect();
            let cand_nll = nll(work, cand_intercept, &cand, config.ridge)?;
            if cand_nll <= cur_nll {
                intercept = cand_intercept;
                coefs = cand;
                cur_nll = cand_nll;
                accepted = true;
                break;
            }
            step /= 2.0;
        }
        if !accepted {
            break; // no descent direction left: report as converged-by-stall
        }
    }

    if !converged {
        let (g0, g) = nll_gradient(work, intercept, &coefs, config.ridge)?;
        grad_norm = (g0 * g0 + g.iter().map(|v| v * v).sum::<f64>()).sqrt();
        converged = grad_norm < grad_limit;
    }

    let (intercept, coefficients) = match &standardizer {
        Some(s) => s.unmap(intercept, &coefs),
        None => (intercept, coefs),
    };

    Ok(LogitModel {
        feature_names: ds.feature_names().to_vec(),
        intercept,
        coefficients,
        config,
        meta: TrainingMeta { iterations, converged, final_grad_norm: grad_norm, final_nll: cur_nll },
    })
}

impl LogitModel {
    pub fn predict_proba_row(&self, row: &[f64]) -> f64 {
        sigmoid(eta_for(row, self.intercept, &self.coefficients))
    }

    /// Class 1 iff persist probability ≥ threshold (default 0.5).
    pub fn predict_row(&self, row: &[f64], threshold: f64) -> u8 {
        u8::from(self.predict_proba_row(row) >= threshold)
    }

    pub fn predict(&self, ds: &Dataset) -> Vec<u8> {
        (0..ds.n_rows()).map(|r| self.predict_row(ds.row(r), 0.5)).collect()
    }

    /// (feature, β, exp(β)) rows, in feature order.
    pub fn odds_rows(&self) -> Vec<(String, f64, f64)> {
        self.feature_names
            .iter()
            .zip(&self.coefficients)
            .map(|(name, &b)| (name.clone(), b, b.exp()))
            .collect()
    }

    /// Plain-text coefficient/odds table.
    pub fn render_odds_table(&self) -> String {
        let mut out = String::from("feature        beta          odds (exp(beta))\n");
        out.push_str(&format!("{:<14} {:<13.4}\n", "(intercept)", self.intercept));
        for (name, beta, odds) in self.odds_rows() {
            out.push_str(&format!("{name:<14} {beta:<13.4} {odds:.4}\n"));
        }
        out
    }

    pub fn save_json(&self, path: &Path) -> Result<()> {
        let f = std::fs::File::create(path)?;
        serde_json::to_writer_pretty(std::io::BufWriter::new(f), self)?;
        Ok(())
    }

    pub fn load_json(path: &Path) -> Result<LogitModel> {
        let f = std::fs::File::open(path)?;
        Ok(serde_json::from_reader(std::io::BufReader::new(f))?)
    }
}
