//! Linear output layers: least-squares training, nearest-class decoding
//! with a trained bias shift, error metrics and the capacity functional.

use ndarray::{Array1, Array2, Axis};
use ndarray_linalg::{JobSvd, LeastSquaresSvd, SVDDC};

use crate::error::{QrError, Result};
use crate::reservoir::FeatureMatrix;

/// Trained affine readout `y = X w + b`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReadoutWeights {
    pub weights: Array1<f64>,
    pub bias: f64,
    /// Set when the design matrix was rank deficient at ridge = 0 and the
    /// minimum-norm solution was returned.
    pub rank_deficient: bool,
}

/// Minimize `sum (y_k - ybar_k)^2 + ridge * |w|^2` over weights and bias.
///
/// A constant bias column is appended internally and never penalized. At
/// ridge = 0 the minimum-norm least-squares solution is used, so degenerate
/// feature matrices are handled and flagged instead of failing.
pub fn train_linear(x: &FeatureMatrix, targets: &[f64], ridge: f64) -> Result<ReadoutWeights> {
    let rows = x.nrows();
    let cols = x.ncols();
    if targets.len() != rows {
        return Err(QrError::Dimension(format!(
            "{} targets for {rows} feature rows",
            targets.len()
        )));
    }
    if rows == 0 {
        return Err(QrError::Domain("cannot train on an empty feature matrix".into()));
    }
    if ridge < 0.0 || !ridge.is_finite() {
        return Err(QrError::Domain(format!("ridge {ridge} must be non-negative")));
    }

    let extra = if ridge > 0.0 { cols } else { 0 };
    let mut design = Array2::zeros((rows + extra, cols + 1));
    design.slice_mut(ndarray::s![0..rows, 0..cols]).assign(x);
    design.slice_mut(ndarray::s![0..rows, cols]).fill(1.0);
    if ridge > 0.0 {
        let root = ridge.sqrt();
        for j in 0..cols {
            design[[rows + j, j]] = root; // bias column stays unpenalized
        }
    }
    let mut rhs = Array1::zeros(rows + extra);
    rhs.slice_mut(ndarray::s![0..rows]).assign(&Array1::from_iter(targets.iter().cloned()));

    let solved = design.least_squares(&rhs)?;
    let solution = solved.solution;
    let rank_deficient = (solved.rank as usize) < cols + 1;
    Ok(ReadoutWeights {
        weights: solution.slice(ndarray::s![0..cols]).to_owned(),
        bias: solution[cols],
        rank_deficient: ridge == 0.0 && rank_deficient,
    })
}

/// `y = X w + b`.
pub fn predict(x: &FeatureMatrix, w: &ReadoutWeights) -> Result<Array1<f64>> {
    if x.ncols() != w.weights.len() {
        return Err(QrError::Dimension(format!(
            "{} feature columns for {} weights",
            x.ncols(),
            w.weights.len()
        )));
    }
    Ok(x.dot(&w.weights) + w.bias)
}

/// Mean squared error `(1/L) sum (y_k - ybar_k)^2`.
pub fn mse(y: &[f64], ybar: &[f64]) -> Result<f64> {
    if y.len() != ybar.len() {
        return Err(QrError::Dimension("prediction/target length mismatch".into()));
    }
    if y.is_empty() {
        return Err(QrError::Domain("mse of empty vectors".into()));
    }
    Ok(y.iter().zip(ybar).map(|(a, b)| (a - b).powi(2)).sum::<f64>() / y.len() as f64)
}

/// `MSE / <ybar^2>`; requires nonzero target power.
pub fn nmse(y: &[f64], ybar: &[f64]) -> Result<f64> {
    let power = target_power(ybar)?;
    Ok(mse(y, ybar)? / power)
}

fn target_power(ybar: &[f64]) -> Result<f64> {
    if ybar.is_empty() {
        return Err(QrError::Domain("empty target vector".into()));
    }
    let power = ybar.iter().map(|v| v * v).sum::<f64>() / ybar.len() as f64;
    if power <= 0.0 {
        return Err(QrError::Domain("target power is zero".into()));
    }
    Ok(power)
}

/// Regressor plus nearest-class decoding over equally spaced class values.
#[derive(Debug, Clone)]
pub struct ClassifierModel {
    pub regressor: ReadoutWeights,
    pub class_values: Vec<f64>,
    pub bias_shift: f64,
}

/// Resolution of the exhaustive 1-D bias-shift search (one class spacing).
const BIAS_GRID: usize = 2001;

/// Fit a linear regressor onto the class labels, then shift its bias to
/// maximize training accuracy under nearest-class decoding. Ties in the
/// scan are broken toward the smallest |shift|.
pub fn train_classifier(
    x: &FeatureMatrix,
    labels: &[f64],
    class_values: &[f64],
    ridge: f64,
) -> Result<ClassifierModel> {
    validate_classes(class_values)?;
    if let Some(bad) = labels.iter().find(|l| !class_values.iter().any(|c| c == *l)) {
        return Err(QrError::Domain(format!("label {bad} is not a class value")));
    }
    if class_values.len() == 1 {
        // single class: trivially perfect constant predictor
        return Ok(ClassifierModel {
            regressor: ReadoutWeights {
                weights: Array1::zeros(x.ncols()),
                bias: class_values[0],
                rank_deficient: false,
            },
            class_values: class_values.to_vec(),
            bias_shift: 0.0,
        });
    }

    let regressor = train_linear(x, labels, ridge)?;
    let raw = predict(x, &regressor)?;
    let spacing = class_values[1] - class_values[0];
    let mut best_shift: f64 = 0.0;
    let mut best_hits = 0usize;
    for g in 0..BIAS_GRID {
        let shift = -spacing + 2.0 * spacing * g as f64 / (BIAS_GRID - 1) as f64;
        let hits = raw
            .iter()
            .zip(labels)
            .filter(|(&p, &l)| nearest_class(class_values, p + shift) == l)
            .count();
        if hits > best_hits || (hits == best_hits && shift.abs() < best_shift.abs()) {
            best_hits = hits;
            best_shift = shift;
        }
    }
    Ok(ClassifierModel {
        regressor,
        class_values: class_values.to_vec(),
        bias_shift: best_shift,
    })
}

fn validate_classes(class_values: &[f64]) -> Result<()> {
    if class_values.is_empty() {
        return Err(QrError::Domain("class value list is empty".into()));
    }
    if class_values.len() >= 2 {
        let spacing = class_values[1] - class_values[0];
        if spacing <= 0.0 {
            return Err(QrError::Domain("class values must be strictly increasing".into()));
        }
        for w in class_values.windows(2) {
            if ((w[1] - w[0]) - spacing).abs() > 1e-9 * spacing.abs().max(1.0) {
                return Err(QrError::Domain("class values must be equally spaced".into()));
            }
        }
    }
    Ok(())
}

/// Nearest class value; ties go to the smaller class.
fn nearest_class(class_values: &[f64], prediction: f64) -> f64 {
    let mut best = class_values[0];
    let mut best_dist = (prediction - best).abs();
    for &c in &class_values[1..] {
        let d = (prediction - c).abs();
        if d < best_dist {
            best = c;
            best_dist = d;
        }
    }
    best
}

/// Decode each feature row to its nearest class.
pub fn classify(model: &ClassifierModel, x: &FeatureMatrix) -> Result<Vec<f64>> {
    let raw = predict(x, &model.regressor)?;
    Ok(raw.iter().map(|&p| nearest_class(&model.class_values, p + model.bias_shift)).collect())
}

/// Capacity functional `C = 1 - min_w MSE(y, ybar) / <ybar^2>`, clamped to
/// `[0, 1]` after verifying the raw value is non-negative up to numerics.
pub fn capacity(x: &FeatureMatrix, ybar: &[f64]) -> Result<f64> {
    let power = target_power(ybar)?;
    let w = train_linear(x, ybar, 0.0)?;
    let y = predict(x, &w)?;
    let raw = 1.0 - mse(y.as_slice().unwrap(), ybar)? / power;
    if raw < -1e-10 {
        return Err(QrError::numerical(format!("capacity {raw} fell below zero")));
    }
    Ok(raw.clamp(0.0, 1.0))
}

/// Orthonormal basis of the column space of `[X | 1]`, for evaluating many
/// capacities against one feature matrix: `capacity = |Q^T y|^2 / |y|^2`.
pub fn capacity_basis(x: &FeatureMatrix) -> Result<Array2<f64>> {
    let rows = x.nrows();
    let cols = x.ncols();
    let mut design = Array2::zeros((rows, cols + 1));
    design.slice_mut(ndarray::s![.., 0..cols]).assign(x);
    design.slice_mut(ndarray::s![.., cols]).fill(1.0);
    let (u, sigma, _) = design.svddc(JobSvd::Some)?;
    let u = u.ok_or_else(|| QrError::numerical("SVD did not return singular vectors"))?;
    let tol = sigma.iter().cloned().fold(0.0, f64::max) * rows.max(cols + 1) as f64 * f64::EPSILON;
    let rank = sigma.iter().filter(|&&s| s > tol).count();
    Ok(u.slice_axis(Axis(1), ndarray::Slice::from(0..rank)).to_owned())
}

/// Capacity of `ybar` against a precomputed orthonormal basis.
pub fn capacity_from_basis(basis: &Array2<f64>, ybar: &[f64]) -> Result<f64> {
    if basis.nrows() != ybar.len() {
        return Err(QrError::Dimension("basis rows do not match target length".into()));
    }
    let y = Array1::from_iter(ybar.iter().cloned());
    let norm_sq = y.dot(&y);
    if norm_sq <= 0.0 {
        return Err(QrError::Domain("target power is zero".into()));
    }
    let proj = basis.t().dot(&y);
    Ok((proj.dot(&proj) / norm_sq).clamp(0.0, 1.0))
}
