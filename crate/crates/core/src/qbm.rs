//! Hybrid classifier: quantum feature map followed by an affine + sigmoid
//! readout, trained with plain gradient descent. Reports keep the QBM name
//! used throughout the pipeline.

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::pca::ReducedDataset;
use crate::qgrad;
use crate::qsim::{forward, CircuitParams};
use crate::rng;
use crate::scalar::{lit, Real};

/// Training knobs. Every field is echoed into reports so defaulted values
/// stay visible.
#[derive(Debug, Clone, PartialEq)]
pub struct QbmConfig<T> {
    pub epochs: usize,
    pub lr: T,
    /// None = full-batch descent.
    pub batch_size: Option<usize>,
    pub layers: usize,
    pub entangle_range: usize,
    pub seed: u64,
}

impl<T: Real> Default for QbmConfig<T> {
    fn default() -> Self {
        Self {
            epochs: 50,
            lr: lit(0.01),
            // 50 full-batch steps at this learning rate leave the model far
            // from converged; mini-batches keep the stated epoch count and
            // rate while updating often enough to train.
            batch_size: Some(32),
            layers: 2,
            entangle_range: 1,
            seed: 42,
        }
    }
}

impl<T: Real> QbmConfig<T> {
    pub fn hyperparameters(&self) -> Vec<(String, String)> {
        vec![
            ("epochs".into(), self.epochs.to_string()),
            ("lr".into(), format!("{}", self.lr)),
            (
                "batch_size".into(),
                self.batch_size.map_or("full".into(), |b| b.to_string()),
            ),
            ("layers".into(), self.layers.to_string()),
            ("entangle_range".into(), self.entangle_range.to_string()),
            ("seed".into(), self.seed.to_string()),
        ]
    }
}

/// Circuit parameters plus the affine readout and the training-set feature
/// scaler.
#[derive(Debug, Clone, PartialEq)]
pub struct QbmModel<T> {
    pub circuit: CircuitParams<T>,
    pub readout_weights: Vec<T>,
    pub readout_bias: T,
    /// Per-feature (min, max) of the training data.
    pub input_scaler: Vec<(T, T)>,
}

/// Per-run training record.
#[derive(Debug, Clone)]
pub struct TrainReport<T> {
    pub loss_history: Vec<T>,
    pub final_train_accuracy: T,
    pub final_test_accuracy: Option<T>,
    pub seed: u64,
    pub hyperparameters: Vec<(String, String)>,
}

fn sigmoid<T: Real>(x: T) -> T {
    T::one() / (T::one() + (-x).exp())
}

const PROB_FLOOR: f64 = 1e-12;

fn clamp_prob<T: Real>(p: T) -> T {
    p.max(lit(PROB_FLOOR)).min(T::one() - lit(PROB_FLOOR))
}

fn scale_with<T: Real>(scaler: &[(T, T)], x: &[T]) -> Vec<T> {
    let pi = lit::<T>(std::f64::consts::PI);
    x.iter()
        .zip(scaler)
        .map(|(&v, &(lo, hi))| ((v - lo) / (hi - lo)).max(T::zero()).min(T::one()) * pi)
        .collect()
}

impl<T: Real> QbmModel<T> {
    /// Min-max map of each raw feature onto [0, pi]; out-of-range inputs clip
    /// to the interval ends.
    pub fn scale(&self, x: &[T]) -> Result<Vec<T>> {
        if x.len() != self.input_scaler.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} features, scaler expects {}",
                x.len(),
                self.input_scaler.len()
            )));
        }
        Ok(scale_with(&self.input_scaler, x))
    }

    /// Derivative of the scaled angle with respect to the raw feature; zero
    /// where the clip is active.
    pub fn scale_gradient(&self, x: &[T]) -> Result<Vec<T>> {
        if x.len() != self.input_scaler.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} features, scaler expects {}",
                x.len(),
                self.input_scaler.len()
            )));
        }
        let pi = lit::<T>(std::f64::consts::PI);
        Ok(x.iter()
            .zip(&self.input_scaler)
            .map(|(&v, &(lo, hi))| {
                if v < lo || v > hi {
                    T::zero()
                } else {
                    pi / (hi - lo)
                }
            })
            .collect())
    }

    /// Latent Pauli-Z expectation vector for raw features.
    pub fn latent(&self, x: &[T]) -> Result<Vec<T>> {
        Ok(forward(&self.scale(x)?, &self.circuit)?.z)
    }

    /// Class-1 probability: sigma(w . forward(scale(x)) + b), clamped so the
    /// result stays strictly inside (0, 1) even when the sigmoid saturates.
    pub fn predict(&self, x: &[T]) -> Result<T> {
        let z = self.latent(x)?;
        let logit = self
            .readout_weights
            .iter()
            .zip(&z)
            .map(|(&w, &v)| w * v)
            .sum::<T>()
            + self.readout_bias;
        Ok(clamp_prob(sigmoid(logit)))
    }
}

/// Mean binary cross-entropy over the batch, probabilities clamped away from
/// 0 and 1.
pub fn loss<T: Real>(model: &QbmModel<T>, features: &Matrix<T>, labels: &[u8]) -> Result<T> {
    if labels.is_empty() {
        return Err(Error::EmptyBatch);
    }
    if features.rows() != labels.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} feature rows vs {} labels",
            features.rows(),
            labels.len()
        )));
    }
    let mut total = T::zero();
    for (row, &y) in features.row_iter().zip(labels) {
        let p = clamp_prob(model.predict(row)?);
        total += if y == 1 { -p.ln() } else { -(T::one() - p).ln() };
    }
    Ok(total / lit::<T>(labels.len() as f64))
}

fn fit_scaler<T: Real>(features: &Matrix<T>) -> Result<Vec<(T, T)>> {
    let mut scaler = Vec::with_capacity(features.cols());
    for c in 0..features.cols() {
        let mut lo = T::infinity();
        let mut hi = T::neg_infinity();
        for row in features.row_iter() {
            lo = lo.min(row[c]);
            hi = hi.max(row[c]);
        }
        if !(lo < hi) {
            return Err(Error::DegenerateFeature(c));
        }
        scaler.push((lo, hi));
    }
    Ok(scaler)
}

/// Plain gradient descent on the binary cross-entropy; circuit angles get
/// shift-rule gradients chain-ruled through the readout, the readout gets
/// analytic ones. Deterministic for a fixed seed.
pub fn train<T: Real>(
    data: &ReducedDataset<T>,
    config: &QbmConfig<T>,
) -> Result<(QbmModel<T>, TrainReport<T>)> {
    if data.is_empty() {
        return Err(Error::EmptyData);
    }
    if !data.labels.contains(&0) || !data.labels.contains(&1) {
        return Err(Error::DegenerateData);
    }
    if config.layers == 0 {
        return Err(Error::InvalidConfig("layer count must be at least 1".into()));
    }
    let n_features = data.features.cols();
    let n_samples = data.len();

    let input_scaler = fit_scaler(&data.features)?;

    let mut init_rng = rng::stream(config.seed, "qbm-init");
    let pi = lit::<T>(std::f64::consts::PI);
    let theta: Vec<T> = (0..config.layers * n_features * 3)
        .map(|_| rng::uniform_in(&mut init_rng, -pi, pi))
        .collect();
    let mut circuit = CircuitParams::new(config.layers, n_features, config.entangle_range, theta)?;
    let w_range = lit::<T>(0.01);
    let mut weights: Vec<T> = (0..n_features)
        .map(|_| rng::uniform_in(&mut init_rng, -w_range, w_range))
        .collect();
    let mut bias = T::zero();

    let batch_size = config.batch_size.unwrap_or(n_samples).max(1);
    let mut batch_rng = rng::stream(config.seed, "qbm-batch");
    let mut order: Vec<usize> = (0..n_samples).collect();

    let mut loss_history = Vec::with_capacity(config.epochs);
    let n_params = circuit.param_count();

    for _epoch in 0..config.epochs {
        if config.batch_size.is_some() {
            rng::shuffle(&mut batch_rng, &mut order);
        }
        let mut epoch_loss = T::zero();

        for batch in order.chunks(batch_size) {
            let mut grad_theta = vec![T::zero(); n_params];
            let mut grad_w = vec![T::zero(); n_features];
            let mut grad_b = T::zero();
            let mut batch_loss = T::zero();

            for &idx in batch {
                let x = data.features.row(idx);
                let y = if data.labels[idx] == 1 { T::one() } else { T::zero() };
                let angles = scale_with(&input_scaler, x);
                let z = forward(&angles, &circuit)?.z;
                let logit = weights.iter().zip(&z).map(|(&w, &v)| w * v).sum::<T>() + bias;
                let p = sigmoid(logit);
                let pc = clamp_prob(p);
                batch_loss += if y == T::one() { -pc.ln() } else { -(T::one() - pc).ln() };

                // dLoss/dlogit of the cross-entropy + sigmoid pair.
                let residual = p - y;
                for (gw, &zv) in grad_w.iter_mut().zip(&z) {
                    *gw += residual * zv;
                }
                grad_b += residual;

                let jac = qgrad::theta_jacobian(&angles, &circuit)?;
                for (p_idx, gt) in grad_theta.iter_mut().enumerate() {
                    let mut acc = T::zero();
                    for (j, &w) in weights.iter().enumerate() {
                        acc += w * jac[(p_idx, j)];
                    }
                    *gt += residual * acc;
                }
            }

            let scale = lit::<T>(batch.len() as f64);
            let step = config.lr;
            let mut theta_new = circuit.theta().to_vec();
            for (t, g) in theta_new.iter_mut().zip(&grad_theta) {
                *t -= step * *g / scale;
            }
            circuit = CircuitParams::new(
                config.layers,
                n_features,
                config.entangle_range,
                theta_new,
            )?;
            for (w, g) in weights.iter_mut().zip(&grad_w) {
                *w -= step * *g / scale;
            }
            bias -= step * grad_b / scale;

            epoch_loss += batch_loss;
        }

        let mean_loss = epoch_loss / lit::<T>(n_samples as f64);
        if !mean_loss.is_finite() {
            return Err(Error::NonFiniteLoss);
        }
        loss_history.push(mean_loss);
    }

    let model = QbmModel {
        circuit,
        readout_weights: weights,
        readout_bias: bias,
        input_scaler,
    };
    let final_train_accuracy = evaluate_accuracy(&model, data)?;
    let report = TrainReport {
        loss_history,
        final_train_accuracy,
        final_test_accuracy: None,
        seed: config.seed,
        hyperparameters: config.hyperparameters(),
    };
    Ok((model, report))
}

/// Fraction of samples where (predict > 0.5) matches the label; an exact 0.5
/// counts as class 0.
pub fn evaluate_accuracy<T: Real>(model: &QbmModel<T>, data: &ReducedDataset<T>) -> Result<T> {
    if data.is_empty() {
        return Err(Error::EmptyData);
    }
    let mut correct = 0usize;
    let half = lit::<T>(0.5);
    for (row, &y) in data.features.row_iter().zip(&data.labels) {
        let predicted = u8::from(model.predict(row)? > half);
        if predicted == y {
            correct += 1;
        }
    }
    Ok(lit::<T>(correct as f64) / lit::<T>(data.len() as f64))
}
