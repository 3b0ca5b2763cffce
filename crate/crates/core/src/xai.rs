//! Feature attribution: gradient saliency for the QBM, exact Shapley values
//! for the CBM, simplex normalization, and entropy of the resulting
//! importance distributions.

use crate::cbm::{hidden_probs_real, RbmParams, RbmReadout};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::pca::{BinaryDataset, ReducedDataset};
use crate::qbm::QbmModel;
use crate::qgrad;
use crate::scalar::{lit, Real};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelTag {
    Qbm,
    Cbm,
}

impl std::fmt::Display for ModelTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ModelTag::Qbm => write!(f, "QBM"),
            ModelTag::Cbm => write!(f, "CBM"),
        }
    }
}

/// Per-feature importance: raw mean-|score| values, their simplex
/// normalization, and the Shannon entropy of that distribution in nats.
///
/// `degenerate` marks reports whose raw scores were all zero; the
/// distribution then falls back to uniform and downstream checks must treat
/// the run as failed rather than divide by zero.
#[derive(Debug, Clone)]
pub struct AttributionReport<T> {
    pub model_tag: ModelTag,
    pub raw_scores: Vec<T>,
    pub distribution: Vec<T>,
    pub entropy_nats: T,
    pub per_sample: Option<Matrix<T>>,
    pub degenerate: bool,
}

/// Shannon entropy in nats of a simplex vector; 0 ln 0 counts as 0.
pub fn entropy<T: Real>(distribution: &[T]) -> Result<T> {
    let mut sum = T::zero();
    for &p in distribution {
        if !(p >= T::zero()) {
            return Err(Error::NotADistribution);
        }
        sum += p;
    }
    if (sum - T::one()).abs() > lit::<T>(1e-9) {
        return Err(Error::NotADistribution);
    }
    let mut h = T::zero();
    for &p in distribution {
        if p > T::zero() {
            h -= p * p.ln();
        }
    }
    Ok(h)
}

fn build_report<T: Real>(
    model_tag: ModelTag,
    raw_scores: Vec<T>,
    per_sample: Option<Matrix<T>>,
) -> Result<AttributionReport<T>> {
    let total: T = raw_scores.iter().copied().sum();
    let k = raw_scores.len();
    let (distribution, degenerate) = if total > T::zero() {
        (raw_scores.iter().map(|&s| s / total).collect(), false)
    } else {
        (vec![T::one() / lit::<T>(k as f64); k], true)
    };
    let entropy_nats = entropy(&distribution)?;
    Ok(AttributionReport {
        model_tag,
        raw_scores,
        distribution,
        entropy_nats,
        per_sample,
        degenerate,
    })
}

/// Mean |d predict / d feature| over the dataset, chain-ruled through the
/// sigmoid readout, the circuit input Jacobian, and the min-max scaler.
pub fn qbm_saliency<T: Real>(
    model: &QbmModel<T>,
    data: &ReducedDataset<T>,
) -> Result<AttributionReport<T>> {
    if data.is_empty() {
        return Err(Error::EmptyData);
    }
    let k = data.features.cols();
    let mut per_sample = Matrix::<T>::zeros(data.len(), k);
    let mut raw = vec![T::zero(); k];
    for (r, x) in data.features.row_iter().enumerate() {
        let angles = model.scale(x)?;
        let scale_grad = model.scale_gradient(x)?;
        let z = crate::qsim::forward(&angles, &model.circuit)?.z;
        let logit = model
            .readout_weights
            .iter()
            .zip(&z)
            .map(|(&w, &v)| w * v)
            .sum::<T>()
            + model.readout_bias;
        let p = T::one() / (T::one() + (-logit).exp());
        let sig_grad = p * (T::one() - p);
        let jac = qgrad::input_jacobian(&angles, &model.circuit)?;
        for i in 0..k {
            let mut dz = T::zero();
            for (j, &w) in model.readout_weights.iter().enumerate() {
                dz += w * jac[(i, j)];
            }
            let g = (sig_grad * dz * scale_grad[i]).abs();
            per_sample[(r, i)] = g;
            raw[i] += g;
        }
    }
    let n = lit::<T>(data.len() as f64);
    for s in raw.iter_mut() {
        *s /= n;
    }
    build_report(ModelTag::Qbm, raw, Some(per_sample))
}

/// Exact Shapley values over all 2^k coalitions. A coalition S evaluates
/// `value_fn` on a vector whose members come from `x` and whose non-members
/// come from `baseline`.
pub fn exact_shapley<T: Real, F>(value_fn: F, x: &[T], baseline: &[T]) -> Result<Vec<T>>
where
    F: Fn(&[T]) -> T,
{
    let k = x.len();
    if baseline.len() != k {
        return Err(Error::DimensionMismatch(format!(
            "{k} features vs {} baseline entries",
            baseline.len()
        )));
    }
    if k == 0 || k > 20 {
        return Err(Error::InvalidConfig(format!(
            "exact Shapley enumeration supports 1..=20 features, got {k}"
        )));
    }

    // One evaluation per coalition bitmask.
    let mut values = Vec::with_capacity(1 << k);
    let mut assembled = vec![T::zero(); k];
    for mask in 0..(1usize << k) {
        for i in 0..k {
            assembled[i] = if mask & (1 << i) != 0 { x[i] } else { baseline[i] };
        }
        let v = value_fn(&assembled);
        if !v.is_finite() {
            return Err(Error::NonFiniteValue);
        }
        values.push(v);
    }

    let mut factorial = vec![1.0f64; k + 1];
    for i in 1..=k {
        factorial[i] = factorial[i - 1] * i as f64;
    }
    // weight for a coalition of size s not containing i:
    // s! (k - s - 1)! / k!
    let weights: Vec<T> = (0..k)
        .map(|s| lit::<T>(factorial[s] * factorial[k - s - 1] / factorial[k]))
        .collect();

    let mut phi = vec![T::zero(); k];
    for (i, phi_i) in phi.iter_mut().enumerate() {
        let bit = 1usize << i;
        for mask in 0..(1usize << k) {
            if mask & bit != 0 {
                continue;
            }
            let s = mask.count_ones() as usize;
            *phi_i += weights[s] * (values[mask | bit] - values[mask]);
        }
    }
    Ok(phi)
}

/// Per-sample exact Shapley attribution of the logistic readout over the
/// RBM's hidden probabilities. `baseline` is the per-feature mean of the
/// training bits.
pub fn cbm_attribution<T: Real>(
    params: &RbmParams<T>,
    readout: &RbmReadout<T>,
    data: &BinaryDataset<T>,
    baseline: &[T],
) -> Result<AttributionReport<T>> {
    if data.is_empty() {
        return Err(Error::EmptyData);
    }
    let k = data.bits.cols();
    if baseline.len() != k || params.n_visible() != k {
        return Err(Error::DimensionMismatch(format!(
            "{k} features vs {} baseline entries and {} visible units",
            baseline.len(),
            params.n_visible()
        )));
    }
    let value_fn = |v: &[T]| -> T {
        let ph = hidden_probs_real(v, params).expect("dimension fixed by caller");
        let logit = readout
            .weights
            .iter()
            .zip(&ph)
            .map(|(&w, &p)| w * p)
            .sum::<T>()
            + readout.bias;
        T::one() / (T::one() + (-logit).exp())
    };

    let mut per_sample = Matrix::<T>::zeros(data.len(), k);
    let mut raw = vec![T::zero(); k];
    let mut x_real = vec![T::zero(); k];
    for (r, bits) in data.bits.row_iter().enumerate() {
        for (dst, &b) in x_real.iter_mut().zip(bits) {
            *dst = lit::<T>(f64::from(b));
        }
        let phi = exact_shapley(value_fn, &x_real, baseline)?;
        for (i, &p) in phi.iter().enumerate() {
            per_sample[(r, i)] = p;
            raw[i] += p.abs();
        }
    }
    let n = lit::<T>(data.len() as f64);
    for s in raw.iter_mut() {
        *s /= n;
    }
    build_report(ModelTag::Cbm, raw, Some(per_sample))
}

/// Training-mean bit vector, the reference input for masked coalitions.
pub fn shapley_baseline<T: Real>(train_bits: &Matrix<u8>) -> Result<Vec<T>> {
    if train_bits.rows() == 0 {
        return Err(Error::EmptyData);
    }
    let n = lit::<T>(train_bits.rows() as f64);
    Ok((0..train_bits.cols())
        .map(|c| {
            train_bits
                .row_iter()
                .map(|r| lit::<T>(f64::from(r[c])))
                .sum::<T>()
                / n
        })
        .collect())
}

/// Side-by-side summary of two attribution reports.
#[derive(Debug, Clone)]
pub struct ComparisonSummary<T> {
    pub qbm_distribution: Vec<T>,
    pub cbm_distribution: Vec<T>,
    /// entropy(QBM) - entropy(CBM)
    pub entropy_delta: T,
    /// feature indices ranked by attribution mass, largest first
    pub qbm_ranking: Vec<usize>,
    pub cbm_ranking: Vec<usize>,
}

fn ranking<T: Real>(distribution: &[T]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..distribution.len()).collect();
    idx.sort_by(|&a, &b| {
        distribution[b]
            .partial_cmp(&distribution[a])
            .unwrap()
            .then(a.cmp(&b))
    });
    idx
}

pub fn compare<T: Real>(
    qbm: &AttributionReport<T>,
    cbm: &AttributionReport<T>,
) -> Result<ComparisonSummary<T>> {
    if qbm.distribution.len() != cbm.distribution.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} vs {} features",
            qbm.distribution.len(),
            cbm.distribution.len()
        )));
    }
    Ok(ComparisonSummary {
        qbm_distribution: qbm.distribution.clone(),
        cbm_distribution: cbm.distribution.clone(),
        entropy_delta: qbm.entropy_nats - cbm.entropy_nats,
        qbm_ranking: ranking(&qbm.distribution),
        cbm_ranking: ranking(&cbm.distribution),
    })
}
