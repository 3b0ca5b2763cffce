//! Exact O(n^2) t-SNE of the latent expectation vectors, plus the silhouette
//! score used to quantify cluster separation.

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::pca::ReducedDataset;
use crate::qbm::QbmModel;
use crate::rng;
use crate::scalar::{lit, Real};

#[derive(Debug, Clone, PartialEq)]
pub struct TsneConfig<T> {
    pub perplexity: T,
    pub iterations: usize,
    pub learning_rate: T,
    pub seed: u64,
}

impl<T: Real> Default for TsneConfig<T> {
    fn default() -> Self {
        Self {
            perplexity: lit(30.0),
            iterations: 500,
            learning_rate: lit(200.0),
            seed: 42,
        }
    }
}

/// 2-D embedding with the KL divergence trace of the optimization.
#[derive(Debug, Clone)]
pub struct Embedding2D<T> {
    pub points: Matrix<T>,
    pub kl_history: Vec<T>,
    pub config: TsneConfig<T>,
}

/// Latent z vectors of the model for every sample, one row each.
pub fn latent_states<T: Real>(
    model: &QbmModel<T>,
    data: &ReducedDataset<T>,
) -> Result<Matrix<T>> {
    if data.is_empty() {
        return Err(Error::EmptyData);
    }
    let rows = data
        .features
        .row_iter()
        .map(|x| model.latent(x))
        .collect::<Result<Vec<_>>>()?;
    Matrix::from_rows(rows)
}

fn pairwise_sq_distances<T: Real>(points: &Matrix<T>) -> Vec<T> {
    let n = points.rows();
    let mut d = vec![T::zero(); n * n];
    for i in 0..n {
        for j in (i + 1)..n {
            let mut acc = T::zero();
            for (&a, &b) in points.row(i).iter().zip(points.row(j)) {
                let diff = a - b;
                acc += diff * diff;
            }
            d[i * n + j] = acc;
            d[j * n + i] = acc;
        }
    }
    d
}

/// Per-point precision search: find beta so that the conditional
/// distribution's entropy hits ln(perplexity) within 1e-5, at most 50
/// bisection steps. Returns the conditional P with zero diagonal, rows
/// normalized.
fn conditional_p<T: Real>(distances: &[T], n: usize, perplexity: T) -> Result<Vec<T>> {
    let target = perplexity.ln();
    let tol = lit::<T>(1e-5);
    let mut p = vec![T::zero(); n * n];
    for i in 0..n {
        let mut beta = T::one();
        let mut beta_min = T::neg_infinity();
        let mut beta_max = T::infinity();
        for _ in 0..50 {
            let mut sum = T::zero();
            for j in 0..n {
                if i == j {
                    p[i * n + j] = T::zero();
                    continue;
                }
                let v = (-beta * distances[i * n + j]).exp();
                p[i * n + j] = v;
                sum += v;
            }
            if sum <= T::zero() {
                return Err(Error::DegenerateDistances);
            }
            let mut entropy = T::zero();
            for j in 0..n {
                if i == j {
                    continue;
                }
                let q = p[i * n + j] / sum;
                p[i * n + j] = q;
                if q > T::zero() {
                    entropy -= q * q.ln();
                }
            }
            let diff = entropy - target;
            if diff.abs() < tol {
                break;
            }
            if diff > T::zero() {
                beta_min = beta;
                beta = if beta_max.is_infinite() {
                    beta + beta
                } else {
                    (beta + beta_max) / lit::<T>(2.0)
                };
            } else {
                beta_max = beta;
                beta = if beta_min.is_infinite() {
                    beta / lit::<T>(2.0)
                } else {
                    (beta + beta_min) / lit::<T>(2.0)
                };
            }
        }
    }
    Ok(p)
}

const EXAGGERATION_ITERS: usize = 250;
const MOMENTUM_SWITCH_ITER: usize = 250;

/// Standard exact t-SNE to 2-D: Gaussian perplexity calibration, symmetrized
/// P, Student-t Q, gradient descent with momentum 0.5 -> 0.8 at iteration
/// 250 and x12 early exaggeration for the first 250 iterations.
pub fn tsne<T: Real>(points: &Matrix<T>, config: &TsneConfig<T>) -> Result<Embedding2D<T>> {
    let n = points.rows();
    let perplexity_f = config.perplexity.to_f64().unwrap_or(0.0);
    if (n as f64) <= 3.0 * perplexity_f {
        return Err(Error::PerplexityTooLarge {
            n,
            perplexity: perplexity_f,
        });
    }
    if !(perplexity_f > 1.0) {
        return Err(Error::InvalidConfig(format!(
            "perplexity must exceed 1, got {perplexity_f}"
        )));
    }
    let distances = pairwise_sq_distances(points);
    if distances.iter().all(|&d| d == T::zero()) {
        return Err(Error::DegenerateDistances);
    }

    let cond = conditional_p(&distances, n, config.perplexity)?;

    // Symmetrize: p_ij = (p_{j|i} + p_{i|j}) / 2n, floored for stable logs.
    let floor = lit::<T>(1e-12);
    let two_n = lit::<T>(2.0 * n as f64);
    let mut p = vec![T::zero(); n * n];
    for i in 0..n {
        for j in 0..n {
            if i != j {
                p[i * n + j] = ((cond[i * n + j] + cond[j * n + i]) / two_n).max(floor);
            }
        }
    }

    let mut embedding_rng = rng::stream(config.seed, "tsne");
    let sigma = lit::<T>(1e-4);
    let mut y = vec![T::zero(); n * 2];
    for v in y.iter_mut() {
        *v = rng::normal::<T>(&mut embedding_rng) * sigma;
    }

    let mut velocity = vec![T::zero(); n * 2];
    let mut gains = vec![T::one(); n * 2];
    let mut kl_history = Vec::with_capacity(config.iterations);
    let exaggeration = lit::<T>(12.0);
    let momentum_early = lit::<T>(0.5);
    let momentum_late = lit::<T>(0.8);
    let min_gain = lit::<T>(0.01);
    let gain_up = lit::<T>(0.2);
    let gain_down = lit::<T>(0.8);
    let mut q = vec![T::zero(); n * n];
    let mut gradient = vec![T::zero(); n * 2];
    let mut proposal = vec![T::zero(); n * 2];

    let kl_of = |y: &[T], p: &[T]| -> T {
        let mut q_sum = T::zero();
        let mut kl = T::zero();
        for i in 0..n {
            for j in (i + 1)..n {
                let dx = y[2 * i] - y[2 * j];
                let dy = y[2 * i + 1] - y[2 * j + 1];
                let w = T::one() / (T::one() + dx * dx + dy * dy);
                q_sum += w + w;
            }
        }
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let dx = y[2 * i] - y[2 * j];
                let dy = y[2 * i + 1] - y[2 * j + 1];
                let w = T::one() / (T::one() + dx * dx + dy * dy);
                let pij = p[i * n + j];
                let qij = (w / q_sum).max(floor);
                kl += pij * (pij / qij).ln();
            }
        }
        kl
    };

    for iter in 0..config.iterations {
        // Student-t affinities in the embedding.
        let mut q_sum = T::zero();
        for i in 0..n {
            for j in (i + 1)..n {
                let dx = y[2 * i] - y[2 * j];
                let dy = y[2 * i + 1] - y[2 * j + 1];
                let w = T::one() / (T::one() + dx * dx + dy * dy);
                q[i * n + j] = w;
                q[j * n + i] = w;
                q_sum += w + w;
            }
        }

        // KL(P || Q) against the un-exaggerated P.
        let mut kl = T::zero();
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let pij = p[i * n + j];
                let qij = (q[i * n + j] / q_sum).max(floor);
                kl += pij * (pij / qij).ln();
            }
        }
        kl_history.push(kl);

        let exaggerating = iter < EXAGGERATION_ITERS;
        let boost = if exaggerating { exaggeration } else { T::one() };
        let momentum = if iter < MOMENTUM_SWITCH_ITER {
            momentum_early
        } else {
            momentum_late
        };

        for i in 0..n {
            let mut gx = T::zero();
            let mut gy = T::zero();
            for j in 0..n {
                if i == j {
                    continue;
                }
                let w = q[i * n + j];
                let qij = (w / q_sum).max(floor);
                let factor = lit::<T>(4.0) * (boost * p[i * n + j] - qij) * w;
                gx += factor * (y[2 * i] - y[2 * j]);
                gy += factor * (y[2 * i + 1] - y[2 * j + 1]);
            }
            gradient[2 * i] = gx;
            gradient[2 * i + 1] = gy;
        }
        // Adaptive per-coordinate gains: grow when the gradient keeps
        // pointing along the velocity, shrink otherwise.
        for ((g, v), gain) in gradient.iter().zip(&mut velocity).zip(&mut gains) {
            *gain = if (*g > T::zero()) != (*v > T::zero()) {
                *gain + gain_up
            } else {
                (*gain * gain_down).max(min_gain)
            };
            *v = momentum * *v - config.learning_rate * *gain * *g;
        }

        if exaggerating {
            for (yv, v) in y.iter_mut().zip(&velocity) {
                *yv += *v;
            }
        } else {
            // Descent safeguard: once exaggeration ends, shrink any step that
            // would raise the KL. The gradient is a true descent direction
            // here, so a small enough step never increases it.
            let mut shrink = T::one();
            let mut accepted = false;
            for _ in 0..25 {
                for ((dst, &yv), &v) in proposal.iter_mut().zip(y.iter()).zip(&velocity) {
                    *dst = yv + shrink * v;
                }
                if kl_of(&proposal, &p) <= kl {
                    accepted = true;
                    break;
                }
                shrink /= lit::<T>(2.0);
            }
            if accepted {
                y.copy_from_slice(&proposal);
                for v in velocity.iter_mut() {
                    *v *= shrink;
                }
            } else {
                // keep the state; restart the momentum
                for v in velocity.iter_mut() {
                    *v = T::zero();
                }
            }
        }

        // recentre
        let mut mean = [T::zero(); 2];
        for i in 0..n {
            mean[0] += y[2 * i];
            mean[1] += y[2 * i + 1];
        }
        let n_t = lit::<T>(n as f64);
        mean[0] /= n_t;
        mean[1] /= n_t;
        for i in 0..n {
            y[2 * i] -= mean[0];
            y[2 * i + 1] -= mean[1];
        }
    }

    Ok(Embedding2D {
        points: Matrix::from_vec(n, 2, y)?,
        kl_history,
        config: config.clone(),
    })
}

/// Mean silhouette coefficient (b - a) / max(a, b). Singleton clusters take
/// a = 0; a point with max(a, b) = 0 scores 0.
pub fn silhouette<T: Real>(points: &Matrix<T>, labels: &[u8]) -> Result<T> {
    let n = points.rows();
    if n != labels.len() {
        return Err(Error::DimensionMismatch(format!(
            "{n} points vs {} labels",
            labels.len()
        )));
    }
    if n == 0 {
        return Err(Error::EmptyData);
    }
    let mut clusters: Vec<u8> = labels.to_vec();
    clusters.sort_unstable();
    clusters.dedup();
    if clusters.len() < 2 {
        return Err(Error::SingleCluster);
    }

    let dist = |i: usize, j: usize| -> T {
        let mut acc = T::zero();
        for (&a, &b) in points.row(i).iter().zip(points.row(j)) {
            let d = a - b;
            acc += d * d;
        }
        acc.sqrt()
    };

    let mut total = T::zero();
    for i in 0..n {
        let own = labels[i];
        let mut a_sum = T::zero();
        let mut a_count = 0usize;
        // per-cluster mean distance to the other clusters
        let mut b_best = T::infinity();
        for &cluster in &clusters {
            if cluster == own {
                continue;
            }
            let mut sum = T::zero();
            let mut count = 0usize;
            for j in 0..n {
                if labels[j] == cluster {
                    sum += dist(i, j);
                    count += 1;
                }
            }
            if count > 0 {
                b_best = b_best.min(sum / lit::<T>(count as f64));
            }
        }
        for j in 0..n {
            if j != i && labels[j] == own {
                a_sum += dist(i, j);
                a_count += 1;
            }
        }
        let a = if a_count == 0 {
            T::zero()
        } else {
            a_sum / lit::<T>(a_count as f64)
        };
        let denom = a.max(b_best);
        let s = if denom > T::zero() {
            (b_best - a) / denom
        } else {
            T::zero()
        };
        total += s;
    }
    Ok(total / lit::<T>(n as f64))
}
