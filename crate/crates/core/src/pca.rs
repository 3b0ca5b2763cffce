//! Principal component fitting, projection, and median binarization.

use crate::error::{Error, Result};
use crate::fingerprint::Fnv1a;
use crate::linalg::symmetric_eigen;
use crate::matrix::Matrix;
use crate::scalar::{lit, Real};

/// Mean vector plus the top-k orthonormal components of the training
/// covariance, eigenvalues in non-increasing order.
///
/// Sign convention: within each component the entry of largest magnitude is
/// positive, making fits reproducible (the eigenvector sign is otherwise
/// free).
#[derive(Debug, Clone)]
pub struct PcaModel<T> {
    pub mean: Vec<T>,
    /// k x d, one component per row.
    pub components: Matrix<T>,
    pub eigenvalues: Vec<T>,
}

impl<T: Real> PcaModel<T> {
    pub fn k(&self) -> usize {
        self.components.rows()
    }

    pub fn dim(&self) -> usize {
        self.components.cols()
    }

    /// Stable fingerprint over the model's f64 bit patterns.
    pub fn fingerprint(&self) -> u64 {
        let mut h = Fnv1a::new();
        h.update(&(self.k() as u64).to_le_bytes());
        h.update(&(self.dim() as u64).to_le_bytes());
        for x in self
            .mean
            .iter()
            .chain(self.components.data())
            .chain(self.eigenvalues.iter())
        {
            h.update(&x.to_f64().unwrap_or(f64::NAN).to_bits().to_le_bytes());
        }
        h.finish()
    }
}

/// Projected features with their class labels.
#[derive(Debug, Clone)]
pub struct ReducedDataset<T> {
    /// n x k projection matrix.
    pub features: Matrix<T>,
    pub labels: Vec<u8>,
    pub model_fingerprint: u64,
}

impl<T> ReducedDataset<T> {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

/// Median-thresholded bits with their class labels.
#[derive(Debug, Clone)]
pub struct BinaryDataset<T> {
    /// n x k bit matrix, entries exactly 0 or 1.
    pub bits: Matrix<u8>,
    pub thresholds: Vec<T>,
    pub labels: Vec<u8>,
}

impl<T> BinaryDataset<T> {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

/// Fit the top-k principal components of the sample covariance of `x`
/// (rows are observations), centering by the column means.
pub fn fit_pca<T: Real>(x: &Matrix<T>, k: usize) -> Result<PcaModel<T>> {
    let n = x.rows();
    let d = x.cols();
    if k == 0 || k > d {
        return Err(Error::InvalidConfig(format!(
            "component count k={k} must lie in 1..={d}"
        )));
    }
    if n < k.max(2) {
        return Err(Error::InvalidConfig(format!(
            "need at least {} samples to fit k={k} components, got {n}",
            k.max(2)
        )));
    }
    if x.data().iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite);
    }

    let n_t = lit::<T>(n as f64);
    let mut mean = vec![T::zero(); d];
    for row in x.row_iter() {
        for (m, &v) in mean.iter_mut().zip(row) {
            *m += v;
        }
    }
    for m in mean.iter_mut() {
        *m /= n_t;
    }

    // Sample covariance of the centered data, built on the upper triangle.
    let denom = lit::<T>((n - 1) as f64);
    let mut cov = Matrix::zeros(d, d);
    let mut centered_row = vec![T::zero(); d];
    for row in x.row_iter() {
        for ((c, &v), &m) in centered_row.iter_mut().zip(row).zip(&mean) {
            *c = v - m;
        }
        for i in 0..d {
            let ci = centered_row[i];
            if ci == T::zero() {
                continue;
            }
            let dest = &mut cov.row_mut(i)[i..];
            for (dst, &cj) in dest.iter_mut().zip(&centered_row[i..]) {
                *dst += ci * cj;
            }
        }
    }
    for i in 0..d {
        for j in i..d {
            let v = cov[(i, j)] / denom;
            cov[(i, j)] = v;
            cov[(j, i)] = v;
        }
    }

    let eig = symmetric_eigen(&cov)?;
    let trace: T = (0..d).map(|i| cov[(i, i)]).sum();
    let tol = lit::<T>(1e-12) * trace.abs();
    let usable = eig.values.iter().filter(|&&v| v > tol).count();
    if usable < k {
        return Err(Error::RankDeficient { k });
    }

    let mut components = Matrix::zeros(k, d);
    let mut eigenvalues = Vec::with_capacity(k);
    for c in 0..k {
        eigenvalues.push(eig.values[c].max(T::zero()));
        let src = eig.vectors.row(c);
        // Sign rule: the entry of largest magnitude ends up positive.
        let mut lead = 0;
        for (j, v) in src.iter().enumerate() {
            if v.abs() > src[lead].abs() {
                lead = j;
            }
        }
        let flip = src[lead] < T::zero();
        for (dst, &v) in components.row_mut(c).iter_mut().zip(src) {
            *dst = if flip { -v } else { v };
        }
    }

    Ok(PcaModel {
        mean,
        components,
        eigenvalues,
    })
}

/// Project rows of `x` onto the fitted components: (x - mean) * components^T.
pub fn transform<T: Real>(model: &PcaModel<T>, x: &Matrix<T>) -> Result<Matrix<T>> {
    if x.cols() != model.dim() {
        return Err(Error::DimensionMismatch(format!(
            "input has {} columns, model expects {}",
            x.cols(),
            model.dim()
        )));
    }
    let k = model.k();
    let mut out = Matrix::zeros(x.rows(), k);
    for (r, row) in x.row_iter().enumerate() {
        for c in 0..k {
            let comp = model.components.row(c);
            let mut acc = T::zero();
            for ((&v, &m), &w) in row.iter().zip(&model.mean).zip(comp) {
                acc += (v - m) * w;
            }
            out[(r, c)] = acc;
        }
    }
    Ok(out)
}

/// Per-feature median of the training projection; the even case averages the
/// middle pair.
pub fn fit_thresholds<T: Real>(z: &Matrix<T>) -> Result<Vec<T>> {
    if z.rows() == 0 {
        return Err(Error::EmptyData);
    }
    let n = z.rows();
    let mut thresholds = Vec::with_capacity(z.cols());
    let mut column = vec![T::zero(); n];
    for c in 0..z.cols() {
        for (dst, row) in column.iter_mut().zip(z.row_iter()) {
            *dst = row[c];
        }
        column.sort_by(|a, b| a.partial_cmp(b).expect("finite feature"));
        let mid = n / 2;
        let median = if n % 2 == 1 {
            column[mid]
        } else {
            (column[mid - 1] + column[mid]) / lit::<T>(2.0)
        };
        thresholds.push(median);
    }
    Ok(thresholds)
}

/// Bit = 1 iff the feature strictly exceeds its threshold.
pub fn binarize<T: Real>(z: &Matrix<T>, thresholds: &[T]) -> Result<Matrix<u8>> {
    if z.cols() != thresholds.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} features vs {} thresholds",
            z.cols(),
            thresholds.len()
        )));
    }
    let mut bits = Matrix::zeros(z.rows(), z.cols());
    for (r, row) in z.row_iter().enumerate() {
        for (c, (&v, &t)) in row.iter().zip(thresholds).enumerate() {
            bits[(r, c)] = u8::from(v > t);
        }
    }
    Ok(bits)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn matrix(rows: Vec<Vec<f64>>) -> Matrix<f64> {
        Matrix::from_rows(rows).unwrap()
    }

    #[test]
    fn axis_aligned_single_component() {
        // Variance only along coordinate 0.
        let x = matrix(vec![
            vec![1.0, 5.0, 5.0],
            vec![2.0, 5.0, 5.0],
            vec![3.0, 5.0, 5.0],
            vec![4.0, 5.0, 5.0],
        ]);
        let model = fit_pca(&x, 1).unwrap();
        let comp = model.components.row(0);
        assert!((comp[0] - 1.0).abs() < 1e-12);
        assert!(comp[1].abs() < 1e-12 && comp[2].abs() < 1e-12);
        // Sample variance of [1,2,3,4] is 5/3.
        assert!((model.eigenvalues[0] - 5.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn two_dim_covariance_matches_analytic_eigensolve() {
        // Four points in a 5-d space whose first two coordinates have sample
        // covariance [[2,1],[1,2]]: a = 3/2, b = sqrt(3)/2.
        let a = 1.5f64;
        let b = 3.0f64.sqrt() / 2.0;
        let x = matrix(vec![
            vec![a, a, 0.0, 0.0, 0.0],
            vec![-a, -a, 0.0, 0.0, 0.0],
            vec![b, -b, 0.0, 0.0, 0.0],
            vec![-b, b, 0.0, 0.0, 0.0],
        ]);
        let model = fit_pca(&x, 2).unwrap();
        // Analytic 2x2 oracle: eigenvalues 3 and 1, eigenvectors (1,1)/sqrt2
        // and (1,-1)/sqrt2.
        assert!((model.eigenvalues[0] - 3.0).abs() < 1e-10);
        assert!((model.eigenvalues[1] - 1.0).abs() < 1e-10);
        let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
        let c0 = model.components.row(0);
        let c1 = model.components.row(1);
        assert!((c0[0] - inv_sqrt2).abs() < 1e-10);
        assert!((c0[1] - inv_sqrt2).abs() < 1e-10);
        // Sign rule puts the larger-magnitude entry positive.
        assert!((c1[0].abs() - inv_sqrt2).abs() < 1e-10);
        assert!((c1[1].abs() - inv_sqrt2).abs() < 1e-10);
        assert!(c1[0] * c1[1] < 0.0);
        assert!(c1[0] > 0.0 || c1[1] > 0.0);
    }

    #[test]
    fn constant_data_is_rank_deficient() {
        let x = matrix(vec![vec![5.0, 5.0], vec![5.0, 5.0], vec![5.0, 5.0]]);
        assert!(matches!(fit_pca(&x, 1), Err(Error::RankDeficient { k: 1 })));
    }

    #[test]
    fn rejects_non_finite_input() {
        let x = matrix(vec![vec![1.0, f64::NAN], vec![0.0, 1.0]]);
        assert!(matches!(fit_pca(&x, 1), Err(Error::NonFinite)));
    }

    #[test]
    fn transform_of_mean_rows_is_zero() {
        let x = matrix(vec![
            vec![1.0, 2.0, 3.0],
            vec![2.0, 5.0, 3.5],
            vec![3.0, 6.0, 5.0],
        ]);
        let model = fit_pca(&x, 2).unwrap();
        let mean_rows = matrix(vec![model.mean.clone(), model.mean.clone()]);
        let z = transform(&model, &mean_rows).unwrap();
        assert!(z.data().iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn transform_row_along_component_is_unit() {
        let x = matrix(vec![
            vec![1.0, 0.0, 0.0],
            vec![2.0, 1.0, 0.5],
            vec![3.0, 0.5, 1.0],
            vec![4.0, 1.5, 1.5],
        ]);
        let model = fit_pca(&x, 2).unwrap();
        let mut probe = model.mean.clone();
        for (p, &c) in probe.iter_mut().zip(model.components.row(0)) {
            *p += c;
        }
        let z = transform(&model, &matrix(vec![probe])).unwrap();
        assert!((z[(0, 0)] - 1.0).abs() < 1e-12);
        assert!(z[(0, 1)].abs() < 1e-12);
    }

    #[test]
    fn projected_variances_match_eigenvalues() {
        let mut rng = crate::rng::stream(5, "pca-test");
        let rows = (0..40)
            .map(|_| {
                (0..6)
                    .map(|c| {
                        let base: f64 = crate::rng::uniform_in(&mut rng, -1.0, 1.0);
                        base * (c as f64 + 1.0)
                    })
                    .collect()
            })
            .collect();
        let x = matrix(rows);
        let model = fit_pca(&x, 4).unwrap();
        let z = transform(&model, &x).unwrap();
        for c in 0..model.k() {
            let mean: f64 = z.row_iter().map(|r| r[c]).sum::<f64>() / z.rows() as f64;
            assert!(mean.abs() < 1e-9, "projected column mean {mean}");
            let var: f64 = z.row_iter().map(|r| (r[c] - mean).powi(2)).sum::<f64>()
                / (z.rows() - 1) as f64;
            let ev = model.eigenvalues[c];
            assert!(
                (var - ev).abs() <= 1e-6 * ev.max(1.0),
                "column {c}: var {var} vs eigenvalue {ev}"
            );
        }
        // Non-increasing projected variances.
        for w in model.eigenvalues.windows(2) {
            assert!(w[0] >= w[1]);
        }
    }

    #[test]
    fn full_rank_reconstruction() {
        let mut rng = crate::rng::stream(8, "pca-test");
        let rows = (0..8)
            .map(|_| {
                (0..5)
                    .map(|_| crate::rng::uniform_in(&mut rng, -2.0, 2.0))
                    .collect()
            })
            .collect();
        let x = matrix(rows);
        let model = fit_pca(&x, 5).unwrap();
        let z = transform(&model, &x).unwrap();
        // mean + z * components recovers x within 1e-8.
        for (r, row) in x.row_iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                let mut acc = model.mean[j];
                for c in 0..model.k() {
                    acc += z[(r, c)] * model.components[(c, j)];
                }
                assert!((acc - v).abs() < 1e-8, "({r},{j}): {acc} vs {v}");
            }
        }
    }

    #[test]
    fn components_are_orthonormal() {
        let mut rng = crate::rng::stream(13, "pca-test");
        let rows = (0..30)
            .map(|_| {
                (0..7)
                    .map(|_| crate::rng::uniform_in(&mut rng, -1.0, 1.0))
                    .collect()
            })
            .collect();
        let model = fit_pca(&matrix(rows), 4).unwrap();
        for i in 0..model.k() {
            for j in 0..model.k() {
                let dot: f64 = model
                    .components
                    .row(i)
                    .iter()
                    .zip(model.components.row(j))
                    .map(|(a, b)| a * b)
                    .sum();
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((dot - expect).abs() < 1e-9, "({i},{j}) dot {dot}");
            }
        }
    }

    #[test]
    fn transform_rejects_wrong_width() {
        let x = matrix(vec![vec![1.0, 2.0], vec![3.0, 1.0], vec![0.0, 0.5]]);
        let model = fit_pca(&x, 1).unwrap();
        let bad = matrix(vec![vec![1.0, 2.0, 3.0]]);
        assert!(matches!(
            transform(&model, &bad),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn thresholds_are_medians() {
        let z = matrix(vec![vec![1.0], vec![2.0], vec![3.0]]);
        assert_eq!(fit_thresholds(&z).unwrap(), vec![2.0]);
        let z = matrix(vec![vec![1.0], vec![2.0], vec![3.0], vec![4.0]]);
        assert_eq!(fit_thresholds(&z).unwrap(), vec![2.5]);
        let z = matrix(vec![vec![5.0], vec![5.0], vec![5.0]]);
        assert_eq!(fit_thresholds(&z).unwrap(), vec![5.0]);
    }

    #[test]
    fn binarize_is_strict() {
        let z = matrix(vec![vec![0.1, -0.3]]);
        let bits = binarize(&z, &[0.0, 0.0]).unwrap();
        assert_eq!(bits.row(0), &[1, 0]);
        // exactly equal -> 0
        let z = matrix(vec![vec![0.5]]);
        assert_eq!(binarize(&z, &[0.5]).unwrap().row(0), &[0]);
    }

    #[test]
    fn median_bits_are_balanced() {
        let mut rng = crate::rng::stream(21, "pca-test");
        let rows: Vec<Vec<f64>> = (0..31)
            .map(|_| {
                (0..3)
                    .map(|_| crate::rng::uniform_in(&mut rng, -1.0, 1.0))
                    .collect()
            })
            .collect();
        let z = matrix(rows);
        let thresholds = fit_thresholds(&z).unwrap();
        let bits = binarize(&z, &thresholds).unwrap();
        let n = z.rows();
        for c in 0..z.cols() {
            let ones: usize = bits.row_iter().map(|r| r[c] as usize).sum();
            assert!(ones <= n.div_ceil(2), "column {c} has {ones} ones");
        }
    }
}
