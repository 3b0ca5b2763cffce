//! Independent eigensolver oracle: the library's tridiagonalization + QL
//! route is checked against a cyclic Jacobi rotation solver implemented here
//! from scratch, on the covariance of a 10-dimensional synthetic problem.

use qxai_core::matrix::Matrix;
use qxai_core::pca::{fit_pca, transform};
use qxai_core::rng;

/// Cyclic Jacobi: repeatedly zero the largest off-diagonal entries with
/// 2x2 rotations until convergence. Returns eigenvalues in descending order.
fn jacobi_eigenvalues(a: &Matrix<f64>) -> Vec<f64> {
    let n = a.rows();
    let mut m: Vec<Vec<f64>> = (0..n).map(|i| a.row(i).to_vec()).collect();
    for _sweep in 0..100 {
        let mut off = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                off += m[i][j] * m[i][j];
            }
        }
        if off < 1e-24 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                if m[p][q].abs() < 1e-18 {
                    continue;
                }
                let theta = (m[q][q] - m[p][p]) / (2.0 * m[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[k][p];
                    let mkq = m[k][q];
                    m[k][p] = c * mkp - s * mkq;
                    m[k][q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[p][k];
                    let mqk = m[q][k];
                    m[p][k] = c * mpk - s * mqk;
                    m[q][k] = s * mpk + c * mqk;
                }
            }
        }
    }
    let mut values: Vec<f64> = (0..n).map(|i| m[i][i]).collect();
    values.sort_by(|x, y| y.partial_cmp(x).unwrap());
    values
}

fn sample_covariance(x: &Matrix<f64>) -> Matrix<f64> {
    let n = x.rows();
    let d = x.cols();
    let mut mean = vec![0.0; d];
    for row in x.row_iter() {
        for (m, &v) in mean.iter_mut().zip(row) {
            *m += v;
        }
    }
    for m in mean.iter_mut() {
        *m /= n as f64;
    }
    let mut cov = Matrix::<f64>::zeros(d, d);
    for row in x.row_iter() {
        for i in 0..d {
            for j in 0..d {
                cov[(i, j)] += (row[i] - mean[i]) * (row[j] - mean[j]);
            }
        }
    }
    for i in 0..d {
        for j in 0..d {
            cov[(i, j)] /= (n - 1) as f64;
        }
    }
    cov
}

#[test]
fn pca_eigenvalues_match_jacobi_oracle() {
    let mut prng = rng::stream(0xE16, "eigen-oracle");
    let rows: Vec<Vec<f64>> = (0..80)
        .map(|_| {
            (0..10)
                .map(|c| rng::uniform_in(&mut prng, -1.0, 1.0) * (0.3 + c as f64 * 0.4))
                .collect()
        })
        .collect();
    let x = Matrix::from_rows(rows).unwrap();

    let model = fit_pca(&x, 10).unwrap();
    let oracle = jacobi_eigenvalues(&sample_covariance(&x));

    for (i, (got, want)) in model.eigenvalues.iter().zip(&oracle).enumerate() {
        assert!(
            (got - want).abs() < 1e-8,
            "eigenvalue {i}: {got} vs jacobi {want}"
        );
    }

    // the projected variances agree with the oracle eigenvalues as well
    let z = transform(&model, &x).unwrap();
    for c in 0..4 {
        let mean: f64 = z.row_iter().map(|r| r[c]).sum::<f64>() / z.rows() as f64;
        let var: f64 =
            z.row_iter().map(|r| (r[c] - mean).powi(2)).sum::<f64>() / (z.rows() - 1) as f64;
        assert!((var - oracle[c]).abs() < 1e-8, "column {c}: {var} vs {}", oracle[c]);
    }
}
