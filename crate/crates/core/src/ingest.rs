//! IDX image/label parsing, binary digit filtering, and deterministic splits.
//!
//! IDX layout: 4-byte big-endian magic (2051 for images, 2049 for labels),
//! one big-endian u32 per dimension, then the raw u8 payload.

use std::path::Path;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::rng;
use crate::scalar::{lit, Real};

pub const IDX_IMAGE_MAGIC: u32 = 2051;
pub const IDX_LABEL_MAGIC: u32 = 2049;

/// Pixel rows in [0, 1] with binary labels after digit filtering.
#[derive(Debug, Clone)]
pub struct RawDataset<T> {
    pub images: Matrix<T>,
    pub labels: Vec<u8>,
    /// Original digits that were re-coded to class 0 and class 1.
    pub source_digit_map: (u8, u8),
}

impl<T> RawDataset<T> {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

fn read_u32_be(bytes: &[u8], offset: usize) -> Result<u32> {
    let end = offset + 4;
    if bytes.len() < end {
        return Err(Error::TruncatedPayload {
            expected: end,
            found: bytes.len(),
        });
    }
    Ok(u32::from_be_bytes(bytes[offset..end].try_into().unwrap()))
}

/// Parse an IDX image blob into an n x (rows*cols) matrix with each byte
/// divided by 255.
pub fn parse_idx_images<T: Real>(bytes: &[u8]) -> Result<Matrix<T>> {
    let magic = read_u32_be(bytes, 0)?;
    if magic != IDX_IMAGE_MAGIC {
        return Err(Error::BadMagic {
            expected: IDX_IMAGE_MAGIC,
            found: magic,
        });
    }
    let n = read_u32_be(bytes, 4)? as usize;
    let rows = read_u32_be(bytes, 8)? as usize;
    let cols = read_u32_be(bytes, 12)? as usize;
    let payload = &bytes[16..];
    let expected = n * rows * cols;
    if payload.len() != expected {
        return Err(Error::TruncatedPayload {
            expected,
            found: payload.len(),
        });
    }
    let data = payload
        .iter()
        .map(|&b| lit::<T>(f64::from(b) / 255.0))
        .collect();
    Matrix::from_vec(n, rows * cols, data)
}

/// Parse an IDX label blob into raw byte labels.
pub fn parse_idx_labels(bytes: &[u8]) -> Result<Vec<u8>> {
    let magic = read_u32_be(bytes, 0)?;
    if magic != IDX_LABEL_MAGIC {
        return Err(Error::BadMagic {
            expected: IDX_LABEL_MAGIC,
            found: magic,
        });
    }
    let n = read_u32_be(bytes, 4)? as usize;
    let payload = &bytes[8..];
    if payload.len() != n {
        return Err(Error::TruncatedPayload {
            expected: n,
            found: payload.len(),
        });
    }
    Ok(payload.to_vec())
}

fn read_file(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn load_idx_images<T: Real>(path: &Path) -> Result<Matrix<T>> {
    parse_idx_images(&read_file(path)?)
}

pub fn load_idx_labels(path: &Path) -> Result<Vec<u8>> {
    parse_idx_labels(&read_file(path)?)
}

/// Serialize normalized pixels back to IDX bytes. Pixels are rounded to the
/// nearest byte, so a parse -> write round trip is exact.
pub fn write_idx_images<T: Real>(
    images: &Matrix<T>,
    img_rows: u32,
    img_cols: u32,
) -> Result<Vec<u8>> {
    if (img_rows * img_cols) as usize != images.cols() {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} pixels do not fill {} columns",
            img_rows,
            img_cols,
            images.cols()
        )));
    }
    let mut out = Vec::with_capacity(16 + images.rows() * images.cols());
    out.extend_from_slice(&IDX_IMAGE_MAGIC.to_be_bytes());
    out.extend_from_slice(&(images.rows() as u32).to_be_bytes());
    out.extend_from_slice(&img_rows.to_be_bytes());
    out.extend_from_slice(&img_cols.to_be_bytes());
    for &p in images.data() {
        let b = (p.to_f64().unwrap_or(0.0) * 255.0).round().clamp(0.0, 255.0);
        out.push(b as u8);
    }
    Ok(out)
}

pub fn write_idx_labels(labels: &[u8]) -> Vec<u8> {
    let mut out = Vec::with_capacity(8 + labels.len());
    out.extend_from_slice(&IDX_LABEL_MAGIC.to_be_bytes());
    out.extend_from_slice(&(labels.len() as u32).to_be_bytes());
    out.extend_from_slice(labels);
    out
}

/// Keep only rows labelled with the two requested digits, re-coding them to
/// 0 and 1. Row order is preserved.
pub fn filter_binary<T: Real>(
    images: &Matrix<T>,
    labels: &[u8],
    keep: (u8, u8),
) -> Result<RawDataset<T>> {
    if images.rows() != labels.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} image rows vs {} labels",
            images.rows(),
            labels.len()
        )));
    }
    let mut kept_rows = Vec::new();
    let mut kept_labels = Vec::new();
    for (row, &label) in images.row_iter().zip(labels) {
        let recoded = if label == keep.0 {
            0
        } else if label == keep.1 {
            1
        } else {
            continue;
        };
        kept_rows.push(row.to_vec());
        kept_labels.push(recoded);
    }
    if kept_labels.is_empty() {
        return Err(Error::EmptyResult);
    }
    Ok(RawDataset {
        images: Matrix::from_rows(kept_rows)?,
        labels: kept_labels,
        source_digit_map: keep,
    })
}

/// Deterministic seeded shuffle-and-split. Both sides must retain at least
/// one sample of each class.
pub fn split<T: Real>(
    dataset: &RawDataset<T>,
    train_fraction: f64,
    seed: u64,
) -> Result<(RawDataset<T>, RawDataset<T>)> {
    if dataset.is_empty() {
        return Err(Error::EmptyData);
    }
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(Error::InvalidConfig(format!(
            "train fraction must lie in (0, 1), got {train_fraction}"
        )));
    }
    let n = dataset.len();
    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = rng::stream(seed, "split");
    rng::shuffle(&mut rng, &mut order);
    let n_train = (train_fraction * n as f64).round() as usize;
    if n_train == 0 || n_train == n {
        return Err(Error::DegenerateSplit);
    }
    let take = |idx: &[usize]| -> Result<RawDataset<T>> {
        let rows = idx.iter().map(|&i| dataset.images.row(i).to_vec()).collect();
        let labels: Vec<u8> = idx.iter().map(|&i| dataset.labels[i]).collect();
        Ok(RawDataset {
            images: Matrix::from_rows(rows)?,
            labels,
            source_digit_map: dataset.source_digit_map,
        })
    };
    let train = take(&order[..n_train])?;
    let test = take(&order[n_train..])?;
    let has_both = |labels: &[u8]| labels.contains(&0) && labels.contains(&1);
    if !has_both(&train.labels) || !has_both(&test.labels) {
        return Err(Error::DegenerateSplit);
    }
    Ok((train, test))
}
