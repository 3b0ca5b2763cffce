//! Versioned flat binary artifacts shared by the CLI stages. All numbers are
//! little-endian; floats are stored as f64 bit patterns so artifacts round
//! trip exactly.

use std::path::Path;

use crate::cbm::{CbmConfig, RbmParams, RbmReadout};
use crate::error::{Error, Result};
use crate::fingerprint::fnv1a64;
use crate::matrix::Matrix;
use crate::pca::{BinaryDataset, PcaModel, ReducedDataset};
use crate::qbm::{QbmConfig, QbmModel};
use crate::qsim::CircuitParams;

pub const MAGIC: [u8; 4] = *b"QXAI";
pub const VERSION: u8 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u8)]
pub enum Kind {
    PcaModel = 1,
    ReducedDataset = 2,
    BinaryDataset = 3,
    QbmModel = 4,
    CbmModel = 5,
}

struct Writer(Vec<u8>);

impl Writer {
    fn new(kind: Kind) -> Self {
        let mut buf = Vec::new();
        buf.extend_from_slice(&MAGIC);
        buf.push(VERSION);
        buf.push(kind as u8);
        Self(buf)
    }

    fn u64(&mut self, v: u64) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }

    fn usize(&mut self, v: usize) {
        self.u64(v as u64);
    }

    fn f64(&mut self, v: f64) {
        self.0.extend_from_slice(&v.to_bits().to_le_bytes());
    }

    fn f64_slice(&mut self, vs: &[f64]) {
        self.usize(vs.len());
        for &v in vs {
            self.f64(v);
        }
    }

    fn u8_slice(&mut self, vs: &[u8]) {
        self.usize(vs.len());
        self.0.extend_from_slice(vs);
    }

    fn matrix(&mut self, m: &Matrix<f64>) {
        self.usize(m.rows());
        self.usize(m.cols());
        for &v in m.data() {
            self.f64(v);
        }
    }

    fn bit_matrix(&mut self, m: &Matrix<u8>) {
        self.usize(m.rows());
        self.usize(m.cols());
        self.0.extend_from_slice(m.data());
    }

    fn finish(self) -> Vec<u8> {
        self.0
    }
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn new(bytes: &'a [u8], kind: Kind) -> Result<Self, String> {
        if bytes.len() < 6 {
            return Err("artifact shorter than its header".into());
        }
        if bytes[..4] != MAGIC {
            return Err("bad artifact magic".into());
        }
        if bytes[4] != VERSION {
            return Err(format!("unsupported artifact version {}", bytes[4]));
        }
        if bytes[5] != kind as u8 {
            return Err(format!(
                "artifact kind {} where {} was expected",
                bytes[5], kind as u8
            ));
        }
        Ok(Self { bytes, pos: 6 })
    }

    fn take(&mut self, n: usize) -> Result<&'a [u8], String> {
        if self.pos + n > self.bytes.len() {
            return Err("artifact truncated".into());
        }
        let s = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn u64(&mut self) -> Result<u64, String> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn usize(&mut self) -> Result<usize, String> {
        Ok(self.u64()? as usize)
    }

    fn f64(&mut self) -> Result<f64, String> {
        Ok(f64::from_bits(u64::from_le_bytes(
            self.take(8)?.try_into().unwrap(),
        )))
    }

    fn f64_vec(&mut self) -> Result<Vec<f64>, String> {
        let n = self.usize()?;
        (0..n).map(|_| self.f64()).collect()
    }

    fn u8_vec(&mut self) -> Result<Vec<u8>, String> {
        let n = self.usize()?;
        Ok(self.take(n)?.to_vec())
    }

    fn matrix(&mut self) -> Result<Matrix<f64>, String> {
        let rows = self.usize()?;
        let cols = self.usize()?;
        let data = (0..rows * cols)
            .map(|_| self.f64())
            .collect::<Result<Vec<_>, _>>()?;
        Matrix::from_vec(rows, cols, data).map_err(|e| e.to_string())
    }

    fn bit_matrix(&mut self) -> Result<Matrix<u8>, String> {
        let rows = self.usize()?;
        let cols = self.usize()?;
        let data = self.take(rows * cols)?.to_vec();
        Matrix::from_vec(rows, cols, data).map_err(|e| e.to_string())
    }

    fn done(&self) -> Result<(), String> {
        if self.pos != self.bytes.len() {
            return Err("trailing bytes after artifact payload".into());
        }
        Ok(())
    }
}

/// Sign conventions a PCA artifact can carry; only one exists today.
pub const SIGN_CONVENTION_LARGEST_POSITIVE: u8 = 1;

pub fn encode_pca(model: &PcaModel<f64>) -> Vec<u8> {
    let mut w = Writer::new(Kind::PcaModel);
    w.0.push(SIGN_CONVENTION_LARGEST_POSITIVE);
    w.usize(model.k());
    w.f64_slice(&model.mean);
    w.matrix(&model.components);
    w.f64_slice(&model.eigenvalues);
    w.finish()
}

pub fn decode_pca(bytes: &[u8]) -> Result<PcaModel<f64>, String> {
    let mut r = Reader::new(bytes, Kind::PcaModel)?;
    let tag = r.take(1)?[0];
    if tag != SIGN_CONVENTION_LARGEST_POSITIVE {
        return Err(format!("unknown sign-convention tag {tag}"));
    }
    let k = r.usize()?;
    let mean = r.f64_vec()?;
    let components = r.matrix()?;
    let eigenvalues = r.f64_vec()?;
    r.done()?;
    if components.rows() != k {
        return Err(format!(
            "component count {} disagrees with stored k = {k}",
            components.rows()
        ));
    }
    Ok(PcaModel {
        mean,
        components,
        eigenvalues,
    })
}

pub fn encode_reduced(data: &ReducedDataset<f64>) -> Vec<u8> {
    let mut w = Writer::new(Kind::ReducedDataset);
    w.matrix(&data.features);
    w.u8_slice(&data.labels);
    w.u64(data.model_fingerprint);
    w.finish()
}

pub fn decode_reduced(bytes: &[u8]) -> Result<ReducedDataset<f64>, String> {
    let mut r = Reader::new(bytes, Kind::ReducedDataset)?;
    let features = r.matrix()?;
    let labels = r.u8_vec()?;
    let model_fingerprint = r.u64()?;
    r.done()?;
    Ok(ReducedDataset {
        features,
        labels,
        model_fingerprint,
    })
}

pub fn encode_binary(data: &BinaryDataset<f64>) -> Vec<u8> {
    let mut w = Writer::new(Kind::BinaryDataset);
    w.bit_matrix(&data.bits);
    w.f64_slice(&data.thresholds);
    w.u8_slice(&data.labels);
    w.finish()
}

pub fn decode_binary(bytes: &[u8]) -> Result<BinaryDataset<f64>, String> {
    let mut r = Reader::new(bytes, Kind::BinaryDataset)?;
    let bits = r.bit_matrix()?;
    let thresholds = r.f64_vec()?;
    let labels = r.u8_vec()?;
    r.done()?;
    Ok(BinaryDataset {
        bits,
        thresholds,
        labels,
    })
}

pub fn encode_qbm(model: &QbmModel<f64>, config: &QbmConfig<f64>) -> Vec<u8> {
    let mut w = Writer::new(Kind::QbmModel);
    w.u64(config.seed);
    w.usize(config.epochs);
    w.f64(config.lr);
    w.usize(config.batch_size.unwrap_or(0));
    w.usize(model.circuit.layers());
    w.usize(model.circuit.qubits());
    w.usize(model.circuit.entangle_range());
    w.f64_slice(model.circuit.theta());
    w.f64_slice(&model.readout_weights);
    w.f64(model.readout_bias);
    w.usize(model.input_scaler.len());
    for &(lo, hi) in &model.input_scaler {
        w.f64(lo);
        w.f64(hi);
    }
    w.finish()
}

pub fn decode_qbm(bytes: &[u8]) -> Result<(QbmModel<f64>, QbmConfig<f64>), String> {
    let mut r = Reader::new(bytes, Kind::QbmModel)?;
    let seed = r.u64()?;
    let epochs = r.usize()?;
    let lr = r.f64()?;
    let batch = r.usize()?;
    let layers = r.usize()?;
    let qubits = r.usize()?;
    let entangle_range = r.usize()?;
    let theta = r.f64_vec()?;
    let circuit =
        CircuitParams::new(layers, qubits, entangle_range, theta).map_err(|e| e.to_string())?;
    let readout_weights = r.f64_vec()?;
    let readout_bias = r.f64()?;
    let k = r.usize()?;
    let mut input_scaler = Vec::with_capacity(k);
    for _ in 0..k {
        let lo = r.f64()?;
        let hi = r.f64()?;
        input_scaler.push((lo, hi));
    }
    r.done()?;
    let config = QbmConfig {
        epochs,
        lr,
        batch_size: if batch == 0 { None } else { Some(batch) },
        layers,
        entangle_range,
        seed,
    };
    Ok((
        QbmModel {
            circuit,
            readout_weights,
            readout_bias,
            input_scaler,
        },
        config,
    ))
}

pub fn encode_cbm(
    params: &RbmParams<f64>,
    readout: &RbmReadout<f64>,
    config: &CbmConfig<f64>,
) -> Vec<u8> {
    let mut w = Writer::new(Kind::CbmModel);
    w.u64(config.seed);
    w.usize(config.epochs);
    w.f64(config.lr);
    w.matrix(&params.weights);
    w.f64_slice(&params.visible_bias);
    w.f64_slice(&params.hidden_bias);
    w.f64_slice(&readout.weights);
    w.f64(readout.bias);
    w.finish()
}

pub type DecodedCbm = (RbmParams<f64>, RbmReadout<f64>, CbmConfig<f64>);

pub fn decode_cbm(bytes: &[u8]) -> Result<DecodedCbm, String> {
    let mut r = Reader::new(bytes, Kind::CbmModel)?;
    let seed = r.u64()?;
    let epochs = r.usize()?;
    let lr = r.f64()?;
    let weights = r.matrix()?;
    let visible_bias = r.f64_vec()?;
    let hidden_bias = r.f64_vec()?;
    let readout_weights = r.f64_vec()?;
    let readout_bias = r.f64()?;
    r.done()?;
    let n_hidden = weights.cols();
    Ok((
        RbmParams {
            weights,
            visible_bias,
            hidden_bias,
        },
        RbmReadout {
            weights: readout_weights,
            bias: readout_bias,
        },
        CbmConfig {
            epochs,
            lr,
            n_hidden,
            seed,
        },
    ))
}

pub fn fingerprint(bytes: &[u8]) -> u64 {
    fnv1a64(bytes)
}

pub fn fingerprint_hex(bytes: &[u8]) -> String {
    format!("{:016x}", fnv1a64(bytes))
}

/// Write an artifact file, wrapping I/O failures with the path.
pub fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    std::fs::write(path, bytes).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Read an artifact file; a missing file reports `MissingArtifact`.
pub fn read_file(path: &Path) -> Result<Vec<u8>> {
    match std::fs::read(path) {
        Ok(bytes) => Ok(bytes),
        Err(source) if source.kind() == std::io::ErrorKind::NotFound => {
            Err(Error::MissingArtifact {
                path: path.to_path_buf(),
            })
        }
        Err(source) => Err(Error::Io {
            path: path.to_path_buf(),
            source,
        }),
    }
}

/// Attach a path to a decode failure.
pub fn decode_err(path: &Path, reason: String) -> Error {
    Error::BadArtifact {
        path: path.to_path_buf(),
        reason,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pca_round_trip() {
        let model = PcaModel {
            mean: vec![0.5, -1.0, 2.0],
            components: Matrix::from_rows(vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]]).unwrap(),
            eigenvalues: vec![2.0, 1.0],
        };
        let bytes = encode_pca(&model);
        let back = decode_pca(&bytes).unwrap();
        assert_eq!(back.mean, model.mean);
        assert_eq!(back.components, model.components);
        assert_eq!(back.eigenvalues, model.eigenvalues);
        assert_eq!(fingerprint(&bytes), fingerprint(&encode_pca(&back)));
    }

    #[test]
    fn qbm_round_trip() {
        let model = QbmModel {
            circuit: CircuitParams::new(2, 4, 1, vec![0.25; 24]).unwrap(),
            readout_weights: vec![0.1, -0.2, 0.3, -0.4],
            readout_bias: 0.05,
            input_scaler: vec![(0.0, 1.0), (-1.0, 1.0), (2.0, 3.0), (0.0, 0.5)],
        };
        let config = QbmConfig { seed: 99, epochs: 12, batch_size: None, ..QbmConfig::default() };
        let bytes = encode_qbm(&model, &config);
        let (back, config_back) = decode_qbm(&bytes).unwrap();
        assert_eq!(config_back, config);
        assert_eq!(back, model);
    }

    #[test]
    fn cbm_round_trip() {
        let params = RbmParams {
            weights: Matrix::from_rows(vec![vec![0.1, -0.1]; 4]).unwrap(),
            visible_bias: vec![0.0, 0.5, -0.5, 1.0],
            hidden_bias: vec![0.2, -0.2],
        };
        let readout = RbmReadout {
            weights: vec![1.0, -1.0],
            bias: 0.3,
        };
        let config = CbmConfig { seed: 7, ..CbmConfig::default() };
        let bytes = encode_cbm(&params, &readout, &config);
        let (p, r, config_back) = decode_cbm(&bytes).unwrap();
        assert_eq!(config_back, config);
        assert_eq!(p, params);
        assert_eq!(r, readout);
    }

    #[test]
    fn dataset_round_trips() {
        let reduced = ReducedDataset {
            features: Matrix::from_rows(vec![vec![0.1, 0.2], vec![0.3, 0.4]]).unwrap(),
            labels: vec![0, 1],
            model_fingerprint: 12345,
        };
        let back = decode_reduced(&encode_reduced(&reduced)).unwrap();
        assert_eq!(back.features, reduced.features);
        assert_eq!(back.labels, reduced.labels);
        assert_eq!(back.model_fingerprint, 12345);

        let binary = BinaryDataset {
            bits: Matrix::from_rows(vec![vec![1u8, 0], vec![0, 1]]).unwrap(),
            thresholds: vec![0.5, -0.5],
            labels: vec![1, 0],
        };
        let back = decode_binary(&encode_binary(&binary)).unwrap();
        assert_eq!(back.bits, binary.bits);
        assert_eq!(back.thresholds, binary.thresholds);
        assert_eq!(back.labels, binary.labels);
    }

    #[test]
    fn wrong_kind_is_rejected() {
        let model = PcaModel {
            mean: vec![0.0],
            components: Matrix::from_rows(vec![vec![1.0]]).unwrap(),
            eigenvalues: vec![1.0],
        };
        let bytes = encode_pca(&model);
        assert!(decode_qbm(&bytes).is_err());
        let mut corrupt = bytes.clone();
        corrupt[0] = b'X';
        assert!(decode_pca(&corrupt).is_err());
        let mut wrong_version = bytes;
        wrong_version[4] = 9;
        assert!(decode_pca(&wrong_version).is_err());
    }
}
