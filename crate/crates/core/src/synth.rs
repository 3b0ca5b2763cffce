//! Synthetic 28x28 digit-style images for offline runs: class 0 renders an
//! elliptical ring, class 1 a slanted stroke. Geometry and a strong global
//! intensity jitter are randomized per image so that no single principal
//! component separates the classes on its own, while the continuous
//! projections stay jointly separable.

use crate::ingest::{write_idx_images, write_idx_labels};
use crate::matrix::Matrix;
use crate::rng;
use crate::scalar::Real;

pub const IMG_SIDE: usize = 28;
pub const IMG_PIXELS: usize = IMG_SIDE * IMG_SIDE;

#[derive(Debug, Clone)]
pub struct SynthConfig {
    pub n_images: usize,
    pub seed: u64,
}

fn render_ring(pixels: &mut [f64], rng: &mut impl rand_chacha::rand_core::RngCore) {
    let cx = 13.5 + rng::uniform_in(rng, -2.5, 2.5);
    let cy = 13.5 + rng::uniform_in(rng, -2.5, 2.5);
    let rx = rng::uniform_in(rng, 4.5, 7.5);
    let ry = rng::uniform_in(rng, 6.0, 9.5);
    let thickness = rng::uniform_in(rng, 1.2, 2.4);
    let r_eff = (rx + ry) / 2.0;
    for y in 0..IMG_SIDE {
        for x in 0..IMG_SIDE {
            let dx = (x as f64 - cx) / rx;
            let dy = (y as f64 - cy) / ry;
            let d = (dx * dx + dy * dy).sqrt();
            let band = (d - 1.0) * r_eff / thickness;
            let v = (1.0 - band * band).max(0.0);
            pixels[y * IMG_SIDE + x] = v;
        }
    }
}

fn render_stroke(pixels: &mut [f64], rng: &mut impl rand_chacha::rand_core::RngCore) {
    let cx = 13.5 + rng::uniform_in(rng, -3.0, 3.0);
    let top = rng::uniform_in(rng, 4.0, 7.0);
    let bottom = rng::uniform_in(rng, 20.0, 24.0);
    let slant = rng::uniform_in(rng, -0.15, 0.3);
    let width = rng::uniform_in(rng, 1.2, 2.4);
    for y in 0..IMG_SIDE {
        let yf = y as f64;
        if yf < top || yf > bottom {
            continue;
        }
        let center = cx + slant * (yf - 14.0);
        for x in 0..IMG_SIDE {
            let band = (x as f64 - center) / width;
            let v = (1.0 - band * band).max(0.0);
            pixels[y * IMG_SIDE + x] = v;
        }
    }
}

/// Alternating-label image set, pixel values quantized to byte resolution so
/// that a write-to-IDX round trip is exact.
pub fn generate<T: Real>(config: &SynthConfig) -> (Matrix<T>, Vec<u8>) {
    let mut rng = rng::stream(config.seed, "synth");
    let mut rows = Vec::with_capacity(config.n_images);
    let mut labels = Vec::with_capacity(config.n_images);
    let mut pixels = vec![0.0f64; IMG_PIXELS];
    for i in 0..config.n_images {
        let label = (i % 2) as u8;
        pixels.iter_mut().for_each(|p| *p = 0.0);
        if label == 0 {
            render_ring(&mut pixels, &mut rng);
        } else {
            render_stroke(&mut pixels, &mut rng);
        }
        // Shared intensity jitter: ink mass varies far more within a class
        // than between classes, which keeps the leading component from
        // becoming a clean class separator.
        let intensity = rng::uniform_in(&mut rng, 0.4, 1.0);
        let row: Vec<T> = pixels
            .iter()
            .map(|&p| {
                let byte = (p * intensity * 255.0).round().clamp(0.0, 255.0);
                T::from_f64(byte / 255.0).expect("pixel representable")
            })
            .collect();
        rows.push(row);
        labels.push(label);
    }
    (
        Matrix::from_rows(rows).expect("uniform row lengths"),
        labels,
    )
}

/// Ready-to-write IDX blobs (images, labels).
pub fn generate_idx(config: &SynthConfig) -> (Vec<u8>, Vec<u8>) {
    let (images, labels) = generate::<f64>(config);
    let image_blob = write_idx_images(&images, IMG_SIDE as u32, IMG_SIDE as u32)
        .expect("square image dimensions");
    let label_blob = write_idx_labels(&labels);
    (image_blob, label_blob)
}
