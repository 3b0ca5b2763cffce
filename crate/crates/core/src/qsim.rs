//! Exact state-vector simulation: angle embedding, entangling rotation
//! layers, and Pauli-Z expectation readout.
//!
//! Conventions, enforced by tests:
//! - qubit 0 is the most significant bit of the amplitude index;
//! - RY(t) = [[cos t/2, -sin t/2], [sin t/2, cos t/2]];
//! - RZ(t) = diag(e^{-it/2}, e^{+it/2});
//! - a layer applies Rot(a,b,c) = RZ(a), then RY(b), then RZ(c) on every
//!   qubit, followed by CNOT(q, (q + r) mod n) for q = 0..n.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{lit, Real};

/// Complex amplitudes of an n-qubit register.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector<T> {
    amps: Vec<Complex<T>>,
    qubits: usize,
}

/// Pauli-Z expectations, one per qubit, each in [-1, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct ExpectationVector<T> {
    pub z: Vec<T>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RotationKind {
    Ry,
    Rz,
}

impl<T: Real> StateVector<T> {
    /// |0...0> on `qubits` wires.
    pub fn zero_state(qubits: usize) -> Self {
        let mut amps = vec![Complex::new(T::zero(), T::zero()); 1 << qubits];
        amps[0] = Complex::new(T::one(), T::zero());
        Self { amps, qubits }
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amps
    }

    pub fn norm_sq(&self) -> T {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    fn qubit_mask(&self, qubit: usize) -> Result<usize> {
        if qubit >= self.qubits {
            return Err(Error::QubitOutOfRange {
                qubit,
                qubits: self.qubits,
            });
        }
        Ok(1 << (self.qubits - 1 - qubit))
    }

    /// Apply RY or RZ on one qubit.
    pub fn apply_rotation(&mut self, qubit: usize, kind: RotationKind, angle: T) -> Result<()> {
        if !angle.is_finite() {
            return Err(Error::NonFiniteAngle);
        }
        let mask = self.qubit_mask(qubit)?;
        let half = angle / lit::<T>(2.0);
        match kind {
            RotationKind::Ry => {
                let (s, c) = half.sin_cos();
                for i in 0..self.amps.len() {
                    if i & mask == 0 {
                        let j = i | mask;
                        let a0 = self.amps[i];
                        let a1 = self.amps[j];
                        self.amps[i] = a0.scale(c) - a1.scale(s);
                        self.amps[j] = a0.scale(s) + a1.scale(c);
                    }
                }
            }
            RotationKind::Rz => {
                let (s, c) = half.sin_cos();
                let phase0 = Complex::new(c, -s);
                let phase1 = Complex::new(c, s);
                for (i, amp) in self.amps.iter_mut().enumerate() {
                    *amp *= if i & mask == 0 { phase0 } else { phase1 };
                }
            }
        }
        Ok(())
    }

    /// Flip the target bit wherever the control bit is set.
    pub fn apply_cnot(&mut self, control: usize, target: usize) -> Result<()> {
        if control == target {
            return Err(Error::SameQubit);
        }
        let cmask = self.qubit_mask(control)?;
        let tmask = self.qubit_mask(target)?;
        for i in 0..self.amps.len() {
            if i & cmask != 0 && i & tmask == 0 {
                self.amps.swap(i, i | tmask);
            }
        }
        Ok(())
    }

    /// z_i = sum_k |a_k|^2 * (+1 if bit i of k is 0, else -1).
    pub fn measure_z(&self) -> Result<ExpectationVector<T>> {
        let norm = self.norm_sq();
        if (norm - T::one()).abs() > T::unit_norm_tolerance() {
            return Err(Error::UnnormalizedState);
        }
        let mut z = vec![T::zero(); self.qubits];
        for (k, amp) in self.amps.iter().enumerate() {
            let p = amp.norm_sqr();
            for (q, zq) in z.iter_mut().enumerate() {
                if k & (1 << (self.qubits - 1 - q)) == 0 {
                    *zq += p;
                } else {
                    *zq -= p;
                }
            }
        }
        Ok(ExpectationVector { z })
    }

    /// Amplitude dump for debugging: one `index,re,im` line per amplitude.
    pub fn amplitudes_csv(&self) -> String {
        let mut out = String::from("index,re,im\n");
        for (i, a) in self.amps.iter().enumerate() {
            out.push_str(&format!("{i},{},{}\n", a.re, a.im));
        }
        out
    }
}

/// Trainable rotation angles of the entangling template, laid out
/// layer-major as [layer][qubit][3].
#[derive(Debug, Clone, PartialEq)]
pub struct CircuitParams<T> {
    theta: Vec<T>,
    layers: usize,
    qubits: usize,
    entangle_range: usize,
}

impl<T: Real> CircuitParams<T> {
    /// `entangle_range` r must satisfy 1 <= r < qubits for the standard ring;
    /// r = 0 disables entanglement (used by diagnostic circuits and the
    /// single-qubit case). `layers` may be 0 for an embedding-only circuit.
    pub fn new(layers: usize, qubits: usize, entangle_range: usize, theta: Vec<T>) -> Result<Self> {
        if qubits == 0 {
            return Err(Error::InvalidConfig("qubit count must be positive".into()));
        }
        if entangle_range != 0 && (entangle_range >= qubits) {
            return Err(Error::InvalidConfig(format!(
                "entangle range {entangle_range} must satisfy 1 <= r < {qubits} (or 0 for none)"
            )));
        }
        let expected = layers * qubits * 3;
        if theta.len() != expected {
            return Err(Error::DimensionMismatch(format!(
                "theta has {} angles, template {layers}x{qubits}x3 needs {expected}",
                theta.len()
            )));
        }
        if theta.iter().any(|a| !a.is_finite()) {
            return Err(Error::NonFiniteAngle);
        }
        Ok(Self {
            theta,
            layers,
            qubits,
            entangle_range,
        })
    }

    pub fn zeros(layers: usize, qubits: usize, entangle_range: usize) -> Result<Self> {
        Self::new(layers, qubits, entangle_range, vec![T::zero(); layers * qubits * 3])
    }

    pub fn layers(&self) -> usize {
        self.layers
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn entangle_range(&self) -> usize {
        self.entangle_range
    }

    pub fn theta(&self) -> &[T] {
        &self.theta
    }

    pub fn param_count(&self) -> usize {
        self.theta.len()
    }

    pub fn angle(&self, layer: usize, qubit: usize, slot: usize) -> T {
        self.theta[(layer * self.qubits + qubit) * 3 + slot]
    }

    /// Copy with one flat coordinate replaced; used by shift rules and
    /// training updates.
    pub fn with_angle(&self, index: usize, value: T) -> Result<Self> {
        if index >= self.theta.len() {
            return Err(Error::BadCoordinate(index));
        }
        let mut theta = self.theta.clone();
        theta[index] = value;
        Self::new(self.layers, self.qubits, self.entangle_range, theta)
    }
}

/// RY(x_i) on qubit i of |0...0>.
pub fn angle_embed<T: Real>(x: &[T]) -> Result<StateVector<T>> {
    if x.is_empty() {
        return Err(Error::DimensionMismatch("empty embedding vector".into()));
    }
    let mut state = StateVector::zero_state(x.len());
    for (q, &angle) in x.iter().enumerate() {
        state.apply_rotation(q, RotationKind::Ry, angle)?;
    }
    Ok(state)
}

/// Apply every layer: per-qubit Rot(a,b,c) = RZ(a), RY(b), RZ(c), then the
/// CNOT ring of stride r.
pub fn apply_entangling_layers<T: Real>(
    state: &mut StateVector<T>,
    params: &CircuitParams<T>,
) -> Result<()> {
    if state.qubits() != params.qubits() {
        return Err(Error::DimensionMismatch(format!(
            "state has {} qubits, params expect {}",
            state.qubits(),
            params.qubits()
        )));
    }
    let n = params.qubits();
    for layer in 0..params.layers() {
        for q in 0..n {
            state.apply_rotation(q, RotationKind::Rz, params.angle(layer, q, 0))?;
            state.apply_rotation(q, RotationKind::Ry, params.angle(layer, q, 1))?;
            state.apply_rotation(q, RotationKind::Rz, params.angle(layer, q, 2))?;
        }
        let r = params.entangle_range();
        if r > 0 {
            for q in 0..n {
                state.apply_cnot(q, (q + r) % n)?;
            }
        }
    }
    Ok(())
}

/// Embed, entangle, measure.
pub fn forward<T: Real>(x: &[T], params: &CircuitParams<T>) -> Result<ExpectationVector<T>> {
    if x.len() != params.qubits() {
        return Err(Error::DimensionMismatch(format!(
            "{} embedding angles for a {}-qubit circuit",
            x.len(),
            params.qubits()
        )));
    }
    let mut state = angle_embed(x)?;
    apply_entangling_layers(&mut state, params)?;
    state.measure_z()
}
