//! Analytic circuit gradients via the parameter-shift rule, plus the
//! central-difference oracle used to check them.

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::qsim::{forward, CircuitParams};
use crate::scalar::{lit, Real};

/// Which rotation angle to differentiate: a trainable circuit angle (flat
/// layer-major index) or an embedding angle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParamCoord {
    Theta(usize),
    Input(usize),
}

/// d<Z_j>/d(coordinate) for every coordinate, one output column per qubit.
#[derive(Debug, Clone)]
pub struct Jacobian<T> {
    /// (layers * qubits * 3) x qubits
    pub d_theta: Matrix<T>,
    /// inputs x qubits
    pub d_input: Matrix<T>,
}

/// Shift-rule derivative of all Pauli-Z outputs with respect to one rotation
/// coordinate: (forward(+pi/2) - forward(-pi/2)) / 2.
pub fn param_shift<T: Real>(
    x: &[T],
    params: &CircuitParams<T>,
    which: ParamCoord,
) -> Result<Vec<T>> {
    let half_pi = lit::<T>(std::f64::consts::FRAC_PI_2);
    let two = lit::<T>(2.0);
    let (plus, minus) = match which {
        ParamCoord::Theta(p) => {
            if p >= params.param_count() {
                return Err(Error::BadCoordinate(p));
            }
            let v = params.theta()[p];
            let plus = forward(x, &params.with_angle(p, v + half_pi)?)?;
            let minus = forward(x, &params.with_angle(p, v - half_pi)?)?;
            (plus, minus)
        }
        ParamCoord::Input(i) => {
            if i >= x.len() {
                return Err(Error::BadCoordinate(i));
            }
            let mut shifted = x.to_vec();
            shifted[i] = x[i] + half_pi;
            let plus = forward(&shifted, params)?;
            shifted[i] = x[i] - half_pi;
            let minus = forward(&shifted, params)?;
            (plus, minus)
        }
    };
    Ok(plus
        .z
        .iter()
        .zip(&minus.z)
        .map(|(&p, &m)| (p - m) / two)
        .collect())
}

/// Shift-rule rows for every trainable circuit angle, in flat parameter
/// order.
pub fn theta_jacobian<T: Real>(x: &[T], params: &CircuitParams<T>) -> Result<Matrix<T>> {
    let n = params.qubits();
    let mut rows = Vec::with_capacity(params.param_count());
    for p in 0..params.param_count() {
        rows.push(param_shift(x, params, ParamCoord::Theta(p))?);
    }
    if rows.is_empty() {
        return Matrix::from_vec(0, n, Vec::new());
    }
    Matrix::from_rows(rows)
}

/// Shift-rule rows for every embedding angle.
pub fn input_jacobian<T: Real>(x: &[T], params: &CircuitParams<T>) -> Result<Matrix<T>> {
    let mut rows = Vec::with_capacity(x.len());
    for i in 0..x.len() {
        rows.push(param_shift(x, params, ParamCoord::Input(i))?);
    }
    Matrix::from_rows(rows)
}

/// Every coordinate, evaluated in deterministic parameter-major order.
/// Costs 2 * (param_count + inputs) circuit evaluations.
pub fn full_jacobian<T: Real>(x: &[T], params: &CircuitParams<T>) -> Result<Jacobian<T>> {
    Ok(Jacobian {
        d_theta: theta_jacobian(x, params)?,
        d_input: input_jacobian(x, params)?,
    })
}

/// Central-difference oracle with step `h`, same layout as `full_jacobian`.
pub fn finite_difference<T: Real>(
    x: &[T],
    params: &CircuitParams<T>,
    h: T,
) -> Result<Jacobian<T>> {
    if !(h > T::zero()) {
        return Err(Error::InvalidConfig("finite-difference step must be positive".into()));
    }
    let n = params.qubits();
    let two_h = h + h;
    let mut theta_rows = Vec::with_capacity(params.param_count());
    for p in 0..params.param_count() {
        let v = params.theta()[p];
        let plus = forward(x, &params.with_angle(p, v + h)?)?;
        let minus = forward(x, &params.with_angle(p, v - h)?)?;
        theta_rows.push(
            plus.z
                .iter()
                .zip(&minus.z)
                .map(|(&a, &b)| (a - b) / two_h)
                .collect::<Vec<_>>(),
        );
    }
    let mut input_rows = Vec::with_capacity(x.len());
    for i in 0..x.len() {
        let mut shifted = x.to_vec();
        shifted[i] = x[i] + h;
        let plus = forward(&shifted, params)?;
        shifted[i] = x[i] - h;
        let minus = forward(&shifted, params)?;
        input_rows.push(
            plus.z
                .iter()
                .zip(&minus.z)
                .map(|(&a, &b)| (a - b) / two_h)
                .collect::<Vec<_>>(),
        );
    }
    Ok(Jacobian {
        d_theta: if theta_rows.is_empty() {
            Matrix::from_vec(0, n, Vec::new())?
        } else {
            Matrix::from_rows(theta_rows)?
        },
        d_input: Matrix::from_rows(input_rows)?,
    })
}
