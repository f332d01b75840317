//! Dense least squares with rank detection.

use alloc::string::ToString;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Relative size below which a diagonal entry of R marks a column as
/// linearly dependent on the columns before it.
pub const RANK_RTOL: f64 = 1e-10;

pub type Matrix = DMatrix<f64>;

#[derive(Clone, Debug, PartialEq)]
pub struct LeastSquares {
    pub coefficients: Vec<f64>,
    pub residuals: Vec<f64>,
    pub rss: f64,
}

/// Ordinary least squares of `y` on the columns of `x` via QR.
///
/// A column whose component orthogonal to the preceding columns is
/// negligible is reported by name (`names[j]`) as rank deficient.
pub fn least_squares(x: &Matrix, y: &[f64], names: &[&str]) -> Result<LeastSquares> {
    let (n, k) = x.shape();
    if y.len() != n {
        return Err(Error::DimensionMismatch { expected: n, actual: y.len() });
    }
    if names.len() != k {
        return Err(Error::DimensionMismatch { expected: k, actual: names.len() });
    }
    if n < k {
        return Err(Error::InsufficientData { required: k, actual: n });
    }
    let qr = x.clone().qr();
    let r = qr.r();
    for j in 0..k {
        let col_norm = x.column(j).norm();
        if col_norm == 0.0 || r[(j, j)].abs() <= RANK_RTOL * col_norm {
            return Err(Error::RankDeficient { column: names[j].to_string() });
        }
    }
    let rhs = DVector::from_column_slice(y);
    let qty = qr.q().tr_mul(&rhs);
    let b = r
        .solve_upper_triangular(&qty)
        .ok_or_else(|| Error::RankDeficient { column: names[k - 1].to_string() })?;
    let residuals = &rhs - x * &b;
    Ok(LeastSquares {
        coefficients: b.iter().copied().collect(),
        rss: residuals.dot(&residuals),
        residuals: residuals.iter().copied().collect(),
    })
}
