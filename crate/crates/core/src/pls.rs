//! Partial least squares compression of the keyword score matrix into a
//! single target-specific composite.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;

/// Fewest estimation rows accepted by [`fit_pls`].
pub const MIN_OBSERVATIONS: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DropReason {
    AllMasked,
    ZeroVariance,
}

/// A fitted composite. Columns are addressed by their position in the
/// original predictor matrix; dropped columns carry no weight.
#[derive(Clone, Debug, PartialEq)]
pub struct PlsFit {
    /// Original indices of the retained columns.
    pub columns: Vec<usize>,
    pub dropped: Vec<(usize, DropReason)>,
    /// Window means and population standard deviations of retained columns
    /// (after mean imputation of masked cells).
    pub means: Vec<f64>,
    pub stds: Vec<f64>,
    /// Unit-norm direction over the standardized retained columns.
    pub weights: Vec<f64>,
    pub target_mean: f64,
    pub components: usize,
    /// Masked cells replaced by the column mean inside the window.
    pub imputed: usize,
    /// Number of predictor columns the fit expects in [`project`].
    pub input_width: usize,
}

impl PlsFit {
    /// Weight per original column, zero for dropped ones.
    pub fn full_weights(&self) -> Vec<f64> {
        let mut w = vec![0.0; self.input_width];
        for (&c, &v) in self.columns.iter().zip(&self.weights) {
            w[c] = v;
        }
        w
    }
}

/// Standardized retained columns of a window plus their statistics.
struct Standardized {
    columns: Vec<usize>,
    dropped: Vec<(usize, DropReason)>,
    means: Vec<f64>,
    stds: Vec<f64>,
    /// Column-major, one vector per retained column.
    data: Vec<Vec<f64>>,
    imputed: usize,
}

fn standardize_window<R: AsRef<[Option<f64>]>>(x: &[R], width: usize) -> Result<Standardized> {
    let mut out = Standardized {
        columns: Vec::new(),
        dropped: Vec::new(),
        means: Vec::new(),
        stds: Vec::new(),
        data: Vec::new(),
        imputed: 0,
    };
    for (t, row) in x.iter().enumerate() {
        if row.as_ref().len() != width {
            return Err(Error::InvalidData(format!(
                "row {t} has {} columns, expected {width}",
                row.as_ref().len()
            )));
        }
    }
    for j in 0..width {
        let observed: Vec<f64> = x.iter().filter_map(|r| r.as_ref()[j]).collect();
        if observed.is_empty() {
            out.dropped.push((j, DropReason::AllMasked));
            continue;
        }
        let mean = math::mean(&observed);
        let filled: Vec<f64> = x.iter().map(|r| r.as_ref()[j].unwrap_or(mean)).collect();
        let sd = math::sqrt(math::population_variance(&filled));
        if !(sd > 1e-12 * (1.0 + mean.abs())) {
            out.dropped.push((j, DropReason::ZeroVariance));
            continue;
        }
        out.imputed += x.len() - observed.len();
        out.columns.push(j);
        out.means.push(mean);
        out.stds.push(sd);
        out.data.push(filled.iter().map(|v| (v - mean) / sd).collect());
    }
    Ok(out)
}

/// Fits a PLS composite of `x` (rows = periods, masked cells as `None`) for
/// target `y`.
///
/// With one component the weight vector is the normalized cross-covariance
/// `X̃ᵀỹ / ‖X̃ᵀỹ‖`. With more, SIMPLS deflation is run and the composite
/// direction is the normalized PLS regression vector, which reduces to the
/// same weights when `components == 1`. The sign is chosen so the in-sample
/// composite correlates non-negatively with `y`.
pub fn fit_pls<R: AsRef<[Option<f64>]>>(x: &[R], y: &[f64], components: usize) -> Result<PlsFit> {
    let t = x.len();
    if y.len() != t {
        return Err(Error::DimensionMismatch { expected: t, actual: y.len() });
    }
    if t < MIN_OBSERVATIONS {
        return Err(Error::InsufficientData { required: MIN_OBSERVATIONS, actual: t });
    }
    if components == 0 {
        return Err(Error::InvalidArgument("PLS needs at least one component".into()));
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidData("non-finite target value".into()));
    }
    let width = x[0].as_ref().len();
    let std = standardize_window(x, width)?;
    if std.columns.is_empty() {
        return Err(Error::Degenerate("no usable predictor column".into()));
    }

    let y_mean = math::mean(y);
    let yc: Vec<f64> = y.iter().map(|v| v - y_mean).collect();
    let y_norm = math::norm(&yc);
    if y_norm <= 1e-12 * (1.0 + y_mean.abs()) * math::sqrt(t as f64) {
        return Err(Error::Degenerate("target is constant over the window".into()));
    }

    let cols = &std.data;
    let k = cols.len();
    let mut s: Vec<f64> = cols.iter().map(|c| math::dot(c, &yc)).collect();
    let s_norm = math::norm(&s);
    if s_norm <= 1e-12 * math::sqrt((t * k) as f64) * y_norm {
        return Err(Error::Degenerate("target is uncorrelated with every predictor".into()));
    }

    let mut direction = if components == 1 {
        s.iter().map(|v| v / s_norm).collect::<Vec<f64>>()
    } else {
        simpls_coefficients(cols, &yc, &mut s, components.min(k))?
    };
    let d_norm = math::norm(&direction);
    if !(d_norm > 0.0) {
        return Err(Error::Degenerate("PLS regression vector vanished".into()));
    }
    for v in &mut direction {
        *v /= d_norm;
    }
    let composite: Vec<f64> = (0..t)
        .map(|i| cols.iter().zip(&direction).map(|(c, w)| c[i] * w).sum())
        .collect();
    if math::dot(&composite, &yc) < 0.0 {
        for v in &mut direction {
            *v = -*v;
        }
    }

    Ok(PlsFit {
        columns: std.columns,
        dropped: std.dropped,
        means: std.means,
        stds: std.stds,
        weights: direction,
        target_mean: y_mean,
        components,
        imputed: std.imputed,
        input_width: width,
    })
}

/// SIMPLS for a single response; returns `B = R Q` over the standardized
/// columns. `s` holds `X̃ᵀỹ` on entry and is deflated in place.
fn simpls_coefficients(cols: &[Vec<f64>], yc: &[f64], s: &mut [f64], components: usize) -> Result<Vec<f64>> {
    let k = cols.len();
    let t = yc.len();
    let mut basis: Vec<Vec<f64>> = Vec::new();
    let mut b = vec![0.0; k];
    for _ in 0..components {
        let s_norm = math::norm(s);
        if s_norm <= 1e-12 * math::norm(yc) {
            break;
        }
        let mut r: Vec<f64> = s.to_vec();
        let mut score: Vec<f64> = (0..t)
            .map(|i| cols.iter().zip(&r).map(|(c, w)| c[i] * w).sum())
            .collect();
        let score_norm = math::norm(&score);
        if score_norm == 0.0 {
            break;
        }
        for v in &mut score {
            *v /= score_norm;
        }
        for v in &mut r {
            *v /= score_norm;
        }
        let mut p: Vec<f64> = cols.iter().map(|c| math::dot(c, &score)).collect();
        let q = math::dot(yc, &score);
        for (bj, rj) in b.iter_mut().zip(&r) {
            *bj += rj * q;
        }
        for v in &basis {
            let proj = math::dot(v, &p);
            for (pj, vj) in p.iter_mut().zip(v) {
                *pj -= proj * vj;
            }
        }
        let p_norm = math::norm(&p);
        if p_norm == 0.0 {
            break;
        }
        for v in &mut p {
            *v /= p_norm;
        }
        let proj = math::dot(&p, s);
        for (sj, pj) in s.iter_mut().zip(&p) {
            *sj -= proj * pj;
        }
        basis.push(p);
    }
    if basis.is_empty() {
        return Err(Error::Degenerate("no PLS component could be extracted".into()));
    }
    Ok(b)
}

/// Applies a fit to one row of predictors; masked cells take the window mean.
pub fn project(fit: &PlsFit, row: &[Option<f64>]) -> Result<f64> {
    if row.len() != fit.input_width {
        return Err(Error::DimensionMismatch { expected: fit.input_width, actual: row.len() });
    }
    let mut acc = 0.0;
    for (i, &c) in fit.columns.iter().enumerate() {
        if let Some(v) = row[c] {
            acc += fit.weights[i] * (v - fit.means[i]) / fit.stds[i];
        }
    }
    Ok(acc)
}
