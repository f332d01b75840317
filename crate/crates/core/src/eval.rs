//! Forecast evaluation: MSPE, Diebold–Mariano tests and AIC comparisons.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::forecast::{ArxFit, ForecastRun, ModelId, VintageFits};
use crate::math;

/// Mean squared prediction error.
pub fn mspe(forecasts: &[f64], realized: &[f64]) -> Result<f64> {
    if forecasts.len() != realized.len() {
        return Err(Error::DimensionMismatch { expected: realized.len(), actual: forecasts.len() });
    }
    if forecasts.is_empty() {
        return Err(Error::InsufficientData { required: 1, actual: 0 });
    }
    Ok(squared_errors(forecasts, realized).iter().sum::<f64>() / forecasts.len() as f64)
}

pub fn squared_errors(forecasts: &[f64], realized: &[f64]) -> Vec<f64> {
    forecasts.iter().zip(realized).map(|(f, r)| (r - f) * (r - f)).collect()
}

/// `MSPE(model) / MSPE(benchmark)`.
pub fn relative_mspe(model: f64, benchmark: f64) -> Result<f64> {
    if !(benchmark > 0.0) {
        return Err(Error::Degenerate("benchmark MSPE is zero".into()));
    }
    Ok(model / benchmark)
}

/// Default HAC truncation lag, `floor(T^(1/3))`.
pub fn default_dm_lags(t: usize) -> usize {
    let mut l = math::floor(math::cbrt(t as f64)) as usize;
    while (l + 1).pow(3) <= t {
        l += 1;
    }
    while l > 0 && l.pow(3) > t {
        l -= 1;
    }
    l
}

/// Bartlett-kernel long-run variance of `d` around its mean.
pub fn bartlett_lrv(d: &[f64], lags: usize) -> f64 {
    let t = d.len();
    let m = math::mean(d);
    let autocov = |j: usize| -> f64 {
        (j..t).map(|i| (d[i] - m) * (d[i - j] - m)).sum::<f64>() / t as f64
    };
    let mut lrv = autocov(0);
    for j in 1..=lags.min(t.saturating_sub(1)) {
        lrv += 2.0 * (1.0 - j as f64 / (lags as f64 + 1.0)) * autocov(j);
    }
    lrv
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DmResult {
    pub statistic: f64,
    /// One-sided: small when the model beats the benchmark.
    pub p_value: f64,
    pub lags: usize,
}

/// Fewest out-of-sample losses accepted by [`dm_test`].
pub const DM_MIN_OBSERVATIONS: usize = 10;

/// Diebold–Mariano test on squared-error losses with a Bartlett HAC variance.
/// `lags` defaults to `floor(T^(1/3))`.
pub fn dm_test(loss_model: &[f64], loss_benchmark: &[f64], lags: Option<usize>) -> Result<DmResult> {
    let t = loss_model.len();
    if loss_benchmark.len() != t {
        return Err(Error::DimensionMismatch { expected: t, actual: loss_benchmark.len() });
    }
    if t < DM_MIN_OBSERVATIONS {
        return Err(Error::InsufficientData { required: DM_MIN_OBSERVATIONS, actual: t });
    }
    let lags = lags.unwrap_or_else(|| default_dm_lags(t));
    let d: Vec<f64> = loss_benchmark.iter().zip(loss_model).map(|(b, m)| b - m).collect();
    let lrv = bartlett_lrv(&d, lags);
    let mean = math::mean(&d);
    if !(lrv > 0.0) {
        let statistic = if mean == 0.0 { 0.0 } else { f64::INFINITY.copysign(mean) };
        return Ok(DmResult { statistic, p_value: 1.0 - math::normal_cdf(statistic), lags });
    }
    let statistic = mean / math::sqrt(lrv / t as f64);
    Ok(DmResult { statistic, p_value: 1.0 - math::normal_cdf(statistic), lags })
}

/// `**` below 5%, `*` below 10%.
pub fn stars(p_value: f64) -> &'static str {
    if p_value < 0.05 {
        "**"
    } else if p_value < 0.10 {
        "*"
    } else {
        ""
    }
}

/// `T ln σ̂² + 2k`.
pub fn aic(sigma2: f64, t_eff: usize, k: usize) -> Result<f64> {
    if !(sigma2 > 0.0) {
        return Err(Error::InvalidArgument("AIC needs a positive residual variance".into()));
    }
    Ok(t_eff as f64 * math::ln(sigma2) + 2.0 * k as f64)
}

/// AIC of a fitted model with the maximum-likelihood variance `RSS / T`.
pub fn fit_aic(fit: &ArxFit) -> Result<f64> {
    aic(fit.rss / fit.t_eff as f64, fit.t_eff, fit.params())
}

/// One `AIC(AR) − AIC(ERK)` per vintage; `None` where either AIC is undefined.
pub fn aic_path(vintages: &[VintageFits]) -> Vec<(usize, Option<f64>)> {
    vintages
        .iter()
        .map(|v| {
            let diff = match (fit_aic(&v.ar), fit_aic(&v.erk)) {
                (Ok(a), Ok(e)) => Some(a - e),
                _ => None,
            };
            (v.origin, diff)
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct ModelScore {
    pub model: ModelId,
    pub mspe: f64,
    pub relative_mspe: f64,
    pub dm: DmResult,
}

/// Comparison of every run against the benchmark run.
#[derive(Clone, Debug, PartialEq)]
pub struct Evaluation {
    pub benchmark: ModelId,
    pub benchmark_mspe: f64,
    pub models: Vec<ModelScore>,
}

/// Scores all non-benchmark runs. Runs must share the benchmark's origins.
pub fn evaluate(runs: &[ForecastRun], benchmark: ModelId, dm_lags: Option<usize>) -> Result<Evaluation> {
    let bench = runs
        .iter()
        .find(|r| r.model == benchmark)
        .ok_or_else(|| Error::InvalidArgument(alloc::format!("benchmark {benchmark} was not run")))?;
    let bench_loss = squared_errors(&bench.forecasts, &bench.realized);
    let benchmark_mspe = mspe(&bench.forecasts, &bench.realized)?;
    let mut models = Vec::new();
    for run in runs.iter().filter(|r| r.model != benchmark) {
        if run.origins != bench.origins {
            return Err(Error::InvalidData(alloc::format!(
                "{} and {benchmark} cover different origins",
                run.model
            )));
        }
        let m = mspe(&run.forecasts, &run.realized)?;
        let loss = squared_errors(&run.forecasts, &run.realized);
        models.push(ModelScore {
            model: run.model,
            mspe: m,
            relative_mspe: relative_mspe(m, benchmark_mspe)?,
            dm: dm_test(&loss, &bench_loss, dm_lags)?,
        });
    }
    Ok(Evaluation { benchmark, benchmark_mspe, models })
}
