//! One-step-ahead forecasting models and the recursive expanding-window
//! backtest.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{least_squares, Matrix};
use crate::math;
use crate::pls::{self, PlsFit};

/// Fewest regression observations `(y_t, x_t) -> y_{t+1}` per fit.
pub const MIN_WINDOW: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ModelId {
    Rw,
    Ar,
    Erk,
    Ew,
    Si,
}

impl ModelId {
    pub const ALL: [ModelId; 5] = [ModelId::Rw, ModelId::Ar, ModelId::Erk, ModelId::Ew, ModelId::Si];

    pub fn as_str(self) -> &'static str {
        match self {
            ModelId::Rw => "RW",
            ModelId::Ar => "AR",
            ModelId::Erk => "ERK",
            ModelId::Ew => "EW",
            ModelId::Si => "SI",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|m| m.as_str().eq_ignore_ascii_case(s.trim()))
    }
}

impl core::fmt::Display for ModelId {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum TargetKind {
    #[default]
    Return,
    Volatility,
}

/// What the parameter-free RW model predicts.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum RwPolicy {
    /// Zero for returns (driftless random walk in prices), the last value
    /// for volatility.
    #[default]
    Reference,
    /// Mean of the target over the estimation window.
    RecursiveMean,
}

/// OLS estimates of `y_{t+1} = α + γ y_t (+ β x_t) + ε`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ArxFit {
    pub alpha: f64,
    pub gamma: f64,
    /// `None` for the pure AR(1) model.
    pub beta: Option<f64>,
    pub rss: f64,
    /// Residual variance with degrees-of-freedom correction.
    pub sigma2: f64,
    pub t_eff: usize,
}

impl ArxFit {
    pub fn params(&self) -> usize {
        if self.beta.is_some() {
            3
        } else {
            2
        }
    }

    pub fn forecast(&self, y_t: f64, x_t: f64) -> f64 {
        self.alpha + self.gamma * y_t + self.beta.map_or(0.0, |b| b * x_t)
    }
}

/// Fits ARX(1) on `y[0..n]`, pairing `x[t]` with `y[t + 1]`.
pub fn fit_arx(y: &[f64], x: &[f64]) -> Result<ArxFit> {
    fit_lagged(y, Some(x))
}

/// Fits AR(1) with intercept.
pub fn fit_ar(y: &[f64]) -> Result<ArxFit> {
    fit_lagged(y, None)
}

fn fit_lagged(y: &[f64], x: Option<&[f64]>) -> Result<ArxFit> {
    let t_eff = y.len().saturating_sub(1);
    if t_eff < MIN_WINDOW {
        return Err(Error::InsufficientData { required: MIN_WINDOW + 1, actual: y.len() });
    }
    if let Some(x) = x {
        if x.len() < t_eff {
            return Err(Error::DimensionMismatch { expected: t_eff, actual: x.len() });
        }
    }
    if y.iter().chain(x.unwrap_or(&[]).iter().take(t_eff)).any(|v| !v.is_finite()) {
        return Err(Error::InvalidData("non-finite value in estimation window".into()));
    }
    let k = if x.is_some() { 3 } else { 2 };
    let mut design = Matrix::zeros(t_eff, k);
    for t in 0..t_eff {
        design[(t, 0)] = 1.0;
        design[(t, 1)] = y[t];
        if let Some(x) = x {
            design[(t, 2)] = x[t];
        }
    }
    let names: &[&str] = if x.is_some() { &["intercept", "y_lag", "x"] } else { &["intercept", "y_lag"] };
    let ls = least_squares(&design, &y[1..], names)?;
    if t_eff <= k {
        return Err(Error::InsufficientData { required: k + 1, actual: t_eff });
    }
    Ok(ArxFit {
        alpha: ls.coefficients[0],
        gamma: ls.coefficients[1],
        beta: x.map(|_| ls.coefficients[2]),
        rss: ls.rss,
        sigma2: ls.rss / (t_eff - k) as f64,
        t_eff,
    })
}

/// Arithmetic mean of the member forecasts that exist. Errors when none do.
pub fn combine_equal(forecasts: &[Option<f64>]) -> Result<f64> {
    let members: Vec<f64> = forecasts.iter().flatten().copied().collect();
    if members.is_empty() {
        return Err(Error::Degenerate("no combination member produced a forecast".into()));
    }
    Ok(math::mean(&members))
}

/// Estimated coefficients of one vintage.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Coefficients {
    pub alpha: f64,
    pub gamma: f64,
    pub beta: Option<f64>,
    pub sigma2: f64,
}

impl From<&ArxFit> for Coefficients {
    fn from(f: &ArxFit) -> Self {
        Self { alpha: f.alpha, gamma: f.gamma, beta: f.beta, sigma2: f.sigma2 }
    }
}

/// Forecasts of one model over the out-of-sample origins.
#[derive(Clone, Debug, PartialEq)]
pub struct ForecastRun {
    pub model: ModelId,
    /// Period index of each origin; the forecast targets `origin + 1`.
    pub origins: Vec<usize>,
    pub forecasts: Vec<f64>,
    pub realized: Vec<f64>,
    /// Absent for RW and EW.
    pub coefficients: Vec<Option<Coefficients>>,
}

/// PLS weights and bookkeeping of one vintage.
#[derive(Clone, Debug, PartialEq)]
pub struct PlsVintage {
    pub origin: usize,
    pub fit: PlsFit,
}

/// In-sample fit comparison of one vintage: AR versus ERK.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VintageFits {
    pub origin: usize,
    pub ar: ArxFit,
    pub erk: ArxFit,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct BacktestResult {
    pub runs: Vec<ForecastRun>,
    pub pls: Vec<PlsVintage>,
    /// Present when both AR and ERK are estimated.
    pub vintage_fits: Vec<VintageFits>,
    pub warnings: Vec<String>,
}

impl BacktestResult {
    pub fn run(&self, model: ModelId) -> Option<&ForecastRun> {
        self.runs.iter().find(|r| r.model == model)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BacktestConfig {
    /// First and last origin, as period indices (inclusive).
    pub first_origin: usize,
    pub last_origin: usize,
    pub models: Vec<ModelId>,
    pub kind: TargetKind,
    pub rw: RwPolicy,
    pub pls_components: usize,
}

/// Data for one target. All series are indexed by period.
#[derive(Clone, Copy, Debug)]
pub struct BacktestData<'a, R: AsRef<[Option<f64>]>> {
    pub target: &'a [Option<f64>],
    /// Keyword scores, one row per period.
    pub scores: &'a [R],
    /// Aggregate sentiment per period; needed only for SI.
    pub sentiment: Option<&'a [f64]>,
}

/// Recursive expanding-window backtest.
///
/// The estimation sample starts at the first period with an observed target
/// and, at origin `o`, uses regression pairs `(·_t, y_{t+1})` with
/// `t + 1 <= o`. Every estimated component, PLS included, is refit at each
/// origin from that sample only; the forecast for `o + 1` uses `y_o` and the
/// predictors dated `o`.
pub fn recursive_backtest<R: AsRef<[Option<f64>]>>(
    data: &BacktestData<'_, R>,
    config: &BacktestConfig,
) -> Result<BacktestResult> {
    let n = data.target.len();
    let start = validate(data, config)?;
    let y: Vec<f64> = data.target[start..=config.last_origin + 1]
        .iter()
        .map(|v| v.expect("validated"))
        .collect();
    let local = |p: usize| p - start;

    let mut result = BacktestResult::default();
    let mut runs: Vec<ForecastRun> = config
        .models
        .iter()
        .map(|&model| ForecastRun {
            model,
            origins: Vec::new(),
            forecasts: Vec::new(),
            realized: Vec::new(),
            coefficients: Vec::new(),
        })
        .collect();
    let width = data.scores.first().map_or(0, |r| r.as_ref().len());
    debug_assert!(data.scores.len() == n);

    for origin in config.first_origin..=config.last_origin {
        let o = local(origin);
        let window = &y[..=o];
        let realized = y[o + 1];
        let y_o = y[o];

        let mut ar_fit = None;
        let mut erk_fit = None;
        for run in runs.iter_mut() {
            let (forecast, coef) = match run.model {
                ModelId::Rw => {
                    let f = match (config.rw, config.kind) {
                        (RwPolicy::RecursiveMean, _) => math::mean(window),
                        (RwPolicy::Reference, TargetKind::Return) => 0.0,
                        (RwPolicy::Reference, TargetKind::Volatility) => y_o,
                    };
                    (f, None)
                }
                ModelId::Ar => {
                    let fit = fit_ar(window).map_err(|e| at_origin(origin, "AR", e))?;
                    ar_fit = Some(fit);
                    (fit.forecast(y_o, 0.0), Some(Coefficients::from(&fit)))
                }
                ModelId::Erk => {
                    let rows = &data.scores[start..=origin];
                    // PLS pairs the predictors of t with the target of t + 1.
                    let pls_fit = pls::fit_pls(&rows[..o], &window[1..], config.pls_components)
                        .map_err(|e| at_origin(origin, "ERK/PLS", e))?;
                    let composite: Vec<f64> = rows
                        .iter()
                        .map(|r| pls::project(&pls_fit, r.as_ref()))
                        .collect::<Result<_>>()?;
                    result.pls.push(PlsVintage { origin, fit: pls_fit });
                    let fit = fit_arx(window, &composite).map_err(|e| at_origin(origin, "ERK", e))?;
                    erk_fit = Some(fit);
                    (fit.forecast(y_o, composite[o]), Some(Coefficients::from(&fit)))
                }
                ModelId::Si => {
                    let s = &data.sentiment.expect("validated")[start..=origin];
                    let fit = fit_arx(window, s).map_err(|e| at_origin(origin, "SI", e))?;
                    (fit.forecast(y_o, s[o]), Some(Coefficients::from(&fit)))
                }
                ModelId::Ew => {
                    let mut members = vec![None; width];
                    for (j, member) in members.iter_mut().enumerate() {
                        match single_keyword_forecast(data.scores, start, origin, j, window) {
                            Ok(f) => *member = Some(f),
                            Err(e) => result.warnings.push(format!(
                                "origin {origin}: EW member {j} excluded: {e}"
                            )),
                        }
                    }
                    let f = combine_equal(&members).map_err(|e| at_origin(origin, "EW", e))?;
                    (f, None)
                }
            };
            run.origins.push(origin);
            run.forecasts.push(forecast);
            run.realized.push(realized);
            run.coefficients.push(coef);
        }
        if let (Some(ar), Some(erk)) = (ar_fit, erk_fit) {
            result.vintage_fits.push(VintageFits { origin, ar, erk });
        }
    }
    result.runs = runs;
    Ok(result)
}

fn at_origin(origin: usize, model: &str, e: Error) -> Error {
    match e {
        Error::RankDeficient { column } => {
            Error::RankDeficient { column: format!("{column} ({model}, origin {origin})") }
        }
        other => Error::Degenerate(format!("{model} fit at origin {origin}: {other}")),
    }
}

/// ARX forecast with one keyword's scores as the regressor; masked cells
/// take the mean of the keyword's observed scores in the estimation window.
fn single_keyword_forecast<R: AsRef<[Option<f64>]>>(
    scores: &[R],
    start: usize,
    origin: usize,
    column: usize,
    window: &[f64],
) -> Result<f64> {
    let o = origin - start;
    let cells: Vec<Option<f64>> = scores[start..=origin].iter().map(|r| r.as_ref()[column]).collect();
    let observed: Vec<f64> = cells[..o].iter().flatten().copied().collect();
    if observed.is_empty() {
        return Err(Error::Degenerate("keyword never observed in the window".into()));
    }
    let fill = math::mean(&observed);
    let x: Vec<f64> = cells.iter().map(|c| c.unwrap_or(fill)).collect();
    let fit = fit_arx(window, &x)?;
    Ok(fit.forecast(window[o], x[o]))
}

/// Checks the configuration against the data before any fitting; returns the
/// first period of the estimation sample.
fn validate<R: AsRef<[Option<f64>]>>(data: &BacktestData<'_, R>, config: &BacktestConfig) -> Result<usize> {
    let n = data.target.len();
    if config.models.is_empty() {
        return Err(Error::InvalidArgument("no model selected".into()));
    }
    if config.first_origin > config.last_origin {
        return Err(Error::InvalidArgument(format!(
            "first origin {} is after last origin {}",
            config.first_origin, config.last_origin
        )));
    }
    if config.last_origin + 1 >= n {
        return Err(Error::OutOfRange(format!(
            "last origin {} needs a realized value at period {}, but the target has {n} periods",
            config.last_origin,
            config.last_origin + 1
        )));
    }
    if data.scores.len() != n {
        return Err(Error::DimensionMismatch { expected: n, actual: data.scores.len() });
    }
    if let Some(w) = data.scores.first().map(|r| r.as_ref().len()) {
        if data.scores.iter().any(|r| r.as_ref().len() != w) {
            return Err(Error::InvalidData("score rows have different widths".into()));
        }
    }
    if config.models.contains(&ModelId::Si) {
        match data.sentiment {
            Some(s) if s.len() == n => {}
            Some(s) => return Err(Error::DimensionMismatch { expected: n, actual: s.len() }),
            None => return Err(Error::InvalidArgument("SI model needs a sentiment series".into())),
        }
    }
    let start = data
        .target
        .iter()
        .position(Option::is_some)
        .ok_or_else(|| Error::InvalidData("target has no observations".into()))?;
    if let Some(gap) = (start..=config.last_origin + 1).find(|&t| data.target[t].is_none()) {
        return Err(Error::InvalidData(format!("target is missing at period {gap}")));
    }
    if config.first_origin < start + MIN_WINDOW {
        return Err(Error::InsufficientData {
            required: start + MIN_WINDOW,
            actual: config.first_origin,
        });
    }
    Ok(start)
}
