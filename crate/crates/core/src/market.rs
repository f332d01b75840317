//! Weekly return and range-volatility targets from daily prices.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;

/// Scaling applied to the raw Parkinson estimate `(ln H/L)² / (4 ln 2)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum RvScale {
    /// Raw log² units.
    Raw,
    /// ×10², the magnitude of percent-variance tables built from weekly data.
    Percent,
    /// ×10⁴, i.e. computed from log ranges expressed in percent.
    #[default]
    SquaredPercent,
}

impl RvScale {
    pub fn factor(self) -> f64 {
        match self {
            RvScale::Raw => 1.0,
            RvScale::Percent => 1e2,
            RvScale::SquaredPercent => 1e4,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            RvScale::Raw => "raw",
            RvScale::Percent => "percent",
            RvScale::SquaredPercent => "squared-percent",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        [RvScale::Raw, RvScale::Percent, RvScale::SquaredPercent]
            .into_iter()
            .find(|v| v.as_str() == s)
    }
}

/// Parkinson range estimator for one period.
pub fn parkinson(high: f64, low: f64, scale: RvScale) -> Result<f64> {
    if !(low > 0.0 && high.is_finite()) {
        return Err(Error::InvalidData(format!("non-positive or non-finite range ({high}, {low})")));
    }
    if high < low {
        return Err(Error::InvalidData(format!("high {high} below low {low}")));
    }
    let r = math::ln(high / low);
    Ok(scale.factor() * r * r / (4.0 * core::f64::consts::LN_2))
}

/// One trading day.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DailyBar {
    pub close: f64,
    pub high: f64,
    pub low: f64,
}

impl DailyBar {
    pub fn validate(&self) -> Result<()> {
        let ok = |v: f64| v.is_finite() && v > 0.0;
        if !(ok(self.close) && ok(self.high) && ok(self.low)) {
            return Err(Error::InvalidData(format!("non-positive price in {self:?}")));
        }
        if self.high < self.low {
            return Err(Error::InvalidData(format!("high below low in {self:?}")));
        }
        Ok(())
    }
}

/// Aggregate of the trading days inside one period.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WeeklyBar {
    /// Close of the last trading day.
    pub close: f64,
    pub high: f64,
    pub low: f64,
}

/// Groups chronologically ordered `(period, bar)` pairs into one optional
/// aggregate per period. Days outside `0..periods` are ignored.
pub fn aggregate_periods(days: &[(usize, DailyBar)], periods: usize) -> Result<Vec<Option<WeeklyBar>>> {
    let mut out: Vec<Option<WeeklyBar>> = vec![None; periods];
    for &(p, bar) in days {
        bar.validate()?;
        if p >= periods {
            continue;
        }
        out[p] = Some(match out[p] {
            None => WeeklyBar { close: bar.close, high: bar.high, low: bar.low },
            Some(w) => WeeklyBar {
                close: bar.close,
                high: w.high.max(bar.high),
                low: w.low.min(bar.low),
            },
        });
    }
    Ok(out)
}

/// `100 ln(close_t / close_{t−1})`; masked for the first period and whenever
/// either week has no trading day.
pub fn weekly_log_returns(weeks: &[Option<WeeklyBar>]) -> Vec<Option<f64>> {
    let mut out = vec![None; weeks.len()];
    for t in 1..weeks.len() {
        if let (Some(prev), Some(cur)) = (weeks[t - 1], weeks[t]) {
            out[t] = Some(100.0 * math::ln(cur.close / prev.close));
        }
    }
    out
}

/// Parkinson volatility per period; masked where the period has no trading day.
pub fn weekly_parkinson(weeks: &[Option<WeeklyBar>], scale: RvScale) -> Result<Vec<Option<f64>>> {
    weeks
        .iter()
        .map(|w| w.map(|w| parkinson(w.high, w.low, scale)).transpose())
        .collect()
}
