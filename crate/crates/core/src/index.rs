//! Per-keyword composite importance scores and the period × keyword matrix.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::centrality::PeriodMeasures;
use crate::error::{Error, Result};
use crate::token::Token;

/// Sum of the three standardized measures.
pub fn compose(z_prevalence: f64, z_diversity: f64, z_connectivity: f64) -> f64 {
    z_prevalence + z_diversity + z_connectivity
}

/// Composite score of keyword `erk` in one period; `None` when the keyword
/// does not occur in the period's network.
pub fn compose_score(measures: &PeriodMeasures, erk: &str) -> Option<f64> {
    let i = measures.position(&Token::erk(erk))?;
    Some(compose(
        measures.z_prevalence[i],
        measures.z_diversity[i],
        measures.z_connectivity[i],
    ))
}

/// Periods × keywords table with masked cells, stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct ScoreMatrix {
    periods: Vec<String>,
    columns: Vec<String>,
    cells: Vec<Option<f64>>,
}

impl ScoreMatrix {
    /// An all-masked matrix.
    pub fn masked(periods: Vec<String>, columns: Vec<String>) -> Self {
        let cells = vec![None; periods.len() * columns.len()];
        Self { periods, columns, cells }
    }

    pub fn from_rows(periods: Vec<String>, columns: Vec<String>, rows: Vec<Vec<Option<f64>>>) -> Result<Self> {
        if rows.len() != periods.len() {
            return Err(Error::DimensionMismatch { expected: periods.len(), actual: rows.len() });
        }
        let mut cells = Vec::with_capacity(periods.len() * columns.len());
        for (p, row) in periods.iter().zip(rows) {
            if row.len() != columns.len() {
                return Err(Error::InvalidData(format!(
                    "row {p} has {} cells, expected {}",
                    row.len(),
                    columns.len()
                )));
            }
            if let Some(v) = row.iter().flatten().find(|v| !v.is_finite()) {
                return Err(Error::InvalidData(format!("row {p} holds non-finite value {v}")));
            }
            cells.extend(row);
        }
        Ok(Self { periods, columns, cells })
    }

    pub fn periods(&self) -> &[String] {
        &self.periods
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn period_count(&self) -> usize {
        self.periods.len()
    }

    pub fn column_count(&self) -> usize {
        self.columns.len()
    }

    pub fn get(&self, period: usize, column: usize) -> Option<f64> {
        self.cells[period * self.columns.len() + column]
    }

    pub fn set(&mut self, period: usize, column: usize, value: Option<f64>) {
        let w = self.columns.len();
        self.cells[period * w + column] = value;
    }

    pub fn row(&self, period: usize) -> &[Option<f64>] {
        let w = self.columns.len();
        &self.cells[period * w..(period + 1) * w]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[Option<f64>]> + '_ {
        (0..self.period_count()).map(move |t| self.row(t))
    }

    pub fn column(&self, column: usize) -> Vec<Option<f64>> {
        (0..self.period_count()).map(|t| self.get(t, column)).collect()
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn masked_count(&self) -> usize {
        self.cells.iter().filter(|c| c.is_none()).count()
    }

    /// Copy restricted to the first `periods` rows.
    pub fn truncated(&self, periods: usize) -> Self {
        let periods = periods.min(self.period_count());
        Self {
            periods: self.periods[..periods].to_vec(),
            columns: self.columns.clone(),
            cells: self.cells[..periods * self.columns.len()].to_vec(),
        }
    }
}

/// Builds the score matrix from one measure set per period, in the given
/// (chronological) order. Columns follow `erks`. A period whose network lacks
/// a keyword, including an empty period, gets a masked cell.
pub fn build_score_matrix(periods: &[(String, PeriodMeasures)], erks: &[String]) -> Result<ScoreMatrix> {
    let mut seen = erks.to_vec();
    seen.sort();
    if seen.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::InvalidArgument("duplicate keyword column".into()));
    }
    let rows = periods
        .iter()
        .map(|(_, m)| erks.iter().map(|e| compose_score(m, e)).collect())
        .collect();
    ScoreMatrix::from_rows(periods.iter().map(|(p, _)| p.clone()).collect(), erks.to_vec(), rows)
}
