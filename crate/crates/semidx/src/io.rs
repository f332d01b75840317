//! Tab-separated artifact formats shared by the pipeline stages.
//!
//! Floats are written in Rust's shortest round-trip form, so reading a file
//! back yields bit-identical values. Masked cells are the literal `NA`.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use semidx_core::centrality::PeriodMeasures;
use semidx_core::forecast::{ModelId, PlsVintage};
use semidx_core::index::ScoreMatrix;
use semidx_core::market::DailyBar;
use semidx_core::CooccurrenceNetwork;

use crate::error::{Error, Result};

pub const NA: &str = "NA";

pub fn fmt_f64(v: f64) -> String {
    format!("{v}")
}

pub fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| NA.to_string(), fmt_f64)
}

pub fn parse_opt(s: &str) -> std::result::Result<Option<f64>, String> {
    let s = s.trim();
    if s == NA {
        return Ok(None);
    }
    let v: f64 = s.parse().map_err(|_| format!("not a number: {s:?}"))?;
    if !v.is_finite() {
        return Err(format!("non-finite value {s:?}"));
    }
    Ok(Some(v))
}

/// Writes `contents`, creating parent directories.
pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    std::fs::write(path, contents).map_err(|e| Error::io(path, e))
}

pub fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

/// A header plus string cells.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn read(path: &Path, delimiter: u8) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .delimiter(delimiter)
            .comment(Some(b'#'))
            .from_path(path)
            .map_err(|e| csv_error(path, e))?;
        let header = rdr.headers().map_err(|e| csv_error(path, e))?.iter().map(String::from).collect();
        let mut rows = Vec::new();
        for rec in rdr.records() {
            rows.push(rec.map_err(|e| csv_error(path, e))?.iter().map(String::from).collect());
        }
        Ok(Self { header, rows })
    }

    pub fn render(&self, delimiter: char) -> String {
        let mut out = String::new();
        let mut line = |cells: &[String]| {
            out.push_str(&cells.join(&delimiter.to_string()));
            out.push('\n');
        };
        line(&self.header);
        for r in &self.rows {
            line(r);
        }
        out
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line() as usize);
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::parse(path, line, format!("{other:?}")),
    }
}

/// Period labels plus named, possibly masked columns.
#[derive(Clone, Debug, PartialEq)]
pub struct SeriesTable {
    pub periods: Vec<String>,
    pub names: Vec<String>,
    /// `columns[j][t]`.
    pub columns: Vec<Vec<Option<f64>>>,
}

impl SeriesTable {
    pub fn render(&self) -> String {
        let mut out = String::from("period");
        for n in &self.names {
            out.push('\t');
            out.push_str(n);
        }
        out.push('\n');
        for (t, p) in self.periods.iter().enumerate() {
            out.push_str(p);
            for c in &self.columns {
                out.push('\t');
                out.push_str(&fmt_opt(c[t]));
            }
            out.push('\n');
        }
        out
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        write_file(path, &self.render())
    }

    pub fn read(path: &Path) -> Result<Self> {
        let table = Table::read(path, b'\t')?;
        if table.header.first().map(String::as_str) != Some("period") {
            return Err(Error::parse(path, 1, "first column must be `period`"));
        }
        let names: Vec<String> = table.header[1..].to_vec();
        let mut periods = Vec::with_capacity(table.rows.len());
        let mut columns = vec![Vec::with_capacity(table.rows.len()); names.len()];
        for (i, row) in table.rows.iter().enumerate() {
            if row.len() != names.len() + 1 {
                return Err(Error::parse(path, i + 2, format!("expected {} cells", names.len() + 1)));
            }
            periods.push(row[0].clone());
            for (j, cell) in row[1..].iter().enumerate() {
                columns[j].push(parse_opt(cell).map_err(|m| Error::parse(path, i + 2, m))?);
            }
        }
        Ok(Self { periods, names, columns })
    }

    pub fn column(&self, name: &str) -> Option<&[Option<f64>]> {
        self.names.iter().position(|n| n == name).map(|j| self.columns[j].as_slice())
    }
}

pub fn write_scores(path: &Path, m: &ScoreMatrix) -> Result<()> {
    let table = SeriesTable {
        periods: m.periods().to_vec(),
        names: m.columns().to_vec(),
        columns: (0..m.column_count()).map(|j| m.column(j)).collect(),
    };
    table.write(path)
}

pub fn read_scores(path: &Path) -> Result<ScoreMatrix> {
    let t = SeriesTable::read(path)?;
    let rows = (0..t.periods.len()).map(|i| t.columns.iter().map(|c| c[i]).collect()).collect();
    Ok(ScoreMatrix::from_rows(t.periods, t.names, rows)?)
}

/// One row per node, sorted by token label.
pub fn render_measures(period: &str, m: &PeriodMeasures) -> String {
    let mut out = String::from("period\ttoken\tprevalence\tdiversity\tconnectivity\tz_prev\tz_div\tz_conn\n");
    let mut order: Vec<usize> = (0..m.len()).collect();
    let labels: Vec<String> = m.tokens.iter().map(|t| t.to_string()).collect();
    order.sort_by(|&a, &b| labels[a].cmp(&labels[b]));
    for i in order {
        let _ = writeln!(
            out,
            "{period}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
            labels[i],
            m.prevalence[i],
            fmt_f64(m.diversity[i]),
            fmt_f64(m.connectivity[i]),
            fmt_f64(m.z_prevalence[i]),
            fmt_f64(m.z_diversity[i]),
            fmt_f64(m.z_connectivity[i]),
        );
    }
    out
}

/// Edge list `a<TAB>b<TAB>weight` with `a < b`, in lexicographic order.
pub fn render_network(net: &CooccurrenceNetwork) -> String {
    let labels: Vec<String> = net.nodes().iter().map(|t| t.to_string()).collect();
    let mut rows: Vec<(&str, &str, u64)> = net
        .edges()
        .iter()
        .map(|e| {
            let (a, b) = (&labels[e.a as usize], &labels[e.b as usize]);
            if a <= b {
                (a.as_str(), b.as_str(), e.weight)
            } else {
                (b.as_str(), a.as_str(), e.weight)
            }
        })
        .collect();
    rows.sort_unstable();
    let mut out = String::new();
    for (a, b, w) in rows {
        let _ = writeln!(out, "{a}\t{b}\t{w}");
    }
    out
}

/// File stem for a period: its last day for dated labels.
pub fn period_file_stem(label: &str) -> String {
    label.rsplit('/').next().unwrap_or(label).to_string()
}

#[derive(Debug, serde::Deserialize)]
struct PriceRow {
    date: String,
    close: f64,
    high: f64,
    low: f64,
}

/// Daily prices `date,close,high,low` in chronological order.
pub fn read_prices(path: &Path) -> Result<Vec<(NaiveDate, DailyBar)>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_path(path).map_err(|e| csv_error(path, e))?;
    let mut out: Vec<(NaiveDate, DailyBar)> = Vec::new();
    for (i, rec) in rdr.deserialize::<PriceRow>().enumerate() {
        let line = i + 2;
        let row = rec.map_err(|e| csv_error(path, e))?;
        let date = NaiveDate::parse_from_str(&row.date, "%Y-%m-%d")
            .map_err(|_| Error::parse(path, line, format!("bad date {:?}", row.date)))?;
        let bar = DailyBar { close: row.close, high: row.high, low: row.low };
        bar.validate().map_err(|e| Error::parse(path, line, e.to_string()))?;
        if let Some((prev, _)) = out.last() {
            if *prev >= date {
                return Err(Error::parse(path, line, format!("date {date} is not after {prev}")));
            }
        }
        out.push((date, bar));
    }
    Ok(out)
}

pub fn write_prices(path: &Path, rows: &[(NaiveDate, DailyBar)]) -> Result<()> {
    let mut out = String::from("date,close,high,low\n");
    for (d, b) in rows {
        let _ = writeln!(out, "{d},{},{},{}", fmt_f64(b.close), fmt_f64(b.high), fmt_f64(b.low));
    }
    write_file(path, &out)
}

/// One forecast row.
#[derive(Clone, Debug, PartialEq)]
pub struct ForecastRow {
    pub origin: String,
    pub model: ModelId,
    pub forecast: f64,
    pub realized: f64,
}

pub fn render_forecasts(rows: &[ForecastRow]) -> String {
    let mut out = String::from("origin\tmodel\tforecast\trealized\n");
    for r in rows {
        let _ = writeln!(out, "{}\t{}\t{}\t{}", r.origin, r.model, fmt_f64(r.forecast), fmt_f64(r.realized));
    }
    out
}

pub fn read_forecasts(path: &Path) -> Result<Vec<ForecastRow>> {
    let t = Table::read(path, b'\t')?;
    if t.header != ["origin", "model", "forecast", "realized"] {
        return Err(Error::parse(path, 1, "expected columns origin, model, forecast, realized"));
    }
    t.rows
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let bad = |m: String| Error::parse(path, i + 2, m);
            let num = |s: &str| parse_opt(s).map_err(bad)?.ok_or_else(|| bad("missing value".into()));
            Ok(ForecastRow {
                origin: r[0].clone(),
                model: ModelId::parse(&r[1]).ok_or_else(|| bad(format!("unknown model {:?}", r[1])))?,
                forecast: num(&r[2])?,
                realized: num(&r[3])?,
            })
        })
        .collect()
}

/// `origin,diff` rows; masked differences are `NA`.
pub fn render_aic(rows: &[(String, Option<f64>)]) -> String {
    let mut out = String::from("origin,diff\n");
    for (o, d) in rows {
        let _ = writeln!(out, "{o},{}", fmt_opt(*d));
    }
    out
}

pub fn read_aic(path: &Path) -> Result<Vec<(String, Option<f64>)>> {
    let t = Table::read(path, b',')?;
    t.rows
        .iter()
        .enumerate()
        .map(|(i, r)| Ok((r[0].clone(), parse_opt(&r[1]).map_err(|m| Error::parse(path, i + 2, m))?)))
        .collect()
}

/// PLS weights per vintage: origin, imputed cell count, then one column per
/// keyword (`NA` where the column was dropped).
pub fn render_pls(columns: &[String], labels: &[String], vintages: &[PlsVintage]) -> String {
    let mut out = String::from("origin\timputed");
    for c in columns {
        out.push('\t');
        out.push_str(c);
    }
    out.push('\n');
    for v in vintages {
        let mut w: Vec<Option<f64>> = vec![None; columns.len()];
        for (&c, &x) in v.fit.columns.iter().zip(&v.fit.weights) {
            w[c] = Some(x);
        }
        out.push_str(&labels[v.origin]);
        let _ = write!(out, "\t{}", v.fit.imputed);
        for x in w {
            out.push('\t');
            out.push_str(&fmt_opt(x));
        }
        out.push('\n');
    }
    out
}

/// Resolves `p` against `base` unless it is absolute.
pub fn resolve(base: &Path, p: &Path) -> PathBuf {
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}
