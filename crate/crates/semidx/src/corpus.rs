//! News corpus ingestion, lead extraction and period calendars.

use std::collections::HashSet;
use std::fmt;
use std::io::BufRead;
use std::path::Path;

use chrono::{DateTime, Datelike, Duration, NaiveDate, NaiveDateTime, Utc, Weekday};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Share of the body kept as the lead unless configured otherwise.
pub const DEFAULT_LEAD_FRACTION: f64 = 0.30;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NewsDocument {
    pub id: String,
    pub timestamp: DateTime<Utc>,
    pub title: String,
    pub body: String,
}

/// One corpus line as stored on disk.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawRecord {
    pub id: String,
    pub timestamp: String,
    #[serde(default)]
    pub title: String,
    #[serde(default)]
    pub body: String,
}

impl From<&NewsDocument> for RawRecord {
    fn from(d: &NewsDocument) -> Self {
        RawRecord {
            id: d.id.clone(),
            timestamp: d.timestamp.to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
            title: d.title.clone(),
            body: d.body.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RecordError {
    pub line: usize,
    pub id: Option<String>,
    pub message: String,
}

impl fmt::Display for RecordError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.id {
            Some(id) => write!(f, "line {} (id {id}): {}", self.line, self.message),
            None => write!(f, "line {}: {}", self.line, self.message),
        }
    }
}

/// Parses an ISO-8601 timestamp. Values without an offset are taken as UTC;
/// a bare date means midnight UTC.
pub fn parse_timestamp(s: &str) -> Option<DateTime<Utc>> {
    let s = s.trim();
    if let Ok(t) = DateTime::parse_from_rfc3339(s) {
        return Some(t.with_timezone(&Utc));
    }
    for fmt in ["%Y-%m-%dT%H:%M:%S%.f", "%Y-%m-%d %H:%M:%S%.f", "%Y-%m-%dT%H:%M"] {
        if let Ok(t) = NaiveDateTime::parse_from_str(s, fmt) {
            return Some(t.and_utc());
        }
    }
    NaiveDate::parse_from_str(s, "%Y-%m-%d")
        .ok()
        .map(|d| d.and_hms_opt(0, 0, 0).expect("midnight").and_utc())
}

/// Checks one record and converts it.
pub fn validate_record(raw: RawRecord) -> std::result::Result<NewsDocument, String> {
    if raw.id.trim().is_empty() {
        return Err("empty id".into());
    }
    let timestamp = parse_timestamp(&raw.timestamp)
        .ok_or_else(|| format!("unparseable timestamp {:?}", raw.timestamp))?;
    if raw.title.trim().is_empty() && raw.body.trim().is_empty() {
        return Err("title and body are both empty".into());
    }
    Ok(NewsDocument { id: raw.id, timestamp, title: raw.title, body: raw.body })
}

/// Reads a line-delimited JSON corpus. Returns the valid documents and one
/// error per rejected record (malformed JSON, bad fields, repeated id).
pub fn read_corpus(path: &Path) -> Result<(Vec<NewsDocument>, Vec<RecordError>)> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut docs = Vec::new();
    let mut errors = Vec::new();
    let mut seen = HashSet::new();
    for (i, line) in std::io::BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let raw: RawRecord = match serde_json::from_str(&line) {
            Ok(r) => r,
            Err(e) => {
                errors.push(RecordError { line: i + 1, id: None, message: format!("malformed record: {e}") });
                continue;
            }
        };
        let id = raw.id.clone();
        match validate_record(raw) {
            Ok(doc) if !seen.insert(doc.id.clone()) => errors.push(RecordError {
                line: i + 1,
                id: Some(id),
                message: "duplicate id".into(),
            }),
            Ok(doc) => docs.push(doc),
            Err(message) => errors.push(RecordError { line: i + 1, id: Some(id).filter(|s| !s.is_empty()), message }),
        }
    }
    Ok((docs, errors))
}

/// Writes documents as line-delimited JSON.
pub fn write_corpus(path: &Path, docs: &[NewsDocument]) -> Result<()> {
    let mut out = String::new();
    for d in docs {
        out.push_str(&serde_json::to_string(&RawRecord::from(d)).expect("plain strings serialize"));
        out.push('\n');
    }
    std::fs::write(path, out).map_err(|e| Error::io(path, e))
}

/// Title followed by the first `fraction` of the body's characters, with the
/// cut moved right to the end of a word that it would otherwise split.
pub fn extract_lead(title: &str, body: &str, fraction: f64) -> Result<String> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::validation(format!("lead fraction {fraction} is outside (0, 1]")));
    }
    let title = title.trim();
    let chars: Vec<char> = body.chars().collect();
    let n = chars.len();
    let mut k = ((fraction * n as f64) - 1e-9).ceil().max(0.0) as usize;
    k = k.min(n);
    while k > 0 && k < n && !chars[k - 1].is_whitespace() && !chars[k].is_whitespace() {
        k += 1;
    }
    let lead: String = chars[..k].iter().collect();
    let lead = lead.trim();
    if title.is_empty() && lead.is_empty() {
        return Err(Error::validation("document has neither title nor body"));
    }
    Ok(match (title.is_empty(), lead.is_empty()) {
        (true, _) => lead.to_string(),
        (_, true) => title.to_string(),
        _ if title.ends_with(['.', '!', '?', ':', ';']) => format!("{title} {lead}"),
        _ => format!("{title}. {lead}"),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Frequency {
    /// Seven-day periods ending on the given weekday.
    Weekly(Weekday),
    Daily,
}

impl Default for Frequency {
    fn default() -> Self {
        Frequency::Weekly(Weekday::Fri)
    }
}

pub fn parse_weekday(s: &str) -> Option<Weekday> {
    let s = s.trim().to_ascii_lowercase();
    [
        ("monday", Weekday::Mon),
        ("tuesday", Weekday::Tue),
        ("wednesday", Weekday::Wed),
        ("thursday", Weekday::Thu),
        ("friday", Weekday::Fri),
        ("saturday", Weekday::Sat),
        ("sunday", Weekday::Sun),
    ]
    .into_iter()
    .find(|(name, _)| *name == s || (s.len() >= 3 && name.starts_with(s.as_str())))
    .map(|(_, d)| d)
}

/// Contiguous, non-overlapping periods covering a date range. Each period is
/// the half-open interval `[first day 00:00, day after last day 00:00)` UTC.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PeriodCalendar {
    frequency: Frequency,
    first_end: NaiveDate,
    count: usize,
}

impl PeriodCalendar {
    /// Periods from the one containing `start` through the one containing `end`.
    pub fn new(frequency: Frequency, start: NaiveDate, end: NaiveDate) -> Result<Self> {
        if end < start {
            return Err(Error::validation(format!("calendar end {end} is before start {start}")));
        }
        let (first_end, count) = match frequency {
            Frequency::Daily => (start, (end - start).num_days() as usize + 1),
            Frequency::Weekly(anchor) => {
                let first_end = next_weekday_on_or_after(start, anchor);
                let last_end = next_weekday_on_or_after(end, anchor);
                (first_end, ((last_end - first_end).num_days() / 7) as usize + 1)
            }
        };
        Ok(Self { frequency, first_end, count })
    }

    pub fn frequency(&self) -> Frequency {
        self.frequency
    }

    pub fn len(&self) -> usize {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    fn step(&self) -> i64 {
        match self.frequency {
            Frequency::Daily => 1,
            Frequency::Weekly(_) => 7,
        }
    }

    /// Last calendar day of period `i`.
    pub fn end_date(&self, i: usize) -> NaiveDate {
        self.first_end + Duration::days(self.step() * i as i64)
    }

    /// First calendar day of period `i`.
    pub fn start_date(&self, i: usize) -> NaiveDate {
        self.end_date(i) - Duration::days(self.step() - 1)
    }

    /// Weekly periods are labelled by the working week they end, e.g.
    /// `2020-03-09/2020-03-13` for the week ending Friday 13 March 2020.
    pub fn label(&self, i: usize) -> String {
        let end = self.end_date(i);
        match self.frequency {
            Frequency::Daily => end.to_string(),
            Frequency::Weekly(_) => format!("{}/{}", end - Duration::days(4), end),
        }
    }

    pub fn labels(&self) -> Vec<String> {
        (0..self.count).map(|i| self.label(i)).collect()
    }

    /// Period containing calendar day `date`.
    pub fn period_of_date(&self, date: NaiveDate) -> Option<usize> {
        let first_start = self.start_date(0);
        if date < first_start {
            return None;
        }
        let i = ((date - first_start).num_days() / self.step()) as usize;
        (i < self.count).then_some(i)
    }

    /// The unique period whose interval contains `timestamp`.
    pub fn assign(&self, timestamp: DateTime<Utc>) -> Result<usize> {
        self.period_of_date(timestamp.date_naive()).ok_or_else(|| {
            Error::validation(format!(
                "timestamp {timestamp} is outside the calendar range {} .. {}",
                self.start_date(0),
                self.end_date(self.count.saturating_sub(1))
            ))
        })
    }

    /// Index of the period whose label or last day equals `key`.
    pub fn find(&self, key: &str) -> Option<usize> {
        let key = key.trim();
        if let Some(i) = (0..self.count).find(|&i| self.label(i) == key) {
            return Some(i);
        }
        let date = NaiveDate::parse_from_str(key, "%Y-%m-%d").ok()?;
        self.period_of_date(date).filter(|&i| self.end_date(i) == date)
    }
}

fn next_weekday_on_or_after(date: NaiveDate, weekday: Weekday) -> NaiveDate {
    let ahead = (7 + weekday.num_days_from_monday() as i64 - date.weekday().num_days_from_monday() as i64) % 7;
    date + Duration::days(ahead)
}

/// Documents grouped by period, preserving input order within each period.
pub fn bucket_documents<'a>(
    docs: &'a [NewsDocument],
    calendar: &PeriodCalendar,
) -> Result<Vec<Vec<&'a NewsDocument>>> {
    let mut out = vec![Vec::new(); calendar.len()];
    for d in docs {
        let p = calendar
            .assign(d.timestamp)
            .map_err(|e| Error::validation(format!("document {}: {e}", d.id)))?;
        out[p].push(d);
    }
    Ok(out)
}
