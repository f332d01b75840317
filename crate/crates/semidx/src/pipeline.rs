//! The pipeline stages behind the CLI subcommands. Each stage reads its
//! inputs from files, writes deterministic artifacts under the output
//! directory and returns what it wrote for callers that want to inspect it.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use log::{info, warn};
use rayon::prelude::*;
use semidx_core::centrality::{CentralityConfig, PeriodMeasures};
use semidx_core::eval::{aic_path, evaluate, stars, Evaluation};
use semidx_core::forecast::{
    recursive_backtest, BacktestConfig, BacktestData, BacktestResult, ForecastRun, ModelId, TargetKind,
};
use semidx_core::index::{build_score_matrix, ScoreMatrix};
use semidx_core::market::{aggregate_periods, weekly_log_returns, weekly_parkinson};
use semidx_core::sentiment::{aggregate, period_sentiments, PolarityLexicon};
use semidx_core::{CooccurrenceNetwork, Token};
use serde_json::json;

use crate::config::{parse_date, PipelineConfig};
use crate::corpus::{bucket_documents, extract_lead, read_corpus, NewsDocument, PeriodCalendar, RecordError};
use crate::error::{Error, Result};
use crate::io::{self, ForecastRow, SeriesTable};
use crate::parallel;
use crate::textprep::Preprocessor;

pub const SCORES_FILE: &str = "scores.tsv";
pub const SENTIMENT_FILE: &str = "sentiment.tsv";
pub const TARGETS_FILE: &str = "targets.tsv";
pub const WARNINGS_FILE: &str = "backtest_warnings.txt";
pub const REPORT_JSON: &str = "report.json";
/// Sentiment column holding the cross-keyword aggregate used by SI.
pub const AGGREGATE_COLUMN: &str = "aggregate";

fn describe_record_errors(errors: &[RecordError]) -> String {
    let mut msg = format!("{} invalid corpus record(s)", errors.len());
    for e in errors.iter().take(20) {
        let _ = write!(msg, "\n  {e}");
    }
    if errors.len() > 20 {
        let _ = write!(msg, "\n  ...");
    }
    msg
}

/// Outcome of `ingest-validate`.
#[derive(Debug)]
pub struct IngestReport {
    pub valid: usize,
    pub errors: Vec<RecordError>,
    /// Documents per period when a calendar is configured.
    pub per_period: Option<Vec<(String, usize)>>,
}

pub fn ingest_validate(cfg: &PipelineConfig) -> Result<IngestReport> {
    let path = cfg.require_file("corpus", &cfg.corpus)?;
    cfg.check_text_settings()?;
    let (docs, mut errors) = read_corpus(&path)?;
    let mut per_period = None;
    if cfg.start.is_some() || cfg.end.is_some() {
        let cal = cfg.calendar()?;
        let mut counts = vec![0usize; cal.len()];
        for d in &docs {
            match cal.assign(d.timestamp) {
                Ok(p) => counts[p] += 1,
                Err(e) => errors.push(RecordError { line: 0, id: Some(d.id.clone()), message: e.to_string() }),
            }
        }
        per_period = Some((0..cal.len()).map(|i| (cal.label(i), counts[i])).collect());
    }
    Ok(IngestReport { valid: docs.len() - errors.iter().filter(|e| e.line == 0).count(), errors, per_period })
}

/// Token streams grouped by period.
pub struct TokenizedCorpus {
    pub calendar: PeriodCalendar,
    pub labels: Vec<String>,
    pub periods: Vec<Vec<Vec<Token>>>,
    pub documents: usize,
}

fn load_documents(cfg: &PipelineConfig) -> Result<Vec<NewsDocument>> {
    let path = cfg.require_file("corpus", &cfg.corpus)?;
    let (docs, errors) = read_corpus(&path)?;
    if !errors.is_empty() {
        return Err(Error::validation(describe_record_errors(&errors)));
    }
    Ok(docs)
}

pub fn tokenize_corpus(cfg: &PipelineConfig, pre: &Preprocessor) -> Result<TokenizedCorpus> {
    cfg.check_text_settings()?;
    let calendar = cfg.calendar()?;
    let docs = load_documents(cfg)?;
    let buckets = bucket_documents(&docs, &calendar)?;
    let periods = buckets
        .par_iter()
        .map(|docs| {
            docs.iter()
                .map(|d| {
                    extract_lead(&d.title, &d.body, cfg.lead_fraction)
                        .map(|text| pre.process(&text))
                        .map_err(|e| Error::validation(format!("document {}: {e}", d.id)))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TokenizedCorpus { labels: calendar.labels(), calendar, periods, documents: docs.len() })
}

pub fn period_networks(cfg: &PipelineConfig, corpus: &TokenizedCorpus) -> Result<Vec<CooccurrenceNetwork>> {
    corpus
        .periods
        .par_iter()
        .map(|streams| {
            let net = CooccurrenceNetwork::build(streams, cfg.window)?;
            Ok(if cfg.min_edge_weight > 1 { net.pruned(cfg.min_edge_weight) } else { net })
        })
        .collect()
}

pub struct IndexOutput {
    pub matrix: ScoreMatrix,
    pub measures: Vec<PeriodMeasures>,
}

/// Corpus to score matrix. Writes `scores.tsv`, `measures/<period>.tsv` and,
/// when asked, one edge list per period.
pub fn build_index(cfg: &PipelineConfig, dump_networks: Option<&Path>) -> Result<IndexOutput> {
    let pre = cfg.preprocessor()?;
    let corpus = tokenize_corpus(cfg, &pre)?;
    if corpus.documents == 0 {
        warn!("the corpus is empty; every score will be masked");
    }
    let networks = period_networks(cfg, &corpus)?;
    let centrality = CentralityConfig::default();
    let mut measures = Vec::with_capacity(networks.len());
    for (label, net) in corpus.labels.iter().zip(&networks) {
        info!("{label}: {} nodes, {} edges", net.node_count(), net.edges().len());
        measures.push(parallel::measures(net, &centrality));
    }
    let labelled: Vec<(String, PeriodMeasures)> = corpus.labels.iter().cloned().zip(measures.iter().cloned()).collect();
    let matrix = build_score_matrix(&labelled, pre.erk_ids())?;

    let out = &cfg.output;
    io::write_scores(&out.join(SCORES_FILE), &matrix)?;
    for (label, m) in corpus.labels.iter().zip(&measures) {
        let path = out.join("measures").join(format!("{}.tsv", io::period_file_stem(label)));
        io::write_file(&path, &io::render_measures(label, m))?;
    }
    if let Some(dir) = dump_networks {
        for (label, net) in corpus.labels.iter().zip(&networks) {
            let path = dir.join(format!("{}.tsv", io::period_file_stem(label)));
            io::write_file(&path, &io::render_network(net))?;
        }
    }
    Ok(IndexOutput { matrix, measures })
}

pub fn load_lexicon(cfg: &PipelineConfig, pre: &Preprocessor) -> Result<PolarityLexicon> {
    let path = cfg.require_file("lexicon", &cfg.lexicon)?;
    let text = io::read_file(&path)?;
    PolarityLexicon::parse(&text, |w| pre.normalize_word(w))
        .map_err(|e| Error::validation(format!("lexicon {}: {e}", path.display())))
}

/// Per-keyword neighbourhood sentiment and its cross-keyword aggregate.
pub fn build_sentiment(cfg: &PipelineConfig) -> Result<SeriesTable> {
    let pre = cfg.preprocessor()?;
    let lexicon = load_lexicon(cfg, &pre)?;
    let corpus = tokenize_corpus(cfg, &pre)?;
    let networks = period_networks(cfg, &corpus)?;
    let erks = pre.erk_ids().to_vec();
    let rows: Vec<Vec<Option<f64>>> =
        networks.par_iter().map(|net| period_sentiments(net, &erks, &lexicon)).collect();
    let mut columns: Vec<Vec<Option<f64>>> = (0..erks.len()).map(|j| rows.iter().map(|r| r[j]).collect()).collect();
    columns.push(rows.iter().map(|r| Some(aggregate(r))).collect());
    let mut names = erks;
    names.push(AGGREGATE_COLUMN.into());
    let table = SeriesTable { periods: corpus.labels, names, columns };
    table.write(&cfg.output.join(SENTIMENT_FILE))?;
    Ok(table)
}

/// Weekly `<instrument>.ret` and `<instrument>.rv` columns from daily prices.
pub fn market_prep(cfg: &PipelineConfig) -> Result<SeriesTable> {
    let dir = cfg.require_file("prices directory", &cfg.prices)?;
    let calendar = cfg.calendar()?;
    let scale = cfg.rv_scale()?;
    let mut files: Vec<PathBuf> = std::fs::read_dir(&dir)
        .map_err(|e| Error::io(&dir, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "csv"))
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(Error::validation(format!("no .csv price files in {}", dir.display())));
    }
    let mut names = Vec::new();
    let mut columns = Vec::new();
    for path in files {
        let id = path.file_stem().and_then(|s| s.to_str()).unwrap_or_default().to_string();
        let days: Vec<(usize, _)> = io::read_prices(&path)?
            .into_iter()
            .filter_map(|(d, bar)| calendar.period_of_date(d).map(|p| (p, bar)))
            .collect();
        let weeks = aggregate_periods(&days, calendar.len())?;
        names.push(format!("{id}.ret"));
        columns.push(weekly_log_returns(&weeks));
        names.push(format!("{id}.rv"));
        columns.push(weekly_parkinson(&weeks, scale)?);
    }
    let table = SeriesTable { periods: calendar.labels(), names, columns };
    table.write(&cfg.output.join(TARGETS_FILE))?;
    Ok(table)
}

pub fn target_kind(name: &str) -> Result<TargetKind> {
    if name.ends_with(".ret") {
        Ok(TargetKind::Return)
    } else if name.ends_with(".rv") {
        Ok(TargetKind::Volatility)
    } else {
        Err(Error::validation(format!("target {name:?} must end in .ret or .rv")))
    }
}

fn period_by_date(labels: &[String], date: &str, key: &str) -> Result<usize> {
    let d = parse_date(date).ok_or_else(|| Error::validation(format!("{key}: bad date {date:?}")))?;
    let stem = d.to_string();
    labels
        .iter()
        .position(|l| io::period_file_stem(l) == stem)
        .ok_or_else(|| Error::validation(format!("{key} {date} is not the last day of any period")))
}

/// Origins covered by the configured evaluation window.
pub fn origin_range(cfg: &PipelineConfig, labels: &[String]) -> Result<(usize, usize)> {
    let start = cfg.eval_start.as_deref().ok_or_else(|| Error::validation("eval_start is not set"))?;
    let end = cfg.eval_end.as_deref().ok_or_else(|| Error::validation("eval_end is not set"))?;
    let first = period_by_date(labels, start, "eval_start")?;
    let last = period_by_date(labels, end, "eval_end")?;
    if first == 0 || last < first {
        return Err(Error::validation(format!("evaluation window {start} .. {end} is empty or starts at the first period")));
    }
    Ok((first - 1, last - 1))
}

pub struct TargetBacktest {
    pub target: String,
    pub result: BacktestResult,
}

/// Recursive backtest of every selected target. Every target is run before
/// anything is written, so a failure leaves no partial output.
pub fn run_backtest(cfg: &PipelineConfig, dump_pls: Option<&Path>) -> Result<Vec<TargetBacktest>> {
    let out = &cfg.output;
    let models = cfg.models()?;
    let scores = io::read_scores(&out.join(SCORES_FILE))?;
    let targets = SeriesTable::read(&out.join(TARGETS_FILE))?;
    if targets.periods != scores.periods() {
        return Err(Error::validation("targets and scores cover different periods"));
    }
    let sentiment = if models.contains(&ModelId::Si) {
        let table = SeriesTable::read(&out.join(SENTIMENT_FILE))?;
        if table.periods != scores.periods() {
            return Err(Error::validation("sentiment and scores cover different periods"));
        }
        let col = table
            .column(AGGREGATE_COLUMN)
            .ok_or_else(|| Error::validation(format!("sentiment file has no `{AGGREGATE_COLUMN}` column")))?;
        Some(
            col.iter()
                .map(|v| v.ok_or_else(|| Error::validation("aggregate sentiment has masked cells")))
                .collect::<Result<Vec<f64>>>()?,
        )
    } else {
        None
    };
    let (first_origin, last_origin) = origin_range(cfg, scores.periods())?;
    let selected: Vec<String> = if cfg.targets.is_empty() { targets.names.clone() } else { cfg.targets.clone() };
    let rows: Vec<&[Option<f64>]> = scores.rows().collect();
    let rw = cfg.rw_policy()?;

    let runs: Vec<TargetBacktest> = selected
        .par_iter()
        .map(|name| {
            let series = targets.column(name).ok_or_else(|| Error::validation(format!("unknown target {name:?}")))?;
            let config = BacktestConfig {
                first_origin,
                last_origin,
                models: models.clone(),
                kind: target_kind(name)?,
                rw,
                pls_components: cfg.pls_components,
            };
            let data = BacktestData { target: series, scores: &rows, sentiment: sentiment.as_deref() };
            let result = recursive_backtest(&data, &config)
                .map_err(|e| Error::validation(format!("target {name}: {e}")))?;
            Ok(TargetBacktest { target: name.clone(), result })
        })
        .collect::<Result<_>>()?;

    let labels = scores.periods();
    let pls_dir = dump_pls.map_or_else(|| out.join("pls"), Path::to_path_buf);
    let mut warnings = String::new();
    for t in &runs {
        let rows = forecast_rows(&t.result.runs, labels);
        io::write_file(&out.join("forecasts").join(format!("{}.tsv", t.target)), &io::render_forecasts(&rows))?;
        if !t.result.pls.is_empty() {
            io::write_file(
                &pls_dir.join(format!("{}.tsv", t.target)),
                &io::render_pls(scores.columns(), labels, &t.result.pls),
            )?;
        }
        if !t.result.vintage_fits.is_empty() {
            let path: Vec<(String, Option<f64>)> =
                aic_path(&t.result.vintage_fits).into_iter().map(|(o, d)| (labels[o].clone(), d)).collect();
            io::write_file(&out.join("aic").join(format!("{}.csv", t.target)), &io::render_aic(&path))?;
        }
        for w in &t.result.warnings {
            warn!("{}: {w}", t.target);
            let _ = writeln!(warnings, "{}\t{w}", t.target);
        }
    }
    io::write_file(&out.join(WARNINGS_FILE), &warnings)?;
    Ok(runs)
}

pub fn forecast_rows(runs: &[ForecastRun], labels: &[String]) -> Vec<ForecastRow> {
    runs.iter()
        .flat_map(|r| {
            (0..r.origins.len()).map(move |i| ForecastRow {
                origin: labels[r.origins[i]].clone(),
                model: r.model,
                forecast: r.forecasts[i],
                realized: r.realized[i],
            })
        })
        .collect()
}

/// Regroups forecast rows into runs; origins become positions in the file's
/// origin order.
pub fn runs_from_rows(rows: &[ForecastRow]) -> Result<(Vec<String>, Vec<ForecastRun>)> {
    let mut origin_index: BTreeMap<&str, usize> = BTreeMap::new();
    let mut origins: Vec<String> = Vec::new();
    let mut runs: Vec<ForecastRun> = Vec::new();
    for r in rows {
        let o = *origin_index.entry(&r.origin).or_insert_with(|| {
            origins.push(r.origin.clone());
            origins.len() - 1
        });
        let run = match runs.iter().position(|x| x.model == r.model) {
            Some(i) => &mut runs[i],
            None => {
                runs.push(ForecastRun {
                    model: r.model,
                    origins: Vec::new(),
                    forecasts: Vec::new(),
                    realized: Vec::new(),
                    coefficients: Vec::new(),
                });
                runs.last_mut().unwrap()
            }
        };
        run.origins.push(o);
        run.forecasts.push(r.forecast);
        run.realized.push(r.realized);
        run.coefficients.push(None);
    }
    Ok((origins, runs))
}

pub struct TargetReport {
    pub target: String,
    pub origins: Vec<String>,
    pub evaluation: Evaluation,
    /// Present when both AR and ERK were run.
    pub aic: Option<Vec<(String, Option<f64>)>>,
}

impl TargetReport {
    /// Share of origins with a positive AIC difference.
    pub fn aic_positive_share(&self) -> Option<f64> {
        let path = self.aic.as_ref()?;
        let pos = path.iter().filter(|(_, d)| d.is_some_and(|d| d > 0.0)).count();
        Some(pos as f64 / path.len().max(1) as f64)
    }

    pub fn render(&self) -> String {
        let kind = match target_kind(&self.target) {
            Ok(TargetKind::Return) => "Returns",
            _ => "Volatility",
        };
        let e = &self.evaluation;
        let mut out = String::new();
        let _ = writeln!(out, "{kind}");
        let _ = writeln!(out, "Target: {}", self.target);
        let _ = writeln!(
            out,
            "Origins: {} .. {} ({} forecasts)",
            self.origins.first().map_or("-", String::as_str),
            self.origins.last().map_or("-", String::as_str),
            self.origins.len()
        );
        let _ = writeln!(out, "Benchmark: {} (MSPE {:.6})", e.benchmark, e.benchmark_mspe);
        let _ = writeln!(out);
        let _ = writeln!(out, "{:<6}{:>12}{:>12}{:>10}", "Model", "Rel. MSPE", "DM stat", "p-value");
        let _ = writeln!(out, "{:<6}{:>12}{:>12}{:>10}", e.benchmark, "1.000  ", "", "");
        for m in &e.models {
            let rel = format!("{:.3}{:<2}", m.relative_mspe, stars(m.dm.p_value));
            let _ = writeln!(out, "{:<6}{:>12}{:>12.3}{:>10.4}", m.model, rel, m.dm.statistic, m.dm.p_value);
        }
        if let Some(share) = self.aic_positive_share() {
            let _ = writeln!(out);
            let _ = writeln!(out, "AIC(AR) - AIC(ERK) > 0 at {:.1}% of origins", 100.0 * share);
        }
        let _ = writeln!(out);
        let _ = writeln!(out, "** and * mark DM significance at the 5% and 10% levels.");
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        let e = &self.evaluation;
        json!({
            "target": self.target,
            "origins": self.origins.len(),
            "first_origin": self.origins.first(),
            "last_origin": self.origins.last(),
            "benchmark": e.benchmark.as_str(),
            "benchmark_mspe": e.benchmark_mspe,
            "models": e.models.iter().map(|m| json!({
                "model": m.model.as_str(),
                "mspe": m.mspe,
                "relative_mspe": m.relative_mspe,
                "dm_statistic": m.dm.statistic,
                "dm_p_value": m.dm.p_value,
                "dm_lags": m.dm.lags,
                "stars": stars(m.dm.p_value),
            })).collect::<Vec<_>>(),
            "aic_positive_share": self.aic_positive_share(),
        })
    }
}

/// Evaluates every forecast file under `<output>/forecasts`.
pub fn report(cfg: &PipelineConfig) -> Result<Vec<TargetReport>> {
    let out = &cfg.output;
    let dir = out.join("forecasts");
    let mut targets: Vec<String> = if cfg.targets.is_empty() {
        std::fs::read_dir(&dir)
            .map_err(|e| Error::io(&dir, e))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "tsv"))
            .filter_map(|p| p.file_stem().and_then(|s| s.to_str()).map(String::from))
            .collect()
    } else {
        cfg.targets.clone()
    };
    targets.sort();
    let mut reports = Vec::new();
    for target in targets {
        let rows = io::read_forecasts(&dir.join(format!("{target}.tsv")))?;
        let (origins, runs) = runs_from_rows(&rows)?;
        let benchmark = if runs.iter().any(|r| r.model == ModelId::Rw) {
            ModelId::Rw
        } else {
            runs.first().map(|r| r.model).ok_or_else(|| Error::validation(format!("{target}: no forecasts")))?
        };
        let evaluation = evaluate(&runs, benchmark, cfg.dm_lags)?;
        let aic_file = out.join("aic").join(format!("{target}.csv"));
        let aic = if aic_file.exists() { Some(io::read_aic(&aic_file)?) } else { None };
        let report = TargetReport { target: target.clone(), origins, evaluation, aic };
        io::write_file(&out.join("report").join(format!("{target}.txt")), &report.render())?;
        reports.push(report);
    }
    let doc = json!({ "targets": reports.iter().map(TargetReport::to_json).collect::<Vec<_>>() });
    io::write_file(&out.join(REPORT_JSON), &(serde_json::to_string_pretty(&doc).expect("json") + "\n"))?;
    Ok(reports)
}
