//! Pipeline configuration: a TOML file whose keys can each be overridden by
//! a command-line flag of the same name.

use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use clap::Args;
use semidx_core::forecast::{ModelId, RwPolicy};
use semidx_core::market::RvScale;
use serde::{Deserialize, Serialize};

use crate::corpus::{parse_weekday, Frequency, PeriodCalendar, DEFAULT_LEAD_FRACTION};
use crate::error::{Error, Result};
use crate::io::resolve;
use crate::textprep::{ErkDictionary, Preprocessor, Stemmer, Stoplist};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub corpus: Option<PathBuf>,
    /// Keyword dictionary; the shipped Italian one when absent.
    pub dictionary: Option<PathBuf>,
    /// Stopword list; the shipped Italian one when absent.
    pub stoplist: Option<PathBuf>,
    pub stem_lang: String,
    pub lexicon: Option<PathBuf>,
    /// Directory of `<instrument>.csv` daily price files.
    pub prices: Option<PathBuf>,
    /// `weekly` or `daily`.
    pub frequency: String,
    pub week_end: String,
    /// Calendar range, `YYYY-MM-DD`.
    pub start: Option<String>,
    pub end: Option<String>,
    pub window: usize,
    pub min_edge_weight: u64,
    pub lead_fraction: f64,
    pub rv_scale: String,
    pub pls_components: usize,
    /// First and last forecast target period (by date); each forecast is
    /// made one period earlier.
    pub eval_start: Option<String>,
    pub eval_end: Option<String>,
    pub models: Vec<String>,
    /// Target columns to backtest; all of them when empty.
    pub targets: Vec<String>,
    /// `reference` or `recursive-mean`.
    pub rw_policy: String,
    pub dm_lags: Option<usize>,
    pub output: PathBuf,
    /// Worker threads; 0 picks the number of cores.
    pub threads: usize,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            corpus: None,
            dictionary: None,
            stoplist: None,
            stem_lang: "it".into(),
            lexicon: None,
            prices: None,
            frequency: "weekly".into(),
            week_end: "friday".into(),
            start: None,
            end: None,
            window: semidx_core::network::DEFAULT_WINDOW,
            min_edge_weight: 1,
            lead_fraction: DEFAULT_LEAD_FRACTION,
            rv_scale: RvScale::default().as_str().into(),
            pls_components: 1,
            eval_start: None,
            eval_end: None,
            models: ModelId::ALL.iter().map(|m| m.as_str().to_string()).collect(),
            targets: Vec::new(),
            rw_policy: "reference".into(),
            dm_lags: None,
            output: PathBuf::from("out"),
            threads: 0,
        }
    }
}

/// Flags mirroring every configuration key.
#[derive(Args, Clone, Debug, Default)]
pub struct ConfigArgs {
    /// TOML configuration file; relative paths inside it resolve against its directory.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub corpus: Option<PathBuf>,
    #[arg(long = "erk-dict", global = true)]
    pub dictionary: Option<PathBuf>,
    #[arg(long, global = true)]
    pub stoplist: Option<PathBuf>,
    #[arg(long, global = true)]
    pub stem_lang: Option<String>,
    #[arg(long, global = true)]
    pub lexicon: Option<PathBuf>,
    #[arg(long, global = true)]
    pub prices: Option<PathBuf>,
    #[arg(long, global = true)]
    pub frequency: Option<String>,
    #[arg(long, global = true)]
    pub week_end: Option<String>,
    #[arg(long, global = true)]
    pub start: Option<String>,
    #[arg(long, global = true)]
    pub end: Option<String>,
    #[arg(long, global = true)]
    pub window: Option<usize>,
    #[arg(long, global = true)]
    pub min_edge_weight: Option<u64>,
    #[arg(long, global = true)]
    pub lead_fraction: Option<f64>,
    #[arg(long, global = true)]
    pub rv_scale: Option<String>,
    #[arg(long, global = true)]
    pub pls_components: Option<usize>,
    #[arg(long, global = true)]
    pub eval_start: Option<String>,
    #[arg(long, global = true)]
    pub eval_end: Option<String>,
    /// Comma-separated subset of RW,AR,ERK,EW,SI.
    #[arg(long, global = true, value_delimiter = ',')]
    pub models: Option<Vec<String>>,
    #[arg(long, global = true, value_delimiter = ',')]
    pub targets: Option<Vec<String>>,
    #[arg(long, global = true)]
    pub rw_policy: Option<String>,
    #[arg(long, global = true)]
    pub dm_lags: Option<usize>,
    #[arg(long, short = 'o', global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

impl ConfigArgs {
    /// Loads the config file (if any) and applies the flags on top.
    pub fn resolve(&self) -> Result<PipelineConfig> {
        let mut cfg = match &self.config {
            Some(path) => PipelineConfig::load(path)?,
            None => PipelineConfig::default(),
        };
        macro_rules! set {
            ($($field:ident),*) => {$(
                if let Some(v) = &self.$field {
                    cfg.$field = v.clone().into();
                }
            )*};
        }
        set!(corpus, dictionary, stoplist, lexicon, prices, start, end, eval_start, eval_end);
        set!(stem_lang, frequency, week_end, window, min_edge_weight, lead_fraction, rv_scale);
        set!(pls_components, models, targets, rw_policy, output, threads);
        if self.dm_lags.is_some() {
            cfg.dm_lags = self.dm_lags;
        }
        Ok(cfg)
    }
}

impl PipelineConfig {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::validation(format!("config: {e}")))
    }

    /// Reads a TOML file; relative paths are taken from the file's directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::validation(format!("config {}: {e}", path.display())))?;
        let mut cfg = Self::parse(&text)?;
        let base = path.parent().unwrap_or(Path::new("."));
        for p in [&mut cfg.corpus, &mut cfg.dictionary, &mut cfg.stoplist, &mut cfg.lexicon, &mut cfg.prices]
            .into_iter()
            .flatten()
        {
            *p = resolve(base, p);
        }
        cfg.output = resolve(base, &cfg.output);
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn require_file(&self, what: &str, path: &Option<PathBuf>) -> Result<PathBuf> {
        let p = path.as_ref().ok_or_else(|| Error::validation(format!("no {what} configured")))?;
        if !p.exists() {
            return Err(Error::validation(format!("{what} {} does not exist", p.display())));
        }
        Ok(p.clone())
    }

    pub fn calendar(&self) -> Result<PeriodCalendar> {
        let date = |name: &str, v: &Option<String>| -> Result<NaiveDate> {
            let s = v.as_deref().ok_or_else(|| Error::validation(format!("calendar `{name}` is not set")))?;
            parse_date(s).ok_or_else(|| Error::validation(format!("calendar `{name}`: bad date {s:?}")))
        };
        let frequency = match self.frequency.to_ascii_lowercase().as_str() {
            "weekly" => Frequency::Weekly(
                parse_weekday(&self.week_end)
                    .ok_or_else(|| Error::validation(format!("unknown weekday {:?}", self.week_end)))?,
            ),
            "daily" => Frequency::Daily,
            other => return Err(Error::validation(format!("unknown frequency {other:?}"))),
        };
        PeriodCalendar::new(frequency, date("start", &self.start)?, date("end", &self.end)?)
    }

    pub fn preprocessor(&self) -> Result<Preprocessor> {
        let dictionary = match &self.dictionary {
            Some(_) => ErkDictionary::load(&self.require_file("keyword dictionary", &self.dictionary)?)?,
            None => ErkDictionary::italian(),
        };
        let stoplist = match &self.stoplist {
            Some(_) => Stoplist::load(&self.require_file("stoplist", &self.stoplist)?)?,
            None => Stoplist::italian(),
        };
        Preprocessor::new(&dictionary, stoplist, Stemmer::new(&self.stem_lang)?)
    }

    pub fn check_text_settings(&self) -> Result<()> {
        if self.window == 0 {
            return Err(Error::validation("co-occurrence window must be at least 1"));
        }
        if self.min_edge_weight == 0 {
            return Err(Error::validation("min_edge_weight must be at least 1"));
        }
        if !(self.lead_fraction > 0.0 && self.lead_fraction <= 1.0) {
            return Err(Error::validation(format!("lead_fraction {} is outside (0, 1]", self.lead_fraction)));
        }
        Ok(())
    }

    pub fn rv_scale(&self) -> Result<RvScale> {
        RvScale::parse(&self.rv_scale).ok_or_else(|| Error::validation(format!("unknown rv_scale {:?}", self.rv_scale)))
    }

    pub fn rw_policy(&self) -> Result<RwPolicy> {
        match self.rw_policy.to_ascii_lowercase().as_str() {
            "reference" => Ok(RwPolicy::Reference),
            "recursive-mean" | "mean" => Ok(RwPolicy::RecursiveMean),
            other => Err(Error::validation(format!("unknown rw_policy {other:?}"))),
        }
    }

    pub fn models(&self) -> Result<Vec<ModelId>> {
        let mut out: Vec<ModelId> = Vec::new();
        for m in &self.models {
            let id = ModelId::parse(m).ok_or_else(|| Error::validation(format!("unknown model {m:?}")))?;
            if !out.contains(&id) {
                out.push(id);
            }
        }
        if out.is_empty() {
            return Err(Error::validation("no models selected"));
        }
        Ok(out)
    }
}

pub fn parse_date(s: &str) -> Option<NaiveDate> {
    NaiveDate::parse_from_str(s.trim(), "%Y-%m-%d").ok()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip_through_toml() {
        let cfg = PipelineConfig::default();
        assert_eq!(PipelineConfig::parse(&cfg.to_toml()).unwrap(), cfg);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(PipelineConfig::parse("windw = 3").is_err());
        let cfg = PipelineConfig::parse("window = 5\nmodels = [\"rw\", \"ERK\"]").unwrap();
        assert_eq!(cfg.window, 5);
        assert_eq!(cfg.models().unwrap(), [ModelId::Rw, ModelId::Erk]);
    }

    #[test]
    fn flags_override_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.toml");
        std::fs::write(&path, "window = 5\ncorpus = \"news.jsonl\"\n").unwrap();
        let args = ConfigArgs { config: Some(path), window: Some(2), ..Default::default() };
        let cfg = args.resolve().unwrap();
        assert_eq!(cfg.window, 2);
        assert_eq!(cfg.corpus.unwrap(), dir.path().join("news.jsonl"));
    }

    #[test]
    fn missing_dictionary_is_a_validation_error() {
        let cfg = PipelineConfig { dictionary: Some("/nonexistent/dict.txt".into()), ..Default::default() };
        let err = cfg.preprocessor().unwrap_err();
        assert_eq!(err.exit_code(), 1);
    }
}
