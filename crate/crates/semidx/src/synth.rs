//! Seeded synthetic fixtures: a news corpus in which one keyword's mention
//! count follows a latent factor, and daily prices whose weekly range
//! volatility is an ARX process driven by that same factor.

use std::path::{Path, PathBuf};

use chrono::{Duration, NaiveDate, Weekday};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Poisson};
use semidx_core::market::{DailyBar, RvScale};
use semidx_core::Token;

use crate::config::PipelineConfig;
use crate::corpus::{write_corpus, NewsDocument};
use crate::error::Result;
use crate::io::{self, fmt_f64};
use crate::textprep::{ErkDictionary, Preprocessor, DEFAULT_DICTIONARY_IT};

#[derive(Clone, Debug, PartialEq)]
pub struct SynthSpec {
    pub seed: u64,
    pub weeks: usize,
    /// Friday closing the first week.
    pub first_week_end: NaiveDate,
    pub docs_per_week: usize,
    pub body_words: usize,
    pub vocabulary: usize,
    /// Keyword whose weekly mentions are `base + slope · x_t`.
    pub signal_erk: String,
    pub signal_base: f64,
    pub signal_slope: f64,
    /// Target law `y_{t+1} = alpha + gamma · y_t + beta · x_t + e`.
    pub alpha: f64,
    pub gamma: f64,
    pub beta: f64,
    pub noise_sd: f64,
    /// AR(1) coefficient of the unit-variance latent factor.
    pub latent_ar: f64,
    /// Filler words given a uniformly random polarity.
    pub lexicon_size: usize,
    pub rv_scale: RvScale,
    /// Forecast origins at the end of the sample.
    pub eval_origins: usize,
    pub instrument: String,
}

impl Default for SynthSpec {
    fn default() -> Self {
        Self {
            seed: 20200313,
            weeks: 200,
            first_week_end: NaiveDate::from_ymd_opt(2017, 1, 6).expect("date"),
            docs_per_week: 60,
            body_words: 50,
            vocabulary: 300,
            signal_erk: "spread".into(),
            signal_base: 12.0,
            signal_slope: 5.0,
            alpha: 3.0,
            gamma: 0.7,
            beta: 1.0,
            noise_sd: 0.2,
            latent_ar: 0.7,
            lexicon_size: 300,
            rv_scale: RvScale::default(),
            eval_origins: 70,
            instrument: "SYNTH".into(),
        }
    }
}

pub struct SynthFixture {
    pub spec: SynthSpec,
    pub documents: Vec<NewsDocument>,
    pub prices: Vec<(NaiveDate, DailyBar)>,
    /// Latent factor per week.
    pub latent: Vec<f64>,
    /// Weekly volatility target per week.
    pub target: Vec<f64>,
    pub lexicon: Vec<(String, f64)>,
    pub dictionary: String,
}

const SYLLABLES: [&str; 24] = [
    "ba", "be", "bo", "ca", "co", "cu", "da", "de", "du", "fa", "fe", "fo", "ga", "go", "la", "lu", "ma", "mo", "na",
    "ne", "pa", "po", "ra", "ru",
];

/// Pseudo-words that survive cleaning as themselves and never alias.
fn filler_vocabulary(rng: &mut ChaCha8Rng, size: usize, pre: &Preprocessor) -> Vec<String> {
    let mut words = Vec::with_capacity(size);
    let mut seen = std::collections::HashSet::new();
    while words.len() < size {
        let w: String = (0..3).map(|_| *SYLLABLES.choose(rng).expect("nonempty")).collect::<String>() + "ti";
        let stem = pre.normalize_word(&w);
        if !seen.insert(stem.clone()) {
            continue;
        }
        if pre.process(&w) == [Token::word(stem)] {
            words.push(w);
        }
    }
    words
}

/// First variant of each dictionary entry, as it would appear in text.
fn mention_text(dictionary: &ErkDictionary, id: &str) -> String {
    let e = dictionary.entries().iter().find(|e| e.id == id).expect("keyword in dictionary");
    e.variants[0].clone()
}

pub fn generate(spec: &SynthSpec) -> SynthFixture {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let pre = Preprocessor::italian();
    let dictionary = ErkDictionary::italian();
    let vocab = filler_vocabulary(&mut rng, spec.vocabulary, &pre);
    // Zipf-like filler frequencies.
    let cumulative: Vec<f64> = (1..=vocab.len())
        .scan(0.0, |acc, r| {
            *acc += 1.0 / r as f64;
            Some(*acc)
        })
        .collect();
    let total = *cumulative.last().expect("vocabulary");
    let draw_word = |rng: &mut ChaCha8Rng| -> &str {
        let u = rng.gen::<f64>() * total;
        let i = cumulative.partition_point(|&c| c < u).min(vocab.len() - 1);
        &vocab[i]
    };

    let std_normal = Normal::new(0.0, 1.0).expect("normal");
    let noise = Normal::new(0.0, spec.noise_sd).expect("noise");
    let innovation_sd: f64 = (1.0 - spec.latent_ar * spec.latent_ar).sqrt();
    let mut latent = Vec::with_capacity(spec.weeks);
    let mut x: f64 = std_normal.sample(&mut rng);
    for _ in 0..spec.weeks {
        latent.push(x);
        x = spec.latent_ar * x + innovation_sd * std_normal.sample(&mut rng);
    }
    let mut target = vec![spec.alpha / (1.0 - spec.gamma); spec.weeks];
    for t in 1..spec.weeks {
        let y = spec.alpha + spec.gamma * target[t - 1] + spec.beta * latent[t - 1] + noise.sample(&mut rng);
        target[t] = y.max(0.05);
    }

    let noise_ids: Vec<String> =
        dictionary.ids().into_iter().filter(|id| *id != spec.signal_erk).collect();
    let noise_rates: Vec<f64> = noise_ids.iter().map(|_| rng.gen_range(2.0..12.0)).collect();

    let mut documents = Vec::new();
    for (week, &x) in latent.iter().enumerate() {
        let end = spec.first_week_end + Duration::weeks(week as i64);
        let mut mentions: Vec<String> = Vec::new();
        let m = (spec.signal_base + spec.signal_slope * x).round().max(0.0) as usize;
        mentions.extend(std::iter::repeat_n(mention_text(&dictionary, &spec.signal_erk), m));
        for (id, &rate) in noise_ids.iter().zip(&noise_rates) {
            let k = Poisson::new(rate).expect("rate").sample(&mut rng) as usize;
            mentions.extend(std::iter::repeat_n(mention_text(&dictionary, id), k));
        }
        mentions.shuffle(&mut rng);
        let mut titles: Vec<Vec<String>> = vec![Vec::new(); spec.docs_per_week];
        for (i, mtext) in mentions.into_iter().enumerate() {
            titles[i % spec.docs_per_week].push(mtext);
        }
        for (d, mut title) in titles.into_iter().enumerate() {
            for _ in 0..3 {
                let pos = rng.gen_range(0..=title.len());
                title.insert(pos, draw_word(&mut rng).to_string());
            }
            let body: Vec<&str> = (0..spec.body_words).map(|_| draw_word(&mut rng)).collect();
            let day = end - Duration::days(rng.gen_range(0..5));
            let ts = day
                .and_hms_opt(rng.gen_range(6..22), rng.gen_range(0..60), rng.gen_range(0..60))
                .expect("time")
                .and_utc();
            documents.push(NewsDocument {
                id: format!("w{week:03}-d{d:03}"),
                timestamp: ts,
                title: capitalize(&title.join(" ")),
                body: body.join(" ") + ".",
            });
        }
    }

    let prices = synth_prices(&mut rng, spec, &target);
    let mut lex_words: Vec<String> = vocab.clone();
    lex_words.shuffle(&mut rng);
    lex_words.truncate(spec.lexicon_size);
    lex_words.sort();
    let lexicon = lex_words.into_iter().map(|w| (w, rng.gen_range(-1.0..1.0))).collect();

    SynthFixture {
        spec: spec.clone(),
        documents,
        prices,
        latent,
        target,
        lexicon,
        dictionary: DEFAULT_DICTIONARY_IT.to_string(),
    }
}

fn capitalize(s: &str) -> String {
    let mut c = s.chars();
    match c.next() {
        Some(f) => f.to_uppercase().chain(c).collect(),
        None => String::new(),
    }
}

/// Five trading days per week. Closes follow a random walk; Wednesday spans
/// the weekly range whose Parkinson estimate equals the target.
fn synth_prices(rng: &mut ChaCha8Rng, spec: &SynthSpec, target: &[f64]) -> Vec<(NaiveDate, DailyBar)> {
    let step: Normal<f64> = Normal::new(0.0, 0.02).expect("normal");
    let mut level: f64 = 100.0;
    let mut out = Vec::new();
    for (week, &y) in target.iter().enumerate() {
        let friday = spec.first_week_end + Duration::weeks(week as i64);
        level *= step.sample(rng).exp();
        let range = (4.0 * std::f64::consts::LN_2 * y / spec.rv_scale.factor()).sqrt();
        for back in (0..5).rev() {
            let date = friday - Duration::days(back);
            let half = if date.weekday_is(Weekday::Wed) { range / 2.0 } else { range / 4.0 };
            out.push((date, DailyBar { close: level, high: level * half.exp(), low: level * (-half).exp() }));
        }
    }
    out
}

trait WeekdayIs {
    fn weekday_is(&self, d: Weekday) -> bool;
}

impl WeekdayIs for NaiveDate {
    fn weekday_is(&self, d: Weekday) -> bool {
        chrono::Datelike::weekday(self) == d
    }
}

impl SynthFixture {
    pub fn week_end(&self, week: usize) -> NaiveDate {
        self.spec.first_week_end + Duration::weeks(week as i64)
    }

    /// Configuration for the whole pipeline, with relative paths.
    pub fn config(&self) -> PipelineConfig {
        let last = self.spec.weeks - 1;
        PipelineConfig {
            corpus: Some("corpus.jsonl".into()),
            dictionary: Some("dictionary.txt".into()),
            lexicon: Some("lexicon.tsv".into()),
            prices: Some("prices".into()),
            start: Some((self.spec.first_week_end - Duration::days(4)).to_string()),
            end: Some(self.week_end(last).to_string()),
            rv_scale: self.spec.rv_scale.as_str().into(),
            eval_start: Some(self.week_end(last + 1 - self.spec.eval_origins).to_string()),
            eval_end: Some(self.week_end(last).to_string()),
            targets: vec![format!("{}.rv", self.spec.instrument)],
            output: "out".into(),
            ..PipelineConfig::default()
        }
    }

    /// Writes the corpus, dictionary, lexicon, prices, latent series and a
    /// config file into `dir`; returns the config path.
    pub fn write(&self, dir: &Path) -> Result<PathBuf> {
        std::fs::create_dir_all(dir).map_err(|e| crate::error::Error::io(dir, e))?;
        write_corpus(&dir.join("corpus.jsonl"), &self.documents)?;
        io::write_file(&dir.join("dictionary.txt"), &self.dictionary)?;
        let mut lex = String::from("# random polarities\n");
        for (w, p) in &self.lexicon {
            lex.push_str(&format!("{w}\t{}\n", fmt_f64(*p)));
        }
        io::write_file(&dir.join("lexicon.tsv"), &lex)?;
        io::write_prices(&dir.join("prices").join(format!("{}.csv", self.spec.instrument)), &self.prices)?;
        let mut latent = String::from("week\tx\ty\n");
        for t in 0..self.spec.weeks {
            latent.push_str(&format!("{}\t{}\t{}\n", self.week_end(t), fmt_f64(self.latent[t]), fmt_f64(self.target[t])));
        }
        io::write_file(&dir.join("latent.tsv"), &latent)?;
        let path = dir.join("config.toml");
        io::write_file(&path, &self.config().to_toml())?;
        Ok(path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use semidx_core::market::{aggregate_periods, weekly_parkinson};

    #[test]
    fn generation_is_seeded() {
        let spec = SynthSpec { weeks: 20, docs_per_week: 5, ..SynthSpec::default() };
        let a = generate(&spec);
        let b = generate(&spec);
        assert_eq!(a.documents, b.documents);
        assert_eq!(a.prices, b.prices);
        let c = generate(&SynthSpec { seed: 1, ..spec });
        assert_ne!(a.documents, c.documents);
    }

    #[test]
    fn weekly_range_volatility_reproduces_target() {
        let spec = SynthSpec { weeks: 30, docs_per_week: 2, ..SynthSpec::default() };
        let f = generate(&spec);
        let days: Vec<(usize, DailyBar)> = f.prices.iter().enumerate().map(|(i, (_, b))| (i / 5, *b)).collect();
        let weeks = aggregate_periods(&days, spec.weeks).unwrap();
        let rv = weekly_parkinson(&weeks, spec.rv_scale).unwrap();
        for (r, y) in rv.iter().zip(&f.target) {
            assert!((r.unwrap() - y).abs() < 1e-9 * y.max(1.0));
        }
    }
}
