//! Co-occurrence weighted sentiment of keywords.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::network::CooccurrenceNetwork;
use crate::token::Token;

/// Word polarities in `[-1, 1]`, keyed by stemmed word.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PolarityLexicon {
    entries: BTreeMap<String, f64>,
}

impl PolarityLexicon {
    pub fn new() -> Self {
        Self::default()
    }

    /// Inserts a polarity clamped to `[-1, 1]`; rejects repeated words and
    /// non-finite values.
    pub fn insert(&mut self, word: impl Into<String>, polarity: f64) -> Result<()> {
        let word = word.into();
        if !polarity.is_finite() {
            return Err(Error::InvalidData(format!("polarity of {word:?} is not finite")));
        }
        if self.entries.contains_key(&word) {
            return Err(Error::InvalidData(format!("duplicate lexicon entry {word:?}")));
        }
        self.entries.insert(word, polarity.clamp(-1.0, 1.0));
        Ok(())
    }

    /// Parses `word<TAB>polarity` lines. Blank lines and lines starting with
    /// `#` are skipped. `normalize` maps each word to its stored form.
    pub fn parse(text: &str, normalize: impl Fn(&str) -> String) -> Result<Self> {
        let mut lex = Self::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let (word, pol) = line
                .split_once('\t')
                .ok_or_else(|| Error::InvalidData(format!("lexicon line {}: expected word<TAB>polarity", i + 1)))?;
            let pol: f64 = pol
                .trim()
                .parse()
                .map_err(|_| Error::InvalidData(format!("lexicon line {}: bad polarity {pol:?}", i + 1)))?;
            lex.insert(normalize(word.trim()), pol)
                .map_err(|e| Error::InvalidData(format!("lexicon line {}: {e}", i + 1)))?;
        }
        Ok(lex)
    }

    pub fn get(&self, word: &str) -> Option<f64> {
        self.entries.get(word).copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> + '_ {
        self.entries.iter().map(|(k, &v)| (k.as_str(), v))
    }

    /// Every polarity negated.
    pub fn negated(&self) -> Self {
        Self { entries: self.entries.iter().map(|(k, &v)| (k.clone(), -v)).collect() }
    }

    fn polarity(&self, token: &Token) -> Option<f64> {
        match token {
            Token::Word(w) => self.get(w),
            Token::Erk(_) => None,
        }
    }
}

/// Sentiment of one keyword: the co-occurrence-weighted mean polarity of its
/// neighbours that appear in the lexicon, 0 when none does. `None` when the
/// keyword is absent from the network.
pub fn erk_sentiment(net: &CooccurrenceNetwork, erk: &str, lex: &PolarityLexicon) -> Option<f64> {
    period_sentiments(net, &[String::from(erk)], lex)[0]
}

/// [`erk_sentiment`] for several keywords with a single pass over the edges.
pub fn period_sentiments(net: &CooccurrenceNetwork, erks: &[String], lex: &PolarityLexicon) -> Vec<Option<f64>> {
    let mut slot_of: BTreeMap<u32, usize> = BTreeMap::new();
    for (slot, e) in erks.iter().enumerate() {
        if let Some(i) = net.position(&Token::erk(e.as_str())) {
            slot_of.insert(i as u32, slot);
        }
    }
    let polarity: Vec<Option<f64>> = net.nodes().iter().map(|t| lex.polarity(t)).collect();
    let mut num = vec![0.0; erks.len()];
    let mut den = vec![0.0; erks.len()];
    for e in net.edges() {
        for (me, other) in [(e.a, e.b), (e.b, e.a)] {
            if let (Some(&slot), Some(p)) = (slot_of.get(&me), polarity[other as usize]) {
                num[slot] += e.weight as f64 * p;
                den[slot] += e.weight as f64;
            }
        }
    }
    let mut out = vec![None; erks.len()];
    for &slot in slot_of.values() {
        out[slot] = Some(if den[slot] > 0.0 { (num[slot] / den[slot]).clamp(-1.0, 1.0) } else { 0.0 });
    }
    out
}

/// Period-level sentiment: mean over the keywords present, 0 when none is.
pub fn aggregate(values: &[Option<f64>]) -> f64 {
    let present: Vec<f64> = values.iter().flatten().copied().collect();
    if present.is_empty() {
        0.0
    } else {
        present.iter().sum::<f64>() / present.len() as f64
    }
}
