//! Tokenization, stopword removal, stemming and keyword aliasing.

use std::collections::{HashMap, HashSet};
use std::path::Path;

use semidx_core::Token;

use crate::error::{Error, Result};

pub const DEFAULT_STOPLIST_IT: &str = include_str!("../data/stoplist_it.txt");
pub const DEFAULT_DICTIONARY_IT: &str = include_str!("../data/erk_dictionary_it.txt");
pub const DEMO_LEXICON_IT: &str = include_str!("../data/lexicon_demo_it.tsv");

/// Lowercase runs of letters. Everything else separates tokens.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphabetic())
        .filter(|s| !s.is_empty())
        .map(str::to_lowercase)
        .collect()
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Stoplist {
    words: HashSet<String>,
}

impl Stoplist {
    pub fn empty() -> Self {
        Self::default()
    }

    /// One word per line; `#` starts a comment line.
    pub fn parse(text: &str) -> Self {
        let words = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(str::to_lowercase)
            .collect();
        Self { words }
    }

    pub fn italian() -> Self {
        Self::parse(DEFAULT_STOPLIST_IT)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::validation(format!("stoplist {}: {e}", path.display())))?;
        Ok(Self::parse(&text))
    }

    pub fn contains(&self, word: &str) -> bool {
        self.words.contains(word)
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}

pub fn remove_stopwords(tokens: Vec<String>, stoplist: &Stoplist) -> Vec<String> {
    tokens.into_iter().filter(|t| !stoplist.contains(t)).collect()
}

/// Snowball stemmer selected by language code; `none` disables stemming.
pub struct Stemmer {
    code: String,
    inner: Option<rust_stemmers::Stemmer>,
}

impl std::fmt::Debug for Stemmer {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Stemmer").field("code", &self.code).finish()
    }
}

impl Stemmer {
    pub fn new(code: &str) -> Result<Self> {
        use rust_stemmers::Algorithm::*;
        let code = code.trim().to_ascii_lowercase();
        let algorithm = match code.as_str() {
            "none" => None,
            "it" | "italian" => Some(Italian),
            "en" | "english" => Some(English),
            "fr" | "french" => Some(French),
            "de" | "german" => Some(German),
            "es" | "spanish" => Some(Spanish),
            "pt" | "portuguese" => Some(Portuguese),
            "nl" | "dutch" => Some(Dutch),
            "sv" | "swedish" => Some(Swedish),
            "no" | "norwegian" => Some(Norwegian),
            "da" | "danish" => Some(Danish),
            "fi" | "finnish" => Some(Finnish),
            "ro" | "romanian" => Some(Romanian),
            "ru" | "russian" => Some(Russian),
            "hu" | "hungarian" => Some(Hungarian),
            "tr" | "turkish" => Some(Turkish),
            "ar" | "arabic" => Some(Arabic),
            "el" | "greek" => Some(Greek),
            "ta" | "tamil" => Some(Tamil),
            other => return Err(Error::validation(format!("unsupported stemmer language {other:?}"))),
        };
        Ok(Self { code, inner: algorithm.map(rust_stemmers::Stemmer::create) })
    }

    pub fn code(&self) -> &str {
        &self.code
    }

    pub fn stem(&self, word: &str) -> String {
        match &self.inner {
            Some(s) => s.stem(word).into_owned(),
            None => word.to_string(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ErkEntry {
    pub id: String,
    pub variants: Vec<String>,
}

/// Keyword sets, in file order. Order matters: it breaks matching ties.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ErkDictionary {
    entries: Vec<ErkEntry>,
}

impl ErkDictionary {
    /// Parses `canonical_id: variant | variant ...` lines.
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries: Vec<ErkEntry> = Vec::new();
        let mut ids = HashSet::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = |m: &str| Error::validation(format!("dictionary line {}: {m}", i + 1));
            let (id, rest) = line.split_once(':').ok_or_else(|| bad("expected `id: variants`"))?;
            let id = id.trim();
            if id.is_empty() || id.chars().any(char::is_whitespace) {
                return Err(bad("canonical id must be a nonempty word"));
            }
            if !ids.insert(id.to_string()) {
                return Err(bad(&format!("duplicate canonical id {id:?}")));
            }
            let variants: Vec<String> =
                rest.split('|').map(str::trim).filter(|v| !v.is_empty()).map(String::from).collect();
            if variants.is_empty() {
                return Err(bad(&format!("entry {id:?} has no variants")));
            }
            entries.push(ErkEntry { id: id.to_string(), variants });
        }
        Ok(Self { entries })
    }

    pub fn italian() -> Self {
        Self::parse(DEFAULT_DICTIONARY_IT).expect("shipped dictionary parses")
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::validation(format!("dictionary {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn entries(&self) -> &[ErkEntry] {
        &self.entries
    }

    pub fn ids(&self) -> Vec<String> {
        self.entries.iter().map(|e| e.id.clone()).collect()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum Atom {
    /// Acronym: compared with the lowercase surface form.
    Surface(String),
    Stem(String),
}

#[derive(Clone, Debug)]
struct Pattern {
    entry: usize,
    atoms: Vec<Atom>,
}

/// A cleaned token before aliasing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cleaned {
    pub surface: String,
    pub stem: String,
}

/// The full text pipeline for one configuration.
#[derive(Debug)]
pub struct Preprocessor {
    stoplist: Stoplist,
    stemmer: Stemmer,
    ids: Vec<String>,
    /// Longest first, then dictionary order.
    patterns: Vec<Pattern>,
    by_first: HashMap<Atom, Vec<usize>>,
}

fn is_acronym(word: &str) -> bool {
    word.chars().count() >= 2 && word.chars().all(|c| c.is_alphabetic() && c.is_uppercase())
}

impl Preprocessor {
    pub fn new(dictionary: &ErkDictionary, stoplist: Stoplist, stemmer: Stemmer) -> Result<Self> {
        let mut patterns: Vec<Pattern> = Vec::new();
        let mut owner: HashMap<Vec<Atom>, usize> = HashMap::new();
        for (entry, e) in dictionary.entries().iter().enumerate() {
            for variant in &e.variants {
                let mut atoms = Vec::new();
                for raw in variant.split(|c: char| !c.is_alphabetic()).filter(|s| !s.is_empty()) {
                    if is_acronym(raw) {
                        atoms.push(Atom::Surface(raw.to_lowercase()));
                        continue;
                    }
                    let w = raw.to_lowercase();
                    if !stoplist.contains(&w) {
                        atoms.push(Atom::Stem(stemmer.stem(&w)));
                    }
                }
                if atoms.is_empty() {
                    return Err(Error::validation(format!(
                        "variant {variant:?} of {:?} is empty after cleaning",
                        e.id
                    )));
                }
                match owner.get(&atoms) {
                    Some(&other) if other == entry => continue,
                    Some(&other) => {
                        return Err(Error::validation(format!(
                            "variant {variant:?} of {:?} matches the same tokens as a variant of {:?}",
                            e.id,
                            dictionary.entries()[other].id
                        )))
                    }
                    None => {
                        owner.insert(atoms.clone(), entry);
                        patterns.push(Pattern { entry, atoms });
                    }
                }
            }
        }
        // Stable sort keeps dictionary order among equal lengths.
        patterns.sort_by_key(|p| std::cmp::Reverse(p.atoms.len()));
        let mut by_first: HashMap<Atom, Vec<usize>> = HashMap::new();
        for (i, p) in patterns.iter().enumerate() {
            by_first.entry(p.atoms[0].clone()).or_default().push(i);
        }
        Ok(Self { stoplist, stemmer, ids: dictionary.ids(), patterns, by_first })
    }

    /// Italian defaults: shipped stoplist and dictionary, Snowball stemmer.
    pub fn italian() -> Self {
        Self::new(&ErkDictionary::italian(), Stoplist::italian(), Stemmer::new("it").expect("italian"))
            .expect("shipped dictionary is consistent")
    }

    pub fn erk_ids(&self) -> &[String] {
        &self.ids
    }

    pub fn stemmer(&self) -> &Stemmer {
        &self.stemmer
    }

    /// Tokenize, drop stopwords, stem.
    pub fn clean(&self, text: &str) -> Vec<Cleaned> {
        remove_stopwords(tokenize(text), &self.stoplist)
            .into_iter()
            .map(|surface| Cleaned { stem: self.stemmer.stem(&surface), surface })
            .collect()
    }

    fn matches(&self, p: &Pattern, tokens: &[Cleaned]) -> bool {
        p.atoms.len() <= tokens.len()
            && p.atoms.iter().zip(tokens).all(|(a, t)| match a {
                Atom::Surface(s) => *s == t.surface,
                Atom::Stem(s) => *s == t.stem,
            })
    }

    /// Greedy left-to-right replacement of dictionary variants.
    pub fn alias(&self, tokens: &[Cleaned]) -> Vec<Token> {
        let mut out = Vec::with_capacity(tokens.len());
        let mut i = 0;
        while i < tokens.len() {
            let t = &tokens[i];
            let mut best: Option<usize> = None;
            for key in [Atom::Surface(t.surface.clone()), Atom::Stem(t.stem.clone())] {
                if let Some(cands) = self.by_first.get(&key) {
                    if let Some(&c) = cands.iter().find(|&&c| self.matches(&self.patterns[c], &tokens[i..])) {
                        best = Some(best.map_or(c, |b| b.min(c)));
                    }
                }
            }
            match best {
                Some(c) => {
                    let p = &self.patterns[c];
                    out.push(Token::erk(self.ids[p.entry].as_str()));
                    i += p.atoms.len();
                }
                None => {
                    out.push(Token::word(t.stem.as_str()));
                    i += 1;
                }
            }
        }
        out
    }

    pub fn process(&self, text: &str) -> Vec<Token> {
        self.alias(&self.clean(text))
    }

    /// Maps a lexicon word to the form it takes in token streams.
    pub fn normalize_word(&self, word: &str) -> String {
        let w = word.trim().to_lowercase();
        self.stemmer.stem(&w)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tokenize_examples() {
        assert_eq!(tokenize("Lo Spread sale!"), ["lo", "spread", "sale"]);
        assert!(tokenize("").is_empty());
        assert_eq!(tokenize("COVID-19, quarantena."), ["covid", "quarantena"]);
        assert_eq!(tokenize("Perché l'Università"), ["perché", "l", "università"]);
    }

    #[test]
    fn stoplist_examples() {
        let it = Stoplist::italian();
        let toks = || vec!["lo".to_string(), "spread".into(), "sale".into()];
        assert_eq!(remove_stopwords(toks(), &it), ["spread", "sale"]);
        assert_eq!(remove_stopwords(toks(), &Stoplist::empty()), toks());
        assert!(remove_stopwords(vec![], &it).is_empty());
    }

    #[test]
    fn unknown_language_is_rejected() {
        assert!(Stemmer::new("klingon").is_err());
        assert_eq!(Stemmer::new("none").unwrap().stem("mercati"), "mercati");
    }

    #[test]
    fn shipped_dictionary_has_38_entries() {
        let d = ErkDictionary::italian();
        assert_eq!(d.len(), 38);
        Preprocessor::italian();
    }

    #[test]
    fn alias_examples() {
        let d = ErkDictionary::parse("economic-crisis: crisi economica\nspread: spread\n").unwrap();
        let p = Preprocessor::new(&d, Stoplist::empty(), Stemmer::new("none").unwrap()).unwrap();
        assert_eq!(
            p.process("crisi economica oggi"),
            [Token::erk("economic-crisis"), Token::word("oggi")]
        );
        assert_eq!(p.process("spread"), [Token::erk("spread")]);
        assert_eq!(p.process("nulla qui"), [Token::word("nulla"), Token::word("qui")]);
    }

    #[test]
    fn longest_match_wins_then_dictionary_order() {
        let d = ErkDictionary::parse("a: crisi\nb: crisi economica grave\nc: economica\nd: grave\n").unwrap();
        let p = Preprocessor::new(&d, Stoplist::empty(), Stemmer::new("none").unwrap()).unwrap();
        assert_eq!(p.process("crisi economica grave"), [Token::erk("b")]);
        assert_eq!(p.process("crisi economica"), [Token::erk("a"), Token::erk("c")]);
        // Same tokens under a surface and a stem pattern: the earlier entry wins.
        let d = ErkDictionary::parse("x: UE\ny: ue\n").unwrap();
        let err = Preprocessor::new(&d, Stoplist::empty(), Stemmer::new("none").unwrap());
        assert!(err.is_ok());
        let p = err.unwrap();
        assert_eq!(p.process("ue"), [Token::erk("x")]);
    }

    #[test]
    fn conflicting_variants_are_rejected() {
        let d = ErkDictionary::parse("a: tasse\nb: tassa\n").unwrap();
        assert!(Preprocessor::new(&d, Stoplist::empty(), Stemmer::new("it").unwrap()).is_err());
        assert!(ErkDictionary::parse("a: x\na: y\n").is_err());
        assert!(ErkDictionary::parse("a: |\n").is_err());
    }

    #[test]
    fn stemmed_plural_and_acronyms() {
        let p = Preprocessor::italian();
        assert_eq!(p.process("Le tasse"), [Token::erk("taxes")]);
        assert_eq!(p.process("una tassa"), [Token::erk("taxes")]);
        assert_eq!(p.process("il PIL cala"), [Token::erk("gdp"), Token::word("cal")]);
        assert_eq!(p.process("Banca d'Italia"), [Token::erk("bank-of-italy")]);
        assert_eq!(p.process("i tassi di interesse"), [Token::erk("interest-rates")]);
        assert_eq!(p.process("FTSE MIB in rialzo"), [Token::erk("stock-exchange"), Token::word("rialz")]);
    }
}
