use proptest::prelude::*;
use semidx::textprep::{remove_stopwords, tokenize, ErkDictionary, Preprocessor, Stemmer, Stoplist};
use semidx_core::Token;

/// (word, stem, stem of the stem) from the reference Snowball implementation.
const ITALIAN_STEMS: &[(&str, &str, &str)] = &[
    ("mercati", "merc", "merc"),
    ("mercato", "merc", "merc"),
    ("tasse", "tass", "tass"),
    ("tassa", "tass", "tass"),
    ("tassi", "tass", "tass"),
    ("interesse", "interess", "interess"),
    ("crisi", "cris", "cris"),
    ("economica", "econom", "econom"),
    ("economico", "econom", "econom"),
    ("recessione", "recession", "recession"),
    ("risparmi", "risp", "risp"),
    ("risparmiatori", "risparm", "risparm"),
    ("sindacati", "sindac", "sindac"),
    ("sindacato", "sindac", "sindac"),
    ("consumi", "consum", "consum"),
    ("consumatori", "consum", "consum"),
    ("quarantena", "quaranten", "quaranten"),
    ("inflazione", "inflazion", "inflazion"),
    ("prezzi", "prezz", "prezz"),
    ("prezzo", "prezz", "prezz"),
    ("disoccupazione", "disoccup", "disoccup"),
    ("licenziamenti", "licenz", "licenz"),
    ("italia", "ital", "ital"),
    ("spread", "spread", "spread"),
    ("euro", "eur", "eur"),
    ("petrolio", "petrol", "petrol"),
    ("finanziari", "finanziar", "finanz"),
    ("finanziario", "finanziar", "finanz"),
    ("europea", "europe", "europ"),
    ("europeo", "europe", "europ"),
    ("unione", "union", "union"),
    ("pandemia", "pandem", "pandem"),
    ("economia", "econom", "econom"),
    ("reale", "real", "real"),
    ("politica", "polit", "polit"),
    ("monetaria", "monetar", "monet"),
    ("patrimoniale", "patrimonial", "patrimonial"),
    ("tassazione", "tassazion", "tassazion"),
    ("scioperi", "scioper", "scioper"),
    ("sciopero", "scioper", "scioper"),
    ("commissione", "commission", "commission"),
    ("debito", "deb", "deb"),
    ("pubblico", "pubblic", "pubblic"),
    ("lavoro", "lavor", "lavor"),
    ("distanza", "distanz", "distanz"),
    ("banca", "banc", "banc"),
    ("banche", "banc", "banc"),
    ("borsa", "bors", "bors"),
    ("italiana", "italian", "italian"),
    ("governo", "govern", "govern"),
    ("ministro", "ministr", "ministr"),
    ("presidente", "president", "president"),
    ("aumento", "aument", "aument"),
    ("crescita", "cresc", "cresc"),
    ("calo", "cal", "cal"),
    ("perdite", "perd", "perd"),
    ("guadagni", "guadagn", "guadagn"),
    ("azioni", "azion", "azion"),
    ("titoli", "titol", "titol"),
    ("obbligazioni", "obblig", "obblig"),
    ("rendimenti", "rend", "rend"),
    ("investitori", "investitor", "investitor"),
    ("imprese", "impres", "impres"),
    ("aziende", "azi", "azi"),
    ("industria", "industr", "industr"),
    ("produzione", "produzion", "produzion"),
    ("esportazioni", "esport", "esport"),
    ("importazioni", "import", "import"),
    ("lavoratori", "lavor", "lavor"),
    ("salari", "salar", "sal"),
    ("stipendi", "stip", "stip"),
    ("pensioni", "pension", "pension"),
    ("famiglie", "famigl", "famigl"),
    ("redditi", "redd", "redd"),
    ("fiscale", "fiscal", "fiscal"),
    ("bilancio", "bilanc", "bilanc"),
    ("manovra", "manovr", "manovr"),
    ("riforma", "riform", "riform"),
    ("emergenza", "emergent", "emergent"),
    ("sanitaria", "sanitar", "sanit"),
    ("contagi", "contag", "contag"),
    ("vaccino", "vaccin", "vaccin"),
    ("ospedali", "ospedal", "ospedal"),
    ("chiusura", "chiusur", "chiusur"),
    ("riapertura", "riapertur", "riapertur"),
    ("negozi", "negoz", "negoz"),
    ("turismo", "turism", "turism"),
    ("trasporti", "trasport", "trasport"),
    ("energia", "energ", "energ"),
    ("gas", "gas", "gas"),
    ("elettricità", "elettr", "elettr"),
    ("petroliere", "petrol", "petrol"),
    ("mercatini", "mercatin", "mercatin"),
    ("bancario", "bancar", "banc"),
    ("creditizio", "creditiz", "creditiz"),
    ("prestiti", "prest", "prest"),
    ("mutui", "mutu", "mutu"),
    ("sofferenze", "sofferent", "sofferent"),
    ("fallimento", "fall", "fall"),
    ("ripresa", "ripres", "ripres"),
    ("rilancio", "rilanc", "rilanc"),
    ("sostegno", "sostegn", "sostegn"),
    ("aiuti", "aiut", "aiut"),
    ("fondi", "fond", "fond"),
    ("europei", "europe", "europ"),
    ("stabilità", "stabil", "stabil"),
    ("liquidità", "liquid", "liquid"),
    ("volatilità", "volatil", "volatil"),
    ("rischio", "risc", "risc"),
    ("fiducia", "fiduc", "fiduc"),
    ("incertezza", "incertezz", "incertezz"),
    ("speculazione", "specul", "specul"),
    ("quotazioni", "quotazion", "quotazion"),
    ("rialzo", "rialz", "rialz"),
    ("ribasso", "ribass", "ribass"),
    ("chiusure", "chiusur", "chiusur"),
];

#[test]
fn snowball_italian_matches_reference() {
    let s = Stemmer::new("it").unwrap();
    for &(word, first, second) in ITALIAN_STEMS {
        assert_eq!(s.stem(word), first, "stem of {word}");
        assert_eq!(s.stem(first), second, "stem of {first}");
    }
}

#[test]
fn snowball_italian_is_not_always_idempotent() {
    assert!(ITALIAN_STEMS.iter().any(|(_, a, b)| a != b));
}

#[test]
fn disabled_stemmer_is_identity() {
    let s = Stemmer::new("none").unwrap();
    assert_eq!(s.stem("mercati"), "mercati");
}

#[test]
fn shipped_dictionary_aliases_each_first_variant() {
    let pre = Preprocessor::italian();
    let dict = ErkDictionary::italian();
    for e in dict.entries() {
        for v in &e.variants {
            assert_eq!(pre.process(v), vec![Token::erk(e.id.as_str())], "variant {v:?}");
        }
    }
}

#[test]
fn mixed_sentence() {
    let pre = Preprocessor::italian();
    let got = pre.process("Lo spread sale mentre la BCE valuta il quantitative easing e i tassi di interesse");
    let erks: Vec<&str> = got.iter().filter(|t| t.is_erk()).map(|t| t.as_str()).collect();
    assert_eq!(erks, ["spread", "quantitative-easing", "interest-rates"]);
}

fn words() -> impl Strategy<Value = String> {
    prop::collection::vec(
        prop_oneof![
            "[a-zàèéìòù]{1,10}",
            Just("spread".to_string()),
            Just("tassi".to_string()),
            Just("di".to_string()),
            Just("interesse".to_string()),
            Just("PIL".to_string()),
            Just("Banca".to_string()),
            Just("d'Italia".to_string()),
        ],
        0..40,
    )
    .prop_map(|w| w.join(" "))
}

proptest! {
    #[test]
    fn aliasing_never_adds_tokens(text in words()) {
        let pre = Preprocessor::italian();
        let cleaned = pre.clean(&text);
        let out = pre.alias(&cleaned);
        prop_assert!(out.len() <= cleaned.len());
    }

    #[test]
    fn emitted_keywords_are_in_the_dictionary(text in words()) {
        let pre = Preprocessor::italian();
        for t in pre.process(&text) {
            if t.is_erk() {
                prop_assert!(pre.erk_ids().iter().any(|id| id == t.as_str()));
            }
        }
    }

    #[test]
    fn processing_is_deterministic(text in words()) {
        let a = Preprocessor::italian().process(&text);
        let b = Preprocessor::italian().process(&text);
        prop_assert_eq!(a, b);
    }

    #[test]
    fn tokens_are_lowercase_alphabetic(text in "\\PC{0,80}") {
        for t in tokenize(&text) {
            prop_assert!(!t.is_empty());
            prop_assert!(t.chars().all(|c| c.is_alphabetic()));
            prop_assert_eq!(t.to_lowercase(), t.clone());
        }
    }

    #[test]
    fn stopword_removal_keeps_order(text in words()) {
        let tokens = tokenize(&text);
        let kept = remove_stopwords(tokens.clone(), &Stoplist::italian());
        let mut it = tokens.iter();
        for k in &kept {
            prop_assert!(it.any(|t| t == k));
        }
    }
}
