use alloc::string::String;
use core::fmt;

/// A cleaned corpus token: either an ordinary (stemmed) word or a keyword-set
/// entity that stands for every variant of one dictionary entry.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Token {
    Word(String),
    Erk(String),
}

/// Prefix used when an entity token is rendered as text. Word tokens only ever
/// contain letters, so the rendering is unambiguous.
pub const ERK_PREFIX: &str = "erk:";

impl Token {
    pub fn word(s: impl Into<String>) -> Self {
        Token::Word(s.into())
    }

    pub fn erk(id: impl Into<String>) -> Self {
        Token::Erk(id.into())
    }

    pub fn is_erk(&self) -> bool {
        matches!(self, Token::Erk(_))
    }

    pub fn as_str(&self) -> &str {
        match self {
            Token::Word(s) | Token::Erk(s) => s,
        }
    }

    /// Inverse of the `Display` rendering.
    pub fn parse(label: &str) -> Self {
        match label.strip_prefix(ERK_PREFIX) {
            Some(id) => Token::Erk(id.into()),
            None => Token::Word(label.into()),
        }
    }
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Token::Word(s) => f.write_str(s),
            Token::Erk(id) => write!(f, "{ERK_PREFIX}{id}"),
        }
    }
}
