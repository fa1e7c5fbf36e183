//! Configurations: one point in the sweep space.
//!
//! A [`Configuration`] is the assignment of the 15 boolean transformation
//! flags plus a non-empty set of tokenizers. Its canonical textual form, the
//! config id, looks like
//!
//! ```text
//! del-d1=0,del-d2=0,del-diac=1,...,usr=1;tok=w1+q3
//! ```
//!
//! with flags in alphabetical order and tokenizers in the fixed order
//! `w1, w2, q3, q4, q5, q6, q7`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConfigError {
    #[error("unknown flag `{0}`")]
    UnknownFlag(String),
    #[error("unknown tokenizer `{0}`")]
    UnknownTokenizer(String),
    #[error("flag `{0}` must be 0 or 1, got `{1}`")]
    BadFlagValue(String, String),
    #[error("flag `{0}` given more than once")]
    DuplicateFlag(String),
    #[error("missing flag `{0}`")]
    MissingFlag(&'static str),
    #[error("empty tokenizer set")]
    EmptyTokenizers,
    #[error("malformed configuration `{0}`")]
    Malformed(String),
}

/// The 15 boolean transformation flags.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Flag {
    DelD1,
    DelD2,
    DelDiac,
    DelEnt,
    DelPunc,
    DelSw,
    Emo,
    Lc,
    Lem,
    Neg,
    Num,
    Stem,
    Tfidf,
    Url,
    Usr,
}

impl Flag {
    /// Alphabetical by name; this is the order used in config ids.
    pub const ALL: [Flag; 15] = [
        Flag::DelD1,
        Flag::DelD2,
        Flag::DelDiac,
        Flag::DelEnt,
        Flag::DelPunc,
        Flag::DelSw,
        Flag::Emo,
        Flag::Lc,
        Flag::Lem,
        Flag::Neg,
        Flag::Num,
        Flag::Stem,
        Flag::Tfidf,
        Flag::Url,
        Flag::Usr,
    ];

    /// Column order of the published top-k tables.
    pub const TABLE_ORDER: [Flag; 15] = [
        Flag::Tfidf,
        Flag::DelSw,
        Flag::Lem,
        Flag::Stem,
        Flag::DelD1,
        Flag::DelD2,
        Flag::DelPunc,
        Flag::DelDiac,
        Flag::DelEnt,
        Flag::Emo,
        Flag::Num,
        Flag::Url,
        Flag::Usr,
        Flag::Lc,
        Flag::Neg,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Flag::DelD1 => "del-d1",
            Flag::DelD2 => "del-d2",
            Flag::DelDiac => "del-diac",
            Flag::DelEnt => "del-ent",
            Flag::DelPunc => "del-punc",
            Flag::DelSw => "del-sw",
            Flag::Emo => "emo",
            Flag::Lc => "lc",
            Flag::Lem => "lem",
            Flag::Neg => "neg",
            Flag::Num => "num",
            Flag::Stem => "stem",
            Flag::Tfidf => "tfidf",
            Flag::Url => "url",
            Flag::Usr => "usr",
        }
    }

    /// Position in [`Flag::ALL`].
    pub fn index(self) -> usize {
        self as usize
    }

    /// Accepts both `del-sw` and `del_sw` spellings.
    pub fn from_name(name: &str) -> Result<Flag, ConfigError> {
        let wanted = name.trim().replace('_', "-");
        Flag::ALL
            .iter()
            .copied()
            .find(|f| f.name() == wanted)
            .ok_or_else(|| ConfigError::UnknownFlag(name.trim().to_string()))
    }
}

impl fmt::Display for Flag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Bit set over [`Flag`], bit `i` standing for `Flag::ALL[i]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct FlagSet(u16);

impl FlagSet {
    pub const COUNT: usize = 15;
    /// Number of distinct flag assignments, 2^15.
    pub const SPACE: u32 = 1 << Self::COUNT;

    pub fn empty() -> Self {
        FlagSet(0)
    }

    pub fn from_flags<I: IntoIterator<Item = Flag>>(flags: I) -> Self {
        let mut set = FlagSet::empty();
        for f in flags {
            set.set(f, true);
        }
        set
    }

    /// Flag assignment number `ordinal` in canonical id order: the first
    /// flag of [`Flag::ALL`] is the most significant bit.
    pub fn from_ordinal(ordinal: u32) -> Self {
        debug_assert!(ordinal < Self::SPACE);
        let mut bits = 0u16;
        for i in 0..Self::COUNT {
            if ordinal & (1 << (Self::COUNT - 1 - i)) != 0 {
                bits |= 1 << i;
            }
        }
        FlagSet(bits)
    }

    pub fn contains(self, flag: Flag) -> bool {
        self.0 & (1 << flag.index()) != 0
    }

    pub fn set(&mut self, flag: Flag, on: bool) {
        if on {
            self.0 |= 1 << flag.index();
        } else {
            self.0 &= !(1 << flag.index());
        }
    }

    pub fn with(mut self, flag: Flag, on: bool) -> Self {
        self.set(flag, on);
        self
    }

    pub fn iter_on(self) -> impl Iterator<Item = Flag> {
        Flag::ALL.into_iter().filter(move |f| self.contains(*f))
    }

    pub fn bits(self) -> u16 {
        self.0
    }

    /// `flag=0|1` pairs joined by commas, alphabetical.
    pub fn canonical(self) -> String {
        let mut out = String::with_capacity(110);
        for (i, flag) in Flag::ALL.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            out.push_str(flag.name());
            out.push('=');
            out.push(if self.contains(*flag) { '1' } else { '0' });
        }
        out
    }
}

/// One of the seven tokenizers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Tokenizer {
    W1,
    W2,
    Q3,
    Q4,
    Q5,
    Q6,
    Q7,
}

pub enum TokenizerKind {
    Words(usize),
    QGrams(usize),
}

impl Tokenizer {
    pub const ALL: [Tokenizer; 7] = [
        Tokenizer::W1,
        Tokenizer::W2,
        Tokenizer::Q3,
        Tokenizer::Q4,
        Tokenizer::Q5,
        Tokenizer::Q6,
        Tokenizer::Q7,
    ];

    /// Column order of the published combination tables (2-words first).
    pub const TABLE_ORDER: [Tokenizer; 7] = [
        Tokenizer::W2,
        Tokenizer::W1,
        Tokenizer::Q3,
        Tokenizer::Q4,
        Tokenizer::Q5,
        Tokenizer::Q6,
        Tokenizer::Q7,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Tokenizer::W1 => "w1",
            Tokenizer::W2 => "w2",
            Tokenizer::Q3 => "q3",
            Tokenizer::Q4 => "q4",
            Tokenizer::Q5 => "q5",
            Tokenizer::Q6 => "q6",
            Tokenizer::Q7 => "q7",
        }
    }

    pub fn kind(self) -> TokenizerKind {
        match self {
            Tokenizer::W1 => TokenizerKind::Words(1),
            Tokenizer::W2 => TokenizerKind::Words(2),
            Tokenizer::Q3 => TokenizerKind::QGrams(3),
            Tokenizer::Q4 => TokenizerKind::QGrams(4),
            Tokenizer::Q5 => TokenizerKind::QGrams(5),
            Tokenizer::Q6 => TokenizerKind::QGrams(6),
            Tokenizer::Q7 => TokenizerKind::QGrams(7),
        }
    }

    fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Tokenizer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Tokenizer {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Tokenizer::ALL
            .iter()
            .copied()
            .find(|t| t.name() == s.trim())
            .ok_or_else(|| ConfigError::UnknownTokenizer(s.trim().to_string()))
    }
}

/// A non-empty subset of the seven tokenizers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TokenizerSet(u8);

impl TokenizerSet {
    /// 2^7 - 1 non-empty subsets.
    pub const SUBSETS: usize = 127;

    pub fn new<I: IntoIterator<Item = Tokenizer>>(tokenizers: I) -> Result<Self, ConfigError> {
        let bits = tokenizers
            .into_iter()
            .fold(0u8, |acc, t| acc | (1 << t.index()));
        Self::from_bits(bits)
    }

    pub fn single(tokenizer: Tokenizer) -> Self {
        TokenizerSet(1 << tokenizer.index())
    }

    pub fn from_bits(bits: u8) -> Result<Self, ConfigError> {
        let bits = bits & 0x7f;
        if bits == 0 {
            return Err(ConfigError::EmptyTokenizers);
        }
        Ok(TokenizerSet(bits))
    }

    pub fn bits(self) -> u8 {
        self.0
    }

    pub fn contains(self, t: Tokenizer) -> bool {
        self.0 & (1 << t.index()) != 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        false
    }

    pub fn iter(self) -> impl Iterator<Item = Tokenizer> {
        Tokenizer::ALL.into_iter().filter(move |t| self.contains(*t))
    }

    /// Every non-empty subset, sorted by canonical name.
    pub fn all_subsets() -> Vec<TokenizerSet> {
        let mut sets: Vec<TokenizerSet> = (1u8..=127).map(TokenizerSet).collect();
        sets.sort_by_cached_key(|s| s.canonical());
        sets
    }

    /// Tokenizer names joined by `+` in the fixed order, e.g. `w1+q3+q4`.
    pub fn canonical(self) -> String {
        self.iter().map(Tokenizer::name).collect::<Vec<_>>().join("+")
    }
}

impl fmt::Display for TokenizerSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.canonical())
    }
}

impl FromStr for TokenizerSet {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let tokens = s
            .split('+')
            .filter(|p| !p.trim().is_empty())
            .map(Tokenizer::from_str)
            .collect::<Result<Vec<_>, _>>()?;
        TokenizerSet::new(tokens)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Configuration {
    pub flags: FlagSet,
    pub tokenizers: TokenizerSet,
}

impl Configuration {
    pub fn new(flags: FlagSet, tokenizers: TokenizerSet) -> Self {
        Configuration { flags, tokenizers }
    }

    pub fn is_on(&self, flag: Flag) -> bool {
        self.flags.contains(flag)
    }

    pub fn config_id(&self) -> String {
        format!("{};tok={}", self.flags.canonical(), self.tokenizers.canonical())
    }

    /// Parses a partial description such as `stem=1,del-d1=1;tok=q4`.
    ///
    /// Flags not mentioned default to off, a bare flag name counts as on,
    /// and a missing `tok=` part defaults to `w1`.
    pub fn parse_fragment(fragment: &str) -> Result<Self, ConfigError> {
        let (flag_part, tok_part) = split_tok(fragment)?;
        let mut flags = FlagSet::empty();
        let mut seen = FlagSet::empty();
        for item in flag_part.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (name, value) = match item.split_once('=') {
                Some((n, v)) => (n, parse_bit(n, v)?),
                None => (item, true),
            };
            let flag = Flag::from_name(name)?;
            if seen.contains(flag) {
                return Err(ConfigError::DuplicateFlag(flag.name().to_string()));
            }
            seen.set(flag, true);
            flags.set(flag, value);
        }
        let tokenizers = match tok_part {
            Some(t) => t.parse()?,
            None => TokenizerSet::single(Tokenizer::W1),
        };
        Ok(Configuration::new(flags, tokenizers))
    }
}

fn parse_bit(name: &str, value: &str) -> Result<bool, ConfigError> {
    match value.trim() {
        "1" => Ok(true),
        "0" => Ok(false),
        other => Err(ConfigError::BadFlagValue(name.trim().to_string(), other.to_string())),
    }
}

fn split_tok(s: &str) -> Result<(&str, Option<&str>), ConfigError> {
    match s.split_once(';') {
        Some((flags, tok)) => {
            let tok = tok
                .trim()
                .strip_prefix("tok=")
                .ok_or_else(|| ConfigError::Malformed(s.to_string()))?;
            Ok((flags, Some(tok)))
        }
        None => match s.trim().strip_prefix("tok=") {
            Some(tok) => Ok(("", Some(tok))),
            None => Ok((s, None)),
        },
    }
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.config_id())
    }
}

/// Strict parser for full config ids: all 15 flags and a `tok=` part.
impl FromStr for Configuration {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (flag_part, tok_part) = split_tok(s)?;
        let tok_part = tok_part.ok_or_else(|| ConfigError::Malformed(s.to_string()))?;
        let mut flags = FlagSet::empty();
        let mut seen = FlagSet::empty();
        for item in flag_part.split(',') {
            let (name, value) = item
                .split_once('=')
                .ok_or_else(|| ConfigError::Malformed(s.to_string()))?;
            let flag = Flag::from_name(name)?;
            if seen.contains(flag) {
                return Err(ConfigError::DuplicateFlag(flag.name().to_string()));
            }
            seen.set(flag, true);
            flags.set(flag, parse_bit(name, value)?);
        }
        if let Some(missing) = Flag::ALL.iter().find(|f| !seen.contains(**f)) {
            return Err(ConfigError::MissingFlag(missing.name()));
        }
        Ok(Configuration::new(flags, tok_part.parse()?))
    }
}

impl Serialize for Configuration {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.config_id())
    }
}

impl<'de> Deserialize<'de> for Configuration {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
