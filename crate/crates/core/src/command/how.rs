use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::corpus::tokenize;
use crate::errors::{Error, Result};

/// What kind of quantity a How value expresses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum HowKind {
    Temperature,
    Duration,
    Power,
    Setting,
    Other,
}

impl HowKind {
    pub const ALL: [HowKind; 5] = [
        HowKind::Temperature,
        HowKind::Duration,
        HowKind::Power,
        HowKind::Setting,
        HowKind::Other,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            HowKind::Temperature => "temperature",
            HowKind::Duration => "duration",
            HowKind::Power => "power",
            HowKind::Setting => "setting",
            HowKind::Other => "other",
        }
    }
}

impl fmt::Display for HowKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for HowKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        HowKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown how kind `{s}`")))
    }
}

/// A parsed How span.
#[derive(Debug, Clone, PartialEq)]
pub struct HowValue {
    pub raw: String,
    pub quantity: Option<f64>,
    /// Canonical unit name such as `fahrenheit` or `minute`.
    pub unit: Option<String>,
    pub kind: HowKind,
}

// (lowercased word, canonical unit, kind); single letters only count right
// after a number
const UNITS: &[(&str, &str, HowKind)] = &[
    ("f", "fahrenheit", HowKind::Temperature),
    ("fahrenheit", "fahrenheit", HowKind::Temperature),
    ("farenheit", "fahrenheit", HowKind::Temperature),
    ("c", "celsius", HowKind::Temperature),
    ("celsius", "celsius", HowKind::Temperature),
    ("centigrade", "celsius", HowKind::Temperature),
    ("s", "second", HowKind::Duration),
    ("sec", "second", HowKind::Duration),
    ("secs", "second", HowKind::Duration),
    ("second", "second", HowKind::Duration),
    ("seconds", "second", HowKind::Duration),
    ("m", "minute", HowKind::Duration),
    ("min", "minute", HowKind::Duration),
    ("mins", "minute", HowKind::Duration),
    ("minute", "minute", HowKind::Duration),
    ("minutes", "minute", HowKind::Duration),
    ("h", "hour", HowKind::Duration),
    ("hr", "hour", HowKind::Duration),
    ("hrs", "hour", HowKind::Duration),
    ("hour", "hour", HowKind::Duration),
    ("hours", "hour", HowKind::Duration),
    ("w", "watt", HowKind::Power),
    ("watt", "watt", HowKind::Power),
    ("watts", "watt", HowKind::Power),
];

const SETTING_WORDS: &[&str] = &[
    "low", "medium", "high", "max", "maximum", "full", "simmer", "broil", "grill", "defrost",
    "warm", "level", "setting", "power",
];

const TEMPERATURE_WORDS: &[&str] = &["degree", "degrees", "deg", "°"];

fn lookup_unit(word: &str) -> Option<(&'static str, HowKind)> {
    UNITS
        .iter()
        .find(|(w, _, _)| *w == word)
        .map(|&(_, unit, kind)| (unit, kind))
}

fn is_number(s: &str) -> bool {
    !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit())
}

/// First number in the token stream: `3`, `3.5`, `1/2` or `1 1/2`.
fn first_quantity(words: &[&str]) -> Option<f64> {
    let start = words.iter().position(|w| is_number(w))?;
    let at = |i: usize| words.get(i).copied();
    let num = |i: usize| at(i).filter(|w| is_number(w)).and_then(|w| w.parse::<f64>().ok());
    let whole = num(start)?;
    if at(start + 1) == Some(".") {
        if let Some(digits) = at(start + 2).filter(|w| is_number(w)) {
            return format!("{}.{}", words[start], digits).parse().ok();
        }
    }
    if at(start + 1) == Some("/") {
        if let Some(den) = num(start + 2).filter(|d| *d != 0.0) {
            return Some(whole / den);
        }
    }
    if let (Some(n), Some("/"), Some(den)) = (num(start + 1), at(start + 2), num(start + 3)) {
        if den != 0.0 {
            return Some(whole + n / den);
        }
    }
    Some(whole)
}

/// Parses a How span into a quantity, canonical unit and kind. Never fails;
/// text without a recognizable unit or cue is [`HowKind::Other`].
pub fn parse_how(raw: &str) -> HowValue {
    let tokens = tokenize(raw);
    let lowered: Vec<String> = tokens.iter().map(|t| t.text.to_lowercase()).collect();
    let words: Vec<&str> = lowered.iter().map(String::as_str).collect();
    let quantity = first_quantity(&words);

    let mut unit = None;
    for i in 0..words.len() {
        if words[i] == "gas" && words.get(i + 1) == Some(&"mark") {
            unit = Some(("gas-mark", HowKind::Temperature));
            break;
        }
        if let Some((u, kind)) = lookup_unit(words[i]) {
            let single = words[i].len() == 1;
            // a lone letter is a unit only straight after the number, or
            // after a degree word or sign
            let after_number = i > 0 && is_number(words[i - 1]);
            let after_degree = i > 0 && TEMPERATURE_WORDS.contains(&words[i - 1]);
            if !single || after_number || (after_degree && kind == HowKind::Temperature) {
                unit = Some((u, kind));
                break;
            }
        }
    }

    let kind = match unit {
        Some((_, kind)) => kind,
        None if words.iter().any(|w| TEMPERATURE_WORDS.contains(w)) => HowKind::Temperature,
        None if words.iter().any(|w| SETTING_WORDS.contains(w)) => HowKind::Setting,
        None if words.contains(&"%") => HowKind::Power,
        None => HowKind::Other,
    };
    HowValue {
        raw: raw.to_string(),
        quantity,
        unit: unit.map(|(u, _)| u.to_string()),
        kind,
    }
}
