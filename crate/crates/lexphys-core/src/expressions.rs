//! Finite-support lattice expressions, their word/spacer-run decomposition,
//! and the shipped formula grammar.
//!
//! An expression assigns a symbol to every integer lattice site, with all but
//! finitely many sites carrying the spacer. Maximal spacer-free runs are the
//! words of the expression.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::alphabet::Alphabet;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExpressionError {
    UnknownSymbol(char),
    SpacerStored { site: i64 },
    LengthMismatch { word: String, interval: (i64, i64) },
    EmptyWord { interval: (i64, i64) },
    IntervalOrder { interval: (i64, i64) },
    NoSpacerGap { left: (i64, i64), right: (i64, i64) },
    BadText(String),
}

impl fmt::Display for ExpressionError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::UnknownSymbol(s) => write!(f, "symbol '{s}' is not in the alphabet"),
            Self::SpacerStored { site } => write!(f, "site {site} stores the spacer"),
            Self::LengthMismatch { word, interval } => write!(
                f,
                "word \"{word}\" does not fit interval [{}, {}]",
                interval.0, interval.1
            ),
            Self::EmptyWord { interval } => {
                write!(f, "empty word on interval [{}, {}]", interval.0, interval.1)
            }
            Self::IntervalOrder { interval } => {
                write!(f, "interval [{}, {}] is not ordered", interval.0, interval.1)
            }
            Self::NoSpacerGap { left, right } => write!(
                f,
                "intervals [{}, {}] and [{}, {}] overlap or touch",
                left.0, left.1, right.0, right.1
            ),
            Self::BadText(t) => write!(f, "malformed expression text \"{t}\""),
        }
    }
}

impl core::error::Error for ExpressionError {}

/// Finite-support assignment of non-spacer symbols to lattice sites.
/// Every unlisted site carries the spacer.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Expression {
    sites: BTreeMap<i64, char>,
}

impl Expression {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Validates that every stored symbol is a non-spacer alphabet member.
    pub fn new(sites: BTreeMap<i64, char>, alphabet: &Alphabet) -> Result<Self, ExpressionError> {
        for (&site, &s) in &sites {
            if !alphabet.contains(s) {
                return Err(ExpressionError::UnknownSymbol(s));
            }
            if s == alphabet.spacer() {
                return Err(ExpressionError::SpacerStored { site });
            }
        }
        Ok(Self { sites })
    }

    /// Symbol at site `j`, the spacer if unlisted.
    pub fn symbol_at(&self, j: i64, alphabet: &Alphabet) -> char {
        self.sites.get(&j).copied().unwrap_or(alphabet.spacer())
    }

    pub fn sites(&self) -> &BTreeMap<i64, char> {
        &self.sites
    }

    pub fn support_len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    pub fn support_bounds(&self) -> Option<(i64, i64)> {
        let lo = self.sites.keys().next()?;
        let hi = self.sites.keys().next_back()?;
        Some((*lo, *hi))
    }

    /// Returns a copy with `symbol` written at `site`. Writing the spacer
    /// clears the site.
    pub fn with_symbol(&self, site: i64, symbol: char, alphabet: &Alphabet) -> Self {
        let mut sites = self.sites.clone();
        if symbol == alphabet.spacer() {
            sites.remove(&site);
        } else {
            sites.insert(site, symbol);
        }
        Self { sites }
    }
}

/// One word of a decomposition: a spacer-free symbol string and the closed
/// interval of sites it occupies.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WordSpan {
    pub text: String,
    pub interval: (i64, i64),
}

/// Splits an expression into its maximal spacer-free runs, left to right.
pub fn decompose(e: &Expression) -> Vec<WordSpan> {
    let mut words = Vec::new();
    let mut current: Option<(i64, i64, String)> = None;
    for (&site, &sym) in e.sites() {
        match current.take() {
            Some((a, b, mut text)) if site == b + 1 => {
                text.push(sym);
                current = Some((a, site, text));
            }
            prev => {
                if let Some((a, b, text)) = prev {
                    words.push(WordSpan { text, interval: (a, b) });
                }
                current = Some((site, site, String::from(sym)));
            }
        }
    }
    if let Some((a, b, text)) = current {
        words.push(WordSpan { text, interval: (a, b) });
    }
    words
}

/// Rebuilds an expression from an ordered word/interval list. Inverse of
/// [`decompose`]: intervals must be disjoint, ascending, and separated by at
/// least one spacer site.
pub fn compose(words: &[WordSpan], alphabet: &Alphabet) -> Result<Expression, ExpressionError> {
    let mut sites = BTreeMap::new();
    let mut prev_end: Option<i64> = None;
    for w in words {
        let (a, b) = w.interval;
        if a > b {
            return Err(ExpressionError::IntervalOrder { interval: w.interval });
        }
        if w.text.is_empty() {
            return Err(ExpressionError::EmptyWord { interval: w.interval });
        }
        let len = (b - a + 1) as usize;
        if w.text.chars().count() != len {
            return Err(ExpressionError::LengthMismatch { word: w.text.clone(), interval: w.interval });
        }
        if let Some(end) = prev_end {
            if a <= end + 1 {
                return Err(ExpressionError::NoSpacerGap {
                    left: (end, end),
                    right: w.interval,
                });
            }
        }
        for (offset, sym) in w.text.chars().enumerate() {
            if !alphabet.contains(sym) {
                return Err(ExpressionError::UnknownSymbol(sym));
            }
            if sym == alphabet.spacer() {
                return Err(ExpressionError::SpacerStored { site: a + offset as i64 });
            }
            sites.insert(a + offset as i64, sym);
        }
        prev_end = Some(b);
    }
    Ok(Expression { sites })
}

/// Renders an expression in its text form: a leading `@a` site offset followed
/// by the words, where the run of spaces between two words has the length of
/// the spacer gap separating them. Round-trips exactly through
/// [`parse_text`].
pub fn to_text(e: &Expression) -> String {
    let words = decompose(e);
    let mut out = String::new();
    match words.first() {
        None => out.push_str("@0"),
        Some(first) => {
            out.push('@');
            out.push_str(&itoa(first.interval.0));
            out.push(' ');
            let mut prev_end = None;
            for w in &words {
                if let Some(end) = prev_end {
                    for _ in 0..(w.interval.0 - end - 1) {
                        out.push(' ');
                    }
                }
                out.push_str(&w.text);
                prev_end = Some(w.interval.1);
            }
        }
    }
    out
}

/// Parses the text form produced by [`to_text`].
pub fn parse_text(text: &str, alphabet: &Alphabet) -> Result<Expression, ExpressionError> {
    let bad = || ExpressionError::BadText(String::from(text));
    let rest = text.strip_prefix('@').ok_or_else(bad)?;
    let (offset_str, body) = match rest.find(' ') {
        Some(i) => (&rest[..i], &rest[i + 1..]),
        None => (rest, ""),
    };
    let offset: i64 = offset_str.parse().map_err(|_| bad())?;
    let mut words = Vec::new();
    let mut site = offset;
    let mut current: Option<(i64, String)> = None;
    for ch in body.chars() {
        if ch == ' ' {
            if let Some((a, text)) = current.take() {
                words.push(WordSpan { interval: (a, site - 1), text });
            }
        } else {
            current.get_or_insert_with(|| (site, String::new())).1.push(ch);
        }
        site += 1;
    }
    if let Some((a, text)) = current.take() {
        words.push(WordSpan { interval: (a, site - 1), text });
    }
    compose(&words, alphabet)
}

fn itoa(v: i64) -> String {
    let mut s = String::new();
    fmt::write(&mut s, format_args!("{v}")).expect("formatting integers cannot fail");
    s
}

/// Verdict of grammar classification: every spacer-free string is at least a
/// word; strings accepted by the grammar are formulas.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WordClass {
    Word,
    Formula,
}

/// The shipped formula grammar over the 13-symbol alphabet:
///
/// ```text
/// F ::= '(' T '=' T ')' | 'r' '(' T ')' | '¬' F | '(' F '∨' F ')' | '∃' 'v' F
/// T ::= '0' | '1' | 'c' | 'v' | 'f' '(' T ')'
/// ```
///
/// Membership is decided by a small backtracking recursive-descent parser;
/// the `(` ambiguity between atomic equalities and disjunctions is resolved
/// by keeping every viable parse end.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Grammar;

impl Grammar {
    pub fn shipped() -> Self {
        Grammar
    }

    /// True iff `word` is a well-formed formula.
    pub fn accepts(&self, word: &str) -> bool {
        let chars: Vec<char> = word.chars().collect();
        formula_ends(&chars, 0).contains(&chars.len())
    }

    /// Classifies a nonempty spacer-free string.
    pub fn classify(&self, word: &str) -> WordClass {
        if self.accepts(word) {
            WordClass::Formula
        } else {
            WordClass::Word
        }
    }
}

fn term_ends(chars: &[char], pos: usize) -> Vec<usize> {
    let mut ends = Vec::new();
    match chars.get(pos) {
        Some('0') | Some('1') | Some('c') | Some('v') => ends.push(pos + 1),
        Some('f') => {
            if chars.get(pos + 1) == Some(&'(') {
                for end in term_ends(chars, pos + 2) {
                    if chars.get(end) == Some(&')') {
                        ends.push(end + 1);
                    }
                }
            }
        }
        _ => {}
    }
    ends
}

fn formula_ends(chars: &[char], pos: usize) -> Vec<usize> {
    let mut ends = Vec::new();
    match chars.get(pos) {
        Some('¬') => ends.extend(formula_ends(chars, pos + 1)),
        Some('∃') => {
            if chars.get(pos + 1) == Some(&'v') {
                ends.extend(formula_ends(chars, pos + 2));
            }
        }
        Some('r') => {
            if chars.get(pos + 1) == Some(&'(') {
                for end in term_ends(chars, pos + 2) {
                    if chars.get(end) == Some(&')') {
                        ends.push(end + 1);
                    }
                }
            }
        }
        Some('(') => {
            // atomic equality: ( T = T )
            for mid in term_ends(chars, pos + 1) {
                if chars.get(mid) == Some(&'=') {
                    for end in term_ends(chars, mid + 1) {
                        if chars.get(end) == Some(&')') {
                            ends.push(end + 1);
                        }
                    }
                }
            }
            // disjunction: ( F ∨ F )
            for mid in formula_ends(chars, pos + 1) {
                if chars.get(mid) == Some(&'∨') {
                    for end in formula_ends(chars, mid + 1) {
                        if chars.get(end) == Some(&')') {
                            ends.push(end + 1);
                        }
                    }
                }
            }
        }
        _ => {}
    }
    ends.sort_unstable();
    ends.dedup();
    ends
}
