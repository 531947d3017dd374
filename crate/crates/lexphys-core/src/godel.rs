//! Quine-style map between expressions and exact k-ary numerals.
//!
//! Each lattice site j carries a digit d(e(j)); the numeral's value is
//! Σ d_j·k^j as an exact rational, with a "k-al point" between sites 0 and
//! −1 so negative sites contribute fractional parts. Numerals store their
//! per-site digits explicitly; the scalar value is a derived view, which
//! keeps trailing-spacer ambiguity out of the representation.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::alphabet::{Alphabet, DigitMap};
use crate::expressions::Expression;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GodelError {
    DigitOutOfBase { site: i64, digit: u8, base: u32 },
    NoPreimage { site: i64, digit: u8 },
    SymbolUnmapped { symbol: char },
    BadText { reason: &'static str },
}

impl fmt::Display for GodelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::DigitOutOfBase { site, digit, base } => {
                write!(f, "digit {digit} at site {site} exceeds base {base}")
            }
            Self::NoPreimage { site, digit } => {
                write!(f, "digit {digit} at site {site} has no symbol preimage")
            }
            Self::SymbolUnmapped { symbol } => write!(f, "symbol {symbol:?} has no digit"),
            Self::BadText { reason } => write!(f, "malformed numeral text: {reason}"),
        }
    }
}

impl core::error::Error for GodelError {}

/// Finite-support k-ary numeral with signed site indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Numeral {
    digits: BTreeMap<i64, u8>,
    base: u32,
}

impl Numeral {
    /// Zero digits are kept: the digit map is the support annotation, and
    /// dropping zeros would identify distinct expressions whose symbols
    /// happen to carry digit 0.
    pub fn new(digits: impl IntoIterator<Item = (i64, u8)>, base: u32) -> Result<Self, GodelError> {
        let mut map = BTreeMap::new();
        for (site, digit) in digits {
            if u32::from(digit) >= base {
                return Err(GodelError::DigitOutOfBase { site, digit, base });
            }
            map.insert(site, digit);
        }
        Ok(Self { digits: map, base })
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    pub fn digit(&self, site: i64) -> u8 {
        self.digits.get(&site).copied().unwrap_or(0)
    }

    pub fn digits(&self) -> impl Iterator<Item = (i64, u8)> + '_ {
        self.digits.iter().map(|(&j, &d)| (j, d))
    }

    pub fn support(&self) -> Option<(i64, i64)> {
        let lo = *self.digits.keys().next()?;
        let hi = *self.digits.keys().last()?;
        Some((lo, hi))
    }

    /// Σ d_j · k^j, exactly.
    pub fn value(&self) -> BigRational {
        let mut total = BigRational::zero();
        for (&j, &d) in &self.digits {
            total += site_term(d, j, self.base);
        }
        total
    }

    /// Big-endian digit render with an explicit base tag, site offset, and
    /// radix point, e.g. `k13@0:10.` for digits 1 at site 1 and 0 at site 0.
    /// The offset is the lowest rendered site; digits ≥ 10 use letters
    /// a, b, c, …; sites inside the span but outside the support render as
    /// `_`, keeping the round trip bit-exact for gappy supports.
    pub fn to_text(&self) -> String {
        let mut out = String::from("k");
        push_u32(&mut out, self.base);
        out.push('@');
        let (lo, hi) = match self.support() {
            Some(span) => span,
            None => {
                out.push_str("0:.");
                return out;
            }
        };
        let lo = lo.min(0);
        let hi = hi.max(0);
        push_i64(&mut out, lo);
        out.push(':');
        for j in (lo..=hi).rev() {
            match self.digits.get(&j) {
                Some(&d) => out.push(digit_char(d)),
                None => out.push('_'),
            }
            if j == 0 {
                out.push('.');
            }
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self, GodelError> {
        let rest = text
            .strip_prefix('k')
            .ok_or(GodelError::BadText { reason: "missing base tag" })?;
        let (base_str, rest) = rest
            .split_once('@')
            .ok_or(GodelError::BadText { reason: "missing offset" })?;
        let base: u32 = base_str
            .parse()
            .map_err(|_| GodelError::BadText { reason: "bad base" })?;
        if base < 2 {
            return Err(GodelError::BadText { reason: "base below 2" });
        }
        let (offset_str, digit_str) = rest
            .split_once(':')
            .ok_or(GodelError::BadText { reason: "missing digit block" })?;
        let offset: i64 = offset_str
            .parse()
            .map_err(|_| GodelError::BadText { reason: "bad offset" })?;
        let mut digits: Vec<Option<u8>> = Vec::new();
        let mut point_at = None;
        for c in digit_str.chars() {
            if c == '.' {
                if point_at.is_some() {
                    return Err(GodelError::BadText { reason: "two radix points" });
                }
                point_at = Some(digits.len());
                continue;
            }
            if c == '_' {
                digits.push(None);
                continue;
            }
            digits.push(Some(
                digit_value(c).ok_or(GodelError::BadText { reason: "bad digit" })?,
            ));
        }
        if point_at.is_none() && !digits.is_empty() {
            return Err(GodelError::BadText { reason: "missing radix point" });
        }
        // big-endian: the last rendered position sits at `offset`
        let n = digits.len() as i64;
        if let Some(p) = point_at {
            // the point follows site 0, so positions after it occupy −1, −2, …
            let below = n - p as i64;
            if offset != -below.max(0) && !(digits.is_empty() && offset == 0) {
                return Err(GodelError::BadText { reason: "offset disagrees with point" });
            }
        }
        Self::new(
            digits
                .into_iter()
                .enumerate()
                .filter_map(|(i, d)| d.map(|d| (offset + (n - 1 - i as i64), d))),
            base,
        )
    }
}

fn digit_char(d: u8) -> char {
    if d < 10 {
        (b'0' + d) as char
    } else {
        (b'a' + d - 10) as char
    }
}

fn digit_value(c: char) -> Option<u8> {
    match c {
        '0'..='9' => Some(c as u8 - b'0'),
        'a'..='z' => Some(c as u8 - b'a' + 10),
        _ => None,
    }
}

fn push_u32(out: &mut String, v: u32) {
    let mut buf = [0u8; 10];
    let mut i = buf.len();
    let mut v = v;
    loop {
        i -= 1;
        buf[i] = b'0' + (v % 10) as u8;
        v /= 10;
        if v == 0 {
            break;
        }
    }
    for &b in &buf[i..] {
        out.push(b as char);
    }
}

fn push_i64(out: &mut String, v: i64) {
    if v < 0 {
        out.push('-');
        push_u32(out, (-v) as u32);
    } else {
        push_u32(out, v as u32);
    }
}

fn site_term(digit: u8, site: i64, base: u32) -> BigRational {
    let d = BigRational::from_integer(BigInt::from(digit));
    let k = BigInt::from(base);
    if site >= 0 {
        d * BigRational::from_integer(k.pow(site as u32))
    } else {
        d * BigRational::new(BigInt::one(), k.pow((-site) as u32))
    }
}

/// d(s)·k^j as an exact rational.
pub fn site_value(s: char, j: i64, k: u32, d: &DigitMap) -> Result<BigRational, GodelError> {
    let digit = d.digit_of(s).map_err(|_| GodelError::SymbolUnmapped { symbol: s })?;
    Ok(site_term(digit, j, k))
}

/// Per-site application of the digit map. Off-support sites take the spacer
/// digit implicitly only through `decode`'s inverse; here absent sites are
/// simply absent, so the support set travels with the numeral.
pub fn encode(e: &Expression, alphabet: &Alphabet, d: &DigitMap) -> Result<Numeral, GodelError> {
    let digits = e
        .sites()
        .iter()
        .map(|(&j, &s)| {
            d.digit_of(s)
                .map(|digit| (j, digit))
                .map_err(|_| GodelError::SymbolUnmapped { symbol: s })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Numeral::new(digits, alphabet.k() as u32)
}

/// Inverse of `encode`: every stored digit must have a symbol preimage, and
/// sites whose symbol is the spacer drop out of the expression support.
pub fn decode(n: &Numeral, alphabet: &Alphabet, d: &DigitMap) -> Result<Expression, GodelError> {
    let mut sites = BTreeMap::new();
    for (j, digit) in n.digits() {
        let s = d
            .symbol_of(digit)
            .map_err(|_| GodelError::NoPreimage { site: j, digit })?;
        if s != alphabet.spacer() {
            sites.insert(j, s);
        }
    }
    Ok(Expression::new(sites, alphabet).expect("digit preimages are alphabet symbols"))
}
