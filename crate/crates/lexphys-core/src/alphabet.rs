//! Symbol alphabets, the spin-projection interpretation map `I`, and the
//! digit map `d` used by the Gödel numbering.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

/// The 13 symbols of the generic formal language, in canonical listing order.
/// `#` is the spacer.
pub const STANDARD_SYMBOLS: [char; 13] = [
    '0', '1', 'c', 'v', 'f', 'r', '=', '∨', '∃', '¬', '(', ')', '#',
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AlphabetError {
    TooFewSymbols(usize),
    DuplicateSymbol(char),
    SpacerNotMember(char),
    UnknownSymbol(char),
    DigitOutOfRange { digit: u8, k: usize },
    ProjectionOutOfRange { twice: i32, twice_sigma: u32 },
    ProjectionNotInjective { twice: i32 },
    ProjectionCountMismatch { got: usize, expected: usize },
    SpinTooSmall { twice_sigma: u32, k: usize },
}

impl fmt::Display for AlphabetError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::TooFewSymbols(k) => write!(f, "alphabet needs at least 2 symbols, got {k}"),
            Self::DuplicateSymbol(s) => write!(f, "duplicate symbol '{s}'"),
            Self::SpacerNotMember(s) => write!(f, "spacer '{s}' is not a member of the alphabet"),
            Self::UnknownSymbol(s) => write!(f, "symbol '{s}' is not in the alphabet"),
            Self::DigitOutOfRange { digit, k } => {
                write!(f, "digit {digit} out of range for a {k}-symbol alphabet")
            }
            Self::ProjectionOutOfRange { twice, twice_sigma } => write!(
                f,
                "projection 2m={twice} outside [-2σ, 2σ] with 2σ={twice_sigma}"
            ),
            Self::ProjectionNotInjective { twice } => {
                write!(f, "projection 2m={twice} assigned to more than one symbol")
            }
            Self::ProjectionCountMismatch { got, expected } => {
                write!(f, "expected {expected} projections, got {got}")
            }
            Self::SpinTooSmall { twice_sigma, k } => {
                write!(f, "spin with 2σ={twice_sigma} cannot host {k} symbols (2σ+1 < k)")
            }
        }
    }
}

impl core::error::Error for AlphabetError {}

/// An ordered set of distinct symbol tokens with a designated spacer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alphabet {
    symbols: Vec<char>,
    index: BTreeMap<char, usize>,
    spacer: char,
}

impl Alphabet {
    pub fn new(symbols: Vec<char>, spacer: char) -> Result<Self, AlphabetError> {
        if symbols.len() < 2 {
            return Err(AlphabetError::TooFewSymbols(symbols.len()));
        }
        let mut index = BTreeMap::new();
        for (i, &s) in symbols.iter().enumerate() {
            if index.insert(s, i).is_some() {
                return Err(AlphabetError::DuplicateSymbol(s));
            }
        }
        if !index.contains_key(&spacer) {
            return Err(AlphabetError::SpacerNotMember(spacer));
        }
        Ok(Self { symbols, index, spacer })
    }

    /// The shipped 13-symbol alphabet with `#` as spacer.
    pub fn standard() -> Self {
        Self::new(STANDARD_SYMBOLS.to_vec(), '#').expect("standard alphabet is valid")
    }

    pub fn k(&self) -> usize {
        self.symbols.len()
    }

    pub fn spacer(&self) -> char {
        self.spacer
    }

    pub fn symbols(&self) -> &[char] {
        &self.symbols
    }

    pub fn contains(&self, s: char) -> bool {
        self.index.contains_key(&s)
    }

    pub fn index_of(&self, s: char) -> Option<usize> {
        self.index.get(&s).copied()
    }
}

/// A nonnegative half-integer spin magnitude, stored as 2σ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Spin {
    twice: u32,
}

impl Spin {
    pub fn from_twice(twice: u32) -> Self {
        Self { twice }
    }

    pub fn twice(&self) -> u32 {
        self.twice
    }

    pub fn value(&self) -> f64 {
        f64::from(self.twice) / 2.0
    }

    /// Number of projection eigenvalues, 2σ+1.
    pub fn multiplicity(&self) -> usize {
        self.twice as usize + 1
    }
}

impl fmt::Display for Spin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.twice % 2 == 0 {
            write!(f, "{}", self.twice / 2)
        } else {
            write!(f, "{}/2", self.twice)
        }
    }
}

/// A spin projection m with −σ ≤ m ≤ σ, stored as 2m.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Projection {
    twice: i32,
}

impl Projection {
    pub fn from_twice(twice: i32) -> Self {
        Self { twice }
    }

    pub fn twice(&self) -> i32 {
        self.twice
    }

    pub fn value(&self) -> f64 {
        f64::from(self.twice) / 2.0
    }
}

/// Smallest spin magnitude σ (in half-integer steps) with 2σ+1 ≥ k.
pub fn min_spin(k: usize) -> Spin {
    debug_assert!(k >= 1);
    Spin::from_twice((k - 1) as u32)
}

/// One-one map `I` from symbols to spin projections of a spin-σ system.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InterpretationMap {
    sigma: Spin,
    assignment: BTreeMap<char, Projection>,
}

impl InterpretationMap {
    /// Builds `I` from an explicit projection list, one per alphabet symbol
    /// in listing order. Projections are given as 2m and must share the
    /// parity of 2σ.
    pub fn new(
        alphabet: &Alphabet,
        sigma: Spin,
        twice_projections: &[i32],
    ) -> Result<Self, AlphabetError> {
        let k = alphabet.k();
        if sigma.multiplicity() < k {
            return Err(AlphabetError::SpinTooSmall { twice_sigma: sigma.twice(), k });
        }
        if twice_projections.len() != k {
            return Err(AlphabetError::ProjectionCountMismatch {
                got: twice_projections.len(),
                expected: k,
            });
        }
        let mut assignment = BTreeMap::new();
        let mut seen = BTreeMap::new();
        for (&s, &twice) in alphabet.symbols().iter().zip(twice_projections) {
            let bound = sigma.twice() as i32;
            if twice < -bound || twice > bound || (twice - bound) % 2 != 0 {
                return Err(AlphabetError::ProjectionOutOfRange { twice, twice_sigma: sigma.twice() });
            }
            if seen.insert(twice, s).is_some() {
                return Err(AlphabetError::ProjectionNotInjective { twice });
            }
            assignment.insert(s, Projection::from_twice(twice));
        }
        Ok(Self { sigma, assignment })
    }

    /// Default `I` for the minimal spin: symbols in listing order take
    /// m = −σ, −σ+1, ….
    pub fn evenly(alphabet: &Alphabet) -> Self {
        let sigma = min_spin(alphabet.k());
        let lo = -(sigma.twice() as i32);
        let projections: Vec<i32> =
            (0..alphabet.k()).map(|i| lo + 2 * i as i32).collect();
        Self::new(alphabet, sigma, &projections).expect("evenly-spaced projections are valid")
    }

    pub fn sigma(&self) -> Spin {
        self.sigma
    }

    pub fn interpret(&self, s: char) -> Result<Projection, AlphabetError> {
        self.assignment
            .get(&s)
            .copied()
            .ok_or(AlphabetError::UnknownSymbol(s))
    }
}

/// Bijection `d` from the k symbols onto the digits {0, …, k−1}.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DigitMap {
    to_digit: BTreeMap<char, u8>,
    from_digit: Vec<char>,
}

impl DigitMap {
    /// Canonical map: listing order 0,1,c,v,f,r,=,∨,∃,¬,(,),# onto digits
    /// 0..k−1, so d(#) is the last digit.
    pub fn canonical(alphabet: &Alphabet) -> Self {
        let from_digit: Vec<char> = alphabet.symbols().to_vec();
        let to_digit = from_digit
            .iter()
            .enumerate()
            .map(|(i, &s)| (s, i as u8))
            .collect();
        Self { to_digit, from_digit }
    }

    pub fn k(&self) -> usize {
        self.from_digit.len()
    }

    pub fn digit_of(&self, s: char) -> Result<u8, AlphabetError> {
        self.to_digit
            .get(&s)
            .copied()
            .ok_or(AlphabetError::UnknownSymbol(s))
    }

    pub fn symbol_of(&self, digit: u8) -> Result<char, AlphabetError> {
        self.from_digit
            .get(digit as usize)
            .copied()
            .ok_or(AlphabetError::DigitOutOfRange { digit, k: self.k() })
    }
}

/// Textual fields of the JSON-compatible configuration document for an
/// alphabet plus its maps: (symbols, spacer, sigma, digit order).
/// Serialization itself lives in the companion crate.
pub fn config_fields(
    alphabet: &Alphabet,
    interp: &InterpretationMap,
    digits: &DigitMap,
) -> (Vec<String>, String, f64, Vec<String>) {
    let symbols = alphabet.symbols().iter().map(|s| String::from(*s)).collect();
    let spacer = String::from(alphabet.spacer());
    let order = digits.from_digit.iter().map(|s| String::from(*s)).collect();
    (symbols, spacer, interp.sigma().value(), order)
}
