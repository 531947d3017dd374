//! Sparse state vectors over (head internal state, head position, lattice
//! expression) basis labels, with interval projectors and inner products.
//!
//! The lattice is truncated to sites [−L, L]; the basis is orthonormal by
//! construction and iteration order is the canonical (internal, position,
//! sorted site list) order of the labels.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64;

use crate::alphabet::Alphabet;
use crate::expressions::Expression;
use crate::NORM_TOL;

#[derive(Debug, Clone, PartialEq)]
pub enum HilbertError {
    PositionOutOfBounds { position: i64, half_width: i64 },
    SupportOutOfBounds { site: i64, half_width: i64 },
    InternalOutOfRange { internal: u32, count: u32 },
    ZeroState,
    SpaceMismatch,
    UnknownSymbol(char),
    IntervalOrder { interval: (i64, i64) },
}

impl fmt::Display for HilbertError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::PositionOutOfBounds { position, half_width } => {
                write!(f, "head position {position} outside [-{half_width}, {half_width}]")
            }
            Self::SupportOutOfBounds { site, half_width } => {
                write!(f, "config site {site} outside [-{half_width}, {half_width}]")
            }
            Self::InternalOutOfRange { internal, count } => {
                write!(f, "internal state {internal} outside 0..{count}")
            }
            Self::ZeroState => write!(f, "no normalizable state: all amplitudes vanish"),
            Self::SpaceMismatch => write!(f, "states live in different spaces"),
            Self::UnknownSymbol(s) => write!(f, "symbol '{s}' is not in the alphabet"),
            Self::IntervalOrder { interval } => {
                write!(f, "interval [{}, {}] is not ordered", interval.0, interval.1)
            }
        }
    }
}

impl core::error::Error for HilbertError {}

/// The truncated state space: lattice sites [−L, L], `internal_count` head
/// states, and the symbol alphabet.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Space {
    half_width: i64,
    internal_count: u32,
    alphabet: Alphabet,
}

impl Space {
    pub fn new(half_width: i64, internal_count: u32, alphabet: Alphabet) -> Self {
        assert!(half_width >= 0 && internal_count >= 1);
        Self { half_width, internal_count, alphabet }
    }

    pub fn half_width(&self) -> i64 {
        self.half_width
    }

    pub fn internal_count(&self) -> u32 {
        self.internal_count
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn contains_site(&self, site: i64) -> bool {
        site.abs() <= self.half_width
    }

    fn check_label(&self, label: &BasisLabel) -> Result<(), HilbertError> {
        if label.internal >= self.internal_count {
            return Err(HilbertError::InternalOutOfRange {
                internal: label.internal,
                count: self.internal_count,
            });
        }
        if !self.contains_site(label.position) {
            return Err(HilbertError::PositionOutOfBounds {
                position: label.position,
                half_width: self.half_width,
            });
        }
        if let Some((lo, hi)) = label.config.support_bounds() {
            for site in [lo, hi] {
                if !self.contains_site(site) {
                    return Err(HilbertError::SupportOutOfBounds { site, half_width: self.half_width });
                }
            }
        }
        Ok(())
    }
}

/// Basis label |config⟩|internal, position⟩. Ordering is canonical:
/// internal, then position, then the sorted site list of the config.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BasisLabel {
    pub internal: u32,
    pub position: i64,
    pub config: Expression,
}

impl BasisLabel {
    pub fn new(internal: u32, position: i64, config: Expression) -> Self {
        Self { internal, position, config }
    }

    /// The all-spacer start label |#, i, 0⟩.
    pub fn blank(internal: u32) -> Self {
        Self::new(internal, 0, Expression::empty())
    }
}

/// Finite-support complex amplitude map over basis labels, kept normalized
/// by every constructor.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    space: Space,
    amplitudes: BTreeMap<BasisLabel, Complex64>,
}

/// Amplitudes smaller than this in modulus are dropped when states are built.
pub const AMP_PRUNE: f64 = 1e-15;

impl StateVector {
    /// Combines the given terms (duplicates add), normalizes, and drops
    /// vanishing amplitudes.
    pub fn superpose(
        space: &Space,
        terms: &[(BasisLabel, Complex64)],
    ) -> Result<Self, HilbertError> {
        let mut amplitudes: BTreeMap<BasisLabel, Complex64> = BTreeMap::new();
        for (label, amp) in terms {
            space.check_label(label)?;
            *amplitudes.entry(label.clone()).or_insert(Complex64::ZERO) += amp;
        }
        amplitudes.retain(|_, a| a.norm() > AMP_PRUNE);
        let norm_sqr: f64 = amplitudes.values().map(|a| a.norm_sqr()).sum();
        if norm_sqr <= AMP_PRUNE {
            return Err(HilbertError::ZeroState);
        }
        let scale = 1.0 / libm::sqrt(norm_sqr);
        for a in amplitudes.values_mut() {
            *a *= scale;
        }
        Ok(Self { space: space.clone(), amplitudes })
    }

    /// Unit basis state.
    pub fn basis(space: &Space, label: BasisLabel) -> Result<Self, HilbertError> {
        Self::superpose(space, &[(label, Complex64::ONE)])
    }

    pub(crate) fn from_raw(
        space: Space,
        amplitudes: BTreeMap<BasisLabel, Complex64>,
    ) -> Self {
        Self { space, amplitudes }
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn amplitudes(&self) -> &BTreeMap<BasisLabel, Complex64> {
        &self.amplitudes
    }

    pub fn support_len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.values().map(|a| a.norm_sqr()).sum()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm_sqr() - 1.0).abs() <= NORM_TOL
    }

    /// ⟨self|other⟩, conjugate-linear in `self`.
    pub fn inner_product(&self, other: &Self) -> Result<Complex64, HilbertError> {
        if self.space != other.space {
            return Err(HilbertError::SpaceMismatch);
        }
        let mut acc = Complex64::ZERO;
        // iterate over the smaller support
        if self.amplitudes.len() <= other.amplitudes.len() {
            for (label, a) in &self.amplitudes {
                if let Some(b) = other.amplitudes.get(label) {
                    acc += a.conj() * b;
                }
            }
        } else {
            for (label, b) in &other.amplitudes {
                if let Some(a) = self.amplitudes.get(label) {
                    acc += a.conj() * b;
                }
            }
        }
        Ok(acc)
    }

    /// Probability that a measurement of the sites in `p.interval` finds the
    /// assignment `p`: the squared amplitude mass of matching labels.
    pub fn projector_prob(&self, p: &IntervalProjector) -> f64 {
        self.amplitudes
            .iter()
            .filter(|(label, _)| p.matches(label, &self.space))
            .map(|(_, a)| a.norm_sqr())
            .sum()
    }
}

/// Projector P_{s,[a,b]} onto the expression states whose restriction to
/// [a, b] equals the assignment `s` (spacers allowed).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntervalProjector {
    interval: (i64, i64),
    assignment: Vec<char>,
}

impl IntervalProjector {
    pub fn new(
        interval: (i64, i64),
        assignment: &str,
        space: &Space,
    ) -> Result<Self, HilbertError> {
        let (a, b) = interval;
        if a > b {
            return Err(HilbertError::IntervalOrder { interval });
        }
        if !space.contains_site(a) || !space.contains_site(b) {
            let site = if space.contains_site(a) { b } else { a };
            return Err(HilbertError::SupportOutOfBounds { site, half_width: space.half_width() });
        }
        let symbols: Vec<char> = assignment.chars().collect();
        if symbols.len() != (b - a + 1) as usize {
            return Err(HilbertError::IntervalOrder { interval });
        }
        for &s in &symbols {
            if !space.alphabet().contains(s) {
                return Err(HilbertError::UnknownSymbol(s));
            }
        }
        Ok(Self { interval, assignment: symbols })
    }

    pub fn interval(&self) -> (i64, i64) {
        self.interval
    }

    pub fn assignment(&self) -> String {
        self.assignment.iter().collect()
    }

    pub fn matches(&self, label: &BasisLabel, space: &Space) -> bool {
        let (a, _) = self.interval;
        self.assignment
            .iter()
            .enumerate()
            .all(|(i, &s)| label.config.symbol_at(a + i as i64, space.alphabet()) == s)
    }
}
