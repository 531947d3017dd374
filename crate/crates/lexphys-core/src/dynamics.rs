//! One-step unitaries for a head moving on the symbol lattice.
//!
//! A step operator is defined by a local rule: from (internal state, symbol
//! under the head) to a finite superposition of (new internal state, symbol
//! written at the head's site, head move). Unitarity is verified numerically
//! on the basis reachable from a start label up to a configured depth, and
//! evolution is sparse.

use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64;
use rand_core::RngCore;

use crate::expressions::WordSpan;
use crate::hilbert::{BasisLabel, HilbertError, IntervalProjector, Space, StateVector};
use crate::NORM_TOL;

#[derive(Debug, Clone, PartialEq)]
pub enum DynamicsError {
    RuleNotTotal { internal: u32, symbol: char },
    UnknownSymbol(char),
    InternalOutOfRange { internal: u32, count: u32 },
    UnitarityViolation { rows: Vec<(u32, char)>, deviation: f64 },
    DimensionCap { cap: usize, reached: usize },
    TargetOutOfBounds { site: i64, half_width: i64 },
    Hilbert(HilbertError),
    Expression(crate::expressions::ExpressionError),
}

impl fmt::Display for DynamicsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::RuleNotTotal { internal, symbol } => {
                write!(f, "rule has no row for internal {internal}, symbol '{symbol}'")
            }
            Self::UnknownSymbol(s) => write!(f, "symbol '{s}' is not in the alphabet"),
            Self::InternalOutOfRange { internal, count } => {
                write!(f, "internal state {internal} outside 0..{count}")
            }
            Self::UnitarityViolation { rows, deviation } => {
                write!(f, "step is not unitary (deviation {deviation:.3e}) via rule rows ")?;
                for (i, (internal, symbol)) in rows.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "({internal}, '{symbol}')")?;
                }
                Ok(())
            }
            Self::DimensionCap { cap, reached } => {
                write!(f, "reachable basis exceeded the dimension cap {cap} (reached {reached})")
            }
            Self::TargetOutOfBounds { site, half_width } => {
                write!(f, "writer target site {site} outside the usable range [0, {}]", half_width - 1)
            }
            Self::Hilbert(e) => write!(f, "{e}"),
            Self::Expression(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for DynamicsError {}

impl From<HilbertError> for DynamicsError {
    fn from(e: HilbertError) -> Self {
        Self::Hilbert(e)
    }
}

impl From<crate::expressions::ExpressionError> for DynamicsError {
    fn from(e: crate::expressions::ExpressionError) -> Self {
        Self::Expression(e)
    }
}

/// Head move of one step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Move {
    Left,
    Stay,
    Right,
}

impl Move {
    pub fn delta(self) -> i64 {
        match self {
            Move::Left => -1,
            Move::Stay => 0,
            Move::Right => 1,
        }
    }
}

/// One branch of a rule row: amplitude, new internal state, symbol written at
/// the head's current site, and head move.
#[derive(Debug, Clone, PartialEq)]
pub struct RuleBranch {
    pub amplitude: Complex64,
    pub internal: u32,
    pub write: char,
    pub shift: Move,
}

/// Local rule: a total map (internal, symbol under head) → branches.
#[derive(Debug, Clone, PartialEq)]
pub struct RuleSpec {
    pub internal_count: u32,
    pub rows: BTreeMap<(u32, char), Vec<RuleBranch>>,
}

impl RuleSpec {
    /// Identity rule: amplitude 1, same internal, same symbol, no move.
    pub fn identity(space: &Space) -> Self {
        let mut rows = BTreeMap::new();
        for i in 0..space.internal_count() {
            for &s in space.alphabet().symbols() {
                rows.insert(
                    (i, s),
                    vec![RuleBranch { amplitude: Complex64::ONE, internal: i, write: s, shift: Move::Stay }],
                );
            }
        }
        Self { internal_count: space.internal_count(), rows }
    }

    fn check_total(&self, space: &Space) -> Result<(), DynamicsError> {
        for i in 0..self.internal_count {
            for &s in space.alphabet().symbols() {
                match self.rows.get(&(i, s)) {
                    None => return Err(DynamicsError::RuleNotTotal { internal: i, symbol: s }),
                    Some(branches) => {
                        for b in branches {
                            if !space.alphabet().contains(b.write) {
                                return Err(DynamicsError::UnknownSymbol(b.write));
                            }
                            if b.internal >= self.internal_count {
                                return Err(DynamicsError::InternalOutOfRange {
                                    internal: b.internal,
                                    count: self.internal_count,
                                });
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

/// Validation parameters for [`build_step`].
#[derive(Debug, Clone)]
pub struct ValidationOptions {
    /// BFS depth of the reachable-basis expansion used for the unitarity check.
    pub depth: usize,
    /// Hard cap on the reachable-basis dimension; exceeding it is an error.
    pub dim_cap: usize,
    /// Start label of the expansion; defaults to |#, 0, 0⟩.
    pub start: BasisLabel,
}

impl Default for ValidationOptions {
    fn default() -> Self {
        Self { depth: 48, dim_cap: 20_000, start: BasisLabel::blank(0) }
    }
}

/// A validated one-step operator.
#[derive(Debug, Clone)]
pub struct StepOperator {
    spec: RuleSpec,
    space: Space,
    dim_cap: usize,
}

impl StepOperator {
    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn spec(&self) -> &RuleSpec {
        &self.spec
    }

    pub fn dim_cap(&self) -> usize {
        self.dim_cap
    }

    /// Expansion of U|label⟩ in the basis. The write happens at the head's
    /// current site; moves past ±L are remapped to stay (reflecting policy).
    pub fn apply_label(&self, label: &BasisLabel) -> Vec<(BasisLabel, Complex64)> {
        let alphabet = self.space.alphabet();
        let under = label.config.symbol_at(label.position, alphabet);
        let branches = self
            .spec
            .rows
            .get(&(label.internal, under))
            .expect("rule is total by validation");
        branches
            .iter()
            .map(|b| {
                let config = label.config.with_symbol(label.position, b.write, alphabet);
                let mut position = label.position + b.shift.delta();
                if !self.space.contains_site(position) {
                    position = label.position;
                }
                (BasisLabel::new(b.internal, position, config), b.amplitude)
            })
            .collect()
    }

    /// One step of the adjoint, U†|ψ⟩, computed by enumerating candidate
    /// preimage labels of ψ's support.
    pub fn apply_adjoint_state(&self, psi: &StateVector) -> Result<StateVector, DynamicsError> {
        let alphabet = self.space.alphabet().clone();
        let mut candidates: BTreeSet<BasisLabel> = BTreeSet::new();
        for label in psi.amplitudes().keys() {
            for dq in -1..=1 {
                let q = label.position + dq;
                if !self.space.contains_site(q) {
                    continue;
                }
                for internal in 0..self.spec.internal_count {
                    for &s in alphabet.symbols() {
                        let config = label.config.with_symbol(q, s, &alphabet);
                        candidates.insert(BasisLabel::new(internal, q, config));
                    }
                }
            }
        }
        let mut out: BTreeMap<BasisLabel, Complex64> = BTreeMap::new();
        for cand in candidates {
            let mut acc = Complex64::ZERO;
            for (image, amp) in self.apply_label(&cand) {
                if let Some(c) = psi.amplitudes().get(&image) {
                    acc += amp.conj() * c;
                }
            }
            if acc.norm() > 1e-16 {
                out.insert(cand, acc);
            }
        }
        if out.len() > self.dim_cap {
            return Err(DynamicsError::DimensionCap { cap: self.dim_cap, reached: out.len() });
        }
        Ok(StateVector::from_raw(self.space.clone(), out))
    }

    fn apply_state(&self, psi: &StateVector) -> Result<StateVector, DynamicsError> {
        let mut out: BTreeMap<BasisLabel, Complex64> = BTreeMap::new();
        for (label, amp) in psi.amplitudes() {
            for (image, branch_amp) in self.apply_label(label) {
                *out.entry(image).or_insert(Complex64::ZERO) += amp * branch_amp;
            }
        }
        out.retain(|_, a| a.norm() > 1e-16);
        if out.len() > self.dim_cap {
            return Err(DynamicsError::DimensionCap { cap: self.dim_cap, reached: out.len() });
        }
        Ok(StateVector::from_raw(self.space.clone(), out))
    }
}

/// Breadth-first expansion of the basis reachable from `start` in at most
/// `depth` steps, in canonical label order.
pub fn reachable_basis(
    spec: &RuleSpec,
    space: &Space,
    start: &BasisLabel,
    depth: usize,
    dim_cap: usize,
) -> Result<Vec<BasisLabel>, DynamicsError> {
    let op = StepOperator { spec: spec.clone(), space: space.clone(), dim_cap };
    let mut seen: BTreeSet<BasisLabel> = BTreeSet::new();
    seen.insert(start.clone());
    let mut frontier: VecDeque<BasisLabel> = VecDeque::new();
    frontier.push_back(start.clone());
    for _ in 0..depth {
        let mut next = VecDeque::new();
        while let Some(label) = frontier.pop_front() {
            for (image, amp) in op.apply_label(&label) {
                if amp.norm() > 1e-16 && seen.insert(image.clone()) {
                    if seen.len() > dim_cap {
                        return Err(DynamicsError::DimensionCap { cap: dim_cap, reached: seen.len() });
                    }
                    next.push_back(image);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    Ok(seen.into_iter().collect())
}

/// Validates a rule spec and returns the step operator. Totality is checked
/// first; then the induced matrix on the reachable basis must have
/// orthonormal columns within `NORM_TOL`.
pub fn build_step(
    spec: RuleSpec,
    space: &Space,
    opts: &ValidationOptions,
) -> Result<StepOperator, DynamicsError> {
    spec.check_total(space)?;
    let basis = reachable_basis(&spec, space, &opts.start, opts.depth, opts.dim_cap)?;
    let op = StepOperator { spec, space: space.clone(), dim_cap: opts.dim_cap };

    // Gram matrix of the image columns, accumulated sparsely by image label.
    let mut by_image: BTreeMap<BasisLabel, Vec<(usize, Complex64)>> = BTreeMap::new();
    for (col, label) in basis.iter().enumerate() {
        for (image, amp) in op.apply_label(label) {
            if amp.norm() > 1e-16 {
                by_image.entry(image).or_default().push((col, amp));
            }
        }
    }
    let mut gram: BTreeMap<(usize, usize), Complex64> = BTreeMap::new();
    for entries in by_image.values() {
        for &(i, a) in entries {
            for &(j, b) in entries {
                if i <= j {
                    *gram.entry((i, j)).or_insert(Complex64::ZERO) += a.conj() * b;
                }
            }
        }
    }
    let mut worst = 0.0f64;
    let mut offenders: Option<(usize, usize)> = None;
    for (col, _) in basis.iter().enumerate() {
        let diag = gram.get(&(col, col)).copied().unwrap_or(Complex64::ZERO);
        let dev = (diag - Complex64::ONE).norm();
        if dev > worst {
            worst = dev;
            offenders = Some((col, col));
        }
    }
    for (&(i, j), &g) in &gram {
        if i != j && g.norm() > worst {
            worst = g.norm();
            offenders = Some((i, j));
        }
    }
    if worst > NORM_TOL {
        let (i, j) = offenders.expect("worst > 0 implies an offending entry");
        let row_of = |label: &BasisLabel| {
            (label.internal, label.config.symbol_at(label.position, op.space.alphabet()))
        };
        let mut rows = vec![row_of(&basis[i])];
        let other = row_of(&basis[j]);
        if !rows.contains(&other) {
            rows.push(other);
        }
        return Err(DynamicsError::UnitarityViolation { rows, deviation: worst });
    }
    Ok(op)
}

/// Deterministic writer: the head sweeps right from site 0 and swaps the
/// spacer with the target symbol at each site, entering a terminal internal
/// state after the last target site. On the all-spacer start state it writes
/// exactly the target expression.
pub fn build_writer(target: &[WordSpan], space: &Space) -> Result<StepOperator, DynamicsError> {
    let expr = crate::expressions::compose(target, space.alphabet())?;
    let (lo, hi) = match expr.support_bounds() {
        Some(b) => b,
        None => {
            // empty target: immediately terminal
            let space1 = Space::new(space.half_width(), 1, space.alphabet().clone());
            return build_step(RuleSpec::identity(&space1), &space1, &ValidationOptions::default());
        }
    };
    if lo < 0 {
        return Err(DynamicsError::TargetOutOfBounds { site: lo, half_width: space.half_width() });
    }
    // the sweeping head must be able to leave the last target site without
    // touching the boundary, or the step would not be reversible there
    if hi + 2 > space.half_width() {
        return Err(DynamicsError::TargetOutOfBounds { site: hi, half_width: space.half_width() });
    }
    let steps = (hi + 1) as u32; // sweep sites 0..=hi
    let internal_count = steps + 1;
    let space = Space::new(space.half_width(), internal_count, space.alphabet().clone());
    let spacer = space.alphabet().spacer();
    let mut rows = BTreeMap::new();
    for i in 0..steps {
        let site_symbol = expr.symbol_at(i as i64, space.alphabet());
        for &s in space.alphabet().symbols() {
            // transposition of spacer and the target symbol; identity off them
            let write = if s == spacer && site_symbol != spacer {
                site_symbol
            } else if s == site_symbol && site_symbol != spacer {
                spacer
            } else {
                s
            };
            rows.insert(
                (i, s),
                vec![RuleBranch { amplitude: Complex64::ONE, internal: i + 1, write, shift: Move::Right }],
            );
        }
    }
    // terminal: no further symbol changes, ballistic drift to the right
    // (a halting head that stays put would merge with its own past and
    // break reversibility)
    for &s in space.alphabet().symbols() {
        rows.insert(
            (steps, s),
            vec![RuleBranch { amplitude: Complex64::ONE, internal: steps, write: s, shift: Move::Right }],
        );
    }
    let spec = RuleSpec { internal_count, rows };
    let opts = ValidationOptions {
        depth: steps as usize,
        ..ValidationOptions::default()
    };
    build_step(spec, &space, &opts)
}

/// Synthetic pathological dynamics: the head stays at site 0 and toggles the
/// symbol there between the spacer and `mark` forever, so no finite lattice
/// region ever stabilizes. Negative control for the stability estimator.
pub fn build_toggler(space: &Space, mark: char) -> Result<StepOperator, DynamicsError> {
    let space = Space::new(space.half_width(), 1, space.alphabet().clone());
    let spacer = space.alphabet().spacer();
    if !space.alphabet().contains(mark) || mark == spacer {
        return Err(DynamicsError::UnknownSymbol(mark));
    }
    let mut rows = BTreeMap::new();
    for &s in space.alphabet().symbols() {
        let write = if s == spacer {
            mark
        } else if s == mark {
            spacer
        } else {
            s
        };
        rows.insert(
            (0, s),
            vec![RuleBranch { amplitude: Complex64::ONE, internal: 0, write, shift: Move::Stay }],
        );
    }
    build_step(RuleSpec { internal_count: 1, rows }, &space, &ValidationOptions::default())
}

/// Hadamard-coin walk: two internal states mix with a Hadamard coin; the head
/// moves right in coin state 0 and left in coin state 1, writing nothing.
/// Valid while the walk stays away from the boundary.
pub fn hadamard_walk_spec(space: &Space) -> RuleSpec {
    let r = Complex64::new(1.0 / libm::sqrt(2.0), 0.0);
    let mut rows = BTreeMap::new();
    for &s in space.alphabet().symbols() {
        rows.insert(
            (0, s),
            vec![
                RuleBranch { amplitude: r, internal: 0, write: s, shift: Move::Right },
                RuleBranch { amplitude: r, internal: 1, write: s, shift: Move::Left },
            ],
        );
        rows.insert(
            (1, s),
            vec![
                RuleBranch { amplitude: r, internal: 0, write: s, shift: Move::Right },
                RuleBranch { amplitude: -r, internal: 1, write: s, shift: Move::Left },
            ],
        );
    }
    RuleSpec { internal_count: 2, rows }
}

/// Random phased permutation rule: a permutation of (internal, symbol) pairs
/// with uniform random phases, the head move a function of the new internal
/// state. Unitary wherever the reachable basis avoids the boundary.
pub fn random_permutation_spec(space: &Space, rng: &mut dyn RngCore) -> RuleSpec {
    let internal_count = space.internal_count();
    let mut pairs: Vec<(u32, char)> = (0..internal_count)
        .flat_map(|i| space.alphabet().symbols().iter().map(move |&s| (i, s)))
        .collect();
    // Fisher-Yates
    for i in (1..pairs.len()).rev() {
        let j = (rng.next_u64() % (i as u64 + 1)) as usize;
        pairs.swap(i, j);
    }
    let moves: Vec<Move> = (0..internal_count)
        .map(|_| match rng.next_u64() % 3 {
            0 => Move::Left,
            1 => Move::Stay,
            _ => Move::Right,
        })
        .collect();
    let inputs: Vec<(u32, char)> = (0..internal_count)
        .flat_map(|i| space.alphabet().symbols().iter().map(move |&s| (i, s)))
        .collect();
    let mut rows = BTreeMap::new();
    for (input, &(internal, write)) in inputs.into_iter().zip(pairs.iter()) {
        let theta = (rng.next_u64() as f64 / u64::MAX as f64) * core::f64::consts::TAU;
        let amplitude = Complex64::new(libm::cos(theta), libm::sin(theta));
        rows.insert(
            input,
            vec![RuleBranch { amplitude, internal, write, shift: moves[internal as usize] }],
        );
    }
    RuleSpec { internal_count, rows }
}

/// Probability series p(t), t = 0..=T.
#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    probs: Vec<f64>,
}

impl Trace {
    pub fn from_probs(probs: Vec<f64>) -> Self {
        debug_assert!(probs.iter().all(|p| (-NORM_TOL..=1.0 + NORM_TOL).contains(p)));
        Self { probs }
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn horizon(&self) -> usize {
        self.probs.len().saturating_sub(1)
    }
}

/// ψ_t = U^t ψ_0.
pub fn evolve(
    psi0: &StateVector,
    op: &StepOperator,
    steps: usize,
) -> Result<StateVector, DynamicsError> {
    let mut psi = psi0.clone();
    for _ in 0..steps {
        psi = op.apply_state(&psi)?;
    }
    Ok(psi)
}

/// Schrödinger-picture trace: series[t] = ⟨ψ_t| P |ψ_t⟩ for t = 0..=T.
/// Equals the Heisenberg form ⟨ψ_0| U†^t P U^t |ψ_0⟩ by construction.
pub fn probability_trace(
    psi0: &StateVector,
    op: &StepOperator,
    projector: &IntervalProjector,
    horizon: usize,
) -> Result<Trace, DynamicsError> {
    let mut probs = Vec::with_capacity(horizon + 1);
    let mut psi = psi0.clone();
    probs.push(psi.projector_prob(projector));
    for _ in 0..horizon {
        psi = op.apply_state(&psi)?;
        probs.push(psi.projector_prob(projector));
    }
    Ok(Trace::from_probs(probs))
}

/// Heisenberg-picture trace computed on the explicit truncated matrix:
/// the basis is the BFS closure of ψ_0's support to depth T+1, U is stored
/// column-sparse on it, and series[t] = ψ_0† (U†^t P U^t) ψ_0 via matrix
/// actions only. Independent arithmetic route for cross-checking
/// [`probability_trace`].
pub fn heisenberg_trace(
    psi0: &StateVector,
    op: &StepOperator,
    projector: &IntervalProjector,
    horizon: usize,
    dim_cap: usize,
) -> Result<Trace, DynamicsError> {
    let mut basis: BTreeSet<BasisLabel> = BTreeSet::new();
    for label in psi0.amplitudes().keys() {
        for b in reachable_basis(op.spec(), op.space(), label, horizon + 1, dim_cap)? {
            basis.insert(b);
        }
        if basis.len() > dim_cap {
            return Err(DynamicsError::DimensionCap { cap: dim_cap, reached: basis.len() });
        }
    }
    let basis: Vec<BasisLabel> = basis.into_iter().collect();
    let index: BTreeMap<&BasisLabel, usize> = basis.iter().enumerate().map(|(i, b)| (b, i)).collect();
    let dim = basis.len();

    // column-sparse U (components leaving the closure belong to depths beyond
    // the horizon and never contribute to series[t] for t <= T)
    let mut columns: Vec<Vec<(usize, Complex64)>> = Vec::with_capacity(dim);
    for label in &basis {
        let col = op
            .apply_label(label)
            .into_iter()
            .filter_map(|(image, amp)| index.get(&image).map(|&i| (i, amp)))
            .collect();
        columns.push(col);
    }
    let matvec = |v: &[Complex64]| {
        let mut out = vec![Complex64::ZERO; dim];
        for (j, col) in columns.iter().enumerate() {
            for &(i, amp) in col {
                out[i] += amp * v[j];
            }
        }
        out
    };
    let adjoint_matvec = |v: &[Complex64]| {
        let mut out = vec![Complex64::ZERO; dim];
        for (j, col) in columns.iter().enumerate() {
            for &(i, amp) in col {
                out[j] += amp.conj() * v[i];
            }
        }
        out
    };
    let project = |v: &[Complex64]| {
        let mut out = vec![Complex64::ZERO; dim];
        for (i, label) in basis.iter().enumerate() {
            if projector.matches(label, op.space()) {
                out[i] = v[i];
            }
        }
        out
    };

    let mut psi_vec = vec![Complex64::ZERO; dim];
    for (label, amp) in psi0.amplitudes() {
        psi_vec[index[label]] = *amp;
    }

    let mut probs = Vec::with_capacity(horizon + 1);
    let mut forward = psi_vec.clone();
    for t in 0..=horizon {
        if t > 0 {
            forward = matvec(&forward);
        }
        // z = U†^t P U^t ψ0, then p = ψ0† z
        let mut z = project(&forward);
        for _ in 0..t {
            z = adjoint_matvec(&z);
        }
        let p: Complex64 = psi_vec.iter().zip(&z).map(|(a, b)| a.conj() * b).sum();
        probs.push(p.re);
    }
    Ok(Trace::from_probs(probs))
}
