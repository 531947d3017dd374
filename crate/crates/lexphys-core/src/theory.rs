//! Toy axiomatizable theories over the shipped grammar.
//!
//! The deductive core is a Hilbert-style propositional system: three axiom
//! schemas (K, S, contraposition) plus modus ponens, with implication as the
//! derived form A → B := (¬A ∨ B). Atomic formulas are the grammar's atomic
//! productions, treated as opaque propositional atoms. Keeping the core
//! propositional makes satisfiability decidable by truth table, which gives
//! an independent model-existence oracle for the enumeration machinery.

use alloc::boxed::Box;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use rand_core::{RngCore, SeedableRng};

use crate::alphabet::{Alphabet, DigitMap};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TheoryError {
    Ungrammatical { line: String },
    EmptyProof,
    BadBound { bound: usize },
    GeneratorExhausted { tries: usize },
}

impl fmt::Display for TheoryError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Ungrammatical { line } => write!(f, "ungrammatical line: {line}"),
            Self::EmptyProof => write!(f, "proof has no lines"),
            Self::BadBound { bound } => write!(f, "search bound {bound} must be >= 2"),
            Self::GeneratorExhausted { tries } => {
                write!(f, "no verified theory pair found in {tries} tries")
            }
        }
    }
}

impl core::error::Error for TheoryError {}

/// Well-formed formula. Implication is the derived connective
/// `imp(a, b) = Or(Not(a), b)`, so every schema instance is Or-topped.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    Atom(String),
    Not(Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
}

impl Formula {
    pub fn atom(text: &str) -> Self {
        Self::Atom(String::from(text))
    }

    pub fn not(f: Formula) -> Self {
        Self::Not(Box::new(f))
    }

    pub fn or(a: Formula, b: Formula) -> Self {
        Self::Or(Box::new(a), Box::new(b))
    }

    pub fn imp(a: Formula, b: Formula) -> Self {
        Self::or(Self::not(a), b)
    }

    /// Reads an Or-topped formula as an implication when its left disjunct
    /// is a negation.
    pub fn as_implication(&self) -> Option<(&Formula, &Formula)> {
        match self {
            Self::Or(l, r) => match l.as_ref() {
                Self::Not(a) => Some((a, r)),
                _ => None,
            },
            _ => None,
        }
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        self.render_into(&mut out);
        out
    }

    fn render_into(&self, out: &mut String) {
        match self {
            Self::Atom(s) => out.push_str(s),
            Self::Not(f) => {
                out.push('¬');
                f.render_into(out);
            }
            Self::Or(a, b) => {
                out.push('(');
                a.render_into(out);
                out.push('∨');
                b.render_into(out);
                out.push(')');
            }
        }
    }

    /// Symbol count of the rendered form.
    pub fn encoded_len(&self) -> usize {
        match self {
            Self::Atom(s) => s.chars().count(),
            Self::Not(f) => 1 + f.encoded_len(),
            Self::Or(a, b) => 3 + a.encoded_len() + b.encoded_len(),
        }
    }

    pub fn parse(text: &str) -> Result<Self, TheoryError> {
        let chars: Vec<char> = text.chars().collect();
        parse_formula(&chars, 0)
            .and_then(|(f, end)| if end == chars.len() { Some(f) } else { None })
            .ok_or(TheoryError::Ungrammatical { line: String::from(text) })
    }
}

fn parse_term(chars: &[char], at: usize) -> Option<usize> {
    match chars.get(at)? {
        '0' | '1' | 'c' | 'v' => Some(at + 1),
        'f' => {
            if chars.get(at + 1) == Some(&'(') {
                let end = parse_term(chars, at + 2)?;
                (chars.get(end) == Some(&')')).then_some(end + 1)
            } else {
                None
            }
        }
        _ => None,
    }
}

fn parse_atomic(chars: &[char], at: usize) -> Option<(Formula, usize)> {
    match chars.get(at)? {
        'r' => {
            if chars.get(at + 1) == Some(&'(') {
                let end = parse_term(chars, at + 2)?;
                if chars.get(end) == Some(&')') {
                    let text: String = chars[at..=end].iter().collect();
                    return Some((Formula::Atom(text), end + 1));
                }
            }
            None
        }
        '(' => {
            let mid = parse_term(chars, at + 1)?;
            if chars.get(mid) == Some(&'=') {
                let end = parse_term(chars, mid + 1)?;
                if chars.get(end) == Some(&')') {
                    let text: String = chars[at..=end].iter().collect();
                    return Some((Formula::Atom(text), end + 1));
                }
            }
            None
        }
        _ => None,
    }
}

fn parse_formula(chars: &[char], at: usize) -> Option<(Formula, usize)> {
    match chars.get(at)? {
        '¬' => {
            let (inner, end) = parse_formula(chars, at + 1)?;
            Some((Formula::not(inner), end))
        }
        '(' => {
            // disjunction first, then the (T=T) atomic shape
            if let Some((left, mid)) = parse_formula(chars, at + 1) {
                if chars.get(mid) == Some(&'∨') {
                    if let Some((right, end)) = parse_formula(chars, mid + 1) {
                        if chars.get(end) == Some(&')') {
                            return Some((Formula::or(left, right), end + 1));
                        }
                    }
                }
            }
            parse_atomic(chars, at)
        }
        _ => parse_atomic(chars, at),
    }
}

/// Canonical order: encoded length first, then lexicographic on the digit
/// encoding of the rendered text under the standard digit map.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct CanonicalKey {
    pub len: usize,
    pub digits: Vec<u8>,
}

pub fn canonical_key(f: &Formula) -> CanonicalKey {
    let alphabet = Alphabet::standard();
    let digits = DigitMap::canonical(&alphabet);
    key_with(&digits, f)
}

fn key_with(digits: &DigitMap, f: &Formula) -> CanonicalKey {
    let encoded: Vec<u8> = f
        .render()
        .chars()
        .map(|c| digits.digit_of(c).expect("rendered symbol in alphabet"))
        .collect();
    CanonicalKey { len: encoded.len(), digits: encoded }
}

fn standard_digits() -> DigitMap {
    DigitMap::canonical(&Alphabet::standard())
}

/// Atom pool the enumeration machinery ranges over.
#[derive(Debug, Clone)]
pub struct Language {
    pub atoms: Vec<Formula>,
}

impl Language {
    /// Three-atom default: r(0), r(1), r(c).
    pub fn standard() -> Self {
        Self {
            atoms: vec![Formula::atom("r(0)"), Formula::atom("r(1)"), Formula::atom("r(c)")],
        }
    }

    /// All formulas grouped by encoded length, each group canonically
    /// ordered, for lengths up to `max_len`.
    pub fn formulas_by_len(&self, max_len: usize) -> Vec<Vec<Formula>> {
        let mut by_len: Vec<Vec<Formula>> = vec![Vec::new(); max_len + 1];
        for a in &self.atoms {
            let l = a.encoded_len();
            if l <= max_len {
                by_len[l].push(a.clone());
            }
        }
        for l in 1..=max_len {
            // negations of everything one symbol shorter
            let prev: Vec<Formula> = by_len[l - 1].clone();
            for f in prev {
                by_len[l].push(Formula::not(f));
            }
            // disjunctions paying 3 symbols of punctuation
            if l >= 3 {
                for la in 1..=(l - 3) {
                    let lb = l - 3 - la;
                    if lb < 1 {
                        continue;
                    }
                    let pairs: Vec<(Formula, Formula)> = by_len[la]
                        .iter()
                        .flat_map(|a| by_len[lb].iter().map(move |b| (a.clone(), b.clone())))
                        .collect();
                    for (a, b) in pairs {
                        by_len[l].push(Formula::or(a, b));
                    }
                }
            }
        }
        let digits = standard_digits();
        for group in &mut by_len {
            group.sort_by_key(|f| key_with(&digits, f));
        }
        by_len
    }

    /// All formulas of encoded length at most `max_len`, canonically ordered.
    pub fn formulas_up_to(&self, max_len: usize) -> Vec<Formula> {
        self.formulas_by_len(max_len).into_iter().flatten().collect()
    }
}

/// Every schema instance of encoded length at most `cap`. Sound because the
/// component pools are cut exactly at the lengths the schema shapes admit:
/// K costs 8 + 2|A| + |B|, CP costs 14 + 2|A| + 2|B|, and S costs
/// 24 + 3|A| + 2|B| + 2|C| symbols.
pub fn schema_instances_up_to(lang: &Language, cap: usize) -> Vec<Formula> {
    let mut out = Vec::new();
    let pool = |max: usize| lang.formulas_up_to(max);
    // K: A -> (B -> A)
    if cap >= 8 + 4 + 4 + 4 {
        let pool_a = pool((cap - 8 - 4) / 2);
        let pool_b = pool(cap - 8 - 2 * 4);
        for a in &pool_a {
            let budget_b = cap - 8 - 2 * a.encoded_len();
            for b in &pool_b {
                if b.encoded_len() > budget_b {
                    continue;
                }
                out.push(Formula::imp(a.clone(), Formula::imp(b.clone(), a.clone())));
            }
        }
    }
    // CP: (¬B -> ¬A) -> (A -> B)
    if cap >= 14 + 4 * 4 {
        let pool_ab = pool((cap - 14 - 2 * 4) / 2);
        for a in &pool_ab {
            let budget_b = (cap - 14 - 2 * a.encoded_len()) / 2;
            for b in &pool_ab {
                if b.encoded_len() > budget_b {
                    continue;
                }
                out.push(Formula::imp(
                    Formula::imp(Formula::not(b.clone()), Formula::not(a.clone())),
                    Formula::imp(a.clone(), b.clone()),
                ));
            }
        }
    }
    // S: (A -> (B -> C)) -> ((A -> B) -> (A -> C))
    if cap >= 24 + 3 * 4 + 2 * 4 + 2 * 4 {
        let pool_s = pool((cap - 24 - 4 * 4) / 2);
        for a in &pool_s {
            if 24 + 3 * a.encoded_len() + 2 * 4 + 2 * 4 > cap {
                continue;
            }
            let after_a = cap - 24 - 3 * a.encoded_len();
            for b in &pool_s {
                if 2 * b.encoded_len() + 2 * 4 > after_a {
                    continue;
                }
                let budget_c = (after_a - 2 * b.encoded_len()) / 2;
                for c in &pool_s {
                    if c.encoded_len() > budget_c {
                        continue;
                    }
                    out.push(Formula::imp(
                        Formula::imp(a.clone(), Formula::imp(b.clone(), c.clone())),
                        Formula::imp(
                            Formula::imp(a.clone(), b.clone()),
                            Formula::imp(a.clone(), c.clone()),
                        ),
                    ));
                }
            }
        }
    }
    out
}

/// Axiom schemas of the Hilbert core.
///
///   K:  A → (B → A)
///   S:  (A → (B → C)) → ((A → B) → (A → C))
///   CP: (¬B → ¬A) → (A → B)
pub fn is_schema_instance(f: &Formula) -> bool {
    let Some((p, q)) = f.as_implication() else { return false };
    // K
    if let Some((_, a2)) = q.as_implication() {
        if p == a2 {
            return true;
        }
    }
    // S
    if let (Some((a, rest)), Some((ab, ac))) = (p.as_implication(), q.as_implication()) {
        if let (Some((b, c)), Some((a2, b2)), Some((a3, c2))) =
            (rest.as_implication(), ab.as_implication(), ac.as_implication())
        {
            if a == a2 && a == a3 && b == b2 && c == c2 {
                return true;
            }
        }
    }
    // CP
    if let (Some((nb, na)), Some((a2, b2))) = (p.as_implication(), q.as_implication()) {
        if let (Formula::Not(b), Formula::Not(a)) = (nb, na) {
            if a.as_ref() == a2 && b.as_ref() == b2 {
                return true;
            }
        }
    }
    false
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Theory {
    pub axioms: BTreeSet<Formula>,
}

impl Theory {
    pub fn new(axioms: impl IntoIterator<Item = Formula>) -> Self {
        Self { axioms: axioms.into_iter().collect() }
    }

    /// Parses each line; an ungrammatical axiom is an error.
    pub fn from_texts(lines: &[&str]) -> Result<Self, TheoryError> {
        let axioms = lines
            .iter()
            .map(|l| Formula::parse(l))
            .collect::<Result<BTreeSet<_>, _>>()?;
        Ok(Self { axioms })
    }

    pub fn is_axiom(&self, f: &Formula) -> bool {
        self.axioms.contains(f) || is_schema_instance(f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct ProofString {
    pub lines: Vec<Formula>,
}

impl ProofString {
    pub fn new(lines: Vec<Formula>) -> Result<Self, TheoryError> {
        if lines.is_empty() {
            return Err(TheoryError::EmptyProof);
        }
        Ok(Self { lines })
    }

    /// Parses text lines; an ungrammatical line is an error distinct from
    /// an invalid proof.
    pub fn from_texts(lines: &[&str]) -> Result<Self, TheoryError> {
        let parsed = lines
            .iter()
            .map(|l| Formula::parse(l))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(parsed)
    }

    pub fn total_len(&self) -> usize {
        self.lines.iter().map(Formula::encoded_len).sum()
    }

    /// True when the terminal line is the negation of an earlier line.
    pub fn terminal_negates_earlier(&self) -> bool {
        let Some(Formula::Not(inner)) = self.lines.last() else { return false };
        self.lines[..self.lines.len() - 1]
            .iter()
            .any(|earlier| earlier == inner.as_ref())
    }
}

/// True iff every line is an axiom (theory member or schema instance) or
/// follows from two earlier lines by modus ponens.
pub fn check_proof(p: &ProofString, t: &Theory) -> bool {
    for (k, line) in p.lines.iter().enumerate() {
        if t.is_axiom(line) {
            continue;
        }
        let by_mp = p.lines[..k].iter().any(|major| {
            major
                .as_implication()
                .map(|(ante, cons)| cons == line && p.lines[..k].contains(ante))
                .unwrap_or(false)
        });
        if !by_mp {
            return false;
        }
    }
    true
}

/// Parses then checks; grammar failures surface as errors, not `false`.
pub fn check_proof_texts(lines: &[&str], t: &Theory) -> Result<bool, TheoryError> {
    Ok(check_proof(&ProofString::from_texts(lines)?, t))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Consistent,
    InconsistentMode,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EnumeratedItem {
    Proof(ProofString),
    PlainFormula(Formula),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Enumeration {
    pub items: Vec<EnumeratedItem>,
    pub final_mode: Mode,
    /// index of the proof that triggered the switch, if any
    pub flipped_at: Option<usize>,
}

/// Hard ceiling on the total encoded length the proof stream explores.
pub const ENUMERATION_LENGTH_CAP: usize = 36;

/// Enumerates valid proofs in canonical order (total encoded length, ties
/// lexicographic on the per-line digit encodings). After each emission the
/// terminal line is checked against the earlier lines; once a proof ends in
/// the negation of one of its earlier lines the mode flips and the stream
/// degenerates to the plain canonical enumeration of grammatical formulas.
/// `budget` caps the number of emitted items; the stream also ends when the
/// total-length ceiling is reached.
pub fn enumerate_theorems(t: &Theory, lang: &Language, budget: usize) -> Enumeration {
    let cap = ENUMERATION_LENGTH_CAP;
    let digits = standard_digits();
    let mut items = Vec::new();
    let mut flipped_at = None;

    // axiom candidates grouped by encoded length: theory members plus every
    // schema instance that fits under the ceiling
    let mut axiom_pool: BTreeSet<Formula> = t
        .axioms
        .iter()
        .filter(|f| f.encoded_len() <= cap)
        .cloned()
        .collect();
    axiom_pool.extend(schema_instances_up_to(lang, cap));
    let mut axioms_by_len: BTreeMap<usize, Vec<Formula>> = BTreeMap::new();
    for f in axiom_pool {
        axioms_by_len.entry(f.encoded_len()).or_default().push(f);
    }

    let mut proofs_by_total: BTreeMap<usize, Vec<ProofString>> = BTreeMap::new();
    'levels: for total in 1..=cap {
        let mut level: Vec<ProofString> = Vec::new();
        // axiom extensions of shorter proofs (or fresh single-line proofs)
        for (&line_len, axioms) in axioms_by_len.range(1..=total) {
            let prefix_total = total - line_len;
            if prefix_total == 0 {
                for f in axioms {
                    level.push(ProofString { lines: vec![f.clone()] });
                }
                continue;
            }
            let Some(prefixes) = proofs_by_total.get(&prefix_total) else { continue };
            for p in prefixes {
                for f in axioms {
                    let mut lines = p.lines.clone();
                    lines.push(f.clone());
                    level.push(ProofString { lines });
                }
            }
        }
        // modus-ponens extensions, consequents read off the prefix itself
        for (&prefix_total, prefixes) in proofs_by_total.range(1..total) {
            let needed = total - prefix_total;
            for p in prefixes {
                let mut fired: BTreeSet<&Formula> = BTreeSet::new();
                for major in &p.lines {
                    let Some((ante, cons)) = major.as_implication() else { continue };
                    if cons.encoded_len() != needed
                        || t.is_axiom(cons)
                        || !p.lines.contains(ante)
                        || !fired.insert(cons)
                    {
                        continue;
                    }
                    let mut lines = p.lines.clone();
                    lines.push(cons.clone());
                    level.push(ProofString { lines });
                }
            }
        }
        let mut keyed: Vec<(Vec<CanonicalKey>, ProofString)> = level
            .into_iter()
            .map(|p| (p.lines.iter().map(|f| key_with(&digits, f)).collect(), p))
            .collect();
        keyed.sort();
        keyed.dedup();
        let level: Vec<ProofString> = keyed.into_iter().map(|(_, p)| p).collect();
        for p in &level {
            if items.len() >= budget {
                break 'levels;
            }
            let negates = p.terminal_negates_earlier();
            items.push(EnumeratedItem::Proof(p.clone()));
            if negates {
                flipped_at = Some(items.len() - 1);
                break 'levels;
            }
        }
        proofs_by_total.insert(total, level);
        if items.len() >= budget {
            break;
        }
    }

    if flipped_at.is_some() && items.len() < budget {
        // grow the formula window until it covers the remaining budget;
        // counts grow fast in the length bound, so this stays small
        let remaining = budget - items.len();
        let mut max_len = 8;
        let groups = loop {
            let groups = lang.formulas_by_len(max_len);
            let count: usize = groups.iter().map(Vec::len).sum();
            if count >= remaining || max_len >= 28 {
                break groups;
            }
            max_len += 4;
        };
        'plain: for group in groups {
            for f in group {
                if items.len() >= budget {
                    break 'plain;
                }
                items.push(EnumeratedItem::PlainFormula(f));
            }
        }
    }

    Enumeration {
        final_mode: if flipped_at.is_some() { Mode::InconsistentMode } else { Mode::Consistent },
        items,
        flipped_at,
    }
}

/// Exact minimum line count of a valid proof whose terminal line negates an
/// earlier line, or None if there is none within `bound` lines.
///
/// Lengths 2 and 3 are decided by case analysis, which is exact because
/// every schema instance is Or-topped: a length-2 inconsistency [X, ¬X]
/// forces ¬X ∈ T with X an axiom, and a length-3 one additionally admits
/// only a theory axiom of the shape Y → ¬Y as modus-ponens major premise.
/// From length 4 the search runs over the subformula closure of the axioms
/// and their negations, which covers every proof built from theory material.
pub fn shortest_inconsistency_proof(t: &Theory, bound: usize) -> Result<Option<usize>, TheoryError> {
    if bound < 2 {
        return Err(TheoryError::BadBound { bound });
    }
    // length 2
    let len2 = t.axioms.iter().any(|ax| match ax {
        Formula::Not(x) => t.is_axiom(x),
        _ => false,
    });
    if len2 {
        return Ok(Some(2));
    }
    if bound == 2 {
        return Ok(None);
    }
    // length 3: some theory axiom Y → ¬Y with Y itself an axiom
    let len3 = t.axioms.iter().any(|ax| {
        ax.as_implication()
            .map(|(y, c)| matches!(c, Formula::Not(inner) if inner.as_ref() == y) && t.is_axiom(y))
            .unwrap_or(false)
    });
    if len3 {
        return Ok(Some(3));
    }
    if bound == 3 {
        return Ok(None);
    }
    // bounded search over the closure universe
    let mut universe: BTreeSet<Formula> = BTreeSet::new();
    fn subformulas(f: &Formula, out: &mut BTreeSet<Formula>) {
        out.insert(f.clone());
        match f {
            Formula::Atom(_) => {}
            Formula::Not(inner) => subformulas(inner, out),
            Formula::Or(a, b) => {
                subformulas(a, out);
                subformulas(b, out);
            }
        }
    }
    for ax in &t.axioms {
        subformulas(ax, &mut universe);
    }
    let negations: Vec<Formula> = universe.iter().cloned().map(Formula::not).collect();
    universe.extend(negations);
    let universe: Vec<Formula> = universe.into_iter().collect();

    fn extendable(t: &Theory, lines: &[Formula], f: &Formula) -> bool {
        t.is_axiom(f)
            || lines.iter().any(|major| {
                major
                    .as_implication()
                    .map(|(a, c)| c == f && lines.contains(a))
                    .unwrap_or(false)
            })
    }

    // iterative deepening: minimal proofs never repeat a line, so the DFS
    // ranges over distinct-line sequences only
    fn search_exact(t: &Theory, universe: &[Formula], lines: &mut Vec<Formula>, k: usize) -> bool {
        if lines.len() == k {
            if let Some(Formula::Not(inner)) = lines.last() {
                return lines[..k - 1].iter().any(|e| e == inner.as_ref());
            }
            return false;
        }
        for f in universe {
            if lines.contains(f) || !extendable(t, lines, f) {
                continue;
            }
            lines.push(f.clone());
            if search_exact(t, universe, lines, k) {
                lines.pop();
                return true;
            }
            lines.pop();
        }
        false
    }

    for k in 4..=bound {
        if search_exact(t, &universe, &mut Vec::new(), k) {
            return Ok(Some(k));
        }
    }
    Ok(None)
}

/// Bit length of the canonical self-delimiting serialization of the axiom
/// set: a 16-bit count, then per axiom a 16-bit symbol count followed by a
/// 4-bit code per symbol, axioms in canonical order. Documented upper-bound
/// proxy for algorithmic complexity, not the real thing.
pub fn axiom_complexity(t: &Theory) -> u64 {
    let mut bits = 16u64;
    for ax in &t.axioms {
        bits += 16 + 4 * ax.encoded_len() as u64;
    }
    bits
}

pub fn extend_theory(t: &Theory, extra: impl IntoIterator<Item = Formula>) -> Theory {
    let mut axioms = t.axioms.clone();
    axioms.extend(extra);
    Theory { axioms }
}

/// Truth-table satisfiability of a formula set over its own atoms.
pub fn satisfiable(formulas: &[Formula]) -> bool {
    fn atoms_of(f: &Formula, out: &mut BTreeSet<String>) {
        match f {
            Formula::Atom(s) => {
                out.insert(s.clone());
            }
            Formula::Not(inner) => atoms_of(inner, out),
            Formula::Or(a, b) => {
                atoms_of(a, out);
                atoms_of(b, out);
            }
        }
    }
    let mut atoms = BTreeSet::new();
    for f in formulas {
        atoms_of(f, &mut atoms);
    }
    let atoms: Vec<String> = atoms.into_iter().collect();
    assert!(atoms.len() <= 20, "truth table over {} atoms is not desk scale", atoms.len());

    fn eval(f: &Formula, assignment: &BTreeMap<&str, bool>) -> bool {
        match f {
            Formula::Atom(s) => assignment[s.as_str()],
            Formula::Not(inner) => !eval(inner, assignment),
            Formula::Or(a, b) => eval(a, assignment) || eval(b, assignment),
        }
    }

    for mask in 0u32..(1 << atoms.len()) {
        let assignment: BTreeMap<&str, bool> = atoms
            .iter()
            .enumerate()
            .map(|(i, a)| (a.as_str(), mask & (1 << i) != 0))
            .collect();
        if formulas.iter().all(|f| eval(f, &assignment)) {
            return true;
        }
    }
    formulas.is_empty()
}

/// Predicate a meaningful word carries: its designated witness word must
/// occur (or must not) in any branch string where the word itself occurs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Predicate {
    Occurs(String),
    Absent(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Meaning {
    pub predicate: Predicate,
    /// word whose co-occurrence with the meaningful word breaks a path
    pub negation_word: Option<String>,
}

#[derive(Debug, Clone, Default)]
pub struct MeaningMap {
    pub assignments: BTreeMap<String, Meaning>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MeaningReport {
    pub valid: bool,
    pub complete: bool,
    pub path_consistent: bool,
}

/// Evaluates meanings over measurement branches; each branch string is a
/// whitespace-separated word list. The predicate of a word is only tested
/// on branches containing that word.
pub fn evaluate_meaning(branches: &[(f64, String)], mm: &MeaningMap) -> MeaningReport {
    let branch_words: Vec<BTreeSet<&str>> = branches
        .iter()
        .map(|(_, s)| s.split_whitespace().collect())
        .collect();

    let mut valid = true;
    let mut complete = true;
    let mut path_consistent = true;
    for (word, meaning) in &mm.assignments {
        let mut seen = false;
        for words in &branch_words {
            if !words.contains(word.as_str()) {
                continue;
            }
            seen = true;
            let holds = match &meaning.predicate {
                Predicate::Occurs(v) => words.contains(v.as_str()),
                Predicate::Absent(v) => !words.contains(v.as_str()),
            };
            if !holds {
                valid = false;
            }
            if let Some(neg) = &meaning.negation_word {
                if words.contains(neg.as_str()) {
                    path_consistent = false;
                }
            }
        }
        if !seen {
            complete = false;
        }
    }
    MeaningReport { valid, complete, path_consistent }
}

/// A verified pair: T1 satisfiable, T2 unsatisfiable with no short
/// inconsistency proof, axiom serializations within 8 bits of each other.
#[derive(Debug, Clone)]
pub struct ComplexityPair {
    pub t1: Theory,
    pub t2: Theory,
    pub bits1: u64,
    pub bits2: u64,
    pub t1_satisfiable: bool,
    pub t2_satisfiable: bool,
    pub shortest_inconsistency_t2: Option<usize>,
}

pub const COMPLEXITY_PAIR_MAX_BITS_APART: u64 = 8;
pub const COMPLEXITY_PAIR_MIN_PROOF: usize = 4;

/// Seeded search for a complexity pair. T2 candidates take the shape
/// {A, A → B, ¬B} over randomly drawn small formulas, which is always
/// unsatisfiable; T1 candidates are random satisfiable three-axiom sets.
/// Every accepted pair is re-verified with the truth-table oracle and the
/// proof search, so the construction shape carries no trust.
pub fn generate_complexity_pair(seed: u64, lang: &Language) -> Result<ComplexityPair, TheoryError> {
    let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(seed);
    let small = lang.formulas_up_to(6);
    // the T2 shape spends 5 punctuation symbols more than its raw parts, so
    // T1 candidates need somewhat longer formulas to land within 8 bits
    let wide = lang.formulas_up_to(12);
    let pick = |rng: &mut rand_chacha::ChaCha12Rng, pool: &[Formula]| {
        let i = (rng.next_u32() as usize) % pool.len();
        pool[i].clone()
    };
    const TRIES: usize = 2000;
    for _ in 0..TRIES {
        let a = pick(&mut rng, &small);
        let b = pick(&mut rng, &small);
        if a == b || b == Formula::not(a.clone()) || a == Formula::not(b.clone()) {
            continue;
        }
        let t2 = Theory::new([a.clone(), Formula::imp(a.clone(), b.clone()), Formula::not(b.clone())]);
        if t2.axioms.len() != 3 {
            continue;
        }
        let t2_sat = satisfiable(&t2.axioms.iter().cloned().collect::<Vec<_>>());
        let shortest = shortest_inconsistency_proof(&t2, 6)?;
        let short_ok = matches!(shortest, Some(k) if k >= COMPLEXITY_PAIR_MIN_PROOF);
        if t2_sat || !short_ok {
            continue;
        }
        let bits2 = axiom_complexity(&t2);
        // now hunt for a satisfiable T1 of nearby size
        for _ in 0..TRIES {
            let axioms = [pick(&mut rng, &wide), pick(&mut rng, &wide), pick(&mut rng, &wide)];
            let t1 = Theory::new(axioms.clone());
            if t1.axioms.len() != 3 {
                continue;
            }
            let bits1 = axiom_complexity(&t1);
            if bits1.abs_diff(bits2) > COMPLEXITY_PAIR_MAX_BITS_APART {
                continue;
            }
            let t1_sat = satisfiable(&axioms);
            if !t1_sat {
                continue;
            }
            if shortest_inconsistency_proof(&t1, 4)?.is_some() {
                continue;
            }
            return Ok(ComplexityPair {
                t1_satisfiable: t1_sat,
                t2_satisfiable: t2_sat,
                shortest_inconsistency_t2: shortest,
                bits1,
                bits2,
                t1,
                t2,
            });
        }
    }
    Err(TheoryError::GeneratorExhausted { tries: TRIES })
}

/// Proof dump in the one-formula-per-line text form.
pub fn render_proof(p: &ProofString) -> String {
    let mut out = String::new();
    for (i, line) in p.lines.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        out.push_str(&line.render());
    }
    out
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a() -> Formula {
        Formula::atom("r(0)")
    }
    fn b() -> Formula {
        Formula::atom("r(1)")
    }

    #[test]
    fn parse_render_round_trip() {
        let samples = [
            "r(0)",
            "¬r(1)",
            "(r(0)∨¬r(1))",
            "¬¬(r(c)∨r(0))",
            "(0=f(1))",
            "(¬(0=0)∨r(f(c)))",
        ];
        for s in samples {
            let f = Formula::parse(s).unwrap();
            assert_eq!(f.render(), s);
            assert_eq!(f.encoded_len(), s.chars().count());
        }
        for bad in ["", "r(", "(r(0)∨)", "r(0)∨r(1)", "∨", "x", "(0=)"] {
            assert!(Formula::parse(bad).is_err(), "{bad:?} parsed");
        }
    }

    #[test]
    fn schema_instances_recognized() {
        let k = Formula::imp(a(), Formula::imp(b(), a()));
        assert!(is_schema_instance(&k));
        let s = Formula::imp(
            Formula::imp(a(), Formula::imp(b(), Formula::atom("r(c)"))),
            Formula::imp(
                Formula::imp(a(), b()),
                Formula::imp(a(), Formula::atom("r(c)")),
            ),
        );
        assert!(is_schema_instance(&s));
        let cp = Formula::imp(
            Formula::imp(Formula::not(b()), Formula::not(a())),
            Formula::imp(a(), b()),
        );
        assert!(is_schema_instance(&cp));
        assert!(!is_schema_instance(&a()));
        assert!(!is_schema_instance(&Formula::imp(a(), b())));
        assert!(!is_schema_instance(&Formula::not(k)));
    }

    #[test]
    fn check_proof_examples() {
        let t = Theory::new([a(), Formula::imp(a(), b())]);
        let good = ProofString::new(vec![a(), Formula::imp(a(), b()), b()]).unwrap();
        assert!(check_proof(&good, &t));
        let lone = ProofString::new(vec![b()]).unwrap();
        assert!(!check_proof(&lone, &t));
        let underivable = ProofString::new(vec![a(), Formula::atom("r(c)")]).unwrap();
        assert!(!check_proof(&underivable, &t));

        assert!(matches!(
            check_proof_texts(&["r(0)", "banana"], &t),
            Err(TheoryError::Ungrammatical { .. })
        ));
        assert_eq!(check_proof_texts(&["r(1)"], &t), Ok(false));
    }

    #[test]
    fn enumeration_examples() {
        let lang = Language::standard();
        let t_cons = Theory::new([a()]);
        let run = enumerate_theorems(&t_cons, &lang, 300);
        assert_eq!(run.final_mode, Mode::Consistent);
        assert_eq!(run.items.len(), 300);
        assert!(matches!(&run.items[0], EnumeratedItem::Proof(p) if p.lines == vec![a()]));
        // soundness of every emitted proof
        for item in &run.items {
            match item {
                EnumeratedItem::Proof(p) => assert!(check_proof(p, &t_cons)),
                EnumeratedItem::PlainFormula(_) => panic!("no plain formulas in Consistent mode"),
            }
        }
        // canonical order: total lengths never decrease
        let mut last = 0;
        for item in &run.items {
            if let EnumeratedItem::Proof(p) = item {
                assert!(p.total_len() >= last);
                last = p.total_len();
            }
        }

        let t_inc = Theory::new([a(), Formula::not(a())]);
        let run = enumerate_theorems(&t_inc, &lang, 50);
        assert_eq!(run.final_mode, Mode::InconsistentMode);
        let flip = run.flipped_at.unwrap();
        let EnumeratedItem::Proof(p) = &run.items[flip] else { panic!() };
        assert_eq!(p.lines, vec![a(), Formula::not(a())]);
        assert!(matches!(run.items[flip + 1], EnumeratedItem::PlainFormula(_)));

        let one = enumerate_theorems(&t_cons, &lang, 1);
        assert_eq!(one.items.len(), 1);
    }

    #[test]
    fn enumeration_complete_at_small_scale() {
        // brute force everything of total encoded length <= 12
        let lang = Language::standard();
        let t = Theory::new([a(), b(), Formula::or(a(), b())]);
        let universe = lang.formulas_up_to(12);
        let mut brute: Vec<ProofString> = Vec::new();
        fn extend(
            t: &Theory,
            universe: &[Formula],
            lines: &mut Vec<Formula>,
            total: usize,
            out: &mut Vec<ProofString>,
        ) {
            for f in universe {
                let l = f.encoded_len();
                if total + l > 12 {
                    continue;
                }
                lines.push(f.clone());
                let p = ProofString { lines: lines.clone() };
                if check_proof(&p, t) {
                    out.push(p);
                    extend(t, universe, lines, total + l, out);
                }
                lines.pop();
            }
        }
        extend(&t, &universe, &mut Vec::new(), 0, &mut brute);

        let run = enumerate_theorems(&t, &lang, 100_000);
        let emitted: Vec<&ProofString> = run
            .items
            .iter()
            .filter_map(|i| match i {
                EnumeratedItem::Proof(p) if p.total_len() <= 12 => Some(p),
                _ => None,
            })
            .collect();
        assert_eq!(emitted.len(), brute.len());
        for p in &brute {
            assert!(emitted.contains(&p), "missing {:?}", render_proof(p));
        }
    }

    #[test]
    fn shortest_inconsistency_examples() {
        let t = Theory::new([a(), Formula::not(a())]);
        assert_eq!(shortest_inconsistency_proof(&t, 4).unwrap(), Some(2));

        let t = Theory::new([a()]);
        assert_eq!(shortest_inconsistency_proof(&t, 6).unwrap(), None);

        let t = Theory::new([a(), Formula::imp(a(), b()), Formula::not(b())]);
        assert_eq!(shortest_inconsistency_proof(&t, 6).unwrap(), Some(4));

        // Y -> ¬Y with Y an axiom gives the length-3 case
        let t = Theory::new([a(), Formula::imp(a(), Formula::not(a()))]);
        assert_eq!(shortest_inconsistency_proof(&t, 6).unwrap(), Some(3));

        assert!(shortest_inconsistency_proof(&t, 1).is_err());
    }

    #[test]
    fn complexity_proxy() {
        let empty = Theory::new([]);
        assert_eq!(axiom_complexity(&empty), 16);

        let t1 = Theory::new([a()]);
        let t2 = Theory::new([Formula::atom("r(1)")]);
        assert_eq!(axiom_complexity(&t1), axiom_complexity(&t2));
        let t3 = Theory::new([Formula::atom("r(f(1))")]); // three symbols longer
        assert_eq!(axiom_complexity(&t3) - axiom_complexity(&t1), 3 * 4);
    }

    #[test]
    fn extension_is_monotone() {
        let t = Theory::new([a()]);
        let ext = extend_theory(&t, [b()]);
        assert!(ext.axioms.contains(&a()) && ext.axioms.contains(&b()));
        assert_eq!(extend_theory(&t, []).axioms, t.axioms);
        assert_eq!(extend_theory(&t, [a()]).axioms, t.axioms);
        // any proof valid in t stays valid in ext
        let p = ProofString::new(vec![a()]).unwrap();
        assert!(check_proof(&p, &t) && check_proof(&p, &ext));
    }

    #[test]
    fn meaning_evaluation() {
        let mut mm = MeaningMap::default();
        mm.assignments.insert(
            String::from("w"),
            Meaning {
                predicate: Predicate::Occurs(String::from("v")),
                negation_word: Some(String::from("nw")),
            },
        );

        let good = [(1.0, String::from("w v"))];
        let r = evaluate_meaning(&good, &mm);
        assert!(r.valid && r.complete && r.path_consistent);

        let invalid = [(1.0, String::from("w"))];
        assert!(!evaluate_meaning(&invalid, &mm).valid);

        let split = [
            (0.5, String::from("w v")),
            (0.5, String::from("nw")),
        ];
        let r = evaluate_meaning(&split, &mm);
        assert!(r.valid && r.complete && r.path_consistent);

        let clash = [(1.0, String::from("w v nw"))];
        assert!(!evaluate_meaning(&clash, &mm).path_consistent);

        let missing = [(1.0, String::from("v"))];
        assert!(!evaluate_meaning(&missing, &mm).complete);
    }

    #[test]
    fn satisfiability_oracle() {
        assert!(satisfiable(&[a(), Formula::or(a(), b())]));
        assert!(!satisfiable(&[a(), Formula::not(a())]));
        assert!(!satisfiable(&[a(), Formula::imp(a(), b()), Formula::not(b())]));
        assert!(satisfiable(&[]));
    }

    #[test]
    fn complexity_pair_generator() {
        let pair = generate_complexity_pair(7, &Language::standard()).unwrap();
        assert!(pair.t1_satisfiable);
        assert!(!pair.t2_satisfiable);
        assert!(pair.shortest_inconsistency_t2.unwrap() >= COMPLEXITY_PAIR_MIN_PROOF);
        assert!(pair.bits1.abs_diff(pair.bits2) <= COMPLEXITY_PAIR_MAX_BITS_APART);
        // deterministic for a fixed seed
        let again = generate_complexity_pair(7, &Language::standard()).unwrap();
        assert_eq!(pair.t1, again.t1);
        assert_eq!(pair.t2, again.t2);
    }
}
