//! Ink molecules in potential wells on a 2-D lattice.
//!
//! Occupied wells hold one molecule in a thermal mixture over its internal
//! excitation levels; glyphs are site sets anchored at a fiducial mark with
//! scale parameters. Positional superpositions decohere immediately, which
//! is what lets a written page persist at all.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;
use core::fmt;

use rand_core::{RngCore, SeedableRng};

#[derive(Debug, Clone, PartialEq)]
pub enum InkError {
    EmptySpectrum,
    NonAscendingSpectrum { index: usize },
    NegativeEnergy { index: usize },
    BadTemperature { kt: f64 },
    BadScale { reason: &'static str },
    GlyphOverlap { first: usize, second: usize },
    TooClose { first: usize, second: usize, separation: i64, required_over: i64 },
    NonUnitTrace { trace: f64 },
    NotHermitian,
    BadFlipProbability { p: f64 },
}

impl fmt::Display for InkError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::EmptySpectrum => write!(f, "level spectrum is empty"),
            Self::NonAscendingSpectrum { index } => {
                write!(f, "energies must be strictly ascending (violated at {index})")
            }
            Self::NegativeEnergy { index } => write!(f, "negative energy at index {index}"),
            Self::BadTemperature { kt } => write!(f, "kT must be positive, got {kt}"),
            Self::BadScale { reason } => write!(f, "bad glyph scale: {reason}"),
            Self::GlyphOverlap { first, second } => {
                write!(f, "glyphs {first} and {second} overlap")
            }
            Self::TooClose { first, second, separation, required_over } => write!(
                f,
                "glyphs {first} and {second} are separated by {separation} empty sites, \
                 need more than {required_over}"
            ),
            Self::NonUnitTrace { trace } => write!(f, "density trace {trace} is not 1"),
            Self::NotHermitian => write!(f, "coherence weights are not Hermitian"),
            Self::BadFlipProbability { p } => write!(f, "flip probability {p} outside [0, 1]"),
        }
    }
}

impl core::error::Error for InkError {}

/// Internal excitation energies, strictly ascending and nonnegative.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelSpectrum {
    energies: Vec<f64>,
}

impl LevelSpectrum {
    pub fn new(energies: Vec<f64>) -> Result<Self, InkError> {
        if energies.is_empty() {
            return Err(InkError::EmptySpectrum);
        }
        for (i, &e) in energies.iter().enumerate() {
            if e < 0.0 || !e.is_finite() {
                return Err(InkError::NegativeEnergy { index: i });
            }
            if i > 0 && e <= energies[i - 1] {
                return Err(InkError::NonAscendingSpectrum { index: i });
            }
        }
        Ok(Self { energies })
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }
}

/// Probabilities over the spectrum's levels, by position in the spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalDensity {
    probabilities: Vec<f64>,
}

pub const TRACE_TOL: f64 = 1e-12;

impl DiagonalDensity {
    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn ground_probability(&self) -> f64 {
        self.probabilities[0]
    }
}

/// p_i = e^{−E_i/kT} / Z with Z the partition function.
pub fn thermal_state(levels: &LevelSpectrum, kt: f64) -> Result<DiagonalDensity, InkError> {
    if kt <= 0.0 || !kt.is_finite() {
        return Err(InkError::BadTemperature { kt });
    }
    // weights relative to the ground level keep Z well-conditioned
    let e0 = levels.energies[0];
    let weights: Vec<f64> = levels
        .energies
        .iter()
        .map(|&e| libm::exp(-(e - e0) / kt))
        .collect();
    let z: f64 = weights.iter().sum();
    Ok(DiagonalDensity { probabilities: weights.into_iter().map(|w| w / z).collect() })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GlyphKind {
    VBar,
    Diag,
    Tee,
}

/// A glyph is a site-set formula anchored at a fiducial mark (x, y) with
/// scale n (and arm half-width m for the tee, whose arm spans 2m+1 sites).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Glyph {
    pub kind: GlyphKind,
    pub fiducial: (i64, i64),
    pub n: i64,
    pub m: i64,
}

impl Glyph {
    pub fn vbar(fiducial: (i64, i64), n: i64) -> Result<Self, InkError> {
        if n < 1 {
            return Err(InkError::BadScale { reason: "n must be >= 1" });
        }
        Ok(Self { kind: GlyphKind::VBar, fiducial, n, m: 0 })
    }

    pub fn diag(fiducial: (i64, i64), n: i64) -> Result<Self, InkError> {
        if n < 1 {
            return Err(InkError::BadScale { reason: "n must be >= 1" });
        }
        Ok(Self { kind: GlyphKind::Diag, fiducial, n, m: 0 })
    }

    pub fn tee(fiducial: (i64, i64), n: i64, m: i64) -> Result<Self, InkError> {
        if n < 1 {
            return Err(InkError::BadScale { reason: "n must be >= 1" });
        }
        if m < 0 {
            return Err(InkError::BadScale { reason: "m must be >= 0" });
        }
        Ok(Self { kind: GlyphKind::Tee, fiducial, n, m })
    }
}

/// The site set a glyph occupies:
/// vbar extends upward for n sites, diag steps diagonally for n sites, and
/// the tee adds a horizontal arm of length 2m+1 at the top of its stem.
pub fn glyph_sites(g: &Glyph) -> BTreeSet<(i64, i64)> {
    let (x, y) = g.fiducial;
    let mut sites = BTreeSet::new();
    match g.kind {
        GlyphKind::VBar => {
            for i in 0..g.n {
                sites.insert((x, y + i));
            }
        }
        GlyphKind::Diag => {
            for i in 0..g.n {
                sites.insert((x + i, y + i));
            }
        }
        GlyphKind::Tee => {
            for i in 0..g.n {
                sites.insert((x, y + i));
            }
            for j in -g.m..=g.m {
                sites.insert((x + j, y + g.n - 1));
            }
        }
    }
    sites
}

/// Largest Chebyshev step between a glyph's nearest sites; 1 for every
/// shipped glyph kind (all formulas step to an adjacent or diagonal site).
fn max_intra_spacing(sites: &BTreeSet<(i64, i64)>) -> i64 {
    if sites.len() < 2 {
        return 0;
    }
    let mut worst = 0;
    for &s in sites {
        let nearest = sites
            .iter()
            .filter(|&&t| t != s)
            .map(|&t| chebyshev(s, t))
            .min()
            .unwrap();
        worst = worst.max(nearest);
    }
    worst
}

fn chebyshev(a: (i64, i64), b: (i64, i64)) -> i64 {
    (a.0 - b.0).abs().max((a.1 - b.1).abs())
}

#[derive(Debug, Clone)]
pub struct PageState {
    pub glyphs: Vec<Glyph>,
    /// every occupied site carries its own copy of the same thermal mixture
    pub site_density: BTreeMap<(i64, i64), DiagonalDensity>,
}

impl PageState {
    pub fn occupied(&self) -> impl Iterator<Item = &(i64, i64)> {
        self.site_density.keys()
    }
}

/// Lays out glyphs with one molecule per occupied well. Glyph site sets must
/// be disjoint and the empty separation between any two glyphs must exceed
/// the maximum intra-glyph spacing, so that glyph membership stays readable
/// from site positions alone.
pub fn compose_page(
    glyphs: &[Glyph],
    spectrum: &LevelSpectrum,
    kt: f64,
) -> Result<PageState, InkError> {
    let density = thermal_state(spectrum, kt)?;
    let site_sets: Vec<BTreeSet<(i64, i64)>> = glyphs.iter().map(glyph_sites).collect();
    let max_intra = site_sets.iter().map(|s| max_intra_spacing(s)).max().unwrap_or(0);
    for i in 0..site_sets.len() {
        for j in (i + 1)..site_sets.len() {
            if site_sets[i].intersection(&site_sets[j]).next().is_some() {
                return Err(InkError::GlyphOverlap { first: i, second: j });
            }
            let gap = site_sets[i]
                .iter()
                .flat_map(|&a| site_sets[j].iter().map(move |&b| chebyshev(a, b)))
                .min()
                .unwrap_or(i64::MAX);
            // empty sites strictly between the sets
            let separation = gap - 1;
            if separation <= max_intra {
                return Err(InkError::TooClose {
                    first: i,
                    second: j,
                    separation,
                    required_over: max_intra,
                });
            }
        }
    }
    let mut site_density = BTreeMap::new();
    for set in site_sets {
        for site in set {
            site_density.insert(site, density.clone());
        }
    }
    Ok(PageState { glyphs: glyphs.to_vec(), site_density })
}

/// Single-molecule positional density: Hermitian coherence weights indexed
/// by ordered site pairs. Entry ((a, b), w) is the ⟨a|ρ|b⟩ weight.
#[derive(Debug, Clone, PartialEq)]
pub struct PositionalDensity {
    pub entries: BTreeMap<((i64, i64), (i64, i64)), f64>,
}

impl PositionalDensity {
    pub fn trace(&self) -> f64 {
        self.entries
            .iter()
            .filter(|((a, b), _)| a == b)
            .map(|(_, &w)| w)
            .sum()
    }
}

/// Zeroes every off-diagonal positional entry. Idempotent, trace-preserving.
pub fn decohere(rho: &PositionalDensity) -> Result<PositionalDensity, InkError> {
    let trace = rho.trace();
    if (trace - 1.0).abs() > 1e-10 {
        return Err(InkError::NonUnitTrace { trace });
    }
    for ((a, b), &w) in &rho.entries {
        let mirrored = rho.entries.get(&(*b, *a)).copied().unwrap_or(0.0);
        if (w - mirrored).abs() > 1e-12 {
            return Err(InkError::NotHermitian);
        }
    }
    Ok(PositionalDensity {
        entries: rho
            .entries
            .iter()
            .filter(|((a, b), _)| a == b)
            .map(|(&k, &w)| (k, w))
            .collect(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReadRule {
    PositionOnly,
    ContentDependent,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReadCost {
    pub rule: ReadRule,
    /// total cost: n units for position-only, Σ m^i alternatives otherwise
    pub total: u128,
    /// m^n, the dominant term of the content-dependent sum
    pub dominant: u128,
}

/// Cost of reading n symbols from an m-letter alphabet. A position-only
/// rule pays one unit per symbol; a content-dependent rule must distinguish
/// among m^i alternatives at each prefix length i.
pub fn read_cost(rule: ReadRule, n: u32, m: u32) -> ReadCost {
    match rule {
        ReadRule::PositionOnly => {
            ReadCost { rule, total: u128::from(n), dominant: u128::from(n) }
        }
        ReadRule::ContentDependent => {
            let mut total = 0u128;
            let mut power = 1u128;
            for _ in 0..n {
                power *= u128::from(m);
                total += power;
            }
            ReadCost { rule, total, dominant: if n == 0 { 0 } else { power } }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReadDisturbance {
    pub reads: u32,
    pub flip_prob: f64,
    /// per-molecule probability of never being displaced
    pub analytic_survival: f64,
    /// fraction of molecules still at their original site
    pub empirical_unchanged: f64,
    pub molecules: usize,
}

/// Reads the page R times; each read independently kicks every molecule to
/// a uniformly chosen 4-neighbor site with probability p. A kick into an
/// occupied site leaves the molecule in place. Seeded and reproducible.
pub fn repeated_read(
    page: &PageState,
    reads: u32,
    flip_prob: f64,
    seed: u64,
) -> Result<(PageState, ReadDisturbance), InkError> {
    if !(0.0..=1.0).contains(&flip_prob) || !flip_prob.is_finite() {
        return Err(InkError::BadFlipProbability { p: flip_prob });
    }
    let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(seed);
    let original: Vec<(i64, i64)> = page.site_density.keys().copied().collect();
    let mut positions = original.clone();
    let mut occupied: BTreeSet<(i64, i64)> = original.iter().copied().collect();

    let mut uniform = |bound: u64| -> u64 {
        // rejection sampling keeps the draw unbiased
        let zone = u64::MAX - u64::MAX % bound;
        loop {
            let v = rng.next_u64();
            if v < zone {
                return v % bound;
            }
        }
    };
    const KICK_SCALE: u64 = 1 << 32;
    for _ in 0..reads {
        for idx in 0..positions.len() {
            let kicked = (uniform(KICK_SCALE) as f64) < flip_prob * KICK_SCALE as f64;
            if !kicked {
                continue;
            }
            let (x, y) = positions[idx];
            let target = match uniform(4) {
                0 => (x + 1, y),
                1 => (x - 1, y),
                2 => (x, y + 1),
                _ => (x, y - 1),
            };
            if occupied.contains(&target) {
                continue; // collision: stays put
            }
            occupied.remove(&(x, y));
            occupied.insert(target);
            positions[idx] = target;
        }
    }

    let unchanged = positions
        .iter()
        .zip(&original)
        .filter(|(now, was)| now == was)
        .count();
    let mut site_density = BTreeMap::new();
    let densities: Vec<DiagonalDensity> = page.site_density.values().cloned().collect();
    for (pos, density) in positions.iter().zip(densities) {
        site_density.insert(*pos, density);
    }
    let report = ReadDisturbance {
        reads,
        flip_prob,
        analytic_survival: libm::pow(1.0 - flip_prob, f64::from(reads)),
        empirical_unchanged: if original.is_empty() {
            1.0
        } else {
            unchanged as f64 / original.len() as f64
        },
        molecules: original.len(),
    };
    Ok((PageState { glyphs: page.glyphs.clone(), site_density }, report))
}

/// CSV-friendly page dump rows: (x, y, occupied, ground probability).
pub fn page_rows(page: &PageState) -> Vec<(i64, i64, bool, f64)> {
    page.site_density
        .iter()
        .map(|(&(x, y), d)| (x, y, true, d.ground_probability()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn thermal_state_examples() {
        let levels = LevelSpectrum::new(vec![0.0, core::f64::consts::LN_2]).unwrap();
        let rho = thermal_state(&levels, 1.0).unwrap();
        assert!((rho.probabilities()[0] - 2.0 / 3.0).abs() < 1e-12);
        assert!((rho.probabilities()[1] - 1.0 / 3.0).abs() < 1e-12);

        let single = LevelSpectrum::new(vec![0.7]).unwrap();
        assert_eq!(thermal_state(&single, 2.0).unwrap().probabilities(), &[1.0]);

        let wide = LevelSpectrum::new(vec![0.0, 30.0]).unwrap();
        let rho = thermal_state(&wide, 1.0).unwrap();
        assert!(rho.ground_probability() > 1.0 - 1e-12);

        assert!(thermal_state(&levels, 0.0).is_err());
        assert!(thermal_state(&levels, -1.0).is_err());
    }

    #[test]
    fn boltzmann_ratio_invariant() {
        let levels = LevelSpectrum::new(vec![0.0, 0.3, 1.1, 2.4]).unwrap();
        let kt = 0.85;
        let rho = thermal_state(&levels, kt).unwrap();
        let p = rho.probabilities();
        let e = levels.energies();
        for i in 0..p.len() {
            for j in 0..p.len() {
                let expected = libm::exp(-(e[i] - e[j]) / kt);
                assert!((p[i] / p[j] - expected).abs() < 1e-12);
            }
        }
        assert!((p.iter().sum::<f64>() - 1.0).abs() < TRACE_TOL);
    }

    #[test]
    fn spectrum_validation() {
        assert!(matches!(LevelSpectrum::new(vec![]), Err(InkError::EmptySpectrum)));
        assert!(matches!(
            LevelSpectrum::new(vec![0.0, 0.0]),
            Err(InkError::NonAscendingSpectrum { index: 1 })
        ));
        assert!(matches!(
            LevelSpectrum::new(vec![-0.1, 0.4]),
            Err(InkError::NegativeEnergy { index: 0 })
        ));
    }

    #[test]
    fn glyph_site_formulas() {
        let vbar = Glyph::vbar((2, 3), 4).unwrap();
        let expected: BTreeSet<_> = [(2, 3), (2, 4), (2, 5), (2, 6)].into_iter().collect();
        assert_eq!(glyph_sites(&vbar), expected);

        let diag = Glyph::diag((0, 0), 3).unwrap();
        let expected: BTreeSet<_> = [(0, 0), (1, 1), (2, 2)].into_iter().collect();
        assert_eq!(glyph_sites(&diag), expected);

        let tee = Glyph::tee((0, 0), 2, 1).unwrap();
        let expected: BTreeSet<_> = [(0, 0), (0, 1), (-1, 1), (1, 1)].into_iter().collect();
        assert_eq!(glyph_sites(&tee), expected);

        assert!(Glyph::vbar((0, 0), 0).is_err());
        assert!(Glyph::tee((0, 0), 1, -1).is_err());
    }

    #[test]
    fn tee_scaling_doubles_offsets() {
        // the arm rides at stem offset n-1, so doubling every site offset
        // from the fiducial lands inside tee(2n-1, 2m)
        let (x, y) = (5, -2);
        let small = glyph_sites(&Glyph::tee((x, y), 3, 2).unwrap());
        let big = glyph_sites(&Glyph::tee((x, y), 5, 4).unwrap());
        for &(sx, sy) in &small {
            let doubled = (x + 2 * (sx - x), y + 2 * (sy - y));
            assert!(big.contains(&doubled), "missing {doubled:?}");
        }
    }

    #[test]
    fn page_composition() {
        let levels = LevelSpectrum::new(vec![0.0, 1.0]).unwrap();
        let a = Glyph::vbar((0, 0), 3).unwrap();
        let b = Glyph::vbar((4, 0), 3).unwrap(); // 3 empty columns between
        let page = compose_page(&[a, b], &levels, 1.0).unwrap();
        assert_eq!(page.site_density.len(), 6);

        let blank = compose_page(&[], &levels, 1.0).unwrap();
        assert_eq!(blank.site_density.len(), 0);

        let clash = Glyph::diag((0, 0), 3).unwrap();
        assert!(matches!(
            compose_page(&[a, clash], &levels, 1.0),
            Err(InkError::GlyphOverlap { first: 0, second: 1 })
        ));

        let near = Glyph::vbar((2, 0), 3).unwrap(); // 1 empty column = max intra spacing
        assert!(matches!(
            compose_page(&[a, near], &levels, 1.0),
            Err(InkError::TooClose { first: 0, second: 1, separation: 1, required_over: 1 })
        ));
    }

    #[test]
    fn product_independence_on_page() {
        let levels = LevelSpectrum::new(vec![0.0, core::f64::consts::LN_2]).unwrap();
        let page =
            compose_page(&[Glyph::vbar((0, 0), 2).unwrap()], &levels, 1.0).unwrap();
        let p: Vec<f64> = page
            .site_density
            .values()
            .map(DiagonalDensity::ground_probability)
            .collect();
        // joint probability of both sites in the ground level factorizes
        let joint = p[0] * p[1];
        assert!((joint - (2.0 / 3.0) * (2.0 / 3.0)).abs() < 1e-12);
    }

    #[test]
    fn decohere_behaviour() {
        let mut entries = BTreeMap::new();
        let a = (0, 0);
        let b = (1, 0);
        entries.insert((a, a), 0.5);
        entries.insert((b, b), 0.5);
        entries.insert((a, b), 0.5);
        entries.insert((b, a), 0.5);
        let rho = PositionalDensity { entries };
        let mixed = decohere(&rho).unwrap();
        assert_eq!(mixed.entries.len(), 2);
        assert!((mixed.trace() - 1.0).abs() < 1e-12);
        // idempotent fixed point
        assert_eq!(decohere(&mixed).unwrap(), mixed);

        let mut short = rho.clone();
        short.entries.insert((a, a), 0.4);
        assert!(matches!(decohere(&short), Err(InkError::NonUnitTrace { .. })));

        let mut skew = rho.clone();
        skew.entries.insert((a, b), 0.2);
        assert!(matches!(decohere(&skew), Err(InkError::NotHermitian)));
    }

    #[test]
    fn read_cost_examples() {
        let c = read_cost(ReadRule::ContentDependent, 3, 13);
        assert_eq!(c.dominant, 2197);
        assert_eq!(c.total, 13 + 169 + 2197);

        let p = read_cost(ReadRule::PositionOnly, 100, 13);
        assert_eq!(p.total, 100);

        assert_eq!(read_cost(ReadRule::PositionOnly, 0, 13).total, 0);
        assert_eq!(read_cost(ReadRule::ContentDependent, 0, 13).total, 0);
    }

    fn big_page() -> PageState {
        // widely spaced single-site glyphs so collisions are rare
        let levels = LevelSpectrum::new(vec![0.0]).unwrap();
        let glyphs: Vec<Glyph> = (0..100)
            .flat_map(|i| (0..100).map(move |j| Glyph::vbar((10 * i, 10 * j), 1).unwrap()))
            .collect();
        compose_page(&glyphs, &levels, 1.0).unwrap()
    }

    #[test]
    fn repeated_read_behaviour() {
        let page = big_page();
        let (same, report) = repeated_read(&page, 5, 0.0, 1).unwrap();
        assert_eq!(same.site_density.len(), page.site_density.len());
        assert_eq!(report.empirical_unchanged, 1.0);
        assert_eq!(report.analytic_survival, 1.0);

        let (_, always) = repeated_read(&page, 1, 1.0, 2).unwrap();
        // every unobstructed molecule moves; the page is sparse enough that
        // nearly all moves land on empty sites
        assert!(always.empirical_unchanged < 0.01);

        let (_, report) = repeated_read(&page, 10, 0.01, 3).unwrap();
        let expect = libm::pow(0.99, 10.0);
        assert!((report.analytic_survival - expect).abs() < 1e-12);
        let se = libm::sqrt(expect * (1.0 - expect) / report.molecules as f64);
        assert!(
            (report.empirical_unchanged - expect).abs() < 3.0 * se,
            "empirical {} vs analytic {expect}",
            report.empirical_unchanged
        );

        assert!(repeated_read(&page, 1, 1.5, 0).is_err());

        // reproducibility for a fixed seed
        let (p1, r1) = repeated_read(&page, 3, 0.2, 42).unwrap();
        let (p2, r2) = repeated_read(&page, 3, 0.2, 42).unwrap();
        assert_eq!(r1, r2);
        let k1: Vec<_> = p1.site_density.keys().collect();
        let k2: Vec<_> = p2.site_density.keys().collect();
        assert_eq!(k1, k2);
    }
}
