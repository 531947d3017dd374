//! Stability-time estimation and efficiency classification.
//!
//! τ(n, s, m) is the earliest step after which the probability trace for a
//! length-n string varies by less than 2^−m; τ(n, m) takes the maximum over
//! strings. The true definition is a limit; at finite horizon the estimator
//! reports `Censored` when no stable window exists, and table construction
//! doubles the horizon up to a cap.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::dynamics::Trace;

#[derive(Debug, Clone, PartialEq)]
pub enum StabilityError {
    ShortTrace { len: usize },
    BadTolerance { m: u32 },
    DistributionNotNormalized { total: f64 },
    TargetOutsideInterval { expected_len: usize, got_len: usize },
}

impl fmt::Display for StabilityError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::ShortTrace { len } => write!(f, "trace too short ({len} points, need 2)"),
            Self::BadTolerance { m } => write!(f, "tolerance exponent m={m} must be >= 1"),
            Self::DistributionNotNormalized { total } => {
                write!(f, "limit distribution sums to {total}, not 1")
            }
            Self::TargetOutsideInterval { expected_len, got_len } => write!(
                f,
                "target assignment has {got_len} symbols, interval has {expected_len} sites"
            ),
        }
    }
}

impl core::error::Error for StabilityError {}

/// Estimated stability time, or censored at the horizon when no stable
/// window of at least two points exists.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum TauValue {
    Finite(u64),
    Censored(u64),
}

impl TauValue {
    pub fn finite(self) -> Option<u64> {
        match self {
            Self::Finite(v) => Some(v),
            Self::Censored(_) => None,
        }
    }

    pub fn is_censored(self) -> bool {
        matches!(self, Self::Censored(_))
    }
}

/// τ estimate for one (n, m) cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TauEstimate {
    pub n: u32,
    pub m: u32,
    pub value: TauValue,
    /// horizon of the trace the estimate came from
    pub horizon: u64,
}

/// Smallest τ such that all trace points strictly after τ stay within 2^−m
/// of each other; the window must contain at least two points, otherwise the
/// estimate is censored at the horizon.
pub fn estimate_tau(trace: &Trace, m: u32) -> Result<TauValue, StabilityError> {
    if m < 1 {
        return Err(StabilityError::BadTolerance { m });
    }
    let p = trace.probs();
    if p.len() < 2 {
        return Err(StabilityError::ShortTrace { len: p.len() });
    }
    let horizon = (p.len() - 1) as u64;
    let tol = libm::exp2(-(f64::from(m)));
    // suffix extrema: window (tau, T] is stable iff max - min < tol
    let mut hi = f64::NEG_INFINITY;
    let mut lo = f64::INFINITY;
    let mut best: Option<u64> = None;
    // scan tau from T-2 down to 0; window must hold at least two points
    for t in (1..p.len()).rev() {
        hi = hi.max(p[t]);
        lo = lo.min(p[t]);
        let tau = (t - 1) as u64;
        if hi - lo < tol && p.len() - t >= 2 {
            best = Some(tau);
        }
    }
    // tau = 0 window is (0, T], starting at index 1, handled above;
    // also consider including index 0? no: the window (tau, T] excludes tau.
    Ok(match best {
        Some(tau) => TauValue::Finite(tau),
        None => TauValue::Censored(horizon),
    })
}

/// τ(n, m) table with per-cell provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct TauTable {
    pub dynamics: String,
    pub entries: BTreeMap<(u32, u32), TauEstimate>,
    pub all_censored: bool,
}

/// Supplies the traces a table is estimated from: for each length n there
/// are `string_count(n)` strings, and `trace(n, s, horizon)` evaluates the
/// projector probability series for string index s.
pub trait TraceSource {
    fn string_count(&self, n: u32) -> usize;
    fn trace(&self, n: u32, s: usize, horizon: usize) -> Trace;
}

/// Horizon schedule: start at `initial`, double while censored, stop at `cap`.
#[derive(Debug, Clone, Copy)]
pub struct HorizonPolicy {
    pub initial: usize,
    pub cap: usize,
}

impl Default for HorizonPolicy {
    fn default() -> Self {
        Self { initial: 32, cap: 4096 }
    }
}

/// Builds τ(n, m) = max over strings s of τ(n, s, m). A censored estimate
/// dominates any finite value; censored cells retry with doubled horizons
/// up to the cap.
pub fn tau_table(
    source: &dyn TraceSource,
    dynamics: &str,
    n_list: &[u32],
    m_list: &[u32],
    policy: HorizonPolicy,
) -> Result<TauTable, StabilityError> {
    let mut entries = BTreeMap::new();
    for &n in n_list {
        for &m in m_list {
            let mut horizon = policy.initial;
            let estimate = loop {
                let mut worst: Option<TauValue> = None;
                for s in 0..source.string_count(n) {
                    let trace = source.trace(n, s, horizon);
                    let v = estimate_tau(&trace, m)?;
                    worst = Some(match worst {
                        None => v,
                        // Censored dominates; otherwise take the max
                        Some(w) => {
                            if w.is_censored() || v.is_censored() {
                                if w.is_censored() { w } else { v }
                            } else {
                                w.max(v)
                            }
                        }
                    });
                }
                let v = worst.unwrap_or(TauValue::Censored(horizon as u64));
                if !v.is_censored() || horizon >= policy.cap {
                    break TauEstimate { n, m, value: v, horizon: horizon as u64 };
                }
                horizon = (horizon * 2).min(policy.cap);
            };
            entries.insert((n, m), estimate);
        }
    }
    let all_censored = entries.values().all(|e| e.value.is_censored());
    Ok(TauTable { dynamics: String::from(dynamics), entries, all_censored })
}

/// A pair of cells violating τ(n, m) ≤ τ(n′, m′) for n < n′ or m < m′.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MonotonicityViolation {
    pub smaller: (u32, u32),
    pub larger: (u32, u32),
    pub tau_smaller: u64,
    pub tau_larger: u64,
}

/// Checks τ(n, m) ≤ τ(n′, m′) whenever n ≤ n′ and m ≤ m′ (strict somewhere)
/// over all pairs of defined (non-censored) entries.
pub fn check_monotonicity(table: &TauTable) -> Vec<MonotonicityViolation> {
    let defined: Vec<((u32, u32), u64)> = table
        .entries
        .iter()
        .filter_map(|(&key, e)| e.value.finite().map(|v| (key, v)))
        .collect();
    let mut violations = Vec::new();
    for &((n1, m1), t1) in &defined {
        for &((n2, m2), t2) in &defined {
            let dominated = n1 <= n2 && m1 <= m2 && (n1, m1) != (n2, m2);
            if dominated && t1 > t2 {
                violations.push(MonotonicityViolation {
                    smaller: (n1, m1),
                    larger: (n2, m2),
                    tau_smaller: t1,
                    tau_larger: t2,
                });
            }
        }
    }
    violations
}

/// Scaling classification of τ(n, m) in n for a fixed m.
#[derive(Debug, Clone, PartialEq)]
pub enum EfficiencyClass {
    Polynomial { k: f64, ell: f64 },
    Exponential { c: f64, mu: f64 },
    Indeterminate,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EfficiencyVerdict {
    pub class: EfficiencyClass,
    pub rss_polynomial: f64,
    pub rss_exponential: f64,
    pub points: usize,
    /// free-μ exponential fit, diagnostics only
    pub mu_free: f64,
}

/// Required residual margin between the two model fits.
pub const CLASSIFIER_MARGIN: f64 = 2.0;

/// Model selection between τ = K·n^ℓ and τ = C·2^(n^μ) with μ fixed at 1.
///
/// Both models are fitted by least squares on y = log(1+τ) (the shift keeps
/// τ = 0 cells usable), the polynomial against log n and the exponential
/// with slope pinned to ln 2. The class with the smaller residual sum wins
/// if it leads by [`CLASSIFIER_MARGIN`]; otherwise `Indeterminate`.
pub fn classify_efficiency(table: &TauTable, m: u32) -> EfficiencyVerdict {
    let pts: Vec<(f64, f64)> = table
        .entries
        .iter()
        .filter(|((_, mm), _)| *mm == m)
        .filter_map(|((n, _), e)| e.value.finite().map(|v| (f64::from(*n), libm::log1p(v as f64))))
        .collect();
    let points = pts.len();
    if points < 4 {
        return EfficiencyVerdict {
            class: EfficiencyClass::Indeterminate,
            rss_polynomial: f64::NAN,
            rss_exponential: f64::NAN,
            points,
            mu_free: f64::NAN,
        };
    }
    // polynomial: y = ln K + ell * ln n
    let xs: Vec<f64> = pts.iter().map(|(n, _)| libm::log(*n)).collect();
    let ys: Vec<f64> = pts.iter().map(|(_, y)| *y).collect();
    let (lnk, ell, rss_polynomial) = linear_fit(&xs, &ys);
    // exponential with mu = 1: y = ln C + n * ln 2
    let ln2 = core::f64::consts::LN_2;
    let lnc = mean(pts.iter().map(|(n, y)| y - n * ln2));
    let rss_exponential: f64 = pts.iter().map(|(n, y)| sq(y - (lnc + n * ln2))).sum();
    // diagnostics: grid search over free mu
    let mut mu_free = 1.0;
    let mut best = f64::INFINITY;
    let mut mu = 0.10;
    while mu <= 3.0 {
        let lnc_mu = mean(pts.iter().map(|(n, y)| y - libm::pow(*n, mu) * ln2));
        let rss: f64 = pts.iter().map(|(n, y)| sq(y - (lnc_mu + libm::pow(*n, mu) * ln2))).sum();
        if rss < best {
            best = rss;
            mu_free = mu;
        }
        mu += 0.01;
    }

    let class = if rss_exponential >= CLASSIFIER_MARGIN * rss_polynomial {
        EfficiencyClass::Polynomial { k: libm::exp(lnk), ell }
    } else if rss_polynomial >= CLASSIFIER_MARGIN * rss_exponential {
        EfficiencyClass::Exponential { c: libm::exp(lnc), mu: 1.0 }
    } else {
        EfficiencyClass::Indeterminate
    };
    EfficiencyVerdict { class, rss_polynomial, rss_exponential, points, mu_free }
}

fn mean(it: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0;
    let mut count = 0usize;
    for v in it {
        sum += v;
        count += 1;
    }
    sum / count as f64
}

fn sq(v: f64) -> f64 {
    v * v
}

fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| sq(x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| sq(y - (intercept + slope * x)))
        .sum();
    (intercept, slope, rss)
}

/// Dispersion of a limit distribution over interval assignments about the
/// target X: ε = 1 − p(X).
pub fn dispersion(
    distribution: &BTreeMap<String, f64>,
    target: &str,
) -> Result<f64, StabilityError> {
    let total: f64 = distribution.values().sum();
    if (total - 1.0).abs() > 1e-10 {
        return Err(StabilityError::DistributionNotNormalized { total });
    }
    let expected_len = distribution
        .keys()
        .next()
        .map(|k| k.chars().count())
        .unwrap_or(0);
    let got_len = target.chars().count();
    if got_len != expected_len {
        return Err(StabilityError::TargetOutsideInterval { expected_len, got_len });
    }
    Ok(1.0 - distribution.get(target).copied().unwrap_or(0.0))
}
