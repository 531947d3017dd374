//! Batch experiment runner around lexphys-core.
//!
//! A run is described by a JSON config file. Every experiment is validated
//! before any computation starts, computed fully in memory, and only then
//! written out, so a failed run never leaves partial artifacts behind.
//! Identical config + seed yields byte-identical data files.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use rand_core::RngCore;
use serde::{Deserialize, Serialize};
use serde_json::json;

use lexphys_core::alphabet::Alphabet;
use lexphys_core::dynamics::{build_writer, probability_trace, Trace};
use lexphys_core::expressions::{self, Expression, WordSpan};
use lexphys_core::godel;
use lexphys_core::hilbert::{BasisLabel, IntervalProjector, StateVector};
use lexphys_core::ink::{
    compose_page, page_rows, read_cost, repeated_read, Glyph, LevelSpectrum, ReadRule,
};
use lexphys_core::stability::{
    check_monotonicity, classify_efficiency, tau_table, EfficiencyClass, HorizonPolicy, TauTable,
    TauValue, TraceSource,
};
use lexphys_core::theory::{
    enumerate_theorems, generate_complexity_pair, render_proof, shortest_inconsistency_proof,
    EnumeratedItem, Language, Mode, Theory,
};

/// Top-level run description, loaded from a JSON file.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub experiment: Experiment,
    /// base seed for every random choice in the run; CLI --seed overrides
    #[serde(default)]
    pub seed: Option<u64>,
    /// artifact directory; CLI --out overrides
    #[serde(default)]
    pub out_dir: Option<PathBuf>,
}

fn default_half_width() -> i64 {
    12
}

fn default_horizon_cap() -> usize {
    4096
}

fn default_bound() -> usize {
    6
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Experiment {
    /// τ(n, m) table for the deterministic writer family.
    WriterTau {
        n_list: Vec<u32>,
        m_list: Vec<u32>,
        #[serde(default = "default_half_width")]
        half_width: i64,
        #[serde(default = "default_horizon_cap")]
        horizon_cap: usize,
    },
    /// Writer table plus the polynomial/exponential model selection.
    EfficiencyScan {
        n_list: Vec<u32>,
        m_list: Vec<u32>,
        /// precision row the classifier reads the table at
        classify_m: u32,
        #[serde(default = "default_half_width")]
        half_width: i64,
        #[serde(default = "default_horizon_cap")]
        horizon_cap: usize,
    },
    /// Proof-string enumeration from the given axioms.
    TheoremEnum {
        axioms: Vec<String>,
        budget: usize,
        #[serde(default = "default_bound")]
        inconsistency_bound: usize,
    },
    /// Seeded search for a satisfiable/unsatisfiable theory pair of nearly
    /// equal description complexity.
    ComplexityPair {},
    /// Encode/decode identity check on random expressions.
    GodelRoundtrip {
        count: usize,
        max_support: usize,
        #[serde(default = "default_half_width")]
        half_width: i64,
    },
    /// Thermal page layout plus a repeated-read disturbance run.
    InkDemo {
        energies: Vec<f64>,
        kt: f64,
        glyphs: Vec<GlyphConfig>,
        reads: u32,
        flip_prob: f64,
    },
}

impl Experiment {
    pub fn kind(&self) -> &'static str {
        match self {
            Experiment::WriterTau { .. } => "writer_tau",
            Experiment::EfficiencyScan { .. } => "efficiency_scan",
            Experiment::TheoremEnum { .. } => "theorem_enum",
            Experiment::ComplexityPair {} => "complexity_pair",
            Experiment::GodelRoundtrip { .. } => "godel_roundtrip",
            Experiment::InkDemo { .. } => "ink_demo",
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GlyphConfig {
    /// one of vbar, diag, tee
    pub shape: String,
    pub fiducial: (i64, i64),
    pub n: i64,
    #[serde(default)]
    pub m: i64,
}

impl GlyphConfig {
    fn build(&self) -> Result<Glyph> {
        let g = match self.shape.as_str() {
            "vbar" => Glyph::vbar(self.fiducial, self.n),
            "diag" => Glyph::diag(self.fiducial, self.n),
            "tee" => Glyph::tee(self.fiducial, self.n, self.m),
            other => bail!("unknown glyph shape {other:?} (expected vbar, diag or tee)"),
        };
        g.map_err(|e| anyhow::anyhow!("glyph {:?} at {:?}: {e}", self.shape, self.fiducial))
    }
}

/// Outcome of a run: the config echo plus where everything was written.
#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub kind: String,
    pub seed: u64,
    pub out_dir: PathBuf,
    pub artifacts: Vec<String>,
    pub summary: serde_json::Value,
}

pub fn load_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read config {}", path.display()))?;
    let cfg: RunConfig = serde_json::from_str(&text)
        .with_context(|| format!("invalid config {}", path.display()))?;
    Ok(cfg)
}

/// Checks every parameter the experiment will touch. Runs before any
/// computation; a config that passes here should not fail later for
/// config-shaped reasons.
pub fn validate_config(cfg: &RunConfig) -> Result<()> {
    match &cfg.experiment {
        Experiment::WriterTau { n_list, m_list, half_width, horizon_cap }
        | Experiment::EfficiencyScan { n_list, m_list, half_width, horizon_cap, .. } => {
            if n_list.is_empty() {
                bail!("n_list must be nonempty");
            }
            if m_list.is_empty() {
                bail!("m_list must be nonempty");
            }
            if n_list.iter().any(|&n| n == 0) {
                bail!("string lengths must be positive");
            }
            let max_n = i64::from(*n_list.iter().max().unwrap());
            // the writer head must be able to leave the last target site
            if max_n + 1 > *half_width {
                bail!("half_width {half_width} too small for n up to {max_n} (need n + 1 <= half_width)");
            }
            if *horizon_cap < 2 {
                bail!("horizon_cap must be at least 2");
            }
            if let Experiment::EfficiencyScan { classify_m, m_list, .. } = &cfg.experiment {
                if !m_list.contains(classify_m) {
                    bail!("classify_m {classify_m} is not in m_list");
                }
            }
        }
        Experiment::TheoremEnum { axioms, budget, inconsistency_bound } => {
            for line in axioms {
                lexphys_core::theory::Formula::parse(line)
                    .map_err(|e| anyhow::anyhow!("axiom {line:?}: {e}"))?;
            }
            if *budget == 0 {
                bail!("budget must be positive");
            }
            if *inconsistency_bound < 2 {
                bail!("inconsistency_bound must be at least 2");
            }
        }
        Experiment::ComplexityPair {} => {}
        Experiment::GodelRoundtrip { count, max_support, half_width } => {
            if *count == 0 {
                bail!("count must be positive");
            }
            if *half_width < 1 {
                bail!("half_width must be positive");
            }
            if *max_support > (2 * *half_width + 1) as usize {
                bail!("max_support {max_support} exceeds the {} lattice sites", 2 * half_width + 1);
            }
        }
        Experiment::InkDemo { energies, kt, glyphs, flip_prob, .. } => {
            LevelSpectrum::new(energies.clone())
                .map_err(|e| anyhow::anyhow!("energies: {e}"))?;
            if !(*kt > 0.0) || !kt.is_finite() {
                bail!("kt must be positive and finite");
            }
            if glyphs.is_empty() {
                bail!("at least one glyph required");
            }
            for g in glyphs {
                g.build()?;
            }
            if !(0.0..=1.0).contains(flip_prob) {
                bail!("flip_prob must lie in [0, 1]");
            }
        }
    }
    Ok(())
}

/// Runs the experiment and writes its artifacts under `out_dir`.
pub fn run_experiment(
    cfg: &RunConfig,
    seed_override: Option<u64>,
    out_override: Option<&Path>,
) -> Result<RunReport> {
    validate_config(cfg)?;
    let seed = seed_override.or(cfg.seed).unwrap_or(0);
    let out_dir: PathBuf = match (out_override, &cfg.out_dir) {
        (Some(p), _) => p.to_path_buf(),
        (None, Some(p)) => p.clone(),
        (None, None) => bail!("no output directory: set out_dir in the config or pass --out"),
    };

    // compute everything first, write nothing until it all succeeded
    let (summary, artifacts) = compute(&cfg.experiment, seed)?;

    std::fs::create_dir_all(&out_dir)
        .with_context(|| format!("cannot create {}", out_dir.display()))?;
    let mut names: Vec<String> = Vec::new();
    for (name, contents) in &artifacts {
        std::fs::write(out_dir.join(name), contents)
            .with_context(|| format!("cannot write {name}"))?;
        names.push(name.clone());
    }

    let report = RunReport {
        kind: cfg.experiment.kind().to_string(),
        seed,
        out_dir: out_dir.clone(),
        artifacts: names,
        summary,
    };
    let report_doc = json!({
        "config": cfg,
        "seed": seed,
        "artifacts": report.artifacts,
        "summary": report.summary,
    });
    let mut text = serde_json::to_string_pretty(&report_doc)?;
    text.push('\n');
    std::fs::write(out_dir.join("report.json"), text).context("cannot write report.json")?;
    Ok(report)
}

type Artifacts = Vec<(String, String)>;

fn compute(exp: &Experiment, seed: u64) -> Result<(serde_json::Value, Artifacts)> {
    match exp {
        Experiment::WriterTau { n_list, m_list, half_width, horizon_cap } => {
            run_writer_tau(n_list, m_list, *half_width, *horizon_cap, None)
        }
        Experiment::EfficiencyScan { n_list, m_list, classify_m, half_width, horizon_cap } => {
            run_writer_tau(n_list, m_list, *half_width, *horizon_cap, Some(*classify_m))
        }
        Experiment::TheoremEnum { axioms, budget, inconsistency_bound } => {
            run_theorem_enum(axioms, *budget, *inconsistency_bound)
        }
        Experiment::ComplexityPair {} => run_complexity_pair(seed),
        Experiment::GodelRoundtrip { count, max_support, half_width } => {
            run_godel_roundtrip(*count, *max_support, *half_width, seed)
        }
        Experiment::InkDemo { energies, kt, glyphs, reads, flip_prob } => {
            run_ink_demo(energies, *kt, glyphs, *reads, *flip_prob, seed)
        }
    }
}

/// Trace source for the writer family: for each length n it sweeps a couple
/// of distinct length-n words onto a blank tape and watches the projector on
/// the target word.
pub struct WriterSource {
    half_width: i64,
}

impl WriterSource {
    pub fn new(half_width: i64) -> Self {
        Self { half_width }
    }

    pub fn target_text(n: u32, s: usize) -> String {
        let alphabet = Alphabet::standard();
        let pool: Vec<char> =
            alphabet.symbols().iter().copied().filter(|&c| c != alphabet.spacer()).collect();
        (0..n as usize).map(|i| pool[(i + s) % pool.len()]).collect()
    }
}

impl TraceSource for WriterSource {
    fn string_count(&self, _n: u32) -> usize {
        2
    }

    fn trace(&self, n: u32, s: usize, horizon: usize) -> Trace {
        let text = Self::target_text(n, s);
        writer_trace(&text, self.half_width, horizon)
            .expect("validated writer parameters cannot fail")
    }
}

/// Probability trace of the target-word projector under the writer that
/// prints `text` on sites 0..n, starting from the all-spacer state.
pub fn writer_trace(text: &str, half_width: i64, horizon: usize) -> Result<Trace> {
    let alphabet = Alphabet::standard();
    let base = lexphys_core::hilbert::Space::new(half_width, 1, alphabet);
    let hi = text.chars().count() as i64 - 1;
    let word = WordSpan { text: text.to_string(), interval: (0, hi) };
    let op = build_writer(std::slice::from_ref(&word), &base)?;
    let projector = IntervalProjector::new((0, hi), text, op.space())?;
    let psi0 = StateVector::basis(op.space(), BasisLabel::blank(0))?;
    Ok(probability_trace(&psi0, &op, &projector, horizon)?)
}

fn tau_csv(table: &TauTable) -> String {
    let mut out = String::from("n,m,tau,censored,horizon\n");
    for ((n, m), est) in &table.entries {
        let (tau, censored) = match est.value {
            TauValue::Finite(v) => (v, false),
            TauValue::Censored(h) => (h, true),
        };
        out.push_str(&format!("{n},{m},{tau},{censored},{}\n", est.horizon));
    }
    out
}

fn run_writer_tau(
    n_list: &[u32],
    m_list: &[u32],
    half_width: i64,
    horizon_cap: usize,
    classify_m: Option<u32>,
) -> Result<(serde_json::Value, Artifacts)> {
    let source = WriterSource::new(half_width);
    let policy = HorizonPolicy { initial: 32, cap: horizon_cap };
    let table = tau_table(&source, "writer", n_list, m_list, policy)?;
    let violations = check_monotonicity(&table);

    let mut artifacts: Artifacts = vec![("tau_table.csv".into(), tau_csv(&table))];

    // raw traces for the first sample word at each length, plot-ready
    let mut trace_csv = String::from("n,t,p\n");
    let max_n = i64::from(*n_list.iter().max().unwrap());
    for &n in n_list {
        let trace = source.trace(n, 0, (max_n + 4) as usize);
        for (t, p) in trace.probs().iter().enumerate() {
            trace_csv.push_str(&format!("{n},{t},{p}\n"));
        }
    }
    artifacts.push(("traces.csv".into(), trace_csv));

    let mut summary = json!({
        "dynamics": table.dynamics,
        "cells": table.entries.len(),
        "all_censored": table.all_censored,
        "monotonicity_violations": violations.len(),
    });
    if let Some(m) = classify_m {
        let verdict = classify_efficiency(&table, m);
        let class = match verdict.class {
            EfficiencyClass::Polynomial { k, ell } => {
                json!({"model": "polynomial", "k": k, "ell": ell})
            }
            EfficiencyClass::Exponential { c, mu } => {
                json!({"model": "exponential", "c": c, "mu": mu})
            }
            EfficiencyClass::Indeterminate => json!({"model": "indeterminate"}),
        };
        summary["classifier"] = json!({
            "m": m,
            "class": class,
            "rss_polynomial": verdict.rss_polynomial,
            "rss_exponential": verdict.rss_exponential,
            "points": verdict.points,
            "mu_free": verdict.mu_free,
        });
    }
    Ok((summary, artifacts))
}

fn run_theorem_enum(
    axioms: &[String],
    budget: usize,
    inconsistency_bound: usize,
) -> Result<(serde_json::Value, Artifacts)> {
    let lines: Vec<&str> = axioms.iter().map(String::as_str).collect();
    let theory = Theory::from_texts(&lines).map_err(|e| anyhow::anyhow!("axioms: {e}"))?;
    let lang = Language::standard();
    let enumeration = enumerate_theorems(&theory, &lang, budget);
    let shortest = shortest_inconsistency_proof(&theory, inconsistency_bound)
        .map_err(|e| anyhow::anyhow!("inconsistency search: {e}"))?;

    let mut items_csv = String::from("index,item,content\n");
    let mut proofs = 0usize;
    for (i, item) in enumeration.items.iter().enumerate() {
        match item {
            EnumeratedItem::Proof(p) => {
                proofs += 1;
                let content = render_proof(p).replace('\n', " ; ");
                items_csv.push_str(&format!("{i},proof,\"{content}\"\n"));
            }
            EnumeratedItem::PlainFormula(f) => {
                items_csv.push_str(&format!("{i},formula,\"{}\"\n", f.render()));
            }
        }
    }

    let summary = json!({
        "axioms": axioms,
        "items": enumeration.items.len(),
        "proofs": proofs,
        "final_mode": match enumeration.final_mode {
            Mode::Consistent => "consistent",
            Mode::InconsistentMode => "inconsistent",
        },
        "flipped_at": enumeration.flipped_at,
        "shortest_inconsistency_proof": shortest,
        "inconsistency_bound": inconsistency_bound,
    });
    Ok((summary, vec![("items.csv".into(), items_csv)]))
}

fn run_complexity_pair(seed: u64) -> Result<(serde_json::Value, Artifacts)> {
    let lang = Language::standard();
    let pair = generate_complexity_pair(seed, &lang)
        .map_err(|e| anyhow::anyhow!("pair search: {e}"))?;
    let render = |t: &Theory| -> Vec<String> { t.axioms.iter().map(|f| f.render()).collect() };
    let summary = json!({
        "t1_axioms": render(&pair.t1),
        "t2_axioms": render(&pair.t2),
        "bits1": pair.bits1,
        "bits2": pair.bits2,
        "bits_apart": pair.bits1.abs_diff(pair.bits2),
        "t1_satisfiable": pair.t1_satisfiable,
        "t2_satisfiable": pair.t2_satisfiable,
        "shortest_inconsistency_t2": pair.shortest_inconsistency_t2,
    });
    Ok((summary, Vec::new()))
}

/// Deterministic sample of a finite-support expression: up to `max_support`
/// non-spacer symbols on sites in [-half_width, half_width].
pub fn random_expression(
    rng: &mut impl RngCore,
    max_support: usize,
    half_width: i64,
    alphabet: &Alphabet,
) -> Expression {
    let pool: Vec<char> =
        alphabet.symbols().iter().copied().filter(|&c| c != alphabet.spacer()).collect();
    let span = (2 * half_width + 1) as u64;
    let size = (rng.next_u64() % (max_support as u64 + 1)) as usize;
    let mut sites = BTreeMap::new();
    while sites.len() < size {
        let site = (rng.next_u64() % span) as i64 - half_width;
        let sym = pool[(rng.next_u64() % pool.len() as u64) as usize];
        sites.insert(site, sym);
    }
    Expression::new(sites, alphabet).expect("sampled symbols come from the alphabet")
}

fn run_godel_roundtrip(
    count: usize,
    max_support: usize,
    half_width: i64,
    seed: u64,
) -> Result<(serde_json::Value, Artifacts)> {
    use rand_chacha::rand_core::SeedableRng;
    let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(seed);
    let alphabet = Alphabet::standard();
    let dmap = lexphys_core::alphabet::DigitMap::canonical(&alphabet);

    let mut mismatches = 0usize;
    let mut samples_csv = String::from("expression,numeral,value\n");
    for i in 0..count {
        let e = random_expression(&mut rng, max_support, half_width, &alphabet);
        let n = godel::encode(&e, &alphabet, &dmap)?;
        let back = godel::decode(&n, &alphabet, &dmap)?;
        if back != e {
            mismatches += 1;
        }
        if i < 100 {
            samples_csv.push_str(&format!(
                "\"{}\",\"{}\",\"{}\"\n",
                expressions::to_text(&e),
                n.to_text(),
                n.value()
            ));
        }
    }
    let summary = json!({
        "count": count,
        "mismatches": mismatches,
        "base": alphabet.k(),
    });
    Ok((summary, vec![("samples.csv".into(), samples_csv)]))
}

fn run_ink_demo(
    energies: &[f64],
    kt: f64,
    glyph_cfgs: &[GlyphConfig],
    reads: u32,
    flip_prob: f64,
    seed: u64,
) -> Result<(serde_json::Value, Artifacts)> {
    let spectrum = LevelSpectrum::new(energies.to_vec()).map_err(|e| anyhow::anyhow!("{e}"))?;
    let glyphs: Vec<Glyph> = glyph_cfgs.iter().map(|g| g.build()).collect::<Result<_>>()?;
    let page = compose_page(&glyphs, &spectrum, kt).map_err(|e| anyhow::anyhow!("{e}"))?;

    let mut page_csv = String::from("x,y,occupied,ground_prob\n");
    for (x, y, occ, p) in page_rows(&page) {
        page_csv.push_str(&format!("{x},{y},{occ},{p}\n"));
    }

    let (after, disturbance) =
        repeated_read(&page, reads, flip_prob, seed).map_err(|e| anyhow::anyhow!("{e}"))?;
    let mut after_csv = String::from("x,y,occupied,ground_prob\n");
    for (x, y, occ, p) in page_rows(&after) {
        after_csv.push_str(&format!("{x},{y},{occ},{p}\n"));
    }

    let molecules = page.site_density.len() as u32;
    let positional = read_cost(ReadRule::PositionOnly, molecules, 13);
    let content = read_cost(ReadRule::ContentDependent, molecules, 13);

    let summary = json!({
        "glyphs": glyph_cfgs.len(),
        "molecules": disturbance.molecules,
        "reads": disturbance.reads,
        "flip_prob": disturbance.flip_prob,
        "analytic_survival": disturbance.analytic_survival,
        "empirical_unchanged": disturbance.empirical_unchanged,
        "read_cost_position_only": positional.total.to_string(),
        "read_cost_content_dependent": content.total.to_string(),
    });
    Ok((
        summary,
        vec![("page.csv".into(), page_csv), ("page_after_reads.csv".into(), after_csv)],
    ))
}
