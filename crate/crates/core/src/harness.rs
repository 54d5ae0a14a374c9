//! Sweeps over moduli, characters and GAPs; extremal search for the largest
//! character sum over proper GAPs; the multiset counterexample identity;
//! CSV and JSON-lines reports.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use rand::seq::index::sample;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::characters::{primitive_characters, CharacterRecord, DirichletCharacter};
use crate::error::{Error, Result};
use crate::gap::family::all_vectors;
use crate::gap::{random_proper_gap, Gap, RelationProfile};
use crate::modring::{self, factorize, ComplexValue};
use crate::sums::{
    character_sum_with, multilinear_sum_with, poly_sum_with, CharacterContext, PolynomialContext,
    PolynomialModQ, PreparedGap, ReportRow, SumKind, SumReport,
};

/// Slack allowed when checking `|sum| <= chain bound` on a row.
pub const CHAIN_TOLERANCE: f64 = 1e-6;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModulusFilter {
    #[default]
    All,
    Primes,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CharacterSelection {
    /// Every primitive character mod `q`.
    #[default]
    AllPrimitive,
    /// A seeded sample of this many primitive characters per modulus.
    Sample(usize),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReportFormat {
    #[default]
    Csv,
    JsonLines,
}

impl ReportFormat {
    /// `.jsonl` / `.json` select JSON lines; everything else is CSV.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some("jsonl" | "json") => ReportFormat::JsonLines,
            _ => ReportFormat::Csv,
        }
    }
}

fn default_kind() -> SumKind {
    SumKind::Character
}

fn default_one() -> usize {
    1
}

fn default_ranks() -> Vec<usize> {
    vec![1]
}

fn default_cutoff() -> u64 {
    20_000
}

fn default_samples() -> u64 {
    50
}

fn default_degrees() -> Vec<usize> {
    vec![2, 3]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    #[serde(default = "default_kind")]
    pub kind: SumKind,
    pub q_min: u64,
    pub q_max: u64,
    #[serde(default)]
    pub filter: ModulusFilter,
    /// Ambient dimension; must be 1 except for multilinear sums.
    #[serde(default = "default_one")]
    pub s: usize,
    #[serde(default = "default_ranks")]
    pub ranks: Vec<usize>,
    /// GAPs are enumerated exhaustively when the candidate count
    /// `q^s (q^s - 1)^r (q - 1)^r` is at most this; otherwise sampled.
    #[serde(default = "default_cutoff")]
    pub exhaustive_cutoff: u64,
    /// Sampled proper GAPs per `(q, r)` above the cutoff.
    #[serde(default = "default_samples")]
    pub samples: u64,
    /// Length range for sampled GAPs, clipped to `[2, q]`.
    #[serde(default)]
    pub length_range: Option<(u64, u64)>,
    #[serde(default)]
    pub characters: CharacterSelection,
    /// Degrees of the random polynomials of a polynomial sweep.
    #[serde(default = "default_degrees")]
    pub degrees: Vec<usize>,
    /// Random polynomials per degree and modulus.
    #[serde(default = "default_one")]
    pub polynomials_per_degree: usize,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub format: Option<ReportFormat>,
}

impl SweepConfig {
    pub fn new(kind: SumKind, q_min: u64, q_max: u64) -> Self {
        SweepConfig {
            kind,
            q_min,
            q_max,
            filter: ModulusFilter::All,
            s: 1,
            ranks: default_ranks(),
            exhaustive_cutoff: default_cutoff(),
            samples: default_samples(),
            length_range: None,
            characters: CharacterSelection::AllPrimitive,
            degrees: default_degrees(),
            polynomials_per_degree: 1,
            seed: None,
            output: None,
            format: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let config: SweepConfig = serde_json::from_str(text)
            .map_err(|e| Error::InvalidArgument(format!("sweep config: {e}")))?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if self.q_min <= self.q_max && self.q_min < 2 {
            return Err(Error::InvalidArgument("moduli start at 2".into()));
        }
        if self.s == 0 || (self.kind != SumKind::Multilinear && self.s != 1) {
            return Err(Error::InvalidArgument(format!(
                "{} sums need s = 1, got s = {}",
                self.kind, self.s
            )));
        }
        if self.ranks.is_empty() || self.ranks.contains(&0) {
            return Err(Error::InvalidArgument("ranks must be positive".into()));
        }
        if self.kind == SumKind::Polynomial && self.degrees.iter().any(|&d| d < 2) {
            return Err(Error::InvalidArgument(
                "polynomial degrees start at 2".into(),
            ));
        }
        if let Some((lo, hi)) = self.length_range {
            if lo < 2 || lo > hi {
                return Err(Error::InvalidArgument(format!("length range ({lo}, {hi})")));
            }
        }
        Ok(())
    }

    pub fn report_format(&self) -> ReportFormat {
        self.format
            .or_else(|| self.output.as_deref().map(ReportFormat::from_path))
            .unwrap_or_default()
    }

    fn moduli(&self) -> Vec<u64> {
        (self.q_min.max(2)..=self.q_max)
            .filter(|&q| match (self.filter, self.kind) {
                (ModulusFilter::Primes, _) | (_, SumKind::Polynomial) => modring::is_prime(q),
                _ => true,
            })
            .collect()
    }

    fn seed(&self, why: &str) -> Result<u64> {
        self.seed
            .ok_or_else(|| Error::InvalidArgument(format!("a seed is required ({why})")))
    }
}

fn stream_rng(seed: u64, q: u64, tag: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(q.wrapping_mul(1 << 8) ^ tag);
    rng
}

fn candidate_count(q: u64, s: usize, r: usize) -> u128 {
    let qs = (q as u128).saturating_pow(s as u32);
    qs.saturating_mul((qs - 1).saturating_pow(r as u32))
        .saturating_mul((q as u128 - 1).saturating_pow(r as u32))
}

/// Every proper GAP of dimension `s` and rank `r` mod `q`, ordered by
/// generators, then lengths, then base.
pub fn all_proper_gaps(q: u64, s: usize, r: usize) -> Result<Vec<Gap>> {
    let vectors = all_vectors(q, s);
    let mut out = Vec::new();
    for gens in crate::gap::family::all_generator_tuples(q, s, r, true) {
        for h in RelationProfile::new(q, &gens)?.proper_lengths(r) {
            for base in &vectors {
                out.push(Gap::new(q, base.clone(), gens.clone(), h.clone())?);
            }
        }
    }
    Ok(out)
}

fn gaps_for(config: &SweepConfig, q: u64, r: usize) -> Result<Vec<Gap>> {
    let s = config.s;
    if candidate_count(q, s, r) <= config.exhaustive_cutoff as u128 {
        return all_proper_gaps(q, s, r);
    }
    let seed = config.seed("GAPs are sampled above the exhaustive cutoff")?;
    let mut rng = stream_rng(seed, q, r as u64);
    let (lo, hi) = config.length_range.unwrap_or((2, q));
    let range = (lo.min(q), hi.min(q));
    let mut out = Vec::with_capacity(config.samples as usize);
    for _ in 0..config.samples {
        match random_proper_gap(q, s, r, range, rng.next_u64()) {
            Ok(g) => {
                let base: Vec<u64> = (0..s).map(|_| rng.random_range(0..q)).collect();
                out.push(g.with_base(base)?);
            }
            Err(Error::SamplingFailure { .. }) => break,
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

fn characters_for(config: &SweepConfig, q: u64) -> Result<Vec<DirichletCharacter>> {
    let all = primitive_characters(&factorize(q)?)?;
    match config.characters {
        CharacterSelection::AllPrimitive => Ok(all),
        CharacterSelection::Sample(n) if n >= all.len() => Ok(all),
        CharacterSelection::Sample(n) => {
            let mut rng = stream_rng(config.seed("characters are sampled")?, q, 1 << 7);
            let mut picked = sample(&mut rng, all.len(), n).into_vec();
            picked.sort_unstable();
            Ok(picked.into_iter().map(|i| all[i].clone()).collect())
        }
    }
}

fn random_polynomial(rng: &mut ChaCha8Rng, q: u64, d: usize) -> Result<PolynomialModQ> {
    let mut c: Vec<u64> = (0..d).map(|_| rng.random_range(0..q)).collect();
    c.push(rng.random_range(1..q));
    PolynomialModQ::new(q, c)
}

fn check_row(row: &SumReport) -> Result<()> {
    if row.chain_holds(CHAIN_TOLERANCE) {
        Ok(())
    } else {
        Err(Error::InvariantViolation(format!(
            "|sum| = {} exceeds the completion bound {:?} for {} over {}",
            row.magnitude,
            row.chain_bound,
            row.character_id,
            row.gap.to_json()
        )))
    }
}

/// One row per (character or polynomial, GAP), ordered by modulus, rank,
/// GAP, then character. Fails on the first row violating the completion
/// bound.
pub fn sweep(config: &SweepConfig) -> Result<Vec<SumReport>> {
    config.validate()?;
    let mut rows = Vec::new();
    for q in config.moduli() {
        let evaluators: Vec<Evaluator> = match config.kind {
            SumKind::Polynomial => {
                let mut rng = stream_rng(config.seed("polynomials are random")?, q, 1 << 6);
                let mut out = Vec::new();
                for &d in config.degrees.iter().filter(|&&d| (d as u64) < q) {
                    for _ in 0..config.polynomials_per_degree {
                        out.push(Evaluator::Polynomial(PolynomialContext::new(
                            &random_polynomial(&mut rng, q, d)?,
                        )?));
                    }
                }
                out
            }
            kind => characters_for(config, q)?
                .iter()
                .map(|chi| Evaluator::Character(kind, CharacterContext::new(chi)))
                .collect(),
        };
        if evaluators.is_empty() {
            continue;
        }
        for &r in &config.ranks {
            let gaps = gaps_for(config, q, r)?;
            let chunk: Vec<Vec<SumReport>> = gaps
                .par_iter()
                .map(|g| {
                    let prepared = PreparedGap::new(g)?;
                    evaluators
                        .iter()
                        .map(|e| {
                            let row = e.evaluate(&prepared)?;
                            check_row(&row)?;
                            Ok(row)
                        })
                        .collect::<Result<Vec<_>>>()
                })
                .collect::<Result<Vec<_>>>()?;
            rows.extend(chunk.into_iter().flatten());
        }
    }
    Ok(rows)
}

enum Evaluator {
    Character(SumKind, CharacterContext),
    Polynomial(PolynomialContext),
}

impl Evaluator {
    fn evaluate(&self, g: &PreparedGap) -> Result<SumReport> {
        match self {
            Evaluator::Character(SumKind::Multilinear, ctx) => multilinear_sum_with(ctx, g),
            Evaluator::Character(_, ctx) => character_sum_with(ctx, g),
            Evaluator::Polynomial(ctx) => poly_sum_with(ctx, g),
        }
    }
}

/// Runs the sweep and writes its report when the config names an output.
pub fn run_sweep(config: &SweepConfig) -> Result<Vec<SumReport>> {
    let rows = sweep(config)?;
    if let Some(path) = &config.output {
        emit_report(&rows, config.report_format(), path)?;
    }
    Ok(rows)
}

/// The best (GAP, character) pair found for `max |sum_{a in A} chi(a)|`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtremalWitness {
    pub gap: Gap,
    pub character: CharacterRecord,
    pub magnitude: f64,
    /// `magnitude / (sqrt(q) (log q)^r)`.
    pub ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtremalResult {
    pub q: u64,
    pub r: usize,
    /// `None` when nothing was evaluated (zero budget, or no primitive
    /// characters mod `q`).
    pub witness: Option<ExtremalWitness>,
    pub evaluations: u64,
    /// Whether the whole search space was covered; otherwise the magnitude
    /// is only a lower bound for the maximum.
    pub exhaustive: bool,
}

fn proper_gap_count_up_to(q: u64, r: usize, limit: u128) -> Result<Option<u128>> {
    let mut count = 0u128;
    for gens in crate::gap::family::all_generator_tuples(q, 1, r, true) {
        count += RelationProfile::new(q, &gens)?.proper_lengths(r).len() as u128 * q as u128;
        if count > limit {
            return Ok(None);
        }
    }
    Ok(Some(count))
}

struct Candidate {
    gap: Gap,
    chi: usize,
    magnitude: f64,
}

/// Searches proper rank-`r` GAPs in `Z_q` and primitive characters for the
/// largest `|sum chi(a)|`: exhaustively when the space fits in `budget`
/// evaluations, otherwise by seeded restarts with local moves.
pub fn extremal_search(q: u64, r: usize, budget: u64, seed: u64) -> Result<ExtremalResult> {
    if q < 2 || r == 0 {
        return Err(Error::InvalidArgument(format!("q = {q}, r = {r}")));
    }
    Error::guard(
        "extremal search modulus",
        q as u128,
        crate::characters::MAX_CHARACTER_MODULUS as u128,
    )?;
    let chars = primitive_characters(&factorize(q)?)?;
    let contexts: Vec<CharacterContext> = chars.iter().map(CharacterContext::new).collect();
    let mut result = ExtremalResult {
        q,
        r,
        witness: None,
        evaluations: 0,
        exhaustive: false,
    };
    if budget == 0 || contexts.is_empty() {
        return Ok(result);
    }
    let limit = budget as u128 / contexts.len() as u128;
    let best = if proper_gap_count_up_to(q, r, limit)?.is_some() {
        result.exhaustive = true;
        exhaustive_extremal(q, r, &contexts, &mut result.evaluations)?
    } else {
        random_extremal(q, r, &contexts, budget, seed, &mut result.evaluations)?
    };
    result.witness = best.map(|c| {
        let shape = (q as f64).sqrt() * (q as f64).ln().powi(r as i32);
        ExtremalWitness {
            gap: c.gap,
            character: chars[c.chi].record(),
            magnitude: c.magnitude,
            ratio: c.magnitude / shape,
        }
    });
    Ok(result)
}

fn exhaustive_extremal(
    q: u64,
    r: usize,
    contexts: &[CharacterContext],
    evaluations: &mut u64,
) -> Result<Option<Candidate>> {
    let mut best: Option<Candidate> = None;
    for gens in crate::gap::family::all_generator_tuples(q, 1, r, true) {
        for h in RelationProfile::new(q, &gens)?.proper_lengths(r) {
            for base in 0..q {
                let g = Gap::new(q, vec![base], gens.clone(), h.clone())?;
                for (i, ctx) in contexts.iter().enumerate() {
                    let m = ctx.sum(&g)?.norm();
                    *evaluations += 1;
                    if best.as_ref().is_none_or(|b| m > b.magnitude + 1e-12) {
                        best = Some(Candidate {
                            gap: g.clone(),
                            chi: i,
                            magnitude: m,
                        });
                    }
                }
            }
        }
    }
    Ok(best)
}

/// Key for breaking ties between equal magnitudes.
fn tie_key(
    c: &Candidate,
    contexts: &[CharacterContext],
) -> (Vec<Vec<u64>>, Vec<u64>, Vec<u64>, Vec<u64>) {
    (
        c.gap.generators().to_vec(),
        c.gap.lengths().to_vec(),
        contexts[c.chi].character().exponents().to_vec(),
        c.gap.base().to_vec(),
    )
}

fn better(new: &Candidate, old: &Candidate, contexts: &[CharacterContext]) -> bool {
    if (new.magnitude - old.magnitude).abs() <= 1e-12 {
        tie_key(new, contexts) < tie_key(old, contexts)
    } else {
        new.magnitude > old.magnitude
    }
}

/// Local moves before restarting from a fresh random point.
const STALL_LIMIT: u32 = 64;

fn random_extremal(
    q: u64,
    r: usize,
    contexts: &[CharacterContext],
    budget: u64,
    seed: u64,
    evaluations: &mut u64,
) -> Result<Option<Candidate>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<Candidate> = None;
    let eval = |g: Gap, chi: usize, evaluations: &mut u64| -> Result<Candidate> {
        *evaluations += 1;
        let magnitude = contexts[chi].sum(&g)?.norm();
        Ok(Candidate {
            gap: g,
            chi,
            magnitude,
        })
    };
    while *evaluations < budget {
        let start = match random_proper_gap(q, 1, r, (2, q), rng.next_u64()) {
            Ok(g) => g.with_base(vec![rng.random_range(0..q)])?,
            Err(Error::SamplingFailure { .. }) => break,
            Err(e) => return Err(e),
        };
        let chi = rng.random_range(0..contexts.len());
        let mut current = eval(start, chi, evaluations)?;
        let mut stall = 0;
        while stall < STALL_LIMIT && *evaluations < budget {
            let mut gens = current.gap.generators().to_vec();
            let mut lengths = current.gap.lengths().to_vec();
            let mut base = current.gap.base().to_vec();
            let mut chi = current.chi;
            match rng.random_range(0..4u8) {
                0 => gens[rng.random_range(0..r)] = vec![rng.random_range(1..q)],
                1 => {
                    let i = rng.random_range(0..r);
                    lengths[i] = rng.random_range(2..=q);
                }
                2 => base = vec![rng.random_range(0..q)],
                _ => chi = rng.random_range(0..contexts.len()),
            }
            let g = Gap::new(q, base, gens, lengths)?;
            if !g.is_proper()? {
                stall += 1;
                continue;
            }
            let cand = eval(g, chi, evaluations)?;
            if cand.magnitude > current.magnitude + 1e-12 {
                current = cand;
                stall = 0;
            } else {
                stall += 1;
            }
        }
        if best.as_ref().is_none_or(|b| better(&current, b, contexts)) {
            best = Some(current);
        }
    }
    Ok(best)
}

/// Both sides of `sum_{h1,h2 <= H} chi(h1 - h2) = 2 sum_{n <= H} chi(n) (H - n)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CounterexampleReport {
    pub q: u64,
    pub h: u64,
    pub character: CharacterRecord,
    /// `sum_{a in A} chi(a)` over `A = {h1 + h2 (q - 1) : 1 <= h1, h2 <= H}`.
    pub lhs: ComplexValue,
    pub rhs: ComplexValue,
    pub difference: f64,
    /// `max_b #{a in A : a == b (mod q)}`.
    pub multiplicity: u64,
}

/// Evaluates both sides for an even character `chi` and `1 <= H <= q/2`.
pub fn counterexample_identity(chi: &DirichletCharacter, h: u64) -> Result<CounterexampleReport> {
    let q = chi.modulus();
    if h == 0 || h > q / 2 {
        return Err(Error::InvalidArgument(format!(
            "H = {h} outside [1, {}]",
            q / 2
        )));
    }
    if !chi.is_even() {
        return Err(Error::InvalidArgument(format!("{chi} is odd")));
    }
    let values = chi.values();
    let mut counts = vec![0u64; q as usize];
    let mut lhs = ComplexValue::new(0.0, 0.0);
    for h1 in 1..=h {
        for h2 in 1..=h {
            let a = ((h1 as u128 + h2 as u128 * (q as u128 - 1)) % q as u128) as usize;
            counts[a] += 1;
            lhs += values[a];
        }
    }
    let rhs: ComplexValue = (1..=h)
        .map(|n| values[n as usize] * (2 * (h - n)) as f64)
        .sum();
    Ok(CounterexampleReport {
        q,
        h,
        character: chi.record(),
        lhs,
        rhs,
        difference: (lhs - rhs).norm(),
        multiplicity: counts.into_iter().max().unwrap_or(0),
    })
}

/// [`counterexample_identity`] for the first even primitive character mod `q`.
pub fn counterexample_demo(q: u64, h: u64) -> Result<CounterexampleReport> {
    let chi = primitive_characters(&factorize(q)?)?
        .into_iter()
        .find(DirichletCharacter::is_even)
        .ok_or_else(|| Error::UnsupportedModulus {
            q,
            reason: "no even primitive character".into(),
        })?;
    counterexample_identity(&chi, h)
}

/// CSV header, in column order.
pub const REPORT_COLUMNS: [&str; 12] = [
    "kind",
    "q",
    "s",
    "r",
    "character_id",
    "gap_json",
    "sum_re",
    "sum_im",
    "magnitude",
    "chain_bound",
    "shape_bound",
    "ratio",
];

/// Rounds to 12 significant digits.
pub fn round_significant(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.11e}").parse().expect("formatted float parses")
}

fn rounded_row(report: &SumReport) -> ReportRow {
    let mut row = ReportRow::from(report.clone());
    for v in [
        &mut row.sum_re,
        &mut row.sum_im,
        &mut row.magnitude,
        &mut row.shape_bound,
        &mut row.ratio,
    ] {
        *v = round_significant(*v);
    }
    row.chain_bound = row.chain_bound.map(round_significant);
    row
}

/// Writes rows with 12-significant-digit floats and LF line endings.
pub fn write_report<W: Write>(rows: &[SumReport], format: ReportFormat, out: W) -> Result<()> {
    let err = |e: csv::Error| Error::Parse(e.to_string());
    match format {
        ReportFormat::Csv => {
            let mut w = csv::WriterBuilder::new()
                .has_headers(false)
                .terminator(csv::Terminator::Any(b'\n'))
                .from_writer(out);
            w.write_record(REPORT_COLUMNS).map_err(err)?;
            for row in rows {
                w.serialize(rounded_row(row)).map_err(err)?;
            }
            w.flush().map_err(|e| Error::Parse(e.to_string()))?;
        }
        ReportFormat::JsonLines => {
            let mut out = out;
            for row in rows {
                let line = serde_json::to_string(&rounded_row(row)).expect("rows serialize");
                writeln!(out, "{line}").map_err(|e| Error::Parse(e.to_string()))?;
            }
        }
    }
    Ok(())
}

pub fn render_report(rows: &[SumReport], format: ReportFormat) -> Result<String> {
    let mut buf = Vec::new();
    write_report(rows, format, &mut buf)?;
    Ok(String::from_utf8(buf).expect("reports are UTF-8"))
}

/// Writes the report to `path`, creating parent directories.
pub fn emit_report(rows: &[SumReport], format: ReportFormat, path: &Path) -> Result<()> {
    let text = render_report(rows, format)?;
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn parse_report(text: &str, format: ReportFormat) -> Result<Vec<SumReport>> {
    let rows: Vec<ReportRow> = match format {
        ReportFormat::Csv => csv::Reader::from_reader(text.as_bytes())
            .deserialize()
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Parse(e.to_string()))?,
        ReportFormat::JsonLines => text
            .lines()
            .filter(|l| !l.trim().is_empty())
            .map(|l| serde_json::from_str(l).map_err(|e| Error::Parse(e.to_string())))
            .collect::<Result<_>>()?,
    };
    rows.into_iter().map(SumReport::try_from).collect()
}

pub fn read_report(path: &Path, format: ReportFormat) -> Result<Vec<SumReport>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_report(&text, format)
}
