//! Character sums, polynomial exponential sums and multilinear character
//! sums over GAPs, each reported with the completion bound
//! `||f^||_inf ||A^||_1 / q^s` and the asymptotic shape `q^(s/2) (log q)^r`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::characters::{gauss_sum, DirichletCharacter};
use crate::error::{Error, Result};
use crate::fourier::l1_norm;
use crate::gap::Gap;
use crate::modring::{self, ComplexValue, RootTable};

/// `h(x) = c_0 + c_1 x + ... + c_d x^d` with residue coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PolynomialModQ {
    q: u64,
    coefficients: Vec<u64>,
}

impl PolynomialModQ {
    /// Coefficients in increasing degree; requires `2 <= d < q` and `q` not
    /// dividing the leading coefficient.
    pub fn new(q: u64, coefficients: Vec<u64>) -> Result<Self> {
        if q < 2 {
            return Err(Error::InvalidArgument(format!("modulus {q} < 2")));
        }
        let coefficients: Vec<u64> = coefficients.into_iter().map(|c| c % q).collect();
        let d = coefficients.len().saturating_sub(1) as u64;
        if d < 2 || d >= q {
            return Err(Error::InvalidPolynomial(format!(
                "degree {d} outside [2, {})",
                q
            )));
        }
        if coefficients[d as usize] == 0 {
            return Err(Error::InvalidPolynomial(format!(
                "leading coefficient divisible by {q}"
            )));
        }
        Ok(PolynomialModQ { q, coefficients })
    }

    pub fn monomial(q: u64, d: usize) -> Result<Self> {
        let mut c = vec![0; d + 1];
        c[d] = 1;
        Self::new(q, c)
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn degree(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn coefficients(&self) -> &[u64] {
        &self.coefficients
    }

    /// Horner evaluation mod `q`.
    pub fn evaluate(&self, x: u64) -> u64 {
        let q = self.q;
        let x = x % q;
        self.coefficients
            .iter()
            .rev()
            .fold(0, |acc, &c| (modring::mul_mod(acc, x, q) + c) % q)
    }

    /// Evaluation as `sum c_k x^k` with separately computed powers.
    pub fn evaluate_naive(&self, x: u64) -> u64 {
        let q = self.q;
        self.coefficients
            .iter()
            .enumerate()
            .fold(0, |acc, (k, &c)| {
                (acc + modring::mul_mod(c, modring::pow_mod(x, k as u64, q), q)) % q
            })
    }
}

impl fmt::Display for PolynomialModQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "h[q={};c=", self.q)?;
        for (i, c) in self.coefficients.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str("]")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SumKind {
    Character,
    Polynomial,
    Multilinear,
}

impl fmt::Display for SumKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SumKind::Character => "character",
            SumKind::Polynomial => "polynomial",
            SumKind::Multilinear => "multilinear",
        })
    }
}

/// One evaluated sum. Serializes as a flat row (see [`ReportRow`]).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(into = "ReportRow", try_from = "ReportRow")]
pub struct SumReport {
    pub kind: SumKind,
    /// Identifies the character or polynomial, e.g. `chi[q=7;e=3]`.
    pub character_id: String,
    pub gap: Gap,
    pub sum: ComplexValue,
    pub magnitude: f64,
    /// `||f^||_inf ||A^||_1 / q^s`; absent for imprimitive characters.
    pub chain_bound: Option<f64>,
    /// `q^(s/2) (log q)^r`, times `d` for polynomial sums.
    pub shape_bound: f64,
    /// `magnitude / shape_bound`.
    pub ratio: f64,
}

impl SumReport {
    fn new(
        kind: SumKind,
        character_id: String,
        gap: &Gap,
        sum: ComplexValue,
        chain_bound: Option<f64>,
        shape_bound: f64,
    ) -> Self {
        let magnitude = sum.norm();
        SumReport {
            kind,
            character_id,
            gap: gap.clone(),
            sum,
            magnitude,
            chain_bound,
            shape_bound,
            ratio: magnitude / shape_bound,
        }
    }

    pub fn q(&self) -> u64 {
        self.gap.q()
    }

    /// Whether the magnitude respects the completion bound (within `tol`).
    /// Reports without a chain bound trivially pass.
    pub fn chain_holds(&self, tol: f64) -> bool {
        self.chain_bound.is_none_or(|b| self.magnitude <= b + tol)
    }
}

/// The flat serialized form of a [`SumReport`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub kind: SumKind,
    pub q: u64,
    pub s: usize,
    pub r: usize,
    pub character_id: String,
    pub gap_json: String,
    pub sum_re: f64,
    pub sum_im: f64,
    pub magnitude: f64,
    pub chain_bound: Option<f64>,
    pub shape_bound: f64,
    pub ratio: f64,
}

impl From<SumReport> for ReportRow {
    fn from(r: SumReport) -> Self {
        ReportRow {
            kind: r.kind,
            q: r.gap.q(),
            s: r.gap.dimension(),
            r: r.gap.rank(),
            character_id: r.character_id,
            gap_json: r.gap.to_json(),
            sum_re: r.sum.re,
            sum_im: r.sum.im,
            magnitude: r.magnitude,
            chain_bound: r.chain_bound,
            shape_bound: r.shape_bound,
            ratio: r.ratio,
        }
    }
}

impl TryFrom<ReportRow> for SumReport {
    type Error = Error;

    fn try_from(row: ReportRow) -> Result<Self> {
        let gap: Gap = serde_json::from_str(&row.gap_json)
            .map_err(|e| Error::Parse(format!("gap_json: {e}")))?;
        if gap.q() != row.q || gap.dimension() != row.s || gap.rank() != row.r {
            return Err(Error::Parse(format!(
                "row header (q={}, s={}, r={}) disagrees with {}",
                row.q, row.s, row.r, row.gap_json
            )));
        }
        Ok(SumReport {
            kind: row.kind,
            character_id: row.character_id,
            gap,
            sum: ComplexValue::new(row.sum_re, row.sum_im),
            magnitude: row.magnitude,
            chain_bound: row.chain_bound,
            shape_bound: row.shape_bound,
            ratio: row.ratio,
        })
    }
}

/// `||f^||_inf ||A^||_1 / q^s`.
pub fn completion_bound(f_inf: f64, g: &Gap) -> Result<f64> {
    if f_inf.is_nan() || f_inf < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "f_inf = {f_inf} must be nonnegative"
        )));
    }
    if f_inf == 0.0 {
        return Ok(0.0);
    }
    Ok(f_inf * l1_norm(g)? / (g.q() as f64).powi(g.dimension() as i32))
}

/// A GAP with its l1 norm, shared by every sum evaluated over it.
#[derive(Clone, Debug, PartialEq)]
pub struct PreparedGap {
    gap: Gap,
    l1: f64,
}

impl PreparedGap {
    pub fn new(gap: &Gap) -> Result<Self> {
        Ok(PreparedGap {
            gap: gap.clone(),
            l1: l1_norm(gap)?,
        })
    }

    pub fn gap(&self) -> &Gap {
        &self.gap
    }

    pub fn l1(&self) -> f64 {
        self.l1
    }

    /// Same as [`completion_bound`] with the cached l1 norm.
    pub fn completion_bound(&self, f_inf: f64) -> f64 {
        f_inf * self.l1 / (self.gap.q() as f64).powi(self.gap.dimension() as i32)
    }
}

fn shape(q: u64, s: usize, r: usize) -> f64 {
    let q = q as f64;
    q.powf(s as f64 / 2.0) * q.ln().powi(r as i32)
}

/// A character with its value table, for repeated evaluation.
#[derive(Clone, Debug)]
pub struct CharacterContext {
    chi: DirichletCharacter,
    values: Vec<ComplexValue>,
    id: String,
}

impl CharacterContext {
    pub fn new(chi: &DirichletCharacter) -> Self {
        CharacterContext {
            chi: chi.clone(),
            values: chi.values(),
            id: chi.to_string(),
        }
    }

    pub fn character(&self) -> &DirichletCharacter {
        &self.chi
    }

    #[inline]
    pub fn value(&self, n: u64) -> ComplexValue {
        self.values[n as usize]
    }

    /// `sum_{a in A} chi(a)` over a one-dimensional GAP (with multiplicity).
    pub fn sum(&self, g: &Gap) -> Result<ComplexValue> {
        self.check(g, Some(1))?;
        let mut total = ComplexValue::new(0.0, 0.0);
        g.try_for_each_element(|a| {
            total += self.values[a[0] as usize];
            true
        })?;
        Ok(total)
    }

    /// `sum_{a in A} chi(a_1 ... a_s)`.
    pub fn multilinear_sum(&self, g: &Gap) -> Result<ComplexValue> {
        self.check(g, None)?;
        let q = g.q();
        let mut total = ComplexValue::new(0.0, 0.0);
        g.try_for_each_element(|a| {
            let prod = a.iter().fold(1 % q, |p, &x| modring::mul_mod(p, x, q));
            total += self.values[prod as usize];
            true
        })?;
        Ok(total)
    }

    fn check(&self, g: &Gap, dimension: Option<usize>) -> Result<()> {
        if g.q() != self.chi.modulus() {
            return Err(Error::ModulusMismatch {
                expected: self.chi.modulus(),
                found: g.q(),
            });
        }
        if let Some(s) = dimension.filter(|&s| s != g.dimension()) {
            return Err(Error::DimensionMismatch {
                expected: s,
                found: g.dimension(),
            });
        }
        Ok(())
    }
}

/// `sum_{a in A} chi(a)` for a GAP in `Z_q`. The chain bound
/// `sqrt(q) ||A^||_1 / q` is attached only when `chi` is primitive.
pub fn character_sum_over_gap(chi: &DirichletCharacter, g: &Gap) -> Result<SumReport> {
    character_sum_with(&CharacterContext::new(chi), &PreparedGap::new(g)?)
}

pub fn character_sum_with(ctx: &CharacterContext, prepared: &PreparedGap) -> Result<SumReport> {
    let g = &prepared.gap;
    let sum = ctx.sum(g)?;
    let q = g.q();
    let chain = if ctx.chi.is_primitive() {
        Some(prepared.completion_bound((q as f64).sqrt()))
    } else {
        None
    };
    Ok(SumReport::new(
        SumKind::Character,
        ctx.id.clone(),
        g,
        sum,
        chain,
        shape(q, 1, g.rank()),
    ))
}

/// `sum_{a in A} chi(a_1 ... a_s)`, with chain bound `q^(s/2) ||A^||_1 / q^s`
/// when `chi` is primitive.
pub fn multilinear_character_sum(chi: &DirichletCharacter, g: &Gap) -> Result<SumReport> {
    multilinear_sum_with(&CharacterContext::new(chi), &PreparedGap::new(g)?)
}

pub fn multilinear_sum_with(ctx: &CharacterContext, prepared: &PreparedGap) -> Result<SumReport> {
    let g = &prepared.gap;
    let sum = ctx.multilinear_sum(g)?;
    let q = g.q();
    let s = g.dimension();
    let chain = if ctx.chi.is_primitive() {
        Some(prepared.completion_bound((q as f64).powf(s as f64 / 2.0)))
    } else {
        None
    };
    Ok(SumReport::new(
        SumKind::Multilinear,
        ctx.id.clone(),
        g,
        sum,
        chain,
        shape(q, s, g.rank()),
    ))
}

/// `f(n) = e_q(h(n))` tabulated, with the exact `||f^||_inf`.
#[derive(Clone, Debug)]
pub struct PolynomialContext {
    h: PolynomialModQ,
    values: Vec<u64>,
    roots: RootTable,
    f_inf: f64,
    argmax: u64,
}

impl PolynomialContext {
    /// `q` must be prime.
    pub fn new(h: &PolynomialModQ) -> Result<Self> {
        let q = h.q();
        if !modring::is_prime(q) {
            return Err(Error::NotPrime(q));
        }
        Error::guard("complete sum table", (q as u128).pow(2), 1u128 << 34)?;
        let values: Vec<u64> = (0..q).map(|n| h.evaluate(n)).collect();
        let roots = RootTable::new(q);
        let (argmax, f_inf) = max_complete_sum(q, &values, &roots);
        Ok(PolynomialContext {
            h: h.clone(),
            values,
            roots,
            f_inf,
            argmax,
        })
    }

    pub fn polynomial(&self) -> &PolynomialModQ {
        &self.h
    }

    /// `max_b |sum_a e_q(h(a) + b a)|`.
    pub fn f_inf(&self) -> f64 {
        self.f_inf
    }

    pub fn sum(&self, g: &Gap) -> Result<ComplexValue> {
        if g.q() != self.h.q() {
            return Err(Error::ModulusMismatch {
                expected: self.h.q(),
                found: g.q(),
            });
        }
        if g.dimension() != 1 {
            return Err(Error::DimensionMismatch {
                expected: 1,
                found: g.dimension(),
            });
        }
        let mut total = ComplexValue::new(0.0, 0.0);
        g.try_for_each_element(|a| {
            total += self.roots.get(self.values[a[0] as usize]);
            true
        })?;
        Ok(total)
    }
}

fn max_complete_sum(q: u64, values: &[u64], roots: &RootTable) -> (u64, f64) {
    let mut best = (0, -1.0);
    for b in 0..q {
        let mut total = ComplexValue::new(0.0, 0.0);
        let mut ba = 0u64;
        for &v in values {
            let k = v + ba;
            total += roots.get(if k >= q { k - q } else { k });
            ba += b;
            if ba >= q {
                ba -= q;
            }
        }
        let m = total.norm();
        if m > best.1 {
            best = (b, m);
        }
    }
    best
}

/// `sum_{n in A} e_q(h(n))` for prime `q`, with chain bound
/// `||f^||_inf ||A^||_1 / q` where `||f^||_inf` is computed exactly.
pub fn poly_exp_sum_over_gap(h: &PolynomialModQ, g: &Gap) -> Result<SumReport> {
    poly_sum_with(&PolynomialContext::new(h)?, &PreparedGap::new(g)?)
}

pub fn poly_sum_with(ctx: &PolynomialContext, prepared: &PreparedGap) -> Result<SumReport> {
    let g = &prepared.gap;
    let sum = ctx.sum(g)?;
    let q = g.q();
    Ok(SumReport::new(
        SumKind::Polynomial,
        ctx.h.to_string(),
        g,
        sum,
        Some(prepared.completion_bound(ctx.f_inf)),
        ctx.h.degree() as f64 * shape(q, 1, g.rank()),
    ))
}

/// Largest complete sum `|sum_a e_q(h(a) + b a)|` against `(d - 1) sqrt(q)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeilReport {
    pub polynomial: PolynomialModQ,
    pub max_magnitude: f64,
    pub argmax_b: u64,
    pub ceiling: f64,
    pub holds: bool,
}

/// Largest prime accepted by [`weil_complete_sum_check`].
pub const WEIL_MAX_PRIME: u64 = 10_000;

pub fn weil_complete_sum_check(h: &PolynomialModQ) -> Result<WeilReport> {
    let q = h.q();
    if !modring::is_prime(q) {
        return Err(Error::NotPrime(q));
    }
    Error::guard("Weil check modulus", q as u128, WEIL_MAX_PRIME as u128)?;
    let ctx = PolynomialContext::new(h)?;
    let ceiling = (h.degree() as f64 - 1.0) * (q as f64).sqrt();
    Ok(WeilReport {
        polynomial: h.clone(),
        max_magnitude: ctx.f_inf,
        argmax_b: ctx.argmax,
        ceiling,
        holds: ctx.f_inf <= ceiling + 1e-6,
    })
}

/// Representatives of the polynomials of degree `d` mod a prime `q > d` up
/// to the changes that leave `max_b |sum_a e_q(h(a) + b a)|` unchanged:
/// `c_0` (a unit phase) and `c_1` (absorbed by `b`) are dropped, `c_{d-1}`
/// is removed by translating `a`, and `c_d` is reduced mod `d`-th powers by
/// scaling `a`.
pub fn weil_representatives(q: u64, d: usize) -> Result<Vec<PolynomialModQ>> {
    if !modring::is_prime(q) {
        return Err(Error::NotPrime(q));
    }
    if d < 2 || d as u64 >= q {
        return Err(Error::InvalidPolynomial(format!(
            "degree {d} outside [2, {q})"
        )));
    }
    // leading coefficients: one per coset of the d-th powers
    let mut seen = vec![false; q as usize];
    let mut leads = Vec::new();
    for c in 1..q {
        if !seen[c as usize] {
            leads.push(c);
            for u in 1..q {
                seen[modring::mul_mod(c, modring::pow_mod(u, d as u64, q), q) as usize] = true;
            }
        }
    }
    // free middle coefficients c_2 .. c_{d-2}
    let free = d.saturating_sub(3);
    let count = (q as usize).pow(free as u32);
    let mut out = Vec::with_capacity(leads.len() * count);
    for &lead in &leads {
        for idx in 0..count {
            let mut c = vec![0u64; d + 1];
            let mut rem = idx as u64;
            for ck in c.iter_mut().take(d - 1).skip(2) {
                *ck = rem % q;
                rem /= q;
            }
            c[d] = lead;
            out.push(PolynomialModQ::new(q, c)?);
        }
    }
    Ok(out)
}

/// `max_b |f^(b) - tau(chi)^s prod conj(chi(b_i))|` for
/// `f(a) = chi(a_1 ... a_s)`, with `f^` summed directly over `Z_q^s`.
pub fn multilinear_fourier_deviation(chi: &DirichletCharacter, s: usize) -> Result<f64> {
    let q = chi.modulus();
    Error::guard(
        "multilinear transform",
        (q as u128).saturating_pow(2 * s as u32),
        1u128 << 32,
    )?;
    let values = chi.values();
    let roots = RootTable::new(q);
    let tau_s = gauss_sum(chi).value.powi(s as i32);
    let vectors = crate::gap::family::all_vectors(q, s);
    let products: Vec<ComplexValue> = vectors
        .iter()
        .map(|a| values[a.iter().fold(1 % q, |p, &x| modring::mul_mod(p, x, q)) as usize])
        .collect();
    let mut worst: f64 = 0.0;
    for b in &vectors {
        let mut direct = ComplexValue::new(0.0, 0.0);
        for (a, f) in vectors.iter().zip(&products) {
            let phase = a.iter().zip(b).fold(0, |acc, (&x, &y)| (acc + x * y) % q);
            direct += f * roots.get(phase);
        }
        let closed = b
            .iter()
            .fold(tau_s, |acc, &y| acc * values[y as usize].conj());
        worst = worst.max((direct - closed).norm());
    }
    Ok(worst)
}
