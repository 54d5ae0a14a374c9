//! Generalized arithmetic progressions in `Z_q^s`.
//!
//! A GAP of rank `r` is the multiset `{a0 + h1 a1 + ... + hr ar (mod q) : 0 <= hi < Hi}`.
//! It is proper when all `H1 ... Hr` parameter tuples give distinct elements.
//! Properness is decided two ways: by enumerating the elements
//! ([`Gap::is_proper_enumeration`]) and by scanning the box of integer
//! relations `z1 a1 + ... + zr ar == 0` with `|zi| < Hi` ([`Gap::is_proper_kernel`]).

use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::modring::{self, divisors};

/// Guard on the number of enumerated elements or relation vectors.
pub const ENUMERATION_LIMIT: u128 = 10_000_000;

/// Rejections allowed in [`random_proper_gap`] before giving up.
pub const MAX_REJECTIONS: u64 = 10_000;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawGap", into = "RawGap")]
pub struct Gap {
    q: u64,
    s: usize,
    base: Vec<u64>,
    generators: Vec<Vec<u64>>,
    lengths: Vec<u64>,
}

#[derive(Serialize, Deserialize)]
struct RawGap {
    q: u64,
    s: usize,
    base: Vec<u64>,
    generators: Vec<Vec<u64>>,
    lengths: Vec<u64>,
}

impl TryFrom<RawGap> for Gap {
    type Error = Error;

    fn try_from(raw: RawGap) -> Result<Self> {
        if raw.base.len() != raw.s {
            return Err(Error::DimensionMismatch {
                expected: raw.s,
                found: raw.base.len(),
            });
        }
        Gap::new(raw.q, raw.base, raw.generators, raw.lengths)
    }
}

impl From<Gap> for RawGap {
    fn from(g: Gap) -> Self {
        RawGap {
            q: g.q,
            s: g.s,
            base: g.base,
            generators: g.generators,
            lengths: g.lengths,
        }
    }
}

impl Gap {
    /// Builds a GAP, reducing every coordinate into `[0, q)`.
    ///
    /// Requires `r >= 1`, all vectors of the same dimension `s >= 1`, and
    /// `2 <= Hi <= q`.
    pub fn new(
        q: u64,
        base: Vec<u64>,
        generators: Vec<Vec<u64>>,
        lengths: Vec<u64>,
    ) -> Result<Self> {
        if q < 2 {
            return Err(Error::InvalidArgument(format!(
                "GAP modulus must be at least 2, got {q}"
            )));
        }
        let s = base.len();
        if s == 0 {
            return Err(Error::InvalidArgument(
                "dimension must be at least 1".into(),
            ));
        }
        if generators.is_empty() {
            return Err(Error::InvalidArgument("rank must be at least 1".into()));
        }
        if generators.len() != lengths.len() {
            return Err(Error::DimensionMismatch {
                expected: generators.len(),
                found: lengths.len(),
            });
        }
        if let Some(g) = generators.iter().find(|g| g.len() != s) {
            return Err(Error::DimensionMismatch {
                expected: s,
                found: g.len(),
            });
        }
        if let Some(&h) = lengths.iter().find(|&&h| h < 2 || h > q) {
            return Err(Error::InvalidArgument(format!(
                "length {h} outside [2, {q}]"
            )));
        }
        let reduce = |v: Vec<u64>| v.into_iter().map(|x| x % q).collect::<Vec<_>>();
        Ok(Gap {
            q,
            s,
            base: reduce(base),
            generators: generators.into_iter().map(reduce).collect(),
            lengths,
        })
    }

    /// A GAP in `Z_q` (dimension one).
    pub fn one_dim(q: u64, base: u64, generators: &[u64], lengths: &[u64]) -> Result<Self> {
        Gap::new(
            q,
            vec![base],
            generators.iter().map(|&a| vec![a]).collect(),
            lengths.to_vec(),
        )
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn dimension(&self) -> usize {
        self.s
    }

    pub fn rank(&self) -> usize {
        self.generators.len()
    }

    pub fn base(&self) -> &[u64] {
        &self.base
    }

    pub fn generators(&self) -> &[Vec<u64>] {
        &self.generators
    }

    pub fn lengths(&self) -> &[u64] {
        &self.lengths
    }

    /// `H1 * ... * Hr`.
    pub fn volume(&self) -> u128 {
        self.lengths.iter().map(|&h| h as u128).product()
    }

    /// `q^s`, the size of the ambient group.
    pub fn ambient_size(&self) -> u128 {
        (self.q as u128).saturating_pow(self.s as u32)
    }

    /// The same progression translated to a new base point.
    pub fn with_base(&self, base: Vec<u64>) -> Result<Self> {
        Gap::new(self.q, base, self.generators.clone(), self.lengths.clone())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("GAP serialization is infallible")
    }

    /// Calls `f` on each element in lexicographic order of `(h1, ..., hr)`,
    /// stopping early when `f` returns `false`.
    pub fn try_for_each_element(&self, mut f: impl FnMut(&[u64]) -> bool) -> Result<()> {
        Error::guard("GAP enumeration", self.volume(), ENUMERATION_LIMIT)?;
        let q = self.q;
        let r = self.rank();
        let mut h = vec![0u64; r];
        let mut cur = self.base.clone();
        loop {
            if !f(&cur) {
                return Ok(());
            }
            let mut i = r;
            loop {
                if i == 0 {
                    return Ok(());
                }
                i -= 1;
                let a = &self.generators[i];
                if h[i] + 1 < self.lengths[i] {
                    h[i] += 1;
                    for (c, &x) in cur.iter_mut().zip(a) {
                        *c = (*c + x) % q;
                    }
                    break;
                }
                // roll back h[i] * a_i
                let back = h[i] % q;
                for (c, &x) in cur.iter_mut().zip(a) {
                    *c = (*c + (q - modring::mul_mod(back, x, q)) % q) % q;
                }
                h[i] = 0;
            }
        }
    }

    /// All `H1 ... Hr` elements, duplicates preserved.
    pub fn enumerate_elements(&self) -> Result<Vec<Vec<u64>>> {
        let mut out = Vec::with_capacity(self.volume().min(ENUMERATION_LIMIT) as usize);
        self.try_for_each_element(|v| {
            out.push(v.to_vec());
            true
        })?;
        Ok(out)
    }

    /// Elements encoded as `sum_j x_j q^(s-1-j)`, in enumeration order.
    pub fn element_indices(&self) -> Result<Vec<u64>> {
        let q = self.q;
        let mut out = Vec::with_capacity(self.volume().min(ENUMERATION_LIMIT) as usize);
        self.try_for_each_element(|v| {
            out.push(v.iter().fold(0u64, |acc, &x| acc * q + x));
            true
        })?;
        Ok(out)
    }

    /// Properness by enumeration: true iff no element repeats.
    pub fn is_proper_enumeration(&self) -> Result<bool> {
        let q = self.q;
        let mut distinct = true;
        if self.ambient_size() <= 1 << 27 {
            let mut seen = vec![0u64; (self.ambient_size() as usize).div_ceil(64)];
            self.try_for_each_element(|v| {
                let idx = v.iter().fold(0u64, |acc, &x| acc * q + x) as usize;
                let (word, bit) = (idx / 64, 1u64 << (idx % 64));
                if seen[word] & bit != 0 {
                    distinct = false;
                    return false;
                }
                seen[word] |= bit;
                true
            })?;
        } else {
            let mut seen = HashSet::new();
            self.try_for_each_element(|v| {
                distinct = seen.insert(v.to_vec());
                distinct
            })?;
        }
        Ok(distinct)
    }

    /// Properness by relations: true iff no nonzero integer vector `z` with
    /// `|zi| < Hi` satisfies `sum zi ai == 0 (mod q)` coordinatewise.
    pub fn is_proper_kernel(&self) -> Result<bool> {
        let boxed: u128 = self.lengths.iter().map(|&h| 2 * h as u128 - 1).product();
        Error::guard("relation box", boxed, ENUMERATION_LIMIT)?;
        let q = self.q;
        let r = self.rank();
        // z starts at (-(H1-1), ..., -(Hr-1))
        let mut z: Vec<i64> = self.lengths.iter().map(|&h| -(h as i64 - 1)).collect();
        let mut sum = vec![0u64; self.s];
        for (a, &zi) in self.generators.iter().zip(&z) {
            let zi = modring::reduce(zi, q);
            for (s, &x) in sum.iter_mut().zip(a) {
                *s = (*s + modring::mul_mod(zi, x, q)) % q;
            }
        }
        loop {
            if sum.iter().all(|&x| x == 0) && z.iter().any(|&zi| zi != 0) {
                return Ok(false);
            }
            let mut i = r;
            loop {
                if i == 0 {
                    return Ok(true);
                }
                i -= 1;
                let a = &self.generators[i];
                let top = self.lengths[i] as i64 - 1;
                if z[i] < top {
                    z[i] += 1;
                    for (s, &x) in sum.iter_mut().zip(a) {
                        *s = (*s + x) % q;
                    }
                    break;
                }
                // wrap from top to -top: subtract 2 top a_i
                let back = (2 * top as u64) % q;
                for (s, &x) in sum.iter_mut().zip(a) {
                    *s = (*s + (q - modring::mul_mod(back, x, q)) % q) % q;
                }
                z[i] = -top;
            }
        }
    }

    /// Properness by whichever check fits its guard, preferring relations.
    pub fn is_proper(&self) -> Result<bool> {
        match self.is_proper_kernel() {
            Err(Error::Resource { .. }) => self.is_proper_enumeration(),
            other => other,
        }
    }

    /// Errors with [`Error::Precondition`] unless the GAP is proper.
    pub fn require_proper(&self) -> Result<()> {
        if self.is_proper()? {
            Ok(())
        } else {
            Err(Error::Precondition(format!(
                "GAP is not proper: {}",
                self.to_json()
            )))
        }
    }
}

/// Draws generators, base point, and lengths uniformly (lengths from
/// `[min_len, max_len]`) until the relation check passes.
pub fn random_proper_gap(
    q: u64,
    s: usize,
    r: usize,
    (min_len, max_len): (u64, u64),
    seed: u64,
) -> Result<Gap> {
    if s == 0 || r == 0 {
        return Err(Error::InvalidArgument(
            "dimension and rank must be positive".into(),
        ));
    }
    if min_len < 2 || max_len > q || min_len > max_len {
        return Err(Error::InvalidArgument(format!(
            "length bounds [{min_len}, {max_len}] not within [2, {q}]"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..MAX_REJECTIONS {
        let base = (0..s).map(|_| rng.random_range(0..q)).collect();
        let generators = (0..r)
            .map(|_| (0..s).map(|_| rng.random_range(0..q)).collect())
            .collect();
        let lengths = (0..r)
            .map(|_| rng.random_range(min_len..=max_len))
            .collect();
        let gap = Gap::new(q, base, generators, lengths)?;
        if gap.is_proper_kernel()? {
            return Ok(gap);
        }
    }
    Err(Error::SamplingFailure {
        rejections: MAX_REJECTIONS,
    })
}

/// The nonzero residue vectors `z in Z_q^r` with `sum zi ai == 0`, reduced
/// to the data properness depends on: for each relation, the smallest
/// absolute value of an integer lift of every coordinate.
///
/// A length vector `H` is proper iff no relation has all lifts `< Hi`.
#[derive(Clone, Debug)]
pub struct RelationProfile {
    q: u64,
    minimal: Vec<Vec<u64>>,
}

impl RelationProfile {
    pub fn new(q: u64, generators: &[Vec<u64>]) -> Result<Self> {
        let r = generators.len();
        Error::guard(
            "relation profile",
            (q as u128).saturating_pow(r as u32),
            ENUMERATION_LIMIT,
        )?;
        let s = generators.first().map_or(0, Vec::len);
        let mut lifts: Vec<Vec<u64>> = Vec::new();
        let mut z = vec![0u64; r];
        let mut sum = vec![0u64; s];
        loop {
            let mut i = r;
            loop {
                if i == 0 {
                    return Ok(Self::from_lifts(q, lifts));
                }
                i -= 1;
                z[i] += 1;
                for (acc, &x) in sum.iter_mut().zip(&generators[i]) {
                    *acc = (*acc + x) % q;
                }
                if z[i] < q {
                    break;
                }
                z[i] = 0;
            }
            if sum.iter().all(|&x| x == 0) {
                lifts.push(z.iter().map(|&c| c.min(q - c)).collect());
            }
        }
    }

    fn from_lifts(q: u64, mut lifts: Vec<Vec<u64>>) -> Self {
        lifts.sort();
        lifts.dedup();
        // keep only componentwise-minimal relations
        let minimal = lifts
            .iter()
            .filter(|v| {
                !lifts
                    .iter()
                    .any(|w| w != *v && w.iter().zip(v.iter()).all(|(a, b)| a <= b))
            })
            .cloned()
            .collect();
        RelationProfile { q, minimal }
    }

    pub fn admits(&self, lengths: &[u64]) -> bool {
        !self
            .minimal
            .iter()
            .any(|m| m.iter().zip(lengths).all(|(&lift, &h)| lift < h))
    }

    /// Every proper length vector in `[2, q]^r`, lexicographic.
    pub fn proper_lengths(&self, r: usize) -> Vec<Vec<u64>> {
        let mut out = Vec::new();
        let mut h = vec![2u64; r];
        if self.q < 2 {
            return out;
        }
        loop {
            if self.admits(&h) {
                out.push(h.clone());
            }
            let mut i = r;
            loop {
                if i == 0 {
                    return out;
                }
                i -= 1;
                if h[i] < self.q {
                    h[i] += 1;
                    break;
                }
                h[i] = 2;
            }
        }
    }
}

/// Exhaustive generator families for `q`.
pub mod family {
    use super::*;

    /// Every tuple of `r` vectors in `Z_q^s`, lexicographic.
    pub fn all_generator_tuples(q: u64, s: usize, r: usize, nonzero: bool) -> Vec<Vec<Vec<u64>>> {
        let vectors: Vec<Vec<u64>> = all_vectors(q, s)
            .into_iter()
            .filter(|v| !nonzero || v.iter().any(|&x| x != 0))
            .collect();
        let mut out = vec![vec![]];
        for _ in 0..r {
            out = out
                .into_iter()
                .flat_map(|prefix: Vec<Vec<u64>>| {
                    vectors.iter().map(move |v| {
                        let mut t = prefix.clone();
                        t.push(v.clone());
                        t
                    })
                })
                .collect();
        }
        out
    }

    pub fn all_vectors(q: u64, s: usize) -> Vec<Vec<u64>> {
        let mut out = vec![vec![]];
        for _ in 0..s {
            out = out
                .into_iter()
                .flat_map(|prefix: Vec<u64>| {
                    (0..q).map(move |x| {
                        let mut v = prefix.clone();
                        v.push(x);
                        v
                    })
                })
                .collect();
        }
        out
    }

    /// One generator tuple per class under `y -> T y`, `T in GL_s(Z_q)`.
    ///
    /// Every quantity computed from a GAP's generators here (properness,
    /// solution counts, `|A^(b)|` summed over `b`) depends on the
    /// generators only through the group `{(a1.y, ..., ar.y) : y in Z_q^s}`.
    /// For `s = 1` the family is every tuple; for `s = 2` it is one tuple
    /// per subgroup of `Z_q^r` (`r <= 2`), read off the Hermite normal form
    /// of the subgroup's lattice.
    pub fn generator_classes(
        q: u64,
        s: usize,
        r: usize,
        nonzero: bool,
    ) -> Result<Vec<Vec<Vec<u64>>>> {
        match (s, r) {
            (1, _) => Ok(all_generator_tuples(q, 1, r, nonzero)),
            (2, 1) => Ok(divisors(q)
                .into_iter()
                .map(|g| vec![vec![g % q, 0]])
                .filter(|t| !nonzero || t[0][0] != 0)
                .collect()),
            (2, 2) => {
                let mut out = Vec::new();
                for alpha in divisors(q) {
                    for delta in divisors(q) {
                        for beta in 0..delta {
                            if !((q / alpha) * beta).is_multiple_of(delta) {
                                continue;
                            }
                            // rows (alpha, beta), (0, delta); columns are the generators
                            let a1 = vec![alpha % q, 0];
                            let a2 = vec![beta % q, delta % q];
                            let zero = |v: &Vec<u64>| v.iter().all(|&x| x == 0);
                            if nonzero && (zero(&a1) || zero(&a2)) {
                                continue;
                            }
                            out.push(vec![a1, a2]);
                        }
                    }
                }
                Ok(out)
            }
            _ => Err(Error::InvalidArgument(format!(
                "generator classes only for s = 1 or s = 2 with r <= 2 (got s = {s}, r = {r})"
            ))),
        }
    }

    /// The multiset `{(a1.y, ..., ar.y) : y in Z_q^s}` as a histogram over
    /// `Z_q^r`, indexed by `sum_i x_i q^(r-1-i)`.
    pub fn pairing_histogram(q: u64, generators: &[Vec<u64>]) -> Vec<u32> {
        let r = generators.len();
        let s = generators.first().map_or(0, Vec::len);
        let mut hist = vec![0u32; q.pow(r as u32) as usize];
        for y in all_vectors(q, s) {
            let idx = generators.iter().fold(0u64, |acc, a| {
                let dot = a
                    .iter()
                    .zip(&y)
                    .fold(0u64, |d, (&ai, &yi)| (d + ai * yi) % q);
                acc * q + dot
            });
            hist[idx as usize] += 1;
        }
        hist
    }
}

/// Outcome of comparing the two properness checks over a family.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AgreementStats {
    pub checked: u64,
    pub proper: u64,
    pub disagreements: u64,
    pub first_disagreement: Option<Gap>,
}

impl AgreementStats {
    pub fn merge(mut self, other: AgreementStats) -> Self {
        self.checked += other.checked;
        self.proper += other.proper;
        self.disagreements += other.disagreements;
        self.first_disagreement = self.first_disagreement.or(other.first_disagreement);
        self
    }
}

/// Runs both properness checks on every GAP with base point 0 whose
/// generators come from `generator_tuples` and whose lengths range over `[2, q]^r`.
pub fn properness_agreement(q: u64, generator_tuples: &[Vec<Vec<u64>>]) -> Result<AgreementStats> {
    let mut stats = AgreementStats::default();
    for gens in generator_tuples {
        let r = gens.len();
        let s = gens[0].len();
        let mut h = vec![2u64; r];
        'lengths: loop {
            let gap = Gap::new(q, vec![0; s], gens.clone(), h.clone())?;
            let by_enum = gap.is_proper_enumeration()?;
            let by_kernel = gap.is_proper_kernel()?;
            stats.checked += 1;
            stats.proper += by_enum as u64;
            if by_enum != by_kernel {
                stats.disagreements += 1;
                stats.first_disagreement.get_or_insert(gap);
            }
            let mut i = r;
            loop {
                if i == 0 {
                    break 'lengths;
                }
                i -= 1;
                if h[i] < q {
                    h[i] += 1;
                    break;
                }
                h[i] = 2;
            }
        }
    }
    Ok(stats)
}
