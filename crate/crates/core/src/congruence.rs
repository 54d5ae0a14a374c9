//! Counting solutions of `x_i == a_i . y (mod q)` with `x_i` in short
//! intervals, and the statement-level bound
//! `N << q^(s-r) prod (|I_i| + q / H_i)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gap::{family, Gap, RelationProfile, ENUMERATION_LIMIT};
use crate::modring::{self, gcd_ext};

/// The integers `[lo, lo + len)`, matched against residues mod `q`
/// (so the interval may wrap around).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BoxInterval {
    pub lo: i64,
    pub len: u64,
}

impl BoxInterval {
    pub fn new(lo: i64, len: u64) -> Self {
        BoxInterval { lo, len }
    }

    #[inline]
    pub fn contains_residue(&self, x: u64, q: u64) -> bool {
        self.len >= q || (x + q - modring::reduce(self.lo, q)) % q < self.len
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CongruenceInstance {
    q: u64,
    s: usize,
    generators: Vec<Vec<u64>>,
    intervals: Vec<BoxInterval>,
    lengths: Vec<u64>,
}

impl CongruenceInstance {
    /// Generators are reduced mod `q` and must be nonzero; every interval
    /// has `len <= q`, every length lies in `[2, q]`.
    pub fn new(
        q: u64,
        generators: Vec<Vec<u64>>,
        intervals: Vec<BoxInterval>,
        lengths: Vec<u64>,
    ) -> Result<Self> {
        if q < 2 {
            return Err(Error::InvalidArgument(format!("modulus {q} < 2")));
        }
        let r = generators.len();
        if r == 0 {
            return Err(Error::InvalidArgument("at least one congruence".into()));
        }
        if intervals.len() != r || lengths.len() != r {
            return Err(Error::DimensionMismatch {
                expected: r,
                found: if intervals.len() != r {
                    intervals.len()
                } else {
                    lengths.len()
                },
            });
        }
        let s = generators[0].len();
        if s == 0 {
            return Err(Error::InvalidArgument(
                "dimension must be at least 1".into(),
            ));
        }
        let generators: Vec<Vec<u64>> = generators
            .into_iter()
            .map(|g| g.into_iter().map(|x| x % q).collect())
            .collect();
        for g in &generators {
            if g.len() != s {
                return Err(Error::DimensionMismatch {
                    expected: s,
                    found: g.len(),
                });
            }
            if g.iter().all(|&x| x == 0) {
                return Err(Error::InvalidArgument("generators must be nonzero".into()));
            }
        }
        if let Some(iv) = intervals.iter().find(|iv| iv.len > q) {
            return Err(Error::InvalidArgument(format!(
                "interval length {} exceeds q = {q}",
                iv.len
            )));
        }
        if let Some(h) = lengths.iter().find(|&&h| h < 2 || h > q) {
            return Err(Error::InvalidArgument(format!(
                "length {h} outside [2, {q}]"
            )));
        }
        Ok(CongruenceInstance {
            q,
            s,
            generators,
            intervals,
            lengths,
        })
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

    pub fn generators(&self) -> &[Vec<u64>] {
        &self.generators
    }

    pub fn intervals(&self) -> &[BoxInterval] {
        &self.intervals
    }

    pub fn lengths(&self) -> &[u64] {
        &self.lengths
    }

    /// Whether `z1 a1 + ... + zr ar == 0` has no nonzero solution with `|zi| < Hi`.
    pub fn kernel_condition(&self) -> Result<bool> {
        Gap::new(
            self.q,
            vec![0; self.s],
            self.generators.clone(),
            self.lengths.clone(),
        )?
        .is_proper_kernel()
    }
}

/// `N` by brute force over `y in Z_q^s`.
pub fn count_solutions_exact(inst: &CongruenceInstance) -> Result<u64> {
    let q = inst.q;
    Error::guard(
        "solution count",
        (q as u128).saturating_pow(inst.s as u32),
        ENUMERATION_LIMIT,
    )?;
    if inst.intervals.iter().any(|iv| iv.len == 0) {
        return Ok(0);
    }
    let s = inst.s;
    let mut y = vec![0u64; s];
    let mut dots = vec![0u64; inst.rank()];
    let mut count = 0u64;
    loop {
        if dots
            .iter()
            .zip(&inst.intervals)
            .all(|(&x, iv)| iv.contains_residue(x, q))
        {
            count += 1;
        }
        let mut j = s;
        loop {
            if j == 0 {
                return Ok(count);
            }
            j -= 1;
            y[j] += 1;
            for (d, a) in dots.iter_mut().zip(&inst.generators) {
                *d = (*d + a[j]) % q;
            }
            if y[j] < q {
                break;
            }
            y[j] = 0;
        }
    }
}

/// `N` for `s = 1` by looping over `x1 in I1`, solving `a1 y == x1` with
/// the extended gcd, and testing the remaining congruences.
pub fn count_solutions_by_intervals(inst: &CongruenceInstance) -> Result<u64> {
    if inst.s != 1 {
        return Err(Error::InvalidArgument(
            "interval-side counting needs s = 1".into(),
        ));
    }
    let q = inst.q;
    let a1 = inst.generators[0][0];
    let (g, inv) = gcd_ext(a1, q);
    let step = q / g;
    // a1 y == x  <=>  y == (x / g) * (a1 / g)^-1  (mod q / g), when g | x.
    // `inv` satisfies a1 * inv == g (mod q), so (a1/g) * inv == 1 (mod q/g).
    let first = inst.intervals[0];
    let mut count = 0;
    for t in 0..first.len {
        let x1 = modring::reduce(first.lo + t as i64, q);
        if !x1.is_multiple_of(g) {
            continue;
        }
        let y0 = modring::mul_mod(x1 / g, inv % step, step);
        for k in 0..g {
            let y = y0 + k * step;
            let rest_ok = inst.generators[1..]
                .iter()
                .zip(&inst.intervals[1..])
                .all(|(a, iv)| iv.contains_residue(modring::mul_mod(a[0], y, q), q));
            if rest_ok {
                count += 1;
            }
        }
    }
    Ok(count)
}

fn bound_value(q: u64, s: usize, lens: &[u64], lengths: &[u64]) -> f64 {
    let r = lens.len() as i32;
    let qf = q as f64;
    qf.powi(s as i32 - r)
        * lens
            .iter()
            .zip(lengths)
            .map(|(&l, &h)| l as f64 + qf / h as f64)
            .product::<f64>()
}

/// `q^(s-r) prod (|I_i| + q / H_i)`, without the implied constant.
pub fn solution_bound(inst: &CongruenceInstance) -> Result<f64> {
    if !inst.kernel_condition()? {
        return Err(Error::Precondition(format!(
            "generators {:?} admit a short relation for lengths {:?}",
            inst.generators, inst.lengths
        )));
    }
    let lens: Vec<u64> = inst.intervals.iter().map(|iv| iv.len).collect();
    Ok(bound_value(inst.q, inst.s, &lens, &inst.lengths))
}

/// Solution counts for every box of intervals at once: the histogram of
/// `(a1.y, ..., ar.y)` over `y`, with wrap-around prefix sums.
#[derive(Clone, Debug)]
pub struct SolutionTable {
    q: u64,
    r: usize,
    side: usize,
    prefix: Vec<u64>,
}

impl SolutionTable {
    pub fn new(q: u64, generators: &[Vec<u64>]) -> Result<Self> {
        let r = generators.len();
        let s = generators.first().map_or(0, Vec::len);
        Error::guard(
            "solution table",
            (q as u128).saturating_pow((s + r) as u32),
            ENUMERATION_LIMIT * 10,
        )?;
        let hist = family::pairing_histogram(q, generators);
        // prefix[x] = sum of hist over the extended grid below x, side 2q + 1
        let side = 2 * q as usize + 1;
        let total = side.pow(r as u32);
        let mut prefix = vec![0u64; total];
        let qs = q as usize;
        for (idx, p) in prefix.iter_mut().enumerate() {
            let mut rem = idx;
            let mut src = 0usize;
            let mut any_zero = false;
            let mut coords = vec![0usize; r];
            for c in coords.iter_mut().rev() {
                *c = rem % side;
                rem /= side;
            }
            for &c in &coords {
                if c == 0 {
                    any_zero = true;
                }
                src = src * qs + (c + qs - 1) % qs;
            }
            if !any_zero {
                *p = hist[src] as u64;
            }
        }
        // cumulative sums along each axis
        let mut stride = 1usize;
        for _ in 0..r {
            for idx in 0..total {
                if !(idx / stride).is_multiple_of(side) {
                    prefix[idx] += prefix[idx - stride];
                }
            }
            stride *= side;
        }
        Ok(SolutionTable { q, r, side, prefix })
    }

    /// Number of `y` with every `a_i . y` in its interval.
    pub fn count(&self, intervals: &[BoxInterval]) -> u64 {
        debug_assert_eq!(intervals.len(), self.r);
        let q = self.q;
        let bounds: Vec<(usize, usize)> = intervals
            .iter()
            .map(|iv| {
                let lo = modring::reduce(iv.lo, q) as usize;
                (lo, lo + iv.len.min(q) as usize)
            })
            .collect();
        let mut total: i64 = 0;
        for corner in 0..(1usize << self.r) {
            let mut idx = 0usize;
            let mut sign = 1i64;
            for (i, &(lo, hi)) in bounds.iter().enumerate() {
                let c = if corner >> i & 1 == 1 {
                    sign = -sign;
                    lo
                } else {
                    hi
                };
                idx = idx * self.side + c;
            }
            total += sign * self.prefix[idx] as i64;
        }
        total as u64
    }
}

/// Interval lengths swept by the exhaustive family.
pub fn family_interval_lengths(q: u64) -> Vec<u64> {
    let mut lens = vec![1, q.div_ceil(4), q.div_ceil(2), q];
    lens.dedup();
    lens
}

/// The largest `N / bound` seen over a family, with its witness.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatioMaximum {
    pub ratio: f64,
    pub instances: u64,
    pub witness: Option<CongruenceInstance>,
}

impl RatioMaximum {
    pub fn empty() -> Self {
        RatioMaximum {
            ratio: 0.0,
            instances: 0,
            witness: None,
        }
    }

    pub fn merge(self, other: Self) -> Self {
        let instances = self.instances + other.instances;
        let mut best = if other.ratio > self.ratio {
            other
        } else {
            self
        };
        best.instances = instances;
        best
    }
}

/// Maximizes `N / solution_bound` over every instance built from the given
/// generator tuples, every interval with length in
/// [`family_interval_lengths`] and any start, and every length vector
/// satisfying the kernel condition.
pub fn ratio_maximum(q: u64, generator_tuples: &[Vec<Vec<u64>>]) -> Result<RatioMaximum> {
    let lens = family_interval_lengths(q);
    let mut best = RatioMaximum::empty();
    for gens in generator_tuples {
        let r = gens.len();
        let s = gens[0].len();
        let proper = RelationProfile::new(q, gens)?.proper_lengths(r);
        if proper.is_empty() {
            continue;
        }
        let table = SolutionTable::new(q, gens)?;
        let starts = (q as u128).pow(r as u32) as u64;
        for len_tuple in tuples_of(&lens, r) {
            // largest count over all interval starts
            let mut max_n = 0;
            let mut arg = vec![BoxInterval::new(0, 0); r];
            let mut ivs: Vec<BoxInterval> =
                len_tuple.iter().map(|&l| BoxInterval::new(0, l)).collect();
            for start in 0..starts {
                let mut rem = start;
                for iv in ivs.iter_mut().rev() {
                    iv.lo = (rem % q) as i64;
                    rem /= q;
                }
                let n = table.count(&ivs);
                if n > max_n {
                    max_n = n;
                    arg.clone_from(&ivs);
                }
            }
            best.instances += starts * proper.len() as u64;
            for h in &proper {
                let ratio = max_n as f64 / bound_value(q, s, &len_tuple, h);
                if ratio > best.ratio {
                    best.ratio = ratio;
                    best.witness = Some(CongruenceInstance::new(
                        q,
                        gens.clone(),
                        arg.clone(),
                        h.clone(),
                    )?);
                }
            }
        }
    }
    Ok(best)
}

fn tuples_of(values: &[u64], r: usize) -> Vec<Vec<u64>> {
    let mut out = vec![vec![]];
    for _ in 0..r {
        out = out
            .into_iter()
            .flat_map(|p: Vec<u64>| {
                values.iter().map(move |&v| {
                    let mut t = p.clone();
                    t.push(v);
                    t
                })
            })
            .collect();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gap::family::{all_generator_tuples, generator_classes};
    use proptest::prelude::*;

    fn inst1(q: u64, a: u64, lo: i64, len: u64, h: u64) -> CongruenceInstance {
        CongruenceInstance::new(q, vec![vec![a]], vec![BoxInterval::new(lo, len)], vec![h]).unwrap()
    }

    #[test]
    fn count_examples() {
        assert_eq!(count_solutions_exact(&inst1(5, 1, 0, 2, 5)).unwrap(), 2);
        assert_eq!(count_solutions_exact(&inst1(6, 2, 0, 6, 3)).unwrap(), 6);
        assert_eq!(count_solutions_exact(&inst1(6, 2, 0, 0, 3)).unwrap(), 0);
        let two = CongruenceInstance::new(
            7,
            vec![vec![1, 2], vec![3, 0]],
            vec![BoxInterval::new(2, 3), BoxInterval::new(0, 0)],
            vec![2, 2],
        )
        .unwrap();
        assert_eq!(count_solutions_exact(&two).unwrap(), 0);
    }

    #[test]
    fn bound_examples() {
        assert_eq!(solution_bound(&inst1(5, 1, 0, 2, 5)).unwrap(), 3.0);
        assert_eq!(solution_bound(&inst1(6, 2, 0, 6, 3)).unwrap(), 8.0);
        let full = CongruenceInstance::new(
            7,
            vec![vec![1, 0], vec![0, 1]],
            vec![BoxInterval::new(0, 7); 2],
            vec![7, 7],
        )
        .unwrap();
        assert_eq!(solution_bound(&full).unwrap(), 64.0);
        assert_eq!(count_solutions_exact(&full).unwrap(), 49);
    }

    #[test]
    fn bound_requires_kernel_condition() {
        // 2 * 2 == 0 mod 4 with |z| < 3
        let err = solution_bound(&inst1(4, 2, 0, 2, 3)).unwrap_err();
        assert!(matches!(err, Error::Precondition(_)));
    }

    #[test]
    fn construction_rules() {
        assert!(
            CongruenceInstance::new(5, vec![vec![5]], vec![BoxInterval::new(0, 1)], vec![2])
                .is_err()
        );
        assert!(
            CongruenceInstance::new(5, vec![vec![1]], vec![BoxInterval::new(0, 6)], vec![2])
                .is_err()
        );
        assert!(
            CongruenceInstance::new(5, vec![vec![1]], vec![BoxInterval::new(0, 1)], vec![1])
                .is_err()
        );
        assert!(CongruenceInstance::new(5, vec![vec![1]], vec![], vec![2]).is_err());
        assert!(count_solutions_by_intervals(
            &CongruenceInstance::new(5, vec![vec![1, 1]], vec![BoxInterval::new(0, 1)], vec![2])
                .unwrap()
        )
        .is_err());
    }

    #[test]
    fn wrapping_intervals() {
        let iv = BoxInterval::new(-2, 3);
        let members: Vec<u64> = (0..7).filter(|&x| iv.contains_residue(x, 7)).collect();
        assert_eq!(members, vec![0, 5, 6]);
        assert!(BoxInterval::new(3, 7).contains_residue(2, 7));
        assert!(!BoxInterval::new(3, 0).contains_residue(3, 7));
    }

    #[test]
    fn two_counters_agree_rank_one() {
        for q in 2..=30u64 {
            for a in 1..q {
                for lo in 0..q as i64 {
                    for len in 0..=q {
                        let inst = inst1(q, a, lo, len, 2);
                        assert_eq!(
                            count_solutions_exact(&inst).unwrap(),
                            count_solutions_by_intervals(&inst).unwrap(),
                            "q={q} a={a} lo={lo} len={len}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn two_counters_agree_rank_two() {
        for q in 2..=12u64 {
            for gens in all_generator_tuples(q, 1, 2, true) {
                for lens in tuples_of(&family_interval_lengths(q), 2) {
                    for lo in [0i64, 1, q as i64 - 1] {
                        let ivs = vec![
                            BoxInterval::new(lo, lens[0]),
                            BoxInterval::new(2 * lo, lens[1]),
                        ];
                        let inst =
                            CongruenceInstance::new(q, gens.clone(), ivs, vec![2, 2]).unwrap();
                        assert_eq!(
                            count_solutions_exact(&inst).unwrap(),
                            count_solutions_by_intervals(&inst).unwrap()
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn solution_table_matches_brute_force() {
        for q in 2..=9u64 {
            for (s, r) in [(1, 1), (1, 2), (2, 1), (2, 2), (1, 3)] {
                let tuples = all_generator_tuples(q, s, r, true);
                for gens in tuples.iter().step_by(5) {
                    let table = SolutionTable::new(q, gens).unwrap();
                    for lo in 0..q as i64 {
                        for len in family_interval_lengths(q) {
                            let ivs: Vec<BoxInterval> = (0..r)
                                .map(|i| {
                                    BoxInterval::new(
                                        lo + i as i64,
                                        if i == 0 { len } else { q - len / 2 },
                                    )
                                })
                                .collect();
                            let inst =
                                CongruenceInstance::new(q, gens.clone(), ivs.clone(), vec![2; r])
                                    .unwrap();
                            assert_eq!(table.count(&ivs), count_solutions_exact(&inst).unwrap());
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn class_reduction_preserves_family_maximum() {
        for q in 2..=7u64 {
            let full = ratio_maximum(q, &all_generator_tuples(q, 2, 2, true)).unwrap();
            let reduced = ratio_maximum(q, &generator_classes(q, 2, 2, true).unwrap()).unwrap();
            assert!((full.ratio - reduced.ratio).abs() < 1e-12, "q={q}");
        }
    }

    #[test]
    fn witness_reproduces_ratio() {
        let best = ratio_maximum(11, &generator_classes(11, 2, 2, true).unwrap()).unwrap();
        let w = best.witness.unwrap();
        let n = count_solutions_exact(&w).unwrap() as f64;
        assert!((n / solution_bound(&w).unwrap() - best.ratio).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn enlarging_an_interval_never_decreases_count(
            q in 2u64..=15,
            a in proptest::collection::vec(1u64..15, 2),
            lo in proptest::collection::vec(-20i64..20, 2),
            len in proptest::collection::vec(0u64..15, 2),
            grow in 0u64..15,
            which in 0usize..2,
        ) {
            let gens: Vec<Vec<u64>> = a.iter().map(|&x| vec![x % q]).collect();
            prop_assume!(gens.iter().all(|g| g[0] != 0));
            let ivs: Vec<BoxInterval> = lo.iter().zip(&len).map(|(&l, &n)| BoxInterval::new(l, n.min(q))).collect();
            let base = CongruenceInstance::new(q, gens.clone(), ivs.clone(), vec![2, 2]).unwrap();
            let mut bigger = ivs;
            bigger[which].len = (bigger[which].len + grow).min(q);
            let grown = CongruenceInstance::new(q, gens, bigger, vec![2, 2]).unwrap();
            prop_assert!(count_solutions_exact(&grown).unwrap() >= count_solutions_exact(&base).unwrap());
        }
    }
}
