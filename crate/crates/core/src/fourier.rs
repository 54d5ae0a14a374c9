//! Fourier coefficients `A^(b) = sum_{a in A} e_q(a . b)` of GAP indicator
//! functions, their l1 norm, and the bound `||A^||_1 << q^s prod log H_i`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gap::{Gap, RelationProfile, ENUMERATION_LIMIT};
use crate::modring::{self, eq_root, geometric_amplitude, geometric_sum, ComplexValue};

fn check_frequency(g: &Gap, b: &[u64]) -> Result<()> {
    if b.len() != g.dimension() {
        return Err(Error::DimensionMismatch {
            expected: g.dimension(),
            found: b.len(),
        });
    }
    Ok(())
}

fn dot(q: u64, a: &[u64], b: &[u64]) -> u64 {
    a.iter()
        .zip(b)
        .fold(0, |acc, (&x, &y)| (acc + modring::mul_mod(x, y % q, q)) % q)
}

/// `e_q(a0 . b) prod_i sum_{h < H_i} e_q(h (b . a_i))`.
pub fn gap_fourier_coefficient(g: &Gap, b: &[u64]) -> Result<ComplexValue> {
    check_frequency(g, b)?;
    let q = g.q();
    let mut value = eq_root(q, dot(q, g.base(), b) as i64);
    for (a, &h) in g.generators().iter().zip(g.lengths()) {
        value *= geometric_sum(q, dot(q, a, b) as i64, h);
    }
    Ok(value)
}

/// The same coefficient summed element by element (as a multiset).
pub fn gap_fourier_coefficient_direct(g: &Gap, b: &[u64]) -> Result<ComplexValue> {
    check_frequency(g, b)?;
    let q = g.q();
    let mut total = ComplexValue::new(0.0, 0.0);
    g.try_for_each_element(|x| {
        total += eq_root(q, dot(q, x, b) as i64);
        true
    })?;
    Ok(total)
}

/// l1 norm, sup norm and energy `sum |A^(b)|^2` over all frequencies.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FourierProfile {
    gap: Gap,
    pub l1: f64,
    pub linf: f64,
    pub energy: f64,
}

#[derive(Clone, Copy, Default)]
struct Partial {
    l1: f64,
    linf: f64,
    energy: f64,
}

fn amplitude_table(q: u64, h: u64) -> Vec<f64> {
    (0..q)
        .map(|c| geometric_amplitude(q, c as i64, h).abs())
        .collect()
}

/// Sums over `b` with the first coordinate fixed, `b = (b0, *)`.
fn slice_partial(q: u64, generators: &[Vec<u64>], tables: &[&[f64]], b0: u64) -> Partial {
    let s = generators[0].len();
    let mut dots: Vec<u64> = generators.iter().map(|a| a[0] * b0 % q).collect();
    let mut tail = vec![0u64; s - 1];
    let mut acc = Partial::default();
    loop {
        let m: f64 = dots
            .iter()
            .zip(tables)
            .map(|(&d, t)| t[d as usize])
            .product();
        acc.l1 += m;
        acc.energy += m * m;
        acc.linf = acc.linf.max(m);
        let mut j = tail.len();
        loop {
            if j == 0 {
                return acc;
            }
            j -= 1;
            tail[j] += 1;
            for (d, a) in dots.iter_mut().zip(generators) {
                *d = (*d + a[j + 1]) % q;
            }
            if tail[j] < q {
                break;
            }
            tail[j] = 0;
        }
    }
}

fn profile_sums(q: u64, generators: &[Vec<u64>], tables: &[&[f64]]) -> Result<Partial> {
    let s = generators[0].len();
    Error::guard(
        "Fourier l1 norm",
        (q as u128).saturating_pow(s as u32),
        ENUMERATION_LIMIT,
    )?;
    let slices: Vec<Partial> = if (q as u128).pow(s as u32) >= 1 << 16 {
        (0..q)
            .into_par_iter()
            .map(|b0| slice_partial(q, generators, tables, b0))
            .collect()
    } else {
        (0..q)
            .map(|b0| slice_partial(q, generators, tables, b0))
            .collect()
    };
    // ordered reduction keeps the result independent of scheduling
    Ok(slices.into_iter().fold(Partial::default(), |a, p| Partial {
        l1: a.l1 + p.l1,
        linf: a.linf.max(p.linf),
        energy: a.energy + p.energy,
    }))
}

impl FourierProfile {
    pub fn new(gap: &Gap) -> Result<Self> {
        let q = gap.q();
        let tables: Vec<Vec<f64>> = gap
            .lengths()
            .iter()
            .map(|&h| amplitude_table(q, h))
            .collect();
        let refs: Vec<&[f64]> = tables.iter().map(Vec::as_slice).collect();
        let p = profile_sums(q, gap.generators(), &refs)?;
        Ok(FourierProfile {
            gap: gap.clone(),
            l1: p.l1,
            linf: p.linf,
            energy: p.energy,
        })
    }

    pub fn gap(&self) -> &Gap {
        &self.gap
    }

    pub fn coefficient(&self, b: &[u64]) -> Result<ComplexValue> {
        gap_fourier_coefficient(&self.gap, b)
    }
}

/// `sum_b |A^(b)|` through the closed form.
pub fn l1_norm(g: &Gap) -> Result<f64> {
    Ok(FourierProfile::new(g)?.l1)
}

/// `q^s prod ln H_i`, without the implied constant; `G` must be proper.
pub fn l1_bound(g: &Gap) -> Result<f64> {
    g.require_proper()?;
    Ok(l1_shape(g.q(), g.dimension(), g.lengths()))
}

fn l1_shape(q: u64, s: usize, lengths: &[u64]) -> f64 {
    (q as f64).powi(s as i32) * lengths.iter().map(|&h| (h as f64).ln()).product::<f64>()
}

/// Summary of the l1 checks over a family of proper GAPs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct L1FamilyStats {
    pub checked: u64,
    /// Largest `l1_norm / l1_bound`.
    pub max_ratio: f64,
    pub witness: Option<Gap>,
    /// Largest `|energy - q^s |A|| / (q^s |A|)`.
    pub max_parseval_error: f64,
    /// Smallest `l1_norm / q^s`; at least 1 for nonempty sets.
    pub min_floor_ratio: f64,
    /// Largest `linf / |A|`; at most 1 (plus rounding).
    pub max_linf_ratio: f64,
}

impl L1FamilyStats {
    pub fn empty() -> Self {
        L1FamilyStats {
            checked: 0,
            max_ratio: 0.0,
            witness: None,
            max_parseval_error: 0.0,
            min_floor_ratio: f64::INFINITY,
            max_linf_ratio: 0.0,
        }
    }

    pub fn merge(self, other: Self) -> Self {
        let (mut best, rest) = if other.max_ratio > self.max_ratio {
            (other, self)
        } else {
            (self, other)
        };
        best.checked += rest.checked;
        best.max_parseval_error = best.max_parseval_error.max(rest.max_parseval_error);
        best.min_floor_ratio = best.min_floor_ratio.min(rest.min_floor_ratio);
        best.max_linf_ratio = best.max_linf_ratio.max(rest.max_linf_ratio);
        best
    }
}

/// Profiles every proper GAP (base 0) built from the given generator tuples
/// and any lengths in `[2, q]`.
pub fn l1_family_stats(q: u64, generator_tuples: &[Vec<Vec<u64>>]) -> Result<L1FamilyStats> {
    let tables: Vec<Vec<f64>> = (0..=q).map(|h| amplitude_table(q, h)).collect();
    let mut stats = L1FamilyStats::empty();
    for gens in generator_tuples {
        let r = gens.len();
        let s = gens[0].len();
        let qs = (q as f64).powi(s as i32);
        for h in RelationProfile::new(q, gens)?.proper_lengths(r) {
            let refs: Vec<&[f64]> = h.iter().map(|&x| tables[x as usize].as_slice()).collect();
            let p = profile_sums(q, gens, &refs)?;
            let volume: f64 = h.iter().map(|&x| x as f64).product();
            stats.checked += 1;
            stats.max_parseval_error = stats
                .max_parseval_error
                .max((p.energy - qs * volume).abs() / (qs * volume));
            stats.min_floor_ratio = stats.min_floor_ratio.min(p.l1 / qs);
            stats.max_linf_ratio = stats.max_linf_ratio.max(p.linf / volume);
            let ratio = p.l1 / l1_shape(q, s, &h);
            if ratio > stats.max_ratio {
                stats.max_ratio = ratio;
                stats.witness = Some(Gap::new(q, vec![0; s], gens.clone(), h)?);
            }
        }
    }
    Ok(stats)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gap::family::{all_generator_tuples, generator_classes};
    use crate::gap::random_proper_gap;
    use proptest::prelude::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn coefficient_examples() {
        let g = Gap::one_dim(5, 0, &[1], &[3]).unwrap();
        assert!(close(
            gap_fourier_coefficient(&g, &[0]).unwrap().re,
            3.0,
            1e-12
        ));
        assert!(close(
            gap_fourier_coefficient(&g, &[1]).unwrap().norm(),
            1.618_033_988_7,
            1e-9
        ));
        let line = Gap::one_dim(9, 4, &[1], &[9]).unwrap();
        for b in 1..9 {
            assert!(gap_fourier_coefficient(&line, &[b]).unwrap().norm() < 1e-12);
        }
        assert!(matches!(
            gap_fourier_coefficient(&g, &[1, 2]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn l1_examples() {
        let g = Gap::one_dim(5, 0, &[1], &[3]).unwrap();
        let expect = 3.0 + 2.0 * 1.618_033_988_7 + 2.0 * 0.618_033_988_7;
        assert!(close(l1_norm(&g).unwrap(), expect, 1e-8));
        assert!(close(l1_norm(&g).unwrap(), 7.472_135_9, 1e-7));
        for base in 0..5 {
            let shifted = g.with_base(vec![base]).unwrap();
            assert!(close(
                l1_norm(&shifted).unwrap(),
                l1_norm(&g).unwrap(),
                1e-12
            ));
        }
        let line = Gap::one_dim(13, 0, &[5], &[13]).unwrap();
        assert!(close(l1_norm(&line).unwrap(), 13.0, 1e-9));
    }

    #[test]
    fn bound_examples() {
        let g = Gap::one_dim(5, 0, &[1], &[3]).unwrap();
        assert!(close(l1_bound(&g).unwrap(), 5.0 * 3f64.ln(), 1e-12));
        assert!(close(l1_bound(&g).unwrap(), 5.493, 1e-3));
        let g = Gap::one_dim(10, 0, &[1, 3], &[3, 3]).unwrap();
        assert!(close(l1_bound(&g).unwrap(), 12.069, 1e-3));
        let g = Gap::new(7, vec![0, 0], vec![vec![1, 2]], vec![2]).unwrap();
        assert!(close(l1_bound(&g).unwrap(), 33.97, 1e-2));
        let improper = Gap::one_dim(6, 0, &[3], &[3]).unwrap();
        assert!(matches!(l1_bound(&improper), Err(Error::Precondition(_))));
    }

    #[test]
    fn guard_applies() {
        let g = Gap::new(100, vec![0; 4], vec![vec![1, 0, 0, 0]], vec![2]).unwrap();
        assert!(matches!(l1_norm(&g), Err(Error::Resource { .. })));
    }

    #[test]
    fn closed_form_matches_direct_sum() {
        // every proper GAP for small q, sampled ones up to q = 50
        for q in 2..=9u64 {
            for (s, r) in [(1, 1), (1, 2), (2, 1), (2, 2)] {
                for gens in all_generator_tuples(q, s, r, true).iter().step_by(3) {
                    for h in RelationProfile::new(q, gens)
                        .unwrap()
                        .proper_lengths(r)
                        .iter()
                        .step_by(4)
                    {
                        let g = Gap::new(q, vec![1; s], gens.clone(), h.clone()).unwrap();
                        for b in crate::gap::family::all_vectors(q, s) {
                            let a = gap_fourier_coefficient(&g, &b).unwrap();
                            let d = gap_fourier_coefficient_direct(&g, &b).unwrap();
                            assert!((a - d).norm() <= 1e-8, "{g:?} b={b:?}");
                        }
                    }
                }
            }
        }
        for (i, q) in [31u64, 37, 44, 50].into_iter().enumerate() {
            for s in 1..=2 {
                for r in 1..=2 {
                    let g = random_proper_gap(q, s, r, (2, 6), 100 + i as u64).unwrap();
                    for b in crate::gap::family::all_vectors(q, s) {
                        let a = gap_fourier_coefficient(&g, &b).unwrap();
                        let d = gap_fourier_coefficient_direct(&g, &b).unwrap();
                        assert!((a - d).norm() <= 1e-8);
                    }
                }
            }
        }
    }

    #[test]
    fn profile_matches_naive_l1() {
        for seed in 0..10 {
            let g = random_proper_gap(23, 2, 2, (2, 10), seed).unwrap();
            let p = FourierProfile::new(&g).unwrap();
            let naive: f64 = crate::gap::family::all_vectors(23, 2)
                .iter()
                .map(|b| gap_fourier_coefficient_direct(&g, b).unwrap().norm())
                .sum();
            assert!(close(p.l1, naive, 1e-7));
            assert!(close(p.linf, g.volume() as f64, 1e-9));
            assert!(close(p.energy / (529.0 * g.volume() as f64), 1.0, 1e-9));
        }
    }

    #[test]
    fn class_reduction_preserves_family_stats() {
        for q in 2..=8u64 {
            let full = l1_family_stats(q, &all_generator_tuples(q, 2, 2, true)).unwrap();
            let reduced = l1_family_stats(q, &generator_classes(q, 2, 2, true).unwrap()).unwrap();
            assert!(close(full.max_ratio, reduced.max_ratio, 1e-9), "q={q}");
            assert!(close(full.min_floor_ratio, reduced.min_floor_ratio, 1e-9));
        }
    }

    #[test]
    fn family_stats_small() {
        let stats = l1_family_stats(11, &generator_classes(11, 1, 2, true).unwrap()).unwrap();
        assert!(stats.checked > 0);
        assert!(stats.max_parseval_error < 1e-9);
        assert!(stats.min_floor_ratio >= 1.0 - 1e-9);
        assert!(stats.max_linf_ratio <= 1.0 + 1e-9);
        let w = stats.witness.unwrap();
        assert!(close(
            l1_norm(&w).unwrap() / l1_bound(&w).unwrap(),
            stats.max_ratio,
            1e-12
        ));
    }

    proptest! {
        #[test]
        fn parseval_and_floor(
            q in 2u64..40,
            s in 1usize..=2,
            r in 1usize..=2,
            seed in 0u64..1000,
        ) {
            if let Ok(g) = random_proper_gap(q, s, r, (2, q.min(8)), seed) {
                let p = FourierProfile::new(&g).unwrap();
                let qs = (q as f64).powi(s as i32);
                let vol = g.volume() as f64;
                prop_assert!((p.energy - qs * vol).abs() <= 1e-6 * qs * vol);
                prop_assert!(p.l1 >= qs * (1.0 - 1e-12));
                prop_assert!(p.linf <= vol + 1e-9);
                let zero = vec![0; s];
                prop_assert!((g.volume() as f64 - p.coefficient(&zero).unwrap().re).abs() < 1e-9);
            }
        }
    }
}
