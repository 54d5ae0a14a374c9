//! Dirichlet characters modulo `q`.
//!
//! A character is stored by its exponents on the generators of the unit
//! group: `chi(g_j) = e(k_j / ord(g_j))`. Discrete logarithms are tabulated
//! once per modulus, so evaluating at a point is a handful of table lookups.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::modring::{self, unit_group, ComplexValue, Modulus, RootTable, UnitGroupStructure};

/// Largest modulus for which discrete-log tables are built.
pub const MAX_CHARACTER_MODULUS: u64 = 1_000_000;

const NOT_A_UNIT: u32 = u32::MAX;

/// Discrete logarithms on one prime-power component. For each residue the
/// table holds a packed index into the component's generator exponents.
#[derive(Debug)]
struct ComponentLog {
    modulus: u64,
    /// Offsets of this component's generators in the flat exponent vector.
    first_generator: usize,
    orders: Vec<u64>,
    table: Vec<u32>,
}

impl ComponentLog {
    fn build(component: &modring::UnitComponent, first_generator: usize) -> Self {
        let m = component.modulus;
        let mut table = vec![NOT_A_UNIT; m as usize];
        let orders: Vec<u64> = component.generators.iter().map(|g| g.order).collect();
        match component.generators.as_slice() {
            [] => table[1 % m as usize] = 0,
            [g] => {
                let mut x = 1u64;
                for k in 0..g.order {
                    table[x as usize] = k as u32;
                    x = modring::mul_mod(x, g.value, m);
                }
            }
            [minus_one, five] => {
                // packed index: sign * ord(5) + k  for  (-1)^sign * 5^k
                let mut x = 1u64;
                for k in 0..five.order {
                    table[x as usize] = k as u32;
                    let neg = modring::mul_mod(x, minus_one.value, m);
                    table[neg as usize] = (five.order + k) as u32;
                    x = modring::mul_mod(x, five.value, m);
                }
            }
            _ => unreachable!("at most two generators per component"),
        }
        ComponentLog {
            modulus: m,
            first_generator,
            orders,
            table,
        }
    }

    /// Logs of `n` with respect to this component's generators.
    #[inline]
    fn logs(&self, n: u64) -> Option<(u64, u64)> {
        let packed = self.table[(n % self.modulus) as usize];
        if packed == NOT_A_UNIT {
            return None;
        }
        let packed = packed as u64;
        Some(match self.orders.as_slice() {
            [_, five] => (packed / five, packed % five),
            _ => (packed, 0),
        })
    }
}

/// The group of Dirichlet characters mod `q`, holding the shared tables.
#[derive(Debug)]
pub struct CharacterGroup {
    modulus: Modulus,
    units: UnitGroupStructure,
    orders: Vec<u64>,
    /// `phi / ord(g_j)`: weight turning an exponent into a numerator over phi.
    weights: Vec<u64>,
    logs: Vec<ComponentLog>,
}

impl CharacterGroup {
    pub fn new(q: &Modulus) -> Result<Arc<Self>> {
        Error::guard(
            "character tables",
            q.value() as u128,
            MAX_CHARACTER_MODULUS as u128,
        )?;
        let units = unit_group(q);
        let orders = units.orders();
        let phi = q.phi();
        let weights = orders.iter().map(|o| phi / o).collect();
        let mut logs = Vec::with_capacity(units.components.len());
        let mut offset = 0;
        for comp in &units.components {
            logs.push(ComponentLog::build(comp, offset));
            offset += comp.generators.len();
        }
        Ok(Arc::new(CharacterGroup {
            modulus: q.clone(),
            units,
            orders,
            weights,
            logs,
        }))
    }

    pub fn for_modulus(q: u64) -> Result<Arc<Self>> {
        Self::new(&Modulus::new(q)?)
    }

    pub fn modulus(&self) -> &Modulus {
        &self.modulus
    }

    pub fn unit_group(&self) -> &UnitGroupStructure {
        &self.units
    }

    /// Orders of the generators, i.e. the radix of the exponent vectors.
    pub fn orders(&self) -> &[u64] {
        &self.orders
    }

    /// The character with the given exponent vector.
    pub fn character(self: &Arc<Self>, exponents: Vec<u64>) -> Result<DirichletCharacter> {
        if exponents.len() != self.orders.len() {
            return Err(Error::DimensionMismatch {
                expected: self.orders.len(),
                found: exponents.len(),
            });
        }
        if let Some((k, o)) = exponents.iter().zip(&self.orders).find(|(k, o)| **k >= **o) {
            return Err(Error::InvalidArgument(format!(
                "exponent {k} out of range for generator of order {o}"
            )));
        }
        let conductor = self.conductor_of(&exponents);
        Ok(DirichletCharacter {
            group: Arc::clone(self),
            exponents,
            conductor,
        })
    }

    /// All `phi(q)` characters, lexicographic in the exponent vector, the
    /// principal character first.
    pub fn characters(self: &Arc<Self>) -> Vec<DirichletCharacter> {
        let mut out = Vec::with_capacity(self.modulus.phi() as usize);
        let mut exps = vec![0u64; self.orders.len()];
        loop {
            out.push(
                self.character(exps.clone())
                    .expect("odometer stays in range"),
            );
            // increment, last coordinate fastest
            let mut i = exps.len();
            loop {
                if i == 0 {
                    return out;
                }
                i -= 1;
                exps[i] += 1;
                if exps[i] < self.orders[i] {
                    break;
                }
                exps[i] = 0;
            }
        }
    }

    fn conductor_of(&self, exponents: &[u64]) -> u64 {
        let mut conductor = 1u64;
        for (comp, log) in self.units.components.iter().zip(&self.logs) {
            let exps = &exponents[log.first_generator..log.first_generator + comp.generators.len()];
            let p = comp.prime;
            let e = comp.exponent;
            let f = match (p, exps) {
                (_, []) => 0,
                (2, [sign]) => {
                    if *sign == 0 {
                        0
                    } else {
                        2
                    }
                }
                (2, [sign, k]) => {
                    if *k == 0 {
                        if *sign == 0 {
                            0
                        } else {
                            2
                        }
                    } else {
                        e - k.trailing_zeros()
                    }
                }
                (_, [k]) => {
                    if *k == 0 {
                        0
                    } else {
                        let mut v = 0;
                        let mut k = *k;
                        while k % p == 0 && v < e - 1 {
                            k /= p;
                            v += 1;
                        }
                        e - v
                    }
                }
                _ => unreachable!(),
            };
            conductor *= p.pow(f);
        }
        conductor
    }
}

/// Serialized form of a character: `{q, exponents, conductor}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CharacterRecord {
    pub q: u64,
    pub exponents: Vec<u64>,
    pub conductor: u64,
}

#[derive(Clone)]
pub struct DirichletCharacter {
    group: Arc<CharacterGroup>,
    exponents: Vec<u64>,
    conductor: u64,
}

impl fmt::Debug for DirichletCharacter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DirichletCharacter")
            .field("q", &self.modulus())
            .field("exponents", &self.exponents)
            .field("conductor", &self.conductor)
            .finish()
    }
}

impl PartialEq for DirichletCharacter {
    fn eq(&self, other: &Self) -> bool {
        self.modulus() == other.modulus() && self.exponents == other.exponents
    }
}

impl Eq for DirichletCharacter {}

impl fmt::Display for DirichletCharacter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "chi[q={};e=", self.modulus())?;
        for (i, k) in self.exponents.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{k}")?;
        }
        f.write_str("]")
    }
}

/// Every character mod `q`; see [`CharacterGroup::characters`].
pub fn enumerate_characters(q: &Modulus) -> Result<Vec<DirichletCharacter>> {
    Ok(CharacterGroup::new(q)?.characters())
}

/// The primitive characters mod `q`, in enumeration order.
pub fn primitive_characters(q: &Modulus) -> Result<Vec<DirichletCharacter>> {
    Ok(enumerate_characters(q)?
        .into_iter()
        .filter(DirichletCharacter::is_primitive)
        .collect())
}

impl DirichletCharacter {
    /// The Legendre symbol `(n / p)` as a character mod an odd prime `p`.
    pub fn legendre(p: u64) -> Result<Self> {
        if p == 2 || !modring::is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        let group = CharacterGroup::for_modulus(p)?;
        group.character(vec![(p - 1) / 2])
    }

    pub fn from_record(record: &CharacterRecord) -> Result<Self> {
        let chi = CharacterGroup::for_modulus(record.q)?.character(record.exponents.clone())?;
        if chi.conductor != record.conductor {
            return Err(Error::InvalidArgument(format!(
                "recorded conductor {} does not match computed {}",
                record.conductor, chi.conductor
            )));
        }
        Ok(chi)
    }

    pub fn record(&self) -> CharacterRecord {
        CharacterRecord {
            q: self.modulus(),
            exponents: self.exponents.clone(),
            conductor: self.conductor,
        }
    }

    pub fn group(&self) -> &Arc<CharacterGroup> {
        &self.group
    }

    pub fn modulus(&self) -> u64 {
        self.group.modulus.value()
    }

    pub fn exponents(&self) -> &[u64] {
        &self.exponents
    }

    pub fn conductor(&self) -> u64 {
        self.conductor
    }

    pub fn is_primitive(&self) -> bool {
        self.conductor == self.modulus()
    }

    pub fn is_principal(&self) -> bool {
        self.exponents.iter().all(|&k| k == 0)
    }

    /// `chi(-1) = 1`.
    pub fn is_even(&self) -> bool {
        let q = self.modulus();
        self.index((q - 1) as i64).is_none_or(|k| k == 0)
    }

    pub fn conjugate(&self) -> Self {
        let exponents = self
            .exponents
            .iter()
            .zip(&self.group.orders)
            .map(|(&k, &o)| (o - k) % o)
            .collect();
        DirichletCharacter {
            group: Arc::clone(&self.group),
            exponents,
            conductor: self.conductor,
        }
    }

    /// `k` such that `chi(n) = e(k / phi(q))`, or `None` when `gcd(n, q) > 1`.
    pub fn index(&self, n: i64) -> Option<u64> {
        let q = self.modulus();
        let n = modring::reduce(n, q);
        let phi = self.group.modulus.phi();
        let mut k = 0u64;
        for log in &self.group.logs {
            let (a, b) = log.logs(n)?;
            let j = log.first_generator;
            match log.orders.len() {
                0 => {}
                1 => {
                    k += modring::mul_mod(self.exponents[j], a, phi) * self.group.weights[j] % phi;
                }
                _ => {
                    k += modring::mul_mod(self.exponents[j], a, phi) * self.group.weights[j] % phi;
                    k += modring::mul_mod(self.exponents[j + 1], b, phi)
                        * self.group.weights[j + 1]
                        % phi;
                }
            }
            k %= phi;
        }
        Some(k)
    }

    pub fn evaluate(&self, n: i64) -> ComplexValue {
        match self.index(n) {
            None => Complex64::new(0.0, 0.0),
            Some(k) => {
                let phi = self.group.modulus.phi();
                Complex64::from_polar(1.0, 2.0 * PI * k as f64 / phi as f64)
            }
        }
    }

    /// `chi(n)` for every `n` in `[0, q)`.
    pub fn values(&self) -> Vec<ComplexValue> {
        let q = self.modulus();
        let roots = RootTable::new(self.group.modulus.phi());
        (0..q)
            .map(|n| {
                self.index(n as i64)
                    .map_or(Complex64::new(0.0, 0.0), |k| roots.get(k))
            })
            .collect()
    }
}

/// A Gauss sum `tau(chi) = sum_a chi(a) e_q(a)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GaussSumValue {
    pub value: ComplexValue,
}

impl GaussSumValue {
    pub fn magnitude(&self) -> f64 {
        self.value.norm()
    }
}

pub fn gauss_sum(chi: &DirichletCharacter) -> GaussSumValue {
    GaussSumValue {
        value: char_fourier(chi, 1),
    }
}

/// `sum_{a mod q} chi(a) e_q(a b)`, summed directly.
pub fn char_fourier(chi: &DirichletCharacter, b: i64) -> ComplexValue {
    let q = chi.modulus();
    let b = modring::reduce(b, q);
    let roots = RootTable::new(q);
    chi.values()
        .iter()
        .enumerate()
        .map(|(a, v)| v * roots.get(modring::mul_mod(a as u64, b, q)))
        .sum()
}

/// `tau(chi) * conj(chi(b))`, the closed form of [`char_fourier`] for
/// primitive `chi`.
pub fn gauss_identity(chi: &DirichletCharacter, b: i64) -> ComplexValue {
    gauss_sum(chi).value * chi.evaluate(b).conj()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modring::{divisors, euler_phi, factorize, gcd, mobius};

    fn chars(q: u64) -> Vec<DirichletCharacter> {
        enumerate_characters(&factorize(q).unwrap()).unwrap()
    }

    fn close(a: ComplexValue, b: ComplexValue, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn enumeration_counts() {
        assert_eq!(chars(5).len(), 4);
        assert_eq!(chars(8).len(), 4);
        let twelve = chars(12);
        assert_eq!(twelve.len(), 4);
        let prim: Vec<_> = twelve.iter().filter(|c| c.is_primitive()).collect();
        assert_eq!(prim.len(), 1);
        assert_eq!(prim[0].conductor(), 12);
        let mut conductors: Vec<u64> = twelve.iter().map(|c| c.conductor()).collect();
        conductors.sort();
        assert_eq!(conductors, vec![1, 3, 4, 12]);
    }

    #[test]
    fn enumeration_is_lexicographic_and_distinct() {
        for q in 1..=60 {
            let cs = chars(q);
            assert_eq!(cs.len() as u64, euler_phi(q));
            assert!(cs[0].is_principal());
            for w in cs.windows(2) {
                assert!(w[0].exponents() < w[1].exponents());
            }
            // distinct as functions
            let tables: Vec<Vec<Option<u64>>> = cs
                .iter()
                .map(|c| (0..q as i64).map(|n| c.index(n)).collect())
                .collect();
            for i in 0..tables.len() {
                for j in i + 1..tables.len() {
                    assert_ne!(tables[i], tables[j], "q = {q}");
                }
            }
        }
    }

    #[test]
    fn evaluate_examples() {
        let leg7 = DirichletCharacter::legendre(7).unwrap();
        assert!(close(leg7.evaluate(3), Complex64::new(-1.0, 0.0), 1e-12));
        for r in [1, 2, 4] {
            assert!(close(leg7.evaluate(r), Complex64::new(1.0, 0.0), 1e-12));
        }
        for chi in chars(6) {
            assert_eq!(chi.evaluate(3), Complex64::new(0.0, 0.0));
        }
        let principal5 = &chars(5)[0];
        assert!(close(
            principal5.evaluate(7),
            Complex64::new(1.0, 0.0),
            1e-12
        ));
        assert!(close(
            principal5.evaluate(-3),
            Complex64::new(1.0, 0.0),
            1e-12
        ));
    }

    #[test]
    fn conductor_examples() {
        assert_eq!(chars(6)[0].conductor(), 1);
        let leg5 = DirichletCharacter::legendre(5).unwrap();
        assert_eq!(leg5.conductor(), 5);
        assert!(leg5.is_primitive());
        let mod6: Vec<_> = chars(6).into_iter().filter(|c| !c.is_principal()).collect();
        assert_eq!(mod6.len(), 1);
        let chi = &mod6[0];
        assert_eq!(chi.conductor(), 3);
        assert!(!chi.is_primitive());
        let leg3 = DirichletCharacter::legendre(3).unwrap();
        for n in [1i64, 5] {
            assert!(close(chi.evaluate(n), leg3.evaluate(n), 1e-12));
        }
    }

    /// Conductor by brute force: smallest `f | q` such that `chi(n) = 1`
    /// whenever `n == 1 (mod f)` and `gcd(n, q) = 1`.
    fn conductor_oracle(chi: &DirichletCharacter) -> u64 {
        let q = chi.modulus();
        divisors(q)
            .into_iter()
            .find(|&f| {
                (0..q)
                    .filter(|&n| gcd(n, q) == 1 && n % f == 1 % f)
                    .all(|n| chi.index(n as i64) == Some(0))
            })
            .unwrap()
    }

    #[test]
    fn conductor_matches_induction_oracle() {
        for q in 1..=200 {
            for chi in chars(q) {
                assert_eq!(chi.conductor(), conductor_oracle(&chi), "{chi}");
            }
        }
    }

    #[test]
    fn primitive_count_matches_mobius_sum() {
        for q in 1..=200u64 {
            let expected: i64 = divisors(q)
                .into_iter()
                .map(|d| mobius(q / d) * euler_phi(d) as i64)
                .sum();
            let count = chars(q).iter().filter(|c| c.is_primitive()).count() as i64;
            assert_eq!(count, expected, "q = {q}");
        }
    }

    #[test]
    fn multiplicative_periodic_and_supported_on_units() {
        for q in 1..=100u64 {
            for chi in chars(q) {
                let vals = chi.values();
                for m in 0..q {
                    assert_eq!(vals[m as usize].norm() == 0.0, gcd(m, q) != 1);
                    assert!(close(chi.evaluate((m + q) as i64), vals[m as usize], 1e-12));
                    for n in 0..q {
                        let lhs = vals[(m * n % q) as usize];
                        let rhs = vals[m as usize] * vals[n as usize];
                        assert!(close(lhs, rhs, 1e-9), "{chi} m={m} n={n}");
                    }
                }
            }
        }
    }

    #[test]
    fn orthogonality() {
        for q in 1..=200u64 {
            for chi in chars(q).into_iter().skip(1) {
                let total: Complex64 = chi.values().iter().sum();
                assert!(total.norm() <= 1e-9, "{chi}");
            }
        }
    }

    #[test]
    fn gauss_sum_examples() {
        let tau5 = gauss_sum(&DirichletCharacter::legendre(5).unwrap()).value;
        assert!(close(tau5, Complex64::new(5f64.sqrt(), 0.0), 1e-9));
        let principal4 = &chars(4)[0];
        assert!(gauss_sum(principal4).value.norm() <= 1e-12);
        let tau7 = gauss_sum(&DirichletCharacter::legendre(7).unwrap());
        assert!((tau7.magnitude() - 2.645_751_3).abs() < 1e-7);
    }

    #[test]
    fn char_fourier_examples() {
        let leg5 = DirichletCharacter::legendre(5).unwrap();
        let tau = gauss_sum(&leg5).value;
        assert!(char_fourier(&leg5, 0).norm() <= 1e-12);
        assert!(close(char_fourier(&leg5, 1), tau, 1e-12));
        assert!(close(
            char_fourier(&leg5, 2),
            Complex64::new(-(5f64.sqrt()), 0.0),
            1e-9
        ));
        assert!(close(
            gauss_identity(&leg5, 2),
            char_fourier(&leg5, 2),
            1e-9
        ));
    }

    #[test]
    fn conjugate_inverts_values() {
        for chi in chars(36) {
            let bar = chi.conjugate();
            assert_eq!(bar.conductor(), chi.conductor());
            for n in 0..36 {
                let prod = chi.evaluate(n) * bar.evaluate(n);
                let expect = if gcd(n as u64, 36) == 1 { 1.0 } else { 0.0 };
                assert!(close(prod, Complex64::new(expect, 0.0), 1e-12));
            }
        }
    }

    #[test]
    fn record_round_trip() {
        for chi in chars(24) {
            let json = serde_json::to_string(&chi.record()).unwrap();
            let back: CharacterRecord = serde_json::from_str(&json).unwrap();
            assert_eq!(DirichletCharacter::from_record(&back).unwrap(), chi);
        }
        let bad = CharacterRecord {
            q: 5,
            exponents: vec![2],
            conductor: 1,
        };
        assert!(DirichletCharacter::from_record(&bad).is_err());
    }

    #[test]
    fn parity() {
        assert!(DirichletCharacter::legendre(5).unwrap().is_even());
        assert!(!DirichletCharacter::legendre(7).unwrap().is_even());
        assert!(chars(1)[0].is_even());
    }

    #[test]
    fn guards() {
        assert!(CharacterGroup::for_modulus(MAX_CHARACTER_MODULUS + 1).is_err());
        assert!(DirichletCharacter::legendre(9).is_err());
        let g = CharacterGroup::for_modulus(8).unwrap();
        assert!(g.character(vec![0]).is_err());
        assert!(g.character(vec![2, 0]).is_err());
    }
}
