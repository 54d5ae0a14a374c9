//! Integer arithmetic modulo `q`: factorization, the structure of the unit
//! group `(Z/qZ)^*`, and the additive characters `e_q(x) = exp(2 pi i x / q)`.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Complex numbers in double precision. Values of `e_q` have unit magnitude.
pub type ComplexValue = Complex64;

/// Largest integer accepted by [`factorize`].
pub const MAX_FACTORIZABLE: u64 = 1 << 60;

/// A positive modulus together with its factorization.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Modulus {
    q: u64,
    factors: Vec<(u64, u32)>,
    phi: u64,
}

impl Modulus {
    pub fn new(q: u64) -> Result<Self> {
        factorize(q)
    }

    pub fn value(&self) -> u64 {
        self.q
    }

    /// Prime factors `(p, e)` sorted by `p`.
    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    /// Order of the unit group.
    pub fn phi(&self) -> u64 {
        self.phi
    }

    pub fn is_prime(&self) -> bool {
        self.factors.len() == 1 && self.factors[0].1 == 1
    }

    /// The prime-power components `p^e`.
    pub fn prime_powers(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.iter().map(|&(p, e)| p.pow(e))
    }
}

impl fmt::Display for Modulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.q)
    }
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub fn lcm(a: u64, b: u64) -> u64 {
    if a == 0 || b == 0 {
        0
    } else {
        a / gcd(a, b) * b
    }
}

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Reduces a signed integer into `[0, q)`.
#[inline]
pub fn reduce(x: i64, q: u64) -> u64 {
    (x as i128).rem_euclid(q as i128) as u64
}

/// Extended Euclid: returns `(g, x)` with `a x == g (mod m)` and `g = gcd(a, m)`.
pub fn gcd_ext(a: u64, m: u64) -> (u64, u64) {
    let (mut old_r, mut r) = (a as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let quot = old_r / r;
        (old_r, r) = (r, old_r - quot * r);
        (old_s, s) = (s, old_s - quot * s);
    }
    let x = if m == 0 {
        old_s
    } else {
        old_s.rem_euclid(m as i128)
    };
    (old_r as u64, x as u64)
}

/// Deterministic Miller-Rabin for the full `u64` range.
pub fn is_prime(n: u64) -> bool {
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &p in &BASES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Factors `n` by trial division, stopping as soon as the cofactor is prime.
pub fn factorize(n: u64) -> Result<Modulus> {
    if n == 0 {
        return Err(Error::InvalidArgument("modulus must be positive".into()));
    }
    if n > MAX_FACTORIZABLE {
        return Err(Error::Resource {
            what: "factorization",
            size: n as u128,
            limit: MAX_FACTORIZABLE as u128,
        });
    }
    let mut factors = Vec::new();
    let mut rest = n;
    let mut strip = |rest: &mut u64, p: u64| {
        let mut e = 0;
        while (*rest).is_multiple_of(p) {
            *rest /= p;
            e += 1;
        }
        if e > 0 {
            factors.push((p, e));
        }
    };
    strip(&mut rest, 2);
    let mut d = 3u64;
    while rest > 1 && d.saturating_mul(d) <= rest {
        if rest.is_multiple_of(d) {
            strip(&mut rest, d);
            continue;
        }
        if d % 1024 == 3 && is_prime(rest) {
            break;
        }
        d += 2;
    }
    if rest > 1 {
        factors.push((rest, 1));
    }
    let phi = factors
        .iter()
        .map(|&(p, e)| p.pow(e - 1) * (p - 1))
        .product();
    Ok(Modulus { q: n, factors, phi })
}

pub fn euler_phi(n: u64) -> u64 {
    factorize(n).map(|m| m.phi).unwrap_or(0)
}

/// The Möbius function.
pub fn mobius(n: u64) -> i64 {
    match factorize(n) {
        Ok(m) if m.factors.iter().all(|&(_, e)| e == 1) => {
            if m.factors.len() % 2 == 0 {
                1
            } else {
                -1
            }
        }
        _ => 0,
    }
}

pub fn divisors(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n.is_multiple_of(d) {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

/// Multiplicative order of `g` modulo `m`, found by repeated multiplication.
/// Returns `None` when `g` is not a unit.
pub fn multiplicative_order_naive(g: u64, m: u64) -> Option<u64> {
    if m == 1 {
        return Some(1);
    }
    if gcd(g % m, m) != 1 {
        return None;
    }
    let g = g % m;
    let mut x = g;
    let mut k = 1;
    while x != 1 {
        x = mul_mod(x, g, m);
        k += 1;
    }
    Some(k)
}

/// One generator of a cyclic factor of `(Z/p^e Z)^*`, stored as a residue mod `p^e`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnitGenerator {
    pub value: u64,
    pub order: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnitComponent {
    pub prime: u64,
    pub exponent: u32,
    pub modulus: u64,
    /// Empty for the trivial groups mod 1 and mod 2. For `2^e`, `e >= 3`,
    /// this is `[-1, 5]`; otherwise a single smallest primitive root.
    pub generators: Vec<UnitGenerator>,
}

/// Generators of `(Z/qZ)^*`, one block per prime-power component.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnitGroupStructure {
    pub q: u64,
    pub components: Vec<UnitComponent>,
}

impl UnitGroupStructure {
    /// All generators in component order, as `(component index, generator)`.
    pub fn generators(&self) -> impl Iterator<Item = (usize, &UnitGenerator)> {
        self.components
            .iter()
            .enumerate()
            .flat_map(|(i, c)| c.generators.iter().map(move |g| (i, g)))
    }

    pub fn orders(&self) -> Vec<u64> {
        self.generators().map(|(_, g)| g.order).collect()
    }

    /// Lifts a residue mod one component to the residue mod `q` that is `1`
    /// on every other component.
    pub fn lift(&self, component: usize, value: u64) -> u64 {
        let m = self.components[component].modulus;
        let rest = self.q / m;
        // x == value (mod m), x == 1 (mod rest)
        let (_, inv) = gcd_ext(rest % m, m);
        let t = mul_mod((value + m - 1) % m, inv, m);
        (1 + (t as u128 * rest as u128) as u64) % self.q
    }
}

fn smallest_primitive_root(p: u64, e: u32) -> u64 {
    let m = p.pow(e);
    let phi = p.pow(e - 1) * (p - 1);
    if phi == 1 {
        return 1;
    }
    let mut primes: Vec<u64> = factorize(p - 1)
        .expect("p - 1 is positive")
        .factors
        .iter()
        .map(|&(l, _)| l)
        .collect();
    if e >= 2 {
        primes.push(p);
    }
    (2..m)
        .find(|&g| g % p != 0 && primes.iter().all(|&l| pow_mod(g, phi / l, m) != 1))
        .expect("odd prime powers have primitive roots")
}

pub fn unit_group(q: &Modulus) -> UnitGroupStructure {
    let components = q
        .factors
        .iter()
        .map(|&(p, e)| {
            let modulus = p.pow(e);
            let generators = match (p, e) {
                (2, 1) => vec![],
                (2, 2) => vec![UnitGenerator { value: 3, order: 2 }],
                (2, _) => vec![
                    UnitGenerator {
                        value: modulus - 1,
                        order: 2,
                    },
                    UnitGenerator {
                        value: 5,
                        order: modulus / 4,
                    },
                ],
                _ => vec![UnitGenerator {
                    value: smallest_primitive_root(p, e),
                    order: modulus / p * (p - 1),
                }],
            };
            UnitComponent {
                prime: p,
                exponent: e,
                modulus,
                generators,
            }
        })
        .collect();
    UnitGroupStructure { q: q.q, components }
}

/// `e_q(x) = exp(2 pi i x / q)`, with `x` reduced mod `q` first.
pub fn eq_root(q: u64, x: i64) -> ComplexValue {
    let r = reduce(x, q);
    Complex64::from_polar(1.0, 2.0 * PI * (r as f64) / (q as f64))
}

/// Precomputed `e_q(k)` for `k` in `[0, q)`.
#[derive(Clone, Debug)]
pub struct RootTable {
    q: u64,
    roots: Vec<ComplexValue>,
}

impl RootTable {
    pub fn new(q: u64) -> Self {
        let roots = (0..q).map(|k| eq_root(q, k as i64)).collect();
        RootTable { q, roots }
    }

    pub fn modulus(&self) -> u64 {
        self.q
    }

    #[inline]
    pub fn get(&self, k: u64) -> ComplexValue {
        self.roots[(k % self.q) as usize]
    }

    pub fn as_slice(&self) -> &[ComplexValue] {
        &self.roots
    }
}

/// `||c / q||`, the distance from `c / q` to the nearest integer.
pub fn nearest_integer_distance(c: i64, q: u64) -> f64 {
    let r = reduce(c, q);
    r.min(q - r) as f64 / q as f64
}

/// Signed real amplitude `sin(pi c H / q) / sin(pi c / q)` of the geometric
/// sum; equals `H` when `q | c`.
pub fn geometric_amplitude(q: u64, c: i64, h: u64) -> f64 {
    let c = reduce(c, q);
    if c == 0 {
        return h as f64;
    }
    let two_q = 2 * q as u128;
    let num_arg = ((c as u128 * h as u128) % two_q) as f64;
    (PI * num_arg / q as f64).sin() / (PI * c as f64 / q as f64).sin()
}

/// `sum_{h=0}^{H-1} e_q(c h)` in closed form.
pub fn geometric_sum(q: u64, c: i64, h: u64) -> ComplexValue {
    let c = reduce(c, q);
    if c == 0 {
        return Complex64::new(h as f64, 0.0);
    }
    // phase e(c (H - 1) / (2q))
    let two_q = 2 * q;
    let phase_num = ((c as u128 * (h as u128 + two_q as u128 - 1)) % two_q as u128) as u64;
    let phase = Complex64::from_polar(1.0, 2.0 * PI * phase_num as f64 / two_q as f64);
    phase * geometric_amplitude(q, c as i64, h)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: ComplexValue, b: ComplexValue, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn factorize_examples() {
        let one = factorize(1).unwrap();
        assert!(one.factors().is_empty());
        assert_eq!(one.phi(), 1);

        let twelve = factorize(12).unwrap();
        assert_eq!(twelve.factors(), &[(2, 2), (3, 1)]);
        assert_eq!(twelve.phi(), 4);

        let p = factorize(97).unwrap();
        assert_eq!(p.factors(), &[(97, 1)]);
        assert_eq!(p.phi(), 96);
        assert!(p.is_prime());

        assert!(matches!(factorize(0), Err(Error::InvalidArgument(_))));
        assert!(matches!(
            factorize(MAX_FACTORIZABLE + 1),
            Err(Error::Resource { .. })
        ));
    }

    fn trial_division_is_prime(n: u64) -> bool {
        n >= 2
            && (2..)
                .take_while(|d| d * d <= n)
                .all(|d| !n.is_multiple_of(d))
    }

    #[test]
    fn primality_matches_trial_division() {
        for n in 0..20_000 {
            assert_eq!(is_prime(n), trial_division_is_prime(n), "n = {n}");
        }
        assert!(is_prime((1 << 61) - 1));
        assert!(!is_prime(3_215_031_751)); // strong pseudoprime to bases 2, 3, 5, 7
    }

    #[test]
    fn factorize_large() {
        let p = 1_000_000_007u64;
        let q = 998_244_353u64;
        let m = factorize(p * q).unwrap();
        assert_eq!(m.factors(), &[(q, 1), (p, 1)]);
        let m = factorize(1 << 60).unwrap();
        assert_eq!(m.factors(), &[(2, 60)]);
    }

    #[test]
    fn factorize_recomposes_up_to_a_million() {
        for n in 1..=1_000_000u64 {
            let m = factorize(n).unwrap();
            let mut prev = 1;
            let mut prod = 1u64;
            let mut phi = 1u64;
            for &(p, e) in m.factors() {
                assert!(p > prev && e >= 1 && is_prime(p));
                prev = p;
                prod *= p.pow(e);
                phi *= p.pow(e - 1) * (p - 1);
            }
            assert_eq!(prod, n);
            assert_eq!(phi, m.phi());
        }
    }

    #[test]
    fn unit_group_examples() {
        let g5 = unit_group(&factorize(5).unwrap());
        assert_eq!(g5.components.len(), 1);
        assert_eq!(
            g5.components[0].generators,
            vec![UnitGenerator { value: 2, order: 4 }]
        );

        let g8 = unit_group(&factorize(8).unwrap());
        assert_eq!(
            g8.components[0].generators,
            vec![
                UnitGenerator { value: 7, order: 2 },
                UnitGenerator { value: 5, order: 2 }
            ]
        );

        let g2 = unit_group(&factorize(2).unwrap());
        assert_eq!(g2.generators().count(), 0);
        assert_eq!(g2.orders().iter().product::<u64>(), 1);
    }

    #[test]
    fn unit_group_generators_exhaustive() {
        for q in 1..=1000u64 {
            let m = factorize(q).unwrap();
            let ug = unit_group(&m);
            assert_eq!(ug.orders().iter().product::<u64>(), m.phi(), "q = {q}");
            for comp in &ug.components {
                let mut generated = vec![false; comp.modulus as usize];
                generated[1 % comp.modulus as usize] = true;
                for g in &comp.generators {
                    assert_eq!(
                        multiplicative_order_naive(g.value, comp.modulus),
                        Some(g.order),
                        "q = {q}, component {}",
                        comp.modulus
                    );
                    // close the generated set under multiplication by g
                    let current: Vec<u64> = (0..comp.modulus)
                        .filter(|&x| generated[x as usize])
                        .collect();
                    for x in current {
                        let mut y = x;
                        for _ in 0..g.order {
                            y = mul_mod(y, g.value, comp.modulus);
                            generated[y as usize] = true;
                        }
                    }
                }
                let units = (0..comp.modulus)
                    .filter(|&x| gcd(x, comp.modulus) == 1)
                    .count();
                assert_eq!(generated.iter().filter(|&&b| b).count(), units.max(1));
            }
        }
    }

    #[test]
    fn smallest_primitive_root_is_smallest() {
        for p in [3u64, 5, 7, 11, 13, 23, 41] {
            let g = smallest_primitive_root(p, 1);
            for h in 2..g {
                assert_ne!(multiplicative_order_naive(h, p), Some(p - 1));
            }
        }
        assert_eq!(smallest_primitive_root(5, 1), 2);
        assert_eq!(smallest_primitive_root(7, 1), 3);
    }

    #[test]
    fn lift_is_crt() {
        let m = factorize(360).unwrap();
        let ug = unit_group(&m);
        for (i, comp) in ug.components.iter().enumerate() {
            for g in &comp.generators {
                let x = ug.lift(i, g.value);
                for (j, other) in ug.components.iter().enumerate() {
                    let expect = if i == j { g.value } else { 1 % other.modulus };
                    assert_eq!(x % other.modulus, expect);
                }
            }
        }
    }

    #[test]
    fn eq_root_examples() {
        assert!(close(eq_root(5, 0), Complex64::new(1.0, 0.0), 1e-15));
        assert!(close(eq_root(4, 1), Complex64::new(0.0, 1.0), 1e-15));
        assert!(close(eq_root(8, 4), Complex64::new(-1.0, 0.0), 1e-15));
        assert!(close(eq_root(8, -4), Complex64::new(-1.0, 0.0), 1e-15));
    }

    #[test]
    fn eq_root_unit_and_periodic() {
        for q in 1..=500u64 {
            for x in -(q as i64)..(2 * q as i64) {
                let z = eq_root(q, x);
                assert!((z.norm() - 1.0).abs() <= 1e-12);
                assert!(close(z, eq_root(q, x + q as i64), 1e-12));
            }
        }
    }

    #[test]
    fn geometric_sum_examples() {
        assert!(close(
            geometric_sum(5, 0, 3),
            Complex64::new(3.0, 0.0),
            1e-12
        ));
        assert!(geometric_sum(4, 1, 4).norm() <= 1e-12);
        let direct: Complex64 = (0..3).map(|h| eq_root(5, h)).sum();
        assert!((direct.norm() - 1.618_033_988_7).abs() < 1e-9);
        assert!(close(geometric_sum(5, 1, 3), direct, 1e-12));
    }

    #[test]
    fn geometric_sum_matches_direct_summation() {
        for q in 1..=200u64 {
            let table = RootTable::new(q);
            for c in 0..q {
                let mut running = Complex64::new(0.0, 0.0);
                for h in 1..=q {
                    running += table.get(c * (h - 1) % q);
                    let closed = geometric_sum(q, c as i64, h);
                    assert!(
                        (closed - running).norm() <= 1e-9,
                        "q={q} c={c} H={h}: {closed} vs {running}"
                    );
                    let dist = nearest_integer_distance(c as i64, q);
                    let cap = if dist == 0.0 {
                        h as f64
                    } else {
                        (h as f64).min(0.5 / dist)
                    };
                    assert!(closed.norm() <= cap + 1e-9);
                    assert!(closed.norm() <= (h as f64).min(PI / 2.0 / dist) + 1e-9);
                }
            }
        }
    }

    #[test]
    fn arithmetic_helpers() {
        assert_eq!(divisors(12), vec![1, 2, 3, 4, 6, 12]);
        assert_eq!(divisors(1), vec![1]);
        assert_eq!(mobius(1), 1);
        assert_eq!(mobius(6), 1);
        assert_eq!(mobius(12), 0);
        assert_eq!(mobius(30), -1);
        let (g, x) = gcd_ext(4, 10);
        assert_eq!(g, 2);
        assert_eq!(mul_mod(4, x, 10), 2);
        assert_eq!(reduce(-3, 5), 2);
        assert_eq!(lcm(4, 6), 12);
    }
}
