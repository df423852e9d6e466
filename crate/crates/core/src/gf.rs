//! Exact arithmetic in GF(p^e).
//!
//! Elements are encoded as integers in `[0, q)`: the base-p digits of a code are
//! the coordinates of the element in the polynomial basis `1, α, α², …` where α
//! is a root of the field modulus. Code 0 is zero and code 1 is one, and the
//! enumeration order `0..q` is used everywhere downstream.
//!
//! Multiplication goes through log/antilog tables built at construction, so a
//! [`Field`] is cheap to clone (the tables sit behind an `Arc`) and immutable.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported field order.
pub const MAX_ORDER: u64 = 1 << 16;

/// A field element, stored as its code.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Felt(u32);

impl Felt {
    pub const ZERO: Felt = Felt(0);
    pub const ONE: Felt = Felt(1);

    /// Wraps a code without range checking; see [`Field::element`] for the checked form.
    pub const fn from_code(code: u32) -> Self {
        Felt(code)
    }

    pub const fn code(self) -> u32 {
        self.0
    }

    pub const fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for Felt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

struct Inner {
    p: u32,
    e: u32,
    q: u32,
    /// Monic modulus, coefficients low-to-high (length e + 1).
    modulus: Vec<u32>,
    /// exp[k] = g^k for k in 0..2(q-1).
    exp: Vec<u32>,
    /// log[x] for x != 0.
    log: Vec<u32>,
    neg: Vec<u32>,
    add: Option<Vec<u32>>,
}

/// Handle to a finite field GF(p^e).
#[derive(Clone)]
pub struct Field(Arc<Inner>);

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.p == other.0.p && self.0.e == other.0.e && self.0.modulus == other.0.modulus)
    }
}

impl Eq for Field {}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({})[{}]", self.q(), self.spec_string())
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({})", self.q())
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Splits `q = p^e`, or `None` when q is not a prime power.
pub fn prime_power(q: u64) -> Option<(u32, u32)> {
    if q < 2 {
        return None;
    }
    let mut p = 2;
    while p * p <= q && !q.is_multiple_of(p) {
        p += 1;
    }
    if !q.is_multiple_of(p) {
        p = q;
    }
    let mut rest = q;
    let mut e = 0;
    while rest.is_multiple_of(p) {
        rest /= p;
        e += 1;
    }
    (rest == 1).then_some((p as u32, e))
}

pub fn is_prime_power(q: u64) -> bool {
    prime_power(q).is_some()
}

// Polynomials over GF(p), coefficients low-to-high, no trailing zeros.

fn poly_trim(a: &mut Vec<u32>) {
    while a.last() == Some(&0) {
        a.pop();
    }
}

fn inv_mod_p(a: u32, p: u32) -> u32 {
    let (mut r0, mut r1) = (p as i64, a as i64);
    let (mut t0, mut t1) = (0i64, 1i64);
    while r1 != 0 {
        let k = r0 / r1;
        (r0, r1) = (r1, r0 - k * r1);
        (t0, t1) = (t1, t0 - k * t1);
    }
    t0.rem_euclid(p as i64) as u32
}

/// Remainder of `a` modulo `b` (b nonzero).
fn poly_rem(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let mut r = a.to_vec();
    poly_trim(&mut r);
    let db = b.len() - 1;
    let lead_inv = inv_mod_p(b[db], p) as u64;
    let p64 = p as u64;
    while r.len() > db {
        let top = r.len() - 1;
        let k = (r[top] as u64 * lead_inv) % p64;
        let shift = top - db;
        for (i, &bc) in b.iter().enumerate() {
            let sub = (k * bc as u64) % p64;
            r[shift + i] = ((r[shift + i] as u64 + p64 - sub) % p64) as u32;
        }
        poly_trim(&mut r);
    }
    r
}

/// Trial division by every monic polynomial of degree 1..=deg/2.
fn is_irreducible(modulus: &[u32], p: u32) -> bool {
    let deg = modulus.len() - 1;
    for d in 1..=deg / 2 {
        let count = (p as u64).pow(d as u32);
        for n in 0..count {
            let mut div = Vec::with_capacity(d + 1);
            let mut m = n;
            for _ in 0..d {
                div.push((m % p as u64) as u32);
                m /= p as u64;
            }
            div.push(1);
            if poly_rem(modulus, &div, p).is_empty() {
                return false;
            }
        }
    }
    true
}

/// Lexicographically smallest monic irreducible of degree `e`, comparing the
/// coefficient tuple `(c0, c1, …, c_{e-1})` from `c0` onwards.
pub fn default_modulus(p: u32, e: u32) -> Vec<u32> {
    let count = (p as u64).pow(e);
    for n in 0..count {
        // c0 is the most significant digit of n so that n orders the tuples lexicographically.
        let mut coeffs = vec![0u32; e as usize + 1];
        let mut m = n;
        for i in (0..e as usize).rev() {
            coeffs[i] = (m % p as u64) as u32;
            m /= p as u64;
        }
        coeffs[e as usize] = 1;
        if coeffs[0] != 0 && is_irreducible(&coeffs, p) {
            return coeffs;
        }
    }
    unreachable!("an irreducible polynomial of every degree exists over GF(p)")
}

fn digits(mut code: u32, p: u32, e: u32) -> Vec<u32> {
    (0..e)
        .map(|_| {
            let d = code % p;
            code /= p;
            d
        })
        .collect()
}

fn undigits(ds: &[u32], p: u32) -> u32 {
    ds.iter().rev().fold(0, |acc, &d| acc * p + d)
}

/// Multiplication by polynomial arithmetic, used to build the tables.
fn mul_slow(a: u32, b: u32, p: u32, e: u32, modulus: &[u32]) -> u32 {
    if e == 1 {
        return ((a as u64 * b as u64) % p as u64) as u32;
    }
    let da = digits(a, p, e);
    let db = digits(b, p, e);
    let mut prod = vec![0u32; 2 * e as usize];
    for (i, &x) in da.iter().enumerate() {
        for (j, &y) in db.iter().enumerate() {
            prod[i + j] = ((prod[i + j] as u64 + x as u64 * y as u64) % p as u64) as u32;
        }
    }
    let mut r = poly_rem(&prod, modulus, p);
    r.resize(e as usize, 0);
    undigits(&r, p)
}

fn add_slow(a: u32, b: u32, p: u32, e: u32) -> u32 {
    if p == 2 {
        return a ^ b;
    }
    let s: Vec<u32> = digits(a, p, e)
        .into_iter()
        .zip(digits(b, p, e))
        .map(|(x, y)| (x + y) % p)
        .collect();
    undigits(&s, p)
}

impl Field {
    /// Builds GF(p^e). Without a modulus, the default irreducible is used.
    pub fn new(p: u32, e: u32, modulus: Option<&[u32]>) -> Result<Field> {
        if !is_prime(p as u64) {
            return Err(Error::NonPrime(p as u64));
        }
        if e == 0 {
            return Err(Error::DegreeMismatch { expected: 1, got: 0 });
        }
        let q64 = (p as u64).checked_pow(e).unwrap_or(u64::MAX);
        if q64 > MAX_ORDER {
            return Err(Error::FieldTooLarge(q64));
        }
        let q = q64 as u32;
        let modulus = if e == 1 {
            vec![0, 1]
        } else {
            match modulus {
                Some(m) => {
                    if m.len() != e as usize + 1 || m[e as usize] != 1 || m.iter().any(|&c| c >= p) {
                        return Err(Error::DegreeMismatch {
                            expected: e,
                            got: m.len(),
                        });
                    }
                    if !is_irreducible(m, p) {
                        return Err(Error::ReducibleModulus(p));
                    }
                    m.to_vec()
                }
                None => default_modulus(p, e),
            }
        };

        let n = (q - 1) as usize;
        let mut exp = vec![0u32; 2 * n.max(1)];
        let mut log = vec![0u32; q as usize];
        if q == 2 {
            exp[0] = 1;
            exp[1] = 1;
        } else {
            let generator = (2..q)
                .find(|&g| {
                    let mut x = 1;
                    for k in 1..n {
                        x = mul_slow(x, g, p, e, &modulus);
                        if x == 1 {
                            return k == n;
                        }
                    }
                    true
                })
                .expect("multiplicative group of a field is cyclic");
            let mut x = 1u32;
            for k in 0..n {
                exp[k] = x;
                exp[k + n] = x;
                log[x as usize] = k as u32;
                x = mul_slow(x, generator, p, e, &modulus);
            }
        }

        let neg = (0..q)
            .map(|a| {
                let ds: Vec<u32> = digits(a, p, e).into_iter().map(|d| (p - d) % p).collect();
                undigits(&ds, p)
            })
            .collect();
        let add = (q <= 256 && p != 2).then(|| {
            let mut t = vec![0u32; (q * q) as usize];
            for a in 0..q {
                for b in 0..q {
                    t[(a * q + b) as usize] = add_slow(a, b, p, e);
                }
            }
            t
        });

        Ok(Field(Arc::new(Inner {
            p,
            e,
            q,
            modulus,
            exp,
            log,
            neg,
            add,
        })))
    }

    /// GF(q) with the default modulus.
    pub fn with_order(q: u64) -> Result<Field> {
        let (p, e) = prime_power(q).ok_or(Error::NotPrimePower(q))?;
        Field::new(p, e, None)
    }

    /// Parses `"q"`, `"p^e"` or `"p^e/c0,c1,…,1"` (modulus coefficients low-to-high).
    pub fn from_spec(spec: &str) -> Result<Field> {
        let spec = spec.trim();
        let num = |s: &str, col: usize| -> Result<u64> {
            s.trim()
                .parse::<u64>()
                .map_err(|_| Error::parse(col, format!("expected an integer, found {s:?}")))
        };
        let (head, modulus) = match spec.split_once('/') {
            Some((h, m)) => (h, Some(m)),
            None => (spec, None),
        };
        let (p, e) = match head.split_once('^') {
            Some((p, e)) => {
                let p = num(p, 1)?;
                let e = num(e, p.to_string().len() + 2)?;
                if !is_prime(p) {
                    return Err(Error::NonPrime(p));
                }
                (p as u32, e as u32)
            }
            None => {
                let q = num(head, 1)?;
                prime_power(q).ok_or(Error::NotPrimePower(q))?
            }
        };
        let coeffs = match modulus {
            Some(m) => {
                let base = head.len() + 2;
                let mut out = Vec::new();
                let mut col = base;
                for part in m.split(',') {
                    out.push(num(part, col)? as u32);
                    col += part.len() + 1;
                }
                Some(out)
            }
            None => None,
        };
        Field::new(p, e, coeffs.as_deref())
    }

    /// Canonical spec string: `"p"` for prime fields, `"p^e/c0,…,1"` otherwise.
    pub fn spec_string(&self) -> String {
        if self.0.e == 1 {
            return self.0.p.to_string();
        }
        let m: Vec<String> = self.0.modulus.iter().map(|c| c.to_string()).collect();
        format!("{}^{}/{}", self.0.p, self.0.e, m.join(","))
    }

    pub fn p(&self) -> u32 {
        self.0.p
    }

    pub fn e(&self) -> u32 {
        self.0.e
    }

    pub fn q(&self) -> u32 {
        self.0.q
    }

    /// Size as a `usize`, for indexing value tables.
    pub fn size(&self) -> usize {
        self.0.q as usize
    }

    pub fn modulus(&self) -> &[u32] {
        &self.0.modulus
    }

    pub fn element(&self, code: u64) -> Result<Felt> {
        if code < self.0.q as u64 {
            Ok(Felt(code as u32))
        } else {
            Err(Error::InvalidElement { code, q: self.0.q })
        }
    }

    /// All elements in code order.
    pub fn elements(&self) -> impl Iterator<Item = Felt> + Clone {
        (0..self.0.q).map(Felt)
    }

    /// Nonzero elements in code order.
    pub fn units(&self) -> impl Iterator<Item = Felt> + Clone {
        (1..self.0.q).map(Felt)
    }

    /// Image of an integer under `Z → GF(p)`.
    pub fn from_int(&self, n: i64) -> Felt {
        Felt(n.rem_euclid(self.0.p as i64) as u32)
    }

    #[inline]
    pub fn add(&self, a: Felt, b: Felt) -> Felt {
        let i = &*self.0;
        if i.p == 2 {
            Felt(a.0 ^ b.0)
        } else if let Some(t) = &i.add {
            Felt(t[(a.0 * i.q + b.0) as usize])
        } else {
            Felt(add_slow(a.0, b.0, i.p, i.e))
        }
    }

    #[inline]
    pub fn neg(&self, a: Felt) -> Felt {
        Felt(self.0.neg[a.0 as usize])
    }

    #[inline]
    pub fn sub(&self, a: Felt, b: Felt) -> Felt {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Felt, b: Felt) -> Felt {
        if a.0 == 0 || b.0 == 0 {
            return Felt::ZERO;
        }
        let i = &*self.0;
        Felt(i.exp[(i.log[a.0 as usize] + i.log[b.0 as usize]) as usize])
    }

    pub fn inv(&self, a: Felt) -> Result<Felt> {
        if a.0 == 0 {
            return Err(Error::DivisionByZero);
        }
        let i = &*self.0;
        let n = i.q - 1;
        Ok(Felt(i.exp[((n - i.log[a.0 as usize]) % n) as usize]))
    }

    pub fn div(&self, a: Felt, b: Felt) -> Result<Felt> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, a: Felt, k: u64) -> Felt {
        if k == 0 {
            return Felt::ONE;
        }
        if a.0 == 0 {
            return Felt::ZERO;
        }
        let i = &*self.0;
        let n = (i.q - 1) as u64;
        let e = (i.log[a.0 as usize] as u64 * (k % n)) % n;
        Felt(i.exp[e as usize])
    }

    /// `x^(p^j)`.
    pub fn frobenius(&self, a: Felt, j: u32) -> Felt {
        let i = &*self.0;
        let j = j % i.e;
        if j == 0 {
            return a;
        }
        self.pow(a, (i.p as u64).pow(j))
    }

    /// Discrete log to the table generator; `None` for zero.
    pub fn log(&self, a: Felt) -> Option<u32> {
        (a.0 != 0).then(|| self.0.log[a.0 as usize])
    }

    /// The generator used by the log tables raised to `k`.
    pub fn exp(&self, k: u64) -> Felt {
        let n = (self.0.q - 1) as u64;
        Felt(self.0.exp[(k % n) as usize])
    }

    pub fn sum<I: IntoIterator<Item = Felt>>(&self, it: I) -> Felt {
        it.into_iter().fold(Felt::ZERO, |acc, x| self.add(acc, x))
    }

    /// Whether `a` is a nonzero square.
    pub fn is_square(&self, a: Felt) -> bool {
        match self.log(a) {
            None => false,
            Some(_) if self.0.p == 2 => true,
            Some(l) => l % 2 == 0,
        }
    }

    /// Whether `a` is a fourth power (zero included).
    pub fn is_fourth_power(&self, a: Felt) -> bool {
        match self.log(a) {
            None => true,
            Some(l) => {
                let n = self.0.q - 1;
                let g = gcd(4, n);
                l % g == 0
            }
        }
    }

    /// Partition of the nonzero elements into squares and nonsquares, both in code order.
    pub fn squares_partition(&self) -> SquaresPartition {
        let (squares, nonsquares) = self.units().partition(|&a| self.is_square(a));
        SquaresPartition {
            squares,
            nonsquares,
        }
    }

    pub fn nonsquares(&self) -> Vec<Felt> {
        self.squares_partition().nonsquares
    }

    /// Slow polynomial-arithmetic product, independent of the log tables.
    pub fn mul_by_polynomials(&self, a: Felt, b: Felt) -> Felt {
        Felt(mul_slow(a.0, b.0, self.0.p, self.0.e, &self.0.modulus))
    }
}

pub fn gcd(mut a: u32, mut b: u32) -> u32 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SquaresPartition {
    pub squares: Vec<Felt>,
    pub nonsquares: Vec<Felt>,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(q: u64) -> Field {
        Field::with_order(q).unwrap()
    }

    #[test]
    fn prime_field_codes_are_residues() {
        let k = f(7);
        for a in 0..7u32 {
            for b in 0..7u32 {
                assert_eq!(k.add(Felt(a), Felt(b)).code(), (a + b) % 7);
                assert_eq!(k.mul(Felt(a), Felt(b)).code(), (a * b) % 7);
            }
        }
        assert_eq!(k.add(Felt(3), Felt(5)), Felt(1));
        assert_eq!(k.inv(Felt(3)).unwrap(), Felt(5));
    }

    #[test]
    fn gf9_default_modulus_is_t2_plus_1() {
        let k = f(9);
        assert_eq!(k.modulus(), &[1, 0, 1]);
        // t has code 3; t^2 = -1 = 2
        assert_eq!(k.mul(Felt(3), Felt(3)), Felt(2));
    }

    #[test]
    fn default_modulus_matches_brute_force_scan() {
        // Monic quadratics over GF(3) in lexicographic order of (c0, c1); the
        // first one with no root is the default.
        let first = (0..9u32)
            .map(|n| (n / 3, n % 3))
            .find(|&(c0, c1)| (0..3u32).all(|x| (x * x + c1 * x + c0) % 3 != 0))
            .unwrap();
        assert_eq!(first, (1, 0));
        assert_eq!(default_modulus(2, 2), vec![1, 1, 1]);
        assert_eq!(default_modulus(2, 3), vec![1, 0, 1, 1]);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert_eq!(Field::new(4, 1, None).unwrap_err(), Error::NonPrime(4));
        assert_eq!(Field::with_order(6).unwrap_err(), Error::NotPrimePower(6));
        assert_eq!(
            Field::new(3, 2, Some(&[2, 0, 1])).unwrap_err(),
            Error::ReducibleModulus(3)
        );
        assert!(matches!(
            Field::new(3, 2, Some(&[1, 1])),
            Err(Error::DegreeMismatch { .. })
        ));
        assert_eq!(f(5).inv(Felt::ZERO).unwrap_err(), Error::DivisionByZero);
    }

    #[test]
    fn spec_strings_round_trip() {
        for s in ["7", "9", "2^3", "3^2/2,2,1", "2^4/1,1,0,0,1"] {
            let k = Field::from_spec(s).unwrap();
            let again = Field::from_spec(&k.spec_string()).unwrap();
            assert_eq!(k, again);
        }
        assert_eq!(Field::from_spec("3^2/2,2,1").unwrap().modulus(), &[2, 2, 1]);
        assert!(matches!(Field::from_spec("x"), Err(Error::Parse { .. })));
        assert_eq!(Field::from_spec("12").unwrap_err(), Error::NotPrimePower(12));
    }

    #[test]
    fn field_axioms_exhaustive_small() {
        for q in [2, 3, 4, 5, 7, 8, 9, 11, 13, 16] {
            let k = f(q);
            let els: Vec<Felt> = k.elements().collect();
            for &a in &els {
                assert_eq!(k.add(a, k.neg(a)), Felt::ZERO);
                if !a.is_zero() {
                    assert_eq!(k.mul(a, k.inv(a).unwrap()), Felt::ONE);
                }
                for &b in &els {
                    assert_eq!(k.mul(a, b), k.mul_by_polynomials(a, b));
                    assert_eq!(k.add(a, b), k.add(b, a));
                    for &c in &els {
                        assert_eq!(k.add(k.add(a, b), c), k.add(a, k.add(b, c)));
                        assert_eq!(k.mul(k.mul(a, b), c), k.mul(a, k.mul(b, c)));
                        assert_eq!(k.mul(a, k.add(b, c)), k.add(k.mul(a, b), k.mul(a, c)));
                    }
                }
            }
        }
    }

    #[test]
    fn frobenius_closure() {
        for q in 2..=128u64 {
            if !is_prime_power(q) {
                continue;
            }
            let k = f(q);
            for a in k.elements() {
                assert_eq!(k.pow(a, q), a, "x^q != x in GF({q})");
                assert_eq!(k.frobenius(a, k.e()), a);
                assert_eq!(k.frobenius(a, 1), k.pow(a, k.p() as u64));
            }
        }
    }

    #[test]
    fn default_construction_is_deterministic() {
        for q in [8u64, 9, 25, 27, 32, 49, 64, 81, 125] {
            let (a, b) = (f(q), f(q));
            for x in a.elements() {
                for y in a.elements() {
                    assert_eq!(a.mul(x, y), b.mul(x, y));
                }
            }
        }
    }

    #[test]
    fn square_partitions() {
        let p5 = f(5).squares_partition();
        assert_eq!(p5.nonsquares, vec![Felt(2), Felt(3)]);
        assert_eq!(p5.squares, vec![Felt(1), Felt(4)]);
        assert_eq!(f(7).nonsquares(), vec![Felt(3), Felt(5), Felt(6)]);
        assert!(f(4).nonsquares().is_empty());
        for q in [9u64, 25, 27, 49, 81, 125] {
            let k = f(q);
            let brute: std::collections::BTreeSet<Felt> =
                k.units().map(|x| k.mul(x, x)).collect();
            let part = k.squares_partition();
            assert_eq!(part.squares, brute.iter().copied().collect::<Vec<_>>());
            assert_eq!(part.nonsquares.len() as u32, (q as u32 - 1) / 2);
        }
    }

    #[test]
    fn fourth_powers_match_brute_force() {
        for q in [5u64, 9, 13, 25, 29] {
            let k = f(q);
            let brute: std::collections::BTreeSet<Felt> = k.elements().map(|x| k.pow(x, 4)).collect();
            for a in k.elements() {
                assert_eq!(k.is_fourth_power(a), brute.contains(&a), "q={q} a={a}");
            }
        }
    }
}
