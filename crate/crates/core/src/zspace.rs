//! The space 𝒵 of reduced polynomials over GF(q) that vanish at 0.
//!
//! A [`ZFunc`] stores the coefficients of t, t², …, t^{q−1}. Every function
//! GF(q) → GF(q) with f(0) = 0 has exactly one such representation.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf::{Felt, Field};
use crate::linalg::{cross, Matrix};
use crate::projgeom::{Line2, Point2};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ZFunc {
    coeffs: Vec<Felt>,
}

/// Exponent of the reduced monomial equal to t^k as a function (k ≥ 1).
pub fn reduce_exponent(q: u32, k: u64) -> usize {
    assert!(k >= 1, "exponent must be positive");
    ((k - 1) % (q as u64 - 1)) as usize + 1
}

impl ZFunc {
    pub fn zero(field: &Field) -> ZFunc {
        ZFunc {
            coeffs: vec![Felt::ZERO; field.size() - 1],
        }
    }

    /// Coefficients of t, t², …, t^{q−1}.
    pub fn from_coeffs(field: &Field, coeffs: Vec<Felt>) -> Result<ZFunc> {
        if coeffs.len() != field.size() - 1 {
            return Err(Error::TableLength {
                expected: field.size() - 1,
                got: coeffs.len(),
            });
        }
        for c in &coeffs {
            field.element(c.code() as u64)?;
        }
        Ok(ZFunc { coeffs })
    }

    pub fn from_codes(field: &Field, codes: &[u32]) -> Result<ZFunc> {
        let coeffs = codes
            .iter()
            .map(|&c| field.element(c as u64))
            .collect::<Result<Vec<_>>>()?;
        Self::from_coeffs(field, coeffs)
    }

    /// `c · t^k`, with k reduced so that the result is the same function.
    pub fn monomial(field: &Field, k: u64, c: Felt) -> ZFunc {
        let mut f = ZFunc::zero(field);
        f.coeffs[reduce_exponent(field.q(), k) - 1] = c;
        f
    }

    /// The identity function `t`.
    pub fn t(field: &Field) -> ZFunc {
        Self::monomial(field, 1, Felt::ONE)
    }

    /// Sum of `c · t^k` over the given terms, exponents reduced.
    pub fn from_terms(field: &Field, terms: &[(u64, Felt)]) -> ZFunc {
        let mut f = ZFunc::zero(field);
        for &(k, c) in terms {
            let i = reduce_exponent(field.q(), k) - 1;
            f.coeffs[i] = field.add(f.coeffs[i], c);
        }
        f
    }

    pub fn coeffs(&self) -> &[Felt] {
        &self.coeffs
    }

    pub fn codes(&self) -> Vec<u32> {
        self.coeffs.iter().map(|c| c.code()).collect()
    }

    /// Coefficient of t^k, 1 ≤ k ≤ q−1.
    pub fn coeff(&self, k: usize) -> Felt {
        self.coeffs[k - 1]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|c| !c.is_zero()).map(|i| i + 1)
    }

    /// Index of the lowest nonzero coefficient.
    pub fn low_degree(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero()).map(|i| i + 1)
    }

    pub fn eval(&self, field: &Field, x: Felt) -> Felt {
        let mut acc = Felt::ZERO;
        for &c in self.coeffs.iter().rev() {
            acc = field.mul(field.add(acc, c), x);
        }
        acc
    }

    /// Value table indexed by element code.
    pub fn values(&self, field: &Field) -> Vec<Felt> {
        field.elements().map(|x| self.eval(field, x)).collect()
    }

    pub fn is_permutation(&self, field: &Field) -> bool {
        is_permutation_table(&self.values(field))
    }

    pub fn scale(&self, field: &Field, k: Felt) -> ZFunc {
        ZFunc {
            coeffs: self.coeffs.iter().map(|&c| field.mul(c, k)).collect(),
        }
    }

    pub fn add(&self, field: &Field, other: &ZFunc) -> ZFunc {
        ZFunc {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(&a, &b)| field.add(a, b))
                .collect(),
        }
    }

    pub fn sub(&self, field: &Field, other: &ZFunc) -> ZFunc {
        self.add(field, &other.scale(field, field.neg(Felt::ONE)))
    }

    /// The function `x ↦ f(p(x))` for a permutation table `p` with `p(0) = 0`.
    pub fn compose_perm(&self, field: &Field, p: &[Felt]) -> Result<ZFunc> {
        check_table_len(field, p)?;
        if !is_permutation_table(p) {
            return Err(Error::NotAPermutation);
        }
        let values: Vec<Felt> = p.iter().map(|&y| self.eval(field, y)).collect();
        interpolate(field, &values)
    }

    /// The class ⟨f⟩ in P(𝒵).
    pub fn class(&self, field: &Field) -> ZClass {
        match self.coeffs.iter().find(|c| !c.is_zero()) {
            None => ZClass::Zero,
            Some(&lead) if lead == Felt::ONE => ZClass::Point(self.clone()),
            Some(&lead) => {
                let inv = field.inv(lead).expect("lead is nonzero");
                ZClass::Point(self.scale(field, inv))
            }
        }
    }

    /// Parses the text form `c1*t + c2*t^2 + …` (coefficients are element codes).
    pub fn parse(field: &Field, text: &str) -> Result<ZFunc> {
        parse_zfunc(field, text)
    }
}

impl fmt::Display for ZFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if *c != Felt::ONE {
                write!(f, "{c}*")?;
            }
            match i + 1 {
                1 => write!(f, "t")?,
                k => write!(f, "t^{k}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// A point of P(𝒵), or the zero class ⟨0⟩.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ZClass {
    Zero,
    /// Canonical representative: lowest nonzero coefficient equal to 1.
    Point(ZFunc),
}

impl ZClass {
    pub fn rep(&self) -> Option<&ZFunc> {
        match self {
            ZClass::Zero => None,
            ZClass::Point(f) => Some(f),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, ZClass::Zero)
    }
}

impl fmt::Display for ZClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ZClass::Zero => write!(f, "<0>"),
            ZClass::Point(r) => write!(f, "<{r}>"),
        }
    }
}

fn check_table_len(field: &Field, values: &[Felt]) -> Result<()> {
    if values.len() != field.size() {
        return Err(Error::TableLength {
            expected: field.size(),
            got: values.len(),
        });
    }
    Ok(())
}

/// Whether a value table hits every element exactly once.
pub fn is_permutation_table(values: &[Felt]) -> bool {
    let mut seen = vec![false; values.len()];
    for v in values {
        match seen.get_mut(v.code() as usize) {
            Some(s) if !*s => *s = true,
            _ => return false,
        }
    }
    true
}

/// The unique [`ZFunc`] with the given value table (indexed by element code).
///
/// Uses c_k = −Σ_{x≠0} F(x) x^{q−1−k}, which follows from expanding the
/// indicator 1 − (t − a)^{q−1} of each point a.
pub fn interpolate(field: &Field, values: &[Felt]) -> Result<ZFunc> {
    check_table_len(field, values)?;
    if !values[0].is_zero() {
        return Err(Error::NonzeroAtZero);
    }
    let n = field.size() as u64 - 1;
    let mut coeffs = vec![Felt::ZERO; n as usize];
    for x in field.units() {
        let fx = values[x.code() as usize];
        if fx.is_zero() {
            continue;
        }
        let lx = field.log(x).expect("unit") as u64;
        for (i, c) in coeffs.iter_mut().enumerate() {
            let m = n - 1 - i as u64;
            *c = field.add(*c, field.mul(fx, field.exp(lx * m % n)));
        }
    }
    let coeffs = coeffs.into_iter().map(|c| field.neg(c)).collect();
    Ok(ZFunc { coeffs })
}

/// Degrees a permutation polynomial in 𝒵 can have: 1, or a degree in
/// [2, q−2] that does not divide q−1.
pub fn hermite_admissible_degrees(q: u32) -> BTreeSet<usize> {
    let n = q as usize - 1;
    let mut out = BTreeSet::from([1]);
    out.extend((2..n).filter(|d| !n.is_multiple_of(*d)));
    out
}

/// `af + bg + ch`.
pub fn combine(field: &Field, [a, b, c]: [Felt; 3], [f, g, h]: [&ZFunc; 3]) -> ZFunc {
    ZFunc {
        coeffs: (0..f.coeffs.len())
            .map(|i| {
                let x = field.mul(a, f.coeffs[i]);
                let y = field.mul(b, g.coeffs[i]);
                let z = field.mul(c, h.coeffs[i]);
                field.add(field.add(x, y), z)
            })
            .collect(),
    }
}

/// The set of `⟨a,b,c⟩` with `af + bg + ch = 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Kernel {
    /// rank 3
    Trivial,
    /// rank 2
    Point(Point2),
    /// rank 1
    Line(Line2),
    /// rank 0: every combination vanishes
    Plane,
}

pub fn rank_and_kernel(field: &Field, f: &ZFunc, g: &ZFunc, h: &ZFunc) -> (usize, Kernel) {
    let rows: Vec<[Felt; 3]> = (0..f.coeffs.len())
        .map(|i| [f.coeffs[i], g.coeffs[i], h.coeffs[i]])
        .collect();
    let ns = Matrix::from_rows(&rows).nullspace(field);
    let rank = 3 - ns.len();
    let as3 = |v: &Vec<Felt>| [v[0], v[1], v[2]];
    let kernel = match ns.len() {
        0 => Kernel::Trivial,
        1 => Kernel::Point(Point2::new(field, as3(&ns[0])).expect("nullspace vector is nonzero")),
        2 => Kernel::Line(
            Line2::new(field, cross(field, &as3(&ns[0]), &as3(&ns[1]))).expect("independent vectors"),
        ),
        _ => Kernel::Plane,
    };
    (rank, kernel)
}

struct Cursor<'a> {
    chars: Vec<(usize, char)>,
    pos: usize,
    text: &'a str,
}

impl<'a> Cursor<'a> {
    fn new(text: &'a str) -> Self {
        let chars = text
            .chars()
            .enumerate()
            .filter(|(_, c)| !c.is_whitespace())
            .map(|(i, c)| (i + 1, c))
            .collect();
        Cursor { chars, pos: 0, text }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).map(|&(_, c)| c)
    }

    fn column(&self) -> usize {
        self.chars
            .get(self.pos)
            .map_or(self.text.chars().count() + 1, |&(i, _)| i)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn number(&mut self) -> Result<Option<u64>> {
        let col = self.column();
        let mut digits = String::new();
        while let Some(c) = self.peek().filter(char::is_ascii_digit) {
            digits.push(c);
            self.pos += 1;
        }
        if digits.is_empty() {
            return Ok(None);
        }
        digits
            .parse()
            .map(Some)
            .map_err(|_| Error::parse(col, "number too large"))
    }
}

fn parse_zfunc(field: &Field, text: &str) -> Result<ZFunc> {
    let mut cur = Cursor::new(text);
    if cur.peek().is_none() {
        return Err(Error::parse(1, "empty polynomial"));
    }
    let mut out = ZFunc::zero(field);
    let mut first = true;
    while cur.peek().is_some() {
        let mut negative = false;
        if cur.eat('-') {
            negative = true;
        } else if !cur.eat('+') && !first {
            return Err(Error::parse(cur.column(), "expected '+' or '-'"));
        }
        first = false;
        let col = cur.column();
        let coeff = match cur.number()? {
            Some(c) if c >= field.q() as u64 => {
                return Err(Error::parse(col, format!("coefficient {c} is not an element of GF({})", field.q())))
            }
            Some(c) => {
                if cur.peek() != Some('t') && !cur.eat('*') {
                    // constant term
                    if c != 0 {
                        return Err(Error::parse(col, "nonzero constant term"));
                    }
                    continue;
                }
                Felt::from_code(c as u32)
            }
            None => Felt::ONE,
        };
        let tcol = cur.column();
        if !cur.eat('t') {
            return Err(Error::parse(tcol, "expected 't'"));
        }
        let exp = if cur.eat('^') {
            let ecol = cur.column();
            match cur.number()? {
                Some(0) | None => return Err(Error::parse(ecol, "expected a positive exponent")),
                Some(k) => k,
            }
        } else {
            1
        };
        let coeff = if negative { field.neg(coeff) } else { coeff };
        let i = reduce_exponent(field.q(), exp) - 1;
        out.coeffs[i] = field.add(out.coeffs[i], coeff);
    }
    Ok(out)
}
