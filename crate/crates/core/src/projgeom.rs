//! Points, lines and planes of PG(2,q) and PG(3,q), conics, and homographies.
//!
//! Points are always stored in canonical form (leftmost nonzero coordinate 1),
//! so equality of points is equality of coordinates. Planes keep the raw
//! coefficient vector they were built from, because flock planes are read in a
//! fixed representative `(f(t), g(t), h(t), -1)`; use [`Plane3::canonical`] to
//! compare them.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf::{Felt, Field};
use crate::linalg::{cross, dot, Matrix};

/// Scales `v` so its leftmost nonzero entry is 1.
pub fn canonicalize<const N: usize>(field: &Field, v: [Felt; N]) -> Result<[Felt; N]> {
    let lead = v.iter().copied().find(|x| !x.is_zero()).ok_or(Error::ZeroVector)?;
    let inv = field.inv(lead)?;
    Ok(v.map(|x| field.mul(x, inv)))
}

pub fn canonicalize_slice(field: &Field, v: &mut [Felt]) -> Result<()> {
    let lead = v.iter().copied().find(|x| !x.is_zero()).ok_or(Error::ZeroVector)?;
    let inv = field.inv(lead)?;
    for x in v.iter_mut() {
        *x = field.mul(*x, inv);
    }
    Ok(())
}

/// A point of PG(N-1, q) in canonical form.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(into = "Vec<Felt>", try_from = "Vec<Felt>")]
pub struct ProjPoint<const N: usize>([Felt; N]);

pub type Point2 = ProjPoint<3>;
pub type Point3 = ProjPoint<4>;

impl<const N: usize> ProjPoint<N> {
    pub fn new(field: &Field, coords: [Felt; N]) -> Result<Self> {
        Ok(ProjPoint(canonicalize(field, coords)?))
    }

    /// Builds from integers, reducing them into the prime subfield.
    pub fn from_ints(field: &Field, coords: [i64; N]) -> Result<Self> {
        Self::new(field, coords.map(|c| field.from_int(c)))
    }

    /// Builds from element codes.
    pub fn from_codes(field: &Field, codes: [u32; N]) -> Result<Self> {
        let mut v = [Felt::ZERO; N];
        for (slot, c) in v.iter_mut().zip(codes) {
            *slot = field.element(c as u64)?;
        }
        Self::new(field, v)
    }

    pub fn coords(&self) -> [Felt; N] {
        self.0
    }

    pub fn codes(&self) -> [u32; N] {
        self.0.map(|x| x.code())
    }
}

impl<const N: usize> From<ProjPoint<N>> for Vec<Felt> {
    fn from(p: ProjPoint<N>) -> Self {
        p.0.to_vec()
    }
}

impl<const N: usize> TryFrom<Vec<Felt>> for ProjPoint<N> {
    type Error = String;
    fn try_from(v: Vec<Felt>) -> std::result::Result<Self, String> {
        let arr: [Felt; N] = v
            .try_into()
            .map_err(|v: Vec<Felt>| format!("expected {N} coordinates, got {}", v.len()))?;
        // Deserialized points are trusted to already be canonical.
        Ok(ProjPoint(arr))
    }
}

impl<const N: usize> fmt::Display for ProjPoint<N> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|x| x.to_string()).collect();
        write!(f, "{}", parts.join(":"))
    }
}

impl Point2 {
    /// The point `(a,b,c,0)` of the plane x₃ = 0.
    pub fn embed(&self) -> Point3 {
        let [a, b, c] = self.0;
        ProjPoint([a, b, c, Felt::ZERO])
    }
}

/// All q²+q+1 points of PG(2,q): `(1,*,*)`, then `(0,1,*)`, then `(0,0,1)`.
pub fn enumerate_pg2(field: &Field) -> Vec<Point2> {
    let mut out = Vec::with_capacity(field.size() * field.size() + field.size() + 1);
    for a in field.elements() {
        for b in field.elements() {
            out.push(ProjPoint([Felt::ONE, a, b]));
        }
    }
    for b in field.elements() {
        out.push(ProjPoint([Felt::ZERO, Felt::ONE, b]));
    }
    out.push(ProjPoint([Felt::ZERO, Felt::ZERO, Felt::ONE]));
    out
}

/// Index of a point in [`enumerate_pg2`] order.
pub fn pg2_index(field: &Field, p: &Point2) -> usize {
    let q = field.size();
    let [a, b, c] = p.coords();
    if a == Felt::ONE {
        b.code() as usize * q + c.code() as usize
    } else if b == Felt::ONE {
        q * q + c.code() as usize
    } else {
        q * q + q
    }
}

/// A line of PG(2,q): the points with `l₀x₀ + l₁x₁ + l₂x₂ = 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Line2(pub Point2);

impl Line2 {
    pub fn new(field: &Field, coeffs: [Felt; 3]) -> Result<Self> {
        Ok(Line2(Point2::new(field, coeffs)?))
    }

    pub fn coeffs(&self) -> [Felt; 3] {
        self.0.coords()
    }

    pub fn contains(&self, field: &Field, p: &Point2) -> bool {
        dot(field, &self.0.coords(), &p.coords()).is_zero()
    }

    pub fn points(&self, field: &Field) -> Vec<Point2> {
        enumerate_pg2(field)
            .into_iter()
            .filter(|p| self.contains(field, p))
            .collect()
    }
}

impl fmt::Display for Line2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self.0)
    }
}

pub fn line_through(field: &Field, p: &Point2, q: &Point2) -> Result<Line2> {
    if p == q {
        return Err(Error::CoincidentPoints);
    }
    Line2::new(field, cross(field, &p.coords(), &q.coords()))
}

/// Whether all points lie on one line (vacuously true for fewer than three distinct points).
pub fn collinear(field: &Field, points: &[Point2]) -> bool {
    let Some(first) = points.first() else {
        return true;
    };
    let Some(second) = points.iter().find(|p| *p != first) else {
        return true;
    };
    let line = line_through(field, first, second).expect("points are distinct");
    points.iter().all(|p| line.contains(field, p))
}

/// A plane `A x₀ + B x₁ + C x₂ + D x₃ = 0`, stored as given.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Plane3 {
    pub coeffs: [Felt; 4],
}

impl Plane3 {
    pub fn new(coeffs: [Felt; 4]) -> Result<Self> {
        if coeffs.iter().all(|x| x.is_zero()) {
            return Err(Error::ZeroVector);
        }
        Ok(Plane3 { coeffs })
    }

    pub fn canonical(&self, field: &Field) -> Plane3 {
        Plane3 {
            coeffs: canonicalize(field, self.coeffs).expect("planes are nonzero"),
        }
    }

    pub fn contains(&self, field: &Field, p: &Point3) -> bool {
        dot(field, &self.coeffs, &p.coords()).is_zero()
    }

    pub fn codes(&self) -> [u32; 4] {
        self.coeffs.map(|x| x.code())
    }
}

impl fmt::Display for Plane3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coeffs.iter().map(|x| x.to_string()).collect();
        write!(f, "[{}]", parts.join(":"))
    }
}

/// A (semi)linear collineation of PG(N-1, q) acting on points as
/// `x ↦ M · σ(x)`, where σ raises every coordinate to the power p^j.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Homography<const N: usize> {
    matrix: Matrix,
    inverse: Matrix,
    frobenius: u32,
}

impl<const N: usize> Homography<N> {
    pub fn new(field: &Field, rows: [[Felt; N]; N]) -> Result<Self> {
        Self::semilinear(field, rows, 0)
    }

    pub fn semilinear(field: &Field, rows: [[Felt; N]; N], frobenius: u32) -> Result<Self> {
        Self::from_matrix(field, Matrix::from_rows(&rows), frobenius)
    }

    pub fn from_matrix(field: &Field, matrix: Matrix, frobenius: u32) -> Result<Self> {
        assert_eq!((matrix.rows(), matrix.cols()), (N, N), "dimension mismatch");
        let inverse = matrix.inverse(field)?;
        Ok(Homography {
            matrix,
            inverse,
            frobenius: frobenius % field.e(),
        })
    }

    pub fn from_ints(field: &Field, rows: [[i64; N]; N]) -> Result<Self> {
        Self::new(field, rows.map(|r| r.map(|x| field.from_int(x))))
    }

    /// Builds the homography whose displayed matrix multiplies coordinate
    /// *row* vectors from the right (`x ↦ x · M`).
    pub fn acting_on_rows(field: &Field, rows: [[Felt; N]; N]) -> Result<Self> {
        Self::from_matrix(field, Matrix::from_rows(&rows).transpose(), 0)
    }

    pub fn identity(field: &Field) -> Self {
        Self::from_matrix(field, Matrix::identity(N), 0).expect("identity is invertible")
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn frobenius_exponent(&self) -> u32 {
        self.frobenius
    }

    pub fn rows(&self) -> [[Felt; N]; N] {
        std::array::from_fn(|i| std::array::from_fn(|j| self.matrix[(i, j)]))
    }

    fn frob<const M: usize>(&self, field: &Field, v: [Felt; M]) -> [Felt; M] {
        if self.frobenius == 0 {
            v
        } else {
            v.map(|x| field.frobenius(x, self.frobenius))
        }
    }

    /// Raw vector action `v ↦ M · σ(v)`.
    pub fn apply_vec(&self, field: &Field, v: [Felt; N]) -> [Felt; N] {
        let w = self.matrix.mul_vec(field, &self.frob(field, v));
        std::array::from_fn(|i| w[i])
    }

    pub fn apply(&self, field: &Field, p: &ProjPoint<N>) -> ProjPoint<N> {
        ProjPoint::new(field, self.apply_vec(field, p.coords())).expect("invertible map keeps points nonzero")
    }

    /// Image of a hyperplane with coefficient vector `u`: `u ↦ M⁻ᵀ · σ(u)`, so
    /// that `x ∈ u` iff `H(x) ∈ H(u)`.
    pub fn apply_to_hyperplane_vec(&self, field: &Field, u: [Felt; N]) -> [Felt; N] {
        let w = self.inverse.transpose().mul_vec(field, &self.frob(field, u));
        std::array::from_fn(|i| w[i])
    }

    /// `self ∘ other`.
    pub fn compose(&self, field: &Field, other: &Homography<N>) -> Homography<N> {
        // M1 σ1 M2 σ2 = M1 σ1(M2) σ1σ2
        let m2 = if self.frobenius == 0 {
            other.matrix.clone()
        } else {
            let rows: Vec<Vec<Felt>> = (0..N)
                .map(|i| {
                    (0..N)
                        .map(|j| field.frobenius(other.matrix[(i, j)], self.frobenius))
                        .collect()
                })
                .collect();
            Matrix::from_rows(&rows)
        };
        Homography::from_matrix(
            field,
            self.matrix.mul(field, &m2),
            (self.frobenius + other.frobenius) % field.e(),
        )
        .expect("product of invertible maps is invertible")
    }

    pub fn inverse(&self, field: &Field) -> Homography<N> {
        // (M σ)^-1 = σ^-1 M^-1 = σ^-1(M^-1) σ^-1
        let back = (field.e() - self.frobenius) % field.e();
        let rows: Vec<Vec<Felt>> = (0..N)
            .map(|i| (0..N).map(|j| field.frobenius(self.inverse[(i, j)], back)).collect())
            .collect();
        Homography::from_matrix(field, Matrix::from_rows(&rows), back).expect("inverse is invertible")
    }
}

impl Homography<3> {
    pub fn apply_to_line(&self, field: &Field, l: &Line2) -> Line2 {
        Line2::new(field, self.apply_to_hyperplane_vec(field, l.coeffs())).expect("nonzero")
    }
}

impl Homography<4> {
    pub fn apply_to_plane(&self, field: &Field, plane: &Plane3) -> Plane3 {
        Plane3 {
            coeffs: self.apply_to_hyperplane_vec(field, plane.coeffs),
        }
    }
}

/// A conic `c₀x₀² + c₁x₁² + c₂x₂² + c₃x₀x₁ + c₄x₀x₂ + c₅x₁x₂ = 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Conic(pub [Felt; 6]);

fn conic_monomials(field: &Field, p: &[Felt; 3]) -> [Felt; 6] {
    let [x, y, z] = *p;
    let m = |a, b| field.mul(a, b);
    [m(x, x), m(y, y), m(z, z), m(x, y), m(x, z), m(y, z)]
}

impl Conic {
    pub fn from_ints(field: &Field, c: [i64; 6]) -> Conic {
        Conic(c.map(|x| field.from_int(x)))
    }

    pub fn contains(&self, field: &Field, p: &Point2) -> bool {
        dot(field, &self.0, &conic_monomials(field, &p.coords())).is_zero()
    }

    pub fn canonical(&self, field: &Field) -> Conic {
        Conic(canonicalize(field, self.0).expect("conic is nonzero"))
    }

    /// Whether `self` and `other` are proportional.
    pub fn same_as(&self, field: &Field, other: &Conic) -> bool {
        self.canonical(field) == other.canonical(field)
    }

    /// Half-discriminant `4abc + fgh − af² − bg² − ch²`; zero iff the conic is
    /// degenerate, in every characteristic.
    pub fn discriminant(&self, field: &Field) -> Felt {
        let [a, b, c, h, g, f] = self.0;
        let m = |x, y| field.mul(x, y);
        let four = field.from_int(4);
        let pos = field.add(m(four, m(a, m(b, c))), m(f, m(g, h)));
        let neg = field.sum([m(a, m(f, f)), m(b, m(g, g)), m(c, m(h, h))]);
        field.sub(pos, neg)
    }

    pub fn is_degenerate(&self, field: &Field) -> bool {
        self.discriminant(field).is_zero()
    }

    pub fn points(&self, field: &Field) -> Vec<Point2> {
        enumerate_pg2(field)
            .into_iter()
            .filter(|p| self.contains(field, p))
            .collect()
    }
}

/// Result of fitting a conic through a point set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConicFit {
    pub conic: Conic,
    /// Whether the points determine the conic (one-dimensional solution space).
    pub unique: bool,
    /// Whether the returned conic is degenerate (a line pair or worse).
    pub reducible: bool,
}

/// Fits a conic through at least five points; `None` when no conic contains them all.
pub fn fit_conic(field: &Field, points: &[Point2]) -> Option<ConicFit> {
    if points.len() < 5 {
        return None;
    }
    let rows: Vec<[Felt; 6]> = points
        .iter()
        .map(|p| conic_monomials(field, &p.coords()))
        .collect();
    let ns = Matrix::from_rows(&rows).nullspace(field);
    let first = ns.first()?;
    let conic = Conic(std::array::from_fn(|i| first[i])).canonical(field);
    Some(ConicFit {
        conic,
        unique: ns.len() == 1,
        reducible: conic.is_degenerate(field),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k(q: u64) -> Field {
        Field::with_order(q).unwrap()
    }

    #[test]
    fn canonical_forms() {
        let f5 = k(5);
        assert_eq!(Point2::from_ints(&f5, [2, 4, 0]).unwrap().codes(), [1, 2, 0]);
        let f7 = k(7);
        assert_eq!(Point2::from_ints(&f7, [0, 0, 3]).unwrap().codes(), [0, 0, 1]);
        assert_eq!(Point2::from_ints(&f7, [0, 0, 0]).unwrap_err(), Error::ZeroVector);
    }

    #[test]
    fn pg2_counts_and_order() {
        for (q, n) in [(2, 7), (5, 31), (7, 57)] {
            assert_eq!(enumerate_pg2(&k(q)).len(), n);
        }
        for q in [2u64, 3, 4, 5, 7, 8, 9, 11, 13, 16, 17, 19, 23, 25, 27, 29, 31, 32] {
            let f = k(q);
            let pts = enumerate_pg2(&f);
            assert_eq!(pts.len() as u64, q * q + q + 1);
            let set: std::collections::HashSet<_> = pts.iter().collect();
            assert_eq!(set.len(), pts.len());
            for (i, p) in pts.iter().enumerate() {
                assert_eq!(pg2_index(&f, p), i);
                assert_eq!(Point2::new(&f, p.coords()).unwrap(), *p);
            }
        }
    }

    #[test]
    fn row_action_of_star_matrix() {
        // (1,0,0 / -a/b,1,-c/b / 0,0,1) with (a,b,c) = (1,1,0) over GF(5)
        let f = k(5);
        let m = [[1, 0, 0], [-1, 1, 0], [0, 0, 1]].map(|r| r.map(|x| f.from_int(x)));
        let h = Homography::acting_on_rows(&f, m).unwrap();
        let q = Point2::from_ints(&f, [1, 1, 0]).unwrap();
        assert_eq!(h.apply(&f, &q).codes(), [0, 1, 0]);
    }

    #[test]
    fn lines_and_collinearity() {
        let f = k(5);
        let p = |c| Point2::from_ints(&f, c).unwrap();
        assert!(collinear(&f, &[p([1, 0, 0]), p([0, 1, 0]), p([1, 1, 0])]));
        assert!(!collinear(&f, &[p([1, 0, 0]), p([0, 1, 0]), p([0, 0, 1])]));
        let l = line_through(&f, &p([1, 0, 0]), &p([0, 0, 1])).unwrap();
        assert_eq!(l.points(&f).len(), 6);
        assert_eq!(
            line_through(&f, &p([1, 0, 0]), &p([2, 0, 0])).unwrap_err(),
            Error::CoincidentPoints
        );
    }

    #[test]
    fn conic_membership_and_fit() {
        let f = k(5);
        let p = |c| Point2::from_ints(&f, c).unwrap();
        // 3 x0 x2 = x1^2  <=>  x1^2 - 3 x0 x2 = 0
        let conic = Conic::from_ints(&f, [0, 1, 0, 0, -3, 0]);
        assert!(conic.contains(&f, &p([3, 3, 1])));
        let six = [[1, 0, 0], [0, 0, 1], [3, 3, 1], [2, 1, 1], [2, 4, 1], [3, 2, 1]].map(p);
        let fit = fit_conic(&f, &six).unwrap();
        assert!(fit.unique);
        assert!(!fit.reducible);
        assert!(fit.conic.same_as(&f, &conic));

        let line: Vec<Point2> = [[1, 0, 0], [1, 1, 0], [1, 2, 0], [1, 3, 0], [0, 1, 0]].map(p).to_vec();
        let fit = fit_conic(&f, &line).unwrap();
        assert!(fit.reducible);
        assert!(!fit.unique);
    }

    #[test]
    fn discriminant_in_characteristic_two() {
        let f = k(8);
        // x0 x2 + x1^2: nondegenerate; x0 x1: a line pair.
        assert!(!Conic::from_ints(&f, [0, 1, 0, 0, 1, 0]).is_degenerate(&f));
        assert!(Conic::from_ints(&f, [0, 0, 0, 1, 0, 0]).is_degenerate(&f));
        assert_eq!(Conic::from_ints(&f, [0, 1, 0, 0, 1, 0]).points(&f).len(), 9);
    }

    #[test]
    fn semilinear_group_action() {
        let f = k(9);
        let a = Homography::semilinear(
            &f,
            [[1, 3, 0], [0, 1, 5], [2, 0, 1]].map(|r| r.map(Felt::from_code)),
            1,
        )
        .unwrap();
        let b = Homography::semilinear(
            &f,
            [[4, 0, 1], [0, 7, 0], [1, 1, 1]].map(|r| r.map(Felt::from_code)),
            1,
        )
        .unwrap();
        let ab = a.compose(&f, &b);
        let ainv = a.inverse(&f);
        for p in enumerate_pg2(&f) {
            assert_eq!(ab.apply(&f, &p), a.apply(&f, &b.apply(&f, &p)));
            assert_eq!(ainv.apply(&f, &a.apply(&f, &p)), p);
        }
    }
}
