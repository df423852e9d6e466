//! Flocks of planes in standard position, given by coordinate functions.
//!
//! The flock 𝓕(f,g,h) consists of the planes
//! `π_t : f(t)x₀ + g(t)x₁ + h(t)x₂ − x₃ = 0`, so π₀ is `x₃ = 0` and the
//! vertex V = ⟨0,0,0,1⟩ lies on none of them.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf::{Felt, Field};
use crate::linalg::Matrix;
use crate::projgeom::{Homography, Line2, Plane3, Point2, Point3};
use crate::zspace::{combine, interpolate, rank_and_kernel, Kernel, ZFunc};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Flock {
    field: Field,
    f: ZFunc,
    g: ZFunc,
    h: ZFunc,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StarStatus {
    NonStar,
    /// All planes pass through this point of `x₃ = 0`.
    ProperStar(Point3),
    /// All planes contain this line of `x₃ = 0`.
    Linear(Line2),
}

/// Serialized form: `{"field": "...", "f": [...], "g": [...], "h": [...]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlockRecord {
    pub field: String,
    pub f: Vec<u32>,
    pub g: Vec<u32>,
    pub h: Vec<u32>,
}

impl Flock {
    pub fn new(field: &Field, f: ZFunc, g: ZFunc, h: ZFunc) -> Result<Flock> {
        let n = field.size() - 1;
        for z in [&f, &g, &h] {
            if z.coeffs().len() != n {
                return Err(Error::FieldMismatch);
            }
        }
        if f.is_zero() && g.is_zero() && h.is_zero() {
            return Err(Error::AllZeroFunctions);
        }
        Ok(Flock {
            field: field.clone(),
            f,
            g,
            h,
        })
    }

    /// Parses `"f;g;h"` or `"F(f; g; h)"`.
    pub fn parse(field: &Field, text: &str) -> Result<Flock> {
        let trimmed = text.trim();
        let (body, offset) = match trimmed.strip_prefix("F(").and_then(|s| s.strip_suffix(')')) {
            Some(inner) => (inner, text.find("F(").unwrap_or(0) + 2),
            None => (text, 0),
        };
        let parts: Vec<&str> = body.split(';').collect();
        if parts.len() != 3 {
            return Err(Error::parse(
                1,
                format!("expected three functions separated by ';', found {}", parts.len()),
            ));
        }
        let mut funcs = Vec::with_capacity(3);
        let mut start = offset;
        for part in parts {
            let z = ZFunc::parse(field, part).map_err(|e| match e {
                Error::Parse { line, column, message } => Error::Parse {
                    line,
                    column: column + text[..start].chars().count(),
                    message,
                },
                other => other,
            })?;
            funcs.push(z);
            start += part.len() + 1;
        }
        let h = funcs.pop().unwrap();
        let g = funcs.pop().unwrap();
        let f = funcs.pop().unwrap();
        Flock::new(field, f, g, h)
    }

    pub fn from_record(record: &FlockRecord) -> Result<Flock> {
        let field = Field::from_spec(&record.field)?;
        Flock::new(
            &field,
            ZFunc::from_codes(&field, &record.f)?,
            ZFunc::from_codes(&field, &record.g)?,
            ZFunc::from_codes(&field, &record.h)?,
        )
    }

    pub fn to_record(&self) -> FlockRecord {
        FlockRecord {
            field: self.field.spec_string(),
            f: self.f.codes(),
            g: self.g.codes(),
            h: self.h.codes(),
        }
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn f(&self) -> &ZFunc {
        &self.f
    }

    pub fn g(&self) -> &ZFunc {
        &self.g
    }

    pub fn h(&self) -> &ZFunc {
        &self.h
    }

    pub fn functions(&self) -> [&ZFunc; 3] {
        [&self.f, &self.g, &self.h]
    }

    /// `(f(t), g(t), h(t))` for every t, indexed by element code.
    pub fn value_triples(&self) -> Vec<[Felt; 3]> {
        let k = &self.field;
        let (fv, gv, hv) = (self.f.values(k), self.g.values(k), self.h.values(k));
        (0..k.size()).map(|i| [fv[i], gv[i], hv[i]]).collect()
    }

    /// π_t as `(f(t), g(t), h(t), −1)`, indexed by element code of t.
    pub fn planes(&self) -> Vec<Plane3> {
        let minus_one = self.field.neg(Felt::ONE);
        self.value_triples()
            .into_iter()
            .map(|[a, b, c]| Plane3 {
                coeffs: [a, b, c, minus_one],
            })
            .collect()
    }

    /// Whether the q planes are pairwise distinct.
    pub fn is_valid(&self) -> bool {
        let triples = self.value_triples();
        let mut seen = std::collections::HashSet::with_capacity(triples.len());
        triples.into_iter().all(|t| seen.insert(t))
    }

    /// The flock `𝓕(f∘p, g∘p, h∘p)` with `p(s) = r(s) − r(0)`.
    pub fn reparameterize(&self, r: &[Felt]) -> Result<Flock> {
        let k = &self.field;
        if r.len() != k.size() {
            return Err(Error::TableLength {
                expected: k.size(),
                got: r.len(),
            });
        }
        let r0 = r[0];
        let p: Vec<Felt> = r.iter().map(|&x| k.sub(x, r0)).collect();
        Ok(Flock {
            field: k.clone(),
            f: self.f.compose_perm(k, &p)?,
            g: self.g.compose_perm(k, &p)?,
            h: self.h.compose_perm(k, &p)?,
        })
    }

    /// `𝓕(Af, Bg, Ch)`.
    pub fn scale(&self, a: Felt, b: Felt, c: Felt) -> Result<Flock> {
        if a.is_zero() || b.is_zero() || c.is_zero() {
            return Err(Error::ZeroScale);
        }
        let k = &self.field;
        Ok(Flock {
            field: k.clone(),
            f: self.f.scale(k, a),
            g: self.g.scale(k, b),
            h: self.h.scale(k, c),
        })
    }

    /// `𝓕(kf, kg, kh)`.
    pub fn scalar(&self, s: Felt) -> Result<Flock> {
        self.scale(s, s, s)
    }

    pub fn rank_and_kernel(&self) -> (usize, Kernel) {
        rank_and_kernel(&self.field, &self.f, &self.g, &self.h)
    }

    pub fn star_status(&self) -> StarStatus {
        match self.rank_and_kernel().1 {
            Kernel::Trivial => StarStatus::NonStar,
            Kernel::Point(p) => StarStatus::ProperStar(p.embed()),
            Kernel::Line(l) => StarStatus::Linear(l),
            Kernel::Plane => unreachable!("flocks have a nonzero coordinate function"),
        }
    }

    /// Brings a star flock to the form `𝓕(f, 0, h)` (or `𝓕(f, 0, 0)` when
    /// linear). Returns the new flock and the homography ψ of P(𝒰) with
    /// `φ̂'(ψ(P)) = φ̂(P)` on representatives.
    pub fn star_normal_form(&self) -> Result<(Flock, Homography<3>)> {
        let k = &self.field;
        let psi = match self.rank_and_kernel().1 {
            Kernel::Point(q) => {
                let [a, b, c] = q.coords();
                let one = Felt::ONE;
                let zero = Felt::ZERO;
                let rows = if !b.is_zero() {
                    let nab = k.neg(k.div(a, b)?);
                    let ncb = k.neg(k.div(c, b)?);
                    [[one, zero, zero], [nab, one, ncb], [zero, zero, one]]
                } else if !c.is_zero() {
                    let nac = k.neg(k.div(a, c)?);
                    [[one, zero, zero], [zero, zero, one], [nac, one, zero]]
                } else {
                    [[zero, one, zero], [one, zero, zero], [zero, zero, one]]
                };
                Homography::acting_on_rows(k, rows)?
            }
            Kernel::Line(line) => {
                let l = line.coeffs();
                let basis: Vec<Vec<Felt>> = Matrix::from_rows(&[l]).nullspace(k);
                let (u, v) = (&basis[0], &basis[1]);
                let w = (0..3)
                    .map(|i| {
                        let mut e = [Felt::ZERO; 3];
                        e[i] = Felt::ONE;
                        e
                    })
                    .find(|e| !line.contains(k, &Point2::new(k, *e).expect("unit vector")))
                    .expect("a line misses some coordinate point");
                let inv = Matrix::from_rows(&[
                    [w[0], u[0], v[0]],
                    [w[1], u[1], v[1]],
                    [w[2], u[2], v[2]],
                ]);
                Homography::from_matrix(k, inv.inverse(k)?, 0)?
            }
            _ => return Err(Error::NotAStarFlock),
        };
        let back = psi.inverse(k);
        let image = |j: usize| {
            let mut e = [Felt::ZERO; 3];
            e[j] = Felt::ONE;
            combine(k, back.apply_vec(k, e), self.functions())
        };
        let flock = Flock {
            field: k.clone(),
            f: image(0),
            g: image(1),
            h: image(2),
        };
        debug_assert!(flock.g.is_zero());
        Ok((flock, psi))
    }

    /// Applies a collineation of PG(3,q) to the planes and reads the image
    /// back in standard position, reparameterizing by `s = t − t₀` where
    /// π_{t₀} is the plane sent to `x₃ = 0`.
    pub fn collineate(&self, h: &Homography<4>) -> Result<Flock> {
        let k = &self.field;
        let mut images = Vec::with_capacity(k.size());
        for plane in self.planes() {
            let w = h.apply_to_plane(k, &plane).coeffs;
            if w[3].is_zero() {
                return Err(Error::StructureNotPreserved(format!(
                    "image of {plane} contains the vertex"
                )));
            }
            let s = k.neg(k.inv(w[3])?);
            images.push([k.mul(w[0], s), k.mul(w[1], s), k.mul(w[2], s)]);
        }
        let zero = [Felt::ZERO; 3];
        let t0 = images
            .iter()
            .position(|v| *v == zero)
            .ok_or_else(|| Error::StructureNotPreserved("no image plane is x3 = 0".into()))?;
        let t0 = Felt::from_code(t0 as u32);
        let mut cols = [vec![], vec![], vec![]];
        for s in k.elements() {
            let v = images[k.add(s, t0).code() as usize];
            for j in 0..3 {
                cols[j].push(v[j]);
            }
        }
        let [f, g, h] = cols;
        Flock::new(k, interpolate(k, &f)?, interpolate(k, &g)?, interpolate(k, &h)?)
    }

    /// Whether both flocks consist of the same planes, and if so the
    /// permutation `p` with `π'_s = π_{p(s)}` (indexed by element code).
    pub fn same_planes(&self, other: &Flock) -> Option<Vec<Felt>> {
        if self.field != other.field {
            return None;
        }
        let index: HashMap<[Felt; 3], usize> = self
            .value_triples()
            .into_iter()
            .enumerate()
            .map(|(i, t)| (t, i))
            .collect();
        if index.len() != self.field.size() {
            return None;
        }
        other
            .value_triples()
            .into_iter()
            .map(|t| index.get(&t).map(|&i| Felt::from_code(i as u32)))
            .collect()
    }
}

impl fmt::Display for Flock {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F({}; {}; {})", self.f, self.g, self.h)
    }
}

impl Homography<4> {
    /// Converts a matrix that acts on the column `(f(t), g(t), h(t), 1)ᵀ`
    /// of plane coordinates, as flock collineations are usually displayed,
    /// into the point homography inducing it.
    pub fn from_flock_matrix(field: &Field, m: [[Felt; 4]; 4]) -> Result<Self> {
        // plane vector u = D·(f,g,h,1) with D = diag(1,1,1,−1); planes map by D·M·D
        let mut rows = m;
        for (i, row) in rows.iter_mut().enumerate() {
            for (j, x) in row.iter_mut().enumerate() {
                if (i == 3) != (j == 3) {
                    *x = field.neg(*x);
                }
            }
        }
        let plane_matrix = Matrix::from_rows(&rows);
        let point_matrix = plane_matrix.inverse(field)?.transpose();
        Homography::from_matrix(field, point_matrix, 0)
    }

    pub fn from_flock_matrix_ints(field: &Field, m: [[i64; 4]; 4]) -> Result<Self> {
        Self::from_flock_matrix(field, m.map(|r| r.map(|x| field.from_int(x))))
    }

    /// Whether V = ⟨0,0,0,1⟩ is fixed.
    pub fn fixes_vertex(&self) -> bool {
        let m = self.matrix();
        (0..3).all(|i| m[(i, 3)].is_zero())
    }

    /// The induced map on lines through V, as a homography of `x₃ = 0`.
    pub fn quotient_at_vertex(&self, field: &Field) -> Result<Homography<3>> {
        if !self.fixes_vertex() {
            return Err(Error::StructureNotPreserved("collineation moves the vertex".into()));
        }
        let m = self.matrix();
        let rows: [[Felt; 3]; 3] = std::array::from_fn(|i| std::array::from_fn(|j| m[(i, j)]));
        Homography::semilinear(field, rows, self.frobenius_exponent())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k(q: u64) -> Field {
        Field::with_order(q).unwrap()
    }

    fn fl(field: &Field, s: &str) -> Flock {
        Flock::parse(field, s).unwrap()
    }

    #[test]
    fn planes_of_ftw() {
        let f5 = k(5);
        let ftw = fl(&f5, "t;t^2;t^3");
        let planes = ftw.planes();
        assert_eq!(planes[2].codes(), [2, 4, 3, 4]);
        assert_eq!(planes[0].codes(), [0, 0, 0, 4]);
        let v = Point3::from_ints(&f5, [0, 0, 0, 1]).unwrap();
        assert!(planes.iter().all(|p| !p.contains(&f5, &v)));
    }

    #[test]
    fn validity() {
        let f5 = k(5);
        assert!(fl(&f5, "t;t^2;t^3").is_valid());
        assert!(!fl(&f5, "t^2;2*t^2;0").is_valid());
        assert!(fl(&f5, "t^2;t;0").is_valid());
    }

    #[test]
    fn parse_forms_and_errors() {
        let f7 = k(7);
        assert_eq!(fl(&f7, "F(t; t^3; t^5)"), fl(&f7, "t;t^3;t^5"));
        assert_eq!(fl(&f7, "t;t^3;t^5").to_string(), "F(t; t^3; t^5)");
        assert!(matches!(
            Flock::parse(&f7, "t;t^3;8*t").unwrap_err(),
            Error::Parse { column: 7, .. }
        ));
        assert!(matches!(Flock::parse(&f7, "t;t^3").unwrap_err(), Error::Parse { .. }));
        assert_eq!(Flock::parse(&f7, "0;0;0").unwrap_err(), Error::AllZeroFunctions);
        let rec = fl(&f7, "t;t^3;t^5").to_record();
        assert_eq!(Flock::from_record(&rec).unwrap(), fl(&f7, "t;t^3;t^5"));
    }

    #[test]
    fn reparameterization() {
        let f8 = k(8);
        let ftw = fl(&f8, "t;t^2;t^3");
        let id: Vec<Felt> = f8.elements().collect();
        assert_eq!(ftw.reparameterize(&id).unwrap(), ftw);
        let sq: Vec<Felt> = f8.elements().map(|x| f8.mul(x, x)).collect();
        let re = ftw.reparameterize(&sq).unwrap();
        assert_eq!(re, fl(&f8, "t^2;t^4;t^6"));
        assert!(ftw.same_planes(&re).is_some());
    }

    #[test]
    fn scaling() {
        let f5 = k(5);
        let ftw = fl(&f5, "t;t^2;t^3");
        let three = f5.from_int(3);
        assert_eq!(ftw.scale(Felt::ONE, three, three).unwrap(), fl(&f5, "t;3*t^2;3*t^3"));
        assert_eq!(ftw.scalar(Felt::ONE).unwrap(), ftw);
        assert_eq!(ftw.scale(Felt::ZERO, three, three).unwrap_err(), Error::ZeroScale);
    }

    #[test]
    fn star_statuses() {
        let f5 = k(5);
        assert_eq!(fl(&f5, "t;t^2;t^3").star_status(), StarStatus::NonStar);
        assert_eq!(
            fl(&f5, "t;2*t;t^2").star_status(),
            StarStatus::ProperStar(Point3::from_ints(&f5, [1, 2, 0, 0]).unwrap())
        );
        assert_eq!(
            fl(&f5, "t;2*t;3*t").star_status(),
            StarStatus::Linear(Line2::new(&f5, [1, 2, 3].map(|x| f5.from_int(x))).unwrap())
        );
    }

    /// The common point of a star flock lies on every plane.
    #[test]
    fn star_point_is_common() {
        let f7 = k(7);
        for s in ["t;2*t;t^2", "t^2 + t;t^2;t", "t^4;3*t^5;0", "0;t^3;2*t^3 + t"] {
            let flock = fl(&f7, s);
            if let StarStatus::ProperStar(p) = flock.star_status() {
                assert!(flock.planes().iter().all(|pl| pl.contains(&f7, &p)), "{s}");
            } else {
                panic!("{s} should be a proper star");
            }
        }
    }

    #[test]
    fn normal_forms() {
        let f5 = k(5);
        let (nf, psi) = fl(&f5, "t;2*t;t^2").star_normal_form().unwrap();
        assert!(nf.g().is_zero());
        let q = Point2::from_ints(&f5, [1, 2, 0]).unwrap();
        assert_eq!(psi.apply(&f5, &q), Point2::from_ints(&f5, [0, 1, 0]).unwrap());

        // kernel ⟨1,0,0⟩: ψ₃ swaps the first two coordinates, F(g, 0, h)
        let flock = fl(&f5, "0;t^3;t");
        let (nf, psi) = flock.star_normal_form().unwrap();
        assert_eq!(nf, fl(&f5, "t^3;0;t"));
        assert_eq!(psi.rows()[0][1], Felt::ONE);

        // b = 0, c ≠ 0: F(f, 0, g)
        let flock = fl(&f5, "t;t^2;4*t");
        let (nf, _) = flock.star_normal_form().unwrap();
        assert_eq!(nf, fl(&f5, "t;0;t^2"));

        let (nf, _) = fl(&f5, "t;2*t;3*t").star_normal_form().unwrap();
        assert!(nf.g().is_zero() && nf.h().is_zero() && !nf.f().is_zero());

        assert_eq!(
            fl(&f5, "t;t^2;t^3").star_normal_form().unwrap_err(),
            Error::NotAStarFlock
        );
    }

    #[test]
    fn collineation_of_kantor_payne() {
        let f7 = k(7);
        let kp = fl(&f7, "t;t^3;t^5");
        for a in f7.elements() {
            let (a1, a3, a5) = (a, f7.pow(a, 3), f7.pow(a, 5));
            let n = |x| f7.neg(x);
            let (o, z) = (Felt::ONE, Felt::ZERO);
            let m = [[o, z, z, n(a1)], [z, o, z, n(a3)], [z, z, o, n(a5)], [z, z, z, o]];
            let h = Homography::from_flock_matrix(&f7, m).unwrap();
            let image = kp.collineate(&h).unwrap();
            // (t+a)^k − a^k by value table
            let shifted = |e: u64| {
                let v: Vec<Felt> = f7
                    .elements()
                    .map(|t| f7.sub(f7.pow(f7.add(t, a), e), f7.pow(a, e)))
                    .collect();
                interpolate(&f7, &v).unwrap()
            };
            let expected = Flock::new(&f7, ZFunc::t(&f7), shifted(3), shifted(5)).unwrap();
            assert_eq!(image, expected, "a = {a}");
            assert!(h.fixes_vertex());
            assert_eq!(h.quotient_at_vertex(&f7).unwrap(), Homography::identity(&f7));
        }
    }

    #[test]
    fn ftw_scaling_matrix() {
        let f5 = k(5);
        let ftw = fl(&f5, "t;t^2;t^3");
        let h = Homography::from_flock_matrix_ints(
            &f5,
            [[1, 0, 0, 0], [0, 3, 0, 0], [0, 0, 3, 0], [0, 0, 0, 1]],
        )
        .unwrap();
        assert_eq!(ftw.collineate(&h).unwrap(), fl(&f5, "t;3*t^2;3*t^3"));
        assert_eq!(ftw.collineate(&Homography::identity(&f5)).unwrap(), ftw);
    }

    #[test]
    fn collineation_moving_vertex_onto_a_plane_fails() {
        let f5 = k(5);
        let ftw = fl(&f5, "t;t^2;t^3");
        // swap x0 and x3: the vertex goes to ⟨1,0,0,0⟩, which lies on π₀
        let h = Homography::from_ints(
            &f5,
            [[0, 0, 0, 1], [0, 1, 0, 0], [0, 0, 1, 0], [1, 0, 0, 0]],
        )
        .unwrap();
        assert!(matches!(ftw.collineate(&h), Err(Error::StructureNotPreserved(_))));
    }
}
