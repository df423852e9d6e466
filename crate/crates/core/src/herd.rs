//! Herd spaces Γ(f,g,h), herd covers, ρ-herds, critical cones and
//! reconstruction of a flock from three herd functions.

use std::collections::HashMap;
use std::fmt;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::flock::Flock;
use crate::gf::{Felt, Field};
use crate::linalg::Matrix;
use crate::projgeom::{collinear, enumerate_pg2, line_through, pg2_index, Line2, Point2, Point3};
use crate::zspace::{combine, is_permutation_table, rank_and_kernel, Kernel, ZClass, ZFunc};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HerdEntry {
    pub point: Point2,
    pub class: ZClass,
    /// Whether the class is a permutation point.
    pub permutation: bool,
}

/// The graph of φ̂ : P(𝒰) → P(𝒱), one entry per point of PG(2,q) in
/// enumeration order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HerdSpace {
    field: Field,
    functions: [ZFunc; 3],
    entries: Vec<HerdEntry>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HerdKind {
    Bijective,
    ProperStar {
        kernel: Point2,
        /// Every line through the kernel carries a single class off the kernel.
        lines_constant: bool,
    },
    Linear {
        kernel: Line2,
    },
}

impl HerdSpace {
    pub fn build(field: &Field, f: &ZFunc, g: &ZFunc, h: &ZFunc) -> Result<HerdSpace> {
        if f.is_zero() && g.is_zero() && h.is_zero() {
            return Err(Error::AllZeroFunctions);
        }
        let (vf, vg, vh) = (f.values(field), g.values(field), h.values(field));
        let entries = enumerate_pg2(field)
            .into_par_iter()
            .map(|point| {
                let [a, b, c] = point.coords();
                let values: Vec<Felt> = (0..field.size())
                    .map(|i| {
                        let x = field.add(field.mul(a, vf[i]), field.mul(b, vg[i]));
                        field.add(x, field.mul(c, vh[i]))
                    })
                    .collect();
                let class = combine(field, [a, b, c], [f, g, h]).class(field);
                let permutation = is_permutation_table(&values);
                HerdEntry {
                    point,
                    class,
                    permutation,
                }
            })
            .collect();
        Ok(HerdSpace {
            field: field.clone(),
            functions: [f.clone(), g.clone(), h.clone()],
            entries,
        })
    }

    pub fn of_flock(flock: &Flock) -> HerdSpace {
        let [f, g, h] = flock.functions();
        Self::build(flock.field(), f, g, h).expect("flocks have a nonzero function")
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn functions(&self) -> [&ZFunc; 3] {
        let [f, g, h] = &self.functions;
        [f, g, h]
    }

    pub fn entries(&self) -> &[HerdEntry] {
        &self.entries
    }

    pub fn entry(&self, p: &Point2) -> &HerdEntry {
        &self.entries[pg2_index(&self.field, p)]
    }

    /// φ̂(P).
    pub fn class_of(&self, p: &Point2) -> &ZClass {
        &self.entry(p).class
    }

    /// φ(v) for an explicit vector v.
    pub fn phi(&self, v: [Felt; 3]) -> ZFunc {
        combine(&self.field, v, self.functions())
    }

    /// Two distinct parameters give the same value triple.
    pub fn is_degenerate(&self) -> bool {
        let [f, g, h] = self.functions();
        let flock = Flock::new(&self.field, f.clone(), g.clone(), h.clone()).expect("nonzero");
        !flock.is_valid()
    }

    pub fn cover(&self) -> HerdCover {
        let pairs = self
            .entries
            .iter()
            .filter(|e| e.permutation)
            .map(|e| (e.point, e.class.rep().expect("permutations are nonzero").clone()))
            .collect();
        HerdCover { pairs }
    }

    /// P_HC in enumeration order.
    pub fn phc(&self) -> Vec<Point2> {
        self.entries.iter().filter(|e| e.permutation).map(|e| e.point).collect()
    }

    pub fn rank_and_kernel(&self) -> (usize, Kernel) {
        let [f, g, h] = self.functions();
        rank_and_kernel(&self.field, f, g, h)
    }

    pub fn classify(&self) -> HerdKind {
        match self.rank_and_kernel().1 {
            Kernel::Trivial => HerdKind::Bijective,
            Kernel::Point(q) => HerdKind::ProperStar {
                kernel: q,
                lines_constant: self.star_lines_constant(&q),
            },
            Kernel::Line(l) => HerdKind::Linear { kernel: l },
            Kernel::Plane => unreachable!("herd spaces have a nonzero function"),
        }
    }

    fn star_lines_constant(&self, q: &Point2) -> bool {
        let mut by_line: HashMap<Line2, &ZClass> = HashMap::new();
        for e in &self.entries {
            if e.point == *q {
                if !e.class.is_zero() {
                    return false;
                }
                continue;
            }
            let line = line_through(&self.field, q, &e.point).expect("distinct");
            match by_line.get(&line) {
                Some(c) if *c != &e.class => return false,
                Some(_) => {}
                None => {
                    by_line.insert(line, &e.class);
                }
            }
        }
        true
    }

    /// Points whose class is ⟨0⟩.
    pub fn zero_points(&self) -> Vec<Point2> {
        self.entries.iter().filter(|e| e.class.is_zero()).map(|e| e.point).collect()
    }

    /// The ρ-herd for a selection, over P_HC.
    pub fn rho_herd(&self, selection: &Selection) -> Result<RhoHerd> {
        let mut members = Vec::new();
        for (point, _) in self.cover().pairs {
            let rep = selection.representative(self, &point)?;
            members.push(HerdMember {
                point,
                rep,
                function: self.phi(rep),
            });
        }
        Ok(RhoHerd {
            selection: selection.name().to_string(),
            members,
        })
    }
}

/// The permutation part of a herd space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HerdCover {
    /// (P, canonical representative of φ̂(P)).
    pub pairs: Vec<(Point2, ZFunc)>,
}

impl HerdCover {
    pub fn phc(&self) -> Vec<Point2> {
        self.pairs.iter().map(|(p, _)| *p).collect()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

/// A herd selection function ρ.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Selection {
    /// `(x,y,1)`, `(1,m,0)`, `(0,1,0)`.
    Standardized,
    /// Leftmost nonzero coordinate 1.
    Alternate,
    /// Scaled so that `f_P(1) = 1`.
    Normalized,
    Custom(HashMap<Point2, [Felt; 3]>),
}

impl Selection {
    pub fn name(&self) -> &'static str {
        match self {
            Selection::Standardized => "standardized",
            Selection::Alternate => "alternate",
            Selection::Normalized => "normalized",
            Selection::Custom(_) => "custom",
        }
    }

    pub fn representative(&self, herd: &HerdSpace, p: &Point2) -> Result<[Felt; 3]> {
        let k = herd.field();
        let [a, b, c] = p.coords();
        match self {
            Selection::Alternate => Ok(p.coords()),
            Selection::Standardized => {
                if !c.is_zero() {
                    Ok([k.div(a, c)?, k.div(b, c)?, Felt::ONE])
                } else if !a.is_zero() {
                    Ok([Felt::ONE, k.div(b, a)?, Felt::ZERO])
                } else {
                    Ok([Felt::ZERO, Felt::ONE, Felt::ZERO])
                }
            }
            Selection::Normalized => {
                let at_one = herd.phi(p.coords()).eval(k, Felt::ONE);
                let s = k.inv(at_one)?;
                Ok([k.mul(a, s), k.mul(b, s), k.mul(c, s)])
            }
            Selection::Custom(table) => {
                let rep = *table
                    .get(p)
                    .ok_or_else(|| Error::CustomRhoNotRepresentative(format!("{p} has no entry")))?;
                match Point2::new(k, rep) {
                    Ok(q) if q == *p => Ok(rep),
                    _ => Err(Error::CustomRhoNotRepresentative(format!(
                        "{} for {p}",
                        rep.map(|x| x.to_string()).join(":")
                    ))),
                }
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HerdMember {
    pub point: Point2,
    /// ρ(P).
    pub rep: [Felt; 3],
    /// f_P = φ(ρ(P)).
    pub function: ZFunc,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RhoHerd {
    pub selection: String,
    pub members: Vec<HerdMember>,
}

impl RhoHerd {
    pub fn member(&self, p: &Point2) -> Option<&HerdMember> {
        self.members.iter().find(|m| m.point == *p)
    }

    /// Three members with non-collinear points, earliest in enumeration order.
    pub fn anchors(&self, field: &Field) -> Option<[&HerdMember; 3]> {
        let n = self.members.len();
        for i in 0..n {
            for j in i + 1..n {
                for l in j + 1..n {
                    let pts = [self.members[i].point, self.members[j].point, self.members[l].point];
                    if !collinear(field, &pts) {
                        return Some([&self.members[i], &self.members[j], &self.members[l]]);
                    }
                }
            }
        }
        None
    }

    /// Rebuilds the flock from three non-collinear members.
    pub fn reconstruct(&self, field: &Field) -> Result<Flock> {
        let [x, y, z] = self.anchors(field).ok_or(Error::CollinearAnchors)?;
        reconstruct_flock(
            field,
            [
                (x.rep, x.function.clone()),
                (y.rep, y.function.clone()),
                (z.rep, z.function.clone()),
            ],
        )
    }
}

impl fmt::Display for RhoHerd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for m in &self.members {
            writeln!(f, "{}\t{}", m.point, m.function)?;
        }
        Ok(())
    }
}

/// Solves `(f,g,h)ᵀ = R⁻¹ (f₁,f₂,f₃)ᵀ` where the rows of R are the given
/// representatives ρ(P_i) and f_i = φ(ρ(P_i)).
pub fn reconstruct_flock(field: &Field, anchors: [([Felt; 3], ZFunc); 3]) -> Result<Flock> {
    let mut points = Vec::with_capacity(3);
    for (rep, _) in &anchors {
        points.push(Point2::new(field, *rep).map_err(|_| Error::SingularSystem)?);
    }
    let reps: Vec<[Felt; 3]> = anchors.iter().map(|(r, _)| *r).collect();
    let r = Matrix::from_rows(&reps);
    if collinear(field, &points) || r.det(field).is_zero() {
        return Err(Error::CollinearAnchors);
    }
    let inv = r.inverse(field).map_err(|_| Error::SingularSystem)?;
    let funcs: Vec<ZFunc> = (0..3)
        .map(|i| {
            combine(
                field,
                [inv[(i, 0)], inv[(i, 1)], inv[(i, 2)]],
                [&anchors[0].1, &anchors[1].1, &anchors[2].1],
            )
        })
        .collect();
    let [f, g, h]: [ZFunc; 3] = funcs.try_into().expect("three functions");
    Flock::new(field, f, g, h)
}

/// Carrier of the critical cone: P_HC in the plane `x₃ = 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CriticalCone {
    pub carrier: Vec<Point3>,
    /// Empty, at most two points, or collinear.
    pub flat: bool,
}

pub fn critical_cone(flock: &Flock) -> CriticalCone {
    let phc = HerdSpace::of_flock(flock).phc();
    let flat = collinear(flock.field(), &phc);
    CriticalCone {
        carrier: phc.iter().map(|p| p.embed()).collect(),
        flat,
    }
}

/// The k with `(f',g',h') = (kf, kg, kh)` when both flocks have the same
/// herd space.
pub fn same_herd_space(a: &Flock, b: &Flock) -> Option<Felt> {
    if a.field() != b.field() {
        return None;
    }
    let (ha, hb) = (HerdSpace::of_flock(a), HerdSpace::of_flock(b));
    if ha.entries.iter().zip(&hb.entries).any(|(x, y)| x.class != y.class) {
        return None;
    }
    let k = a.field();
    let (fa, fb) = (a.functions(), b.functions());
    let (i, j) = (0..3).find_map(|i| fa[i].low_degree().map(|d| (i, d)))?;
    let ratio = k.div(fb[i].coeff(j), fa[i].coeff(j)).ok()?;
    (0..3)
        .all(|i| fa[i].scale(k, ratio) == *fb[i])
        .then_some(ratio)
}
