//! Equivalence of herd spaces: a collineation ψ of P(𝒰) and a collineation τ
//! of P(𝒵) with τ(φ̂(P)) = φ̂'(ψ(P)) for every point P.

use std::collections::HashSet;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::flock::Flock;
use crate::gf::{Felt, Field};
use crate::herd::HerdSpace;
use crate::linalg::Matrix;
use crate::projgeom::{enumerate_pg2, Homography, Point2};
use crate::zspace::{combine, rank_and_kernel, Kernel, ZClass, ZFunc};

/// The collineation τ of P(𝒵), restricted to the forms that can be
/// evaluated on a span ⟨f,g,h⟩.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tau {
    Identity,
    /// `⟨F⟩ ↦ ⟨F∘p⟩` for a permutation table p with p(0) = 0.
    Perm(Vec<Felt>),
    /// The linear map sending the current triple to the given one.
    Basis([ZFunc; 3]),
    /// Applied left to right.
    Composite(Vec<Tau>),
}

impl Tau {
    /// Images of f, g, h under τ.
    pub fn images(&self, field: &Field, source: [&ZFunc; 3]) -> Result<[ZFunc; 3]> {
        let mut cur = source.map(|z| z.clone());
        self.apply(field, &mut cur)?;
        Ok(cur)
    }

    fn apply(&self, field: &Field, cur: &mut [ZFunc; 3]) -> Result<()> {
        match self {
            Tau::Identity => {}
            Tau::Perm(p) => {
                for z in cur.iter_mut() {
                    *z = z.compose_perm(field, p)?;
                }
            }
            Tau::Basis(target) => {
                let (src_rank, src_kernel) = rank_and_kernel(field, &cur[0], &cur[1], &cur[2]);
                let (dst_rank, _) = rank_and_kernel(field, &target[0], &target[1], &target[2]);
                if src_rank != dst_rank {
                    return Err(Error::TauUndefined(format!(
                        "span of rank {src_rank} cannot map onto rank {dst_rank}"
                    )));
                }
                let relations: Vec<[Felt; 3]> = match src_kernel {
                    Kernel::Trivial => vec![],
                    Kernel::Point(p) => vec![p.coords()],
                    Kernel::Line(l) => {
                        let ns = Matrix::from_rows(&[l.coeffs()]).nullspace(field);
                        ns.iter().map(|v| [v[0], v[1], v[2]]).collect()
                    }
                    Kernel::Plane => vec![],
                };
                for r in relations {
                    if !combine(field, r, [&target[0], &target[1], &target[2]]).is_zero() {
                        return Err(Error::TauUndefined(format!(
                            "relation {} does not hold among the targets",
                            r.map(|x| x.to_string()).join(":")
                        )));
                    }
                }
                *cur = target.clone();
            }
            Tau::Composite(parts) => {
                for t in parts {
                    t.apply(field, cur)?;
                }
            }
        }
        Ok(())
    }

    pub fn is_identity(&self) -> bool {
        match self {
            Tau::Identity => true,
            Tau::Composite(parts) => parts.iter().all(Tau::is_identity),
            _ => false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub psi: Homography<3>,
    pub tau: Tau,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Level {
    Equivalent,
    Strong,
    Herd,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquivalenceReport {
    pub level: Level,
    /// τ(⟨f,g,h⟩) = ⟨f',g',h'⟩.
    pub spans_match: bool,
    /// First point where τ(φ̂(P)) ≠ φ̂'(ψ(P)), if any.
    pub first_failure: Option<Point2>,
    /// ψ(P_HC) = P_HC'.
    pub psi_maps_cover: bool,
    /// P_HC = P_HC'.
    pub same_cover: bool,
    /// τ keeps permutation classes of the span as permutation classes, and
    /// non-permutation classes outside 𝒮.
    pub preserves_s: bool,
    pub holds: bool,
}

impl EquivalenceReport {
    pub fn diagram_commutes(&self) -> bool {
        self.spans_match && self.first_failure.is_none()
    }
}

fn check_fields(a: &HerdSpace, b: &HerdSpace) -> Result<()> {
    if a.field() != b.field() {
        return Err(Error::FieldMismatch);
    }
    Ok(())
}

struct Diagram {
    spans_match: bool,
    first_failure: Option<Point2>,
    /// τ(φ̂(P)) for every point, in enumeration order.
    tau_images: Vec<ZClass>,
}

fn diagram(g1: &HerdSpace, g2: &HerdSpace, w: &Witness) -> Result<Diagram> {
    let k = g1.field();
    let targets = w.tau.images(k, g1.functions())?;
    let [t1, t2, t3] = &targets;
    let [f2, g2f, h2] = g2.functions();
    let (r_t, _) = rank_and_kernel(k, t1, t2, t3);
    let (r_2, _) = rank_and_kernel(k, f2, g2f, h2);
    let joint = Matrix::from_rows(&[
        t1.coeffs(),
        t2.coeffs(),
        t3.coeffs(),
        f2.coeffs(),
        g2f.coeffs(),
        h2.coeffs(),
    ])
    .rank(k);
    let spans_match = r_t == r_2 && joint == r_2;
    let mut tau_images = Vec::with_capacity(g1.entries().len());
    let mut first_failure = None;
    for e in g1.entries() {
        let image = combine(k, e.point.coords(), [t1, t2, t3]).class(k);
        if first_failure.is_none() && g2.class_of(&w.psi.apply(k, &e.point)) != &image {
            first_failure = Some(e.point);
        }
        tau_images.push(image);
    }
    Ok(Diagram {
        spans_match,
        first_failure,
        tau_images,
    })
}

pub fn verify_equivalence(
    g1: &HerdSpace,
    g2: &HerdSpace,
    w: &Witness,
    level: Level,
) -> Result<EquivalenceReport> {
    check_fields(g1, g2)?;
    let k = g1.field();
    let d = diagram(g1, g2, w)?;
    let phc1: HashSet<Point2> = g1.phc().into_iter().collect();
    let phc2: HashSet<Point2> = g2.phc().into_iter().collect();
    let mapped: HashSet<Point2> = phc1.iter().map(|p| w.psi.apply(k, p)).collect();
    let psi_maps_cover = mapped == phc2;
    let same_cover = phc1 == phc2;
    let preserves_s = g1.entries().iter().zip(&d.tau_images).all(|(e, img)| {
        let in_s = img.rep().is_some_and(|r| r.is_permutation(k));
        in_s == e.permutation
    });
    let commutes = d.spans_match && d.first_failure.is_none();
    let equivalent = commutes && psi_maps_cover;
    let strong = equivalent && same_cover;
    let herd = strong && preserves_s;
    Ok(EquivalenceReport {
        level,
        spans_match: d.spans_match,
        first_failure: d.first_failure,
        psi_maps_cover,
        same_cover,
        preserves_s,
        holds: match level {
            Level::Equivalent => equivalent,
            Level::Strong => strong,
            Level::Herd => herd,
        },
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CReport {
    pub c_equivalent: bool,
    pub strong: bool,
}

pub fn verify_c_equivalence(
    g1: &HerdSpace,
    g2: &HerdSpace,
    c: &[Point2],
    w: &Witness,
) -> Result<CReport> {
    check_fields(g1, g2)?;
    let k = g1.field();
    let phc1: HashSet<Point2> = g1.phc().into_iter().collect();
    if let Some(p) = c.iter().find(|p| !phc1.contains(p)) {
        return Err(Error::CNotInCover(p.to_string()));
    }
    let d = diagram(g1, g2, w)?;
    let phc2: HashSet<Point2> = g2.phc().into_iter().collect();
    let cset: HashSet<Point2> = c.iter().copied().collect();
    let image: HashSet<Point2> = c.iter().map(|p| w.psi.apply(k, p)).collect();
    let c_equivalent = d.spans_match && d.first_failure.is_none() && image.is_subset(&phc2);
    Ok(CReport {
        c_equivalent,
        strong: c_equivalent && image == cset,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Group {
    Pgl3,
    PGammaL3,
}

/// Number of candidates [`search_equivalence_tau_id`] would examine.
pub fn search_size(g1: &HerdSpace, g2: &HerdSpace, group: Group) -> u64 {
    let cands = preimage_candidates(g1, g2);
    let k = g1.field();
    let units = k.q() as u64 - 1;
    let frob = match group {
        Group::Pgl3 => 1,
        Group::PGammaL3 => k.e() as u64,
    };
    cands
        .iter()
        .fold(1u64, |acc, c| acc.saturating_mul(c.len() as u64))
        .saturating_mul(units * units * frob)
}

/// For each basis point e_j, the points P with φ̂'(P) = φ̂(e_j).
fn preimage_candidates(g1: &HerdSpace, g2: &HerdSpace) -> [Vec<Point2>; 3] {
    let k = g1.field();
    std::array::from_fn(|j| {
        let mut e = [Felt::ZERO; 3];
        e[j] = Felt::ONE;
        let target = g1.class_of(&Point2::new(k, e).expect("unit vector"));
        g2.entries()
            .iter()
            .filter(|x| &x.class == target)
            .map(|x| x.point)
            .collect()
    })
}

/// Exhaustive search for ψ with φ̂(P) = φ̂'(ψ(P)) for all P (τ = id).
///
/// Column j of ψ must be a representative of a preimage of φ̂(e_j); the
/// first column is fixed projectively and the other two are scaled by every
/// unit. The scan order is deterministic and the first witness in that order
/// is returned.
pub fn search_equivalence_tau_id(
    g1: &HerdSpace,
    g2: &HerdSpace,
    group: Group,
    budget: u64,
) -> Result<Option<Homography<3>>> {
    check_fields(g1, g2)?;
    let k = g1.field();
    let [f1, g1f, h1] = g1.functions();
    let [f2, g2f, h2] = g2.functions();
    // τ = id requires ⟨f,g,h⟩ = ⟨f',g',h'⟩.
    let r1 = rank_and_kernel(k, f1, g1f, h1).0;
    let r2 = rank_and_kernel(k, f2, g2f, h2).0;
    let joint = Matrix::from_rows(&[
        f1.coeffs(),
        g1f.coeffs(),
        h1.coeffs(),
        f2.coeffs(),
        g2f.coeffs(),
        h2.coeffs(),
    ])
    .rank(k);
    let needed = search_size(g1, g2, group);
    if needed > budget {
        return Err(Error::BudgetExceeded { needed, budget });
    }
    if r1 != r2 || joint != r1 {
        return Ok(None);
    }
    let cands = preimage_candidates(g1, g2);
    let units: Vec<Felt> = k.units().collect();
    let u = units.len() as u64;
    let frobs = match group {
        Group::Pgl3 => 1,
        Group::PGammaL3 => k.e(),
    };
    let sizes = [cands[0].len() as u64, cands[1].len() as u64, cands[2].len() as u64];
    let points = enumerate_pg2(k);
    let found = (0..needed).into_par_iter().find_map_first(|mut idx| {
        let l3 = units[(idx % u) as usize];
        idx /= u;
        let l2 = units[(idx % u) as usize];
        idx /= u;
        let c3 = cands[2][(idx % sizes[2]) as usize];
        idx /= sizes[2];
        let c2 = cands[1][(idx % sizes[1]) as usize];
        idx /= sizes[1];
        let c1 = cands[0][(idx % sizes[0]) as usize];
        idx /= sizes[0];
        let frob = idx as u32 % frobs;
        let cols = [
            c1.coords(),
            c2.coords().map(|x| k.mul(x, l2)),
            c3.coords().map(|x| k.mul(x, l3)),
        ];
        let rows: [[Felt; 3]; 3] = std::array::from_fn(|i| std::array::from_fn(|j| cols[j][i]));
        let psi = Homography::semilinear(k, rows, frob).ok()?;
        points
            .iter()
            .all(|p| g2.class_of(&psi.apply(k, p)) == g1.class_of(p))
            .then_some(psi)
    });
    Ok(found)
}

/// Applies σ to F1, matches the result with F2 up to reparameterization and
/// checks strong equivalence with ψ the induced map on lines through V and
/// τ the induced basis map.
pub fn verify_collineation_strong_equiv(f1: &Flock, f2: &Flock, sigma: &Homography<4>) -> Result<bool> {
    let k = f1.field();
    let image = f1.collineate(sigma)?;
    if image.same_planes(f2).is_none() {
        return Ok(false);
    }
    let psi = sigma.quotient_at_vertex(k)?;
    let (h1, h2) = (HerdSpace::of_flock(f1), HerdSpace::of_flock(f2));
    let targets: [ZFunc; 3] = std::array::from_fn(|j| {
        let mut e = [Felt::ZERO; 3];
        e[j] = Felt::ONE;
        h2.phi(psi.apply_vec(k, e))
    });
    let w = Witness {
        psi,
        tau: Tau::Basis(targets),
    };
    Ok(verify_equivalence(&h1, &h2, &w, Level::Strong)?.holds)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::projgeom::pg2_index;

    fn k(q: u64) -> Field {
        Field::with_order(q).unwrap()
    }

    fn fl(field: &Field, s: &str) -> Flock {
        Flock::parse(field, s).unwrap()
    }

    fn herd(field: &Field, s: &str) -> HerdSpace {
        HerdSpace::of_flock(&fl(field, s))
    }

    fn id_witness(field: &Field) -> Witness {
        Witness {
            psi: Homography::identity(field),
            tau: Tau::Identity,
        }
    }

    fn gf17_example() -> (Field, HerdSpace, HerdSpace, Witness) {
        let f17 = k(17);
        let g1 = herd(&f17, "t;5*t^3;5*t^5");
        let g2 = herd(&f17, "t + 7*t^3 + 3*t^5;5*t^3 + 14*t^5;5*t^5");
        let psi = Homography::from_ints(&f17, [[1, 0, 0], [2, 1, 0], [4, 4, 1]]).unwrap();
        (f17, g1, g2, Witness { psi, tau: Tau::Identity })
    }

    #[test]
    fn gf17_equivalent_not_strong() {
        let (f17, g1, g2, w) = gf17_example();
        let eq = verify_equivalence(&g1, &g2, &w, Level::Equivalent).unwrap();
        assert!(eq.holds);
        assert!(eq.psi_maps_cover);
        assert!(!verify_equivalence(&g1, &g2, &w, Level::Strong).unwrap().holds);

        let conic: Vec<Point2> = enumerate_pg2(&f17)
            .into_iter()
            .filter(|p| {
                let [a, b, c] = p.coords();
                f17.mul(a, c) == f17.mul(b, b)
            })
            .collect();
        let mut phc1 = conic.clone();
        phc1.push(Point2::from_ints(&f17, [0, 1, 0]).unwrap());
        phc1.sort_by_key(|p| pg2_index(&f17, p));
        let mut phc2 = conic.clone();
        phc2.push(Point2::from_ints(&f17, [0, 13, 1]).unwrap());
        phc2.sort_by_key(|p| pg2_index(&f17, p));
        assert_eq!(g1.phc(), phc1);
        assert_eq!(g2.phc(), phc2);

        let c = verify_c_equivalence(&g1, &g2, &conic, &w).unwrap();
        assert!(c.c_equivalent && c.strong);
    }

    #[test]
    fn c_equivalence_contract() {
        let (f17, g1, g2, w) = gf17_example();
        let off = [Point2::from_ints(&f17, [1, 1, 2]).unwrap()];
        assert!(matches!(
            verify_c_equivalence(&g1, &g2, &off, &w),
            Err(Error::CNotInCover(_))
        ));
        // the full cover is not fixed by ψ
        let c = verify_c_equivalence(&g1, &g2, &g1.phc(), &w).unwrap();
        assert!(c.c_equivalent && !c.strong);
        // a ψ that moves the conic off the second cover
        let bad = Witness {
            psi: Homography::from_ints(&f17, [[0, 1, 0], [1, 0, 0], [0, 0, 1]]).unwrap(),
            tau: Tau::Identity,
        };
        assert!(!verify_c_equivalence(&g1, &g2, &g1.phc(), &bad).unwrap().c_equivalent);
    }

    #[test]
    fn self_equivalence() {
        let f7 = k(7);
        let g = herd(&f7, "t;t^3;t^5");
        assert!(verify_equivalence(&g, &g, &id_witness(&f7), Level::Herd).unwrap().holds);
    }

    #[test]
    fn reparameterization_is_herd_equivalence() {
        let f7 = k(7);
        let flock = fl(&f7, "t;t^3;t^5");
        let r: Vec<Felt> = [3, 5, 0, 1, 6, 2, 4].map(Felt::from_code).to_vec();
        let re = flock.reparameterize(&r).unwrap();
        let p: Vec<Felt> = r.iter().map(|&x| f7.sub(x, r[0])).collect();
        let w = Witness {
            psi: Homography::identity(&f7),
            tau: Tau::Perm(p),
        };
        let rep = verify_equivalence(&HerdSpace::of_flock(&flock), &HerdSpace::of_flock(&re), &w, Level::Herd)
            .unwrap();
        assert!(rep.holds);
    }

    #[test]
    fn tau_must_be_well_defined() {
        let f5 = k(5);
        let g1 = herd(&f5, "t;2*t;t^2");
        let g2 = herd(&f5, "t;t^2;t^3");
        let w = Witness {
            psi: Homography::identity(&f5),
            tau: Tau::Basis([g2.functions()[0].clone(), g2.functions()[1].clone(), g2.functions()[2].clone()]),
        };
        assert!(matches!(
            verify_equivalence(&g1, &g2, &w, Level::Equivalent),
            Err(Error::TauUndefined(_))
        ));
    }

    #[test]
    fn levels_are_nested() {
        let (_, g1, g2, w) = gf17_example();
        let e = verify_equivalence(&g1, &g2, &w, Level::Equivalent).unwrap().holds;
        let s = verify_equivalence(&g1, &g2, &w, Level::Strong).unwrap().holds;
        let h = verify_equivalence(&g1, &g2, &w, Level::Herd).unwrap().holds;
        assert!(!h || s);
        assert!(!s || e);
    }

    fn proportional(field: &Field, a: &Homography<3>, b: &Homography<3>) -> bool {
        let norm = |h: &Homography<3>| {
            let flat: Vec<Felt> = h.rows().iter().flatten().copied().collect();
            let lead = *flat.iter().find(|x| !x.is_zero()).unwrap();
            let inv = field.inv(lead).unwrap();
            flat.iter().map(|&x| field.mul(x, inv)).collect::<Vec<_>>()
        };
        norm(a) == norm(b) && a.frobenius_exponent() == b.frobenius_exponent()
    }

    #[test]
    fn search_finds_scaling() {
        let f5 = k(5);
        let flock = fl(&f5, "t;t^2;t^3");
        let (a, b, c) = (f5.from_int(2), f5.from_int(3), f5.from_int(4));
        let scaled = flock.scale(a, b, c).unwrap();
        let (g1, g2) = (HerdSpace::of_flock(&flock), HerdSpace::of_flock(&scaled));
        let psi = search_equivalence_tau_id(&g1, &g2, Group::Pgl3, 1 << 30).unwrap().unwrap();
        let inv = |x| f5.inv(x).unwrap();
        let z = Felt::ZERO;
        let expected =
            Homography::new(&f5, [[inv(a), z, z], [z, inv(b), z], [z, z, inv(c)]]).unwrap();
        assert!(proportional(&f5, &psi, &expected));
        assert!(verify_equivalence(&g1, &g2, &Witness { psi, tau: Tau::Identity }, Level::Equivalent)
            .unwrap()
            .holds);
    }

    #[test]
    fn search_finds_change_of_basis() {
        let f7 = k(7);
        let flock = fl(&f7, "t;t^3;t^5");
        let [f, g, h] = flock.functions();
        let e = |c: [i64; 3]| c.map(|x| f7.from_int(x));
        let m = [[1, 2, 0], [0, 3, 1], [5, 0, 1]];
        let basis = m.map(|row| combine(&f7, e(row), [f, g, h]));
        let [f2, g2, h2] = basis;
        let other = Flock::new(&f7, f2, g2, h2).unwrap();
        let (g1, g2) = (HerdSpace::of_flock(&flock), HerdSpace::of_flock(&other));
        let psi = search_equivalence_tau_id(&g1, &g2, Group::Pgl3, 1 << 30).unwrap().unwrap();
        // φ'(ψ x) = φ(x) means ψ = (Mᵀ)⁻¹ up to scalar
        let mt = Matrix::from_rows(&m.map(e)).transpose().inverse(&f7).unwrap();
        let expected = Homography::from_matrix(&f7, mt, 0).unwrap();
        assert!(proportional(&f7, &psi, &expected));
    }

    #[test]
    fn search_links_linear_flocks() {
        let f5 = k(5);
        let g1 = herd(&f5, "t;0;0");
        let g2 = herd(&f5, "t;2*t;3*t");
        let psi = search_equivalence_tau_id(&g1, &g2, Group::Pgl3, 1 << 30).unwrap().unwrap();
        let k1 = match g1.rank_and_kernel().1 {
            Kernel::Line(l) => l,
            _ => unreachable!(),
        };
        let k2 = match g2.rank_and_kernel().1 {
            Kernel::Line(l) => l,
            _ => unreachable!(),
        };
        assert_eq!(psi.apply_to_line(&f5, &k1), k2);
    }

    #[test]
    fn search_budget_is_enforced() {
        let f5 = k(5);
        let g1 = herd(&f5, "t;0;0");
        let g2 = herd(&f5, "t;2*t;3*t");
        assert!(matches!(
            search_equivalence_tau_id(&g1, &g2, Group::Pgl3, 10),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn search_over_semilinear_group() {
        // the semilinear scan also covers the linear witnesses (frobenius exponent 0 first)
        let f4 = k(4);
        let g1 = herd(&f4, "t;t^2;t^3");
        let g2 = herd(&f4, "t^2;t;t^3");
        let psi = search_equivalence_tau_id(&g1, &g2, Group::PGammaL3, 1 << 30).unwrap();
        let psi = psi.expect("a witness exists");
        assert_eq!(psi.frobenius_exponent(), 0);
        for p in enumerate_pg2(&f4) {
            assert_eq!(g2.class_of(&psi.apply(&f4, &p)), g1.class_of(&p));
        }
        assert_eq!(search_size(&g1, &g2, Group::PGammaL3), 2 * search_size(&g1, &g2, Group::Pgl3));
    }

    #[test]
    fn kantor_payne_collineations() {
        let f7 = k(7);
        let kp = fl(&f7, "t;t^3;t^5");
        for a in f7.elements() {
            let n = |e| f7.neg(f7.pow(a, e));
            let (o, z) = (Felt::ONE, Felt::ZERO);
            let m = [[o, z, z, n(1)], [z, o, z, n(3)], [z, z, o, n(5)], [z, z, z, o]];
            let sigma = Homography::from_flock_matrix(&f7, m).unwrap();
            let shifted = |e: u64| {
                let v: Vec<Felt> = f7
                    .elements()
                    .map(|t| f7.sub(f7.pow(f7.add(t, a), e), f7.pow(a, e)))
                    .collect();
                crate::zspace::interpolate(&f7, &v).unwrap()
            };
            let target = Flock::new(&f7, ZFunc::t(&f7), shifted(3), shifted(5)).unwrap();
            assert!(verify_collineation_strong_equiv(&kp, &target, &sigma).unwrap());
        }
        assert!(verify_collineation_strong_equiv(&kp, &kp, &Homography::identity(&f7)).unwrap());
    }
}
