//! Permutation points of P(𝒵) for small q and the configurations behind the
//! classification of flocks for q ≤ 7.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::gf::{Felt, Field};
use crate::linalg::Matrix;
use crate::projgeom::{fit_conic, Conic, Point2};
use crate::zspace::{hermite_admissible_degrees, ZFunc};

pub const DEFAULT_BOUND: u32 = 9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EnumerateOptions {
    /// Largest q accepted.
    pub bound: u32,
    /// Skip degrees that cannot carry a permutation polynomial.
    pub hermite_prefilter: bool,
}

impl Default for EnumerateOptions {
    fn default() -> Self {
        EnumerateOptions {
            bound: DEFAULT_BOUND,
            hermite_prefilter: true,
        }
    }
}

/// The permutation points 𝒮, each represented by its monic polynomial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PermPointSet {
    pub field: Field,
    pub points: Vec<ZFunc>,
}

impl PermPointSet {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// degree → number of points.
    pub fn degree_spectrum(&self) -> BTreeMap<usize, usize> {
        let mut out = BTreeMap::new();
        for p in &self.points {
            *out.entry(p.degree().expect("nonzero")).or_default() += 1;
        }
        out
    }

    pub fn position(&self, f: &ZFunc) -> Option<usize> {
        let m = monic(&self.field, f)?;
        self.points.iter().position(|p| *p == m)
    }
}

/// Scales a nonzero function so that its top coefficient is 1.
pub fn monic(field: &Field, f: &ZFunc) -> Option<ZFunc> {
    let d = f.degree()?;
    let s = field.inv(f.coeff(d)).ok()?;
    Some(f.scale(field, s))
}

pub fn enumerate_perm_points(field: &Field) -> Result<PermPointSet> {
    enumerate_perm_points_with(field, EnumerateOptions::default())
}

pub fn enumerate_perm_points_with(field: &Field, opts: EnumerateOptions) -> Result<PermPointSet> {
    let q = field.q();
    if q > opts.bound {
        return Err(Error::BoundExceeded {
            q,
            bound: opts.bound,
        });
    }
    let n = q as usize - 1;
    let degrees: Vec<usize> = if opts.hermite_prefilter {
        hermite_admissible_degrees(q).into_iter().collect()
    } else {
        (1..=n).collect()
    };
    let elems: Vec<Felt> = field.elements().collect();
    let mut points = Vec::new();
    for d in degrees {
        // strata: the coefficient just below the leading one
        let strata: Vec<Option<Felt>> = if d == 1 {
            vec![None]
        } else {
            elems.iter().copied().map(Some).collect()
        };
        let mut found: Vec<ZFunc> = strata
            .par_iter()
            .flat_map_iter(|&below| scan_degree(field, d, below))
            .collect();
        found.sort_by_key(|f| f.codes());
        points.extend(found);
    }
    Ok(PermPointSet {
        field: field.clone(),
        points,
    })
}

fn scan_degree(field: &Field, d: usize, below: Option<Felt>) -> Vec<ZFunc> {
    let q = field.size();
    let n = q - 1;
    let free = d.saturating_sub(2);
    let mut coeffs = vec![Felt::ZERO; n];
    coeffs[d - 1] = Felt::ONE;
    if let Some(b) = below {
        coeffs[d - 2] = b;
    }
    let mut out = Vec::new();
    let total = (q as u64).pow(free as u32);
    let mut seen = vec![0u64; q];
    for idx in 0..total {
        let mut r = idx;
        for c in coeffs.iter_mut().take(free) {
            *c = Felt::from_code((r % q as u64) as u32);
            r /= q as u64;
        }
        if permutes(field, &coeffs[..d], &mut seen, idx + 1) {
            out.push(ZFunc::from_coeffs(field, coeffs.clone()).expect("length q-1"));
        }
    }
    out
}

/// Whether `Σ cᵢ tⁱ⁺¹` is injective; `seen` is a stamp array reused across calls.
fn permutes(field: &Field, c: &[Felt], seen: &mut [u64], stamp: u64) -> bool {
    for x in field.elements() {
        let mut acc = Felt::ZERO;
        for &ci in c.iter().rev() {
            acc = field.mul(field.add(acc, ci), x);
        }
        let slot = &mut seen[acc.code() as usize];
        if *slot == stamp {
            return false;
        }
        *slot = stamp;
    }
    true
}

/// Every point has zero `t^{q−1}` coefficient.
pub fn hyperplane_check(set: &PermPointSet) -> bool {
    let n = set.field.size() - 1;
    set.points.iter().all(|p| p.coeff(n).is_zero())
}

/// `3x₂² = x₀x₄ + x₁x₃` and `x₅ = 0`, with xᵢ the coefficient of tⁱ⁺¹.
pub fn on_q7_quadric(field: &Field, f: &ZFunc) -> bool {
    let x: Vec<Felt> = (1..=6).map(|k| f.coeff(k)).collect();
    let lhs = field.mul(field.from_int(3), field.mul(x[2], x[2]));
    let rhs = field.add(field.mul(x[0], x[4]), field.mul(x[1], x[3]));
    x[5].is_zero() && lhs == rhs
}

pub fn quadric_check_q7(set: &PermPointSet) -> Result<bool> {
    require_q(&set.field, 7)?;
    Ok(set.points.iter().all(|p| on_q7_quadric(&set.field, p)))
}

fn require_q(field: &Field, q: u32) -> Result<()> {
    if field.q() != q {
        return Err(Error::WrongField {
            expected: q,
            got: field.q(),
        });
    }
    Ok(())
}

/// Reduced row echelon form of the span, as a hashable signature.
fn span_signature(field: &Field, funcs: &[&ZFunc]) -> (usize, Vec<u32>) {
    let rows: Vec<&[Felt]> = funcs.iter().map(|f| f.coeffs()).collect();
    let (r, pivots) = Matrix::from_rows(&rows).rref(field);
    let rank = pivots.len();
    let codes = (0..rank).flat_map(|i| r.row(i).iter().map(|x| x.code())).collect();
    (rank, codes)
}

fn signature_basis(field: &Field, sig: &[u32]) -> Vec<ZFunc> {
    let n = field.size() - 1;
    sig.chunks(n)
        .map(|c| ZFunc::from_codes(field, c).expect("valid codes"))
        .collect()
}

/// A plane of P(𝒵) through ⟨t⟩ with the permutation points it carries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlaneHit {
    /// Reduced echelon basis of the plane.
    pub basis: Vec<ZFunc>,
    /// Indices into the point set, ⟨t⟩ included.
    pub points: Vec<usize>,
}

/// Planes spanned by ⟨t⟩ and two further permutation points that carry at
/// least `min_count` permutation points (⟨t⟩ counted). Planes holding only
/// one point besides ⟨t⟩ are never generated.
pub fn planes_through_t(set: &PermPointSet, min_count: usize) -> Vec<PlaneHit> {
    let k = &set.field;
    let t = ZFunc::t(k);
    let Some(ti) = set.position(&t) else {
        return Vec::new();
    };
    let others: Vec<usize> = (0..set.len()).filter(|&i| i != ti).collect();
    let groups: HashMap<Vec<u32>, Vec<usize>> = others
        .par_iter()
        .enumerate()
        .flat_map_iter(|(a, &i)| {
            let t = &t;
            others[a + 1..].iter().filter_map(move |&j| {
                let (rank, sig) = span_signature(k, &[t, &set.points[i], &set.points[j]]);
                (rank == 3).then_some((sig, [i, j]))
            })
        })
        .fold(HashMap::new, |mut m: HashMap<Vec<u32>, Vec<usize>>, (sig, pair)| {
            m.entry(sig).or_default().extend(pair);
            m
        })
        .reduce(HashMap::new, |mut a, b| {
            for (sig, v) in b {
                a.entry(sig).or_default().extend(v);
            }
            a
        });
    let mut hits: Vec<PlaneHit> = groups
        .into_iter()
        .map(|(sig, mut pts)| {
            pts.push(ti);
            pts.sort_unstable();
            pts.dedup();
            PlaneHit {
                basis: signature_basis(k, &sig),
                points: pts,
            }
        })
        .filter(|h| h.points.len() >= min_count)
        .collect();
    hits.sort_by(|a, b| {
        b.points
            .len()
            .cmp(&a.points.len())
            .then_with(|| a.points.cmp(&b.points))
    });
    hits
}

/// Largest number of permutation points on a line of P(𝒵) (0 or 1 when
/// fewer than two points exist).
pub fn max_points_on_line(set: &PermPointSet) -> usize {
    if set.len() < 2 {
        return set.len();
    }
    let k = &set.field;
    let n = set.len();
    let counts: HashMap<Vec<u32>, usize> = (0..n)
        .into_par_iter()
        .flat_map_iter(|i| {
            (i + 1..n).map(move |j| span_signature(k, &[&set.points[i], &set.points[j]]).1)
        })
        .fold(HashMap::new, |mut m: HashMap<Vec<u32>, usize>, sig| {
            *m.entry(sig).or_default() += 1;
            m
        })
        .reduce(HashMap::new, |mut a, b| {
            for (sig, c) in b {
                *a.entry(sig).or_default() += c;
            }
            a
        });
    // a line with m points is hit by m(m−1)/2 pairs
    counts
        .values()
        .map(|&pairs| (1..=n).find(|m| m * (m - 1) / 2 == pairs).expect("pair count"))
        .max()
        .unwrap_or(2)
}

/// Largest number of permutation points on any plane of P(𝒵) other than
/// `exclude` (given by any spanning set). Exhaustive over triples.
pub fn max_points_on_other_planes(set: &PermPointSet, exclude: &[ZFunc]) -> usize {
    let k = &set.field;
    let ex: Vec<&ZFunc> = exclude.iter().collect();
    let excluded = span_signature(k, &ex).1;
    let n = set.len();
    let mut planes: HashMap<Vec<u32>, usize> = HashMap::new();
    for i in 0..n {
        for j in i + 1..n {
            for l in j + 1..n {
                let p = [&set.points[i], &set.points[j], &set.points[l]];
                let (rank, sig) = span_signature(k, &p);
                if rank == 3 && sig != excluded {
                    planes.entry(sig).or_insert(0);
                }
            }
        }
    }
    // any line of S extends to a plane other than `exclude`
    let mut best = max_points_on_line(set);
    for sig in planes.keys() {
        let basis = signature_basis(k, sig);
        let count = set
            .points
            .iter()
            .filter(|p| {
                let mut v: Vec<&ZFunc> = basis.iter().collect();
                v.push(p);
                span_signature(k, &v).0 == 3
            })
            .count();
        best = best.max(count);
    }
    best
}

/// The plane π_a = ⟨t, (t+a)³ − a³, (t+a)⁵ − a⁵⟩.
pub fn pi_a_basis(field: &Field, a: Felt) -> [ZFunc; 3] {
    let shifted = |e: u64| {
        let table: Vec<Felt> = field
            .elements()
            .map(|x| field.sub(field.pow(field.add(x, a), e), field.pow(a, e)))
            .collect();
        crate::zspace::interpolate(field, &table).expect("vanishes at 0")
    };
    [ZFunc::t(field), shifted(3), shifted(5)]
}

/// Coordinates of `f` with respect to a basis of a plane, when `f` lies in it.
pub fn plane_coordinates(field: &Field, basis: &[ZFunc; 3], f: &ZFunc) -> Option<Point2> {
    let n = field.size() - 1;
    // solve Σ xᵢ basisᵢ = f: columns are the basis vectors
    let rows: Vec<[Felt; 4]> = (1..=n)
        .map(|r| [basis[0].coeff(r), basis[1].coeff(r), basis[2].coeff(r), f.coeff(r)])
        .collect();
    let (red, pivots) = Matrix::from_rows(&rows).rref(field);
    if pivots.contains(&3) || pivots.len() != 3 {
        return None;
    }
    let x = [red[(0, 3)], red[(1, 3)], red[(2, 3)]];
    Point2::new(field, x).ok()
}

/// The permutation points of π_a in plane coordinates and the conic they span.
pub fn pi_a_conic(set: &PermPointSet, a: Felt) -> (Vec<Point2>, Option<Conic>) {
    let k = &set.field;
    let basis = pi_a_basis(k, a);
    let pts: Vec<Point2> = set
        .points
        .iter()
        .filter_map(|p| plane_coordinates(k, &basis, p))
        .collect();
    let conic = fit_conic(k, &pts)
        .filter(|fit| fit.unique && !fit.reducible)
        .map(|fit| fit.conic);
    (pts, conic)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TemplateType {
    I,
    II,
    III,
    IV,
    V,
}

impl TemplateType {
    pub const ALL: [TemplateType; 5] = [
        TemplateType::I,
        TemplateType::II,
        TemplateType::III,
        TemplateType::IV,
        TemplateType::V,
    ];
}

impl fmt::Display for TemplateType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            TemplateType::I => "I",
            TemplateType::II => "II",
            TemplateType::III => "III",
            TemplateType::IV => "IV",
            TemplateType::V => "V",
        };
        f.write_str(s)
    }
}

/// All instances of the five GF(7) templates, with parameters for display.
pub fn table3_templates(field: &Field) -> Result<Vec<(TemplateType, String, ZFunc)>> {
    require_q(field, 7)?;
    let k = field;
    let c = |n: i64| k.from_int(n);
    let poly = |cs: [Felt; 5]| ZFunc::from_terms(k, &[(1, cs[0]), (2, cs[1]), (3, cs[2]), (4, cs[3]), (5, cs[4])]);
    let mut out = vec![(TemplateType::I, String::new(), ZFunc::t(k))];
    let mul = |xs: &[Felt]| xs.iter().fold(Felt::ONE, |acc, &x| k.mul(acc, x));
    for a in k.elements() {
        let (a2, a3, a4) = (k.pow(a, 2), k.pow(a, 3), k.pow(a, 4));
        for b in k.elements() {
            let t1 = k.sum([mul(&[c(5), a4]), mul(&[c(3), a2, b]), mul(&[c(3), b, b])]);
            let t2 = k.add(mul(&[c(3), a3]), mul(&[c(3), a, b]));
            let t3 = k.add(mul(&[c(3), a2]), b);
            out.push((TemplateType::II, format!("a={a} b={b}"), poly([t1, t2, t3, mul(&[c(5), a]), Felt::ONE])));
        }
        for n in k.nonsquares() {
            for sign in [1i64, -1] {
                let s = c(sign);
                let t1 = k.sum([
                    mul(&[c(5), a4]),
                    mul(&[c(3), a2, n]),
                    mul(&[s, c(2), a]),
                    mul(&[c(3), n, n]),
                ]);
                let t2 = k.sum([mul(&[c(3), a3]), mul(&[c(3), a, n]), s]);
                let t3 = k.add(mul(&[c(3), a2]), n);
                let label = format!("a={a} n={n} {}", if sign > 0 { "+" } else { "-" });
                out.push((TemplateType::III, label, poly([t1, t2, t3, mul(&[c(5), a]), Felt::ONE])));
            }
        }
        for sign in [1i64, -1] {
            let s = c(sign);
            let pm = if sign > 0 { "+" } else { "-" };
            let t1 = k.add(mul(&[c(5), a4]), mul(&[s, c(4), a]));
            let t2 = k.add(mul(&[c(3), a3]), mul(&[s, c(2)]));
            out.push((
                TemplateType::IV,
                format!("a={a} {pm}"),
                poly([t1, t2, mul(&[c(3), a2]), mul(&[c(5), a]), Felt::ONE]),
            ));
            let v1 = k.add(mul(&[c(4), a3]), mul(&[s, c(3)]));
            out.push((
                TemplateType::V,
                format!("a={a} {pm}"),
                poly([v1, mul(&[c(6), a2]), mul(&[c(4), a]), Felt::ONE, Felt::ZERO]),
            ));
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Table3Report {
    /// Matching template types per point, in point-set order.
    pub labels: Vec<Vec<TemplateType>>,
    /// Number of points each type matches.
    pub per_type: BTreeMap<TemplateType, usize>,
    /// Points matched by more than one type.
    pub overlaps: usize,
    pub unmatched: Vec<usize>,
    /// Template instances that are not permutation points.
    pub non_permutation_instances: Vec<(TemplateType, String)>,
}

pub fn table3_typecheck(set: &PermPointSet) -> Result<Table3Report> {
    let k = &set.field;
    let templates = table3_templates(k)?;
    let index: HashMap<&ZFunc, usize> = set.points.iter().enumerate().map(|(i, p)| (p, i)).collect();
    let mut labels = vec![Vec::new(); set.len()];
    let mut non_perm = Vec::new();
    for (ty, label, f) in &templates {
        match index.get(f) {
            Some(&i) => {
                if !labels[i].contains(ty) {
                    labels[i].push(*ty);
                }
            }
            None => non_perm.push((*ty, label.clone())),
        }
    }
    for l in &mut labels {
        l.sort();
    }
    let mut per_type = BTreeMap::new();
    for ty in TemplateType::ALL {
        per_type.insert(ty, labels.iter().filter(|l| l.contains(&ty)).count());
    }
    Ok(Table3Report {
        overlaps: labels.iter().filter(|l| l.len() > 1).count(),
        unmatched: (0..set.len()).filter(|&i| labels[i].is_empty()).collect(),
        labels,
        per_type,
        non_permutation_instances: non_perm,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmallQReport {
    pub q: u32,
    pub perm_points: usize,
    pub degree_spectrum: BTreeMap<usize, usize>,
    pub in_hyperplane: bool,
    pub max_on_line: usize,
    /// Largest count on a plane through ⟨t⟩ and the planes attaining it.
    pub max_through_t: usize,
    pub extremal_planes: Vec<PlaneHit>,
    pub facts: Vec<String>,
    pub conclusion: String,
}

impl fmt::Display for SmallQReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "q = {}", self.q)?;
        writeln!(f, "permutation points: {}", self.perm_points)?;
        let spec: Vec<String> = self
            .degree_spectrum
            .iter()
            .map(|(d, c)| format!("{d}:{c}"))
            .collect();
        writeln!(f, "degree spectrum: {}", spec.join(" "))?;
        writeln!(f, "in hyperplane t^(q-1) = 0: {}", self.in_hyperplane)?;
        writeln!(f, "max permutation points on a line: {}", self.max_on_line)?;
        writeln!(f, "max permutation points on a plane through <t>: {}", self.max_through_t)?;
        for fact in &self.facts {
            writeln!(f, "{fact}")?;
        }
        write!(f, "{}", self.conclusion)
    }
}

pub fn classify_small_q(q: u32) -> Result<SmallQReport> {
    if ![2, 3, 4, 5, 7].contains(&q) {
        return Err(Error::UnsupportedQ(q));
    }
    let k = Field::with_order(q as u64)?;
    let set = enumerate_perm_points_with(
        &k,
        EnumerateOptions {
            bound: 7,
            hermite_prefilter: false,
        },
    )?;
    let max_on_line = max_points_on_line(&set);
    let planes = planes_through_t(&set, 3);
    let max_through_t = planes.first().map_or(set.len().min(2), |h| h.points.len());
    let extremal_planes: Vec<PlaneHit> = planes
        .iter()
        .filter(|h| h.points.len() == max_through_t)
        .cloned()
        .collect();
    let dim = q - 1;
    let mut facts = vec![format!("dim Z = {dim}, P(Z) = PG({}, {q})", dim - 1)];
    let conclusion = match q {
        2 => {
            facts.push("rank(f,g,h) <= dim Z = 1 for every flock".into());
            "every flock is linear".to_string()
        }
        3 => {
            facts.push("rank(f,g,h) <= dim Z = 2: non-star impossible".into());
            facts.push(format!("proper star cover: at most {max_on_line} point(s) of S per line, one cover line"));
            "all flocks are star flocks; quadratic cones admit only linear flocks".to_string()
        }
        4 => {
            facts.push("non-star herd space is all of Z, so P_HC has |S| = 2 points (flat)".into());
            facts.push(format!("at most {max_on_line} points of S per line"));
            "non-star flocks have flat critical cones; quadratic cones admit only linear flocks".to_string()
        }
        5 => {
            let big = extremal_planes.first();
            let basis: Vec<ZFunc> = (1..=3).map(|e| ZFunc::monomial(&k, e, Felt::ONE)).collect();
            let other = max_points_on_other_planes(&set, &basis);
            let on_ttt = big.is_some_and(|h| span_signature(&k, &h.basis.iter().collect::<Vec<_>>()) == span_signature(&k, &basis.iter().collect::<Vec<_>>()));
            facts.push(format!("all {} points on <t,t^2,t^3>: {on_ttt}", set.len()));
            facts.push(format!("max permutation points on any other plane: {other}"));
            "non-star with carrier of >= 3 points ⇒ FTW class".to_string()
        }
        _ => {
            let quadric = quadric_check_q7(&set)?;
            let hits7 = planes_through_t(&set, 7);
            let pis: Vec<Vec<u32>> = k
                .elements()
                .map(|a| {
                    let b = pi_a_basis(&k, a);
                    span_signature(&k, &[&b[0], &b[1], &b[2]]).1
                })
                .collect();
            let all_pi = hits7.len() == 7
                && hits7.iter().all(|h| {
                    let sig = span_signature(&k, &h.basis.iter().collect::<Vec<_>>()).1;
                    pis.contains(&sig)
                });
            facts.push(format!("all points on 3x2^2 = x0x4 + x1x3, x5 = 0: {quadric}"));
            facts.push(format!("planes through <t> with >= 7 points: {}; all are pi_a: {all_pi}", hits7.len()));
            facts.push(format!("star cover lines: at most {max_on_line} points of S per line"));
            "non-star non-flat ⇒ Kantor-Payne class".to_string()
        }
    };
    Ok(SmallQReport {
        q,
        perm_points: set.len(),
        degree_spectrum: set.degree_spectrum(),
        in_hyperplane: hyperplane_check(&set),
        max_on_line,
        max_through_t,
        extremal_planes,
        facts,
        conclusion,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k(q: u64) -> Field {
        Field::with_order(q).unwrap()
    }

    fn z(field: &Field, s: &str) -> ZFunc {
        ZFunc::parse(field, s).unwrap()
    }

    fn all_degrees(field: &Field) -> PermPointSet {
        enumerate_perm_points_with(
            field,
            EnumerateOptions {
                bound: 9,
                hermite_prefilter: false,
            },
        )
        .unwrap()
    }

    fn factorial(n: usize) -> usize {
        (1..=n).product()
    }

    // Oracle: permutations of GF(q) fixing 0, interpolated, counted by class.
    fn perm_classes_by_interpolation(field: &Field) -> std::collections::BTreeSet<Vec<u32>> {
        let units: Vec<Felt> = field.units().collect();
        let mut out = std::collections::BTreeSet::new();
        heap_permutations(&units, &mut |img: &[Felt]| {
            let mut table = vec![Felt::ZERO];
            table.extend_from_slice(img);
            let f = crate::zspace::interpolate(field, &table).unwrap();
            out.insert(monic(field, &f).unwrap().codes());
        });
        out
    }

    // Heap's algorithm.
    fn heap_permutations(items: &[Felt], visit: &mut dyn FnMut(&[Felt])) {
        let mut a = items.to_vec();
        let n = a.len();
        let mut c = vec![0usize; n];
        visit(&a);
        let mut i = 0;
        while i < n {
            if c[i] < i {
                if i % 2 == 0 {
                    a.swap(0, i);
                } else {
                    a.swap(c[i], i);
                }
                visit(&a);
                c[i] += 1;
                i = 0;
            } else {
                c[i] = 0;
                i += 1;
            }
        }
    }

    #[test]
    fn census_matches_interpolation_oracle() {
        for q in [3u64, 4, 5, 7] {
            let f = k(q);
            let set = all_degrees(&f);
            assert_eq!(set.len(), factorial(q as usize - 2), "q={q}");
            let mine: std::collections::BTreeSet<Vec<u32>> = set.points.iter().map(|p| p.codes()).collect();
            assert_eq!(mine, perm_classes_by_interpolation(&f), "q={q}");
            let prefiltered = enumerate_perm_points(&f).unwrap();
            assert_eq!(prefiltered, set);
        }
    }

    #[test]
    fn q5_points() {
        let f = k(5);
        let set = enumerate_perm_points(&f).unwrap();
        let want = ["t", "t^3", "3*t + 3*t^2 + t^3", "2*t + t^2 + t^3", "2*t + 4*t^2 + t^3", "3*t + 2*t^2 + t^3"];
        assert_eq!(set.len(), 6);
        for w in want {
            assert!(set.position(&z(&f, w)).is_some(), "{w}");
        }
        assert!(hyperplane_check(&set));
        // 3a²t + 3at² + t³ for a ∈ GF(5), plus t
        for a in f.elements() {
            let g = ZFunc::from_terms(&f, &[(1, f.mul(f.from_int(3), f.mul(a, a))), (2, f.mul(f.from_int(3), a)), (3, Felt::ONE)]);
            assert!(set.position(&g).is_some());
        }
    }

    #[test]
    fn q3_and_q4() {
        let f3 = k(3);
        let s3 = enumerate_perm_points(&f3).unwrap();
        assert_eq!(s3.points, vec![ZFunc::t(&f3)]);
        let s4 = enumerate_perm_points(&k(4)).unwrap();
        assert_eq!(s4.len(), 2);
        assert!(hyperplane_check(&s4));
    }

    #[test]
    fn bound() {
        assert!(matches!(
            enumerate_perm_points(&k(11)),
            Err(Error::BoundExceeded { q: 11, bound: 9 })
        ));
    }

    #[test]
    fn q7_quadric_and_degrees() {
        let f = k(7);
        let set = all_degrees(&f);
        assert_eq!(set.len(), 120);
        let admissible = hermite_admissible_degrees(7);
        assert!(set.degree_spectrum().keys().all(|d| admissible.contains(d)));
        assert!(hyperplane_check(&set));
        assert!(quadric_check_q7(&set).unwrap());
        assert!(on_q7_quadric(&f, &ZFunc::t(&f)));
        let mut bad = set.clone();
        bad.points[5] = z(&f, "t + t^3");
        assert!(!on_q7_quadric(&f, &bad.points[5]));
        assert!(!quadric_check_q7(&bad).unwrap());
        assert!(matches!(
            quadric_check_q7(&all_degrees(&k(5))),
            Err(Error::WrongField { expected: 7, got: 5 })
        ));
    }

    #[test]
    fn q7_planes_are_pi_a() {
        let f = k(7);
        let set = enumerate_perm_points(&f).unwrap();
        let hits = planes_through_t(&set, 7);
        assert_eq!(hits.len(), 7);
        for a in f.elements() {
            let b = pi_a_basis(&f, a);
            // direct membership count, independent of the search
            let direct = set
                .points
                .iter()
                .filter(|p| plane_coordinates(&f, &b, p).is_some())
                .count();
            assert_eq!(direct, 8);
            let sig = span_signature(&f, &[&b[0], &b[1], &b[2]]).1;
            assert!(hits
                .iter()
                .any(|h| span_signature(&f, &h.basis.iter().collect::<Vec<_>>()).1 == sig));
            let (pts, conic) = pi_a_conic(&set, a);
            assert_eq!(pts.len(), 8);
            assert!(conic.is_some());
        }
        assert!(planes_through_t(&set, 121).is_empty());
        assert_eq!(max_points_on_line(&set), 3);
    }

    #[test]
    fn q5_planes() {
        let f = k(5);
        let set = enumerate_perm_points(&f).unwrap();
        let hits = planes_through_t(&set, 6);
        assert_eq!(hits.len(), 1);
        let ttt: Vec<ZFunc> = (1..=3).map(|e| ZFunc::monomial(&f, e, Felt::ONE)).collect();
        assert_eq!(hits[0].basis, ttt);
        assert_eq!(max_points_on_other_planes(&set, &ttt), 2);
    }

    #[test]
    fn table3() {
        let f = k(7);
        let set = enumerate_perm_points(&f).unwrap();
        let rep = table3_typecheck(&set).unwrap();
        assert!(rep.unmatched.is_empty());
        let t = set.position(&ZFunc::t(&f)).unwrap();
        assert_eq!(rep.labels[t], vec![TemplateType::I]);
        for (i, p) in set.points.iter().enumerate() {
            if p.degree() == Some(4) {
                assert_eq!(rep.labels[i], vec![TemplateType::V]);
            }
        }
        assert_eq!(rep.per_type[&TemplateType::II], 49);
        assert!(table3_typecheck(&all_degrees(&k(5))).is_err());
    }

    #[test]
    fn classify_reports() {
        let r3 = classify_small_q(3).unwrap();
        assert_eq!(r3.perm_points, 1);
        let r5 = classify_small_q(5).unwrap();
        assert_eq!(r5.max_through_t, 6);
        assert_eq!(r5.extremal_planes.len(), 1);
        let r7 = classify_small_q(7).unwrap();
        assert_eq!(r7.max_on_line, 3);
        assert_eq!(r7.perm_points, 120);
        assert!(r7.to_string().ends_with("non-star non-flat ⇒ Kantor-Payne class"));
        assert!(matches!(classify_small_q(8), Err(Error::UnsupportedQ(8))));
        for q in [2, 4] {
            assert!(classify_small_q(q).is_ok());
        }
    }
}
