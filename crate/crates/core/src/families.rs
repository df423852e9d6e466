//! Named flock families and the predicted herd covers of Γ(t,t²,t³) and
//! Γ(t,t³,t⁵).

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::flock::Flock;
use crate::gf::{gcd, Felt, Field};
use crate::herd::{HerdSpace, Selection};
use crate::projgeom::{pg2_index, Conic, Homography, Point2, Point3};
use crate::zspace::ZFunc;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    Linear,
    Ftw,
    KantorPayne,
    K3,
    Alpha,
    Beta,
}

impl Family {
    pub const ALL: [Family; 6] = [
        Family::Linear,
        Family::Ftw,
        Family::KantorPayne,
        Family::K3,
        Family::Alpha,
        Family::Beta,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Linear => "linear",
            Family::Ftw => "ftw",
            Family::KantorPayne => "kantor-payne",
            Family::K3 => "k3",
            Family::Alpha => "alpha",
            Family::Beta => "beta",
        }
    }

    pub fn from_name(s: &str) -> Option<Family> {
        let s = s.to_ascii_lowercase();
        match s.as_str() {
            "k3-likeable" | "kantor-likeable" => return Some(Family::K3),
            "kp" => return Some(Family::KantorPayne),
            _ => {}
        }
        Family::ALL.into_iter().find(|f| f.name() == s)
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A family member: the field plus the parameter the family needs
/// (`n` for k3, `i` for alpha and beta).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FamilySpec {
    pub family: Family,
    pub field: Field,
    pub n: Option<Felt>,
    pub i: Option<u32>,
}

impl FamilySpec {
    pub fn new(family: Family, field: &Field) -> FamilySpec {
        FamilySpec {
            family,
            field: field.clone(),
            n: None,
            i: None,
        }
    }

    pub fn k3(field: &Field, n: Felt) -> FamilySpec {
        FamilySpec {
            n: Some(n),
            ..FamilySpec::new(Family::K3, field)
        }
    }

    pub fn alpha(field: &Field, i: u32) -> FamilySpec {
        FamilySpec {
            i: Some(i),
            ..FamilySpec::new(Family::Alpha, field)
        }
    }

    pub fn beta(field: &Field, i: u32) -> FamilySpec {
        FamilySpec {
            i: Some(i),
            ..FamilySpec::new(Family::Beta, field)
        }
    }

    pub fn validate(&self) -> Result<()> {
        let k = &self.field;
        let bad = |m: String| Err(Error::ParameterViolation(m));
        match self.family {
            Family::Linear | Family::Ftw | Family::KantorPayne => Ok(()),
            Family::K3 => {
                if k.p() != 5 {
                    return bad(format!("k3 needs q = 5^e, got q = {}", k.q()));
                }
                match self.n {
                    None => bad("k3 needs a nonsquare n".into()),
                    Some(n) if !n.is_zero() && !k.is_square(n) => Ok(()),
                    Some(n) => bad(format!("n = {n} is not a nonsquare")),
                }
            }
            Family::Alpha | Family::Beta => {
                if k.p() != 2 {
                    return bad(format!("{} needs q = 2^e, got q = {}", self.family, k.q()));
                }
                let e = k.e();
                let Some(i) = self.i else {
                    return bad(format!("{} needs i", self.family));
                };
                if i == 0 || i >= e {
                    return bad(format!("i = {i} must satisfy 0 < i < e = {e}"));
                }
                if gcd((1u32 << i) + 1, k.q() - 1) != 1 {
                    return bad(format!("gcd(2^{i}+1, q-1) != 1"));
                }
                let g = gcd(i, e);
                match (self.family, g) {
                    (Family::Alpha, 1) => Ok(()),
                    (Family::Beta, g) if g > 1 => Ok(()),
                    (Family::Alpha, g) => bad(format!("alpha needs gcd(i,e) = 1, got {g}")),
                    _ => bad("beta needs gcd(i,e) > 1".into()),
                }
            }
        }
    }

    /// The coordinate functions as written before reduction modulo `t^q − t`.
    pub fn formula(&self) -> String {
        match self.family {
            Family::Linear => "F(t; 0; 0)".into(),
            Family::Ftw => "F(t; t^2; t^3)".into(),
            Family::KantorPayne => "F(t; t^3; t^5)".into(),
            Family::K3 => {
                let n = self.n.map_or("n".into(), |n| n.to_string());
                format!("F(t; t^2; t^5 + 2*{n}*t^3)")
            }
            Family::Alpha | Family::Beta => {
                let i = self.i.unwrap_or(0);
                format!("F(t; t^{}; t^{})", 1u64 << i, (1u64 << i) + 1)
            }
        }
    }
}

pub fn make_family_flock(spec: &FamilySpec) -> Result<Flock> {
    spec.validate()?;
    let k = &spec.field;
    let t = ZFunc::t(k);
    let mono = |e: u64| ZFunc::monomial(k, e, Felt::ONE);
    let (g, h) = match spec.family {
        Family::Linear => (ZFunc::zero(k), ZFunc::zero(k)),
        Family::Ftw => (mono(2), mono(3)),
        Family::KantorPayne => (mono(3), mono(5)),
        Family::K3 => {
            let two_n = k.mul(k.from_int(2), spec.n.expect("validated"));
            (mono(2), ZFunc::from_terms(k, &[(5, Felt::ONE), (3, two_n)]))
        }
        Family::Alpha | Family::Beta => {
            let s = 1u64 << spec.i.expect("validated");
            (mono(s), mono(s + 1))
        }
    };
    Flock::new(k, t, g, h)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Table {
    /// P_HC of Γ(t,t²,t³), q ≥ 5.
    One,
    /// P_HC of Γ(t,t³,t⁵), q ≥ 7.
    Two,
}

impl Table {
    pub fn from_number(n: u8) -> Option<Table> {
        match n {
            1 => Some(Table::One),
            2 => Some(Table::Two),
            _ => None,
        }
    }

    pub fn number(self) -> u8 {
        match self {
            Table::One => 1,
            Table::Two => 2,
        }
    }

    pub fn min_q(self) -> u32 {
        match self {
            Table::One => 5,
            Table::Two => 7,
        }
    }

    pub fn family(self) -> Family {
        match self {
            Table::One => Family::Ftw,
            Table::Two => Family::KantorPayne,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PredictedPhc {
    pub table: Table,
    pub q: u32,
    /// The row's description, e.g. `q ≡ 2,8 (mod 15): (0,1,0), conic`.
    pub row: &'static str,
    /// Canonical points in enumeration order.
    pub points: Vec<Point2>,
}

struct PointSet<'a> {
    field: &'a Field,
    set: BTreeSet<(usize, Point2)>,
}

impl<'a> PointSet<'a> {
    fn new(field: &'a Field) -> Self {
        PointSet {
            field,
            set: BTreeSet::new(),
        }
    }

    fn push(&mut self, v: [Felt; 3]) {
        let p = Point2::new(self.field, v).expect("nonzero point");
        self.set.insert((pg2_index(self.field, &p), p));
    }

    fn ints(&mut self, v: [i64; 3]) {
        self.push(v.map(|c| self.field.from_int(c)));
    }

    /// Points of `c·x₀x₂ = x₁²`.
    fn conic(&mut self, c: i64) {
        let k = self.field;
        for p in Conic::from_ints(k, [0, 1, 0, 0, -c, 0]).points(k) {
            self.push(p.coords());
        }
    }

    /// Collinear set₁: `(−n,1,0)`, n a nonsquare.
    fn collinear1(&mut self) {
        let k = self.field;
        for n in k.nonsquares() {
            self.push([k.neg(n), Felt::ONE, Felt::ZERO]);
        }
    }

    /// Collinear set₂: `(−s,0,1)`, s not a nonzero fourth power (s = 0 included).
    fn collinear2(&mut self) {
        let k = self.field;
        for s in k.elements() {
            if s.is_zero() || !k.is_fourth_power(s) {
                self.push([k.neg(s), Felt::ZERO, Felt::ONE]);
            }
        }
    }

    /// Partial conic: the points of `4x₀x₂ = x₁²` with `x₂ = 1`, `x₁ = 2n`, n a nonsquare.
    fn partial_conic(&mut self) {
        let k = self.field;
        let four = k.from_int(4);
        for n in k.nonsquares() {
            let x1 = k.mul(k.from_int(2), n);
            let x0 = k.div(k.mul(x1, x1), four).expect("odd characteristic");
            self.push([x0, x1, Felt::ONE]);
        }
    }

    fn into_points(self) -> Vec<Point2> {
        self.set.into_iter().map(|(_, p)| p).collect()
    }
}

/// The literal point set of the table row selected by q.
///
/// Reading notes: in Table 2 the point (1,0,0) = ⟨t⟩ is added to every row
/// (rows 5, 6 and 10 leave it implicit), and collinear set₂ includes s = 0.
pub fn predicted_phc(table: Table, field: &Field) -> Result<PredictedPhc> {
    let q = field.q();
    if q < table.min_q() {
        return Err(Error::QOutOfRange {
            table: table.number() as u32,
            q,
        });
    }
    let mut s = PointSet::new(field);
    let row = match table {
        Table::One => table_one_row(field, &mut s),
        Table::Two => table_two_row(field, &mut s)?,
    };
    Ok(PredictedPhc {
        table,
        q,
        row,
        points: s.into_points(),
    })
}

fn table_one_row(field: &Field, s: &mut PointSet<'_>) -> &'static str {
    let q = field.q();
    if field.p() == 3 {
        s.ints([1, 0, 0]);
        s.ints([0, 0, 1]);
        for n in field.nonsquares() {
            s.push([field.neg(n), Felt::ZERO, Felt::ONE]);
        }
        return "q = 3^e: (1,0,0), (0,0,1), {(-n,0,1) | n a nonsquare}";
    }
    let even = field.p() == 2;
    match (q % 3, even) {
        (1, false) => {
            s.ints([1, 0, 0]);
            "q = 1 mod 3, q odd: (1,0,0)"
        }
        (1, true) => {
            s.ints([1, 0, 0]);
            s.ints([0, 1, 0]);
            "q = 1 mod 3, q = 2^(2k): (1,0,0), (0,1,0)"
        }
        (_, false) => {
            s.conic(3);
            "q = -1 mod 3, q odd: conic 3x0x2 = x1^2"
        }
        (_, true) => {
            s.conic(1);
            s.ints([0, 1, 0]);
            "q = -1 mod 3, q = 2^(2k+1): hyperconic x0x2 = x1^2 u (0,1,0)"
        }
    }
}

fn table_two_row(field: &Field, s: &mut PointSet<'_>) -> Result<&'static str> {
    let q = field.q();
    s.ints([1, 0, 0]);
    let row = match q % 15 {
        1 => "q = 1 mod 15: (1,0,0)",
        2 | 8 => {
            s.ints([0, 1, 0]);
            s.conic(5);
            "q = 2,8 mod 15: (0,1,0), conic"
        }
        3 | 12 => {
            s.ints([0, 1, 0]);
            s.conic(5);
            s.collinear1();
            "q = 3,12 mod 15, q = 3^(2k+1): (0,1,0), conic, collinear set 1"
        }
        4 => {
            s.ints([0, 0, 1]);
            "q = 4 mod 15: (1,0,0), (0,0,1)"
        }
        5 => {
            s.ints([0, 1, 0]);
            s.collinear2();
            s.partial_conic();
            "q = 5 mod 15, q = 5^(2k+1): (0,1,0), collinear set 2, partial conic"
        }
        6 => {
            s.ints([0, 1, 0]);
            s.collinear1();
            "q = 6 mod 15, q = 3^(4k): (0,1,0), collinear set 1"
        }
        7 | 13 => {
            s.conic(5);
            "q = 7,13 mod 15: conic"
        }
        9 => {
            s.ints([0, 1, 0]);
            s.ints([0, 0, 1]);
            s.collinear1();
            "q = 9 mod 15, q = 3^(4k+2): (1,0,0), (0,1,0), (0,0,1), collinear set 1"
        }
        10 => {
            s.collinear2();
            s.partial_conic();
            "q = 10 mod 15, q = 5^(2k): collinear set 2, partial conic"
        }
        11 => {
            s.ints([0, 1, 0]);
            "q = 11 mod 15: (1,0,0), (0,1,0)"
        }
        14 => {
            s.ints([0, 1, 0]);
            s.ints([0, 0, 1]);
            "q = 14 mod 15: (1,0,0), (0,1,0), (0,0,1)"
        }
        _ => return Err(Error::AmbiguousRow(q)),
    };
    Ok(row)
}

/// Computed against predicted P_HC for one q.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TableCheck {
    pub predicted: PredictedPhc,
    pub computed: Vec<Point2>,
    /// Predicted but not in the computed cover.
    pub missing: Vec<Point2>,
    /// In the computed cover but not predicted.
    pub extra: Vec<Point2>,
}

impl TableCheck {
    pub fn passed(&self) -> bool {
        self.missing.is_empty() && self.extra.is_empty()
    }
}

pub fn check_table(table: Table, field: &Field) -> Result<TableCheck> {
    let predicted = predicted_phc(table, field)?;
    let flock = make_family_flock(&FamilySpec::new(table.family(), field))?;
    let computed = HerdSpace::of_flock(&flock).phc();
    let cset: BTreeSet<Point2> = computed.iter().copied().collect();
    let pset: BTreeSet<Point2> = predicted.points.iter().copied().collect();
    let missing = predicted.points.iter().filter(|p| !cset.contains(p)).copied().collect();
    let extra = computed.iter().filter(|p| !pset.contains(p)).copied().collect();
    Ok(TableCheck {
        predicted,
        computed,
        missing,
        extra,
    })
}

/// P_HC of `F(t, t², t⁵ + 2nt³)` against `{(1,0,0)} ∪ {(na²+n², na, 1)}`,
/// together with membership in `nx₀x₂ = x₁² + n³x₂²`.
pub fn k3_conic_check(field: &Field, n: Felt) -> Result<bool> {
    let flock = make_family_flock(&FamilySpec::k3(field, n))?;
    let k = field;
    let computed: BTreeSet<Point2> = HerdSpace::of_flock(&flock).phc().into_iter().collect();
    let mut expected = BTreeSet::new();
    expected.insert(Point2::from_ints(k, [1, 0, 0])?);
    for a in k.elements() {
        let na = k.mul(n, a);
        let x0 = k.add(k.mul(na, a), k.mul(n, n));
        expected.insert(Point2::new(k, [x0, na, Felt::ONE])?);
    }
    let n3 = k.pow(n, 3);
    let conic = Conic([Felt::ZERO, Felt::ONE, n3, Felt::ZERO, k.neg(n), Felt::ZERO]);
    let on_conic = expected.iter().all(|p| conic.contains(k, p));
    Ok(on_conic && computed == expected)
}

/// Whether P_HC of the alpha/beta flock contains every point of `x₀x₂ = x₁^{2^i}`.
pub fn alpha_containment_check(spec: &FamilySpec) -> Result<bool> {
    let flock = make_family_flock(spec)?;
    let k = &spec.field;
    let i = spec.i.expect("validated");
    let herd = HerdSpace::of_flock(&flock);
    let curve = translation_curve(k, i);
    Ok(curve.iter().all(|p| herd.entry(p).permutation))
}

/// Points of `x₀x₂ = x₁^{2^i}`: `(1,0,0)` and `(c^{2^i}, c, 1)`.
pub fn translation_curve(field: &Field, i: u32) -> Vec<Point2> {
    let mut out = vec![Point2::from_ints(field, [1, 0, 0]).expect("nonzero")];
    for c in field.elements() {
        let x0 = field.frobenius(c, i);
        out.push(Point2::new(field, [x0, c, Felt::ONE]).expect("nonzero"));
    }
    out
}

/// The homography `diag(1,3,3,1)` acting on planes sends 𝓕(t,t²,t³) to
/// 𝓕(t,3t²,3t³) and, in the plane `x₃ = 0`, the conic `3x₀x₂ = x₁²` onto
/// `x₀x₂ = x₁²`.
pub fn ftw_scaling_check(field: &Field) -> Result<bool> {
    if field.p() == 3 {
        return Err(Error::ParameterViolation("needs q != 3^e".into()));
    }
    let k = field;
    let h = Homography::<4>::from_flock_matrix_ints(
        k,
        [[1, 0, 0, 0], [0, 3, 0, 0], [0, 0, 3, 0], [0, 0, 0, 1]],
    )?;
    let ftw = make_family_flock(&FamilySpec::new(Family::Ftw, k))?;
    let image = ftw.collineate(&h)?;
    let three = k.from_int(3);
    let target = ftw.scale(Felt::ONE, three, three)?;
    let flocks_match = image == target;

    let from = Conic::from_ints(k, [0, 1, 0, 0, -3, 0]);
    let to = Conic::from_ints(k, [0, 1, 0, 0, -1, 0]);
    let mapped: BTreeSet<Point3> = from
        .points(k)
        .iter()
        .map(|p| h.apply(k, &p.embed()))
        .collect();
    let wanted: BTreeSet<Point3> = to.points(k).iter().map(|p| p.embed()).collect();
    Ok(flocks_match && mapped == wanted)
}

/// Over GF(2^(2k+1)): the normalized herd of 𝓕(t^(1/4), t^(1/2), t^(3/4))
/// consists of `t^(1/4)`, `t^(1/2)` and
/// `(c²t^(1/4) + c t^(1/2) + t^(3/4)) / (c² + c + 1)`, each a permutation
/// with `f(0) = 0`, `f(1) = 1`.
pub fn ftw_oval_herd_check(field: &Field) -> Result<bool> {
    let k = field;
    if k.p() != 2 || k.e().is_multiple_of(2) || k.e() < 3 {
        return Err(Error::ParameterViolation(format!(
            "needs q = 2^(2k+1) with k >= 1, got q = {}",
            k.q()
        )));
    }
    let quarter = k.e() - 2;
    let r: Vec<Felt> = k.elements().map(|x| k.frobenius(x, quarter)).collect();
    let flock = make_family_flock(&FamilySpec::new(Family::Ftw, k))?.reparameterize(&r)?;
    let herd = HerdSpace::of_flock(&flock).rho_herd(&Selection::Normalized)?;
    if herd.members.len() != k.size() + 2 {
        return Ok(false);
    }
    let root = |j: u32| ZFunc::monomial(k, 1 << j, Felt::ONE);
    let (r4, r2, r34) = (root(quarter), root(k.e() - 1), {
        let e = (1u64 << quarter) * 3;
        ZFunc::monomial(k, e, Felt::ONE)
    });
    let mut expected = vec![
        (Point2::from_ints(k, [1, 0, 0])?, r4.clone()),
        (Point2::from_ints(k, [0, 1, 0])?, r2.clone()),
    ];
    for c in k.elements() {
        let c2 = k.mul(c, c);
        let norm = k.inv(k.sum([c2, c, Felt::ONE]))?;
        let f = r4
            .scale(k, c2)
            .add(k, &r2.scale(k, c))
            .add(k, &r34)
            .scale(k, norm);
        expected.push((Point2::new(k, [c2, c, Felt::ONE])?, f));
    }
    let values_ok = herd.members.iter().all(|m| {
        m.function.is_permutation(k)
            && m.function.eval(k, Felt::ZERO).is_zero()
            && m.function.eval(k, Felt::ONE) == Felt::ONE
    });
    let display_ok = expected
        .iter()
        .all(|(p, f)| herd.member(p).is_some_and(|m| m.function == *f));
    Ok(values_ok && display_ok)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k(q: u64) -> Field {
        Field::with_order(q).unwrap()
    }

    fn pts(field: &Field, v: &[[i64; 3]]) -> BTreeSet<Point2> {
        v.iter().map(|c| Point2::from_ints(field, *c).unwrap()).collect()
    }

    #[test]
    fn k3_over_gf5_reduces_t5() {
        let f = k(5);
        let flock = make_family_flock(&FamilySpec::k3(&f, f.from_int(2))).unwrap();
        assert_eq!(flock, Flock::parse(&f, "t; t^2; t + 4*t^3").unwrap());
    }

    #[test]
    fn alpha_q8_i1_is_ftw() {
        let f = k(8);
        let a = make_family_flock(&FamilySpec::alpha(&f, 1)).unwrap();
        let ftw = make_family_flock(&FamilySpec::new(Family::Ftw, &f)).unwrap();
        assert_eq!(a, ftw);
    }

    #[test]
    fn parameter_violations() {
        let f7 = k(7);
        assert!(matches!(
            make_family_flock(&FamilySpec::k3(&f7, f7.from_int(3))),
            Err(Error::ParameterViolation(_))
        ));
        let f5 = k(5);
        assert!(make_family_flock(&FamilySpec::k3(&f5, Felt::ONE)).is_err());
        assert!(make_family_flock(&FamilySpec::k3(&f5, Felt::ZERO)).is_err());
        let f16 = k(16);
        // gcd(2+1, 15) = 3
        assert!(make_family_flock(&FamilySpec::alpha(&f16, 1)).is_err());
        let f32 = k(32);
        assert!(make_family_flock(&FamilySpec::beta(&f32, 1)).is_err());
        assert!(make_family_flock(&FamilySpec::alpha(&f32, 5)).is_err());
        assert!(make_family_flock(&FamilySpec::alpha(&f7, 1)).is_err());
    }

    #[test]
    fn beta_example_exists() {
        let f = k(64);
        let ok: Vec<u32> = (1..6)
            .filter(|&i| make_family_flock(&FamilySpec::beta(&f, i)).is_ok())
            .collect();
        for &i in &ok {
            assert!(gcd(i, 6) > 1 && gcd((1 << i) + 1, 63) == 1);
        }
        assert!(!ok.is_empty());
    }

    #[test]
    fn predicted_examples() {
        let f9 = k(9);
        let p = predicted_phc(Table::One, &f9).unwrap();
        assert_eq!(p.points.len(), 6);
        let f29 = k(29);
        let p = predicted_phc(Table::Two, &f29).unwrap();
        let got: BTreeSet<Point2> = p.points.into_iter().collect();
        assert_eq!(got, pts(&f29, &[[1, 0, 0], [0, 1, 0], [0, 0, 1]]));
        let f8 = k(8);
        let p = predicted_phc(Table::One, &f8).unwrap();
        assert_eq!(p.points.len(), 10);
        assert!(p.points.contains(&Point2::from_ints(&f8, [0, 1, 0]).unwrap()));
    }

    #[test]
    fn out_of_range() {
        assert!(matches!(
            predicted_phc(Table::One, &k(4)),
            Err(Error::QOutOfRange { table: 1, q: 4 })
        ));
        assert!(matches!(
            predicted_phc(Table::Two, &k(5)),
            Err(Error::QOutOfRange { table: 2, q: 5 })
        ));
    }

    // Independent oracle for the computed side: brute-force permutation test
    // of a·t + b·t^j + c·t^l straight from the field operations.
    fn brute_phc(field: &Field, j: u64, l: u64) -> BTreeSet<Point2> {
        let mut out = BTreeSet::new();
        for p in crate::projgeom::enumerate_pg2(field) {
            let [a, b, c] = p.coords();
            let mut seen = vec![false; field.size()];
            let ok = field.elements().all(|x| {
                let v = field.sum([
                    field.mul(a, x),
                    field.mul(b, field.pow(x, j)),
                    field.mul(c, field.pow(x, l)),
                ]);
                !std::mem::replace(&mut seen[v.code() as usize], true)
            });
            if ok {
                out.insert(p);
            }
        }
        out
    }

    #[test]
    fn table_one_matches_computation() {
        for q in [5, 7, 8, 9, 11, 13, 16, 25, 27, 32] {
            let f = k(q);
            let check = check_table(Table::One, &f).unwrap();
            assert!(check.passed(), "q={q}: {check:?}");
            let brute = brute_phc(&f, 2, 3);
            assert_eq!(check.computed.iter().copied().collect::<BTreeSet<_>>(), brute);
        }
    }

    #[test]
    fn table_two_matches_computation_except_q9_q13() {
        for q in [7, 8, 11, 16, 17, 19, 23, 25, 27, 29] {
            let f = k(q);
            let check = check_table(Table::Two, &f).unwrap();
            assert!(check.passed(), "q={q}: {check:?}");
            assert_eq!(brute_phc(&f, 3, 5), check.computed.iter().copied().collect());
        }
    }

    #[test]
    fn table_two_q9_misses_two_points() {
        // x⁵ ± i·x over GF(9) = GF(3)[i] permutes GF(9); the row does not list it.
        let f = k(9);
        let check = check_table(Table::Two, &f).unwrap();
        assert!(check.missing.is_empty());
        let i = f.element(3).unwrap();
        assert_eq!(f.mul(i, i), f.from_int(-1));
        let extra: BTreeSet<Point2> = check.extra.iter().copied().collect();
        let expect: BTreeSet<Point2> = [i, f.neg(i)]
            .into_iter()
            .map(|a| Point2::new(&f, [a, Felt::ZERO, Felt::ONE]).unwrap())
            .collect();
        assert_eq!(extra, expect);
        assert_eq!(brute_phc(&f, 3, 5), check.computed.iter().copied().collect());
    }

    #[test]
    fn table_two_q13_misses_six_points() {
        // x⁵ + a·x³ + 3a²·x, a a nonsquare, permutes GF(13); the conic row misses it.
        let f = k(13);
        let check = check_table(Table::Two, &f).unwrap();
        assert!(check.missing.is_empty());
        let three = f.from_int(3);
        let expect: BTreeSet<Point2> = f
            .nonsquares()
            .into_iter()
            .map(|a| Point2::new(&f, [f.mul(three, f.mul(a, a)), a, Felt::ONE]).unwrap())
            .collect();
        let extra: BTreeSet<Point2> = check.extra.iter().copied().collect();
        assert_eq!(extra, expect);
        assert_eq!(brute_phc(&f, 3, 5), check.computed.iter().copied().collect());
    }

    #[test]
    fn partial_conic_anchored_at_25() {
        let f = k(25);
        let check = check_table(Table::Two, &f).unwrap();
        assert!(check.passed(), "{check:?}");
        assert_eq!(brute_phc(&f, 3, 5), check.computed.iter().copied().collect());
        // (1,0,0), (0,0,1), 18 non-fourth-powers s, 12 nonsquares n; t³ does not permute GF(25)
        assert_eq!(check.computed.len(), 1 + 1 + 18 + 12);
    }

    #[test]
    fn k3_conic() {
        let f5 = k(5);
        assert!(k3_conic_check(&f5, f5.from_int(2)).unwrap());
        let flock = make_family_flock(&FamilySpec::k3(&f5, f5.from_int(2))).unwrap();
        let phc: BTreeSet<Point2> = HerdSpace::of_flock(&flock).phc().into_iter().collect();
        let want = pts(&f5, &[[1, 0, 0], [4, 0, 1], [1, 2, 1], [2, 4, 1], [2, 1, 1], [1, 3, 1]]);
        assert_eq!(phc, want);
        let conic = Conic::from_ints(&f5, [0, 1, 3, 0, -2, 0]);
        assert!(want.iter().all(|p| conic.contains(&f5, p)));
        assert!(k3_conic_check(&f5, Felt::ONE).is_err());
        let f25 = k(25);
        for n in f25.nonsquares().into_iter().take(3) {
            assert!(k3_conic_check(&f25, n).unwrap());
        }
    }

    #[test]
    fn alpha_containment() {
        for (q, i) in [(8u64, 1u32), (32, 1), (32, 2)] {
            let f = k(q);
            assert!(alpha_containment_check(&FamilySpec::alpha(&f, i)).unwrap());
        }
    }

    #[test]
    fn ftw_scaling() {
        for q in [5, 7, 8, 11, 16] {
            assert!(ftw_scaling_check(&k(q)).unwrap(), "q={q}");
        }
        assert!(ftw_scaling_check(&k(9)).is_err());
    }

    #[test]
    fn ftw_oval_herd() {
        assert!(ftw_oval_herd_check(&k(8)).unwrap());
        assert!(ftw_oval_herd_check(&k(32)).unwrap());
        assert!(ftw_oval_herd_check(&k(16)).is_err());
    }

    #[test]
    fn family_names_round_trip() {
        for fam in Family::ALL {
            assert_eq!(Family::from_name(fam.name()), Some(fam));
        }
        assert_eq!(Family::from_name("K3-likeable"), Some(Family::K3));
    }
}
