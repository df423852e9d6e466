//! Seeded randomized checks of the structural facts the library relies on.
//!
//! Every case draws from its own ChaCha stream `(suite, case)`, so a run is
//! reproducible from the seed alone and cases can run in parallel.

use std::collections::{HashMap, HashSet};
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::equiv::{verify_equivalence, Level, Tau, Witness};
use crate::error::Result;
use crate::flock::{Flock, StarStatus};
use crate::gf::{Felt, Field};
use crate::herd::{same_herd_space, HerdKind, HerdSpace, Selection};
use crate::linalg::Matrix;
use crate::projgeom::{collinear, line_through, Homography, Point2};
use crate::zspace::{combine, interpolate, ZClass, ZFunc};

pub const SUITE_FIELDS: [u64; 5] = [4, 5, 7, 8, 9];
pub const DEFAULT_CASES: usize = 1000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    /// Same herd space iff the triples differ by a scalar.
    SameHerdSpace,
    /// Reparameterizing gives a herd-equivalent space with ψ = id.
    Reparameterization,
    /// Star / linear detected by zero classes and repeated classes.
    StarLinear,
    /// A linear herd space has empty cover iff it is degenerate.
    LinearCover,
    /// Lines of a proper star cover through the kernel count 𝒮 ∩ P(𝒱).
    StarCoverLines,
    /// Normalized herds take the value 1 at 1.
    NormalizedHerd,
    /// Rebuilding a flock from three ρ-herd members.
    Reconstruction,
}

impl Suite {
    pub const ALL: [Suite; 7] = [
        Suite::SameHerdSpace,
        Suite::Reparameterization,
        Suite::StarLinear,
        Suite::LinearCover,
        Suite::StarCoverLines,
        Suite::NormalizedHerd,
        Suite::Reconstruction,
    ];

    pub fn letter(self) -> char {
        (b'a' + Suite::ALL.iter().position(|&s| s == self).expect("listed") as u8) as char
    }

    pub fn from_letter(c: char) -> Option<Suite> {
        let i = (c as u8).checked_sub(b'a')? as usize;
        Suite::ALL.get(i).copied()
    }

    pub fn describe(self) -> &'static str {
        match self {
            Suite::SameHerdSpace => "same herd space <=> scalar multiple",
            Suite::Reparameterization => "reparameterization => herd equivalence, psi = id",
            Suite::StarLinear => "star/linear via zero classes and repeated classes",
            Suite::LinearCover => "linear herd space: empty cover <=> degenerate",
            Suite::StarCoverLines => "proper star: cover lines = |S n P(V)|",
            Suite::NormalizedHerd => "normalized herd: f_P(1) = 1 on P_HC",
            Suite::Reconstruction => "reconstruction from rho-herd anchors",
        }
    }
}

#[derive(Clone, Debug)]
pub struct SuiteResult {
    pub suite: Suite,
    pub cases: usize,
    /// Descriptions of failing cases, in case order.
    pub failures: Vec<String>,
    pub elapsed: Duration,
}

impl SuiteResult {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

pub fn run_all(cases: usize, seed: u64) -> Result<Vec<SuiteResult>> {
    Suite::ALL.iter().map(|&s| run_suite(s, cases, seed)).collect()
}

pub fn run_suite(suite: Suite, cases: usize, seed: u64) -> Result<SuiteResult> {
    let fields: Vec<Field> = SUITE_FIELDS
        .iter()
        .map(|&q| Field::with_order(q))
        .collect::<Result<_>>()?;
    let stream = (suite.letter() as u64) << 32;
    let start = Instant::now();
    let outcomes: Vec<Option<String>> = (0..cases)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(stream | i as u64);
            let k = &fields[i % fields.len()];
            run_case(suite, k, &mut rng).map(|m| format!("case {i} (q={}): {m}", k.q()))
        })
        .collect();
    Ok(SuiteResult {
        suite,
        cases,
        failures: outcomes.into_iter().flatten().collect(),
        elapsed: start.elapsed(),
    })
}

/// `None` on success, otherwise what went wrong.
fn run_case(suite: Suite, k: &Field, rng: &mut ChaCha8Rng) -> Option<String> {
    let out = match suite {
        Suite::SameHerdSpace => same_herd_space_case(k, rng),
        Suite::Reparameterization => reparameterization_case(k, rng),
        Suite::StarLinear => star_linear_case(k, rng),
        Suite::LinearCover => linear_cover_case(k, rng),
        Suite::StarCoverLines => star_cover_lines_case(k, rng),
        Suite::NormalizedHerd => normalized_case(k, rng),
        Suite::Reconstruction => reconstruction_case(k, rng),
    };
    match out {
        Ok(None) => None,
        Ok(Some(m)) => Some(m),
        Err(e) => Some(format!("error: {e}")),
    }
}

type CaseResult = Result<Option<String>>;

fn fail(ok: bool, msg: impl FnOnce() -> String) -> Option<String> {
    (!ok).then(msg)
}

fn unit(k: &Field, rng: &mut ChaCha8Rng) -> Felt {
    Felt::from_code(rng.gen_range(1..k.q()))
}

fn elem(k: &Field, rng: &mut ChaCha8Rng) -> Felt {
    Felt::from_code(rng.gen_range(0..k.q()))
}

fn random_func(k: &Field, rng: &mut ChaCha8Rng) -> ZFunc {
    let n = k.size() - 1;
    if rng.gen_ratio(1, 8) {
        return ZFunc::zero(k);
    }
    // low degrees are more interesting than uniform coefficient vectors
    let top = rng.gen_range(1..=n);
    let coeffs = (0..n)
        .map(|i| if i < top { elem(k, rng) } else { Felt::ZERO })
        .collect();
    ZFunc::from_coeffs(k, coeffs).expect("length q-1")
}

fn random_perm_table(k: &Field, rng: &mut ChaCha8Rng) -> Vec<Felt> {
    let mut units: Vec<Felt> = k.units().collect();
    units.shuffle(rng);
    let mut table = vec![Felt::ZERO];
    table.extend(units);
    table
}

fn random_perm_func(k: &Field, rng: &mut ChaCha8Rng) -> ZFunc {
    interpolate(k, &random_perm_table(k, rng)).expect("p(0) = 0")
}

fn random_invertible(k: &Field, rng: &mut ChaCha8Rng) -> [[Felt; 3]; 3] {
    loop {
        let m: [[Felt; 3]; 3] = std::array::from_fn(|_| std::array::from_fn(|_| elem(k, rng)));
        if !Matrix::from_rows(&m).det(k).is_zero() {
            return m;
        }
    }
}

/// `(f,g,h) ↦ M·(f,g,h)`.
fn mix(k: &Field, m: &[[Felt; 3]; 3], fs: [&ZFunc; 3]) -> [ZFunc; 3] {
    std::array::from_fn(|i| combine(k, m[i], fs))
}

/// A triple of mixed shape: generic, with a permutation, rank 2, rank 1.
fn random_triple(k: &Field, rng: &mut ChaCha8Rng) -> [ZFunc; 3] {
    loop {
        let t = match rng.gen_range(0..5) {
            0 => [random_func(k, rng), random_func(k, rng), random_func(k, rng)],
            1 => {
                let m = random_invertible(k, rng);
                let p = random_perm_func(k, rng);
                let (g, h) = (random_func(k, rng), random_func(k, rng));
                mix(k, &m, [&p, &g, &h])
            }
            2 => {
                let f = random_perm_func(k, rng);
                let g = random_func(k, rng);
                let h = combine(k, [elem(k, rng), elem(k, rng), Felt::ZERO], [&f, &g, &g]);
                let m = random_invertible(k, rng);
                mix(k, &m, [&f, &g, &h])
            }
            3 => {
                let f = if rng.gen_bool(0.5) {
                    random_perm_func(k, rng)
                } else {
                    random_func(k, rng)
                };
                [f.scale(k, elem(k, rng)), f.scale(k, elem(k, rng)), f.scale(k, elem(k, rng))]
            }
            _ => {
                let m = random_invertible(k, rng);
                let ps = [random_perm_func(k, rng), random_perm_func(k, rng), random_perm_func(k, rng)];
                mix(k, &m, [&ps[0], &ps[1], &ps[2]])
            }
        };
        if t.iter().any(|z| !z.is_zero()) {
            return t;
        }
    }
}

fn flock_of(k: &Field, [f, g, h]: [ZFunc; 3]) -> Result<Flock> {
    Flock::new(k, f, g, h)
}

fn is_perm_by_values(k: &Field, f: &ZFunc) -> bool {
    let mut seen = HashSet::new();
    k.elements().all(|x| seen.insert(f.eval(k, x)))
}

fn same_herd_space_case(k: &Field, rng: &mut ChaCha8Rng) -> CaseResult {
    let a = flock_of(k, random_triple(k, rng))?;
    let b = match rng.gen_range(0..3) {
        0 => a.scalar(unit(k, rng))?,
        1 => {
            let s = [unit(k, rng), unit(k, rng), unit(k, rng)];
            a.scale(s[0], s[1], s[2])?
        }
        _ => flock_of(k, random_triple(k, rng))?,
    };
    let oracle = k
        .units()
        .find(|&s| (0..3).all(|i| a.functions()[i].scale(k, s) == *b.functions()[i]));
    let got = same_herd_space(&a, &b);
    Ok(fail(got.is_some() == oracle.is_some(), || {
        format!("{a} vs {b}: same_herd_space={got:?}, scalar={oracle:?}")
    })
    .or_else(|| {
        let ok = got.is_none_or(|s| a.scalar(s).map(|x| x == b).unwrap_or(false));
        fail(ok, || format!("{a} vs {b}: returned scalar {got:?} is wrong"))
    }))
}

fn reparameterization_case(k: &Field, rng: &mut ChaCha8Rng) -> CaseResult {
    let a = flock_of(k, random_triple(k, rng))?;
    // arbitrary permutation r; the flock uses p = r − r(0)
    let mut r: Vec<Felt> = k.elements().collect();
    r.shuffle(rng);
    let b = a.reparameterize(&r)?;
    let p: Vec<Felt> = r.iter().map(|&x| k.sub(x, r[0])).collect();
    let (ga, gb) = (HerdSpace::of_flock(&a), HerdSpace::of_flock(&b));
    let w = Witness {
        psi: Homography::identity(k),
        tau: Tau::Perm(p),
    };
    let rep = verify_equivalence(&ga, &gb, &w, Level::Herd)?;
    Ok(fail(rep.holds && ga.phc() == gb.phc(), || {
        format!("{a} -> {b}: {rep:?}")
    }))
}

fn star_linear_case(k: &Field, rng: &mut ChaCha8Rng) -> CaseResult {
    let a = flock_of(k, random_triple(k, rng))?;
    let herd = HerdSpace::of_flock(&a);
    let zeros = herd.zero_points().len();
    // points sharing each nonzero class
    let mut by_class: HashMap<&ZClass, Vec<Point2>> = HashMap::new();
    for e in herd.entries() {
        if !e.class.is_zero() {
            by_class.entry(&e.class).or_default().push(e.point);
        }
    }
    let repeated = by_class.values().any(|v| v.len() > 1);
    let noncollinear_repeat = by_class.values().any(|v| v.len() >= 3 && !collinear(k, v));
    let status = a.star_status();
    let ok = match &status {
        StarStatus::NonStar => zeros == 0 && !repeated,
        StarStatus::ProperStar(q) => {
            zeros == 1
                && herd.zero_points()[0].embed() == *q
                && !noncollinear_repeat
                && matches!(herd.classify(), HerdKind::ProperStar { lines_constant: true, .. })
        }
        StarStatus::Linear(_) => zeros >= 2 && noncollinear_repeat,
    };
    Ok(fail(ok, || {
        format!("{a}: {status:?}, zero classes {zeros}, repeated {repeated}, non-collinear repeat {noncollinear_repeat}")
    }))
}

fn linear_cover_case(k: &Field, rng: &mut ChaCha8Rng) -> CaseResult {
    let f = if rng.gen_bool(0.5) {
        random_perm_func(k, rng)
    } else {
        loop {
            let f = random_func(k, rng);
            if !f.is_zero() {
                break f;
            }
        }
    };
    let s = loop {
        let s = [elem(k, rng), elem(k, rng), elem(k, rng)];
        if s.iter().any(|x| !x.is_zero()) {
            break s;
        }
    };
    let herd = HerdSpace::build(k, &f.scale(k, s[0]), &f.scale(k, s[1]), &f.scale(k, s[2]))?;
    let linear = matches!(herd.classify(), HerdKind::Linear { .. });
    let empty = herd.phc().is_empty();
    let size_ok = empty || herd.phc().len() == k.size() * k.size();
    Ok(fail(linear && empty == herd.is_degenerate() && size_ok, || {
        format!("F = {f}, scalars {s:?}: linear {linear}, empty {empty}, degenerate {}", herd.is_degenerate())
    }))
}

fn star_cover_lines_case(k: &Field, rng: &mut ChaCha8Rng) -> CaseResult {
    let pick = |rng: &mut ChaCha8Rng| {
        if rng.gen_bool(0.5) {
            random_perm_func(k, rng)
        } else {
            random_func(k, rng)
        }
    };
    // retry until the pair spans a plane of 𝒵
    let (f, g) = loop {
        let (f, g) = (pick(rng), pick(rng));
        if Matrix::from_rows(&[f.coeffs(), g.coeffs()]).rank(k) == 2 {
            break (f, g);
        }
    };
    let h = combine(k, [elem(k, rng), elem(k, rng), Felt::ZERO], [&f, &g, &g]);
    let m = random_invertible(k, rng);
    let [f1, g1, h1] = mix(k, &m, [&f, &g, &h]);
    let herd = HerdSpace::build(k, &f1, &g1, &h1)?;
    let HerdKind::ProperStar { kernel, .. } = herd.classify() else {
        return Ok(Some(format!("({f1}, {g1}, {h1}) is not a proper star")));
    };
    let lines: HashSet<_> = herd
        .phc()
        .iter()
        .map(|p| line_through(k, &kernel, p))
        .collect::<Result<_>>()?;
    // P(𝒱) = {⟨xf + yg⟩}; count permutation classes by evaluating tables
    let mut in_s = 0;
    for (x, y) in std::iter::once((Felt::ONE, Felt::ZERO)).chain(k.elements().map(|y| (y, Felt::ONE))) {
        let v = combine(k, [x, y, Felt::ZERO], [&f, &g, &g]);
        if is_perm_by_values(k, &v) {
            in_s += 1;
        }
    }
    Ok(fail(lines.len() == in_s, || {
        format!("({f1}, {g1}, {h1}): {} cover lines, |S n P(V)| = {in_s}", lines.len())
    }))
}

fn normalized_case(k: &Field, rng: &mut ChaCha8Rng) -> CaseResult {
    let a = flock_of(k, random_triple(k, rng))?;
    let herd = HerdSpace::of_flock(&a);
    let rho = herd.rho_herd(&Selection::Normalized)?;
    let points: Vec<Point2> = rho.members.iter().map(|m| m.point).collect();
    let ok = points == herd.phc()
        && rho.members.iter().all(|m| {
            m.function.eval(k, Felt::ONE) == Felt::ONE
                && is_perm_by_values(k, &m.function)
                && herd.phi(m.rep) == m.function
        });
    Ok(fail(ok, || format!("{a}: normalized herd fails")))
}

fn reconstruction_case(k: &Field, rng: &mut ChaCha8Rng) -> CaseResult {
    let m = random_invertible(k, rng);
    let ps = [random_perm_func(k, rng), random_perm_func(k, rng), random_perm_func(k, rng)];
    let a = flock_of(k, mix(k, &m, [&ps[0], &ps[1], &ps[2]]))?;
    let herd = HerdSpace::of_flock(&a);
    let selection = match rng.gen_range(0..4) {
        0 => Selection::Standardized,
        1 => Selection::Alternate,
        2 => Selection::Normalized,
        _ => {
            let table = herd
                .phc()
                .into_iter()
                .map(|p| {
                    let s = unit(k, rng);
                    (p, p.coords().map(|c| k.mul(c, s)))
                })
                .collect();
            Selection::Custom(table)
        }
    };
    let rho = herd.rho_herd(&selection)?;
    let back = rho.reconstruct(k)?;
    Ok(fail(back == a, || {
        format!("{a} rebuilt as {back} with {} selection", selection.name())
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn letters_round_trip() {
        for s in Suite::ALL {
            assert_eq!(Suite::from_letter(s.letter()), Some(s));
        }
        assert_eq!(Suite::SameHerdSpace.letter(), 'a');
        assert_eq!(Suite::Reconstruction.letter(), 'g');
        assert_eq!(Suite::from_letter('h'), None);
    }

    #[test]
    fn small_runs_pass_and_are_deterministic() {
        for s in Suite::ALL {
            let r = run_suite(s, 60, 7).unwrap();
            assert!(r.passed(), "{:?}: {:?}", s, r.failures);
        }
        let a = run_suite(Suite::SameHerdSpace, 40, 3).unwrap();
        let b = run_suite(Suite::SameHerdSpace, 40, 3).unwrap();
        assert_eq!(a.failures, b.failures);
    }

    #[test]
    fn generators_hit_every_shape() {
        let k = Field::with_order(7).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut seen = HashSet::new();
        for _ in 0..200 {
            let t = random_triple(&k, &mut rng);
            let h = HerdSpace::build(&k, &t[0], &t[1], &t[2]).unwrap();
            seen.insert(match h.classify() {
                HerdKind::Bijective => 0,
                HerdKind::ProperStar { .. } => 1,
                HerdKind::Linear { .. } => 2,
            });
        }
        assert_eq!(seen.len(), 3);
    }
}
