//! Command implementations for the `flockherd` binary.
//!
//! Every command renders to a string so that output is assembled in one
//! place and identical invocations produce identical bytes.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use herd_core::equiv::{search_equivalence_tau_id, search_size, verify_equivalence, Group, Level, Tau, Witness};
use herd_core::families::{check_table, make_family_flock, Family, FamilySpec, Table, TableCheck};
use herd_core::gf::{is_prime_power, Felt, Field};
use herd_core::projgeom::{Homography, Point2};
use herd_core::selfcheck::{run_suite, Suite};
use herd_core::smallq::{
    classify_small_q, enumerate_perm_points_with, hyperplane_check, quadric_check_q7, table3_typecheck,
    EnumerateOptions, PermPointSet, TemplateType,
};
use herd_core::{Error as CoreError, Flock, HerdSpace, Selection};

#[derive(Parser, Debug)]
#[command(name = "flockherd", version, about = "Herd spaces and herd covers of flocks of planes in PG(3,q)")]
pub struct Cli {
    /// Field: "q", "p^e" or "p^e/c0,c1,...,1".
    #[arg(long, global = true)]
    pub field: Option<String>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Write to this file instead of standard output.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Seed for the randomized checks.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Herd space, herd cover or a ρ-herd of a flock.
    Herd(HerdArgs),
    /// Compare computed herd covers with the predicted tables (1, 2) or type-check GF(7) (3).
    Table(TableArgs),
    /// Facts behind the classification of flocks for q in {2,3,4,5,7}.
    Classify {
        #[arg(long)]
        q: u32,
    },
    /// Verify or search for an equivalence of two herd spaces.
    #[command(subcommand)]
    Equiv(EquivCommand),
    /// Enumerate the permutation points of P(Z).
    Permpoints(PermArgs),
    /// Named flock families.
    #[command(subcommand)]
    Catalog(CatalogCommand),
    /// Run the randomized property suites.
    Props(PropsArgs),
}

#[derive(Args, Debug)]
pub struct FlockInput {
    /// Coordinate functions "f;g;h".
    #[arg(long)]
    pub flock: Option<String>,
    /// File whose first non-blank, non-'#' line is "f;g;h".
    #[arg(long, conflicts_with = "flock")]
    pub flock_file: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct HerdArgs {
    #[command(flatten)]
    pub input: FlockInput,
    /// Only the herd cover.
    #[arg(long)]
    pub phc: bool,
    /// Print the ρ-herd for this selection.
    #[arg(long, value_enum)]
    pub selection: Option<SelectionArg>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SelectionArg {
    Standardized,
    Alternate,
    Normalized,
}

#[derive(Args, Debug)]
pub struct TableArgs {
    /// Table number: 1, 2 or 3.
    #[arg(long = "n")]
    pub n: u8,
    /// Field orders: "5,7,8" or a range "7..29" (non prime powers skipped).
    #[arg(long)]
    pub fields: Option<String>,
}

#[derive(Subcommand, Debug)]
pub enum EquivCommand {
    Verify(VerifyArgs),
    Search(SearchArgs),
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(long)]
    pub flock1: String,
    #[arg(long)]
    pub flock2: String,
    /// ψ as matrix rows "a,b,c;d,e,f;g,h,i" of element codes, acting on columns.
    #[arg(long)]
    pub psi: String,
    /// Frobenius exponent of ψ.
    #[arg(long, default_value_t = 0)]
    pub frobenius: u32,
    /// τ as a permutation table "p(0),p(1),..." of element codes; identity if absent.
    #[arg(long)]
    pub tau_perm: Option<String>,
    #[arg(long, value_enum, default_value_t = LevelArg::Equivalent)]
    pub level: LevelArg,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum LevelArg {
    Equivalent,
    Strong,
    Herd,
}

#[derive(Args, Debug)]
pub struct SearchArgs {
    #[arg(long)]
    pub flock1: String,
    #[arg(long)]
    pub flock2: String,
    /// Include field automorphisms (PΓL(3,q)).
    #[arg(long)]
    pub semilinear: bool,
    /// Refuse searches with more candidates than this.
    #[arg(long, default_value_t = 100_000_000)]
    pub budget: u64,
}

#[derive(Args, Debug)]
pub struct PermArgs {
    /// Comma-separated checks: hyperplane, quadric, table3.
    #[arg(long)]
    pub check: Option<String>,
    /// Scan every degree instead of the admissible ones.
    #[arg(long)]
    pub all_degrees: bool,
    #[arg(long, default_value_t = herd_core::smallq::DEFAULT_BOUND)]
    pub bound: u32,
}

#[derive(Subcommand, Debug)]
pub enum CatalogCommand {
    /// Build a member of a named family.
    Make {
        /// linear, ftw, kantor-payne, k3, alpha, beta.
        #[arg(long)]
        family: String,
        /// Nonsquare n (element code) for k3.
        #[arg(long)]
        n: Option<u32>,
        /// Exponent i for alpha and beta.
        #[arg(long)]
        i: Option<u32>,
    },
    /// Compare one field against Table 1 or 2.
    CheckTable {
        #[arg(long)]
        table: u8,
    },
}

#[derive(Args, Debug)]
pub struct PropsArgs {
    #[arg(long, default_value_t = herd_core::selfcheck::DEFAULT_CASES)]
    pub cases: usize,
    /// Suite letters, e.g. "abg"; all when absent.
    #[arg(long)]
    pub suite: Option<String>,
}

/// Rendered output and whether every check passed.
#[derive(Debug)]
pub struct Outcome {
    pub text: String,
    pub ok: bool,
}

impl Outcome {
    fn ok(text: String) -> Outcome {
        Outcome { text, ok: true }
    }
}

/// Herd output schema for `--format json`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HerdJson {
    pub field: String,
    pub flock: String,
    pub entries: Vec<EntryJson>,
    pub phc: Vec<[u32; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub herd: Option<RhoHerdJson>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntryJson {
    pub point: [u32; 3],
    /// Canonical representative of the class, "0" for the zero class.
    pub class: String,
    pub permutation: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RhoHerdJson {
    pub selection: String,
    pub members: Vec<MemberJson>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MemberJson {
    pub point: [u32; 3],
    pub rep: [u32; 3],
    pub function: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableJson {
    pub table: u8,
    pub q: u32,
    pub row: String,
    pub pass: bool,
    pub predicted: Vec<[u32; 3]>,
    pub computed: Vec<[u32; 3]>,
    pub missing: Vec<[u32; 3]>,
    pub extra: Vec<[u32; 3]>,
}

pub fn run(cli: &Cli) -> Result<Outcome> {
    if let Some(n) = cli.threads {
        // a second call in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    match &cli.command {
        Command::Herd(a) => cmd_herd(cli, a),
        Command::Table(a) => cmd_table(cli, a),
        Command::Classify { q } => cmd_classify(cli, *q),
        Command::Equiv(EquivCommand::Verify(a)) => cmd_verify(cli, a),
        Command::Equiv(EquivCommand::Search(a)) => cmd_search(cli, a),
        Command::Permpoints(a) => cmd_permpoints(cli, a),
        Command::Catalog(CatalogCommand::Make { family, n, i }) => cmd_make(cli, family, *n, *i),
        Command::Catalog(CatalogCommand::CheckTable { table }) => {
            let field = require_field(cli)?;
            let t = Table::from_number(*table).ok_or_else(|| anyhow!("table must be 1 or 2"))?;
            render_tables(cli.format, t, &[field])
        }
        Command::Props(a) => cmd_props(cli, a),
    }
}

fn require_field(cli: &Cli) -> Result<Field> {
    let spec = cli.field.as_deref().ok_or_else(|| anyhow!("--field is required"))?;
    Ok(Field::from_spec(spec)?)
}

fn read_flock(field: &Field, input: &FlockInput) -> Result<Flock> {
    match (&input.flock, &input.flock_file) {
        (Some(text), _) => Ok(Flock::parse(field, text)?),
        (None, Some(path)) => {
            let body = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            let (idx, line) = body
                .lines()
                .enumerate()
                .find(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
                .ok_or_else(|| anyhow!("{} holds no flock", path.display()))?;
            Flock::parse(field, line).map_err(|e| match e {
                CoreError::Parse { column, message, .. } => CoreError::Parse {
                    line: idx + 1,
                    column,
                    message,
                }
                .into(),
                other => other.into(),
            })
        }
        (None, None) => bail!("--flock or --flock-file is required"),
    }
}

fn codes(p: &Point2) -> [u32; 3] {
    p.codes()
}

fn csv_point(p: &Point2) -> String {
    let [a, b, c] = p.codes();
    format!("{a},{b},{c}")
}

fn json(value: &impl Serialize) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

fn cmd_herd(cli: &Cli, a: &HerdArgs) -> Result<Outcome> {
    let k = require_field(cli)?;
    let flock = read_flock(&k, &a.input)?;
    let herd = HerdSpace::of_flock(&flock);
    let rho = match a.selection {
        None => None,
        Some(s) => {
            let sel = match s {
                SelectionArg::Standardized => Selection::Standardized,
                SelectionArg::Alternate => Selection::Alternate,
                SelectionArg::Normalized => Selection::Normalized,
            };
            Some(herd.rho_herd(&sel)?)
        }
    };
    let entries: Vec<_> = herd
        .entries()
        .iter()
        .filter(|e| !a.phc || e.permutation)
        .collect();
    let class_text = |c: &herd_core::ZClass| c.rep().map_or("0".to_string(), |r| r.to_string());
    let text = match cli.format {
        Format::Json => {
            let out = HerdJson {
                field: k.spec_string(),
                flock: flock.to_string(),
                entries: entries
                    .iter()
                    .map(|e| EntryJson {
                        point: codes(&e.point),
                        class: class_text(&e.class),
                        permutation: e.permutation,
                    })
                    .collect(),
                phc: herd.phc().iter().map(codes).collect(),
                herd: rho.as_ref().map(|r| RhoHerdJson {
                    selection: r.selection.clone(),
                    members: r
                        .members
                        .iter()
                        .map(|m| MemberJson {
                            point: codes(&m.point),
                            rep: m.rep.map(|x| x.code()),
                            function: m.function.to_string(),
                        })
                        .collect(),
                }),
            };
            json(&out)?
        }
        Format::Csv => {
            let mut s = String::new();
            if let Some(r) = &rho {
                s.push_str("a,b,c,r0,r1,r2,function\n");
                for m in &r.members {
                    let [x, y, z] = m.rep.map(|v| v.code());
                    writeln!(s, "{},{x},{y},{z},{}", csv_point(&m.point), m.function)?;
                }
            } else if a.phc {
                for e in &entries {
                    writeln!(s, "{}", csv_point(&e.point))?;
                }
            } else {
                s.push_str("a,b,c,class,permutation\n");
                for e in &entries {
                    writeln!(s, "{},{},{}", csv_point(&e.point), class_text(&e.class), e.permutation)?;
                }
            }
            s
        }
        Format::Text => {
            let mut s = format!("# GF({}) {flock}\n", k.q());
            if let Some(r) = &rho {
                writeln!(s, "# {} herd, {} members", r.selection, r.members.len())?;
                for m in &r.members {
                    let rep: Vec<String> = m.rep.iter().map(|x| x.to_string()).collect();
                    writeln!(s, "{}\t({})\t{}", m.point, rep.join(","), m.function)?;
                }
            } else {
                for e in &entries {
                    let mark = if e.permutation { "perm" } else { "-" };
                    writeln!(s, "{}\t{}\t{mark}", e.point, class_text(&e.class))?;
                }
                writeln!(s, "# |P_HC| = {}", herd.phc().len())?;
            }
            s
        }
    };
    Ok(Outcome::ok(text))
}

/// Parses "5,7,8", "7..29" or a mix such as "5,7..13".
pub fn parse_fields(spec: &str) -> Result<Vec<u64>> {
    let mut out = Vec::new();
    for part in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        if let Some((lo, hi)) = part.split_once("..") {
            let lo: u64 = lo.trim().parse().with_context(|| format!("bad range start in {part:?}"))?;
            let hi: u64 = hi.trim().parse().with_context(|| format!("bad range end in {part:?}"))?;
            out.extend((lo..=hi).filter(|&q| is_prime_power(q)));
        } else {
            let q: u64 = part.parse().with_context(|| format!("bad field order {part:?}"))?;
            if !is_prime_power(q) {
                bail!("{q} is not a prime power");
            }
            out.push(q);
        }
    }
    Ok(out)
}

fn cmd_table(cli: &Cli, a: &TableArgs) -> Result<Outcome> {
    let fields: Vec<Field> = match (&a.fields, &cli.field) {
        (Some(list), _) => parse_fields(list)?
            .into_iter()
            .map(Field::with_order)
            .collect::<std::result::Result<_, _>>()?,
        (None, Some(_)) => vec![require_field(cli)?],
        (None, None) => bail!("--field or --fields is required"),
    };
    if a.n == 3 {
        let mut text = String::new();
        let mut ok = true;
        for k in &fields {
            let out = table3(cli.format, k)?;
            ok &= out.ok;
            text.push_str(&out.text);
        }
        return Ok(Outcome { text, ok });
    }
    let t = Table::from_number(a.n).ok_or_else(|| anyhow!("--n must be 1, 2 or 3"))?;
    render_tables(cli.format, t, &fields)
}

fn table_json(c: &TableCheck) -> TableJson {
    let v = |ps: &[Point2]| ps.iter().map(codes).collect();
    TableJson {
        table: c.predicted.table.number(),
        q: c.predicted.q,
        row: c.predicted.row.to_string(),
        pass: c.passed(),
        predicted: v(&c.predicted.points),
        computed: v(&c.computed),
        missing: v(&c.missing),
        extra: v(&c.extra),
    }
}

fn render_tables(format: Format, t: Table, fields: &[Field]) -> Result<Outcome> {
    let checks: Vec<TableCheck> = fields
        .iter()
        .map(|k| check_table(t, k))
        .collect::<std::result::Result<_, _>>()?;
    let ok = checks.iter().all(TableCheck::passed);
    let show = |ps: &[Point2]| ps.iter().map(|p| format!("({p})")).collect::<Vec<_>>().join(" ");
    let text = match format {
        Format::Json => json(&checks.iter().map(table_json).collect::<Vec<_>>())?,
        Format::Csv => {
            let mut s = String::from("table,q,result,predicted,computed,missing,extra\n");
            for c in &checks {
                writeln!(
                    s,
                    "{},{},{},{},{},{},{}",
                    t.number(),
                    c.predicted.q,
                    if c.passed() { "PASS" } else { "FAIL" },
                    c.predicted.points.len(),
                    c.computed.len(),
                    c.missing.len(),
                    c.extra.len()
                )?;
            }
            s
        }
        Format::Text => {
            let mut s = String::new();
            for c in &checks {
                let tag = if c.passed() { "PASS" } else { "FAIL" };
                writeln!(
                    s,
                    "table {} q={}: {tag} ({} points) [{}]",
                    t.number(),
                    c.predicted.q,
                    c.computed.len(),
                    c.predicted.row
                )?;
                if !c.missing.is_empty() {
                    writeln!(s, "  missing: {}", show(&c.missing))?;
                }
                if !c.extra.is_empty() {
                    writeln!(s, "  extra: {}", show(&c.extra))?;
                }
            }
            s
        }
    };
    Ok(Outcome { text, ok })
}

fn enumerate(k: &Field, all_degrees: bool, bound: u32) -> Result<PermPointSet> {
    Ok(enumerate_perm_points_with(
        k,
        EnumerateOptions {
            bound,
            hermite_prefilter: !all_degrees,
        },
    )?)
}

fn table3(format: Format, k: &Field) -> Result<Outcome> {
    let set = enumerate(k, false, 7)?;
    let rep = table3_typecheck(&set)?;
    let ok = rep.unmatched.is_empty() && set.len() == 120;
    let counts: Vec<String> = rep.per_type.iter().map(|(t, c)| format!("{t} {c}")).collect();
    let text = match format {
        Format::Json => {
            let per_type: BTreeMap<String, usize> = rep.per_type.iter().map(|(t, c)| (t.to_string(), *c)).collect();
            json(&serde_json::json!({
                "table": 3,
                "q": k.q(),
                "points": set.len(),
                "per_type": per_type,
                "overlaps": rep.overlaps,
                "unmatched": rep.unmatched.len(),
                "pass": ok,
            }))?
        }
        Format::Csv => {
            let mut s = String::from("polynomial,types\n");
            for (p, l) in set.points.iter().zip(&rep.labels) {
                let l: Vec<String> = l.iter().map(TemplateType::to_string).collect();
                writeln!(s, "{p},{}", l.join("+"))?;
            }
            s
        }
        Format::Text => format!(
            "table 3 q={}: {} ({} points; {}; overlaps {}; unmatched {})\n",
            k.q(),
            if ok { "PASS" } else { "FAIL" },
            set.len(),
            counts.join(", "),
            rep.overlaps,
            rep.unmatched.len()
        ),
    };
    Ok(Outcome { text, ok })
}

fn cmd_classify(cli: &Cli, q: u32) -> Result<Outcome> {
    let r = classify_small_q(q)?;
    let text = match cli.format {
        Format::Json => json(&serde_json::json!({
            "q": r.q,
            "perm_points": r.perm_points,
            "degree_spectrum": r.degree_spectrum,
            "in_hyperplane": r.in_hyperplane,
            "max_on_line": r.max_on_line,
            "max_through_t": r.max_through_t,
            "extremal_planes": r.extremal_planes.len(),
            "facts": r.facts,
            "conclusion": r.conclusion,
        }))?,
        Format::Csv => {
            let mut s = String::from("key,value\n");
            writeln!(s, "q,{}", r.q)?;
            writeln!(s, "perm_points,{}", r.perm_points)?;
            writeln!(s, "in_hyperplane,{}", r.in_hyperplane)?;
            writeln!(s, "max_on_line,{}", r.max_on_line)?;
            writeln!(s, "max_through_t,{}", r.max_through_t)?;
            writeln!(s, "conclusion,{}", r.conclusion)?;
            s
        }
        Format::Text => format!("{r}\n"),
    };
    Ok(Outcome::ok(text))
}

/// Parses "a,b,c;d,e,f;g,h,i".
fn parse_matrix(k: &Field, s: &str) -> Result<[[Felt; 3]; 3]> {
    let rows: Vec<&str> = s.split(';').collect();
    if rows.len() != 3 {
        bail!("--psi needs three rows separated by ';'");
    }
    let mut m = [[Felt::ZERO; 3]; 3];
    for (i, row) in rows.iter().enumerate() {
        let vals: Vec<&str> = row.split(',').map(str::trim).collect();
        if vals.len() != 3 {
            bail!("row {} of --psi needs three entries", i + 1);
        }
        for (j, v) in vals.iter().enumerate() {
            let code: u64 = v.parse().with_context(|| format!("bad entry {v:?} in --psi"))?;
            m[i][j] = k.element(code)?;
        }
    }
    Ok(m)
}

fn cmd_verify(cli: &Cli, a: &VerifyArgs) -> Result<Outcome> {
    let k = require_field(cli)?;
    let f1 = Flock::parse(&k, &a.flock1)?;
    let f2 = Flock::parse(&k, &a.flock2)?;
    let psi = Homography::semilinear(&k, parse_matrix(&k, &a.psi)?, a.frobenius)?;
    let tau = match &a.tau_perm {
        None => Tau::Identity,
        Some(s) => {
            let table = s
                .split(',')
                .map(|c| {
                    let code: u64 = c.trim().parse().with_context(|| format!("bad code {c:?}"))?;
                    Ok(k.element(code)?)
                })
                .collect::<Result<Vec<Felt>>>()?;
            Tau::Perm(table)
        }
    };
    let level = match a.level {
        LevelArg::Equivalent => Level::Equivalent,
        LevelArg::Strong => Level::Strong,
        LevelArg::Herd => Level::Herd,
    };
    let (g1, g2) = (HerdSpace::of_flock(&f1), HerdSpace::of_flock(&f2));
    let r = verify_equivalence(&g1, &g2, &Witness { psi, tau }, level)?;
    let level_name = format!("{:?}", a.level).to_lowercase();
    let failure = r.first_failure.map_or("none".to_string(), |p| p.to_string());
    let text = match cli.format {
        Format::Json => json(&serde_json::json!({
            "level": level_name,
            "holds": r.holds,
            "spans_match": r.spans_match,
            "first_failure": r.first_failure.map(|p| codes(&p)),
            "psi_maps_cover": r.psi_maps_cover,
            "same_cover": r.same_cover,
            "preserves_s": r.preserves_s,
        }))?,
        Format::Csv => format!(
            "level,holds,spans_match,first_failure,psi_maps_cover,same_cover,preserves_s\n{level_name},{},{},{failure},{},{},{}\n",
            r.holds, r.spans_match, r.psi_maps_cover, r.same_cover, r.preserves_s
        ),
        Format::Text => format!(
            "level={level_name} holds={}\nspans_match={} first_failure={failure}\npsi_maps_cover={} same_cover={} preserves_s={}\n",
            r.holds, r.spans_match, r.psi_maps_cover, r.same_cover, r.preserves_s
        ),
    };
    Ok(Outcome { text, ok: r.holds })
}

fn cmd_search(cli: &Cli, a: &SearchArgs) -> Result<Outcome> {
    let k = require_field(cli)?;
    let f1 = Flock::parse(&k, &a.flock1)?;
    let f2 = Flock::parse(&k, &a.flock2)?;
    let (g1, g2) = (HerdSpace::of_flock(&f1), HerdSpace::of_flock(&f2));
    let group = if a.semilinear { Group::PGammaL3 } else { Group::Pgl3 };
    let size = search_size(&g1, &g2, group);
    let found = search_equivalence_tau_id(&g1, &g2, group, a.budget)?;
    let rows = |h: &Homography<3>| -> Vec<Vec<u32>> { h.rows().iter().map(|r| r.iter().map(|x| x.code()).collect()).collect() };
    let text = match cli.format {
        Format::Json => json(&serde_json::json!({
            "candidates": size,
            "found": found.is_some(),
            "psi": found.as_ref().map(rows),
            "frobenius": found.as_ref().map(|h| h.frobenius_exponent()),
        }))?,
        Format::Csv => {
            let mut s = String::from("row,c0,c1,c2\n");
            if let Some(h) = &found {
                for (i, r) in rows(h).iter().enumerate() {
                    writeln!(s, "{i},{},{},{}", r[0], r[1], r[2])?;
                }
            }
            s
        }
        Format::Text => match &found {
            None => format!("no witness with tau = id among {size} candidates\n"),
            Some(h) => {
                let mut s = format!("witness (tau = id, frobenius {}), psi acting on columns:\n", h.frobenius_exponent());
                for r in rows(h) {
                    let r: Vec<String> = r.iter().map(u32::to_string).collect();
                    writeln!(s, "  {}", r.join(" "))?;
                }
                s
            }
        },
    };
    Ok(Outcome {
        text,
        ok: found.is_some(),
    })
}

fn cmd_permpoints(cli: &Cli, a: &PermArgs) -> Result<Outcome> {
    let k = require_field(cli)?;
    let set = enumerate(&k, a.all_degrees, a.bound)?;
    let mut checks: Vec<(String, bool, String)> = Vec::new();
    for name in a.check.iter().flat_map(|s| s.split(',')).map(str::trim).filter(|s| !s.is_empty()) {
        let (ok, note) = match name {
            "hyperplane" => (hyperplane_check(&set), String::new()),
            "quadric" => (quadric_check_q7(&set)?, String::new()),
            "table3" => {
                let r = table3_typecheck(&set)?;
                let counts: Vec<String> = r.per_type.iter().map(|(t, c)| format!("{t} {c}")).collect();
                (
                    r.unmatched.is_empty(),
                    format!("{}; overlaps {}; unmatched {}", counts.join(", "), r.overlaps, r.unmatched.len()),
                )
            }
            other => bail!("unknown check {other:?} (hyperplane, quadric, table3)"),
        };
        checks.push((name.to_string(), ok, note));
    }
    let ok = checks.iter().all(|c| c.1);
    let text = match cli.format {
        Format::Json => {
            let checks: BTreeMap<&str, bool> = checks.iter().map(|(n, ok, _)| (n.as_str(), *ok)).collect();
            json(&serde_json::json!({
                "field": k.spec_string(),
                "count": set.len(),
                "degree_spectrum": set.degree_spectrum(),
                "points": set.points.iter().map(|p| p.to_string()).collect::<Vec<_>>(),
                "checks": checks,
            }))?
        }
        Format::Csv => {
            let mut s = String::from("degree,polynomial\n");
            for p in &set.points {
                writeln!(s, "{},{p}", p.degree().unwrap_or(0))?;
            }
            s
        }
        Format::Text => {
            let mut s = String::new();
            for p in &set.points {
                writeln!(s, "{p}")?;
            }
            writeln!(s, "# {} permutation points", set.len())?;
            for (name, ok, note) in &checks {
                let tag = if *ok { "PASS" } else { "FAIL" };
                if note.is_empty() {
                    writeln!(s, "check {name}: {tag}")?;
                } else {
                    writeln!(s, "check {name}: {tag} ({note})")?;
                }
            }
            s
        }
    };
    Ok(Outcome { text, ok })
}

fn cmd_make(cli: &Cli, family: &str, n: Option<u32>, i: Option<u32>) -> Result<Outcome> {
    let k = require_field(cli)?;
    let fam = Family::from_name(family).ok_or_else(|| anyhow!("unknown family {family:?}"))?;
    let spec = FamilySpec {
        family: fam,
        field: k.clone(),
        n: n.map(|c| k.element(c as u64)).transpose()?,
        i,
    };
    let flock = make_family_flock(&spec)?;
    let phc = HerdSpace::of_flock(&flock).phc();
    let text = match cli.format {
        Format::Json => json(&serde_json::json!({
            "family": fam.name(),
            "formula": spec.formula(),
            "flock": flock.to_record(),
            "phc": phc.iter().map(codes).collect::<Vec<_>>(),
        }))?,
        Format::Csv => {
            let mut s = String::new();
            for p in &phc {
                writeln!(s, "{}", csv_point(p))?;
            }
            s
        }
        Format::Text => format!(
            "{} over GF({}): {}\nreduced: {flock}\n|P_HC| = {}\n",
            fam.name(),
            k.q(),
            spec.formula(),
            phc.len()
        ),
    };
    Ok(Outcome::ok(text))
}

fn cmd_props(cli: &Cli, a: &PropsArgs) -> Result<Outcome> {
    let suites: Vec<Suite> = match &a.suite {
        None => Suite::ALL.to_vec(),
        Some(s) => s
            .chars()
            .filter(|c| !c.is_whitespace() && *c != ',')
            .map(|c| Suite::from_letter(c).ok_or_else(|| anyhow!("unknown suite {c:?} (a-g)")))
            .collect::<Result<_>>()?,
    };
    let mut results = Vec::new();
    for s in suites {
        results.push(run_suite(s, a.cases, cli.seed)?);
    }
    let ok = results.iter().all(|r| r.passed());
    let text = match cli.format {
        Format::Json => json(
            &results
                .iter()
                .map(|r| {
                    serde_json::json!({
                        "suite": r.suite.letter().to_string(),
                        "description": r.suite.describe(),
                        "cases": r.cases,
                        "failures": r.failures,
                    })
                })
                .collect::<Vec<_>>(),
        )?,
        Format::Csv => {
            let mut s = String::from("suite,cases,failures\n");
            for r in &results {
                writeln!(s, "{},{},{}", r.suite.letter(), r.cases, r.failures.len())?;
            }
            s
        }
        Format::Text => {
            let mut s = format!("seed {}\n", cli.seed);
            for r in &results {
                let tag = if r.passed() { "PASS" } else { "FAIL" };
                writeln!(
                    s,
                    "({}) {}: {}/{} {tag}",
                    r.suite.letter(),
                    r.suite.describe(),
                    r.cases - r.failures.len(),
                    r.cases
                )?;
                for f in r.failures.iter().take(5) {
                    writeln!(s, "  {f}")?;
                }
            }
            s
        }
    };
    Ok(Outcome { text, ok })
}
