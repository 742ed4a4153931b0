//! Argument parsing and the subcommands.
//!
//! Exit codes: `0` when every check passes, `1` on a verification failure
//! (a reproducer file is written), `2` on usage or input errors.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use slchi::counting::{self, exact_chi_formula};
use slchi::cusp_global::{self as cg, Base, CongruenceFamily, Kind, Methods};
use slchi::error::Reproducer;
use slchi::rat;
use slchi::sl2_local::{self as sl2, Mat2};
use slchi::slope::{show_line, telescoping_report};
use slchi::subgroup::{enumerate_subgroups, lines, Subgroup, DEFAULT_CAP};
use slchi::{Error, Ring};

use crate::output::{self, Doc, Format};
use crate::parse;
use crate::verify;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Subgroup enumeration limit on `|SL_2(R)|` when `--cap` is not given.
const LATTICE_CAP: usize = 1000;

#[derive(Parser, Debug)]
#[command(name = "slchi", version, about = "Orbit counts for subgroups of SL_2 over finite chain rings, and cusp counts")]
pub struct Cli {
    #[arg(long, value_enum, default_value = "text", global = true)]
    pub format: Format,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value_t = verify::Config::default().seed, global = true)]
    pub seed: u64,
    /// Closure cap for generated subgroups (and the group-order limit for `--all-subgroups`).
    #[arg(long, global = true)]
    pub cap: Option<usize>,
    /// Where a failing run writes its reproducer.
    #[arg(long, default_value = "slchi-reproducer.json", global = true)]
    pub reproducer: PathBuf,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Ring invariants and the order identities.
    Ring(RingArgs),
    /// chi_e(H) with its line formula and bound rows.
    Chi(ChiArgs),
    /// T_j(lambda) against the telescoped A_j.
    Slope(SlopeArgs),
    /// Cusp counts by every available method.
    Cusps(CuspArgs),
    /// Closed-form cusp ratios over Q for all levels up to a bound.
    Decay(DecayArgs),
    /// The full verification suite.
    Verify(VerifyArgs),
}

#[derive(Args, Debug)]
pub struct RingArgs {
    /// `p=3,e=2`, `p=2,f=2,e=3` or `p=2,e=6,poly=x^2-2`
    #[arg(long)]
    pub ring: String,
    /// Also count det-one matrices by brute force (rings of at most 256 elements).
    #[arg(long)]
    pub check: bool,
}

#[derive(Args, Debug)]
pub struct SubgroupArgs {
    #[arg(long)]
    pub ring: String,
    /// `;`-separated generators, e.g. `I+3E; l(3)`
    #[arg(long, conflicts_with = "all_subgroups")]
    pub gens: Option<String>,
    /// Replace the generated subgroup by its normal closure.
    #[arg(long, requires = "gens")]
    pub normal_closure: bool,
    /// Every subgroup of SL_2(R).
    #[arg(long)]
    pub all_subgroups: bool,
}

#[derive(Args, Debug)]
pub struct ChiArgs {
    #[command(flatten)]
    pub sub: SubgroupArgs,
    /// Degree of the ambient number field, for the uniform bound row.
    #[arg(long)]
    pub degree: Option<usize>,
}

#[derive(Args, Debug)]
pub struct SlopeArgs {
    #[command(flatten)]
    pub sub: SubgroupArgs,
    /// Restrict to one line `x:y` (default: all lines).
    #[arg(long)]
    pub line: Option<String>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Family {
    Gamma,
    Gamma1,
    Gamma0,
}

impl From<Family> for Kind {
    fn from(f: Family) -> Kind {
        match f {
            Family::Gamma => Kind::Gamma,
            Family::Gamma1 => Kind::Gamma1,
            Family::Gamma0 => Kind::Gamma0,
        }
    }
}

#[derive(Args, Debug)]
pub struct CuspArgs {
    /// `Q` or `d=<squarefree d>`
    #[arg(long, default_value = "Q")]
    pub base: String,
    #[arg(long, value_enum)]
    pub family: Family,
    /// `12` over Q; `(3)`, `(2+w)` or `(5, 2+w)` over a quadratic field
    #[arg(long, required_unless_present = "up_to", conflicts_with = "up_to")]
    pub level: Option<String>,
    /// Every level of norm at most this bound.
    #[arg(long)]
    pub up_to: Option<u64>,
    #[arg(long)]
    pub no_pair_orbit: bool,
    #[arg(long)]
    pub no_double_coset: bool,
}

#[derive(Args, Debug)]
pub struct DecayArgs {
    #[arg(long, value_enum, default_value = "gamma0")]
    pub family: Family,
    #[arg(long, default_value_t = 100_000)]
    pub max: u64,
    /// Emit one row per level instead of the summary.
    #[arg(long)]
    pub rows: bool,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// Criteria to run, by name or number (comma separated).
    #[arg(long, value_delimiter = ',')]
    pub only: Vec<String>,
    /// Dyadic-word samples per ring and lemma.
    #[arg(long, default_value_t = verify::Config::default().samples)]
    pub samples: usize,
    /// Show wall-clock time per criterion (makes output nondeterministic).
    #[arg(long)]
    pub timings: bool,
}

/// A command's rendered output plus any verification failures.
pub struct Outcome {
    pub doc: Doc,
    pub failures: Vec<Reproducer>,
}

enum Fail {
    Usage(String),
    Lib(Error),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Fail {
        Fail::Lib(e)
    }
}

impl From<String> for Fail {
    fn from(e: String) -> Fail {
        Fail::Usage(e)
    }
}

type CmdResult = std::result::Result<Outcome, Fail>;

/// Parse `args` (including the program name), run, and return the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let outcome = match &cli.command {
        Command::Ring(a) => cmd_ring(a),
        Command::Chi(a) => cmd_chi(&cli, a),
        Command::Slope(a) => cmd_slope(&cli, a),
        Command::Cusps(a) => cmd_cusps(a),
        Command::Decay(a) => cmd_decay(a),
        Command::Verify(a) => cmd_verify(&cli, a),
    };
    let outcome = match outcome {
        Ok(o) => o,
        Err(Fail::Usage(m)) => {
            eprintln!("error: {m}");
            return EXIT_USAGE;
        }
        Err(Fail::Lib(Error::VerificationFailure(rep))) => Outcome { doc: Doc::default(), failures: vec![*rep] },
        Err(Fail::Lib(e)) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    if let Err(e) = output::emit(&outcome.doc, cli.format, cli.out.as_deref()) {
        eprintln!("error: writing output: {e}");
        return EXIT_USAGE;
    }
    if outcome.failures.is_empty() {
        return EXIT_OK;
    }
    let argv: Vec<String> = args.iter().map(|a| a.to_string_lossy().into_owned()).collect();
    match write_reproducer(&cli.reproducer, &argv, &outcome.failures) {
        Ok(()) => eprintln!("{} verification failure(s); reproducer written to {}", outcome.failures.len(), cli.reproducer.display()),
        Err(e) => eprintln!("{} verification failure(s); could not write reproducer: {e}", outcome.failures.len()),
    }
    EXIT_FAILURE
}

pub fn write_reproducer(path: &Path, argv: &[String], failures: &[Reproducer]) -> std::io::Result<()> {
    let doc = json!({"command": argv, "failures": failures});
    std::fs::write(path, serde_json::to_string_pretty(&doc).expect("serialisable") + "\n")
}

fn build_ring(spec: &str) -> std::result::Result<Ring, Fail> {
    let spec = parse::ring_spec(spec)?;
    Ok(Ring::build(&spec)?)
}

fn cmd_ring(a: &RingArgs) -> CmdResult {
    let r = build_ring(&a.ring)?;
    let (q, e) = (r.q() as u128, r.e() as u32);
    let order = sl2::group_order(&r);
    let cols = sl2::column_count(&r);
    let mut failures = Vec::new();
    let mut row = json!({
        "ring": r.spec().to_string(),
        "p": r.p(), "f": r.f(), "e0": r.e0(), "e": r.e(), "q": r.q(), "nu": r.nu(),
        "size": r.size(),
        "uniformizer": r.show(r.pi()),
        "u0": r.show(r.u0()),
        "group_order": order.to_string(),
        "column_count": cols.to_string(),
        "order_formula": (q.pow(3 * e - 2) * (q * q - 1)).to_string(),
        "column_formula": (q.pow(2 * e - 2) * (q * q - 1)).to_string(),
    });
    if a.check {
        if r.size() > 256 {
            return Err(Fail::Usage(format!("--check needs a ring of at most 256 elements, this one has {}", r.size())));
        }
        let brute = sl2::count_det_one(&r) as u128;
        let enumerated = sl2::primitive_columns(&r).len() as u128;
        row["det_one_count"] = json!(brute.to_string());
        row["columns_enumerated"] = json!(enumerated.to_string());
        if brute != order || enumerated != cols {
            failures.push(Reproducer { check: "order identities".into(), details: row.clone() });
        }
    }
    let text = row
        .as_object()
        .expect("object")
        .iter()
        .map(|(k, v)| format!("{k:>18}: {}", v.as_str().map(str::to_string).unwrap_or_else(|| v.to_string())))
        .collect::<Vec<_>>()
        .join("\n");
    let mut doc = Doc::default();
    doc.push(row, text);
    Ok(Outcome { doc, failures })
}

/// Normal closure of `h` in `SL_2(R)`, conjugating by elementary matrices.
pub fn normal_closure(h: &Subgroup, cap: usize) -> slchi::Result<Subgroup> {
    let r = h.ring();
    let mut conj = Vec::new();
    let mut t = r.one();
    for _ in 0..r.f() * r.e0() {
        conj.push(Mat2::upper(r, t));
        conj.push(Mat2::lower(r, t));
        t = r.mul(t, r.theta());
    }
    let mut cur = h.clone();
    loop {
        let gens: Vec<Mat2> = cur.generators().to_vec();
        let extra: Vec<Mat2> = gens
            .iter()
            .flat_map(|g| conj.iter().map(move |c| g.conj_by(r, c)))
            .filter(|x| !cur.contains(x))
            .collect();
        if extra.is_empty() {
            return Ok(cur);
        }
        let mut all = gens;
        all.extend(extra);
        cur = Subgroup::generate(r, &all, cap)?;
    }
}

fn subgroups(cli: &Cli, a: &SubgroupArgs) -> std::result::Result<(Ring, Vec<(String, Subgroup)>), Fail> {
    let r = build_ring(&a.ring)?;
    if a.all_subgroups {
        let subs = enumerate_subgroups(&r, cli.cap.unwrap_or(LATTICE_CAP))?;
        return Ok((r, subs.into_iter().enumerate().map(|(i, h)| (format!("H{i}"), h)).collect()));
    }
    let g = a.gens.as_deref().ok_or_else(|| Fail::Usage("give --gens or --all-subgroups".into()))?;
    let gens = parse::generators(&r, g)?;
    if let Some(bad) = gens.iter().find(|m| !m.is_sl2(&r)) {
        return Err(Fail::Usage(format!("generator {} has determinant {} != 1", bad.show(&r), r.show(bad.det(&r)))));
    }
    let cap = cli.cap.unwrap_or(DEFAULT_CAP);
    let mut h = Subgroup::generate(&r, &gens, cap)?;
    if a.normal_closure {
        h = normal_closure(&h, cap)?;
    }
    Ok((r, vec![(g.to_string(), h)]))
}

fn cmd_chi(cli: &Cli, a: &ChiArgs) -> CmdResult {
    let (r, subs) = subgroups(cli, &a.sub)?;
    let mut doc = Doc::default();
    let mut failures = Vec::new();
    let results = slchi::par::map(&subs, |(id, h)| {
        let rep = counting::chi_report(h, id, a.degree)?;
        let formulas = (2..=r.e()).map(|j0| exact_chi_formula(h, j0).map(|v| (j0, v))).collect::<slchi::Result<Vec<_>>>()?;
        Ok::<_, Error>((rep, formulas))
    });
    for ((id, h), res) in subs.iter().zip(results) {
        let (rep, formulas) = match res {
            Ok(x) => x,
            Err(Error::VerificationFailure(f)) => {
                failures.push(*f);
                continue;
            }
            Err(e) => return Err(e.into()),
        };
        failures.extend(rep.failures.iter().cloned());
        let mut row = serde_json::to_value(&rep).expect("serialisable");
        row["order"] = json!(h.order().to_string());
        row["exact_formula"] = Value::Object(formulas.iter().map(|(j, v)| (format!("j0={j}"), json!(rat::show(v)))).collect());
        let applicable: Vec<&str> = rep.bounds.iter().filter(|b| b.applicable).map(|b| b.name.as_str()).collect();
        let text = format!(
            "{id}: |H| = {}, level {}{}, chi = {}, formula {}, bounds {} ({} applicable){}",
            h.order(),
            rep.congruence_level,
            if rep.exact_level { " (exact)" } else { "" },
            rat::show(&rep.chi),
            formulas.iter().map(|(j, v)| format!("j0={j}: {}", rat::show(v))).collect::<Vec<_>>().join(", "),
            if rep.ok() { "ok" } else { "FAIL" },
            applicable.len(),
            if rep.burnside_checked { ", Burnside checked" } else { "" },
        );
        doc.push(row, text);
    }
    Ok(Outcome { doc, failures })
}

fn cmd_slope(cli: &Cli, a: &SlopeArgs) -> CmdResult {
    let (r, subs) = subgroups(cli, &a.sub)?;
    if r.e() < 2 {
        return Err(Fail::Usage("slopes need e >= 2".into()));
    }
    let fq = r.residue_field();
    let ls = match &a.line {
        Some(l) => vec![parse::line(&fq, l)?],
        None => lines(&fq),
    };
    let mut doc = Doc::default();
    let mut failures = Vec::new();
    for (id, h) in &subs {
        for &l in &ls {
            let rows = match telescoping_report(h, id, l) {
                Ok(rows) => rows,
                Err(Error::VerificationFailure(f)) => {
                    failures.push(*f);
                    continue;
                }
                Err(e) => return Err(e.into()),
            };
            for row in rows {
                let text = format!(
                    "{} {} j={}: T = {}, A_j = {}, A_j+1 = {}, residual {}{}",
                    row.subgroup,
                    show_line(&fq, l),
                    row.j,
                    row.t_direct,
                    row.a_j,
                    row.a_next,
                    row.residual,
                    row.boundary_corrected.map(|b| format!(", top level T - (A - 1) = {b}")).unwrap_or_default()
                );
                doc.push(serde_json::to_value(&row).expect("serialisable"), text);
            }
        }
    }
    Ok(Outcome { doc, failures })
}

fn cmd_cusps(a: &CuspArgs) -> CmdResult {
    let base = parse::base(&a.base)?;
    let kind: Kind = a.family.into();
    let levels = match (&a.level, a.up_to) {
        (Some(l), _) => vec![parse::level(&base, l)?],
        (None, Some(b)) => match &base {
            Base::Rational => (1..=b).map(cg::rational_level).collect(),
            Base::Quadratic(k) => k.ideals_up_to(b)?,
        },
        (None, None) => return Err(Fail::Usage("give --level or --up-to".into())),
    };
    let fams: Vec<CongruenceFamily> = levels
        .into_iter()
        .map(|l| CongruenceFamily { base: base.clone(), kind, level: l })
        .filter(|f| a.level.is_some() || !(matches!(f.base, Base::Rational) && kind != Kind::Gamma0 && f.norm() <= 4))
        .collect();
    if let [fam] = fams.as_slice() {
        if let Err(e @ Error::GateViolated(_)) = cg::cusp_count_closed(fam) {
            return Err(e.into());
        }
    }
    let methods = Methods { pair_orbit: !a.no_pair_orbit, double_coset: !a.no_double_coset };
    let reports = slchi::par::map(&fams, |f| cg::ratio_report(f, methods));
    let mut doc = Doc::default();
    let mut failures = Vec::new();
    for rep in reports {
        let rep = rep?;
        failures.extend(rep.failures.iter().cloned());
        let methods: Vec<String> = [
            rep.closed_form.map(|c| format!("closed {c}")),
            rep.pair_orbit.map(|c| format!("pair-orbit {c}")),
            rep.double_coset.map(|c| format!("double-coset {c}")),
        ]
        .into_iter()
        .flatten()
        .collect();
        let text = format!(
            "{}: {} cusps [{}{}], index {}, ratio {}{}",
            rep.family,
            rep.cusp_count,
            methods.join(", "),
            if rep.methods_agree { ", agree" } else { ", DISAGREE" },
            rep.index,
            rep.ratio.as_ref().map(rat::show).unwrap_or_else(|| "-".into()),
            rep.solved_a.as_ref().map(|a| format!(", a = {}", rat::show(a))).unwrap_or_default(),
        );
        doc.push(serde_json::to_value(&rep).expect("serialisable"), text);
    }
    Ok(Outcome { doc, failures })
}

fn cmd_decay(a: &DecayArgs) -> CmdResult {
    let scan = cg::decay_scan(a.family.into(), a.max)?;
    let mut doc = Doc::default();
    if a.rows {
        for r in &scan.rows {
            let text = format!("N = {}: {} cusps, index {}, ratio {}/{}", r.level_norm, r.cusps, r.index, r.ratio_num, r.ratio_den);
            doc.push(serde_json::to_value(r).expect("serialisable"), text);
        }
    } else {
        let row = json!({
            "kind": scan.kind,
            "max": a.max,
            "levels": scan.rows.len(),
            "decade_max": scan.decade_max,
            "failures": scan.failures.len(),
        });
        let text = format!(
            "{} up to {}: {} levels, {} failures; decade maxima {}",
            scan.kind,
            a.max,
            scan.rows.len(),
            scan.failures.len(),
            scan.decade_max.iter().map(|(k, m)| format!("10^{k}: {m:.6}")).collect::<Vec<_>>().join(", ")
        );
        doc.push(row, text);
    }
    Ok(Outcome { doc, failures: scan.failures })
}

fn cmd_verify(cli: &Cli, a: &VerifyArgs) -> CmdResult {
    let ids = verify::select(&a.only)?;
    let cfg = verify::Config { seed: cli.seed, samples: a.samples };
    let mut doc = Doc::default();
    let mut failures = Vec::new();
    for id in ids {
        let r = verify::run(id, &cfg);
        let mut line = format!("{} {:>2} {:<17} checks={}", if r.passed { "PASS" } else { "FAIL" }, r.id, r.name, r.checks);
        if a.timings {
            line.push_str(&format!(" {:.1}s", r.seconds));
        }
        for n in &r.notes {
            line.push_str(&format!("\n        {n}"));
        }
        failures.extend(r.failures.iter().cloned());
        let mut row = serde_json::to_value(&r).expect("serialisable");
        if a.timings {
            row["seconds"] = json!(r.seconds);
        }
        doc.push(row, line);
    }
    let failed = doc.rows.iter().filter(|r| r["passed"] == json!(false)).count();
    doc.text.push(format!("{} of {} criteria passed", doc.rows.len() - failed, doc.rows.len()));
    Ok(Outcome { doc, failures })
}
