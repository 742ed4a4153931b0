//! The twelve-point verification suite.
//!
//! Each criterion returns a [`CriterionResult`] with a pass flag, a count of
//! the individual checks performed, free-form notes (recorded values such as
//! the telescoping boundary convention or the solved real-quadratic constant)
//! and one [`Reproducer`] per failing check.

use std::collections::BTreeMap;
use std::sync::OnceLock;
use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use slchi::counting::{self, bound_suite, chi_local, exact_chi_formula, level_one_chi, BURNSIDE_CAP};
use slchi::cusp_global::{self as cg, CongruenceFamily, Kind, Methods};
use slchi::error::Reproducer;
use slchi::quad_field::{modulus_units, unit_data, QuadraticField};
use slchi::rat::{self, int, rat};
use slchi::sl2_local::{self as sl2, Mat2};
use slchi::slope::{fiber_cell, parallelogram, telescoping_report, transversality_classes, x_eta, Parallelogram};
use slchi::subgroup::{self as sg, enumerate_subgroups, lines, psi, sl2_bracket, sub_identity_val, to_fp, Subgroup, Word};
use slchi::{par, El, Error, Ring, RingSpec};

#[derive(Clone, Debug)]
pub struct Config {
    pub seed: u64,
    /// Dyadic-word samples per (ring, lemma).
    pub samples: usize,
}

impl Default for Config {
    fn default() -> Self {
        Config { seed: 0x5eed, samples: 200 }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CriterionResult {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub checks: u64,
    pub notes: Vec<String>,
    pub failures: Vec<Reproducer>,
    #[serde(skip_serializing)]
    pub seconds: f64,
}

/// `(id, name)` of every criterion, in order.
pub const CRITERIA: [(u8, &str); 12] = [
    (1, "order_identities"),
    (2, "exact_chi"),
    (3, "level_one"),
    (4, "telescoping"),
    (5, "structural"),
    (6, "dyadic_words"),
    (7, "obstructions"),
    (8, "rational_cusps"),
    (9, "imaginary_cusps"),
    (10, "real_cusps"),
    (11, "decay"),
    (12, "bound_sanity"),
];

/// Resolve `--only` tokens (names or numbers) to criterion ids.
pub fn select(only: &[String]) -> std::result::Result<Vec<u8>, String> {
    if only.is_empty() {
        return Ok(CRITERIA.iter().map(|c| c.0).collect());
    }
    let mut ids = Vec::new();
    for tok in only {
        let t = tok.trim();
        let hit = CRITERIA.iter().find(|(id, name)| *name == t || id.to_string() == t);
        match hit {
            Some((id, _)) if !ids.contains(id) => ids.push(*id),
            Some(_) => {}
            None => return Err(format!("unknown criterion '{t}'; expected one of {}", names())),
        }
    }
    ids.sort_unstable();
    Ok(ids)
}

fn names() -> String {
    CRITERIA.iter().map(|c| c.1).collect::<Vec<_>>().join(", ")
}

pub fn run(id: u8, cfg: &Config) -> CriterionResult {
    let name = CRITERIA.iter().find(|c| c.0 == id).map(|c| c.1).expect("valid criterion id");
    let start = Instant::now();
    let mut acc = Acc::default();
    let outcome = match id {
        1 => order_identities(&mut acc),
        2 => exact_chi(&mut acc),
        3 => level_one(&mut acc),
        4 => telescoping(&mut acc),
        5 => structural(&mut acc),
        6 => dyadic_words(&mut acc, cfg),
        7 => obstructions(&mut acc),
        8 => rational_cusps(&mut acc),
        9 => imaginary_cusps(&mut acc),
        10 => real_cusps(&mut acc),
        11 => decay(&mut acc),
        12 => bound_sanity(&mut acc),
        _ => unreachable!(),
    };
    if let Err(e) = outcome {
        acc.fail("internal", json!({"error": e.to_string()}));
    }
    CriterionResult {
        id,
        name,
        passed: acc.failures.is_empty(),
        checks: acc.checks,
        notes: acc.notes,
        failures: acc.failures,
        seconds: start.elapsed().as_secs_f64(),
    }
}

pub fn run_all(ids: &[u8], cfg: &Config) -> Vec<CriterionResult> {
    ids.iter().map(|&id| run(id, cfg)).collect()
}

/// Failures kept per criterion; the count of further failures is noted instead.
const MAX_REPRODUCERS: usize = 50;

#[derive(Default)]
struct Acc {
    checks: u64,
    notes: Vec<String>,
    failures: Vec<Reproducer>,
    dropped: u64,
}

impl Acc {
    fn fail(&mut self, check: &str, details: serde_json::Value) {
        self.push(Reproducer { check: check.to_string(), details });
    }

    fn push(&mut self, r: Reproducer) {
        if self.failures.len() < MAX_REPRODUCERS {
            self.failures.push(r);
        } else {
            self.dropped += 1;
            let msg = format!("{} further failures not recorded", self.dropped);
            match self.notes.last_mut() {
                Some(n) if n.ends_with("failures not recorded") => *n = msg,
                _ => self.notes.push(msg),
            }
        }
    }

    fn expect(&mut self, ok: bool, check: &str, details: impl FnOnce() -> serde_json::Value) {
        self.checks += 1;
        if !ok {
            self.fail(check, details());
        }
    }

    /// Verification failures become reproducers; precondition errors are
    /// `Ok(None)`; anything else aborts the criterion.
    fn absorb<T>(&mut self, r: slchi::Result<T>) -> slchi::Result<Option<T>> {
        self.checks += 1;
        match r {
            Ok(v) => Ok(Some(v)),
            Err(Error::VerificationFailure(rep)) => {
                self.push(*rep);
                Ok(None)
            }
            Err(Error::PreconditionUnmet(_)) => {
                self.checks -= 1;
                Ok(None)
            }
            Err(e) => Err(e),
        }
    }
}

fn ring(spec: RingSpec) -> slchi::Result<Ring> {
    Ring::build(&spec)
}

fn z(p: u64, e: usize) -> Ring {
    ring(RingSpec::rational(p, e)).expect("p is prime")
}

/// The full subgroup lattices of `SL_2(Z/4)` and `SL_2(Z/9)`, built once.
fn lattices() -> &'static [(Ring, Vec<Subgroup>)] {
    static L: OnceLock<Vec<(Ring, Vec<Subgroup>)>> = OnceLock::new();
    L.get_or_init(|| {
        [(2, 2), (3, 2)]
            .iter()
            .map(|&(p, e)| {
                let r = z(p, e);
                let subs = enumerate_subgroups(&r, 1000).expect("small group");
                (r, subs)
            })
            .collect()
    })
}

fn lattice_note(acc: &mut Acc) {
    let sizes: Vec<String> = lattices().iter().map(|(r, s)| format!("{} subgroups of SL_2({})", s.len(), r.spec())).collect();
    acc.notes.push(sizes.join(", "));
}

// ---------------------------------------------------------------------------
// 1

pub fn ring_grid() -> Vec<RingSpec> {
    let mut out = Vec::new();
    let rational = [(2u64, 1..=4usize), (3, 1..=3), (5, 1..=2)];
    for (p, es) in rational {
        out.extend(es.map(|e| RingSpec::rational(p, e)));
    }
    out.extend((1..=2).map(|e| RingSpec::galois(2, 2, e).expect("valid")));
    out.extend((2..=4).map(|e| RingSpec::number_ring(&[-2, 0, 1], 2, e).expect("valid")));
    out.extend((2..=4).map(|e| RingSpec::number_ring(&[-3, 0, 1], 3, e).expect("valid")));
    out
}

fn order_identities(acc: &mut Acc) -> slchi::Result<()> {
    for spec in ring_grid() {
        let r = ring(spec.clone())?;
        let (q, e) = (r.q() as u128, r.e() as u32);
        let order = sl2::group_order(&r);
        let brute = sl2::count_det_one(&r) as u128;
        acc.expect(order == brute, "group_order equals the det-one count", || {
            json!({"ring": spec, "group_order": order.to_string(), "det_one": brute.to_string()})
        });
        let formula = q.pow(2 * e - 2) * (q * q - 1);
        let cols = sl2::primitive_columns(&r).len() as u128;
        acc.expect(sl2::column_count(&r) == formula && cols == formula, "|X_e| = q^(2e-2)(q^2-1)", || {
            json!({"ring": spec, "column_count": sl2::column_count(&r).to_string(), "enumerated": cols.to_string(), "formula": formula.to_string()})
        });
        acc.expect(order == formula * q.pow(e), "|G_e| = |X_e| q^e", || {
            json!({"ring": spec, "group_order": order.to_string()})
        });
    }
    acc.notes.push(format!("{} rings", ring_grid().len()));
    Ok(())
}

// ---------------------------------------------------------------------------
// 2

fn exact_chi(acc: &mut Acc) -> slchi::Result<()> {
    lattice_note(acc);
    for (r, subs) in lattices() {
        let outs = par::map(subs, |h| (2..=r.e()).map(|j0| exact_chi_formula(h, j0)).collect::<Vec<_>>());
        for row in outs {
            for o in row {
                acc.absorb(o)?;
            }
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// 3

/// Borel, split-torus normaliser, nonsplit-torus normaliser and unipotent subgroups.
pub fn dickson_families(f: &Ring) -> slchi::Result<Vec<(&'static str, Subgroup)>> {
    let q = f.q();
    let one = f.one();
    let gen = (1..q as El)
        .find(|&x| (1..q - 1).all(|k| f.pow(x, k) != one))
        .ok_or_else(|| Error::PreconditionUnmet("no primitive root".into()))?;
    let t = Mat2::torus(f, gen)?;
    let u = Mat2::upper(f, one);
    let w = Mat2::new(0, one, f.neg(one), 0);
    // companion matrix of x^2 - s x + 1 of order q + 1
    let c = (0..q as El)
        .map(|s| Mat2::new(0, f.neg(one), one, s))
        .find(|c| {
            let id = Mat2::identity(f);
            c.pow(f, q + 1) == id && (1..=q).all(|k| !(q + 1).is_multiple_of(k) || c.pow(f, k) != id)
        })
        .ok_or_else(|| Error::PreconditionUnmet("no element of order q + 1".into()))?;
    let cinv = c.inv_unchecked(f);
    let flip = sl2::sl2_elements(f)
        .into_iter()
        .find(|g| g.mul(f, &c) == cinv.mul(f, g))
        .ok_or_else(|| Error::PreconditionUnmet("no inverting element".into()))?;
    let cap = 1_000_000;
    Ok(vec![
        ("borel", Subgroup::generate(f, &[t, u], cap)?),
        ("split_normaliser", Subgroup::generate(f, &[t, w], cap)?),
        ("nonsplit_normaliser", Subgroup::generate(f, &[c, flip], cap)?),
        ("unipotent", Subgroup::generate(f, &[u], cap)?),
    ])
}

fn level_one(acc: &mut Acc) -> slchi::Result<()> {
    let small = [RingSpec::rational(2, 1), RingSpec::rational(3, 1), RingSpec::galois(2, 2, 1)?, RingSpec::rational(5, 1)];
    for spec in small {
        let f = ring(spec)?;
        let subs = enumerate_subgroups(&f, 1000)?;
        acc.notes.push(format!("q = {}: {} subgroups", f.q(), subs.len()));
        for h in &subs {
            acc.absorb(level_one_chi(h))?;
        }
    }
    for q in [59, 61] {
        let f = z(q, 1);
        for (name, h) in dickson_families(&f)? {
            let Some(l) = acc.absorb(level_one_chi(&h))? else { continue };
            acc.expect(l.proper && l.chi <= rat(2, q), "chi_1 <= 2/q", || {
                json!({"q": q, "family": name, "order": h.order().to_string(), "chi": rat::show(&l.chi)})
            });
            acc.notes.push(format!("q = {q} {name}: |H| = {}, chi_1 = {}", h.order(), rat::show(&l.chi)));
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// 4

/// Extra subgroups over longer rings, where the interior levels are nonvacuous.
fn kernel_family(r: &Ring) -> Vec<(String, Subgroup)> {
    let mut out = vec![("G".to_string(), Subgroup::full(r)), ("1".to_string(), Subgroup::trivial(r))];
    for l in 1..r.e() {
        out.push((format!("K{}", l + 1), Subgroup::congruence_kernel(r, l)));
    }
    out
}

fn telescoping(acc: &mut Acc) -> slchi::Result<()> {
    lattice_note(acc);
    let mut cases: Vec<(String, Subgroup)> = Vec::new();
    for (r, subs) in lattices() {
        cases.extend(subs.iter().enumerate().map(|(i, h)| (format!("{}#{i}", r.spec()), h.clone())));
    }
    for r in [z(3, 3), z(2, 4), z(3, 4)] {
        cases.extend(kernel_family(&r).into_iter().map(|(n, h)| (format!("{}:{n}", r.spec()), h)));
    }
    let outs = par::map(&cases, |(id, h)| {
        let fq = h.ring().residue_field();
        lines(&fq).into_iter().map(|l| telescoping_report(h, id, l)).collect::<Vec<_>>()
    });
    let mut boundary: BTreeMap<i64, u64> = BTreeMap::new();
    let mut interior = 0u64;
    for row in outs {
        for rep in row {
            let Some(rows) = acc.absorb(rep)? else { continue };
            interior += rows.len() as u64 - 1;
            let top = rows.last().expect("e >= 2");
            *boundary.entry(top.boundary_corrected.expect("top row")).or_default() += 1;
        }
    }
    acc.notes.push(format!("{interior} interior rows with T_j = A_j - q A_(j+1)"));
    acc.notes.push(format!(
        "boundary T_e - (A_e - 1) distribution: {}",
        boundary.iter().map(|(k, v)| format!("{k}: {v}")).collect::<Vec<_>>().join(", ")
    ));
    acc.expect(boundary.keys().all(|&k| k == 0), "top level follows T_e = A_e - 1 in every case", || {
        json!({"distribution": boundary.iter().map(|(k, v)| (k.to_string(), *v)).collect::<BTreeMap<_, _>>()})
    });
    Ok(())
}

// ---------------------------------------------------------------------------
// 5

fn add_fp(p: u64, a: &[u8], b: &[u8]) -> Vec<u8> {
    a.iter().zip(b).map(|(&x, &y)| ((x as u64 + y as u64) % p) as u8).collect()
}

/// Every structural lemma on one subgroup.
fn structural_one(h: &Subgroup, acc: &mut Acc, counts: &mut BTreeMap<&'static str, u64>) -> slchi::Result<()> {
    let r = h.ring();
    let (e, e0, p) = (r.e(), r.e0(), r.p());
    let fq = r.residue_field();
    let lad = h.lie_ladder();
    let sub = || h.to_json();
    let mut bump = |k: &'static str| *counts.entry(k).or_default() += 1;

    let h1 = h.reduce_to(1).order();
    let prod: u128 = (2..=e).map(|j| (p as u128).pow(lad.d(j) as u32)).product();
    acc.expect(h.order() == h1 * prod, "filtration |H| = |H_1| prod p^d_j", || json!({"subgroup": sub()}));
    bump("filtration");

    let layers: Vec<Vec<Mat2>> = (0..=e).map(|j| if j >= 2 { h.n_j(j).elements() } else { Vec::new() }).collect();
    for j in 2..=e {
        let nj = &layers[j];
        // psi_j additivity on all pairs (sampled when N_j is large)
        let step = 1 + nj.len() / 64;
        for x in nj.iter().step_by(step) {
            for y in nj.iter().step_by(step) {
                let s = to_fp(&fq, &psi(r, &x.mul(r, y), j));
                let t = add_fp(p, &to_fp(&fq, &psi(r, x, j)), &to_fp(&fq, &psi(r, y, j)));
                acc.expect(s == t, "psi_j is additive", || json!({"subgroup": sub(), "j": j, "x": x.show(r), "y": y.show(r)}));
            }
        }
        bump("psi_additivity");
        for k in 2..=e {
            // commutator congruence: (x, y) in N_(j+k-1) with psi = [psi_j x, psi_k y]
            let (nk, l) = (&layers[k], j + k - 1);
            let step_k = 1 + nk.len() / 32;
            for x in nj.iter().step_by(1 + nj.len() / 32) {
                for y in nk.iter().step_by(step_k) {
                    let c = x.commutator(r, y);
                    let lvl = sub_identity_val(r, &c) + 1;
                    let ok = lvl >= l.min(e + 1)
                        && (l > e || psi(r, &c, l) == sl2_bracket(&fq, &psi(r, x, j), &psi(r, y, k)));
                    acc.expect(ok, "commutator congruence", || json!({"subgroup": sub(), "j": j, "k": k, "x": x.show(r), "y": y.show(r)}));
                }
            }
            bump("commutator");
            if l <= e {
                acc.absorb(h.bracket_check(&lad, j, k))?;
                bump("bracket");
            }
        }
        // persistence and monotonicity
        if j > e0 && j + e0 <= e {
            let a = h.bad_lines(&lad, j)?;
            let b = h.bad_lines(&lad, j + e0)?;
            acc.expect(a.iter().all(|l| b.contains(l)), "bad lines persist", || json!({"subgroup": sub(), "j": j}));
            bump("persistence");
            if j >= e0 + 2 {
                acc.expect(lad.d(j + e0) >= lad.d(j), "d_j is nondecreasing", || json!({"subgroup": sub(), "j": j}));
                bump("monotonicity");
            }
            for v in lad.w(j).elements() {
                let a = sg::from_fp(&fq, &v);
                if a != [0, 0, 0] && acc.absorb(h.propagation_witness(&lad, j, &a))?.is_some() {
                    bump("propagation");
                }
            }
        }
    }
    // first-level comparison, normal subgroup and trivial bounds
    let chi = chi_local(h, BURNSIDE_CAP)?.chi;
    for row in bound_suite(h, &chi, None)? {
        let key = if row.name.starts_with("trivial_") {
            "trivial_bound"
        } else if row.name.starts_with("normal_") {
            "normal_subgroup"
        } else if row.name == "burnside_first_level" {
            "burnside_first_level"
        } else {
            continue;
        };
        if row.applicable {
            acc.expect(row.satisfied, &row.name, || json!({"subgroup": sub(), "lhs": rat::show(&row.lhs), "rhs": rat::show(&row.rhs)}));
            bump(key);
        }
    }
    Ok(())
}

/// Seeded random subgroups over `Z/27` and `Z/16`, where the gated lemmas apply.
fn sampled_subgroups(seed: u64) -> slchi::Result<Vec<Subgroup>> {
    let mut out = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for (p, e) in [(3u64, 3usize), (2, 4)] {
        let r = z(p, e);
        out.extend(kernel_family(&r).into_iter().map(|(_, h)| h));
        for i in 0..24 {
            let gens: Vec<Mat2> = (0..1 + i % 2).map(|k| random_sl2(&r, &mut rng, 1 + k % 2)).collect();
            out.push(Subgroup::generate(&r, &gens, 200_000)?);
        }
    }
    Ok(out)
}

/// `I + pi^l X`, solved for determinant one.
fn random_sl2(r: &Ring, rng: &mut ChaCha8Rng, min_level: usize) -> Mat2 {
    let pl = r.pi_pow(min_level);
    let n = r.size() as El;
    loop {
        let (a, b, c) = (rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(0..n));
        let a = r.add(r.one(), r.mul(pl, a));
        let (b, c) = (r.mul(pl, b), r.mul(pl, c));
        if let Ok(ai) = r.inv(a) {
            return Mat2::new(a, b, c, r.mul(r.add(r.one(), r.mul(b, c)), ai));
        }
    }
}

fn structural(acc: &mut Acc) -> slchi::Result<()> {
    lattice_note(acc);
    let mut counts = BTreeMap::new();
    for (_, subs) in lattices() {
        for h in subs {
            structural_one(h, acc, &mut counts)?;
        }
    }
    acc.notes.push(format!("full lattices: {}", show_counts(&counts)));
    let mut extra = BTreeMap::new();
    let samples = sampled_subgroups(5)?;
    for h in &samples {
        structural_one(h, acc, &mut extra)?;
    }
    acc.notes.push(format!("{} kernels and seeded subgroups over Z/27, Z/16: {}", samples.len(), show_counts(&extra)));
    Ok(())
}

fn show_counts(c: &BTreeMap<&'static str, u64>) -> String {
    c.iter().map(|(k, v)| format!("{k} {v}")).collect::<Vec<_>>().join(", ")
}

// ---------------------------------------------------------------------------
// 6

/// `(a, b)` satisfying the hypotheses of `word` over `r`.
pub fn admissible_levels(r: &Ring, word: Word) -> Vec<(usize, usize)> {
    let (e, nu) = (r.e(), r.nu());
    let mut out = Vec::new();
    for a in nu + 2..=e {
        for b in nu + 2..=e {
            let l1 = 2 * a + b + nu - 2;
            let level = match word {
                Word::Z => a + b - 1,
                Word::W => l1,
                Word::U => 3 * a + b + 2 * nu - 3,
                Word::V => 4 * a + b + 3 * nu - 4,
            };
            let extra = !matches!(word, Word::V) || a >= 2 * nu + 2;
            if l1.max(level) <= e && extra {
                out.push((a, b));
            }
        }
    }
    out
}

/// A random pair with `psi_a(x) = alpha D + mu E` and `psi_b(y) = beta F`.
pub fn dyadic_sample(r: &Ring, rng: &mut ChaCha8Rng, a: usize, b: usize, need_alpha: bool) -> (Mat2, Mat2) {
    let reps = r.residue_reps();
    let q = reps.len();
    let n = r.size() as El;
    let lift = |i: usize, tail: El| r.add(reps[i], r.mul(r.pi(), tail));
    loop {
        let (ai, mi, bi) = (rng.gen_range(0..q), rng.gen_range(1..q), rng.gen_range(1..q));
        if need_alpha && ai == 0 {
            continue;
        }
        let t: [El; 6] = std::array::from_fn(|_| rng.gen_range(0..n));
        let (pa1, pa) = (r.pi_pow(a - 1), r.pi_pow(a));
        let x11 = r.add(r.one(), r.mul(pa1, lift(ai, t[0])));
        let x12 = r.mul(pa1, lift(mi, t[1]));
        let x21 = r.mul(pa, t[2]);
        let (pb1, pb) = (r.pi_pow(b - 1), r.pi_pow(b));
        let y11 = r.add(r.one(), r.mul(pb, t[3]));
        let y12 = r.mul(pb, t[4]);
        let y21 = r.mul(pb1, lift(bi, t[5]));
        let (Ok(xi), Ok(yi)) = (r.inv(x11), r.inv(y11)) else { continue };
        let x = Mat2::new(x11, x12, x21, r.mul(r.add(r.one(), r.mul(x12, x21)), xi));
        let y = Mat2::new(y11, y12, y21, r.mul(r.add(r.one(), r.mul(y12, y21)), yi));
        return (x, y);
    }
}

pub fn dyadic_rings() -> Vec<RingSpec> {
    let mut v: Vec<RingSpec> = [8, 10, 12].iter().map(|&e| RingSpec::rational(2, e)).collect();
    v.push(RingSpec::number_ring(&[-2, 0, 1], 2, 30).expect("valid"));
    v
}

fn dyadic_words(acc: &mut Acc, cfg: &Config) -> slchi::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let words = [("two_word_one", Word::W), ("two_word_two", Word::U), ("two_word_three", Word::V)];
    let mut covered: BTreeMap<&str, u64> = BTreeMap::new();
    for spec in dyadic_rings() {
        let r = ring(spec.clone())?;
        for (lemma, word) in words {
            let levels = admissible_levels(&r, word);
            if levels.is_empty() {
                acc.notes.push(format!("{lemma}: no admissible (a, b) over {spec}"));
                continue;
            }
            for _ in 0..cfg.samples {
                let (a, b) = levels[rng.gen_range(0..levels.len())];
                let (x, y) = dyadic_sample(&r, &mut rng, a, b, word != Word::W);
                acc.checks += 1;
                match sg::dyadic_word(&r, &x, &y, a, b, word) {
                    Ok(_) => *covered.entry(lemma).or_default() += 1,
                    Err(Error::VerificationFailure(rep)) => acc.push(*rep),
                    Err(e) => acc.fail(lemma, json!({"ring": spec, "a": a, "b": b, "error": e.to_string(),
                        "x": x.entries().iter().map(|&t| r.coords(t)).collect::<Vec<_>>(),
                        "y": y.entries().iter().map(|&t| r.coords(t)).collect::<Vec<_>>()})),
                }
            }
        }
    }
    acc.notes.push(format!("seed {}, verified pairs: {}", cfg.seed, show_counts(&covered)));
    for (lemma, _) in words {
        acc.expect(covered.get(lemma).copied().unwrap_or(0) >= cfg.samples as u64, "every lemma is exercised", || json!({"lemma": lemma}));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// 7

#[derive(Default)]
struct Sweep {
    degenerate: u64,
    out_of_range: u64,
    obstruction: u64,
    classes: BTreeMap<u64, u64>,
    failures: Vec<Reproducer>,
    errors: Vec<String>,
}

fn sweep_one(h: &Subgroup) -> Sweep {
    let mut s = Sweep::default();
    let r = h.ring();
    let (e, nu) = (r.e(), r.nu());
    let lad = h.lie_ladder();
    let note = |s: &mut Sweep, res: slchi::Result<()>| match res {
        Ok(()) => {}
        Err(Error::VerificationFailure(rep)) => s.failures.push(*rep),
        Err(Error::PreconditionUnmet(_)) => {}
        Err(e) => s.errors.push(e.to_string()),
    };
    for j in (nu + 2).max(2)..=e {
        for b in r.ideal_elements(j - 1) {
            let fib = match fiber_cell(h, j, b) {
                Ok(c) => c.slopes,
                Err(e) => {
                    s.errors.push(e.to_string());
                    continue;
                }
            };
            for xi in &fib {
                for d in &fib {
                    let dl = d.sub(r, xi);
                    for t in &fib {
                        let tl = t.sub(r, xi);
                        if fib.binary_search(&xi.add(r, &dl).add(r, &tl)).is_err() {
                            continue;
                        }
                        let res = parallelogram(h, &lad, j, b, xi, &dl, &tl).map(|o| match o {
                            Parallelogram::Degenerate => s.degenerate += 1,
                            Parallelogram::OutOfRange { .. } => s.out_of_range += 1,
                            Parallelogram::Obstruction { .. } => s.obstruction += 1,
                        });
                        note(&mut s, res);
                    }
                }
                let vb = r.valuation(b);
                if vb < e {
                    for k in (vb + 2)..=e {
                        if h.reduce_to(k - 1).contains(&x_eta(r, xi, b).reduce(r, k - 1)) {
                            let res = transversality_classes(h, &lad, j, xi, b, k).map(|c| *s.classes.entry(c).or_default() += 1);
                            note(&mut s, res);
                        }
                    }
                }
            }
        }
    }
    s
}

fn obstructions(acc: &mut Acc) -> slchi::Result<()> {
    lattice_note(acc);
    let mut cases: Vec<Subgroup> = lattices().iter().flat_map(|(_, s)| s.iter().cloned()).collect();
    for p in [2u64, 3] {
        for e in 2..=5 {
            cases.extend(kernel_family(&z(p, e)).into_iter().map(|(_, h)| h));
        }
    }
    let sweeps = par::map(&cases, sweep_one);
    let mut total = Sweep::default();
    for s in sweeps {
        total.degenerate += s.degenerate;
        total.out_of_range += s.out_of_range;
        total.obstruction += s.obstruction;
        for (k, v) in s.classes {
            *total.classes.entry(k).or_default() += v;
        }
        for f in s.failures {
            acc.checks += 1;
            acc.push(f);
        }
        if let Some(e) = s.errors.first() {
            return Err(Error::PreconditionUnmet(e.clone()));
        }
    }
    acc.checks += total.degenerate + total.out_of_range + total.obstruction + total.classes.values().sum::<u64>();
    acc.notes.push(format!(
        "{} subgroups; parallelograms: {} F-direction, {} zero product, {} beyond e",
        cases.len(),
        total.obstruction,
        total.degenerate,
        total.out_of_range
    ));
    acc.notes.push(format!(
        "transversality class counts: {}",
        total.classes.iter().map(|(k, v)| format!("{k} x{v}")).collect::<Vec<_>>().join(", ")
    ));
    acc.expect(total.obstruction > 0 && !total.classes.is_empty(), "sweep is nonvacuous", || json!({}));
    Ok(())
}

// ---------------------------------------------------------------------------
// 8

fn rational_cusps(acc: &mut Acc) -> slchi::Result<()> {
    let mut jobs = Vec::new();
    for n in 1..=300u64 {
        for kind in [Kind::Gamma0, Kind::Gamma1, Kind::Gamma] {
            if kind == Kind::Gamma0 || n > 4 {
                jobs.push((kind, n));
            }
        }
    }
    let reports = par::map(&jobs, |&(kind, n)| {
        let fam = CongruenceFamily::rational(kind, n)?;
        cg::ratio_report(&fam, Methods { pair_orbit: true, double_coset: n <= 40 })
    });
    let mut spot = BTreeMap::new();
    for (&(kind, n), rep) in jobs.iter().zip(reports) {
        let rep = rep?;
        let expect_dc = n <= 40;
        let full = rep.closed_form.is_some() && rep.pair_orbit.is_some() && (rep.double_coset.is_some() || !expect_dc);
        acc.expect(full && rep.methods_agree, "closed form = pair orbits = double cosets", || {
            json!({"kind": kind, "N": n, "closed": rep.closed_form.map(|c| c.to_string()), "pair_orbit": rep.pair_orbit, "double_coset": rep.double_coset})
        });
        for f in &rep.failures {
            acc.push(f.clone());
        }
        if kind == Kind::Gamma && (5..=40).contains(&n) {
            acc.expect(rep.ratio == Some(rat(1, n)), "Gamma(N) ratio is 1/N", || json!({"N": n, "ratio": rep.ratio.as_ref().map(rat::show)}));
        }
        spot.insert((kind, n), (rep.cusp_count, rep.index));
    }
    for (kind, n, want) in [(Kind::Gamma, 5, 12), (Kind::Gamma1, 5, 4), (Kind::Gamma0, 12, 6)] {
        let got = spot[&(kind, n)].0;
        acc.expect(got == want, "spot value", || json!({"kind": kind, "N": n, "got": got.to_string(), "want": want}));
    }
    let idx = spot[&(Kind::Gamma, 5)].1;
    acc.expect(idx == 120, "[SL_2(Z) : Gamma(5)] = 120", || json!({"index": idx.to_string()}));
    acc.notes.push(format!("{} families, double cosets for N <= 40", jobs.len()));
    Ok(())
}

// ---------------------------------------------------------------------------
// 9

fn imaginary_cusps(acc: &mut Acc) -> slchi::Result<()> {
    for d in [-1, -3] {
        let k = QuadraticField::new(d)?;
        let ideals: Vec<_> = k
            .ideals_up_to(100)?
            .into_iter()
            .filter(|i| i.norm() > 1)
            .filter(|i| k.factor_ideal(i).map(|f| f.iter().all(|(_, e)| *e == 1)).unwrap_or(false))
            .collect();
        let reports = par::map(&ideals, |i| {
            let fam = CongruenceFamily::quadratic(&k, Kind::Gamma0, *i);
            let rep = cg::ratio_report(&fam, Methods { pair_orbit: false, double_coset: true })?;
            let eis = cg::eisenstein_bound(&fam)?;
            Ok::<_, Error>((fam, rep, eis, k.omega(i)?))
        });
        for rep in reports {
            let (fam, rep, eis, omega) = rep?;
            let nu = rep.double_coset;
            let want_ratio = fam.factors()?.iter().fold(BigRational::from_integer(BigInt::from(1)), |acc, pp| acc * rat(2, pp.norm_p as i64 + 1));
            acc.expect(nu == Some(1u64 << omega), "cusp count is 2^omega", || json!({"family": fam.label(), "double_coset": nu}));
            acc.expect(rep.ratio.as_ref() == Some(&want_ratio), "ratio is prod 2/(Np + 1)", || {
                json!({"family": fam.label(), "ratio": rep.ratio.as_ref().map(rat::show), "want": rat::show(&want_ratio)})
            });
            acc.expect(nu.map(|v| 2 * v as u128) == Some(eis) && rep.eisenstein_bound == Some(eis), "Eisenstein bound is 2 nu", || {
                json!({"family": fam.label(), "bound": eis.to_string()})
            });
            for f in &rep.failures {
                acc.push(f.clone());
            }
        }
        acc.notes.push(format!("d = {d}: {} squarefree ideals", ideals.len()));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// 10

fn real_cusps(acc: &mut Acc) -> slchi::Result<()> {
    for d in [2, 5] {
        let k = QuadraticField::new(d)?;
        let units = unit_data(&k)?;
        let up = units.u_plus_over_squares.expect("real field") as i64;
        let ideals = k.ideals_up_to(50)?;
        let reports = par::map(&ideals, |i| {
            let fam = CongruenceFamily::quadratic(&k, Kind::Gamma, *i);
            let dc = cg::cusp_count_double_coset(&fam)?;
            let rep = cg::ratio_report(&fam, Methods { pair_orbit: false, double_coset: false })?;
            let mu = modulus_units(&units, &fam.residue_ring()?);
            Ok::<_, Error>((fam, dc, rep, mu))
        });
        let mut solved: BTreeMap<String, u64> = BTreeMap::new();
        for rep in reports {
            let (fam, dc, rep, mu) = rep?;
            let a_sigma = mu.u_plus_over_un_squared.expect("real field") as u128;
            let sum_a = dc.nu_inf as u128 * a_sigma;
            acc.expect(dc.index_psl == rep.index_psl, "index by two paths", || {
                json!({"family": fam.label(), "finite_quotient": dc.index_psl.to_string(), "closed": rep.index_psl.to_string()})
            });
            acc.expect(rep.closed_form == Some(dc.nu_inf as u128), "double coset agrees with the closed count", || {
                json!({"family": fam.label(), "double_coset": dc.nu_inf, "closed": rep.closed_form.map(|c| c.to_string())})
            });
            let lhs = rat(BigInt::from(sum_a), BigInt::from(dc.index_psl));
            // lhs = a h [U+ : (O*)^2] / N
            let a = lhs.clone() * rat(fam.norm() as i64, k.class_number as i64 * up);
            acc.expect(a == int(1) || a == int(2), "solved a in {1, 2}", || {
                json!({"family": fam.label(), "sum_a": sum_a.to_string(), "index": dc.index_psl.to_string(), "a": rat::show(&a)})
            });
            *solved.entry(rat::show(&a)).or_default() += 1;
        }
        acc.notes.push(format!(
            "Q(sqrt {d}): {} ideals, solved a: {}",
            ideals.len(),
            solved.iter().map(|(k, v)| format!("{k} x{v}")).collect::<Vec<_>>().join(", ")
        ));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// 11

fn decay(acc: &mut Acc) -> slchi::Result<()> {
    let scan = cg::decay_scan(Kind::Gamma0, 100_000)?;
    acc.checks += 2 * 100_000 + scan.rows.len() as u64 + scan.decade_max.len() as u64;
    for f in scan.failures {
        acc.push(f);
    }
    acc.notes.push(format!(
        "Gamma_0 decade maxima: {}",
        scan.decade_max.iter().map(|(k, m)| format!("10^{k}: {m:.6}")).collect::<Vec<_>>().join(", ")
    ));
    acc.expect(scan.decade_max.len() == 4, "four decades scanned", || json!({"decades": scan.decade_max.len()}));
    Ok(())
}

// ---------------------------------------------------------------------------
// 12

fn bound_sanity(acc: &mut Acc) -> slchi::Result<()> {
    lattice_note(acc);
    let mut cases: Vec<Subgroup> = lattices().iter().flat_map(|(_, s)| s.iter().filter(|h| h.exact_level()).cloned()).collect();
    let lattice_cases = cases.len();
    for q in [59, 61] {
        cases.extend(dickson_families(&z(q, 1))?.into_iter().map(|(_, h)| h));
    }
    let reports = par::map(&cases, |h| counting::chi_report(h, "", Some(1)));
    let mut applicable: BTreeMap<String, (u64, u64)> = BTreeMap::new();
    for (h, rep) in cases.iter().zip(reports) {
        let rep = rep?;
        for row in &rep.bounds {
            let e = applicable.entry(row.name.clone()).or_default();
            e.1 += 1;
            if row.applicable {
                e.0 += 1;
                acc.expect(row.satisfied, &row.name, || {
                    json!({"subgroup": h.to_json(), "lhs": rat::show(&row.lhs), "rhs": rat::show(&row.rhs)})
                });
            }
        }
    }
    let exercised = |pre: &str| applicable.iter().any(|(k, v)| k.starts_with(pre) && v.0 > 0);
    for pre in ["trivial_", "level_one_proper_"] {
        acc.expect(exercised(pre), "row family is exercised", || json!({"rows": pre}));
    }
    acc.notes.push(format!("{lattice_cases} exact-level lattice subgroups plus the q = 59, 61 families"));
    acc.notes.push(format!(
        "applicable/evaluated: {}",
        applicable.iter().map(|(k, (a, t))| format!("{k} {a}/{t}")).collect::<Vec<_>>().join(", ")
    ));
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn selection() {
        assert_eq!(select(&[]).unwrap().len(), 12);
        assert_eq!(select(&["telescoping".into(), "1".into()]).unwrap(), vec![1, 4]);
        assert!(select(&["nope".into()]).is_err());
    }

    #[test]
    fn admissible_dyadic_levels() {
        let r = z(2, 8);
        assert_eq!(admissible_levels(&r, Word::W), vec![(3, 3)]);
        assert!(admissible_levels(&r, Word::U).is_empty());
        assert!(admissible_levels(&z(2, 12), Word::V).is_empty());
        let s = ring(RingSpec::number_ring(&[-2, 0, 1], 2, 30).unwrap()).unwrap();
        assert_eq!(admissible_levels(&s, Word::V), vec![(6, 4)]);
    }

    #[test]
    fn dyadic_samples_meet_hypotheses() {
        let r = z(2, 10);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            let (x, y) = dyadic_sample(&r, &mut rng, 3, 3, false);
            assert!(x.is_sl2(&r) && y.is_sl2(&r));
            assert_eq!(psi(&r, &y, 3), [0, 0, 1]);
            assert_eq!(psi(&r, &x, 3)[1..], [1, 0]);
        }
    }

    #[test]
    fn nonsplit_normaliser_order() {
        let f = z(7, 1);
        let fam = dickson_families(&f).unwrap();
        let orders: Vec<u128> = fam.iter().map(|(_, h)| h.order()).collect();
        assert_eq!(orders, vec![42, 12, 16, 7]);
    }
}
