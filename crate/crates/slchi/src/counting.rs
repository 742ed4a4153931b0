//! Orbit counts and the statistic `chi = |H\X| / [G:H]`, with the exact
//! line-by-line formula, the level-one formula and the bound evaluators.

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;
use serde_json::json;

use crate::chain_ring::Ring;
use crate::error::{Error, Reproducer, Result};
use crate::finite_group::{FiniteGroup, Gid, SubgroupBits, UnionFind};
use crate::par;
use crate::rat::{self, int, rat};
use crate::sl2_local::{self as sl2, Column, Mat2};
use crate::slope;
use crate::subgroup::{lines, Subgroup};

/// Subgroups up to this order also get the Burnside cross-check.
pub const BURNSIDE_CAP: u128 = 1 << 21;

/// `H\X_e` counted two ways.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChiLocal {
    pub orbits: u64,
    pub index: u128,
    #[serde(serialize_with = "rat::serialize")]
    pub chi: BigRational,
    /// `sum_h |X^h|`, when `|H|` was small enough to enumerate
    pub burnside_sum: Option<u64>,
}

struct Columns {
    cols: Vec<Column>,
    n: usize,
    id: Vec<u32>,
}

impl Columns {
    fn new(r: &Ring) -> Result<Columns> {
        let n = r.size() as usize;
        if n.checked_mul(n).is_none_or(|m| m > 1 << 28) {
            return Err(Error::TooLarge(format!("X_e over a ring of {n} elements")));
        }
        let cols = sl2::primitive_columns(r);
        let mut id = vec![u32::MAX; n * n];
        for (i, &(x, y)) in cols.iter().enumerate() {
            id[x as usize * n + y as usize] = i as u32;
        }
        Ok(Columns { cols, n, id })
    }

    fn index(&self, (x, y): Column) -> usize {
        self.id[x as usize * self.n + y as usize] as usize
    }
}

/// `chi_e(H)` on primitive columns: union-find over the generators of `H`,
/// cross-checked by Burnside when `|H| <= burnside_cap`.
pub fn chi_local(h: &Subgroup, burnside_cap: u128) -> Result<ChiLocal> {
    let r = h.ring();
    let x = Columns::new(r)?;
    let mut uf = UnionFind::new(x.cols.len());
    for g in h.generators() {
        let img = par::map(&x.cols, |&c| x.index(g.act(r, c)) as u32);
        for (i, &j) in img.iter().enumerate() {
            uf.union(i, j as usize);
        }
    }
    let orbits = uf.components() as u64;
    let order = h.order();
    let index = h.index();
    let chi = rat(orbits, index);
    let mut burnside_sum = None;
    if order <= burnside_cap {
        let els = h.elements();
        let sum = par::sum_range(els.len(), |i| sl2::fixed_point_count(r, &els[i]));
        if sum as u128 != orbits as u128 * order {
            return Err(Error::verification(
                "orbit count equals the Burnside average",
                json!({"subgroup": h.to_json(), "orbits": orbits, "burnside_sum": sum, "order": order.to_string()}),
            ));
        }
        burnside_sum = Some(sum);
    }
    Ok(ChiLocal { orbits, index, chi, burnside_sum })
}

/// `T_r = sum over lines of T_r(lambda)`.
pub fn t_total(h: &Subgroup, r: usize) -> Result<u64> {
    let fq = h.ring().residue_field();
    lines(&fq).into_iter().map(|l| slope::t_count(h, r, l)).sum()
}

/// `q^-e + 1/(q+1) sum_{r=j0}^e T_r q^(r-2e)`, checked against `chi_e(N_{j0})`.
pub fn exact_chi_formula(h: &Subgroup, j0: usize) -> Result<BigRational> {
    let r = h.ring();
    let (e, q) = (r.e(), r.q());
    if j0 < 2 || j0 > e {
        return Err(Error::bad_level(j0, 2, e));
    }
    let mut sum = BigRational::zero();
    let mut ts = Vec::new();
    for k in j0..=e {
        let t = t_total(h, k)?;
        ts.push(t);
        sum += int(t) * rat::pow(q, k as i64 - 2 * e as i64);
    }
    let formula = rat::pow(q, -(e as i64)) + sum / int(q + 1);
    let direct = chi_local(&h.n_j(j0), BURNSIDE_CAP)?.chi;
    if formula != direct {
        return Err(Error::verification(
            "exact chi formula equals direct chi of N_j0",
            json!({"subgroup": h.to_json(), "j0": j0, "t": ts, "formula": rat::show(&formula), "direct": rat::show(&direct)}),
        ));
    }
    Ok(formula)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LevelOne {
    #[serde(serialize_with = "rat::serialize")]
    pub chi: BigRational,
    /// `#{g != I : tr g = 2}`
    pub u: u64,
    pub proper: bool,
}

/// `chi_1(Delta)` directly and as `1/q + u/(q(q+1))`.
pub fn level_one_chi(delta: &Subgroup) -> Result<LevelOne> {
    let r = delta.ring();
    if r.e() != 1 {
        return Err(Error::PreconditionUnmet(format!("level-one chi needs e = 1, got {}", r.e())));
    }
    let q = r.q();
    let els = delta.elements();
    let id = Mat2::identity(r);
    let two = r.from_int(2);
    let u = els.iter().filter(|g| **g != id && g.trace(r) == two).count() as u64;
    let formula = rat(1, q) + rat(u, q * (q + 1));
    let direct = chi_local(delta, BURNSIDE_CAP)?.chi;
    let proper = delta.congruence_level() != 0;
    let fail = |check: &str| {
        Error::verification(check, json!({"subgroup": delta.to_json(), "u": u, "chi": rat::show(&direct)}))
    };
    if formula != direct {
        return Err(fail("level-one chi equals 1/q + u/(q(q+1))"));
    }
    if proper && q >= 59 {
        if u > q + 1 {
            return Err(fail("u <= q + 1"));
        }
        if direct > rat(2, q) {
            return Err(fail("chi_1 <= 2/q"));
        }
    }
    Ok(LevelOne { chi: direct, u, proper })
}

// ---------------------------------------------------------------------------
// Bounds

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundRow {
    pub name: String,
    #[serde(serialize_with = "rat::serialize")]
    pub lhs: BigRational,
    /// Exact, or an upper rounding when `exact` is false.
    #[serde(serialize_with = "rat::serialize")]
    pub rhs: BigRational,
    pub exact: bool,
    /// `<` rather than `<=`
    pub strict: bool,
    pub applicable: bool,
    pub satisfied: bool,
}

impl BoundRow {
    fn new(name: impl Into<String>, lhs: BigRational, rhs: BigRational, exact: bool, strict: bool, applicable: bool) -> BoundRow {
        let satisfied = if strict { lhs < rhs } else { lhs <= rhs };
        BoundRow { name: name.into(), lhs, rhs, exact, strict, applicable, satisfied }
    }

    pub fn ok(&self) -> bool {
        !self.applicable || self.satisfied
    }
}

/// `(alpha, B)` of the uniform exponential bound for a field of degree `n`.
pub fn uniform_constants(n: usize, p: u64) -> (BigRational, BigRational) {
    let n = n as i64;
    if p == 2 {
        (rat(1, 2 * n * (18 + 34 * n)), rat(13 * n * n + 27 * n + 17, 2))
    } else {
        (rat(1, 2 * n * (6 + 4 * n)), int(7 * n + 4))
    }
}

/// Right-hand side of the main local bound and whether its hypotheses on `e` hold.
pub fn main_local_rhs(p: u64, f: usize, e0: usize, e: usize) -> (f64, bool) {
    let q = (p as f64).powi(f as i32);
    let (ef, e0f) = (e as f64, e0 as f64);
    let base = q.powf(-ef) + 2.0 * q.powf(1.0 - ef);
    if p == 2 {
        let tail = 4.0 * q.powf(2.0 + e0f / 2.0) * ef.powf(1.5) * 2f64.powf(-(ef - 37.0 * e0f) / (18.0 + 34.0 * e0f));
        (q.powi(6 * e0 as i32 + 1) * (q * q - 1.0) * (base + tail), e > 36 * e0 + 13)
    } else {
        let tail = q * q * ef.powf(1.5) * (p as f64).powf(-(ef - 3.0) / (6.0 + 4.0 * e0f));
        (q * (q * q - 1.0) * (base + tail), e >= 2 * e0 * e0 + 3 * e0 + 4)
    }
}

/// `q^(B - alpha e)`.
pub fn uniform_rhs(q: u64, n: usize, p: u64, e: usize) -> f64 {
    let (a, b) = uniform_constants(n, p);
    let x = rat::to_f64(&(b - a * int(e as u64)));
    (q as f64).powf(x)
}

/// Every bound row for `H`, given `chi_e(H)`. `n` is the degree of the
/// ambient number field, when known.
pub fn bound_suite(h: &Subgroup, chi: &BigRational, n: Option<usize>) -> Result<Vec<BoundRow>> {
    let r = h.ring();
    let (p, q, e, f, e0, nu) = (r.p(), r.q(), r.e(), r.f(), r.e0(), r.nu());
    let exact = h.exact_level();
    let mut rows = vec![BoundRow::new("chi_at_most_one", chi.clone(), BigRational::one(), true, false, true)];

    let mut chi_n = vec![BigRational::zero(); e + 2];
    for j0 in 2..=e {
        chi_n[j0] = chi_local(&h.n_j(j0), BURNSIDE_CAP)?.chi;
        let rhs = rat::pow(q, -(e as i64)) + (j0..=e).map(|j| rat::pow(q, 1 - j as i64)).sum::<BigRational>();
        rows.push(BoundRow::new(format!("trivial_N{j0}"), chi_n[j0].clone(), rhs, true, false, true));
    }
    let mut normal = vec![2];
    if p == 2 {
        normal.push(2 * nu + 2);
    }
    for j in normal {
        let applicable = j <= e;
        let rhs = if applicable {
            let idx = h.order() / h.n_j_order(j);
            int(idx) * chi_n[j].clone()
        } else {
            BigRational::zero()
        };
        rows.push(BoundRow::new(format!("normal_N{j}"), chi.clone(), rhs, true, false, applicable));
    }
    if e >= 2 {
        let h1 = h.reduce_to(1);
        let c1 = chi_local(&h1, BURNSIDE_CAP)?.chi;
        let rhs = chi_n[2].clone() + c1 - rat(1, q);
        rows.push(BoundRow::new("burnside_first_level", chi.clone(), rhs, true, false, true));
    }
    let h1_proper = h.reduce_to(1).congruence_level() != 0;
    let b_applicable = q >= 59 && h1_proper;
    rows.push(BoundRow::new("level_one_proper_2/(q-1)", chi.clone(), rat(2, q - 1), true, true, b_applicable));
    rows.push(BoundRow::new("level_one_proper_1/(q-1)+1/q", chi.clone(), rat(1, q - 1) + rat(1, q), true, false, b_applicable));

    let (rhs, gate) = main_local_rhs(p, f, e0, e);
    rows.push(BoundRow::new("main_local", chi.clone(), rat::upper(rhs), false, false, exact && gate));
    if let Some(n) = n {
        rows.push(BoundRow::new(format!("uniform_n{n}"), chi.clone(), rat::upper(uniform_rhs(q, n, p, e)), false, false, exact));
    }
    Ok(rows)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChiReport {
    pub id: String,
    pub ring: String,
    pub q: u64,
    pub e: usize,
    pub p: u64,
    pub f: usize,
    pub e0: usize,
    pub exact_level: bool,
    pub congruence_level: usize,
    #[serde(serialize_with = "rat::serialize")]
    pub chi: BigRational,
    /// The line formula at `j0 = 2`, when `H = N_2(H)`.
    #[serde(serialize_with = "rat::opt::serialize")]
    pub chi_exact_formula: Option<BigRational>,
    pub orbit_count: u64,
    pub index: u128,
    pub burnside_checked: bool,
    pub bounds: Vec<BoundRow>,
    pub failures: Vec<Reproducer>,
}

impl ChiReport {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }
}

pub fn chi_report(h: &Subgroup, id: &str, n: Option<usize>) -> Result<ChiReport> {
    let r = h.ring();
    let local = chi_local(h, BURNSIDE_CAP)?;
    let in_k1 = r.e() >= 2 && h.n_j_order(2) == h.order();
    let chi_exact_formula = if in_k1 { Some(exact_chi_formula(h, 2)?) } else { None };
    let bounds = bound_suite(h, &local.chi, n)?;
    let failures = bounds
        .iter()
        .filter(|b| !b.ok())
        .map(|b| Reproducer {
            check: b.name.clone(),
            details: json!({"subgroup": h.to_json(), "lhs": rat::show(&b.lhs), "rhs": rat::show(&b.rhs)}),
        })
        .collect();
    Ok(ChiReport {
        id: id.to_string(),
        ring: r.spec().to_string(),
        q: r.q(),
        e: r.e(),
        p: r.p(),
        f: r.f(),
        e0: r.e0(),
        exact_level: h.exact_level(),
        congruence_level: h.congruence_level(),
        chi: local.chi,
        chi_exact_formula,
        orbit_count: local.orbits,
        index: local.index,
        burnside_checked: local.burnside_sum.is_some(),
        bounds,
        failures,
    })
}

// ---------------------------------------------------------------------------
// Abstract finite groups

/// `chi_{Q,U}(H)` by orbits and by Burnside.
pub fn chi_double_coset(qg: &FiniteGroup, u: &SubgroupBits, h: &SubgroupBits) -> Result<BigRational> {
    if qg.order() > 10_000_000 {
        return Err(Error::TooLarge(format!("group of order {}", qg.order())));
    }
    qg.chi(u, h)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProductChi {
    #[serde(serialize_with = "rat::serialize")]
    pub joint: BigRational,
    /// `chi(pr_A H) chi(pr_B H)`
    #[serde(serialize_with = "rat::serialize")]
    pub projections: BigRational,
    /// `chi(H ∩ A) chi(pr_B H)`
    #[serde(serialize_with = "rat::serialize")]
    pub fibre: BigRational,
}

/// Both product inequalities for `H <= A x B` and `U = U_A x U_B`.
/// `h` lists generators of `H` as pairs.
pub fn product_chi_check(
    a: &FiniteGroup,
    ua: &SubgroupBits,
    b: &FiniteGroup,
    ub: &SubgroupBits,
    h: &[(Gid, Gid)],
) -> Result<ProductChi> {
    let qg = a.direct_product(b);
    let (ida, idb) = (a.identity(), b.identity());
    let ugens: Vec<Gid> = ua
        .gens
        .iter()
        .map(|&x| a.pair(b, x, idb))
        .chain(ub.gens.iter().map(|&y| a.pair(b, ida, y)))
        .collect();
    let u = qg.closure(&ugens);
    let hq = qg.closure(&h.iter().map(|&(x, y)| a.pair(b, x, y)).collect::<Vec<_>>());
    let nb = b.order() as Gid;
    let ha = a.closure(&h.iter().map(|p| p.0).collect::<Vec<_>>());
    let hb = b.closure(&h.iter().map(|p| p.1).collect::<Vec<_>>());
    let kernel: Vec<Gid> = hq.elems.iter().filter(|&&g| g % nb == idb).map(|&g| g / nb).collect();
    let ka = a.subgroup_from_elements(&kernel)?;
    let joint = chi_double_coset(&qg, &u, &hq)?;
    let cb = chi_double_coset(b, ub, &hb)?;
    let projections = chi_double_coset(a, ua, &ha)? * cb.clone();
    let fibre = chi_double_coset(a, ua, &ka)? * cb;
    if joint > projections || joint > fibre {
        return Err(Error::verification(
            "product chi inequalities",
            json!({"joint": rat::show(&joint), "projections": rat::show(&projections), "fibre": rat::show(&fibre), "h": h}),
        ));
    }
    Ok(ProductChi { joint, projections, fibre })
}
