//! Cusps of `Gamma(n)`, `Gamma_1(n)`, `Gamma_0(n)` over Q and quadratic
//! fields of class number one: closed forms, a pair-orbit oracle over Q, and
//! double cosets in the finite quotient `SL_2(O/n)`.
//!
//! Normalisation: every count treats `-I` as an element of `Gamma` (cusps and
//! stabilisers only see `+-Gamma`), so ratios divide by `[SL_2(O) : +-Gamma]`.
//! Reports also carry `[SL_2(O) : Gamma]`.

use std::collections::HashSet;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;
use serde_json::json;

use crate::chain_ring::{El, Ring};
use crate::error::{Error, Reproducer, Result};
use crate::finite_group::UnionFind;
use crate::par;
use crate::quad_field::{modulus_units, unit_data, IdealHNF, QElt, QuadraticField, ResidueRing};
use crate::rat::{self, int, rat};
use crate::sl2_local::{self as sl2, Column, Mat2};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Base {
    Rational,
    Quadratic(QuadraticField),
}

impl fmt::Display for Base {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Base::Rational => write!(f, "Q"),
            Base::Quadratic(k) => write!(f, "{k}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    Gamma,
    Gamma1,
    Gamma0,
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Kind::Gamma => "gamma",
            Kind::Gamma1 => "gamma1",
            Kind::Gamma0 => "gamma0",
        })
    }
}

/// A classical congruence subgroup. Over Q the level `N` is stored as `[N, 0; 0, 1]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CongruenceFamily {
    pub base: Base,
    pub kind: Kind,
    pub level: IdealHNF,
}

/// A prime power `p^k` dividing the level, with `|O/p| = norm_p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PrimePower {
    pub norm_p: u64,
    pub k: u32,
}

impl CongruenceFamily {
    pub fn rational(kind: Kind, n: u64) -> Result<CongruenceFamily> {
        if n == 0 {
            return Err(Error::ZeroIdeal);
        }
        Ok(CongruenceFamily { base: Base::Rational, kind, level: rational_level(n) })
    }

    pub fn quadratic(k: &QuadraticField, kind: Kind, level: IdealHNF) -> CongruenceFamily {
        CongruenceFamily { base: Base::Quadratic(k.clone()), kind, level }
    }

    pub fn norm(&self) -> u64 {
        self.level.norm()
    }

    pub fn label(&self) -> String {
        match &self.base {
            Base::Rational => format!("{}({}) over Q", self.kind, self.level.a),
            Base::Quadratic(k) => format!("{}({}) over {k}", self.kind, self.level.show()),
        }
    }

    pub fn factors(&self) -> Result<Vec<PrimePower>> {
        match &self.base {
            Base::Rational => Ok(int_factor(self.level.a as u64)
                .into_iter()
                .map(|(p, k)| PrimePower { norm_p: p, k })
                .collect()),
            Base::Quadratic(k) => Ok(k
                .factor_ideal(&self.level)?
                .into_iter()
                .map(|(pr, e)| PrimePower { norm_p: pr.norm(), k: e })
                .collect()),
        }
    }

    pub fn residue_ring(&self) -> Result<ResidueRing> {
        residue_ring(&self.base, &self.level)
    }

    /// `-1 = 1 mod n`, i.e. `-I` lies in `Gamma(n)`.
    pub fn level_divides_two(&self) -> bool {
        self.level.contains(QElt::int(2))
    }

    pub fn minus_identity_in_gamma(&self) -> bool {
        self.kind == Kind::Gamma0 || self.level_divides_two()
    }
}

pub fn rational_level(n: u64) -> IdealHNF {
    IdealHNF { a: n as i128, b: 0, c: 1 }
}

pub fn residue_ring(base: &Base, level: &IdealHNF) -> Result<ResidueRing> {
    match base {
        Base::Rational => ResidueRing::rational(level.a as u64),
        Base::Quadratic(k) => ResidueRing::quadratic(k, level),
    }
}

pub(crate) fn int_factor(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        let mut k = 0;
        while n.is_multiple_of(p) {
            n /= p;
            k += 1;
        }
        if k > 0 {
            out.push((p, k));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub(crate) fn divisors(n: u64) -> Vec<u64> {
    let mut d = vec![1u64];
    for (p, k) in int_factor(n) {
        let cur = d.clone();
        let mut pk = 1;
        for _ in 0..k {
            pk *= p;
            d.extend(cur.iter().map(|x| x * pk));
        }
    }
    d.sort_unstable();
    d
}

pub(crate) fn phi(n: u64) -> u64 {
    int_factor(n).into_iter().fold(n, |acc, (p, _)| acc / p * (p - 1))
}

// ---------------------------------------------------------------------------
// Closed forms

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClosedCount {
    pub cusps: u128,
    /// `sum a_sigma` where a closed form is available.
    pub multiplicity_sum: Option<u128>,
    /// Imaginary `Gamma_0`: `sum_{d | n} |(O/(d, n/d))^*|` without the unit quotient.
    pub unit_free_formula: Option<u128>,
}

/// `Gamma_0(n)` over an imaginary field: sum over `d | n` of the orbits of
/// `(O^*)^2` on `(O/g)^*`, `g = (d, n/d)`; also the same sum without the quotient.
fn imaginary_gamma0_closed(k: &QuadraticField, n: &IdealHNF) -> Result<(u128, u128)> {
    let f = k.factor_ideal(n)?;
    let squares: Vec<QElt> = k.torsion_units().iter().map(|&u| k.mul(u, u)).collect();
    let (mut total, mut paper) = (0u128, 0u128);
    let mut exps = vec![0u32; f.len()];
    loop {
        let g = f.iter().zip(&exps).fold(IdealHNF::unit(), |acc, ((pr, e), &d)| k.ideal_mul(&acc, &k.ideal_pow(&pr.ideal, d.min(e - d))));
        let units: u128 = f
            .iter()
            .zip(&exps)
            .map(|((pr, e), &d)| match d.min(e - d) {
                0 => 1,
                m => (pr.norm() as u128).pow(m - 1) * (pr.norm() as u128 - 1),
            })
            .product();
        let rr = ResidueRing::quadratic(k, &g)?;
        let image: HashSet<Vec<El>> = squares.iter().map(|&s| rr.reduce(s)).collect();
        total += units / image.len() as u128;
        paper += units;
        let Some(i) = (0..f.len()).find(|&i| exps[i] < f[i].1) else { break };
        exps[i] += 1;
        exps[..i].iter_mut().for_each(|e| *e = 0);
    }
    Ok((total, paper))
}

pub fn cusp_count_closed(fam: &CongruenceFamily) -> Result<ClosedCount> {
    let unsupported = || Error::UnsupportedCombination(fam.label());
    match (&fam.base, fam.kind) {
        (Base::Rational, kind) => {
            let n = fam.level.a as u64;
            if kind != Kind::Gamma0 && n <= 4 {
                return Err(Error::GateViolated(format!("{} needs N > 4", fam.label())));
            }
            let c: u128 = match kind {
                // N^2 prod (1 - p^-2) / 2
                Kind::Gamma => index_sl(fam)? / n as u128 / 2,
                Kind::Gamma1 => divisors(n).iter().map(|&d| (phi(d) * phi(n / d)) as u128).sum::<u128>() / 2,
                Kind::Gamma0 => divisors(n).iter().map(|&d| phi(d.gcd(&(n / d))) as u128).sum(),
            };
            Ok(ClosedCount { cusps: c, multiplicity_sum: Some(c), unit_free_formula: None })
        }
        (Base::Quadratic(k), Kind::Gamma0) if !k.is_real() => {
            let (cusps, paper) = imaginary_gamma0_closed(k, &fam.level)?;
            Ok(ClosedCount { cusps, multiplicity_sum: None, unit_free_formula: Some(paper) })
        }
        (Base::Quadratic(k), Kind::Gamma) if k.is_real() => {
            let rr = fam.residue_ring()?;
            let m = modulus_units(&unit_data(k)?, &rr);
            let n = fam.norm() as u128;
            let prod_sq = fam.factors()?.iter().fold(n * n, |acc, pp| {
                let q = pp.norm_p as u128;
                acc / (q * q) * (q * q - 1)
            });
            let per_cusp = prod_sq / m.index_units as u128;
            let cusps = k.class_number as u128 * per_cusp;
            Ok(ClosedCount { cusps, multiplicity_sum: Some(cusps * m.u_plus_over_un_squared.unwrap() as u128), unit_free_formula: None })
        }
        _ => Err(unsupported()),
    }
}

/// `[SL_2(O) : Gamma]` from the level factorisation.
pub fn index_sl(fam: &CongruenceFamily) -> Result<u128> {
    Ok(fam.factors()?.iter().fold(1u128, |acc, pp| {
        let (q, k) = (pp.norm_p as u128, pp.k);
        acc * match fam.kind {
            Kind::Gamma => q.pow(3 * k - 2) * (q * q - 1),
            Kind::Gamma1 => q.pow(2 * k - 2) * (q * q - 1),
            Kind::Gamma0 => q.pow(k - 1) * (q + 1),
        }
    }))
}

/// `[SL_2(O) : +-Gamma]`.
pub fn index_psl(fam: &CongruenceFamily) -> Result<u128> {
    let i = index_sl(fam)?;
    Ok(if fam.minus_identity_in_gamma() { i } else { i / 2 })
}

// ---------------------------------------------------------------------------
// Pair-orbit oracle over Q

pub const PAIR_ORBIT_LIMIT: u64 = 3000;

/// Cusps as orbits of pairs `(a, c)` mod N with `gcd(a, c, N) = 1` under the
/// image of `+-Gamma` acting on columns, in plain modular arithmetic.
pub fn cusp_count_pair_orbit(n: u64, kind: Kind) -> Result<u64> {
    if n == 0 {
        return Err(Error::ZeroIdeal);
    }
    if n > PAIR_ORBIT_LIMIT {
        return Err(Error::TooLarge(format!("pair-orbit oracle needs N <= {PAIR_ORBIT_LIMIT}")));
    }
    let nn = n as usize;
    let id = |a: u64, c: u64| (a * n + c) as usize;
    let primitive = |a: u64, c: u64| a.gcd(&c).gcd(&n) == 1;
    let mut uf = UnionFind::new(nn * nn);
    let mut unit_gens = Vec::new();
    if kind == Kind::Gamma0 {
        let mut reach: HashSet<u64> = HashSet::from([1 % n]);
        for u in 1..n {
            if u.gcd(&n) == 1 && !reach.contains(&u) {
                unit_gens.push(u);
                let mut frontier: Vec<u64> = reach.iter().copied().collect();
                while let Some(x) = frontier.pop() {
                    for &g in &unit_gens {
                        let y = x * g % n;
                        if reach.insert(y) {
                            frontier.push(y);
                        }
                    }
                }
            }
        }
    }
    for a in 0..n {
        for c in 0..n {
            if !primitive(a, c) {
                continue;
            }
            let x = id(a, c);
            uf.union(x, id((n - a) % n, (n - c) % n));
            if kind != Kind::Gamma {
                uf.union(x, id((a + c) % n, c));
            }
            for &u in &unit_gens {
                let ui = mod_inv(u, n);
                uf.union(x, id(u * a % n, ui * c % n));
            }
        }
    }
    let mut roots = HashSet::new();
    for a in 0..n {
        for c in 0..n {
            if primitive(a, c) {
                roots.insert(uf.find(id(a, c)));
            }
        }
    }
    Ok(roots.len() as u64)
}

fn mod_inv(u: u64, n: u64) -> u64 {
    let e = (u as i64).extended_gcd(&(n as i64));
    e.x.rem_euclid(n as i64) as u64
}

// ---------------------------------------------------------------------------
// Finite quotient SL_2(O/n) = prod SL_2(O/p^k)

pub const QUOTIENT_LIMIT: u128 = 10_000_000;

/// An element of `SL_2(O/n)`, one matrix per CRT factor.
pub type CMat = Vec<Mat2>;

fn cmul(rings: &[Ring], x: &[Mat2], y: &[Mat2]) -> CMat {
    rings.iter().zip(x.iter().zip(y)).map(|(r, (a, b))| a.mul(r, b)).collect()
}

fn cidentity(rings: &[Ring]) -> CMat {
    rings.iter().map(Mat2::identity).collect()
}

fn cminus(rings: &[Ring]) -> CMat {
    rings.iter().map(|r| Mat2::identity(r).scale(r, r.neg(r.one()))).collect()
}

/// Additive generators of a factor ring: `1`, and `w` for quadratic fields.
fn additive_gens(r: &Ring) -> Vec<El> {
    let n = r.coords(0).len();
    (0..n)
        .map(|k| {
            let mut v = vec![0i64; n];
            v[k] = 1;
            r.from_coords(&v)
        })
        .filter(|&x| x != 0)
        .collect()
}

/// A small generating set of `R^*`.
fn unit_gens(r: &Ring) -> Vec<El> {
    let mut reach: HashSet<El> = HashSet::from([r.one()]);
    let mut gens = Vec::new();
    for u in r.elements().filter(|&u| r.is_unit(u)) {
        if reach.contains(&u) {
            continue;
        }
        gens.push(u);
        let mut frontier: Vec<El> = reach.iter().copied().collect();
        while let Some(x) = frontier.pop() {
            for &g in &gens {
                let y = r.mul(x, g);
                if reach.insert(y) {
                    frontier.push(y);
                }
            }
        }
    }
    gens
}

/// Generators of the image of `Gamma` in `SL_2(O/n)`, factor by factor.
pub fn gamma_bar_generators(kind: Kind, rings: &[Ring]) -> Vec<CMat> {
    let mut out = Vec::new();
    for (i, r) in rings.iter().enumerate() {
        let mut local = Vec::new();
        if kind != Kind::Gamma {
            local.extend(additive_gens(r).into_iter().map(|b| Mat2::upper(r, b)));
        }
        if kind == Kind::Gamma0 {
            local.extend(unit_gens(r).into_iter().filter_map(|u| Mat2::torus(r, u).ok()));
        }
        for g in local {
            let mut m = cidentity(rings);
            m[i] = g;
            out.push(m);
        }
    }
    out
}

fn closure(rings: &[Ring], gens: &[CMat], cap: usize) -> Result<Vec<CMat>> {
    let id = cidentity(rings);
    let mut seen: HashSet<CMat> = HashSet::from([id.clone()]);
    let mut out = vec![id];
    let mut i = 0;
    while i < out.len() {
        for g in gens {
            let y = cmul(rings, &out[i], g);
            if seen.insert(y.clone()) {
                if out.len() >= cap {
                    return Err(Error::CapExceeded(cap));
                }
                out.push(y);
            }
        }
        i += 1;
    }
    Ok(out)
}

/// Primitive columns of `(O/n)^2`, indexed in mixed radix over the factors.
struct Columns {
    rings: Vec<Ring>,
    cols: Vec<Vec<Column>>,
    index: Vec<Vec<u32>>,
    total: usize,
}

impl Columns {
    fn new(rings: &[Ring]) -> Columns {
        let mut cols = Vec::new();
        let mut index = Vec::new();
        for r in rings {
            let c = sl2::primitive_columns(r);
            let n = r.size() as usize;
            let mut idx = vec![u32::MAX; n * n];
            for (k, &(x, y)) in c.iter().enumerate() {
                idx[x as usize * n + y as usize] = k as u32;
            }
            cols.push(c);
            index.push(idx);
        }
        let total = cols.iter().map(|c| c.len()).product();
        Columns { rings: rings.to_vec(), cols, index, total }
    }

    fn decode(&self, mut x: usize) -> Vec<Column> {
        let mut out = vec![(0, 0); self.cols.len()];
        for i in (0..self.cols.len()).rev() {
            let m = self.cols[i].len();
            out[i] = self.cols[i][x % m];
            x /= m;
        }
        out
    }

    fn encode(&self, v: &[Column]) -> usize {
        let mut x = 0usize;
        for (i, &(a, b)) in v.iter().enumerate() {
            let n = self.rings[i].size() as usize;
            x = x * self.cols[i].len() + self.index[i][a as usize * n + b as usize] as usize;
        }
        x
    }

    fn act(&self, g: &[Mat2], x: usize) -> usize {
        let v: Vec<Column> = self.decode(x).iter().enumerate().map(|(i, &c)| g[i].act(&self.rings[i], c)).collect();
        self.encode(&v)
    }

    fn scale(&self, u: &[El], x: usize) -> usize {
        let v: Vec<Column> = self
            .decode(x)
            .iter()
            .enumerate()
            .map(|(i, &(a, b))| (self.rings[i].mul(u[i], a), self.rings[i].mul(u[i], b)))
            .collect();
        self.encode(&v)
    }

    fn union_all(&self, uf: &mut UnionFind, step: impl Fn(usize) -> Vec<usize> + Sync + Send) {
        let images = par::map_range(self.total, step);
        for (x, ys) in images.into_iter().enumerate() {
            for y in ys {
                uf.union(x, y);
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DoubleCoset {
    /// `|Gamma \ G / P|`.
    pub nu_inf: u64,
    /// `|Gamma \ G / U|`.
    pub sum_u: u64,
    /// `|SL_2(O/n)|`.
    pub group_order: u128,
    /// `|image of Gamma|` and `|image of +-Gamma|`.
    pub gamma_order: u128,
    pub pm_gamma_order: u128,
    /// `|Gamma \ G|` computed as `|G| / |image|`, both normalisations.
    pub index_sl: u128,
    pub index_psl: u128,
    /// Size of the image of `O^*` in `(O/n)^*`.
    pub unit_image: u64,
}

/// Double cosets `+-Gamma \ SL_2(O/n) / P` and `/ U`, via the
/// equivariant bijection `SL_2(O/n)/U = X` (first columns).
pub fn cusp_count_double_coset(fam: &CongruenceFamily) -> Result<DoubleCoset> {
    let rr = fam.residue_ring()?;
    let rings: Vec<Ring> = rr.factors.iter().map(|f| f.ring.clone()).collect();
    let group_order: u128 = rings.iter().map(sl2::group_order).product();
    if group_order > QUOTIENT_LIMIT {
        return Err(Error::TooLarge(format!("|SL_2(O/n)| = {group_order}")));
    }
    let units: Vec<Vec<El>> = match &fam.base {
        Base::Rational => vec![rr.reduce(QElt::int(-1))],
        Base::Quadratic(k) => modulus_units(&unit_data(k)?, &rr).image,
    };
    let unit_image = units.iter().cloned().chain([rr.one()]).collect::<HashSet<_>>().len() as u64;
    let gens = gamma_bar_generators(fam.kind, &rings);
    let gamma = closure(&rings, &gens, QUOTIENT_LIMIT as usize)?;
    let minus = cminus(&rings);
    let gamma_order = gamma.len() as u128;
    let has_minus = gamma.contains(&minus);
    let pm_gamma_order = if has_minus { gamma_order } else { 2 * gamma_order };

    let x = Columns::new(&rings);
    let mut pm_gens = gens.clone();
    pm_gens.push(minus);
    let mut uf = UnionFind::new(x.total);
    x.union_all(&mut uf, |i| pm_gens.iter().map(|g| x.act(g, i)).collect());
    let sum_u = uf.components() as u64;
    x.union_all(&mut uf, |i| units.iter().map(|u| x.scale(u, i)).collect());
    let nu_inf = uf.components() as u64;
    Ok(DoubleCoset {
        nu_inf,
        sum_u,
        group_order,
        gamma_order,
        pm_gamma_order,
        index_sl: group_order / gamma_order,
        index_psl: group_order / pm_gamma_order,
        unit_image,
    })
}

// ---------------------------------------------------------------------------
// Reports

#[derive(Clone, Debug, Serialize)]
pub struct Identity {
    pub name: String,
    #[serde(serialize_with = "rat::serialize")]
    pub lhs: BigRational,
    #[serde(serialize_with = "rat::serialize")]
    pub rhs: BigRational,
    pub holds: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct CuspReport {
    pub family: String,
    pub base: String,
    pub kind: Kind,
    pub level: String,
    pub level_norm: u64,
    pub cusp_count: u128,
    pub closed_form: Option<u128>,
    /// Imaginary `Gamma_0`: the divisor sum without the `(O^*)^2` quotient.
    pub closed_form_unit_free: Option<u128>,
    pub pair_orbit: Option<u64>,
    pub double_coset: Option<u64>,
    /// `|Gamma \ G / U| = sum u_{sigma|infinity}`.
    pub sum_u: Option<u64>,
    pub methods_agree: bool,
    /// `sum a_sigma`, where a closed form for `a_sigma` exists.
    pub multiplicity_sum: Option<u128>,
    /// Upper end of the range for `sum a_sigma` (imaginary fields: `nu * |O^*/+-1|`).
    pub multiplicity_max: Option<u128>,
    /// `[SL_2(O) : Gamma]`.
    pub index: u128,
    /// `[SL_2(O) : +-Gamma]`, the denominator of `ratio`.
    pub index_psl: u128,
    pub index_finite_quotient: Option<u128>,
    pub minus_identity_in_gamma: bool,
    #[serde(serialize_with = "rat::opt::serialize")]
    pub ratio: Option<BigRational>,
    /// `multiplicity_sum / index`.
    #[serde(serialize_with = "rat::opt::serialize")]
    pub ratio_sl: Option<BigRational>,
    pub eisenstein_bound: Option<u128>,
    /// Real fields, `Gamma(n)`: `ratio * N(n) / (h [U+ : (O*)^2])`.
    #[serde(serialize_with = "rat::opt::serialize")]
    pub solved_a: Option<BigRational>,
    #[serde(serialize_with = "rat::opt::serialize")]
    pub solved_a_sl: Option<BigRational>,
    pub identities: Vec<Identity>,
    pub failures: Vec<Reproducer>,
}

impl CuspReport {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Which of the (possibly expensive) methods to run.
#[derive(Clone, Copy, Debug)]
pub struct Methods {
    pub pair_orbit: bool,
    pub double_coset: bool,
}

impl Default for Methods {
    fn default() -> Self {
        Methods { pair_orbit: true, double_coset: true }
    }
}

fn urat(n: u128) -> BigRational {
    int(BigInt::from(n))
}

pub fn ratio_report(fam: &CongruenceFamily, methods: Methods) -> Result<CuspReport> {
    let closed = match cusp_count_closed(fam) {
        Ok(c) => Some(c),
        Err(Error::UnsupportedCombination(_)) | Err(Error::GateViolated(_)) => None,
        Err(e) => return Err(e),
    };
    let pair_orbit = match (&fam.base, methods.pair_orbit) {
        (Base::Rational, true) if fam.norm() <= PAIR_ORBIT_LIMIT => Some(cusp_count_pair_orbit(fam.norm(), fam.kind)?),
        _ => None,
    };
    let dc = if methods.double_coset {
        match cusp_count_double_coset(fam) {
            Ok(d) => Some(d),
            Err(Error::TooLarge(_)) => None,
            Err(e) => return Err(e),
        }
    } else {
        None
    };
    let counts: Vec<u128> = [closed.as_ref().map(|c| c.cusps), pair_orbit.map(u128::from), dc.as_ref().map(|d| d.nu_inf as u128)]
        .into_iter()
        .flatten()
        .collect();
    let Some(&cusp_count) = counts.first() else {
        return Err(Error::UnsupportedCombination(format!("{}: no method applies", fam.label())));
    };
    let methods_agree = counts.iter().all(|&c| c == cusp_count);
    let index = index_sl(fam)?;
    let index_psl = index_psl(fam)?;

    let mut identities = Vec::new();
    let mut check = |name: &str, lhs: BigRational, rhs: BigRational| {
        let holds = lhs == rhs;
        identities.push(Identity { name: name.to_string(), lhs, rhs, holds });
    };
    if let Some(d) = &dc {
        check("index_dual_path", urat(d.index_sl), urat(index));
        check("index_psl_dual_path", urat(d.index_psl), urat(index_psl));
    }

    let (multiplicity_sum, multiplicity_max) = match &fam.base {
        Base::Rational => (Some(cusp_count), Some(cusp_count)),
        Base::Quadratic(k) if !k.is_real() => {
            let t = k.torsion_units().len() as u128 / 2;
            (Some(cusp_count), Some(cusp_count * t))
        }
        Base::Quadratic(_) => {
            let m = closed.as_ref().and_then(|c| c.multiplicity_sum).map(|s| {
                // per-cusp multiplicity applied to the count actually found
                s / closed.as_ref().unwrap().cusps * cusp_count
            });
            (m, m)
        }
    };
    let ratio = multiplicity_sum.map(|s| rat(BigInt::from(s), BigInt::from(index_psl)));
    let ratio_sl = multiplicity_sum.map(|s| rat(BigInt::from(s), BigInt::from(index)));
    let n = fam.norm();
    let factors = fam.factors()?;
    let mut solved_a = None;
    let mut solved_a_sl = None;
    match (&fam.base, fam.kind) {
        (Base::Rational, kind) => {
            if let Some(d) = &dc {
                check("sum_u_equals_cusps", urat(d.sum_u as u128), urat(cusp_count));
            }
            let r = ratio.clone().unwrap();
            match kind {
                Kind::Gamma if n > 4 => check("ratio_gamma_1/N", r, rat(1, n)),
                Kind::Gamma1 if n > 4 => {
                    let s: u128 = divisors(n).iter().map(|&d| (phi(d) * phi(n / d)) as u128).sum();
                    let den = factors.iter().fold(urat((n as u128).pow(2)), |acc, pp| {
                        let q = pp.norm_p as i64;
                        acc * rat(q * q - 1, q * q)
                    });
                    check("ratio_gamma1", r, urat(s) / den);
                }
                Kind::Gamma0 => {
                    let s: u128 = divisors(n).iter().map(|&d| phi(d.gcd(&(n / d))) as u128).sum();
                    let den = factors.iter().fold(urat(n as u128), |acc, pp| acc * rat(pp.norm_p as i64 + 1, pp.norm_p as i64));
                    check("ratio_gamma0", r, urat(s) / den);
                }
                _ => {}
            }
        }
        (Base::Quadratic(k), Kind::Gamma0) if !k.is_real() && factors.iter().all(|pp| pp.k == 1) => {
            check("squarefree_count_2^omega", urat(cusp_count), urat(1u128 << factors.len()));
            let prod = factors.iter().fold(BigRational::one(), |acc, pp| acc * rat(2, pp.norm_p as i64 + 1));
            check("ratio_prod_2/(Np+1)", ratio.clone().unwrap(), prod);
        }
        (Base::Quadratic(k), Kind::Gamma) if k.is_real() => {
            let up = fundamental_index(k)?;
            let scale = rat(BigInt::from(n), BigInt::from(k.class_number * up));
            let a = ratio.clone().unwrap() * scale.clone();
            solved_a = Some(a.clone());
            solved_a_sl = Some(ratio_sl.clone().unwrap() * scale);
            let nearest = if a == int(2) { int(2) } else { int(1) };
            check("real_ratio_a_in_{1,2}", a, nearest);
        }
        _ => {}
    }
    if let Some(d) = &dc {
        let le = |name: &str, a: u128, b: u128, ids: &mut Vec<Identity>| {
            ids.push(Identity { name: name.into(), lhs: urat(a), rhs: urat(b), holds: a <= b });
        };
        le("nu_le_sum_u", d.nu_inf as u128, d.sum_u as u128, &mut identities);
        le("sum_u_le_index", d.sum_u as u128, d.index_psl, &mut identities);
    }
    let eisenstein_bound = match &fam.base {
        Base::Quadratic(k) if !k.is_real() => Some(2 * cusp_count),
        _ => None,
    };
    let mut failures: Vec<Reproducer> = identities
        .iter()
        .filter(|i| !i.holds)
        .map(|i| Reproducer {
            check: format!("cusps/{}", i.name),
            details: json!({"family": fam, "lhs": rat::show(&i.lhs), "rhs": rat::show(&i.rhs)}),
        })
        .collect();
    if !methods_agree {
        failures.push(Reproducer {
            check: "cusps/methods_agree".into(),
            details: json!({"family": fam, "closed": closed.as_ref().map(|c| c.cusps.to_string()), "pair_orbit": pair_orbit, "double_coset": dc.as_ref().map(|d| d.nu_inf)}),
        });
    }
    Ok(CuspReport {
        family: fam.label(),
        base: fam.base.to_string(),
        kind: fam.kind,
        level: match fam.base {
            Base::Rational => fam.level.a.to_string(),
            _ => fam.level.show(),
        },
        level_norm: n,
        cusp_count,
        closed_form: closed.as_ref().map(|c| c.cusps),
        closed_form_unit_free: closed.and_then(|c| c.unit_free_formula),
        pair_orbit,
        double_coset: dc.as_ref().map(|d| d.nu_inf),
        sum_u: dc.as_ref().map(|d| d.sum_u),
        methods_agree,
        multiplicity_sum,
        multiplicity_max,
        index,
        index_psl,
        index_finite_quotient: dc.as_ref().map(|d| d.index_sl),
        minus_identity_in_gamma: fam.minus_identity_in_gamma(),
        ratio,
        ratio_sl,
        eisenstein_bound,
        solved_a,
        solved_a_sl,
        identities,
        failures,
    })
}

fn fundamental_index(k: &QuadraticField) -> Result<u64> {
    Ok(unit_data(k)?.u_plus_over_squares.expect("real field"))
}

/// `2 nu_infinity` for imaginary quadratic bases.
pub fn eisenstein_bound(fam: &CongruenceFamily) -> Result<u128> {
    match &fam.base {
        Base::Quadratic(k) if !k.is_real() => Ok(2 * cusp_count_double_coset(fam)?.nu_inf as u128),
        _ => Err(Error::UnsupportedCombination(format!("{}: Eisenstein bound needs an imaginary field", fam.label()))),
    }
}

// ---------------------------------------------------------------------------
// Decay scan over Q

#[derive(Clone, Debug, Serialize)]
pub struct DecayRow {
    pub level_norm: u64,
    pub cusps: u128,
    pub mult_sum: u128,
    pub index: u128,
    pub ratio_num: u128,
    pub ratio_den: u128,
}

#[derive(Clone, Debug, Serialize)]
pub struct DecayScan {
    pub kind: Kind,
    pub rows: Vec<DecayRow>,
    /// `(k, max ratio over [10^k, 10^(k+1)])` for the complete decades in range.
    pub decade_max: Vec<(u32, f64)>,
    pub failures: Vec<Reproducer>,
}

/// Closed-form rows for `1 <= N <= n_max` with the divisor-sum inequalities,
/// the explicit ratio bounds and (for `Gamma_0`) decreasing decade maxima.
pub fn decay_scan(kind: Kind, n_max: u64) -> Result<DecayScan> {
    if n_max > 100_000 {
        return Err(Error::TooLarge(format!("decay scan to {n_max}")));
    }
    struct Out {
        row: Option<DecayRow>,
        fails: Vec<Reproducer>,
    }
    let outs = par::map_range(n_max as usize, |i| {
        let n = i as u64 + 1;
        let mut fails = Vec::new();
        let divs = divisors(n);
        let tau = divs.len() as u128;
        let s0: u128 = divs.iter().map(|&d| phi(d.gcd(&(n / d))) as u128).sum();
        let s1: u128 = divs.iter().map(|&d| (phi(d) * phi(n / d)) as u128).sum();
        let nn = n as u128;
        // s0 <= sqrt(N) tau  <=>  s0^2 <= N tau^2
        if s0 * s0 > nn * tau * tau {
            fails.push(Reproducer { check: "decay/gcd_sum".into(), details: json!({"N": n, "sum": s0.to_string(), "tau": tau.to_string()}) });
        }
        if s1 > nn * tau {
            fails.push(Reproducer { check: "decay/phi_sum".into(), details: json!({"N": n, "sum": s1.to_string(), "tau": tau.to_string()}) });
        }
        let row = (kind == Kind::Gamma0 || n > 4).then(|| {
            let fam = CongruenceFamily::rational(kind, n).expect("n > 0");
            let c = cusp_count_closed(&fam).expect("gated").cusps;
            let index = index_psl(&fam).expect("factorable");
            let g = c.gcd(&index);
            let (num, den) = (c / g, index / g);
            // explicit bounds: tau/sqrt(N), tau/(N prod(1 - p^-2)), 1/N
            let holds = match kind {
                Kind::Gamma0 => num * num * nn <= tau * tau * den * den,
                Kind::Gamma1 => {
                    let sq = index_sl(&CongruenceFamily::rational(Kind::Gamma1, n).unwrap()).unwrap() / nn;
                    num * nn * sq <= tau * nn * den
                }
                Kind::Gamma => num * nn <= den,
            };
            if !holds {
                fails.push(Reproducer { check: "decay/ratio_bound".into(), details: json!({"N": n, "kind": kind, "ratio": format!("{num}/{den}")}) });
            }
            DecayRow { level_norm: n, cusps: c, mult_sum: c, index, ratio_num: num, ratio_den: den }
        });
        Out { row, fails }
    });
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for o in outs {
        rows.extend(o.row);
        failures.extend(o.fails);
    }
    let mut decade_max = Vec::new();
    let mut best: Vec<(u32, BigRational)> = Vec::new();
    for k in 1..=4u32 {
        let (lo, hi) = (10u64.pow(k), 10u64.pow(k + 1));
        if hi > n_max {
            break;
        }
        let m = rows
            .iter()
            .filter(|r| r.level_norm >= lo && r.level_norm <= hi)
            .map(|r| rat(BigInt::from(r.ratio_num), BigInt::from(r.ratio_den)))
            .max()
            .unwrap_or_else(BigRational::zero);
        decade_max.push((k, m.to_f64().unwrap_or(f64::NAN)));
        best.push((k, m));
    }
    if kind == Kind::Gamma0 {
        for w in best.windows(2) {
            if w[1].1 >= w[0].1 {
                failures.push(Reproducer {
                    check: "decay/decade_max_decreasing".into(),
                    details: json!({"k": w[1].0, "previous": rat::show(&w[0].1), "current": rat::show(&w[1].1)}),
                });
            }
        }
    }
    Ok(DecayScan { kind, rows, decade_max, failures })
}

// ---------------------------------------------------------------------------
// Products of principal congruence subgroups

#[derive(Clone, Debug, Serialize)]
pub struct ProductCheck {
    pub modulus: String,
    pub size_a: usize,
    pub size_b: usize,
    pub product_size: usize,
    pub target_size: usize,
    pub equal: bool,
}

/// `v_p(c)` for the prime of a residue-ring factor.
fn valuation(base: &Base, prime: &IdealHNF, c: &IdealHNF) -> u32 {
    match base {
        Base::Rational => {
            let (p, mut n, mut k) = (prime.a, c.a, 0);
            while n % p == 0 {
                n /= p;
                k += 1;
            }
            k
        }
        Base::Quadratic(f) => {
            let mut k = 0;
            while f.ideal_pow(prime, k + 1).contains_ideal(c) {
                k += 1;
            }
            k
        }
    }
}

/// Images of `G(c)` in `SL_2(O/m)` for `c | m`, as a list of tuples.
fn kernel_image(base: &Base, rr: &ResidueRing, c: &IdealHNF) -> Vec<CMat> {
    let mut out: Vec<CMat> = vec![Vec::new()];
    for f in &rr.factors {
        let v = valuation(base, &f.prime, c) as usize;
        let local = if v == 0 {
            sl2::sl2_elements(&f.ring)
        } else if v >= f.k {
            vec![Mat2::identity(&f.ring)]
        } else {
            sl2::kernel_elements(&f.ring, v)
        };
        out = out
            .into_iter()
            .flat_map(|pre| {
                local.iter().map(move |m| {
                    let mut t = pre.clone();
                    t.push(*m);
                    t
                })
            })
            .collect();
    }
    out
}

/// Checks `G(a) G(b) = G(a + b)` inside `SL_2(O/(a cap b))`.
pub fn congruence_product_check(base: &Base, a: &IdealHNF, b: &IdealHNF) -> Result<ProductCheck> {
    let (m, sum) = match base {
        Base::Rational => {
            let (x, y) = (a.a, b.a);
            (rational_level(x.lcm(&y) as u64), rational_level(x.gcd(&y) as u64))
        }
        Base::Quadratic(k) => {
            let mut m = IdealHNF::unit();
            let fa = k.factor_ideal(a)?;
            let fb = k.factor_ideal(b)?;
            let mut primes: Vec<IdealHNF> = fa.iter().chain(&fb).map(|(p, _)| p.ideal).collect();
            primes.sort_by_key(|p| (p.a, p.b, p.c));
            primes.dedup();
            for p in primes {
                let e = valuation(base, &p, a).max(valuation(base, &p, b));
                m = k.ideal_mul(&m, &k.ideal_pow(&p, e));
            }
            (m, k.ideal_sum(a, b))
        }
    };
    let rr = residue_ring(base, &m)?;
    let rings: Vec<Ring> = rr.factors.iter().map(|f| f.ring.clone()).collect();
    let order: u128 = rings.iter().map(sl2::group_order).product();
    if order > QUOTIENT_LIMIT {
        return Err(Error::TooLarge(format!("|SL_2(O/m)| = {order}")));
    }
    let ga = kernel_image(base, &rr, a);
    let gb = kernel_image(base, &rr, b);
    if (ga.len() as u128) * (gb.len() as u128) > 50_000_000 {
        return Err(Error::TooLarge(format!("product set of {} x {}", ga.len(), gb.len())));
    }
    let products: HashSet<CMat> = par::map(&ga, |x| gb.iter().map(|y| cmul(&rings, x, y)).collect::<Vec<_>>())
        .into_iter()
        .flatten()
        .collect();
    let target: HashSet<CMat> = kernel_image(base, &rr, &sum).into_iter().collect();
    Ok(ProductCheck {
        modulus: m.show(),
        size_a: ga.len(),
        size_b: gb.len(),
        product_size: products.len(),
        target_size: target.len(),
        equal: products == target,
    })
}

#[cfg(test)]
mod tests;
