//! Quadratic fields `K = Q(sqrt d)` with `O_K = Z[w]`: ideals in HNF, Dedekind
//! factorisation, residue rings `O_K/n` as products of chain rings, and units.

use std::collections::HashSet;
use std::fmt;

use num_integer::Integer;
use serde::Serialize;

use crate::chain_ring::{poly, El, Ring, RingSpec};
use crate::error::{Error, Result};

/// `x + y w`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct QElt {
    pub x: i128,
    pub y: i128,
}

impl QElt {
    pub const fn new(x: i128, y: i128) -> QElt {
        QElt { x, y }
    }
    pub const fn int(x: i128) -> QElt {
        QElt { x, y: 0 }
    }
}

/// Imaginary fields of class number one, and real ones with small units.
pub const SUPPORTED: [i64; 9] = [-1, -2, -3, -7, -11, 2, 3, 5, 13];

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct QuadraticField {
    pub d: i64,
    pub discriminant: i64,
    /// Known values (all of the supported fields have class number 1).
    pub class_number: u64,
}

impl QuadraticField {
    pub fn new(d: i64) -> Result<QuadraticField> {
        if !SUPPORTED.contains(&d) {
            return Err(Error::UnsupportedField(d));
        }
        let discriminant = if d.rem_euclid(4) == 1 { d } else { 4 * d };
        Ok(QuadraticField { d, discriminant, class_number: 1 })
    }

    pub fn is_real(&self) -> bool {
        self.d > 0
    }

    fn one_mod_four(&self) -> bool {
        self.d.rem_euclid(4) == 1
    }

    /// `(t, n)` with `w^2 = t w - n`.
    pub fn trace_norm_w(&self) -> (i128, i128) {
        if self.one_mod_four() {
            (1, (1 - self.d as i128) / 4)
        } else {
            (0, -(self.d as i128))
        }
    }

    /// Minimal polynomial of `w`, low degree first.
    pub fn min_poly(&self) -> Vec<i64> {
        let (t, n) = self.trace_norm_w();
        vec![n as i64, -t as i64, 1]
    }

    pub fn w_name(&self) -> String {
        if self.one_mod_four() {
            format!("(1+sqrt({}))/2", self.d)
        } else {
            format!("sqrt({})", self.d)
        }
    }

    pub fn add(&self, a: QElt, b: QElt) -> QElt {
        QElt::new(a.x + b.x, a.y + b.y)
    }

    pub fn neg(&self, a: QElt) -> QElt {
        QElt::new(-a.x, -a.y)
    }

    pub fn mul(&self, a: QElt, b: QElt) -> QElt {
        let (t, n) = self.trace_norm_w();
        let yy = a.y * b.y;
        QElt::new(a.x * b.x - n * yy, a.x * b.y + a.y * b.x + t * yy)
    }

    pub fn pow(&self, a: QElt, k: u64) -> QElt {
        (0..k).fold(QElt::int(1), |acc, _| self.mul(acc, a))
    }

    /// Galois conjugate: `w -> t - w`.
    pub fn conj(&self, a: QElt) -> QElt {
        let (t, _) = self.trace_norm_w();
        QElt::new(a.x + a.y * t, -a.y)
    }

    pub fn norm(&self, a: QElt) -> i128 {
        let (t, n) = self.trace_norm_w();
        a.x * a.x + t * a.x * a.y + n * a.y * a.y
    }

    /// `(A, B)` with `a = (A + B sqrt d) / 2`.
    fn halves(&self, a: QElt) -> (i128, i128) {
        if self.one_mod_four() {
            (2 * a.x + a.y, a.y)
        } else {
            (2 * a.x, 2 * a.y)
        }
    }

    /// Signs of the two real embeddings (`sqrt d > 0`, then `sqrt d < 0`), exactly.
    pub fn signs(&self, a: QElt) -> (i32, i32) {
        assert!(self.is_real());
        let (p, q) = self.halves(a);
        let d = self.d as i128;
        (sign_surd(p, q, d), sign_surd(p, -q, d))
    }

    pub fn is_totally_positive(&self, a: QElt) -> bool {
        self.signs(a) == (1, 1)
    }

    pub fn show(&self, a: QElt) -> String {
        match (a.x, a.y) {
            (x, 0) => x.to_string(),
            (0, y) => format!("{y}w"),
            (x, y) if y < 0 => format!("{x}{y}w"),
            (x, y) => format!("{x}+{y}w"),
        }
    }

    /// Torsion units, found by bounding the positive-definite norm form.
    pub fn torsion_units(&self) -> Vec<QElt> {
        if self.is_real() {
            return vec![QElt::int(1), QElt::int(-1)];
        }
        let mut out = Vec::new();
        for x in -2..=2 {
            for y in -2..=2 {
                if self.norm(QElt::new(x, y)) == 1 {
                    out.push(QElt::new(x, y));
                }
            }
        }
        out
    }
}

impl fmt::Display for QuadraticField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Q(sqrt({}))", self.d)
    }
}

/// Sign of `p + q sqrt d` for squarefree `d > 1`.
fn sign_surd(p: i128, q: i128, d: i128) -> i32 {
    let (sp, sq) = (p.signum() as i32, q.signum() as i32);
    if sp == 0 {
        return sq;
    }
    if sq == 0 || sp == sq {
        return sp;
    }
    match (p * p).cmp(&(q * q * d)) {
        std::cmp::Ordering::Greater => sp,
        std::cmp::Ordering::Less => sq,
        std::cmp::Ordering::Equal => 0,
    }
}

// ---------------------------------------------------------------------------
// Ideals

/// The ideal `aZ + (b + c w)Z`, with `c | a`, `c | b`, `0 <= b < a`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct IdealHNF {
    pub a: i128,
    pub b: i128,
    pub c: i128,
}

impl IdealHNF {
    pub fn unit() -> IdealHNF {
        IdealHNF { a: 1, b: 0, c: 1 }
    }

    pub fn norm(&self) -> u64 {
        (self.a * self.c) as u64
    }

    pub fn contains(&self, v: QElt) -> bool {
        if v.y % self.c != 0 {
            return false;
        }
        (v.x - (v.y / self.c) * self.b) % self.a == 0
    }

    pub fn contains_ideal(&self, o: &IdealHNF) -> bool {
        self.contains(QElt::int(o.a)) && self.contains(QElt::new(o.b, o.c))
    }

    /// Canonical representative of `v` modulo the ideal.
    pub fn reduce(&self, v: QElt) -> QElt {
        let k = Integer::div_floor(&v.y, &self.c);
        let (x, y) = (v.x - k * self.b, v.y - k * self.c);
        QElt::new(x.rem_euclid(self.a), y)
    }

    /// The canonical representatives `x + y w`, `0 <= x < a`, `0 <= y < c`.
    pub fn residues(&self) -> impl Iterator<Item = QElt> + '_ {
        (0..self.c).flat_map(move |y| (0..self.a).map(move |x| QElt::new(x, y)))
    }

    pub fn show(&self) -> String {
        format!("[{}, {}; 0, {}]", self.a, self.b, self.c)
    }
}

/// HNF of the Z-module spanned by `vs` (must have rank 2).
fn hnf_module(vs: &[QElt]) -> Result<IdealHNF> {
    let mut rows: Vec<(i128, i128)> = vs.iter().map(|v| (v.x, v.y)).filter(|&v| v != (0, 0)).collect();
    // Euclid on the w-coordinate
    let mut pivot: Option<(i128, i128)> = None;
    let mut rest = Vec::new();
    for r in rows.drain(..) {
        let Some(mut p) = pivot else {
            if r.1 == 0 {
                rest.push(r);
            } else {
                pivot = Some(r);
            }
            continue;
        };
        let mut r = r;
        while r.1 != 0 {
            let k = Integer::div_floor(&p.1, &r.1);
            p = (p.0 - k * r.0, p.1 - k * r.1);
            std::mem::swap(&mut p, &mut r);
        }
        rest.push(r);
        pivot = Some(p);
    }
    let Some(mut p) = pivot else { return Err(Error::ZeroIdeal) };
    if p.1 < 0 {
        p = (-p.0, -p.1);
    }
    let a = rest.iter().fold(0i128, |g, r| g.gcd(&r.0));
    if a == 0 {
        return Err(Error::ZeroIdeal);
    }
    Ok(IdealHNF { a, b: p.0.rem_euclid(a), c: p.1 })
}

impl QuadraticField {
    pub fn ideal(&self, gens: &[QElt]) -> Result<IdealHNF> {
        let w = QElt::new(0, 1);
        let span: Vec<QElt> = gens.iter().flat_map(|&g| [g, self.mul(g, w)]).collect();
        hnf_module(&span)
    }

    /// The principal ideal `(n)` for a rational integer.
    pub fn principal_int(&self, n: i128) -> Result<IdealHNF> {
        self.ideal(&[QElt::int(n)])
    }

    fn basis(&self, i: &IdealHNF) -> [QElt; 2] {
        [QElt::int(i.a), QElt::new(i.b, i.c)]
    }

    pub fn ideal_mul(&self, i: &IdealHNF, j: &IdealHNF) -> IdealHNF {
        let mut v = Vec::new();
        for x in self.basis(i) {
            for y in self.basis(j) {
                v.push(self.mul(x, y));
            }
        }
        hnf_module(&v).expect("nonzero")
    }

    pub fn ideal_sum(&self, i: &IdealHNF, j: &IdealHNF) -> IdealHNF {
        let mut v = self.basis(i).to_vec();
        v.extend(self.basis(j));
        hnf_module(&v).expect("nonzero")
    }

    pub fn ideal_pow(&self, i: &IdealHNF, k: u32) -> IdealHNF {
        (0..k).fold(IdealHNF::unit(), |acc, _| self.ideal_mul(&acc, i))
    }

    /// Prime ideals above `p` with their ramification and residue degrees.
    pub fn factor_prime(&self, p: u64) -> Result<Vec<PrimeIdeal>> {
        if !poly::is_prime(p) {
            return Err(Error::NonPrimeP(p));
        }
        let g = self.min_poly();
        if poly::index_divisible_by_p(&g, p) {
            return Err(Error::IndexDivisibleByP(p));
        }
        let fac = poly::factor(&poly::reduce(&g, p), p);
        let mut out = Vec::new();
        for (h, m) in fac {
            let f = h.len() - 1;
            let ideal = if f == 2 {
                self.principal_int(p as i128)?
            } else {
                self.ideal(&[QElt::int(p as i128), QElt::new(h[0] as i128, 1)])?
            };
            out.push(PrimeIdeal { p, e0: m, f, ideal, factor: h.iter().map(|&c| c as i64).collect() });
        }
        debug_assert_eq!(out.iter().map(|q| q.e0 * q.f).sum::<usize>(), 2);
        Ok(out)
    }

    /// `n = prod p^k`.
    pub fn factor_ideal(&self, n: &IdealHNF) -> Result<Vec<(PrimeIdeal, u32)>> {
        let mut out = Vec::new();
        for p in prime_factors(n.norm()) {
            for pr in self.factor_prime(p)? {
                let mut k = 0;
                while self.ideal_pow(&pr.ideal, k + 1).contains_ideal(n) {
                    k += 1;
                }
                if k > 0 {
                    out.push((pr, k));
                }
            }
        }
        Ok(out)
    }

    pub fn is_prime_ideal(&self, n: &IdealHNF) -> Result<bool> {
        let f = self.factor_ideal(n)?;
        Ok(f.len() == 1 && f[0].1 == 1)
    }

    /// Number of distinct prime divisors.
    pub fn omega(&self, n: &IdealHNF) -> Result<usize> {
        Ok(self.factor_ideal(n)?.len())
    }

    /// All ideals of norm at most `bound`.
    pub fn ideals_up_to(&self, bound: u64) -> Result<Vec<IdealHNF>> {
        let mut primes = Vec::new();
        for p in 2..=bound {
            if poly::is_prime(p) {
                primes.extend(self.factor_prime(p)?.into_iter().filter(|q| q.norm() <= bound));
            }
        }
        let mut out = vec![(IdealHNF::unit(), 0usize)];
        let mut i = 0;
        while i < out.len() {
            let (cur, from) = out[i];
            for (k, pr) in primes.iter().enumerate().skip(from) {
                if cur.norm() * pr.norm() <= bound {
                    out.push((self.ideal_mul(&cur, &pr.ideal), k));
                }
            }
            i += 1;
        }
        let mut v: Vec<IdealHNF> = out.into_iter().map(|x| x.0).collect();
        v.sort_by_key(|i| (i.norm(), i.a, i.b, i.c));
        v.dedup();
        Ok(v)
    }
}

pub(crate) fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            out.push(p);
            while n.is_multiple_of(p) {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct PrimeIdeal {
    pub p: u64,
    pub e0: usize,
    pub f: usize,
    pub ideal: IdealHNF,
    /// Irreducible factor of the minimal polynomial mod `p` cutting out this prime.
    pub factor: Vec<i64>,
}

impl PrimeIdeal {
    pub fn norm(&self) -> u64 {
        self.p.pow(self.f as u32)
    }
}

// ---------------------------------------------------------------------------
// Residue rings

/// One CRT factor `O/p^k`, built as a chain ring of length `k`.
#[derive(Clone, Debug)]
pub struct LocalFactor {
    /// The prime (over Q: `pZ + wZ`, i.e. `a = p`).
    pub prime: IdealHNF,
    pub norm_p: u64,
    pub p: u64,
    pub e0: usize,
    pub f: usize,
    pub k: usize,
    pub ring: Ring,
}

/// `O/n = prod O/p^k`. Elements are tuples of chain-ring elements; the
/// isomorphism back to `O/n` uses explicit idempotents.
#[derive(Clone, Debug)]
pub struct ResidueRing {
    pub modulus: IdealHNF,
    /// `(t, n)` with `w^2 = t w - n`; `None` over Q.
    pub w: Option<(i128, i128)>,
    pub factors: Vec<LocalFactor>,
    /// `idempotents[i] = 1` in factor `i`, `0` elsewhere.
    pub idempotents: Vec<QElt>,
}

/// Largest modulus for which the idempotents are found by scanning `O/n`.
const RESIDUE_LIMIT: u64 = 1 << 22;

impl ResidueRing {
    /// `Z/N`; the modulus is recorded as `N Z + w Z`.
    pub fn rational(n: u64) -> Result<ResidueRing> {
        let mut factors = Vec::new();
        let mut m = n;
        for p in prime_factors(n) {
            let mut k = 0;
            while m.is_multiple_of(p) {
                m /= p;
                k += 1;
            }
            let ring = Ring::build(&RingSpec::rational(p, k))?;
            factors.push(LocalFactor { prime: IdealHNF { a: p as i128, b: 0, c: 1 }, norm_p: p, p, e0: 1, f: 1, k, ring });
        }
        ResidueRing::assemble(IdealHNF { a: n as i128, b: 0, c: 1 }, None, factors)
    }

    pub fn quadratic(k: &QuadraticField, n: &IdealHNF) -> Result<ResidueRing> {
        let g = k.min_poly();
        let mut factors = Vec::new();
        for (pr, e) in k.factor_ideal(n)? {
            let spec = RingSpec::number_ring_at(&g, &pr.factor, pr.p, e as usize);
            let ring = Ring::build(&spec)?;
            factors.push(LocalFactor { prime: pr.ideal, norm_p: pr.norm(), p: pr.p, e0: pr.e0, f: pr.f, k: e as usize, ring });
        }
        ResidueRing::assemble(*n, Some(k.trace_norm_w()), factors)
    }

    fn assemble(modulus: IdealHNF, w: Option<(i128, i128)>, factors: Vec<LocalFactor>) -> Result<ResidueRing> {
        if modulus.norm() > RESIDUE_LIMIT {
            return Err(Error::TooLarge(format!("residue ring of size {}", modulus.norm())));
        }
        let mut rr = ResidueRing { modulus, w, factors, idempotents: Vec::new() };
        let size: u64 = rr.factors.iter().map(|f| f.ring.size()).product();
        if size != modulus.norm() {
            return Err(Error::verification(
                "residue_ring_size",
                serde_json::json!({"modulus": modulus.show(), "size": size}),
            ));
        }
        let m = rr.factors.len();
        let mut idem = vec![None; m];
        for v in modulus.residues() {
            let t = rr.reduce(v);
            let ones: Vec<usize> = (0..m).filter(|&i| t[i] == rr.factors[i].ring.one()).collect();
            if ones.len() == 1 && t.iter().enumerate().all(|(i, &x)| i == ones[0] || x == 0) && idem[ones[0]].is_none() {
                idem[ones[0]] = Some(v);
            }
        }
        rr.idempotents = idem.into_iter().map(|x| x.expect("CRT idempotent")).collect();
        Ok(rr)
    }

    pub fn size(&self) -> u64 {
        self.modulus.norm()
    }

    /// Image of `x + y w`.
    pub fn reduce(&self, v: QElt) -> Vec<El> {
        self.factors
            .iter()
            .map(|f| {
                // the characteristic divides the size
                let m = f.ring.size() as i128;
                let (x, y) = (v.x.rem_euclid(m) as i64, v.y.rem_euclid(m) as i64);
                match self.w {
                    None => f.ring.from_int(x),
                    Some(_) => f.ring.from_coords(&[x, y]),
                }
            })
            .collect()
    }

    pub fn one(&self) -> Vec<El> {
        self.factors.iter().map(|f| f.ring.one()).collect()
    }

    pub fn mul(&self, a: &[El], b: &[El]) -> Vec<El> {
        self.factors.iter().enumerate().map(|(i, f)| f.ring.mul(a[i], b[i])).collect()
    }

    fn mul_o(&self, a: QElt, b: QElt) -> QElt {
        match self.w {
            Some((t, n)) => {
                let yy = a.y * b.y;
                QElt::new(a.x * b.x - n * yy, a.x * b.y + a.y * b.x + t * yy)
            }
            None => QElt::int(a.x * b.x),
        }
    }

    /// The element of `O/n` (as its canonical representative) with the given components.
    pub fn lift(&self, comps: &[El]) -> QElt {
        let mut acc = QElt::int(0);
        for (i, f) in self.factors.iter().enumerate() {
            let c = f.ring.coords(comps[i]);
            let v = QElt::new(c[0] as i128, c.get(1).copied().unwrap_or(0) as i128);
            let e = self.idempotents[i];
            let prod = self.mul_o(e, v);
            acc = QElt::new(acc.x + prod.x, acc.y + prod.y);
        }
        self.modulus.reduce(acc)
    }
}

// ---------------------------------------------------------------------------
// Units

#[derive(Clone, Debug, Serialize)]
pub struct UnitData {
    pub d: i64,
    pub torsion: Vec<QElt>,
    /// Fundamental unit `> 1` (real fields).
    pub epsilon: Option<QElt>,
    pub epsilon_norm: Option<i128>,
    /// Generator of the totally positive units (real fields).
    pub totally_positive_gen: Option<QElt>,
    /// `[U+ : (O*)^2]` (real fields).
    pub u_plus_over_squares: Option<u64>,
}

/// Fundamental unit of a real field from the continued fraction of `w`.
pub fn fundamental_unit(k: &QuadraticField) -> Result<UnitData> {
    if !k.is_real() {
        return Err(Error::UnsupportedField(k.d));
    }
    // w = (P + sqrt D)/Q with Q | D - P^2
    let d = k.d as i128;
    let (mut pp, mut qq) = if k.one_mod_four() { (1i128, 2i128) } else { (0, 1) };
    let s = (d as f64).sqrt() as i128;
    let s = (s - 1..=s + 1).filter(|x| x * x <= d).max().unwrap();
    let (mut h0, mut h1) = (0i128, 1i128);
    let (mut k0, mut k1) = (1i128, 0i128);
    let mut unit = None;
    for _ in 0..200 {
        let a = Integer::div_floor(&(pp + s), &qq);
        (h0, h1) = (h1, a * h1 + h0);
        (k0, k1) = (k1, a * k1 + k0);
        let cand = QElt::new(h1, -k1);
        if k.norm(cand).abs() == 1 {
            unit = Some(cand);
            break;
        }
        pp = a * qq - pp;
        qq = (d - pp * pp) / qq;
    }
    let _ = (h0, k0);
    let u = unit.ok_or(Error::UnsupportedField(k.d))?;
    let eps = normalise_above_one(k, u);
    let n = k.norm(eps);
    let tp = if n == -1 {
        k.mul(eps, eps)
    } else if k.is_totally_positive(eps) {
        eps
    } else {
        k.neg(eps)
    };
    debug_assert!(k.is_totally_positive(tp));
    let index = if tp == k.mul(eps, eps) { 1 } else { 2 };
    Ok(UnitData {
        d: k.d,
        torsion: k.torsion_units(),
        epsilon: Some(eps),
        epsilon_norm: Some(n),
        totally_positive_gen: Some(tp),
        u_plus_over_squares: Some(index),
    })
}

pub fn unit_data(k: &QuadraticField) -> Result<UnitData> {
    if k.is_real() {
        fundamental_unit(k)
    } else {
        Ok(UnitData {
            d: k.d,
            torsion: k.torsion_units(),
            epsilon: None,
            epsilon_norm: None,
            totally_positive_gen: None,
            u_plus_over_squares: None,
        })
    }
}

/// The one of `+-u`, `+-u^-1` exceeding 1 in the first embedding.
fn normalise_above_one(k: &QuadraticField, u: QElt) -> QElt {
    let inv = {
        let c = k.conj(u);
        if k.norm(u) == 1 {
            c
        } else {
            k.neg(c)
        }
    };
    for c in [u, k.neg(u), inv, k.neg(inv)] {
        if k.signs(k.add(c, QElt::int(-1))).0 > 0 {
            return c;
        }
    }
    unreachable!("a nontrivial unit has a representative above 1")
}

/// Unit indices attached to a modulus.
#[derive(Clone, Debug, Serialize)]
pub struct ModulusUnits {
    /// Image of `O*` in `(O/n)*`, as component tuples.
    #[serde(skip)]
    pub image: Vec<Vec<El>>,
    /// `[O* : U_n]`.
    pub index_units: u64,
    /// Least `m > 0` with `eps^m = +-1 mod n` (real fields).
    pub eps_order_mod_sign: Option<u64>,
    /// `[U+ : U_n^2]` (real fields).
    pub u_plus_over_un_squared: Option<u64>,
    /// `[(O*)^2 : U_n^2]` (real fields).
    pub squares_over_un_squared: Option<u64>,
}

/// Generators of `O*` and the indices `[O*:U_n]`, `[U+:U_n^2]`.
pub fn modulus_units(units: &UnitData, rr: &ResidueRing) -> ModulusUnits {
    let mut gens: Vec<QElt> = units.torsion.clone();
    gens.extend(units.epsilon);
    let gen_images: Vec<Vec<El>> = gens.iter().map(|&g| rr.reduce(g)).collect();
    let image = closure_mul(rr, &gen_images);
    let index_units = image.len() as u64;
    let (eps_order_mod_sign, u_plus_over_un_squared, squares_over_un_squared) = match units.epsilon {
        Some(eps) => {
            let (one, minus, e) = (rr.one(), rr.reduce(QElt::int(-1)), rr.reduce(eps));
            let mut m = 1u64;
            let mut cur = e.clone();
            while cur != one && cur != minus {
                cur = rr.mul(&cur, &e);
                m += 1;
            }
            // U_n^2 = eps^(2m Z); U+ = eps^(2Z) or (+-eps)^Z.
            let up = if units.u_plus_over_squares == Some(1) { m } else { 2 * m };
            (Some(m), Some(up), Some(m))
        }
        None => (None, None, None),
    };
    ModulusUnits { image, index_units, eps_order_mod_sign, u_plus_over_un_squared, squares_over_un_squared }
}

fn closure_mul(rr: &ResidueRing, gens: &[Vec<El>]) -> Vec<Vec<El>> {
    let one = rr.one();
    let mut seen: HashSet<Vec<El>> = HashSet::from([one.clone()]);
    let mut out = vec![one];
    let mut i = 0;
    while i < out.len() {
        for g in gens {
            let prod = rr.mul(&out[i], g);
            if seen.insert(prod.clone()) {
                out.push(prod);
            }
        }
        i += 1;
    }
    out
}

#[cfg(test)]
mod tests;
