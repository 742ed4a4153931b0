//! Finite chain rings `R_e = O_K / p^e`.
//!
//! Every presentation is realised the same way: `Z[theta]/(g)` modulo the
//! lattice of `p^e = (p, H(theta))^e`, where `H` is an irreducible factor of
//! `g mod p`. Elements are `u32` indices of canonical HNF representatives.

mod lattice;
pub(crate) mod poly;

use std::fmt;
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
pub(crate) use lattice::{Coords, Quotient, MAXN};

/// A ring element: index of its canonical representative.
pub type El = u32;

/// Rings at most this large get full addition/multiplication tables.
const TABLE_LIMIT: u64 = 512;
/// Rings at most this large get valuation/inverse/division tables.
const UNARY_TABLE_LIMIT: u64 = 1 << 16;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Presentation {
    /// `Z / p^e`.
    RationalPrimePower,
    /// Galois ring `GR(p^e, f)` with a monic lift of an irreducible residue polynomial.
    UnramifiedGaloisRing { residue_poly: Vec<i64> },
    /// `Z[theta]/(g)` completed at the prime `(p, factor(theta))`.
    NumberRingQuotient { poly: Vec<i64>, factor: Vec<i64> },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RingSpec {
    pub p: u64,
    pub e: usize,
    pub presentation: Presentation,
}

impl RingSpec {
    pub fn rational(p: u64, e: usize) -> RingSpec {
        RingSpec { p, e, presentation: Presentation::RationalPrimePower }
    }

    /// `GR(p^e, f)` using the least irreducible residue polynomial of degree `f`.
    pub fn galois(p: u64, f: usize, e: usize) -> Result<RingSpec> {
        if !poly::is_prime(p) {
            return Err(Error::NonPrimeP(p));
        }
        if f == 0 || f > MAXN {
            return Err(Error::UnsupportedPresentation(format!("residue degree {f}")));
        }
        if f == 1 {
            return Ok(RingSpec::rational(p, e));
        }
        let h = poly::least_irreducible(f, p);
        Ok(RingSpec {
            p,
            e,
            presentation: Presentation::UnramifiedGaloisRing {
                residue_poly: h.iter().map(|&c| c as i64).collect(),
            },
        })
    }

    /// Number ring quotient at the first prime factor of `g mod p`.
    pub fn number_ring(poly: &[i64], p: u64, e: usize) -> Result<RingSpec> {
        if !poly::is_prime(p) {
            return Err(Error::NonPrimeP(p));
        }
        let fac = poly::factor(&poly::reduce(poly, p), p);
        let h = fac
            .first()
            .ok_or_else(|| Error::UnsupportedPresentation("constant polynomial".into()))?;
        Ok(RingSpec::number_ring_at(poly, &h.0.iter().map(|&c| c as i64).collect::<Vec<_>>(), p, e))
    }

    pub fn number_ring_at(poly: &[i64], factor: &[i64], p: u64, e: usize) -> RingSpec {
        RingSpec {
            p,
            e,
            presentation: Presentation::NumberRingQuotient { poly: poly.to_vec(), factor: factor.to_vec() },
        }
    }

    pub fn with_length(&self, e: usize) -> RingSpec {
        RingSpec { e, ..self.clone() }
    }
}

impl fmt::Display for RingSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.presentation {
            Presentation::RationalPrimePower => write!(f, "p={},e={}", self.p, self.e),
            Presentation::UnramifiedGaloisRing { residue_poly } => {
                write!(f, "gr:p={},f={},e={}", self.p, residue_poly.len() - 1, self.e)
            }
            Presentation::NumberRingQuotient { poly, factor } => write!(
                f,
                "poly:\"{}\",p={},e={},factor=\"{}\"",
                poly_string(poly),
                self.p,
                self.e,
                poly_string(factor)
            ),
        }
    }
}

/// Render an integer polynomial (low -> high) as `x^2-2`.
pub fn poly_string(c: &[i64]) -> String {
    let mut s = String::new();
    for (i, &a) in c.iter().enumerate().rev() {
        if a == 0 {
            continue;
        }
        let sign = if a < 0 { "-" } else if s.is_empty() { "" } else { "+" };
        let mag = a.unsigned_abs();
        let body = match (i, mag) {
            (0, m) => m.to_string(),
            (1, 1) => "x".to_string(),
            (1, m) => format!("{m}x"),
            (k, 1) => format!("x^{k}"),
            (k, m) => format!("{m}x^{k}"),
        };
        s.push_str(sign);
        s.push_str(&body);
    }
    if s.is_empty() {
        s.push('0');
    }
    s
}

struct Tables {
    add: Vec<El>,
    mul: Vec<El>,
}

struct Unary {
    val: Vec<u8>,
    inv: Vec<El>,
    /// least-index `y` with `pi * y = x`, or `El::MAX`
    div_pi: Vec<El>,
}

pub struct RingInner {
    spec: RingSpec,
    p: u64,
    f: usize,
    e0: usize,
    e: usize,
    q: u64,
    /// `levels[v]` is `Z^n / L_v` for `v = 0..=e`; `levels[e]` is this ring.
    lattices: Vec<Quotient>,
    pi: El,
    pi_pow: Vec<El>,
    u0: El,
    residue_reps: Vec<El>,
    tables: Option<Tables>,
    unary: Option<Unary>,
    lower: Vec<OnceLock<Ring>>,
}

/// Shared, immutable handle to a chain ring.
#[derive(Clone)]
pub struct Ring(Arc<RingInner>);

impl fmt::Debug for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Ring({})", self.0.spec)
    }
}

impl PartialEq for Ring {
    fn eq(&self, other: &Ring) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.spec == other.0.spec
    }
}
impl Eq for Ring {}

fn mul_mod_g(n: usize, g: &[i128], m: i128, a: Coords, b: Coords) -> Coords {
    let mut prod = [0i128; 2 * MAXN];
    for i in 0..n {
        for j in 0..n {
            prod[i + j] = (prod[i + j] + a[i] * b[j]).rem_euclid(m);
        }
    }
    for d in (n..2 * n - 1).rev() {
        let c = prod[d];
        if c != 0 {
            for k in 0..n {
                prod[d - n + k] = (prod[d - n + k] - c * g[k]).rem_euclid(m);
            }
        }
    }
    let mut v = [0i128; MAXN];
    v[..n].copy_from_slice(&prod[..n]);
    v
}

fn theta_coords(n: usize, g: &[i128]) -> Coords {
    let mut v = [0i128; MAXN];
    if n > 1 {
        v[1] = 1;
    } else {
        v[0] = -g[0];
    }
    v
}

fn eval_at_theta(n: usize, g: &[i128], m: i128, poly: &[i128]) -> Coords {
    let th = theta_coords(n, g);
    let mut acc = [0i128; MAXN];
    for &c in poly.iter().rev() {
        acc = mul_mod_g(n, g, m, acc, th);
        acc[0] = (acc[0] + c).rem_euclid(m);
    }
    acc
}

/// Lattice of `(p, H(theta))^v` inside `Z[theta]/(g) = Z^n`.
fn prime_power_lattice(g: &[i128], h: &[i128], p: u64, v: usize) -> Quotient {
    let n = g.len() - 1;
    if v == 0 {
        return Quotient::new(g, &[], 1);
    }
    let m = (p as i128).pow(v as u32);
    let hth = eval_at_theta(n, g, m, h);
    let th = theta_coords(n, g);
    let mut hpow = vec![theta_unit(n)];
    for i in 1..=v {
        let prev = hpow[i - 1];
        hpow.push(mul_mod_g(n, g, m, prev, hth));
    }
    let mut gens = Vec::new();
    for i in 0..=v {
        let mut base = hpow[v - i];
        let pi = (p as i128).pow(i as u32);
        for c in base.iter_mut() {
            *c = (*c * pi).rem_euclid(m);
        }
        let mut cur = base;
        for _ in 0..n {
            gens.push(cur);
            cur = mul_mod_g(n, g, m, cur, th);
        }
    }
    Quotient::new(g, &gens, m)
}

fn theta_unit(_n: usize) -> Coords {
    let mut v = [0i128; MAXN];
    v[0] = 1;
    v
}

impl Ring {
    /// Construct `R_e` from its specification.
    pub fn build(spec: &RingSpec) -> Result<Ring> {
        let p = spec.p;
        if spec.e == 0 {
            return Err(Error::LengthZero);
        }
        if !poly::is_prime(p) {
            return Err(Error::NonPrimeP(p));
        }
        let (g, h, e0): (Vec<i64>, Vec<u64>, usize) = match &spec.presentation {
            Presentation::RationalPrimePower => (vec![0, 1], vec![0, 1], 1),
            Presentation::UnramifiedGaloisRing { residue_poly } => {
                check_monic(residue_poly)?;
                let h = poly::reduce(residue_poly, p);
                if !poly::is_irreducible(&h, p) {
                    return Err(Error::ReduciblePolynomial(p));
                }
                (residue_poly.clone(), h, 1)
            }
            Presentation::NumberRingQuotient { poly: g, factor } => {
                check_monic(g)?;
                let fac = poly::factor(&poly::reduce(g, p), p);
                let want = poly::reduce(factor, p);
                let (h, m) = fac
                    .iter()
                    .find(|(h, _)| *h == want)
                    .cloned()
                    .ok_or_else(|| Error::UnsupportedPresentation(format!(
                        "{} is not an irreducible factor of {} mod {p}",
                        poly_string(factor),
                        poly_string(g)
                    )))?;
                if poly::index_divisible_by_p(g, p) {
                    return Err(Error::IndexDivisibleByP(p));
                }
                (g.clone(), h, m)
            }
        };
        let n = g.len() - 1;
        if n > MAXN {
            return Err(Error::UnsupportedPresentation(format!("degree {n} > {MAXN}")));
        }
        let f = h.len() - 1;
        let q = p.pow(f as u32);
        let size_bits = (spec.e as f64) * (q as f64).log2();
        if size_bits > 31.5 {
            return Err(Error::TooLarge(format!("|R| = {q}^{}", spec.e)));
        }
        let g128: Vec<i128> = g.iter().map(|&c| c as i128).collect();
        let h128: Vec<i128> = h.iter().map(|&c| c as i128).collect();
        let lattices: Vec<Quotient> = (0..=spec.e).map(|v| prime_power_lattice(&g128, &h128, p, v)).collect();
        for (v, l) in lattices.iter().enumerate() {
            debug_assert_eq!(l.size, q.pow(v as u32), "lattice of p^{v} has the wrong index");
            if l.size != q.pow(v as u32) {
                return Err(Error::UnsupportedPresentation("prime-power lattice has the wrong index".into()));
            }
        }
        let (pi, size) = {
            let top = &lattices[spec.e];
            let pi_coords = if e0 == 1 {
                top.constant(p as i128)
            } else {
                eval_at_theta(n, &g128, top.modulus, &h128)
            };
            (top.encode(pi_coords), top.size)
        };
        let mut inner = RingInner {
            spec: spec.clone(),
            p,
            f,
            e0,
            e: spec.e,
            q,
            lattices,
            pi,
            pi_pow: Vec::new(),
            u0: 0,
            residue_reps: Vec::new(),
            tables: None,
            unary: None,
            lower: (1..spec.e).map(|_| OnceLock::new()).collect(),
        };
        if size <= TABLE_LIMIT {
            let top = &inner.lattices[spec.e];
            let s = size as usize;
            let mut add = vec![0; s * s];
            let mut mul = vec![0; s * s];
            for a in 0..s {
                let ca = top.decode(a as El);
                for b in 0..s {
                    let cb = top.decode(b as El);
                    add[a * s + b] = top.encode(top.add(ca, cb));
                    mul[a * s + b] = top.encode(top.mul(ca, cb));
                }
            }
            inner.tables = Some(Tables { add, mul });
        }
        let mut ring = Ring(Arc::new(inner));
        // powers of pi, residue representatives
        let mut pi_pow = vec![ring.one()];
        for v in 1..=spec.e {
            pi_pow.push(ring.mul(pi_pow[v - 1], pi));
        }
        let residue_reps: Vec<El> = (0..q as El).map(|y| ring.lift_from(y, 1)).collect();
        {
            let inner = Arc::get_mut(&mut ring.0).expect("unique during construction");
            inner.pi_pow = pi_pow;
            inner.residue_reps = residue_reps;
        }
        if size <= UNARY_TABLE_LIMIT {
            let s = size as usize;
            let val: Vec<u8> = (0..s).map(|x| ring.valuation_slow(x as El) as u8).collect();
            let mut div_pi = vec![El::MAX; s];
            for y in 0..s {
                let x = ring.mul(ring.0.pi, y as El) as usize;
                if div_pi[x] == El::MAX {
                    div_pi[x] = y as El;
                }
            }
            let units = ring.unit_count();
            let inv: Vec<El> = (0..s)
                .map(|x| if val[x] == 0 { ring.pow(x as El, units - 1) } else { El::MAX })
                .collect();
            let inner = Arc::get_mut(&mut ring.0).expect("unique during construction");
            inner.unary = Some(Unary { val, inv, div_pi });
        }
        // p = u0 * pi^e0; computed one level above e0 so it is always defined
        let u0 = if e0 < spec.e {
            ring.unit_decompose(ring.from_int(p as i64)).expect("p has valuation e0 < e").0
        } else {
            let big = Ring::build(&spec.with_length(e0 + 1))?;
            let u = big.unit_decompose(big.from_int(p as i64)).expect("p != 0 above e0").0;
            ring.lift_from(big.reduce_to(u, spec.e.min(e0 + 1)), spec.e.min(e0 + 1))
        };
        Arc::get_mut(&mut ring.0).expect("unique during construction").u0 = u0;
        Ok(ring)
    }

    fn top(&self) -> &Quotient {
        &self.0.lattices[self.0.e]
    }

    pub fn spec(&self) -> &RingSpec {
        &self.0.spec
    }
    pub fn p(&self) -> u64 {
        self.0.p
    }
    pub fn f(&self) -> usize {
        self.0.f
    }
    pub fn e0(&self) -> usize {
        self.0.e0
    }
    pub fn e(&self) -> usize {
        self.0.e
    }
    pub fn q(&self) -> u64 {
        self.0.q
    }
    /// `nu = v(2)`: `e0` when `p = 2`, else 0.
    pub fn nu(&self) -> usize {
        if self.0.p == 2 {
            self.0.e0
        } else {
            0
        }
    }
    pub fn size(&self) -> u64 {
        self.top().size
    }
    pub fn zero(&self) -> El {
        0
    }
    pub fn one(&self) -> El {
        self.from_int(1)
    }
    pub fn pi(&self) -> El {
        self.0.pi
    }
    /// `pi^v`, zero for `v >= e`.
    pub fn pi_pow(&self, v: usize) -> El {
        if v >= self.0.e {
            0
        } else {
            self.0.pi_pow[v]
        }
    }
    /// The unit `u0` with `p = u0 * pi^e0`.
    pub fn u0(&self) -> El {
        self.0.u0
    }
    /// Number of units `(q-1) q^(e-1)`.
    pub fn unit_count(&self) -> u64 {
        (self.0.q - 1) * self.0.q.pow(self.0.e as u32 - 1)
    }
    pub fn elements(&self) -> impl Iterator<Item = El> {
        0..self.size() as El
    }
    /// Canonical representatives of the residue field, indexed by `F_q` index.
    pub fn residue_reps(&self) -> &[El] {
        &self.0.residue_reps
    }

    pub fn from_int(&self, c: i64) -> El {
        self.top().encode(self.top().constant(c as i128))
    }
    pub fn theta(&self) -> El {
        self.top().encode(self.top().theta())
    }
    pub fn from_coords(&self, c: &[i64]) -> El {
        let mut v = [0i128; MAXN];
        for (k, &x) in c.iter().enumerate().take(self.top().n) {
            v[k] = x as i128;
        }
        self.top().encode(v)
    }
    /// Canonical coordinates (in the power basis of theta).
    pub fn coords(&self, x: El) -> Vec<i64> {
        let c = self.top().decode(x);
        c[..self.top().n].iter().map(|&v| v as i64).collect()
    }

    #[inline]
    pub fn add(&self, a: El, b: El) -> El {
        match &self.0.tables {
            Some(t) => t.add[a as usize * self.size() as usize + b as usize],
            None => {
                let q = self.top();
                q.encode(q.add(q.decode(a), q.decode(b)))
            }
        }
    }
    #[inline]
    pub fn mul(&self, a: El, b: El) -> El {
        match &self.0.tables {
            Some(t) => t.mul[a as usize * self.size() as usize + b as usize],
            None => {
                let q = self.top();
                q.encode(q.mul(q.decode(a), q.decode(b)))
            }
        }
    }
    #[inline]
    pub fn neg(&self, a: El) -> El {
        let q = self.top();
        q.encode(q.neg(q.decode(a)))
    }
    #[inline]
    pub fn sub(&self, a: El, b: El) -> El {
        self.add(a, self.neg(b))
    }
    pub fn pow(&self, a: El, mut k: u64) -> El {
        let mut r = self.one();
        let mut b = a;
        while k > 0 {
            if k & 1 == 1 {
                r = self.mul(r, b);
            }
            b = self.mul(b, b);
            k >>= 1;
        }
        r
    }

    pub fn is_unit(&self, a: El) -> bool {
        self.valuation(a) == 0
    }

    pub fn inv(&self, a: El) -> Result<El> {
        if !self.is_unit(a) {
            return Err(Error::NotAUnit);
        }
        Ok(match &self.0.unary {
            Some(u) => u.inv[a as usize],
            None => self.pow(a, self.unit_count() - 1),
        })
    }

    fn valuation_slow(&self, a: El) -> usize {
        let c = self.top().decode(a);
        for v in 1..=self.0.e {
            if !self.0.lattices[v].is_zero(c) {
                return v - 1;
            }
        }
        self.0.e
    }

    /// Largest `v` with `a` in `pi^v R`; `e` exactly for zero.
    #[inline]
    pub fn valuation(&self, a: El) -> usize {
        match &self.0.unary {
            Some(u) => u.val[a as usize] as usize,
            None => self.valuation_slow(a),
        }
    }

    /// Reduction `R_e -> R_j` (`j <= e`), as an element of `self.level(j)`.
    pub fn reduce_to(&self, a: El, j: usize) -> El {
        let l = &self.0.lattices[j.min(self.0.e)];
        l.encode(self.top().decode(a))
    }

    /// Canonical section `R_j -> R_e` (same coordinates, re-reduced).
    pub fn lift_from(&self, a: El, j: usize) -> El {
        let l = &self.0.lattices[j.min(self.0.e)];
        self.top().encode(l.decode(a))
    }

    /// Checked reduction for the public API.
    pub fn reduce(&self, a: El, j: usize) -> Result<El> {
        if j == 0 || j > self.0.e {
            return Err(Error::bad_level(j, 1, self.0.e));
        }
        Ok(self.reduce_to(a, j))
    }

    /// The ring `R_j` for `1 <= j <= e`.
    pub fn level(&self, j: usize) -> Ring {
        assert!(j >= 1 && j <= self.0.e, "level {j} outside [1, {}]", self.0.e);
        if j == self.0.e {
            return self.clone();
        }
        self.0.lower[j - 1]
            .get_or_init(|| Ring::build(&self.0.spec.with_length(j)).expect("lower levels of a valid ring are valid"))
            .clone()
    }

    pub fn residue_field(&self) -> Ring {
        self.level(1)
    }

    /// Canonical `y` with `pi^k y = a`: the section of the unique class in `R_{e-k}`.
    pub fn div_pi_pow(&self, a: El, k: usize) -> Option<El> {
        let e = self.0.e;
        if self.valuation(a) < k {
            return None;
        }
        if k == 0 {
            return Some(a);
        }
        if k >= e {
            return Some(0);
        }
        let y = match &self.0.unary {
            Some(u) => {
                let mut y = a;
                for _ in 0..k {
                    y = u.div_pi[y as usize];
                    debug_assert!(y != El::MAX);
                }
                y
            }
            None => self.div_by_digits(a, k),
        };
        Some(self.lift_from(self.reduce_to(y, e - k), e - k))
    }

    /// Long division by `pi^k` using a `pi`-adic expansion with residue digits.
    fn div_by_digits(&self, a: El, k: usize) -> El {
        let e = self.0.e;
        let mut r = a;
        let mut y = 0;
        for i in 0..e - k {
            let lvl = k + i;
            if self.valuation(r) > lvl {
                continue;
            }
            let found = self.0.residue_reps[1..].iter().copied().find_map(|c| {
                let t = self.sub(r, self.mul(c, self.pi_pow(lvl)));
                (self.valuation(t) > lvl).then_some((c, t))
            });
            let (c, t) = found.expect("every class has a residue digit");
            r = t;
            y = self.add(y, self.mul(c, self.pi_pow(i)));
        }
        y
    }

    /// Residue of `a / pi^k` in `F_q` (index in the residue field); `a` must lie in `pi^k R`.
    pub fn digit(&self, a: El, k: usize) -> El {
        let e = self.0.e;
        debug_assert!(k < e);
        let v = self.valuation(a);
        if v > k {
            return 0;
        }
        assert_eq!(v, k, "digit requires a in pi^k R");
        if self.0.unary.is_some() {
            let y = self.div_pi_pow(a, k).unwrap();
            return self.reduce_to(y, 1);
        }
        let idx = self.0.residue_reps[1..]
            .iter()
            .position(|&c| self.valuation(self.sub(a, self.mul(c, self.pi_pow(k)))) > k)
            .expect("every class has a residue digit");
        (idx + 1) as El
    }

    /// `a = u * pi^v` with `u` a canonical unit, or `None` for zero.
    pub fn unit_decompose(&self, a: El) -> Option<(El, usize)> {
        let v = self.valuation(a);
        if v == self.0.e {
            return None;
        }
        let y = self.div_pi_pow(a, v).expect("valuation was checked");
        Some((y, v))
    }

    /// Base-`p` digits of a residue-field index (length `f`).
    pub fn fq_digits(&self, y: El) -> Vec<u8> {
        let mut x = y as u64;
        (0..self.0.f)
            .map(|_| {
                let d = (x % self.0.p) as u8;
                x /= self.0.p;
                d
            })
            .collect()
    }

    pub fn fq_from_digits(&self, d: &[u8]) -> El {
        d.iter().rev().fold(0u64, |acc, &x| acc * self.0.p + x as u64) as El
    }

    /// Render an element by its coordinates, e.g. `3+2t`.
    pub fn show(&self, a: El) -> String {
        let c = self.coords(a);
        if c.len() == 1 {
            return c[0].to_string();
        }
        let mut parts = Vec::new();
        for (k, &x) in c.iter().enumerate() {
            if x == 0 {
                continue;
            }
            parts.push(match k {
                0 => x.to_string(),
                1 => format!("{x}t"),
                _ => format!("{x}t^{k}"),
            });
        }
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join("+")
        }
    }
}

/// The additive coset `rep + pi^m R` (`m = e` is a single point).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Coset {
    pub rep: El,
    pub m: usize,
}

impl Ring {
    /// All `t` with `a + b t = 0`.
    pub fn solve_affine(&self, a: El, b: El) -> Option<Coset> {
        let e = self.0.e;
        let k = self.valuation(b);
        if k == e {
            return (a == 0).then_some(Coset { rep: 0, m: 0 });
        }
        if self.valuation(a) < k {
            return None;
        }
        let (ub, _) = self.unit_decompose(b)?;
        let a1 = self.div_pi_pow(a, k)?;
        let t = self.neg(self.mul(a1, self.inv(ub).ok()?));
        Some(Coset { rep: self.lift_from(self.reduce_to(t, e - k), e - k), m: e - k })
    }

    pub fn intersect(&self, x: Coset, y: Coset) -> Option<Coset> {
        let (lo, hi) = if x.m <= y.m { (x, y) } else { (y, x) };
        (self.valuation(self.sub(hi.rep, lo.rep)) >= lo.m).then_some(hi)
    }

    /// `|pi^m R| = q^(e-m)`.
    pub fn coset_size(&self, c: Coset) -> u64 {
        self.0.q.pow((self.0.e - c.m) as u32)
    }

    /// Elements of `pi^m R`, as `pi^m` times sections of `R_{e-m}`.
    pub fn ideal_elements(&self, m: usize) -> Vec<El> {
        let e = self.0.e;
        if m >= e {
            return vec![0];
        }
        if m == 0 {
            return self.elements().collect();
        }
        let lower = self.level(e - m);
        let pm = self.pi_pow(m);
        lower.elements().map(|y| self.mul(pm, self.lift_from(y, e - m))).collect()
    }

    pub fn coset_elements(&self, c: Coset) -> Vec<El> {
        self.ideal_elements(c.m).into_iter().map(|z| self.add(c.rep, z)).collect()
    }
}

fn check_monic(g: &[i64]) -> Result<()> {
    if g.len() < 2 || *g.last().unwrap() != 1 {
        return Err(Error::UnsupportedPresentation(format!("{} is not monic of positive degree", poly_string(g))));
    }
    Ok(())
}
