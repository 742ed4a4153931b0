//! Explicit subgroups `H <= SL_2(R_e)`, their congruence filtration and Lie images.
//!
//! A subgroup is stored as a level `L` together with its image `H_L` in
//! `SL_2(R_L)`; it is the full preimage of that image. `L = 0` is the whole
//! group. The level is always minimal, so `L` is the congruence level.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::chain_ring::{El, Ring, RingSpec};
use crate::error::{Error, Result};
use crate::finite_group::FiniteGroup;
use crate::sl2_local::{self as sl2, Mat2, MatSet};

/// Default closure cap for explicit generation.
pub const DEFAULT_CAP: usize = 2_000_000;

#[derive(Clone)]
pub struct Subgroup {
    ring: Ring,
    level: usize,
    /// `H_L` over `ring.level(L)`, sorted; empty when `L = 0`.
    image: Vec<Mat2>,
    set: Option<MatSet>,
    gens: OnceLock<Vec<Mat2>>,
}

impl std::fmt::Debug for Subgroup {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Subgroup({:?}, level {}, |H_L| = {})", self.ring, self.level, self.image.len())
    }
}

impl PartialEq for Subgroup {
    fn eq(&self, o: &Subgroup) -> bool {
        self.ring == o.ring && self.level == o.level && self.image == o.image
    }
}

/// Breadth-first closure of `gens` inside `SL_2(r)`.
pub fn closure(r: &Ring, gens: &[Mat2], cap: usize) -> Result<Vec<Mat2>> {
    if gens.iter().any(|g| !g.is_sl2(r)) {
        return Err(Error::DetNotOne);
    }
    let id = Mat2::identity(r);
    let mut set = MatSet::new(r);
    set.insert(id);
    let mut elems = vec![id];
    let mut i = 0;
    while i < elems.len() {
        let x = elems[i];
        for g in gens {
            let y = x.mul(r, g);
            if set.insert(y) {
                if elems.len() >= cap {
                    return Err(Error::CapExceeded(cap));
                }
                elems.push(y);
            }
        }
        i += 1;
    }
    elems.sort_unstable();
    Ok(elems)
}

/// Greedy generating set of the group `elems` (which must be a subgroup of `SL_2(r)`).
pub fn generating_set(r: &Ring, elems: &[Mat2]) -> Vec<Mat2> {
    let mut gens: Vec<Mat2> = Vec::new();
    let mut cur = MatSet::from_iter(r, [Mat2::identity(r)]);
    for &h in elems {
        if !cur.contains(&h) {
            gens.push(h);
            let c = closure(r, &gens, usize::MAX).expect("elements have determinant one");
            cur = MatSet::from_iter(r, c);
        }
    }
    gens
}

impl Subgroup {
    fn raw(ring: &Ring, level: usize, image: Vec<Mat2>) -> Subgroup {
        let set = (level > 0).then(|| MatSet::from_iter(&ring.level(level), image.iter().copied()));
        Subgroup { ring: ring.clone(), level, image, set, gens: OnceLock::new() }
    }

    /// Full preimage of `image <= SL_2(R_level)`, normalised to its congruence level.
    pub fn from_image(ring: &Ring, level: usize, mut image: Vec<Mat2>) -> Subgroup {
        let mut level = level.min(ring.e());
        image.sort_unstable();
        image.dedup();
        let q3 = ring.q().pow(3) as usize;
        while level > 0 {
            let rl = ring.level(level);
            if level == 1 {
                if image.len() as u128 == sl2::group_order(&rl) {
                    level = 0;
                    image.clear();
                }
                break;
            }
            let mut red: Vec<Mat2> = image.iter().map(|h| h.reduce(&rl, level - 1)).collect();
            red.sort_unstable();
            red.dedup();
            if image.len() != q3 * red.len() {
                break;
            }
            level -= 1;
            image = red;
        }
        Subgroup::raw(ring, level, image)
    }

    pub fn full(ring: &Ring) -> Subgroup {
        Subgroup::raw(ring, 0, Vec::new())
    }

    pub fn trivial(ring: &Ring) -> Subgroup {
        Subgroup::from_image(ring, ring.e(), vec![Mat2::identity(ring)])
    }

    /// `ker(G_e -> G_l)`; `l = 0` is the whole group.
    pub fn congruence_kernel(ring: &Ring, l: usize) -> Subgroup {
        if l == 0 {
            return Subgroup::full(ring);
        }
        Subgroup::from_image(ring, l, vec![Mat2::identity(&ring.level(l))])
    }

    /// Closure of explicit generators.
    pub fn generate(ring: &Ring, gens: &[Mat2], cap: usize) -> Result<Subgroup> {
        let elems = closure(ring, gens, cap)?;
        let s = Subgroup::from_image(ring, ring.e(), elems);
        if s.level == ring.e() {
            let _ = s.gens.set(gens.to_vec());
        }
        Ok(s)
    }

    /// A subgroup given by all of its elements (checked for closure).
    pub fn from_elements(ring: &Ring, elems: Vec<Mat2>) -> Result<Subgroup> {
        let gens = generating_set(ring, &elems);
        let cl = closure(ring, &gens, elems.len() + 1)?;
        let mut sorted = elems;
        sorted.sort_unstable();
        sorted.dedup();
        if cl != sorted {
            return Err(Error::NotASubgroup(format!("{} elements are not closed", sorted.len())));
        }
        Ok(Subgroup::from_image(ring, ring.e(), sorted))
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    /// The congruence level: least `j` with `ker(G_e -> G_j) <= H` (0 for `G_e`).
    pub fn congruence_level(&self) -> usize {
        self.level
    }

    /// `H` has exact level `e`.
    pub fn exact_level(&self) -> bool {
        self.level == self.ring.e()
    }

    /// The image `H_L` at the congruence level (empty for the whole group).
    pub fn image(&self) -> &[Mat2] {
        &self.image
    }

    pub fn order(&self) -> u128 {
        let r = &self.ring;
        if self.level == 0 {
            return sl2::group_order(r);
        }
        self.image.len() as u128 * (r.q() as u128).pow(3 * (r.e() - self.level) as u32)
    }

    pub fn index(&self) -> u128 {
        sl2::group_order(&self.ring) / self.order()
    }

    pub fn contains(&self, g: &Mat2) -> bool {
        match &self.set {
            None => true,
            Some(s) => s.contains(&g.reduce(&self.ring, self.level)),
        }
    }

    /// Every element of `H` over `R_e`.
    pub fn elements(&self) -> Vec<Mat2> {
        let r = &self.ring;
        if self.level == 0 {
            return sl2::sl2_elements(r);
        }
        let ker = sl2::kernel_elements(r, self.level);
        let mut out = Vec::with_capacity(self.image.len() * ker.len());
        for h in &self.image {
            let g = sl2::lift_sl2(r, h, self.level);
            out.extend(ker.iter().map(|k| g.mul(r, k)));
        }
        out
    }

    /// A generating set of `H` over `R_e`.
    pub fn generators(&self) -> &[Mat2] {
        self.gens.get_or_init(|| {
            let r = &self.ring;
            let mut g = sl2::kernel_generators(r, self.level);
            if self.level > 0 {
                let rl = r.level(self.level);
                g.extend(generating_set(&rl, &self.image).iter().map(|h| sl2::lift_sl2(r, h, self.level)));
            }
            g
        })
    }

    /// `H_j = rho_{e,j}(H)` as a subgroup of `SL_2(R_j)`.
    pub fn reduce_to(&self, j: usize) -> Subgroup {
        let rj = self.ring.level(j);
        if self.level == 0 {
            return Subgroup::full(&rj);
        }
        if j >= self.level {
            return Subgroup::raw(&rj, self.level, self.image.clone());
        }
        let rl = self.ring.level(self.level);
        Subgroup::from_image(&rj, j, self.image.iter().map(|h| h.reduce(&rl, j)).collect())
    }

    /// `N_j(H) = H ∩ ker(G_e -> G_{j-1})` for `j >= 1`.
    pub fn n_j(&self, j: usize) -> Subgroup {
        let r = &self.ring;
        if j <= 1 {
            return self.clone();
        }
        if j > self.level {
            return Subgroup::congruence_kernel(r, (j - 1).min(r.e()));
        }
        let rl = r.level(self.level);
        let img: Vec<Mat2> = self
            .image
            .iter()
            .filter(|h| sub_identity_val(&rl, h) >= j - 1)
            .copied()
            .collect();
        Subgroup::from_image(r, self.level, img)
    }

    /// `g^-1 H g`.
    pub fn conjugate(&self, g: &Mat2) -> Subgroup {
        if self.level == 0 {
            return self.clone();
        }
        let rl = self.ring.level(self.level);
        let gl = g.reduce(&self.ring, self.level);
        Subgroup::raw(&self.ring, self.level, {
            let mut v: Vec<Mat2> = self.image.iter().map(|h| h.conj_by(&rl, &gl)).collect();
            v.sort_unstable();
            v
        })
    }

    /// `|N_j|` for `1 <= j <= e + 1`.
    pub fn n_j_order(&self, j: usize) -> u128 {
        self.n_j(j).order()
    }

    /// Generators' entry coordinates plus the ring, for serialisation.
    pub fn to_json(&self) -> serde_json::Value {
        let r = &self.ring;
        json!({
            "ring": r.spec(),
            "level": self.level,
            "order": self.order().to_string(),
            "generators": self.generators().iter().map(|g| g.entries().iter().map(|&x| r.coords(x)).collect::<Vec<_>>()).collect::<Vec<_>>(),
        })
    }
}

/// Every subgroup of `SL_2(R_e)` (requires `|G_e| <= cap`).
pub fn enumerate_subgroups(ring: &Ring, cap: usize) -> Result<Vec<Subgroup>> {
    let order = sl2::group_order(ring);
    if order > cap as u128 {
        return Err(Error::GroupTooLarge { order, limit: cap as u128 });
    }
    let els = sl2::sl2_elements(ring);
    let g = FiniteGroup::from_elements(&els, |a, b| a.mul(ring, b));
    let subs = g.subgroups(cap)?;
    Ok(crate::par::map(&subs, |s| {
        let elems: Vec<Mat2> = s.elems.iter().map(|&i| els[i as usize]).collect();
        let h = Subgroup::from_image(ring, ring.e(), elems);
        let gens: Vec<Mat2> = s.gens.iter().map(|&i| els[i as usize]).collect();
        if h.level == ring.e() {
            let _ = h.gens.set(gens);
        }
        h
    }))
}

/// `v(x - I)`.
pub fn sub_identity_val(r: &Ring, x: &Mat2) -> usize {
    x.sub(r, &Mat2::identity(r)).valuation(r)
}

/// Serialised form: ring plus generators as entry coordinate vectors.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SubgroupSpec {
    pub ring: RingSpec,
    pub generators: Vec<[Vec<i64>; 4]>,
}

impl SubgroupSpec {
    pub fn build(&self, cap: usize) -> Result<Subgroup> {
        let r = Ring::build(&self.ring)?;
        let gens: Vec<Mat2> = self
            .generators
            .iter()
            .map(|m| Mat2::new(r.from_coords(&m[0]), r.from_coords(&m[1]), r.from_coords(&m[2]), r.from_coords(&m[3])))
            .collect();
        Subgroup::generate(&r, &gens, cap)
    }
}

// ---------------------------------------------------------------------------
// sl_2(F_q) coordinates

/// `a D + b E + c F = [[a, b], [c, -a]]` over the residue field.
pub type Sl2Vec = [El; 3];

/// `psi_j(x)`: the leading coefficient of `x - I` at `pi^(j-1)`, for `x` in `N_j`.
pub fn psi(r: &Ring, x: &Mat2, j: usize) -> Sl2Vec {
    let k = j - 1;
    let am1 = r.sub(x.a, r.one());
    [r.digit(am1, k), r.digit(x.b, k), r.digit(x.c, k)]
}

pub fn sl2_matrix(fq: &Ring, v: &Sl2Vec) -> Mat2 {
    Mat2::new(v[0], v[1], v[2], fq.neg(v[0]))
}

pub fn sl2_coords(m: &Mat2) -> Sl2Vec {
    [m.a, m.b, m.c]
}

pub fn sl2_bracket(fq: &Ring, a: &Sl2Vec, b: &Sl2Vec) -> Sl2Vec {
    sl2_coords(&sl2_matrix(fq, a).bracket(fq, &sl2_matrix(fq, b)))
}

pub fn sl2_scale(fq: &Ring, u: El, a: &Sl2Vec) -> Sl2Vec {
    [fq.mul(u, a[0]), fq.mul(u, a[1]), fq.mul(u, a[2])]
}

/// Nonzero and nilpotent.
pub fn is_nilpotent(fq: &Ring, a: &Sl2Vec) -> bool {
    let m = sl2_matrix(fq, a);
    *a != [0, 0, 0] && m.det(fq) == 0
}

/// A point `[x : y]` of `P^1(F_q)`.
pub type Line = (El, El);

/// `[1:0]` first, then `[t:1]` for `t` in `F_q`.
pub fn lines(fq: &Ring) -> Vec<Line> {
    std::iter::once((fq.one(), 0)).chain(fq.elements().map(|t| (t, fq.one()))).collect()
}

/// The nilpotent `E_l` with kernel `l` (`E_[1:0] = -E`).
pub fn nilpotent_for_line(fq: &Ring, (x, y): Line) -> Sl2Vec {
    [fq.mul(x, y), fq.neg(fq.mul(x, x)), fq.mul(y, y)]
}

/// Whether `a` is a nonzero multiple of `E_l`.
pub fn on_line(fq: &Ring, a: &Sl2Vec, l: Line) -> bool {
    is_nilpotent(fq, a) && sl2_matrix(fq, a).act(fq, l) == (0, 0)
}

// ---------------------------------------------------------------------------
// F_p-subspaces of F_q^3

/// An `F_p`-subspace of `F_p^n` in reduced row-echelon form.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FpSpace {
    pub p: u64,
    pub n: usize,
    pub rows: Vec<Vec<u8>>,
}

fn inv_mod(a: u64, p: u64) -> u64 {
    (1..p).find(|&x| a * x % p == 1).expect("nonzero mod p")
}

impl FpSpace {
    pub fn zero(p: u64, n: usize) -> FpSpace {
        FpSpace { p, n, rows: Vec::new() }
    }

    pub fn full(p: u64, n: usize) -> FpSpace {
        let rows = (0..n).map(|i| (0..n).map(|k| (i == k) as u8).collect()).collect();
        FpSpace { p, n, rows }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    fn pivot(row: &[u8]) -> usize {
        row.iter().position(|&x| x != 0).unwrap()
    }

    /// Residue of `v` modulo the span.
    fn reduce(&self, v: &[u8]) -> Vec<u8> {
        let p = self.p;
        let mut v = v.to_vec();
        for row in &self.rows {
            let pc = Self::pivot(row);
            let c = v[pc] as u64;
            if c != 0 {
                for (x, &y) in v.iter_mut().zip(row) {
                    *x = ((*x as u64 + p * p - c * y as u64) % p) as u8;
                }
            }
        }
        v
    }

    pub fn contains(&self, v: &[u8]) -> bool {
        self.reduce(v).iter().all(|&x| x == 0)
    }

    /// Add `v` to the span; true if the dimension grew.
    pub fn insert(&mut self, v: &[u8]) -> bool {
        let p = self.p;
        let mut w = self.reduce(v);
        let Some(pc) = w.iter().position(|&x| x != 0) else { return false };
        let s = inv_mod(w[pc] as u64, p);
        for x in w.iter_mut() {
            *x = ((*x as u64 * s) % p) as u8;
        }
        for row in self.rows.iter_mut() {
            let c = row[pc] as u64;
            if c != 0 {
                for (x, &y) in row.iter_mut().zip(&w) {
                    *x = ((*x as u64 + p * p - c * y as u64) % p) as u8;
                }
            }
        }
        self.rows.push(w);
        self.rows.sort_by_key(|r| Self::pivot(r));
        true
    }

    /// Every vector of the span (`p^dim` of them).
    pub fn elements(&self) -> Vec<Vec<u8>> {
        let mut out = vec![vec![0u8; self.n]];
        for row in &self.rows {
            let mut next = Vec::with_capacity(out.len() * self.p as usize);
            for v in &out {
                for c in 0..self.p {
                    next.push(v.iter().zip(row).map(|(&x, &y)| ((x as u64 + c * y as u64) % self.p) as u8).collect());
                }
            }
            out = next;
        }
        out
    }

    pub fn is_subspace_of(&self, o: &FpSpace) -> bool {
        self.rows.iter().all(|r| o.contains(r))
    }
}

/// `F_p` coordinates of an `sl_2(F_q)` vector (length `3f`).
pub fn to_fp(fq: &Ring, v: &Sl2Vec) -> Vec<u8> {
    v.iter().flat_map(|&x| fq.fq_digits(x)).collect()
}

pub fn from_fp(fq: &Ring, v: &[u8]) -> Sl2Vec {
    let f = fq.f();
    [fq.fq_from_digits(&v[..f]), fq.fq_from_digits(&v[f..2 * f]), fq.fq_from_digits(&v[2 * f..])]
}

// ---------------------------------------------------------------------------
// Lie image ladder

#[derive(Clone, Debug)]
pub struct LieLadder {
    /// `w[j]` for `j` in `2..=e` (indices 0 and 1 unused).
    pub w: Vec<FpSpace>,
    /// `|N_j|` for `j` in `1..=e+1`.
    pub n_orders: Vec<u128>,
    pub e: usize,
}

impl LieLadder {
    pub fn w(&self, j: usize) -> &FpSpace {
        &self.w[j]
    }
    pub fn d(&self, j: usize) -> usize {
        self.w[j].dim()
    }
}

impl Subgroup {
    /// `W_j = psi_j(N_j)` for every `j` in `[2, e]`.
    pub fn lie_ladder(&self) -> LieLadder {
        let r = &self.ring;
        let (e, p, f) = (r.e(), r.p(), r.f());
        let fq = r.residue_field();
        let mut w = vec![FpSpace::zero(p, 3 * f); e + 1];
        for (j, wj) in w.iter_mut().enumerate().skip(2) {
            if j > self.level {
                *wj = FpSpace::full(p, 3 * f);
            }
        }
        if self.level >= 2 {
            let rl = r.level(self.level);
            for h in &self.image {
                let v = sub_identity_val(&rl, h);
                let j = v + 1;
                if (2..=self.level).contains(&j) {
                    w[j].insert(&to_fp(&fq, &psi(&rl, h, j)));
                }
            }
        }
        let n_orders = (1..=e + 1).map(|j| if j == e + 1 { 1 } else { self.n_j_order(j) }).collect();
        LieLadder { w, n_orders, e }
    }

    /// `Lambda_j`: lines whose nilpotents meet `W_j`.
    pub fn bad_lines(&self, ladder: &LieLadder, j: usize) -> Result<Vec<Line>> {
        let r = &self.ring;
        if j < 2 || j > r.e() {
            return Err(Error::bad_level(j, 2, r.e()));
        }
        Ok(bad_lines_of(&r.residue_field(), ladder.w(j)))
    }

    /// `V_k = {a in F_q : a D in W_k}`.
    pub fn diagonal_slice(&self, ladder: &LieLadder, k: usize) -> Result<Vec<El>> {
        let r = &self.ring;
        if k < 2 || k > r.e() {
            return Err(Error::bad_level(k, 2, r.e()));
        }
        Ok(diagonal_slice_of(&r.residue_field(), ladder.w(k)))
    }
}

pub fn bad_lines_of(fq: &Ring, w: &FpSpace) -> Vec<Line> {
    lines(fq)
        .into_iter()
        .filter(|&l| meets_multiple(fq, w, &nilpotent_for_line(fq, l)))
        .collect()
}

pub fn diagonal_slice_of(fq: &Ring, w: &FpSpace) -> Vec<El> {
    fq.elements().filter(|&a| w.contains(&to_fp(fq, &[a, 0, 0]))).collect()
}

/// `W ∩ F_q^* a` is nonempty.
pub fn meets_multiple(fq: &Ring, w: &FpSpace, a: &Sl2Vec) -> bool {
    fq.elements().skip(1).any(|u| w.contains(&to_fp(fq, &sl2_scale(fq, u, a))))
}

/// `log_p` of a power of `p`.
pub fn log_p(p: u64, mut n: usize) -> usize {
    let mut k = 0;
    while n > 1 {
        n /= p as usize;
        k += 1;
    }
    k
}

// ---------------------------------------------------------------------------
// Lemma checks

impl Subgroup {
    /// Find `u` in `F_q^*` with `u A in W_{j+e0}`.
    pub fn propagation_witness(&self, ladder: &LieLadder, j: usize, a: &Sl2Vec) -> Result<El> {
        let r = &self.ring;
        let fq = r.residue_field();
        let e0 = r.e0();
        if !ladder.w(j).contains(&to_fp(&fq, a)) {
            return Err(Error::PreconditionUnmet(format!("A is not in W_{j}")));
        }
        let gate = (is_nilpotent(&fq, a) && j > e0) || j >= e0 + 2;
        if !gate || j + e0 > r.e() || j < 2 {
            return Err(Error::PreconditionUnmet(format!("propagation needs j >= e0 + 2 (or e0 + 1 for nilpotent A) and j + e0 <= e; j = {j}, e0 = {e0}, e = {}", r.e())));
        }
        fq.elements()
            .skip(1)
            .find(|&u| ladder.w(j + e0).contains(&to_fp(&fq, &sl2_scale(&fq, u, a))))
            .ok_or_else(|| {
                Error::verification(
                    "propagation",
                    json!({"subgroup": self.to_json(), "j": j, "A": a.to_vec()}),
                )
            })
    }

    /// `[W_j, W_k] <= W_{j+k-1}` on bases, and on the full spans when small.
    pub fn bracket_check(&self, ladder: &LieLadder, j: usize, k: usize) -> Result<()> {
        let r = &self.ring;
        if j < 2 || k < 2 || j + k - 1 > r.e() {
            return Err(Error::PreconditionUnmet(format!("bracket needs j, k >= 2 and j + k - 1 <= e (j={j}, k={k})")));
        }
        let fq = r.residue_field();
        let target = ladder.w(j + k - 1);
        let (wj, wk) = (ladder.w(j), ladder.w(k));
        let span = wj.elements().len() * wk.elements().len() <= 1 << 12;
        let (xs, ys) = if span { (wj.elements(), wk.elements()) } else { (wj.rows.clone(), wk.rows.clone()) };
        for a in &xs {
            for b in &ys {
                let c = sl2_bracket(&fq, &from_fp(&fq, a), &from_fp(&fq, b));
                if !target.contains(&to_fp(&fq, &c)) {
                    return Err(Error::verification(
                        "bracket",
                        json!({"subgroup": self.to_json(), "j": j, "k": k, "A": a, "B": b}),
                    ));
                }
            }
        }
        Ok(())
    }
}

/// Commutator words in the dyadic lemmas.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Word {
    /// `(x, y)`
    Z,
    /// `((x, y), x)`
    W,
    /// `(((x, y), x), x)`
    U,
    /// `((((x, y), x), x), x)`
    V,
}

#[derive(Clone, Debug, Serialize)]
pub struct DyadicOutcome {
    pub word: Mat2,
    pub level: usize,
    pub psi: Sl2Vec,
    pub predicted_level: usize,
    pub predicted_psi: Sl2Vec,
}

/// Evaluate a commutator word for `x in N_a`, `y in N_b` with
/// `psi_a(x) = alpha D + mu E` and `psi_b(y) = beta F`, and compare with the closed form.
pub fn dyadic_word(r: &Ring, x: &Mat2, y: &Mat2, a: usize, b: usize, word: Word) -> Result<DyadicOutcome> {
    let e = r.e();
    let nu = r.nu();
    let fail = |m: String| Err(Error::PreconditionUnmet(m));
    if r.p() != 2 {
        return fail("dyadic words need p = 2".into());
    }
    if !x.is_sl2(r) || !y.is_sl2(r) {
        return Err(Error::DetNotOne);
    }
    if a < nu + 2 || b < nu + 2 {
        return fail(format!("need a, b >= nu + 2 (a={a}, b={b}, nu={nu})"));
    }
    if a > e || b > e || sub_identity_val(r, x) + 1 < a || sub_identity_val(r, y) + 1 < b {
        return fail("x must lie in N_a and y in N_b".into());
    }
    let px = psi(r, x, a);
    let py = psi(r, y, b);
    let (alpha, mu) = (px[0], px[1]);
    let beta = py[2];
    if px[2] != 0 || mu == 0 || py[0] != 0 || py[1] != 0 || beta == 0 {
        return fail("need psi_a(x) = alpha D + mu E (mu != 0) and psi_b(y) = beta F (beta != 0)".into());
    }
    let fq = r.residue_field();
    let u0 = r.reduce_to(r.u0(), 1);
    let m = |xs: &[El]| xs.iter().fold(fq.one(), |acc, &t| fq.mul(acc, t));
    let l1 = 2 * a + b + nu - 2;
    let (level, predicted) = match word {
        Word::Z => (a + b - 1, [m(&[mu, beta]), 0, 0]),
        Word::W => (l1, { let s = m(&[u0, mu, beta]); [fq.mul(s, alpha), fq.mul(s, mu), 0] }),
        Word::U => (3 * a + b + 2 * nu - 3, [m(&[u0, u0, alpha, alpha, mu, beta]), 0, 0]),
        Word::V => (4 * a + b + 3 * nu - 4, {
            let s = m(&[u0, u0, u0, alpha, alpha, mu, beta]);
            [fq.mul(s, alpha), fq.mul(s, mu), 0]
        }),
    };
    if !matches!(word, Word::Z) && l1 > e {
        return fail(format!("need 2a + b + nu - 2 <= e ({l1} > {e})"));
    }
    if matches!(word, Word::U | Word::V) && alpha == 0 {
        return fail("need alpha != 0".into());
    }
    if matches!(word, Word::V) && a < 2 * nu + 2 {
        return fail(format!("need a >= 2 nu + 2 (a={a})"));
    }
    if level > e {
        return fail(format!("word level {level} exceeds e = {e}"));
    }
    let z = x.commutator(r, y);
    let wd = match word {
        Word::Z => z,
        Word::W => z.commutator(r, x),
        Word::U => z.commutator(r, x).commutator(r, x),
        Word::V => z.commutator(r, x).commutator(r, x).commutator(r, x),
    };
    let got_level = sub_identity_val(r, &wd) + 1;
    let got_psi = if got_level <= e { psi(r, &wd, got_level) } else { [0, 0, 0] };
    let out = DyadicOutcome { word: wd, level: got_level, psi: got_psi, predicted_level: level, predicted_psi: predicted };
    if got_level != level || got_psi != predicted {
        return Err(Error::verification(
            "dyadic_word",
            json!({
                "ring": r.spec(), "word": word, "a": a, "b": b,
                "x": x.entries().iter().map(|&t| r.coords(t)).collect::<Vec<_>>(),
                "y": y.entries().iter().map(|&t| r.coords(t)).collect::<Vec<_>>(),
                "level": got_level, "predicted_level": level,
                "psi": got_psi, "predicted_psi": predicted,
            }),
        ));
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Level statistics

#[derive(Clone, Debug, Serialize)]
pub struct LevelStats {
    pub e: usize,
    pub f: usize,
    pub nu: usize,
    pub e0: usize,
    pub p: u64,
    pub exact_level: bool,
    pub j1: usize,
    pub j2: usize,
    pub j: usize,
    pub j3: usize,
    pub j_star: usize,
    pub big_j: usize,
    pub pi_set: Vec<usize>,
    pub gamma: i64,
    /// `lambda[j]` for `j` in `2..=e`
    pub lambda: Vec<Vec<Line>>,
    /// `dim V_k` for `k` in `2..=e`
    pub v_dims: Vec<usize>,
    /// `W_k ∩ F_q^* F` nonempty, for `k` in `0..=e`
    pub meets_f: Vec<bool>,
}

impl LevelStats {
    pub fn from_ladder(h: &Subgroup, ladder: &LieLadder) -> LevelStats {
        let r = h.ring();
        let fq = r.residue_field();
        let (e, f, nu) = (r.e(), r.f(), r.nu());
        let one = fq.one();
        let ev = [0, one, 0];
        let fv = [0, 0, one];
        let mut meets_e = vec![false; e + 1];
        let mut meets_f = vec![false; e + 1];
        let mut lambda = vec![Vec::new(); e + 1];
        let mut v_dims = vec![0; e + 1];
        for k in 2..=e {
            meets_e[k] = meets_multiple(&fq, ladder.w(k), &ev);
            meets_f[k] = meets_multiple(&fq, ladder.w(k), &fv);
            lambda[k] = bad_lines_of(&fq, ladder.w(k));
            v_dims[k] = log_p(r.p(), diagonal_slice_of(&fq, ladder.w(k)).len());
        }
        let first = |m: &[bool]| (2..=e).find(|&k| m[k]).unwrap_or(e + 1);
        let j1 = first(&meets_e);
        let j2 = first(&meets_f);
        let j3 = (2..=e + 1).find(|&j| (j..=e).all(|k| meets_f[k])).unwrap();
        let j_star = j1.max(j3);
        let pi_set = (j2..=e).filter(|&k| !meets_f[k]).collect();
        LevelStats {
            e,
            f,
            nu,
            e0: r.e0(),
            p: r.p(),
            exact_level: h.exact_level(),
            j1,
            j2,
            j: j1.max(j2),
            j3,
            j_star,
            big_j: j_star.max(2 * nu + 1),
            pi_set,
            gamma: (e + nu + 1) as i64 - j2 as i64,
            lambda,
            v_dims,
            meets_f,
        }
    }

    fn in_pi(&self, k: usize) -> bool {
        self.pi_set.contains(&k)
    }

    fn small_v(&self, k: usize) -> bool {
        (2..=self.e).contains(&k) && self.v_dims[k] < self.f
    }

    /// `#{k in [max(j+s+1, j2), e] : dim V_k <= f-1, k+d+nu not in Pi}`
    pub fn c_lower(&self, j: usize, s: usize, d: usize) -> usize {
        ((j + s + 1).max(self.j2)..=self.e)
            .filter(|&k| self.small_v(k) && !self.in_pi(k + d + self.nu))
            .count()
    }

    /// `|Pi ∩ [j+s+d+nu+1, e]|`
    pub fn c_upper(&self, j: usize, s: usize, d: usize) -> usize {
        let lo = j + s + d + self.nu + 1;
        self.pi_set.iter().filter(|&&k| k >= lo).count()
    }

    /// `#{k in [max(j+s+1, j2), e] : dim V_k <= f-1}`
    pub fn c_hat(&self, j: usize, s: usize) -> usize {
        ((j + s + 1).max(self.j2)..=self.e).filter(|&k| self.small_v(k)).count()
    }

    /// `c0(K)`: levels in `[j+1, K]` with a small diagonal slice.
    pub fn c0(&self, k: usize) -> usize {
        (self.j + 1..=k).filter(|&t| self.small_v(t)).count()
    }

    /// `c0*(K)`: levels in `[J+1, K]` with a small diagonal slice.
    pub fn c0_star(&self, k: usize) -> usize {
        (self.big_j + 1..=k).filter(|&t| self.small_v(t)).count()
    }

    /// `K` values where the odd cross-level bound applies, with `(c0, bound numerator, denominator)`.
    pub fn c0_checks(&self) -> Vec<(usize, usize, usize, usize)> {
        if self.p == 2 || !self.exact_level {
            return Vec::new();
        }
        let m = self.j.max(self.e0 + 1);
        let lo = 2 * m + 2 * self.e0 + 1;
        let hi = self.e.saturating_sub(self.j);
        (lo..hi).map(|k| (k, self.c0(k), k - 2 * m, 2 * self.e0)).collect()
    }

    /// As [`Self::c0_checks`] for the dyadic bound on `c0*`.
    pub fn c0_star_checks(&self) -> Vec<(usize, usize, usize, usize)> {
        if self.p != 2 || !self.exact_level || self.nu == 0 {
            return Vec::new();
        }
        let lo = 2 * self.big_j + 2 * self.nu + 1;
        // K < (e + 4 - J - 10 nu) / 4
        let num = (self.e + 4) as i64 - self.big_j as i64 - 10 * self.nu as i64;
        (lo..)
            .take_while(|&k| 4 * (k as i64) < num)
            .map(|k| (k, self.c0_star(k), k - 2 * self.big_j - 2 * self.nu, 2 * self.nu))
            .collect()
    }
}

#[cfg(test)]
mod tests;
