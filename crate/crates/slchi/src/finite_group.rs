//! Small finite groups given by multiplication tables, their subgroup
//! lattices, and the double-coset ratio `|H\Q/U| / [Q:H]`.

use std::collections::HashMap;
use std::hash::Hash;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde_json::json;

use crate::error::{Error, Result};
use crate::par;

pub type Gid = u32;

/// Fixed-width bitset over group element indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Bits(Vec<u64>);

impl Bits {
    pub fn new(n: usize) -> Bits {
        Bits(vec![0; n.div_ceil(64)])
    }
    #[inline]
    pub fn contains(&self, i: Gid) -> bool {
        self.0[i as usize / 64] >> (i % 64) & 1 == 1
    }
    #[inline]
    pub fn insert(&mut self, i: Gid) -> bool {
        let w = &mut self.0[i as usize / 64];
        let fresh = *w >> (i % 64) & 1 == 0;
        *w |= 1 << (i % 64);
        fresh
    }
    pub fn count(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }
    pub fn is_subset(&self, o: &Bits) -> bool {
        self.0.iter().zip(&o.0).all(|(a, b)| a & !b == 0)
    }
    pub fn iter(&self) -> impl Iterator<Item = Gid> + '_ {
        self.0.iter().enumerate().flat_map(|(k, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let t = w.trailing_zeros();
                w &= w - 1;
                Some(k as Gid * 64 + t)
            })
        })
    }
}

/// A subgroup of a [`FiniteGroup`]: element bitset, sorted elements and a generating set.
#[derive(Clone, Debug)]
pub struct SubgroupBits {
    pub bits: Bits,
    pub elems: Vec<Gid>,
    pub gens: Vec<Gid>,
}

impl SubgroupBits {
    pub fn order(&self) -> usize {
        self.elems.len()
    }
    pub fn contains(&self, g: Gid) -> bool {
        self.bits.contains(g)
    }
}

#[derive(Clone, Debug)]
pub struct FiniteGroup {
    n: usize,
    table: Vec<Gid>,
    inv: Vec<Gid>,
    id: Gid,
}

impl FiniteGroup {
    /// Index `elems` and tabulate `mul`; `elems` must be closed under it.
    pub fn from_elements<T, F>(elems: &[T], mul: F) -> FiniteGroup
    where
        T: Eq + Hash + Sync,
        F: Fn(&T, &T) -> T + Sync,
    {
        let n = elems.len();
        let index: HashMap<&T, Gid> = elems.iter().enumerate().map(|(i, x)| (x, i as Gid)).collect();
        let rows = par::map_range(n, |i| {
            elems
                .iter()
                .map(|y| *index.get(&mul(&elems[i], y)).expect("element set is closed"))
                .collect::<Vec<Gid>>()
        });
        let table: Vec<Gid> = rows.into_iter().flatten().collect();
        FiniteGroup::from_table(n, table)
    }

    pub fn from_table(n: usize, table: Vec<Gid>) -> FiniteGroup {
        let id = (0..n)
            .find(|&e| (0..n).all(|x| table[e * n + x] as usize == x))
            .expect("group has an identity") as Gid;
        let inv = (0..n)
            .map(|x| (0..n).find(|&y| table[x * n + y] == id).expect("every element is invertible") as Gid)
            .collect();
        FiniteGroup { n, table, inv, id }
    }

    pub fn order(&self) -> usize {
        self.n
    }
    pub fn identity(&self) -> Gid {
        self.id
    }
    #[inline]
    pub fn mul(&self, a: Gid, b: Gid) -> Gid {
        self.table[a as usize * self.n + b as usize]
    }
    #[inline]
    pub fn inv(&self, a: Gid) -> Gid {
        self.inv[a as usize]
    }

    pub fn direct_product(&self, o: &FiniteGroup) -> FiniteGroup {
        let n = self.n * o.n;
        let mut table = vec![0; n * n];
        for a in 0..n {
            for b in 0..n {
                let (a1, a2) = (a / o.n, a % o.n);
                let (b1, b2) = (b / o.n, b % o.n);
                let c1 = self.mul(a1 as Gid, b1 as Gid) as usize;
                let c2 = o.mul(a2 as Gid, b2 as Gid) as usize;
                table[a * n + b] = (c1 * o.n + c2) as Gid;
            }
        }
        FiniteGroup { n, table, inv: (0..n as Gid).map(|x| {
            let (x1, x2) = (x as usize / o.n, x as usize % o.n);
            (self.inv(x1 as Gid) as usize * o.n + o.inv(x2 as Gid) as usize) as Gid
        }).collect(), id: (self.id as usize * o.n + o.id as usize) as Gid }
    }

    /// Index of `(a, b)` in `self x o`.
    pub fn pair(&self, o: &FiniteGroup, a: Gid, b: Gid) -> Gid {
        (a as usize * o.n + b as usize) as Gid
    }

    /// Subgroup generated by `gens`.
    pub fn closure(&self, gens: &[Gid]) -> SubgroupBits {
        self.extend(&self.trivial(), gens)
    }

    pub fn trivial(&self) -> SubgroupBits {
        let mut bits = Bits::new(self.n);
        bits.insert(self.id);
        SubgroupBits { bits, elems: vec![self.id], gens: Vec::new() }
    }

    pub fn whole(&self) -> SubgroupBits {
        let gens = self.small_generating_set(&(0..self.n as Gid).collect::<Vec<_>>());
        self.closure(&gens)
    }

    /// `<s, extra>`, by breadth-first closure under right multiplication by generators.
    pub fn extend(&self, s: &SubgroupBits, extra: &[Gid]) -> SubgroupBits {
        let mut gens = s.gens.clone();
        for &g in extra {
            if !gens.contains(&g) && g != self.id {
                gens.push(g);
            }
        }
        let mut bits = s.bits.clone();
        let mut elems = s.elems.clone();
        let mut frontier: Vec<Gid> = elems.clone();
        // elements of s times old generators stay in s; only new generators matter at first
        let new_gens: Vec<Gid> = extra.iter().copied().filter(|&g| !s.bits.contains(g)).collect();
        if new_gens.is_empty() {
            return SubgroupBits { bits, elems, gens: s.gens.clone() };
        }
        let mut first = true;
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for &x in &frontier {
                let gs: &[Gid] = if first { &new_gens } else { &gens };
                for &g in gs {
                    let y = self.mul(x, g);
                    if bits.insert(y) {
                        next.push(y);
                    }
                }
            }
            first = false;
            elems.extend_from_slice(&next);
            frontier = next;
        }
        elems.sort_unstable();
        SubgroupBits { bits, elems, gens }
    }

    /// Greedy generating set for the subgroup spanned by `elems`.
    pub fn small_generating_set(&self, elems: &[Gid]) -> Vec<Gid> {
        let mut cur = self.trivial();
        for &g in elems {
            if !cur.contains(g) {
                cur = self.extend(&cur, &[g]);
            }
        }
        cur.gens
    }

    /// Build a subgroup from an element list, checking closure.
    pub fn subgroup_from_elements(&self, elems: &[Gid]) -> Result<SubgroupBits> {
        let gens = self.small_generating_set(elems);
        let s = self.closure(&gens);
        if s.order() != {
            let mut v = elems.to_vec();
            v.sort_unstable();
            v.dedup();
            v.len()
        } {
            return Err(Error::NotASubgroup(format!("{} elements do not form a subgroup", elems.len())));
        }
        Ok(s)
    }

    pub fn element_order(&self, g: Gid) -> usize {
        let mut k = 1;
        let mut x = g;
        while x != self.id {
            x = self.mul(x, g);
            k += 1;
        }
        k
    }

    /// Every subgroup, by closing the cyclic subgroups under joins.
    pub fn subgroups(&self, cap: usize) -> Result<Vec<SubgroupBits>> {
        if self.n > cap {
            return Err(Error::GroupTooLarge { order: self.n as u128, limit: cap as u128 });
        }
        // one generator per cyclic subgroup
        let mut seen_cyclic = std::collections::HashSet::new();
        let mut cyclic_gens = Vec::new();
        let mut all: HashMap<Bits, SubgroupBits> = HashMap::new();
        for g in 0..self.n as Gid {
            let c = self.closure(&[g]);
            if seen_cyclic.insert(c.bits.clone()) {
                cyclic_gens.push(g);
                all.insert(c.bits.clone(), c);
            }
        }
        let mut frontier: Vec<Bits> = all.keys().cloned().collect();
        frontier.sort();
        while !frontier.is_empty() {
            let found: Vec<Vec<SubgroupBits>> = par::map(&frontier, |b| {
                let s = &all[b];
                let mut local: HashMap<Bits, SubgroupBits> = HashMap::new();
                for &g in &cyclic_gens {
                    if s.contains(g) {
                        continue;
                    }
                    let t = self.extend(s, &[g]);
                    local.entry(t.bits.clone()).or_insert(t);
                }
                local.into_values().collect()
            });
            let mut next = Vec::new();
            for t in found.into_iter().flatten() {
                if !all.contains_key(&t.bits) {
                    next.push(t.bits.clone());
                    all.insert(t.bits.clone(), t);
                }
            }
            next.sort();
            frontier = next;
        }
        let mut out: Vec<SubgroupBits> = all.into_values().collect();
        out.sort_by(|a, b| a.order().cmp(&b.order()).then_with(|| a.elems.cmp(&b.elems)));
        Ok(out)
    }

    /// Left cosets `qU`, as a coset id per element and the number of cosets.
    pub fn left_cosets(&self, u: &SubgroupBits) -> (Vec<u32>, usize) {
        let mut id = vec![u32::MAX; self.n];
        let mut k = 0;
        for q in 0..self.n as Gid {
            if id[q as usize] == u32::MAX {
                for &x in &u.elems {
                    id[self.mul(q, x) as usize] = k;
                }
                k += 1;
            }
        }
        (id, k as usize)
    }

    /// `|H\Q/U|` by union-find over the cosets `Q/U` under the generators of `H`.
    pub fn double_coset_count(&self, h: &SubgroupBits, u: &SubgroupBits) -> usize {
        let (id, k) = self.left_cosets(u);
        let mut uf = UnionFind::new(k);
        for q in 0..self.n as Gid {
            for &g in &h.gens {
                uf.union(id[q as usize] as usize, id[self.mul(g, q) as usize] as usize);
            }
        }
        uf.components()
    }

    /// `sum_{h in H} |(Q/U)^h|`.
    pub fn burnside_sum(&self, h: &SubgroupBits, u: &SubgroupBits) -> u64 {
        let fixed = par::map(&h.elems, |&x| {
            (0..self.n as Gid)
                .filter(|&q| u.contains(self.mul(self.mul(self.inv(q), x), q)))
                .count() as u64
        });
        fixed.iter().sum::<u64>() / u.order() as u64
    }

    /// `chi_{Q,U}(H) = |H\Q/U| / [Q:H]`, computed by orbits and by Burnside.
    pub fn chi(&self, u: &SubgroupBits, h: &SubgroupBits) -> Result<BigRational> {
        for (name, s) in [("U", u), ("H", h)] {
            if self.closure(&s.gens).order() != s.order() {
                return Err(Error::NotASubgroup(name.into()));
            }
        }
        let orbits = self.double_coset_count(h, u);
        let burnside = self.burnside_sum(h, u);
        let index = self.n / h.order();
        let by_orbits = BigRational::new(BigInt::from(orbits), BigInt::from(index));
        let by_burnside = BigRational::new(BigInt::from(burnside), BigInt::from(self.n));
        if by_orbits != by_burnside {
            return Err(Error::verification(
                "chi_double_coset",
                json!({"orbits": orbits, "burnside_sum": burnside, "order": self.n, "h": h.elems}),
            ));
        }
        Ok(by_orbits)
    }

    /// Image of `h` under a projection given as an element map.
    pub fn image(&self, target: &FiniteGroup, h: &SubgroupBits, f: impl Fn(Gid) -> Gid) -> SubgroupBits {
        let imgs: Vec<Gid> = h.gens.iter().map(|&g| f(g)).collect();
        target.closure(&imgs)
    }
}

/// Union-find with path halving; roots are the least element of each class.
#[derive(Clone, Debug)]
pub struct UnionFind {
    parent: Vec<u32>,
}

impl UnionFind {
    pub fn new(n: usize) -> UnionFind {
        UnionFind { parent: (0..n as u32).collect() }
    }
    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] as usize != x {
            let g = self.parent[self.parent[x] as usize];
            self.parent[x] = g;
            x = g as usize;
        }
        x
    }
    pub fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo as u32;
        }
    }
    pub fn components(&mut self) -> usize {
        (0..self.parent.len()).filter(|&x| self.find(x) == x).count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Symmetric group on 3 points, as permutations.
    fn s3() -> FiniteGroup {
        let mut perms = Vec::new();
        for a in 0..3u8 {
            for b in 0..3u8 {
                for c in 0..3u8 {
                    if a != b && b != c && a != c {
                        perms.push([a, b, c]);
                    }
                }
            }
        }
        FiniteGroup::from_elements(&perms, |p, q| [p[q[0] as usize], p[q[1] as usize], p[q[2] as usize]])
    }

    fn cyclic(n: u32) -> FiniteGroup {
        let els: Vec<u32> = (0..n).collect();
        FiniteGroup::from_elements(&els, |a, b| (a + b) % n)
    }

    #[test]
    fn s3_lattice() {
        let g = s3();
        let subs = g.subgroups(1000).unwrap();
        let orders: Vec<usize> = subs.iter().map(|s| s.order()).collect();
        assert_eq!(orders, vec![1, 2, 2, 2, 3, 6]);
    }

    #[test]
    fn cyclic_lattices_match_divisor_counts() {
        for n in [1u32, 6, 12, 30] {
            let subs = cyclic(n).subgroups(1000).unwrap();
            assert_eq!(subs.len(), (1..=n).filter(|d| n % d == 0).count());
        }
    }

    #[test]
    fn cap_is_enforced() {
        assert!(matches!(cyclic(12).subgroups(10), Err(Error::GroupTooLarge { .. })));
    }

    #[test]
    fn chi_extremes() {
        let g = s3();
        let whole = g.whole();
        let one = g.trivial();
        let u = g.closure(&[1]);
        assert_eq!(g.chi(&u, &whole).unwrap(), BigRational::from_integer(1.into()));
        // H = 1: |Q/U| / |Q| = 1/|U|
        assert_eq!(g.chi(&u, &one).unwrap(), BigRational::new(1.into(), BigInt::from(u.order())));
        // U = Q: chi = 1/[Q:H]
        assert_eq!(g.chi(&whole, &u).unwrap(), BigRational::new(1.into(), 3.into()));
    }

    #[test]
    fn not_a_subgroup() {
        let g = cyclic(6);
        assert!(g.subgroup_from_elements(&[0, 1]).is_err());
        assert_eq!(g.subgroup_from_elements(&[0, 2, 4]).unwrap().order(), 3);
    }

    #[test]
    fn direct_product_orders() {
        let g = s3().direct_product(&cyclic(2));
        assert_eq!(g.order(), 12);
        let x = g.pair(&cyclic(2), 1, 1);
        assert_eq!(g.mul(x, g.inv(x)), g.identity());
    }
}
