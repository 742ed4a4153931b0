//! End-to-end checks through the public API against small brute-force oracles.

use std::collections::BTreeSet;

use num_rational::BigRational;
use slchi::counting::chi_local;
use slchi::cusp_global::{ratio_report, CongruenceFamily, Kind, Methods};
use slchi::sl2_local::{group_order, primitive_columns, sl2_elements};
use slchi::subgroup::{enumerate_subgroups, Subgroup};
use slchi::{Ring, RingSpec};

/// Orbits of the full element list of `h` on primitive columns, by BFS.
fn orbit_count(h: &Subgroup) -> u64 {
    let r = h.ring();
    let els = h.elements();
    let mut seen = BTreeSet::new();
    let mut orbits = 0;
    for c in primitive_columns(r) {
        if seen.contains(&c) {
            continue;
        }
        orbits += 1;
        let mut stack = vec![c];
        seen.insert(c);
        while let Some(x) = stack.pop() {
            for g in &els {
                let y = g.act(r, x);
                if seen.insert(y) {
                    stack.push(y);
                }
            }
        }
    }
    orbits
}

#[test]
fn chi_matches_bfs_orbits_on_every_subgroup_of_sl2_z4() {
    let r = Ring::build(&RingSpec::rational(2, 2)).unwrap();
    let subs = enumerate_subgroups(&r, 1000).unwrap();
    assert_eq!(subs.len(), 52);
    let g = group_order(&r);
    for h in &subs {
        let c = chi_local(h, 1 << 21).unwrap();
        let o = orbit_count(h);
        assert_eq!(c.orbits, o);
        assert_eq!(c.index * h.order(), g);
        assert_eq!(c.chi, BigRational::new(o.into(), c.index.into()));
    }
}

#[test]
fn kernels_of_z27() {
    let r = Ring::build(&RingSpec::rational(3, 3)).unwrap();
    assert_eq!(sl2_elements(&r).len() as u128, group_order(&r));
    // K_l acts on columns through reduction mod 3^l: orbits = columns mod 3^l.
    for l in 1..=3u32 {
        let k = Subgroup::congruence_kernel(&r, l as usize);
        let c = chi_local(&k, 0).unwrap();
        let cols_mod = 3u64.pow(2 * l) - 3u64.pow(2 * (l - 1));
        assert_eq!(c.orbits, if l == 3 { 648 } else { cols_mod });
    }
}

fn euler_phi(mut n: u64) -> u64 {
    let mut out = n;
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            while n.is_multiple_of(p) {
                n /= p;
            }
            out -= out / p;
        }
        p += 1;
    }
    if n > 1 {
        out -= out / n;
    }
    out
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 { a } else { gcd(b, a % b) }
}

#[test]
fn gamma0_cusps_over_q() {
    for n in 1..=40u64 {
        let expect: u64 = (1..=n).filter(|d| n % d == 0).map(|d| euler_phi(gcd(d, n / d))).sum();
        let fam = CongruenceFamily::rational(Kind::Gamma0, n).unwrap();
        let rep = ratio_report(&fam, Methods::default()).unwrap();
        assert!(rep.ok(), "{:?}", rep.failures);
        assert_eq!(rep.cusp_count, expect as u128, "N = {n}");
    }
}
