use super::*;
use crate::chain_ring::RingSpec;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn z(p: u64, e: usize) -> Ring {
    Ring::build(&RingSpec::rational(p, e)).unwrap()
}

fn ie(r: &Ring, s: i64) -> Mat2 {
    Mat2::upper(r, r.from_int(s))
}

fn fpv(r: &Ring, v: Sl2Vec) -> Vec<u8> {
    to_fp(&r.residue_field(), &v)
}

#[test]
fn generation_examples() {
    let r = z(3, 2);
    assert_eq!(Subgroup::generate(&r, &[], 10).unwrap().order(), 1);
    let c3 = Subgroup::generate(&r, &[ie(&r, 3)], 10).unwrap();
    assert_eq!(c3.order(), 3);
    let f5 = z(5, 1);
    let g = Subgroup::generate(&f5, &[Mat2::upper(&f5, 1), Mat2::lower(&f5, 1)], 1000).unwrap();
    assert_eq!(g.order(), 120);
    assert_eq!(g.congruence_level(), 0);
    let bad = Mat2::new(2, 0, 0, 2);
    assert!(matches!(Subgroup::generate(&r, &[bad], 10), Err(Error::DetNotOne)));
    assert!(matches!(Subgroup::generate(&f5, &[Mat2::upper(&f5, 1), Mat2::lower(&f5, 1)], 50), Err(Error::CapExceeded(50))));
}

#[test]
fn exact_level_examples() {
    let r = z(3, 2);
    let g = Subgroup::full(&r);
    assert!(!g.exact_level());
    let one = Subgroup::trivial(&r);
    assert!(one.exact_level());
    assert_eq!(one.congruence_level(), 2);
    let k2 = Subgroup::congruence_kernel(&r, 1);
    assert!(!k2.exact_level());
    assert_eq!(k2.congruence_level(), 1);
    assert_eq!(k2.order(), 27);
    // normalisation: the kernel given elementwise is recognised
    let k2b = Subgroup::from_elements(&r, k2.elements()).unwrap();
    assert_eq!(k2b, k2);
}

#[test]
fn lattice_sizes() {
    assert_eq!(enumerate_subgroups(&z(2, 1), 1000).unwrap().len(), 6);
    assert_eq!(enumerate_subgroups(&z(2, 2), 1000).unwrap().len(), 52);
    assert!(matches!(enumerate_subgroups(&z(5, 2), 1000), Err(Error::GroupTooLarge { .. })));
    let subs = enumerate_subgroups(&z(2, 1), 1000).unwrap();
    assert!(subs.iter().any(|h| h.order() == 1));
}

#[test]
fn ladder_examples() {
    let r = z(3, 2);
    let c3 = Subgroup::generate(&r, &[ie(&r, 3)], 10).unwrap();
    let lad = c3.lie_ladder();
    assert_eq!(lad.d(2), 1);
    assert!(lad.w(2).contains(&fpv(&r, [0, 1, 0])));
    let k2 = Subgroup::congruence_kernel(&r, 1);
    assert_eq!(k2.lie_ladder().d(2), 3);
    // <I + 2(E + D)> over Z/4, D = I at p = 2
    let r4 = z(2, 2);
    let x = Mat2::new(3, 2, 0, 3);
    let h = Subgroup::generate(&r4, &[x], 10).unwrap();
    let lad = h.lie_ladder();
    assert_eq!(lad.d(2), 1);
    assert!(lad.w(2).contains(&fpv(&r4, [1, 1, 0])));
}

#[test]
fn bad_lines_and_slices() {
    let r = z(3, 2);
    let fq = r.residue_field();
    let c3 = Subgroup::generate(&r, &[ie(&r, 3)], 10).unwrap();
    let lad = c3.lie_ladder();
    assert_eq!(c3.bad_lines(&lad, 2).unwrap(), vec![(fq.one(), 0)]);
    assert_eq!(c3.diagonal_slice(&lad, 2).unwrap(), vec![0]);
    let k2 = Subgroup::congruence_kernel(&r, 1);
    let lad = k2.lie_ladder();
    assert_eq!(k2.bad_lines(&lad, 2).unwrap().len(), 4);
    assert_eq!(k2.diagonal_slice(&lad, 2).unwrap().len(), 3);
    assert!(k2.bad_lines(&lad, 3).is_err());
}

#[test]
fn propagation_examples() {
    let r = z(3, 3);
    let h = Subgroup::generate(&r, &[ie(&r, 3)], 100).unwrap();
    let lad = h.lie_ladder();
    assert_eq!(h.propagation_witness(&lad, 2, &[0, 1, 0]).unwrap(), 1);
    let r8 = z(2, 3);
    let h = Subgroup::generate(&r8, &[ie(&r8, 2)], 100).unwrap();
    let lad = h.lie_ladder();
    assert_eq!(h.propagation_witness(&lad, 2, &[0, 1, 0]).unwrap(), 1);
    assert!(matches!(h.propagation_witness(&lad, 3, &[0, 1, 0]), Err(Error::PreconditionUnmet(_))));
}

#[test]
fn bracket_examples() {
    let r = z(3, 3);
    let k2 = Subgroup::congruence_kernel(&r, 1);
    let lad = k2.lie_ladder();
    assert_eq!(lad.d(3), 3);
    k2.bracket_check(&lad, 2, 2).unwrap();
    let fq = r.residue_field();
    assert_eq!(sl2_bracket(&fq, &[0, 1, 0], &[0, 0, 1]), [1, 0, 0]);
    let one = Subgroup::trivial(&r);
    one.bracket_check(&one.lie_ladder(), 2, 2).unwrap();
}

fn dyadic_pair(r: &Ring, a: usize, b: usize, alpha: El) -> (Mat2, Mat2) {
    let one = r.one();
    let pa1 = r.pi_pow(a - 1);
    let x11 = r.add(one, r.mul(pa1, alpha));
    let x12 = pa1;
    let x = Mat2::new(x11, x12, 0, r.inv(x11).unwrap());
    let y = Mat2::new(one, 0, r.pi_pow(b - 1), one);
    (x, y)
}

#[test]
fn dyadic_examples() {
    let r = z(2, 8);
    let (x, y) = dyadic_pair(&r, 3, 3, 1);
    let out = dyadic_word(&r, &x, &y, 3, 3, Word::W).unwrap();
    assert_eq!(out.level, 8);
    assert_eq!(out.psi, [1, 1, 0]);
    let (x0, y0) = dyadic_pair(&r, 3, 3, 0);
    let out = dyadic_word(&r, &x0, &y0, 3, 3, Word::W).unwrap();
    assert_eq!(out.psi, [0, 1, 0]);
    let r12 = z(2, 12);
    let (x, y) = dyadic_pair(&r12, 4, 4, 1);
    assert!(matches!(dyadic_word(&r12, &x, &y, 4, 4, Word::V), Err(Error::PreconditionUnmet(_))));
    assert!(matches!(dyadic_word(&z(3, 4), &x, &y, 4, 4, Word::W), Err(Error::PreconditionUnmet(_))));
}

#[test]
fn dyadic_third_word_on_long_rings() {
    let r = z(2, 18);
    let (x, y) = dyadic_pair(&r, 4, 3, 1);
    let out = dyadic_word(&r, &x, &y, 4, 3, Word::V).unwrap();
    assert_eq!(out.level, 18);
    let s = Ring::build(&RingSpec::number_ring(&[-2, 0, 1], 2, 30).unwrap()).unwrap();
    let (x, y) = dyadic_pair(&s, 6, 4, 1);
    let out = dyadic_word(&s, &x, &y, 6, 4, Word::V).unwrap();
    assert_eq!(out.level, 30);
}

#[test]
fn level_stat_examples() {
    let r = z(3, 2);
    let one = Subgroup::trivial(&r);
    let st = LevelStats::from_ladder(&one, &one.lie_ladder());
    assert_eq!((st.j1, st.j2), (3, 3));
    assert!(st.pi_set.is_empty());
    let k2 = Subgroup::congruence_kernel(&r, 1);
    let st = LevelStats::from_ladder(&k2, &k2.lie_ladder());
    assert_eq!((st.j1, st.j2, st.gamma), (2, 2, 1));
    assert!(st.pi_set.is_empty());
    let c3 = Subgroup::generate(&r, &[ie(&r, 3)], 10).unwrap();
    let st = LevelStats::from_ladder(&c3, &c3.lie_ladder());
    assert_eq!((st.j1, st.j2), (2, 3));
    assert!(st.pi_set.is_empty());
}

#[test]
fn fp_space_basics() {
    let mut w = FpSpace::zero(3, 3);
    assert!(w.insert(&[1, 2, 0]));
    assert!(!w.insert(&[2, 1, 0]));
    assert!(w.insert(&[0, 1, 1]));
    assert_eq!(w.elements().len(), 9);
    assert!(w.contains(&[1, 1, 2]));
    assert!(!w.contains(&[1, 0, 2]));
    assert!(!w.contains(&[0, 0, 1]));
}

/// Structural identities on one subgroup; returns a description of the first failure.
fn structural(h: &Subgroup) -> std::result::Result<(), String> {
    let r = h.ring();
    let e = r.e();
    let fq = r.residue_field();
    let lad = h.lie_ladder();
    let h1 = h.reduce_to(1).order();
    let prod: u128 = (2..=e).map(|j| (r.p() as u128).pow(lad.d(j) as u32)).product();
    if h.order() != h1 * prod {
        return Err(format!("filtration {} != {} * {}", h.order(), h1, prod));
    }
    for j in 2..=e {
        let nj = h.n_j(j).elements();
        // additivity of psi_j on N_j, through a fixed sample of pairs
        for (i, x) in nj.iter().enumerate().step_by(1 + nj.len() / 12) {
            let y = &nj[(i * 7 + 3) % nj.len()];
            let s = to_fp(&fq, &psi(r, &x.mul(r, y), j));
            let mut t = to_fp(&fq, &psi(r, x, j));
            for (a, b) in t.iter_mut().zip(to_fp(&fq, &psi(r, y, j))) {
                *a = ((*a as u64 + b as u64) % r.p()) as u8;
            }
            if s != t {
                return Err(format!("psi_{j} not additive"));
            }
        }
        for k in 2..=e {
            if j + k > e + 1 {
                continue;
            }
            h.bracket_check(&lad, j, k).map_err(|e| e.to_string())?;
        }
    }
    Ok(())
}

#[test]
fn structure_on_the_z4_lattice() {
    for h in enumerate_subgroups(&z(2, 2), 1000).unwrap() {
        structural(&h).unwrap();
    }
}

fn random_sl2(r: &Ring, rng: &mut ChaCha8Rng, min_level: usize) -> Mat2 {
    // I + pi^l X with X random, solved for det 1
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

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn sampled_subgroups_satisfy_structure(seed in any::<u64>(), p in prop::sample::select(vec![2u64, 3]), k in 1usize..3) {
        let e = if p == 2 { 4 } else { 3 };
        let r = z(p, e);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let gens: Vec<Mat2> = (0..k).map(|i| random_sl2(&r, &mut rng, 1 + i % 2)).collect();
        let h = Subgroup::generate(&r, &gens, 200_000).unwrap();
        prop_assert!(structural(&h).is_ok(), "{:?}", structural(&h));
        let lad = h.lie_ladder();
        let e0 = r.e0();
        for j in (e0 + 1)..=e {
            if j + e0 <= e {
                let a = h.bad_lines(&lad, j).unwrap();
                let b = h.bad_lines(&lad, j + e0).unwrap();
                prop_assert!(a.iter().all(|l| b.contains(l)), "bad lines shrink at {}", j);
            }
            if j >= e0 + 2 && j + e0 <= e {
                prop_assert!(lad.d(j + e0) >= lad.d(j));
            }
        }
        if h.exact_level() {
            for j in (e0 + 2)..=e {
                if (e - j) % e0 == 0 {
                    prop_assert!(lad.d(j) < 3 * r.f());
                }
            }
        }
    }

    #[test]
    fn commutator_congruence(seed in any::<u64>(), j in 2usize..4, k in 2usize..4) {
        let r = z(3, 5);
        let fq = r.residue_field();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = random_sl2(&r, &mut rng, j - 1);
        let y = random_sl2(&r, &mut rng, k - 1);
        let c = x.commutator(&r, &y);
        prop_assert!(sub_identity_val(&r, &c) + 1 >= j + k - 1);
        prop_assert_eq!(psi(&r, &c, j + k - 1), sl2_bracket(&fq, &psi(&r, &x, j), &psi(&r, &y, k)));
    }

    #[test]
    fn trace_identity(seed in any::<u64>()) {
        let r = z(2, 5);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_sl2(&r, &mut rng, 0);
        let m = g.sub(&r, &Mat2::identity(&r));
        prop_assert_eq!(m.trace(&r), r.sub(r.mul(m.b, m.c), r.mul(m.a, m.d)));
    }
}
