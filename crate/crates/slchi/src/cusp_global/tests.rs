use super::*;
use crate::quad_field::QuadraticField;

fn q(kind: Kind, n: u64) -> CongruenceFamily {
    CongruenceFamily::rational(kind, n).unwrap()
}

#[test]
fn closed_form_examples() {
    assert_eq!(cusp_count_closed(&q(Kind::Gamma, 5)).unwrap().cusps, 12);
    assert_eq!(cusp_count_closed(&q(Kind::Gamma1, 5)).unwrap().cusps, 4);
    assert_eq!(cusp_count_closed(&q(Kind::Gamma0, 12)).unwrap().cusps, 6);
    assert_eq!(cusp_count_closed(&q(Kind::Gamma0, 1)).unwrap().cusps, 1);
    assert!(matches!(cusp_count_closed(&q(Kind::Gamma, 3)), Err(Error::GateViolated(_))));
    assert!(matches!(cusp_count_closed(&q(Kind::Gamma1, 4)), Err(Error::GateViolated(_))));
}

#[test]
fn index_examples() {
    assert_eq!(index_sl(&q(Kind::Gamma, 5)).unwrap(), 120);
    assert_eq!(index_sl(&q(Kind::Gamma0, 12)).unwrap(), 24);
    assert_eq!(index_sl(&q(Kind::Gamma, 1)).unwrap(), 1);
    assert_eq!(index_psl(&q(Kind::Gamma, 5)).unwrap(), 60);
    assert_eq!(index_psl(&q(Kind::Gamma, 2)).unwrap(), 6);
    let d = cusp_count_double_coset(&q(Kind::Gamma, 5)).unwrap();
    assert_eq!((d.index_sl, d.index_psl, d.gamma_order), (120, 60, 1));
}

#[test]
fn pair_orbit_examples() {
    assert_eq!(cusp_count_pair_orbit(12, Kind::Gamma0).unwrap(), 6);
    assert_eq!(cusp_count_pair_orbit(5, Kind::Gamma).unwrap(), 12);
    assert_eq!(cusp_count_pair_orbit(1, Kind::Gamma0).unwrap(), 1);
    // classical small levels: Gamma(2) and Gamma(3), Gamma(4) have 3, 4, 6 cusps
    assert_eq!(cusp_count_pair_orbit(2, Kind::Gamma).unwrap(), 3);
    assert_eq!(cusp_count_pair_orbit(3, Kind::Gamma).unwrap(), 4);
    assert_eq!(cusp_count_pair_orbit(4, Kind::Gamma).unwrap(), 6);
    assert!(matches!(cusp_count_pair_orbit(3001, Kind::Gamma0), Err(Error::TooLarge(_))));
}

#[test]
fn double_coset_examples() {
    assert_eq!(cusp_count_double_coset(&q(Kind::Gamma0, 12)).unwrap().nu_inf, 6);
    assert_eq!(cusp_count_double_coset(&q(Kind::Gamma, 5)).unwrap().nu_inf, 12);
    let one = cusp_count_double_coset(&q(Kind::Gamma0, 1)).unwrap();
    assert_eq!((one.nu_inf, one.sum_u, one.index_sl), (1, 1, 1));
    let gi = QuadraticField::new(-1).unwrap();
    let fam = CongruenceFamily::quadratic(&gi, Kind::Gamma0, gi.principal_int(3).unwrap());
    assert_eq!(cusp_count_double_coset(&fam).unwrap().nu_inf, 2);
    assert_eq!(eisenstein_bound(&fam).unwrap(), 4);
    let full = CongruenceFamily::quadratic(&gi, Kind::Gamma0, IdealHNF::unit());
    assert_eq!(eisenstein_bound(&full).unwrap(), 2);
    let n = gi.ideal_mul(&gi.ideal(&[QElt::new(1, 1)]).unwrap(), &gi.principal_int(3).unwrap());
    let fam = CongruenceFamily::quadratic(&gi, Kind::Gamma0, n);
    assert_eq!(eisenstein_bound(&fam).unwrap(), 8);
    assert!(eisenstein_bound(&q(Kind::Gamma0, 3)).is_err());
}

#[test]
fn triple_agreement_small_levels() {
    for n in 1..=24u64 {
        for kind in [Kind::Gamma, Kind::Gamma1, Kind::Gamma0] {
            let rep = ratio_report(&q(kind, n), Methods::default()).unwrap();
            assert!(rep.ok(), "{:?}", rep.failures);
            assert!(rep.methods_agree);
            assert_eq!(rep.pair_orbit.map(u128::from), Some(rep.cusp_count));
            assert_eq!(rep.double_coset.map(u128::from), Some(rep.cusp_count));
        }
    }
}

#[test]
fn ratio_examples() {
    let rep = ratio_report(&q(Kind::Gamma, 5), Methods::default()).unwrap();
    assert_eq!(rep.ratio, Some(rat(1, 5)));
    assert_eq!(rep.ratio_sl, Some(rat(1, 10)));
    let gi = QuadraticField::new(-1).unwrap();
    let rep = ratio_report(&CongruenceFamily::quadratic(&gi, Kind::Gamma0, gi.principal_int(3).unwrap()), Methods::default()).unwrap();
    assert_eq!((rep.cusp_count, rep.ratio.clone(), rep.eisenstein_bound), (2, Some(rat(1, 5)), Some(4)));
    assert!(rep.ok());
    let rep = ratio_report(&q(Kind::Gamma0, 1), Methods::default()).unwrap();
    assert_eq!(rep.ratio, Some(int(1)));
}

#[test]
fn imaginary_closed_form_matches_double_coset() {
    for d in [-1, -2, -3, -7] {
        let k = QuadraticField::new(d).unwrap();
        for n in k.ideals_up_to(30).unwrap() {
            let fam = CongruenceFamily::quadratic(&k, Kind::Gamma0, n);
            let rep = ratio_report(&fam, Methods::default()).unwrap();
            assert!(rep.ok(), "{:?}", rep.failures);
            assert_eq!(rep.closed_form, rep.double_coset.map(u128::from));
        }
    }
}

#[test]
fn real_quadratic_gamma() {
    for d in [2, 5] {
        let k = QuadraticField::new(d).unwrap();
        for n in k.ideals_up_to(20).unwrap() {
            let rep = ratio_report(&CongruenceFamily::quadratic(&k, Kind::Gamma, n), Methods::default()).unwrap();
            assert!(rep.ok(), "{:?}", rep.failures);
            let a = rep.solved_a.unwrap();
            assert!(a == int(1) || a == int(2));
        }
    }
    // Q(sqrt 2), n = (sqrt 2): eps = 1 mod n, so each cusp above infinity counts fully
    let k = QuadraticField::new(2).unwrap();
    let n = k.ideal(&[QElt::new(0, 1)]).unwrap();
    let c = cusp_count_closed(&CongruenceFamily::quadratic(&k, Kind::Gamma, n)).unwrap();
    // N = 2: 4 (1 - 1/4) = 3
    assert_eq!(c.cusps, 3);
}

#[test]
fn sum_u_is_multiplicative_for_gamma0() {
    for (a, b) in [(4u64, 3u64), (8, 9), (5, 7), (4, 25)] {
        let su = |n| cusp_count_double_coset(&q(Kind::Gamma0, n)).unwrap().sum_u;
        assert_eq!(su(a * b), su(a) * su(b));
    }
    let gi = QuadraticField::new(-1).unwrap();
    let p = gi.ideal(&[QElt::new(1, 1)]).unwrap();
    let p2 = gi.ideal_mul(&p, &p);
    let three = gi.principal_int(3).unwrap();
    let su = |n: IdealHNF| cusp_count_double_coset(&CongruenceFamily::quadratic(&gi, Kind::Gamma0, n)).unwrap().sum_u;
    assert_eq!(su(gi.ideal_mul(&p2, &three)), su(p2) * su(three));
}

#[test]
fn decay_examples() {
    let s = decay_scan(Kind::Gamma0, 2000).unwrap();
    assert!(s.failures.is_empty(), "{:?}", s.failures);
    let row = |n: u64| s.rows.iter().find(|r| r.level_norm == n).unwrap().clone();
    let r12 = row(12);
    assert_eq!((r12.cusps, r12.index), (6, 24));
    for p in [2u64, 3, 5, 7, 11, 101, 1999] {
        let r = row(p);
        assert_eq!(rat(BigInt::from(r.ratio_num), BigInt::from(r.ratio_den)), rat(2, p + 1));
    }
    let r1 = row(1);
    assert_eq!((r1.cusps, r1.index, r1.ratio_num, r1.ratio_den), (1, 1, 1, 1));
    assert_eq!(s.decade_max.len(), 2);
    for kind in [Kind::Gamma, Kind::Gamma1] {
        let s = decay_scan(kind, 3000).unwrap();
        assert!(s.failures.is_empty());
        assert_eq!(s.rows.len(), 2996);
    }
}

#[test]
fn congruence_products() {
    let r = congruence_product_check(&Base::Rational, &rational_level(4), &rational_level(6)).unwrap();
    assert!(r.equal);
    assert_eq!((r.size_a, r.size_b, r.target_size), (24, 8, 192));
    let r = congruence_product_check(&Base::Rational, &rational_level(4), &rational_level(9)).unwrap();
    assert!(r.equal && r.target_size == 48 * 648);
    let r = congruence_product_check(&Base::Rational, &rational_level(8), &rational_level(8)).unwrap();
    assert!(r.equal && r.product_size == r.size_a);
    let gi = QuadraticField::new(-1).unwrap();
    let p = gi.ideal(&[QElt::new(1, 1)]).unwrap();
    let r = congruence_product_check(&Base::Quadratic(gi.clone()), &gi.ideal_pow(&p, 3), &gi.principal_int(6).unwrap()).unwrap();
    assert!(r.equal);
}

#[test]
fn unit_quotient_in_imaginary_gamma0() {
    // p above 5 in Z[i]: the middle divisor contributes (O/p)^* / {+-1} = 2 classes
    let gi = QuadraticField::new(-1).unwrap();
    let p = gi.factor_prime(5).unwrap()[0].ideal;
    let fam = CongruenceFamily::quadratic(&gi, Kind::Gamma0, gi.ideal_pow(&p, 2));
    let c = cusp_count_closed(&fam).unwrap();
    assert_eq!((c.cusps, c.unit_free_formula), (4, Some(6)));
    assert_eq!(cusp_count_double_coset(&fam).unwrap().nu_inf, 4);
    // units +-1 only: both forms agree
    let k = QuadraticField::new(-2).unwrap();
    let p = k.factor_prime(3).unwrap()[0].ideal;
    let c = cusp_count_closed(&CongruenceFamily::quadratic(&k, Kind::Gamma0, k.ideal_pow(&p, 2))).unwrap();
    assert_eq!(Some(c.cusps), c.unit_free_formula);
}

mod props {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]
        #[test]
        fn reports_are_consistent(n in 1u64..48, k in 0usize..3) {
            let kind = [Kind::Gamma, Kind::Gamma1, Kind::Gamma0][k];
            let rep = ratio_report(&q(kind, n), Methods::default()).unwrap();
            prop_assert!(rep.ok(), "{:?}", rep.failures);
            let (nu, su) = (rep.double_coset.unwrap(), rep.sum_u.unwrap());
            prop_assert!(nu <= su && su as u128 <= rep.index_psl);
            prop_assert_eq!(rep.index_finite_quotient, Some(rep.index));
        }
    }
}
