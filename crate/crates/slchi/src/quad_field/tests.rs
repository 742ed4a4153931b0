use super::*;
use proptest::prelude::*;

fn field(d: i64) -> QuadraticField {
    QuadraticField::new(d).unwrap()
}

#[test]
fn field_basics() {
    assert_eq!(field(-1).discriminant, -4);
    assert_eq!(field(-3).discriminant, -3);
    assert_eq!(field(5).discriminant, 5);
    assert_eq!(field(2).min_poly(), vec![-2, 0, 1]);
    assert_eq!(field(-3).min_poly(), vec![1, -1, 1]);
    assert!(matches!(QuadraticField::new(6), Err(Error::UnsupportedField(6))));
    assert_eq!(field(-1).torsion_units().len(), 4);
    assert_eq!(field(-3).torsion_units().len(), 6);
    assert_eq!(field(-7).torsion_units().len(), 2);
}

#[test]
fn factor_prime_examples() {
    let gi = field(-1);
    let two = gi.factor_prime(2).unwrap();
    assert_eq!(two.len(), 1);
    assert_eq!((two[0].e0, two[0].f), (2, 1));
    assert!(two[0].ideal.contains(QElt::new(1, 1)));
    let three = gi.factor_prime(3).unwrap();
    assert_eq!((three.len(), three[0].e0, three[0].f), (1, 1, 2));
    let seven = field(2).factor_prime(7).unwrap();
    assert_eq!(seven.iter().map(|q| (q.e0, q.f)).collect::<Vec<_>>(), vec![(1, 1), (1, 1)]);
    // x^2 - 2 = (x - 3)(x + 3) mod 7
    assert!(seven.iter().any(|q| q.ideal.contains(QElt::new(3, 1))));
    assert!(seven.iter().any(|q| q.ideal.contains(QElt::new(-3, 1))));
}

#[test]
fn factorisation_degrees_sum_to_two() {
    for d in SUPPORTED {
        let k = field(d);
        for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31] {
            let fac = k.factor_prime(p).unwrap();
            assert_eq!(fac.iter().map(|q| q.e0 * q.f).sum::<usize>(), 2, "d={d} p={p}");
            // the product of the primes with multiplicity is (p)
            let prod = fac.iter().fold(IdealHNF::unit(), |acc, q| k.ideal_mul(&acc, &k.ideal_pow(&q.ideal, q.e0 as u32)));
            assert_eq!(prod, k.principal_int(p as i128).unwrap());
        }
    }
}

#[test]
fn ideal_examples() {
    let gi = field(-1);
    let pi = gi.ideal(&[QElt::new(1, 1)]).unwrap();
    let sq = gi.ideal_pow(&pi, 2);
    assert_eq!(sq, gi.principal_int(2).unwrap());
    assert_eq!(sq.norm(), 4);
    assert_eq!(gi.principal_int(3).unwrap().norm(), 9);
    assert_eq!(gi.omega(&gi.principal_int(6).unwrap()).unwrap(), 2);
    assert!(gi.is_prime_ideal(&pi).unwrap());
    assert!(gi.is_prime_ideal(&gi.principal_int(3).unwrap()).unwrap());
    assert!(!gi.is_prime_ideal(&gi.principal_int(5).unwrap()).unwrap());
    assert!(matches!(gi.ideal(&[QElt::int(0)]), Err(Error::ZeroIdeal)));
    // (2) + (3) = (1)
    assert_eq!(gi.ideal_sum(&gi.principal_int(2).unwrap(), &gi.principal_int(3).unwrap()), IdealHNF::unit());
}

#[test]
fn ideal_counts() {
    // ideals of norm <= 10 in Z[i]: norms 1,2,4,5,5,8,9,10,10 -> 9 ideals
    assert_eq!(field(-1).ideals_up_to(10).unwrap().len(), 9);
    for k in [field(-1), field(-3), field(2), field(5)] {
        for n in k.ideals_up_to(60).unwrap() {
            let f = k.factor_ideal(&n).unwrap();
            let back = f.iter().fold(IdealHNF::unit(), |acc, (q, e)| k.ideal_mul(&acc, &k.ideal_pow(&q.ideal, *e)));
            assert_eq!(back, n);
        }
    }
}

#[test]
fn residue_ring_examples() {
    let gi = field(-1);
    let r = ResidueRing::quadratic(&gi, &gi.principal_int(3).unwrap()).unwrap();
    assert_eq!(r.factors.len(), 1);
    assert_eq!((r.factors[0].ring.q(), r.factors[0].ring.e()), (9, 1));
    let r = ResidueRing::quadratic(&gi, &gi.principal_int(2).unwrap()).unwrap();
    let f = &r.factors[0].ring;
    assert_eq!((f.q(), f.e0(), f.e(), f.size()), (2, 2, 2, 4));
    let k2 = field(2);
    let r = ResidueRing::quadratic(&k2, &k2.principal_int(7).unwrap()).unwrap();
    assert_eq!(r.factors.iter().map(|f| (f.ring.size(), f.ring.e())).collect::<Vec<_>>(), vec![(7, 1), (7, 1)]);
    let z = ResidueRing::rational(12).unwrap();
    assert_eq!(z.factors.iter().map(|f| f.ring.size()).collect::<Vec<_>>(), vec![4, 3]);
    assert_eq!(z.lift(&z.reduce(QElt::int(-1))), QElt::int(11));
}

#[test]
fn crt_round_trip() {
    for k in [field(-1), field(-3), field(2), field(5)] {
        for n in k.ideals_up_to(40).unwrap() {
            let r = ResidueRing::quadratic(&k, &n).unwrap();
            assert_eq!(r.factors.iter().map(|f| f.ring.size()).product::<u64>(), n.norm());
            for (i, f) in r.factors.iter().enumerate() {
                assert_eq!(f.norm_p.pow(f.k as u32), f.ring.size());
                let e = r.reduce(r.idempotents[i]);
                assert!(e.iter().enumerate().all(|(j, &x)| x == if i == j { r.factors[j].ring.one() } else { 0 }));
            }
            let mut seen = HashSet::new();
            for v in n.residues() {
                let t = r.reduce(v);
                assert_eq!(r.lift(&t), v);
                assert!(seen.insert(t));
            }
            // reduction is a ring map
            let (a, b) = (QElt::new(5, -3), QElt::new(-2, 7));
            assert_eq!(r.reduce(k.mul(a, b)), r.mul(&r.reduce(a), &r.reduce(b)));
        }
    }
}

#[test]
fn fundamental_unit_examples() {
    let u = fundamental_unit(&field(2)).unwrap();
    assert_eq!((u.epsilon, u.epsilon_norm, u.u_plus_over_squares), (Some(QElt::new(1, 1)), Some(-1), Some(1)));
    let u = fundamental_unit(&field(5)).unwrap();
    assert_eq!((u.epsilon, u.epsilon_norm, u.u_plus_over_squares), (Some(QElt::new(0, 1)), Some(-1), Some(1)));
    let u = fundamental_unit(&field(3)).unwrap();
    assert_eq!((u.epsilon, u.epsilon_norm, u.u_plus_over_squares), (Some(QElt::new(2, 1)), Some(1), Some(2)));
    let u = fundamental_unit(&field(13)).unwrap();
    assert_eq!((u.epsilon, u.epsilon_norm), (Some(QElt::new(1, 1)), Some(-1)));
    assert!(fundamental_unit(&field(-1)).is_err());
}

/// No unit lies strictly between 1 and eps (search over a box).
#[test]
fn fundamental_units_are_minimal() {
    for d in [2, 3, 5, 13] {
        let k = field(d);
        let eps = fundamental_unit(&k).unwrap().epsilon.unwrap();
        for x in -30..=30 {
            for y in -30..=30 {
                let v = QElt::new(x, y);
                if k.norm(v).abs() == 1 {
                    let above = k.signs(k.add(v, QElt::int(-1))).0 > 0;
                    let below = k.signs(k.add(eps, k.neg(v))).0 > 0;
                    assert!(!(above && below), "d={d} unit {v:?} below {eps:?}");
                }
            }
        }
        let tp = fundamental_unit(&k).unwrap().totally_positive_gen.unwrap();
        assert!(k.is_totally_positive(tp) && k.norm(tp) == 1);
    }
}

#[test]
fn modulus_unit_examples() {
    let k = field(2);
    let u = unit_data(&k).unwrap();
    let root2 = k.ideal(&[QElt::new(0, 1)]).unwrap();
    let r = ResidueRing::quadratic(&k, &root2).unwrap();
    assert_eq!(modulus_units(&u, &r).index_units, 1);
    // mod 7: -1 and 1+sqrt2 ...
    let r = ResidueRing::quadratic(&k, &k.principal_int(7).unwrap()).unwrap();
    let m = modulus_units(&u, &r);
    let (a, b) = (m.index_units, m.squares_over_un_squared.unwrap());
    assert!(b == a || 2 * b == a);
    // imaginary: image of the torsion units
    let gi = field(-1);
    let r = ResidueRing::quadratic(&gi, &gi.principal_int(3).unwrap()).unwrap();
    assert_eq!(modulus_units(&unit_data(&gi).unwrap(), &r).index_units, 4);
}

#[test]
fn unit_index_relations() {
    for d in [2, 3, 5, 13] {
        let k = field(d);
        let u = unit_data(&k).unwrap();
        for n in k.ideals_up_to(50).unwrap() {
            let r = ResidueRing::quadratic(&k, &n).unwrap();
            let m = modulus_units(&u, &r);
            let (idx, sq, up) = (m.index_units, m.squares_over_un_squared.unwrap(), m.u_plus_over_un_squared.unwrap());
            assert_eq!(up, u.u_plus_over_squares.unwrap() * sq);
            assert!(sq == idx || 2 * sq == idx, "d={d} n={}", n.show());
            // U_n contains -1 exactly when n | 2
            let minus_one_trivial = n.contains(QElt::int(2));
            assert_eq!(sq == idx, minus_one_trivial);
        }
    }
}

proptest! {
    #[test]
    fn norm_is_multiplicative(d in prop::sample::select(SUPPORTED.to_vec()), a in -50i128..50, b in -50i128..50, c in -50i128..50, e in -50i128..50) {
        let k = field(d);
        let (x, y) = (QElt::new(a, b), QElt::new(c, e));
        prop_assert_eq!(k.norm(k.mul(x, y)), k.norm(x) * k.norm(y));
        prop_assert_eq!(k.norm(x), k.mul(x, k.conj(x)).x);
        prop_assert_eq!(k.mul(x, k.conj(x)).y, 0);
    }

    #[test]
    fn ideal_norm_is_multiplicative(d in prop::sample::select(SUPPORTED.to_vec()), a in 1i128..30, b in -30i128..30, c in 1i128..30, e in -30i128..30) {
        let k = field(d);
        let i = k.ideal(&[QElt::new(a, b)]).unwrap();
        let j = k.ideal(&[QElt::new(c, e)]).unwrap();
        prop_assert_eq!(i.norm() as i128, k.norm(QElt::new(a, b)).abs());
        prop_assert_eq!(k.ideal_mul(&i, &j).norm(), i.norm() * j.norm());
        let s = k.ideal_sum(&i, &j);
        prop_assert!(s.contains_ideal(&i) && s.contains_ideal(&j));
    }

    #[test]
    fn units_have_norm_one(d in prop::sample::select(vec![2i64, 3, 5, 13]), k in 1u64..6) {
        let f = field(d);
        let eps = fundamental_unit(&f).unwrap().epsilon.unwrap();
        let ek = f.pow(eps, k);
        prop_assert_eq!(f.norm(ek).abs(), 1);
        prop_assert_eq!(f.mul(ek, f.conj(ek)), QElt::int(f.norm(ek)));
    }
}
