//! Randomized invariants for the group ring, lattices, fields, L-values and ideals.

use hstick::arith;
use hstick::fields::{norm_form_solve, MultiQuadField, PlaceSet};
use hstick::group_ring::{CharacterIndex, ExpTwoGroup, GroupRingElem};
use hstick::ideals::{self, AnnConfig};
use hstick::lattice::IntegerLattice;
use hstick::lvalues;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

const POOL: &[i64] = &[
    2, 3, 5, 6, 7, 10, 11, 13, 14, 15, 17, 19, 21, 22, 23, 29, 30, 31, 33,
];

fn int(n: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(n.into())
}

fn elem(m: usize) -> impl Strategy<Value = GroupRingElem> {
    let g = ExpTwoGroup::new(m).unwrap();
    proptest::collection::vec(-9i64..=9, 1 << m)
        .prop_map(move |c| GroupRingElem::from_ints(g, &c).unwrap())
}

fn elem_pair() -> impl Strategy<Value = (GroupRingElem, GroupRingElem)> {
    (0usize..=4).prop_flat_map(|m| (elem(m), elem(m)))
}

fn field(max_rank: usize) -> impl Strategy<Value = MultiQuadField> {
    proptest::sample::subsequence(POOL, 1..=max_rank)
        .prop_filter_map("dependent generators", |g| MultiQuadField::new(&g).ok())
}

fn field_and_s(max_rank: usize) -> impl Strategy<Value = (MultiQuadField, PlaceSet)> {
    (
        field(max_rank),
        proptest::sample::subsequence(&[2u64, 3, 5, 7, 11, 13][..], 0..=2),
    )
        .prop_map(|(f, extra)| {
            let mut p = f.ramified_primes();
            p.extend(extra);
            p.sort_unstable();
            p.dedup();
            let s = PlaceSet::for_field(&f, &p).unwrap();
            (f, s)
        })
}

fn lattice(dim: usize) -> impl Strategy<Value = IntegerLattice> {
    proptest::collection::vec(proptest::collection::vec(-8i64..=8, dim), 1..=dim + 1)
        .prop_map(move |rows| IntegerLattice::from_integers(dim, &rows).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn transform_is_multiplicative((a, b) in elem_pair()) {
        let ab = &a * &b;
        let prod: Vec<BigRational> = a
            .character_transform()
            .iter()
            .zip(b.character_transform())
            .map(|(x, y)| x * y)
            .collect();
        prop_assert_eq!(ab.character_transform(), prod);
    }

    #[test]
    fn transform_round_trip(a in (0usize..=4).prop_flat_map(elem)) {
        let back = GroupRingElem::inverse_character_transform(a.group(), &a.character_transform()).unwrap();
        prop_assert_eq!(back, a);
    }

    #[test]
    fn projection_is_a_ring_map(
        (a, b, chi) in (1usize..=4).prop_flat_map(|m| (elem(m), elem(m), 1u32..(1 << m)))
    ) {
        let kernel = CharacterIndex(chi).kernel_basis(a.group());
        let pa = a.project_quotient(&kernel).unwrap();
        let pb = b.project_quotient(&kernel).unwrap();
        prop_assert_eq!(&pa * &pb, (&a * &b).project_quotient(&kernel).unwrap());
    }

    #[test]
    fn hnf_is_canonical(l in lattice(3), k in -5i64..=5, i in 0usize..3, j in 0usize..3) {
        let mut rows: Vec<Vec<BigRational>> = l.basis();
        rows.reverse();
        if i != j && i < rows.len() && j < rows.len() {
            let add: Vec<BigRational> = rows[j].iter().map(|x| x * int(k)).collect();
            for (x, y) in rows[i].iter_mut().zip(add) {
                *x += y;
            }
        }
        let again = IntegerLattice::from_rational_rows(3, &rows).unwrap();
        prop_assert_eq!(again, l);
    }

    #[test]
    fn index_is_multiplicative(a in lattice(3), b in lattice(3), c in lattice(3)) {
        let z = IntegerLattice::standard(3);
        let l1 = z.clone();
        let l2 = a.sum(&z.scaled(&int(6))).unwrap();
        let l3 = l2.intersect(&b.sum(&c).unwrap().sum(&z.scaled(&int(10))).unwrap()).unwrap();
        let i13 = l3.index_in(&l1).unwrap();
        prop_assert_eq!(i13, l2.index_in(&l1).unwrap() * l3.index_in(&l2).unwrap());
    }

    #[test]
    fn ring_multiplication_distributes(a in lattice(4), b in lattice(4), x in elem(2)) {
        let lhs = a.sum(&b).unwrap().mul_by_ring_element(&x).unwrap();
        let rhs = a.mul_by_ring_element(&x).unwrap().sum(&b.mul_by_ring_element(&x).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn artin_symbol_matches_kronecker(f in field(3)) {
        for q in arith::primes_up_to(500).into_iter().filter(|&q| !f.is_ramified(q)) {
            let sigma = f.artin_symbol(q).unwrap();
            for chi in f.group().nontrivial_characters() {
                let k = arith::kronecker(f.discriminant(chi), q as i64) as i32;
                prop_assert_eq!(chi.value(sigma), k, "q = {}", q);
            }
        }
    }

    #[test]
    fn w2_divisibility(f in field(3)) {
        for chi in f.group().nontrivial_characters() {
            let data = f.subfield_data(chi).unwrap();
            prop_assert_eq!(f.w2() % data.w2, 0);
            prop_assert_eq!(data.w2_minus % 4, 2);
        }
        prop_assert!(f.w2_prime_powers_covered());
    }

    #[test]
    fn norm_witnesses_reconstruct(d in proptest::sample::select(vec![2i64, 3, 5, 7, 13]), r in 1i64..300) {
        if let Some((x, y)) = norm_form_solve(d, r, 2000) {
            let n = if d % 4 == 1 { 4 * r } else { r };
            let lhs = x * x - (d as i128) * y * y;
            prop_assert!(lhs == r as i128 || lhs == n as i128);
        }
    }

    #[test]
    fn zeta_is_product_of_l_values((f, s) in field_and_s(3)) {
        let recs = lvalues::l_values(&f, &s).unwrap();
        let product = recs.iter().fold(BigRational::one(), |acc, r| acc * &r.adjusted_l);
        prop_assert_eq!(lvalues::zeta_s_minus1(&f, &s).unwrap(), product);
        let zq = lvalues::zeta_s_minus1(&MultiQuadField::rationals(), &s).unwrap();
        for r in recs.iter().filter(|r| !r.chi.is_trivial()) {
            let sub = f.subfield(r.chi).unwrap();
            prop_assert_eq!(&r.adjusted_l, &(lvalues::zeta_s_minus1(&sub, &s).unwrap() / &zq));
        }
    }

    #[test]
    fn sign_law_and_minus_identity((f, s) in field_and_s(3)) {
        let bt = lvalues::bt_orders(&f, &s).unwrap();
        let v = bt.theta.character_transform();
        let sign = |n: u64| if n.is_multiple_of(2) { int(1) } else { int(-1) };
        let trivial = sign(s.size()) * &v[0];
        prop_assert!(trivial.is_positive());
        prop_assert_eq!(trivial, int(bt.k2_f.clone()) / int(24));
        for o in &bt.subfields {
            let c = &v[o.chi.0 as usize];
            prop_assert_eq!(
                sign(s.size()) * c,
                sign(o.places) * int(24) / int(o.w2) * int(o.k2.clone()) / int(bt.k2_f.clone())
            );
            prop_assert_eq!((int(o.w2_minus) * c).abs(), int(o.k2_minus.clone()));
        }
    }

    #[test]
    fn enlarging_s_scales_components((f, s) in field_and_s(2), p in proptest::sample::select(vec![17u64, 19, 23, 37])) {
        prop_assume!(!s.contains(p));
        let t = s.with_prime(p).unwrap();
        let before = lvalues::theta_minus1(&f, &s).unwrap().character_transform();
        let after = lvalues::theta_minus1(&f, &t).unwrap().character_transform();
        for chi in f.group().characters() {
            let c = f.character_at(chi, p) as i64;
            let factor = if chi.is_trivial() { int(1 - p as i64) } else { int(1 - c * p as i64) };
            prop_assert_eq!(&after[chi.0 as usize], &(&before[chi.0 as usize] * factor));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn stick_extension_is_predicted_diagonal((f, s) in field_and_s(3)) {
        let bundle = ideals::stick_ideal(&f, &s, AnnConfig::default()).unwrap();
        let g = f.group();
        prop_assert_eq!(&bundle.stick_s, &bundle.fit_s_predicted);
        let ann_diag = ideals::character_diagonal(&bundle.ann.lattice, g);
        prop_assert_eq!(ann_diag, ideals::w2_diagonal(&f).unwrap());
        let idx = ideals::index_report(&f, &bundle).unwrap();
        prop_assert!(idx.index_chain);
        prop_assert!(idx.index_formula.holds());
        let theta = &bundle.theta;
        for q in ideals::admissible_primes(&f, 600) {
            let sigma = f.artin_symbol(q).unwrap();
            let gen = &GroupRingElem::basis(g, sigma) - &GroupRingElem::scalar(g, int(q * q));
            prop_assert!((&gen * theta).is_integral());
        }
        let odd = |v: Vec<BigRational>| -> Vec<BigInt> {
            v.into_iter()
                .map(|x| {
                    let mut n = x.numer().abs();
                    while !n.is_zero() && (&n % 2u32).is_zero() {
                        n /= 2u32;
                    }
                    n
                })
                .collect()
        };
        prop_assert_eq!(
            odd(ideals::character_diagonal(&bundle.stick_s, g)),
            odd(bundle.bt.minus_diagonal().into_iter().map(int).collect())
        );
    }
}

#[test]
fn idempotents_are_orthogonal_and_complete() {
    for m in 0..=4 {
        let g = ExpTwoGroup::new(m).unwrap();
        let es: Vec<GroupRingElem> = g
            .characters()
            .map(|c| GroupRingElem::idempotent(g, c))
            .collect();
        let sum = es.iter().fold(GroupRingElem::zero(g), |acc, e| &acc + e);
        assert_eq!(sum, GroupRingElem::one(g));
        for (i, a) in es.iter().enumerate() {
            for (j, b) in es.iter().enumerate() {
                let p = a * b;
                if i == j {
                    assert_eq!(&p, a);
                } else {
                    assert!(p.is_zero());
                }
            }
        }
    }
}
