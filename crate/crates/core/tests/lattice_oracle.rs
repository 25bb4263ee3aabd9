//! Lattice indices against brute-force coset enumeration in (Z/N)^n.

use std::collections::HashSet;

use hstick::lattice::IntegerLattice;
use num_bigint::BigInt;
use proptest::prelude::*;

fn det(m: &[Vec<i64>]) -> i64 {
    let n = m.len();
    if n == 1 {
        return m[0][0];
    }
    (0..n)
        .map(|j| {
            let minor: Vec<Vec<i64>> = m[1..]
                .iter()
                .map(|row| {
                    row.iter()
                        .enumerate()
                        .filter(|&(k, _)| k != j)
                        .map(|(_, &x)| x)
                        .collect()
                })
                .collect();
            let sign = if j % 2 == 0 { 1 } else { -1 };
            sign * m[0][j] * det(&minor)
        })
        .sum()
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// The image of the lattice spanned by `gens` in (Z/N)^n, as a set of residue vectors.
fn image(gens: &[Vec<i64>], n_mod: i64) -> HashSet<Vec<i64>> {
    let dim = gens[0].len();
    let mut seen: HashSet<Vec<i64>> = HashSet::new();
    let mut stack = vec![vec![0; dim]];
    seen.insert(vec![0; dim]);
    while let Some(v) = stack.pop() {
        for g in gens {
            let w: Vec<i64> = v
                .iter()
                .zip(g)
                .map(|(a, b)| (a + b).rem_euclid(n_mod))
                .collect();
            if seen.insert(w.clone()) {
                stack.push(w);
            }
        }
    }
    seen
}

/// Triangular matrices with `|det| <= max_det`, scrambled by unimodular row operations.
fn square_gens(dim: usize, max_det: i64) -> impl Strategy<Value = Vec<Vec<i64>>> {
    let diag = proptest::collection::vec(1i64..=max_det, dim)
        .prop_filter("det in range", move |d| {
            d.iter().product::<i64>() <= max_det
        });
    let upper = proptest::collection::vec(-6i64..=6, dim * dim);
    let ops = proptest::collection::vec((0..dim, 0..dim, -3i64..=3), 0..8);
    (diag, upper, ops).prop_map(move |(d, u, ops)| {
        let mut m: Vec<Vec<i64>> = (0..dim)
            .map(|i| {
                (0..dim)
                    .map(|j| {
                        if i == j {
                            d[i]
                        } else if j > i {
                            u[i * dim + j]
                        } else {
                            0
                        }
                    })
                    .collect()
            })
            .collect();
        for (i, j, k) in ops {
            if i != j {
                let src = m[j].clone();
                for (x, y) in m[i].iter_mut().zip(src) {
                    *x += k * y;
                }
            }
        }
        m
    })
}

fn pair(dim: usize, max_det: i64) -> impl Strategy<Value = (Vec<Vec<i64>>, Vec<Vec<i64>>)> {
    (square_gens(dim, max_det), square_gens(dim, max_det))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn index_matches_coset_count(
        gens in (1usize..=4).prop_flat_map(|dim| square_gens(dim, if dim == 4 { 16 } else { 64 }))
    ) {
        let dim = gens.len();
        let n_mod = det(&gens).abs();
        let l = IntegerLattice::from_integers(dim, &gens).unwrap();
        let cosets = (n_mod as usize).pow(dim as u32) / image(&gens, n_mod).len();
        prop_assert_eq!(l.index_in(&IntegerLattice::standard(dim)).unwrap(), BigInt::from(cosets));
        prop_assert_eq!(cosets as i64, n_mod);
    }

    #[test]
    fn sum_and_intersection_match_cosets((a, b) in pair(2, 24)) {
        let da = det(&a).abs();
        let db = det(&b).abs();
        let n_mod = da / gcd(da, db) * db;
        let ia = image(&a, n_mod);
        let ib = image(&b, n_mod);
        let total = (n_mod as usize).pow(2);
        let meet = ia.intersection(&ib).count();
        let join = image(&[a.clone(), b.clone()].concat(), n_mod).len();

        let la = IntegerLattice::from_integers(2, &a).unwrap();
        let lb = IntegerLattice::from_integers(2, &b).unwrap();
        let z = IntegerLattice::standard(2);
        let s = la.sum(&lb).unwrap();
        let i = la.intersect(&lb).unwrap();
        prop_assert_eq!(i.index_in(&z).unwrap(), BigInt::from(total / meet));
        prop_assert_eq!(s.index_in(&z).unwrap(), BigInt::from(total / join));
        // (L1 : L1 ∩ L2) = (L1 + L2 : L2)
        prop_assert_eq!(i.index_in(&la).unwrap(), lb.index_in(&s).unwrap());
    }

    #[test]
    fn sum_and_intersection_in_dim_three((a, b) in pair(3, 12)) {
        let da = det(&a).abs();
        let db = det(&b).abs();
        let n_mod = da / gcd(da, db) * db;
        prop_assume!(n_mod <= 40);
        let ia = image(&a, n_mod);
        let ib = image(&b, n_mod);
        let total = (n_mod as usize).pow(3);
        let la = IntegerLattice::from_integers(3, &a).unwrap();
        let lb = IntegerLattice::from_integers(3, &b).unwrap();
        let z = IntegerLattice::standard(3);
        let meet = ia.intersection(&ib).count();
        prop_assert_eq!(la.intersect(&lb).unwrap().index_in(&z).unwrap(), BigInt::from(total / meet));
    }
}

#[test]
fn known_index() {
    let l = IntegerLattice::from_integers(2, &[vec![2, 1], vec![0, 3]]).unwrap();
    assert_eq!(image(&[vec![2, 1], vec![0, 3]], 6).len(), 6);
    assert_eq!(
        l.index_in(&IntegerLattice::standard(2)).unwrap(),
        BigInt::from(6)
    );
}
