//! Randomized invariant suites driven by a seeded ChaCha generator, so that a run is
//! reproducible from the seed recorded in its report.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::arith;
use crate::fields::{places_above_quadratic, MultiQuadField, PlaceSet};
use crate::group_ring::{CharacterIndex, ExpTwoGroup, GroupRingElem, QuotientMap};
use crate::ideals::{self, AnnConfig};
use crate::lattice::IntegerLattice;
use crate::lvalues::{self, euler_multiplier};

pub const DEFAULT_SEED: u64 = 0x5eed_2007;
pub const DEFAULT_CASES: usize = 24;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteResult {
    pub name: String,
    pub cases: usize,
    pub failures: Vec<String>,
}

impl SuiteResult {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PropertyReport {
    pub seed: u64,
    pub cases_per_suite: usize,
    pub suites: Vec<SuiteResult>,
}

impl PropertyReport {
    pub fn passed(&self) -> bool {
        self.suites.iter().all(SuiteResult::passed)
    }
}

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn random_element(rng: &mut impl Rng, group: ExpTwoGroup, max_den: i64) -> GroupRingElem {
    let coeffs = (0..group.order())
        .map(|_| q(rng.gen_range(-20..=20), rng.gen_range(1..=max_den)))
        .collect();
    GroupRingElem::new(group, coeffs).expect("length matches group")
}

pub fn random_lattice(rng: &mut impl Rng, dim: usize, rows: usize) -> IntegerLattice {
    let rows: Vec<Vec<i64>> = (0..rows)
        .map(|_| (0..dim).map(|_| rng.gen_range(-9..=9)).collect())
        .collect();
    IntegerLattice::from_integers(dim, &rows).expect("rows have the lattice dimension")
}

/// A real multi-quadratic field of rank `1..=max_rank` with small generators.
pub fn random_field(rng: &mut impl Rng, max_rank: usize) -> MultiQuadField {
    let pool: Vec<i64> = (2..40)
        .filter(|&d| arith::is_squarefree(d as u64))
        .collect();
    loop {
        let m = rng.gen_range(1..=max_rank);
        let gens: Vec<i64> = pool.choose_multiple(rng, m).copied().collect();
        if let Ok(f) = MultiQuadField::new(&gens) {
            return f;
        }
    }
}

/// Ramified primes plus up to two small extra primes.
pub fn random_places(rng: &mut impl Rng, field: &MultiQuadField) -> PlaceSet {
    let mut s = PlaceSet::new(&field.ramified_primes()).expect("ramified primes are prime");
    let extra = [2u64, 3, 5, 7, 11, 13, 17, 19, 23];
    for _ in 0..rng.gen_range(0..=2) {
        s = s
            .with_prime(*extra.choose(rng).expect("nonempty"))
            .expect("prime");
    }
    s
}

struct Suite {
    name: &'static str,
    cases: usize,
    failures: Vec<String>,
}

impl Suite {
    fn new(name: &'static str) -> Self {
        Suite {
            name,
            cases: 0,
            failures: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if !ok {
            self.failures.push(what());
        }
    }

    fn finish(self) -> SuiteResult {
        SuiteResult {
            name: self.name.to_string(),
            cases: self.cases,
            failures: self.failures,
        }
    }
}

fn group_ring_suite(rng: &mut ChaCha8Rng, n: usize) -> SuiteResult {
    let mut s = Suite::new("group_ring");
    for _ in 0..n {
        s.cases += 1;
        let g = ExpTwoGroup::new(rng.gen_range(0..=3)).expect("small rank");
        let (a, b, c) = (
            random_element(rng, g, 6),
            random_element(rng, g, 6),
            random_element(rng, g, 6),
        );
        s.check(&(&a * &b) * &c == &a * &(&b * &c), || {
            format!("associativity {a:?}")
        });
        s.check(&a * &b == &b * &a, || "commutativity".into());
        s.check(&a * &(&b + &c) == &(&a * &b) + &(&a * &c), || {
            "distributivity".into()
        });
        let (ta, tb, tab) = (
            a.character_transform(),
            b.character_transform(),
            (&a * &b).character_transform(),
        );
        s.check(
            ta.iter().zip(&tb).zip(&tab).all(|((x, y), z)| x * y == *z),
            || "transform is multiplicative".into(),
        );
        s.check(
            GroupRingElem::inverse_character_transform(g, &ta).ok() == Some(a.clone()),
            || "transform round trip".into(),
        );
        s.check(
            (&a * &b).augmentation() == a.augmentation() * b.augmentation(),
            || "augmentation is multiplicative".into(),
        );
        for chi in g.characters() {
            let e = GroupRingElem::idempotent(g, chi);
            s.check(&e * &e == e, || format!("e_{} idempotent", chi.0));
        }
        if g.rank() > 0 {
            let h = rng.gen_range(1..g.order() as u32);
            if let Ok(map) = QuotientMap::new(g, &[h]) {
                let lhs = map.apply(&(&a * &b)).ok();
                let rhs = map.apply(&a).and_then(|x| Ok(&x * &map.apply(&b)?)).ok();
                s.check(lhs == rhs, || "quotient map is a ring map".into());
            }
        }
    }
    s.finish()
}

fn lattice_suite(rng: &mut ChaCha8Rng, n: usize) -> SuiteResult {
    let mut s = Suite::new("lattice");
    for _ in 0..n {
        s.cases += 1;
        let dim = rng.gen_range(1..=4);
        let (ra, rb) = (rng.gen_range(0..=dim + 1), rng.gen_range(0..=dim + 1));
        let a = random_lattice(rng, dim, ra);
        let b = random_lattice(rng, dim, rb);
        let sum = a.sum(&b).expect("same dim");
        let meet = a.intersect(&b).expect("same dim");
        s.check(a.is_sublattice_of(&sum) && b.is_sublattice_of(&sum), || {
            "sum contains both".into()
        });
        s.check(
            meet.is_sublattice_of(&a) && meet.is_sublattice_of(&b),
            || "meet in both".into(),
        );
        let mut rows: Vec<Vec<BigRational>> = a.basis();
        rows.shuffle(rng);
        if rows.len() >= 2 {
            let extra: Vec<BigRational> = rows[0]
                .iter()
                .zip(&rows[1])
                .map(|(x, y)| x * q(3, 1) - y)
                .collect();
            rows.push(extra);
        }
        s.check(
            IntegerLattice::from_rational_rows(dim, &rows).ok() == Some(a.clone()),
            || "HNF is canonical under basis changes".into(),
        );
        if a.is_full_rank() && b.is_full_rank() {
            // (sum : a) = (b : meet) by the second isomorphism theorem
            let i1 = a.index_in(&sum).expect("contained");
            let i2 = meet.index_in(&b).expect("contained");
            s.check(i1 == i2, || format!("second isomorphism {i1} vs {i2}"));
            let k = random_lattice(rng, dim, dim);
            if k.is_full_rank() {
                let inner = a.intersect(&k).expect("same dim");
                let chain = inner.index_in(&a).expect("contained");
                let total = inner.index_in(&sum).expect("contained");
                s.check(
                    total == chain * a.index_in(&sum).expect("contained"),
                    || "index tower".into(),
                );
            }
        }
    }
    s.finish()
}

fn fields_suite(rng: &mut ChaCha8Rng, n: usize) -> SuiteResult {
    let mut s = Suite::new("fields");
    for _ in 0..n {
        s.cases += 1;
        let f = random_field(rng, 3);
        let ps = arith::primes_up_to(400);
        for _ in 0..8 {
            let p = *ps.choose(rng).expect("nonempty");
            if let Ok(sigma) = f.artin_symbol(p) {
                for chi in f.group().nontrivial_characters() {
                    s.check(chi.value(sigma) == f.character_at(chi, p) as i32, || {
                        format!("Artin symbol at {p} in {f}")
                    });
                }
            }
        }
        for chi in f.group().nontrivial_characters() {
            let data = f.subfield_data(chi).expect("nontrivial");
            s.check(f.w2().is_multiple_of(data.w2), || {
                format!("w2(E_chi) | w2(E) in {f}")
            });
            s.check(data.w2_minus % 4 == 2, || format!("w2^- = 2 mod 4 in {f}"));
        }
        s.check(f.w2_prime_powers_covered(), || {
            format!("prime powers of w2 in {f}")
        });
        let set = random_places(rng, &f);
        if f.rank() == 1 {
            let disc = f.discriminant(CharacterIndex(1));
            s.check(
                f.places_above(&set).ok() == Some(places_above_quadratic(disc, &set)),
                || format!("place count for {f}"),
            );
        }
    }
    s.finish()
}

fn lvalues_suite(rng: &mut ChaCha8Rng, n: usize) -> SuiteResult {
    let mut s = Suite::new("lvalues");
    for _ in 0..n {
        s.cases += 1;
        let f = random_field(rng, 3);
        let set = random_places(rng, &f);
        let Ok(recs) = lvalues::l_values(&f, &set) else {
            s.check(false, || format!("L-values for {f}"));
            continue;
        };
        let zeta_q = lvalues::zeta_s_minus1(&MultiQuadField::rationals(), &set).expect("valid S");
        for r in &recs[1..] {
            let sub = f.subfield(r.chi).expect("nontrivial");
            let zeta_sub = lvalues::zeta_s_minus1(&sub, &set).expect("valid S");
            s.check(r.adjusted_l == &zeta_sub / &zeta_q, || {
                format!("L^S = zeta quotient in {f}")
            });
        }
        match lvalues::bt_orders(&f, &set) {
            Ok(bt) => {
                let v = bt.theta.character_transform();
                let sign = |k: u64| {
                    if k.is_multiple_of(2) {
                        BigRational::one()
                    } else {
                        -BigRational::one()
                    }
                };
                let w2f = q(24, 1);
                let k2f = BigRational::from_integer(bt.k2_f.clone());
                s.check(&sign(set.size()) * &v[0] == &k2f / &w2f, || {
                    format!("sign law at chi_0 for {f}")
                });
                for o in &bt.subfields {
                    let rhs = sign(o.places)
                        * (&w2f / q(o.w2 as i64, 1))
                        * (BigRational::from_integer(o.k2.clone()) / &k2f);
                    s.check(&sign(set.size()) * &v[o.chi.0 as usize] == rhs, || {
                        format!("sign law in {f}")
                    });
                    s.check(
                        v[o.chi.0 as usize].abs() * q(o.w2_minus as i64, 1)
                            == BigRational::from_integer(o.k2_minus.clone()),
                        || format!("minus-part identity in {f}"),
                    );
                }
            }
            Err(e) => s.check(false, || format!("orders for {f}: {e}")),
        }
        let p = *[3u64, 5, 7, 11, 13, 29, 31].choose(rng).expect("nonempty");
        if !set.contains(p) {
            let t0 = lvalues::theta_minus1(&f, &set)
                .expect("valid")
                .character_transform();
            let t1 = lvalues::theta_minus1(&f, &set.with_prime(p).expect("prime"))
                .expect("valid")
                .character_transform();
            for chi in f.group().characters() {
                let m = euler_multiplier(f.discriminant(chi), p);
                s.check(t1[chi.0 as usize] == &t0[chi.0 as usize] * m, || {
                    format!("adding {p} to S in {f}")
                });
            }
        }
        s.check(
            lvalues::zeta_factorization_check(&f, &set)
                .map(|c| c.holds())
                .unwrap_or(false),
            || format!("zeta factorization in {f}"),
        );
    }
    s.finish()
}

fn odd_part(x: &BigRational) -> BigRational {
    let mut n = x.numer().abs();
    while !n.is_zero() && (&n % 2u32).is_zero() {
        n /= 2u32;
    }
    BigRational::new(n, x.denom().clone())
}

fn ideals_suite(rng: &mut ChaCha8Rng, n: usize, config: AnnConfig) -> SuiteResult {
    let mut s = Suite::new("ideals");
    for _ in 0..n {
        s.cases += 1;
        let f = random_field(rng, 2);
        let set = random_places(rng, &f);
        let bundle = match ideals::stick_ideal(&f, &set, config) {
            Ok(b) => b,
            Err(e) => {
                s.check(false, || format!("bundle for {f}: {e}"));
                continue;
            }
        };
        let g = f.group();
        s.check(
            ideals::character_diagonal(&bundle.ann.lattice, g)
                == ideals::w2_diagonal(&f).expect("valid"),
            || format!("Ann S diagonal for {f}"),
        );
        s.check(bundle.stick_s == bundle.fit_s_predicted, || {
            format!("Stick S = Fit S for {f}")
        });
        let odd_stick: Vec<BigRational> = ideals::character_diagonal(&bundle.stick_s, g)
            .iter()
            .map(odd_part)
            .collect();
        let odd_fit: Vec<BigRational> = ideals::character_diagonal(&bundle.fit_s_predicted, g)
            .iter()
            .map(odd_part)
            .collect();
        s.check(odd_stick == odd_fit, || format!("odd parts for {f}"));
        match ideals::index_report(&f, &bundle) {
            Ok(r) => {
                s.check(r.index_chain, || format!("index chain for {f}"));
                s.check(r.index_formula.holds(), || format!("index formula for {f}"));
                s.check(r.s_over_r == ideals::maximal_order_index(f.rank()), || {
                    format!("(S:R) for {f}")
                });
            }
            Err(e) => s.check(false, || format!("indices for {f}: {e}")),
        }
        let q = ideals::admissible_primes(&f, 300);
        if let Some(&p) = q.choose(rng) {
            let sigma = f.artin_symbol(p).expect("admissible");
            let gen = GroupRingElem::basis(g, sigma)
                .try_sub(&GroupRingElem::scalar(
                    g,
                    BigRational::from_integer((p * p).into()),
                ))
                .expect("same group");
            s.check(
                gen.try_mul(&bundle.theta)
                    .map(|x| x.is_integral())
                    .unwrap_or(false),
                || format!("integrality at {p} for {f}"),
            );
        }
    }
    s.finish()
}

/// Runs every suite with `cases` random inputs each (the ideal suite uses a quarter).
pub fn run_properties(seed: u64, cases: usize, config: AnnConfig) -> PropertyReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let suites = vec![
        group_ring_suite(&mut rng, cases),
        lattice_suite(&mut rng, cases),
        fields_suite(&mut rng, cases),
        lvalues_suite(&mut rng, cases),
        ideals_suite(&mut rng, cases.div_ceil(4), config),
    ];
    PropertyReport {
        seed,
        cases_per_suite: cases,
        suites,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suites_pass_and_are_reproducible() {
        let a = run_properties(7, 6, AnnConfig::default());
        assert!(a.passed(), "{:?}", a.suites);
        assert_eq!(a, run_properties(7, 6, AnnConfig::default()));
    }
}
