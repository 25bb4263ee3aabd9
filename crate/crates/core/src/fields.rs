//! Multi-quadratic fields `E = Q(sqrt(d_1), ..., sqrt(d_m))` described by square classes.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{self, exact_sqrt, fundamental_discriminant, kronecker};
use crate::error::{Error, Result};
use crate::group_ring::{CharacterIndex, ExpTwoGroup};

/// `w2(Q)`.
pub const W2_RATIONALS: u64 = 24;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiQuadField {
    generators: Vec<u64>,
    group: ExpTwoGroup,
    /// Squarefree kernel `d_b` for every bitmask `b` (`d_0 = 1`).
    kernels: Vec<u64>,
    kernel_primes: Vec<Vec<u64>>,
}

impl MultiQuadField {
    /// Validates the generators and fixes the bitmask convention by input order.
    pub fn new(generators: &[i64]) -> Result<Self> {
        let group = ExpTwoGroup::new(generators.len())?;
        let mut gen_primes = Vec::with_capacity(generators.len());
        let mut gens = Vec::with_capacity(generators.len());
        for &d in generators {
            if d <= 0 {
                return Err(Error::NotTotallyReal(d));
            }
            let primes = arith::odd_primes_of(d as u64);
            if primes.is_empty() {
                return Err(Error::SquareGenerator(d));
            }
            gens.push(primes.iter().product());
            gen_primes.push(primes);
        }
        let mut kernels = Vec::with_capacity(group.order());
        let mut kernel_primes = Vec::with_capacity(group.order());
        for b in group.elements() {
            let mut set: BTreeSet<u64> = BTreeSet::new();
            for (i, primes) in gen_primes.iter().enumerate() {
                if b >> i & 1 == 1 {
                    for p in primes {
                        if !set.remove(p) {
                            set.insert(*p);
                        }
                    }
                }
            }
            if b != 0 && set.is_empty() {
                return Err(Error::DependentGenerators(b));
            }
            let d = set
                .iter()
                .try_fold(1u64, |acc, &p| acc.checked_mul(p))
                .ok_or(Error::Overflow)?;
            // keep 4 * d representable for discriminants
            if d > (i64::MAX / 4) as u64 {
                return Err(Error::Overflow);
            }
            kernels.push(d);
            kernel_primes.push(set.into_iter().collect());
        }
        Ok(MultiQuadField {
            generators: gens,
            group,
            kernels,
            kernel_primes,
        })
    }

    /// The field `Q`.
    pub fn rationals() -> Self {
        Self::new(&[]).expect("empty generator list")
    }

    /// Parses `"d1,d2,..."`; an empty string or `"1"` is `Q`.
    pub fn parse(spec: &str) -> Result<Self> {
        let spec = spec.trim();
        if spec.is_empty() || spec == "1" {
            return Ok(Self::rationals());
        }
        let gens: Vec<i64> = spec
            .split(',')
            .map(|s| {
                s.trim()
                    .parse::<i64>()
                    .map_err(|_| Error::BadSpec(spec.to_string()))
            })
            .collect::<Result<_>>()?;
        Self::new(&gens)
    }

    pub fn spec(&self) -> String {
        self.generators
            .iter()
            .map(|d| d.to_string())
            .collect::<Vec<_>>()
            .join(",")
    }

    pub fn generators(&self) -> &[u64] {
        &self.generators
    }

    pub fn group(&self) -> ExpTwoGroup {
        self.group
    }

    pub fn rank(&self) -> usize {
        self.group.rank()
    }

    pub fn degree(&self) -> u64 {
        self.group.order() as u64
    }

    /// Squarefree `d_b` with `E_chi = Q(sqrt(d_b))` for `chi` of mask `b`.
    pub fn kernel(&self, chi: CharacterIndex) -> u64 {
        self.kernels[chi.0 as usize]
    }

    /// Discriminant of `E_chi`, or 1 for the trivial character.
    pub fn discriminant(&self, chi: CharacterIndex) -> i64 {
        if chi.is_trivial() {
            1
        } else {
            fundamental_discriminant(self.kernel(chi) as i64)
        }
    }

    /// `chi(p)` as the Kronecker symbol of the discriminant of `E_chi`.
    pub fn character_at(&self, chi: CharacterIndex, p: u64) -> i8 {
        kronecker(self.discriminant(chi), p as i64)
    }

    /// Rational primes ramified in `E`.
    pub fn ramified_primes(&self) -> Vec<u64> {
        let mut set = BTreeSet::new();
        for chi in self.group.nontrivial_characters() {
            set.extend(self.kernel_primes[chi.0 as usize].iter().copied());
            if self.discriminant(chi) % 2 == 0 {
                set.insert(2);
            }
        }
        set.into_iter().collect()
    }

    pub fn is_ramified(&self, p: u64) -> bool {
        self.ramified_primes().contains(&p)
    }

    /// The character whose field is `Q(sqrt 2)`, if `sqrt 2` lies in `E`.
    pub fn sqrt2_character(&self) -> Option<CharacterIndex> {
        self.group
            .nontrivial_characters()
            .find(|&c| self.kernel(c) == 2)
    }

    pub fn contains_sqrt(&self, d: u64) -> bool {
        self.group
            .nontrivial_characters()
            .any(|c| self.kernel(c) == d)
    }

    /// `w2(E) = 24 * (2 if sqrt 2 in E) * (5 if sqrt 5 in E)`.
    pub fn w2(&self) -> u64 {
        let mut w = W2_RATIONALS;
        if self.contains_sqrt(2) {
            w *= 2;
        }
        if self.contains_sqrt(5) {
            w *= 5;
        }
        w
    }

    /// `1` or `2`: the constant `delta_{E/Q}`, equal to 2 iff `sqrt 2` lies in `E`.
    pub fn delta(&self) -> u64 {
        if self.contains_sqrt(2) {
            2
        } else {
            1
        }
    }

    /// The quadratic field `E_chi` as a field of its own.
    pub fn subfield(&self, chi: CharacterIndex) -> Result<MultiQuadField> {
        if chi.is_trivial() {
            return Err(Error::TrivialCharacter);
        }
        MultiQuadField::new(&[self.kernel(chi) as i64])
    }

    pub fn subfield_data(&self, chi: CharacterIndex) -> Result<QuadraticSubfieldData> {
        if chi.is_trivial() {
            return Err(Error::TrivialCharacter);
        }
        let d = self.kernel(chi);
        let w2 = self.subfield(chi)?.w2();
        let (w2_minus, delta) = w2_minus(d, w2)?;
        Ok(QuadraticSubfieldData {
            chi,
            d,
            disc: self.discriminant(chi),
            is_first_layer: d == 2,
            w2,
            w2_minus,
            delta,
        })
    }

    /// Frobenius at an unramified prime: bit `i` is set iff it moves `sqrt(d_i)`.
    pub fn artin_symbol(&self, q: u64) -> Result<u32> {
        arith::ensure_prime(q)?;
        if self.is_ramified(q) {
            return Err(Error::Ramified(q));
        }
        Ok(self
            .generators
            .iter()
            .enumerate()
            .filter(|(_, &d)| kronecker(fundamental_discriminant(d as i64), q as i64) == -1)
            .fold(0u32, |acc, (i, _)| acc | 1 << i))
    }

    /// `(e, f, g)` for the rational prime `p` in `E`.
    pub fn splitting(&self, p: u64) -> (u64, u64, u64) {
        let unramified: Vec<CharacterIndex> = self
            .group
            .characters()
            .filter(|&c| self.discriminant(c) % p as i64 != 0)
            .collect();
        let size = unramified.len() as u64;
        let f = if unramified.iter().any(|&c| self.character_at(c, p) == -1) {
            2
        } else {
            1
        };
        (self.degree() / size, f, size / f)
    }

    /// `|S_E|`: infinite places plus primes of `E` above the finite primes of `S`.
    pub fn places_above(&self, s: &PlaceSet) -> Result<u64> {
        s.check_covers(self)?;
        Ok(self.degree() + s.finite().map(|p| self.splitting(p).2).sum::<u64>())
    }

    /// Square classes of `E ∩ Q`: is the rational `a` a square in `E`?
    pub fn square_class_test(&self, a: &BigRational) -> Result<SquareClass> {
        if a.is_zero() {
            return Err(Error::ZeroSquareClass);
        }
        if a.is_negative() {
            return Ok(SquareClass::Nonsquare);
        }
        let n: BigInt = a.numer() * a.denom();
        let n = n.to_u64().ok_or(Error::Overflow)?;
        let k = arith::squarefree_kernel(n);
        if k == 1 {
            return Ok(SquareClass::Square { subfield: None });
        }
        Ok(self
            .group
            .nontrivial_characters()
            .find(|&c| self.kernel(c) == k)
            .map_or(SquareClass::Nonsquare, |c| SquareClass::Square {
                subfield: Some(c),
            }))
    }

    /// Every prime power dividing `w2(E)` divides `w2(E_chi)` for some nontrivial `chi`.
    pub fn w2_prime_powers_covered(&self) -> bool {
        if self.rank() == 0 {
            return true;
        }
        let sub_w2: Vec<u64> = self
            .group
            .nontrivial_characters()
            .map(|c| self.subfield(c).map(|f| f.w2()).unwrap_or(0))
            .collect();
        arith::factor(self.w2()).into_iter().all(|(p, e)| {
            (1..=e).all(|t| {
                let pt = p.pow(t);
                sub_w2.iter().any(|w| w % pt == 0)
            })
        })
    }
}

impl fmt::Display for MultiQuadField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.generators.is_empty() {
            return write!(f, "Q");
        }
        let parts: Vec<String> = self.generators.iter().map(|d| format!("√{d}")).collect();
        write!(f, "Q({})", parts.join(","))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "class", rename_all = "snake_case")]
pub enum SquareClass {
    /// A square in `E`; `subfield` names the `E_chi` with `a * d_chi` a rational square.
    Square {
        subfield: Option<CharacterIndex>,
    },
    Nonsquare,
}

/// `(w2(E)^-, delta)` for `E = Q(sqrt d)` with `w2(E) = w2`.
pub fn w2_minus(d: u64, w2: u64) -> Result<(u64, u64)> {
    let delta = if d == 2 { 1 } else { 2 };
    let value = w2 * delta / W2_RATIONALS;
    if value % 4 != 2 {
        return Err(Error::W2Congruence(value));
    }
    Ok((value, delta))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadraticSubfieldData {
    pub chi: CharacterIndex,
    pub d: u64,
    pub disc: i64,
    pub is_first_layer: bool,
    pub w2: u64,
    pub w2_minus: u64,
    pub delta: u64,
}

/// The finite primes of `S`; the infinite place of `Q` is always included.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct PlaceSet {
    finite_primes: BTreeSet<u64>,
    includes_infinity: bool,
}

impl PlaceSet {
    pub fn new(primes: &[u64]) -> Result<Self> {
        for &p in primes {
            arith::ensure_prime(p)?;
        }
        Ok(PlaceSet {
            finite_primes: primes.iter().copied().collect(),
            includes_infinity: true,
        })
    }

    pub fn infinite_only() -> Self {
        PlaceSet {
            finite_primes: BTreeSet::new(),
            includes_infinity: true,
        }
    }

    /// Parses `"p1,p2,..."`; empty means `{infinity}`.
    pub fn parse(spec: &str) -> Result<Self> {
        let spec = spec.trim();
        if spec.is_empty() {
            return Ok(Self::infinite_only());
        }
        let primes: Vec<u64> = spec
            .split(',')
            .map(|s| {
                s.trim()
                    .parse::<u64>()
                    .map_err(|_| Error::BadSpec(spec.to_string()))
            })
            .collect::<Result<_>>()?;
        Self::new(&primes)
    }

    /// `S` for `field`, rejecting sets that miss a ramified prime.
    pub fn for_field(field: &MultiQuadField, primes: &[u64]) -> Result<Self> {
        let s = Self::new(primes)?;
        s.check_covers(field)?;
        Ok(s)
    }

    /// Adds the missing ramified primes of `field`; returns the added primes.
    pub fn completed_for(&self, field: &MultiQuadField) -> (Self, Vec<u64>) {
        let missing = self.missing_for(field);
        let mut s = self.clone();
        s.finite_primes.extend(missing.iter().copied());
        (s, missing)
    }

    pub fn missing_for(&self, field: &MultiQuadField) -> Vec<u64> {
        field
            .ramified_primes()
            .into_iter()
            .filter(|p| !self.finite_primes.contains(p))
            .collect()
    }

    pub fn check_covers(&self, field: &MultiQuadField) -> Result<()> {
        let missing = self.missing_for(field);
        if missing.is_empty() {
            Ok(())
        } else {
            Err(Error::MissingRamified(missing))
        }
    }

    pub fn finite(&self) -> impl Iterator<Item = u64> + '_ {
        self.finite_primes.iter().copied()
    }

    pub fn contains(&self, p: u64) -> bool {
        self.finite_primes.contains(&p)
    }

    /// `|S|` over `Q`.
    pub fn size(&self) -> u64 {
        1 + self.finite_primes.len() as u64
    }

    pub fn with_prime(&self, p: u64) -> Result<Self> {
        arith::ensure_prime(p)?;
        let mut s = self.clone();
        s.finite_primes.insert(p);
        Ok(s)
    }

    pub fn spec(&self) -> String {
        self.finite_primes
            .iter()
            .map(|p| p.to_string())
            .collect::<Vec<_>>()
            .join(",")
    }

    /// Largest finite prime in `S`, or 1.
    pub fn max_prime(&self) -> u64 {
        self.finite_primes.iter().next_back().copied().unwrap_or(1)
    }
}

impl fmt::Display for PlaceSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{∞")?;
        for p in &self.finite_primes {
            write!(f, ",{p}")?;
        }
        write!(f, "}}")
    }
}

/// `|S_{E_chi}|` for the real quadratic field of discriminant `disc`: two real places,
/// two places above each split prime and one above each inert or ramified prime.
pub fn places_above_quadratic(disc: i64, s: &PlaceSet) -> u64 {
    2 + s
        .finite()
        .map(|p| if kronecker(disc, p as i64) == 1 { 2 } else { 1 })
        .sum::<u64>()
}

/// Searches `|y| <= bound` for `x^2 - d y^2 = r`; returns `(x, y)` with `x, y >= 0`.
pub fn norm_form_solve(d: i64, r: i64, bound: u64) -> Option<(i128, i128)> {
    let (d, r) = (d as i128, r as i128);
    (0..=bound as i128).find_map(|y| {
        let t = r + d * y * y;
        exact_sqrt(t).map(|x| (x, y))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn field(g: &[i64]) -> MultiQuadField {
        MultiQuadField::new(g).unwrap()
    }

    fn subfields(f: &MultiQuadField) -> BTreeSet<u64> {
        f.group()
            .nontrivial_characters()
            .map(|c| f.kernel(c))
            .collect()
    }

    #[test]
    fn build_field_validation() {
        assert!(MultiQuadField::new(&[2, 5]).is_ok());
        assert_eq!(
            MultiQuadField::new(&[2, 8]),
            Err(Error::DependentGenerators(3))
        );
        assert_eq!(
            MultiQuadField::new(&[5, -1]),
            Err(Error::NotTotallyReal(-1))
        );
        assert_eq!(MultiQuadField::new(&[1]), Err(Error::SquareGenerator(1)));
        assert_eq!(MultiQuadField::new(&[9]), Err(Error::SquareGenerator(9)));
        assert_eq!(field(&[12]).generators(), &[3]);
        assert!(MultiQuadField::new(&[2, 3, 5, 7, 11, 13, 17]).is_err());
    }

    #[test]
    fn subfield_sets() {
        assert_eq!(subfields(&field(&[2, 5])), BTreeSet::from([2, 5, 10]));
        assert_eq!(subfields(&field(&[5])), BTreeSet::from([5]));
        assert_eq!(subfields(&field(&[3, 7])), BTreeSet::from([3, 7, 21]));
        assert_eq!(subfields(&field(&[6, 10])), BTreeSet::from([6, 10, 15]));
        assert!(field(&[5]).subfield_data(CharacterIndex(0)).is_err());
    }

    #[test]
    fn artin_symbols() {
        let f = field(&[2, 5]);
        assert_eq!(f.artin_symbol(19).unwrap(), 0b01);
        assert_eq!(f.artin_symbol(41).unwrap(), 0);
        assert_eq!(field(&[5]).artin_symbol(5), Err(Error::Ramified(5)));
        assert_eq!(f.artin_symbol(2), Err(Error::Ramified(2)));
        assert_eq!(f.artin_symbol(9), Err(Error::NotPrime(9)));
    }

    #[test]
    fn artin_symbol_agrees_with_subfield_characters() {
        for g in [
            vec![2, 5],
            vec![3, 7],
            vec![5, 13],
            vec![6, 10],
            vec![2, 3, 5],
            vec![5, 13, 17],
        ] {
            let f = field(&g);
            for q in arith::primes_up_to(500) {
                let Ok(sigma) = f.artin_symbol(q) else {
                    continue;
                };
                for chi in f.group().nontrivial_characters() {
                    assert_eq!(chi.value(sigma), f.character_at(chi, q) as i32, "{f} q={q}");
                }
            }
        }
    }

    #[test]
    fn w2_values() {
        assert_eq!(MultiQuadField::rationals().w2(), 24);
        assert_eq!(field(&[2, 5]).w2(), 240);
        assert_eq!(field(&[3, 7]).w2(), 24);
        assert_eq!(field(&[2]).w2(), 48);
        assert_eq!(field(&[5]).w2(), 120);
        assert_eq!(field(&[3, 6]).w2(), 48);
    }

    #[test]
    fn w2_minus_values() {
        assert_eq!(w2_minus(2, 48).unwrap(), (2, 1));
        assert_eq!(w2_minus(5, 120).unwrap(), (10, 2));
        assert_eq!(w2_minus(3, 24).unwrap(), (2, 2));
        assert_eq!(w2_minus(3, 48), Err(Error::W2Congruence(4)));
        let data = field(&[2, 5]).subfield_data(CharacterIndex(3)).unwrap();
        assert_eq!(
            (data.d, data.disc, data.w2, data.w2_minus, data.delta),
            (10, 40, 24, 2, 2)
        );
    }

    #[test]
    fn w2_divisibility_and_coverage() {
        for g in [
            vec![2, 5],
            vec![3, 7],
            vec![2, 3, 5],
            vec![5, 13],
            vec![3, 6],
        ] {
            let f = field(&g);
            for chi in f.group().nontrivial_characters() {
                let d = f.subfield_data(chi).unwrap();
                assert_eq!(f.w2() % d.w2, 0);
                assert_eq!(d.w2_minus % 4, 2);
            }
            assert!(f.w2_prime_powers_covered());
        }
    }

    #[test]
    fn place_counts() {
        let s = PlaceSet::new(&[2, 5]).unwrap();
        assert_eq!(s.size(), 3);
        assert_eq!(places_above_quadratic(5, &s), 4);
        assert_eq!(
            places_above_quadratic(8, &PlaceSet::new(&[2, 7]).unwrap()),
            5
        );
    }

    #[test]
    fn full_field_places_agree_with_quadratic_count() {
        for d in [2i64, 3, 5, 13, 17] {
            let f = field(&[d]);
            let s = PlaceSet::new(&f.ramified_primes()).unwrap();
            for extra in [3u64, 7, 11, 17, 19] {
                let s = s.with_prime(extra).unwrap();
                let disc = f.discriminant(CharacterIndex(1));
                assert_eq!(
                    f.places_above(&s).unwrap(),
                    places_above_quadratic(disc, &s)
                );
            }
        }
    }

    #[test]
    fn splitting_in_biquadratic() {
        let f = field(&[2, 5]);
        // 2 ramifies in Q(√2), Q(√10) and is inert in Q(√5); 5 is inert in Q(√2)
        assert_eq!(f.splitting(2), (2, 2, 1));
        assert_eq!(f.splitting(5), (2, 2, 1));
        assert_eq!(f.splitting(41), (1, 1, 4));
        assert_eq!(f.splitting(19), (1, 2, 2));
        let s = PlaceSet::new(&[2]).unwrap();
        assert_eq!(f.places_above(&s), Err(Error::MissingRamified(vec![5])));
    }

    #[test]
    fn square_classes() {
        let f = field(&[2, 5]);
        let q = |n: i64, d: i64| BigRational::new(n.into(), d.into());
        assert_eq!(
            f.square_class_test(&q(16, 1)).unwrap(),
            SquareClass::Square { subfield: None }
        );
        assert_eq!(
            f.square_class_test(&q(10, 1)).unwrap(),
            SquareClass::Square {
                subfield: Some(CharacterIndex(3))
            }
        );
        assert_eq!(
            f.square_class_test(&q(5, 4)).unwrap(),
            SquareClass::Square {
                subfield: Some(CharacterIndex(2))
            }
        );
        assert_eq!(
            f.square_class_test(&q(3, 1)).unwrap(),
            SquareClass::Nonsquare
        );
        assert_eq!(
            f.square_class_test(&q(-4, 1)).unwrap(),
            SquareClass::Nonsquare
        );
        assert_eq!(f.square_class_test(&q(0, 1)), Err(Error::ZeroSquareClass));
    }

    #[test]
    fn norm_forms() {
        assert_eq!(norm_form_solve(2, 7, 1000), Some((3, 1)));
        assert_eq!(norm_form_solve(2, 1, 1000), Some((1, 0)));
        assert_eq!(norm_form_solve(2, 3, 10_000), None);
        assert_eq!(norm_form_solve(2, 23, 1000), Some((5, 1)));
    }

    #[test]
    fn place_set_parsing() {
        assert_eq!(PlaceSet::parse("").unwrap().size(), 1);
        assert_eq!(PlaceSet::parse("5,2").unwrap().spec(), "2,5");
        assert!(PlaceSet::parse("4").is_err());
        let f = field(&[2, 5]);
        let (s, added) = PlaceSet::parse("2").unwrap().completed_for(&f);
        assert_eq!(added, vec![5]);
        assert_eq!(s.spec(), "2,5");
        assert_eq!(
            PlaceSet::for_field(&f, &[5]),
            Err(Error::MissingRamified(vec![2]))
        );
    }
}
