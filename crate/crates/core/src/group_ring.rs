//! Exact arithmetic in `Q[G]` and `Z[G]` for an elementary abelian 2-group `G = (Z/2)^m`.
//!
//! Group elements are bitmasks `0..2^m`, the group law is XOR, and bit `i` stands
//! for the automorphism moving `sqrt(d_i)` and fixing the other generators of the
//! field. Characters are also bitmasks: `chi_b(g) = (-1)^popcount(b & g)`, so the
//! character with mask `b` has kernel equal to the stabilizer of `sqrt(d_b)`.

use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub const MAX_RANK: usize = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ExpTwoGroup {
    rank: usize,
}

impl ExpTwoGroup {
    pub fn new(rank: usize) -> Result<Self> {
        if rank > MAX_RANK {
            return Err(Error::RankTooLarge(rank));
        }
        Ok(ExpTwoGroup { rank })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn order(&self) -> usize {
        1 << self.rank
    }

    pub fn elements(&self) -> impl Iterator<Item = u32> {
        0..self.order() as u32
    }

    pub fn contains(&self, g: u32) -> bool {
        (g as usize) < self.order()
    }

    /// Nontrivial characters in mask order.
    pub fn nontrivial_characters(&self) -> impl Iterator<Item = CharacterIndex> {
        (1..self.order() as u32).map(CharacterIndex)
    }

    pub fn characters(&self) -> impl Iterator<Item = CharacterIndex> {
        (0..self.order() as u32).map(CharacterIndex)
    }

    /// Order of an element: 1 for the identity, 2 otherwise.
    pub fn element_order(g: u32) -> u32 {
        if g == 0 {
            1
        } else {
            2
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CharacterIndex(pub u32);

impl CharacterIndex {
    pub const TRIVIAL: CharacterIndex = CharacterIndex(0);

    pub fn value(self, sigma: u32) -> i32 {
        if (self.0 & sigma).count_ones().is_multiple_of(2) {
            1
        } else {
            -1
        }
    }

    pub fn is_trivial(self) -> bool {
        self.0 == 0
    }

    /// The fixed element outside the kernel: the lowest generator moved by the character.
    pub fn tau(self) -> Option<u32> {
        (self.0 != 0).then(|| 1 << self.0.trailing_zeros())
    }

    pub fn kernel(self, group: ExpTwoGroup) -> Vec<u32> {
        group.elements().filter(|&g| self.value(g) == 1).collect()
    }

    /// An F2-basis of the kernel.
    pub fn kernel_basis(self, group: ExpTwoGroup) -> Vec<u32> {
        let (basis, _) = f2_echelon(&self.kernel(group));
        basis
    }
}

/// Reduced echelon basis over F2 with pivot = highest set bit of each vector.
pub fn f2_echelon(vectors: &[u32]) -> (Vec<u32>, Vec<u32>) {
    let mut basis: Vec<u32> = Vec::new();
    for &v in vectors {
        let mut v = v;
        for &b in &basis {
            let pivot = 31 - b.leading_zeros();
            if v >> pivot & 1 == 1 {
                v ^= b;
            }
        }
        if v != 0 {
            let pivot = 31 - v.leading_zeros();
            for b in basis.iter_mut() {
                if *b >> pivot & 1 == 1 {
                    *b ^= v;
                }
            }
            basis.push(v);
        }
    }
    basis.sort_unstable_by_key(|b| std::cmp::Reverse(*b));
    let pivots = basis
        .iter()
        .map(|b| 1 << (31 - b.leading_zeros()))
        .collect();
    (basis, pivots)
}

/// Canonical surjection `G -> G/H` for the subgroup `H` spanned by `generators`.
///
/// The image of `g` is obtained by clearing the pivot bits of `H`'s echelon basis
/// and compressing the remaining bit positions.
#[derive(Clone, Debug)]
pub struct QuotientMap {
    ambient: ExpTwoGroup,
    basis: Vec<u32>,
    free_bits: Vec<u32>,
    quotient: ExpTwoGroup,
}

impl QuotientMap {
    pub fn new(ambient: ExpTwoGroup, generators: &[u32]) -> Result<Self> {
        if let Some(&g) = generators.iter().find(|&&g| !ambient.contains(g)) {
            return Err(Error::NotASubgroup(vec![g]));
        }
        let (basis, pivots) = f2_echelon(generators);
        let pivot_mask: u32 = pivots.iter().fold(0, |a, p| a | p);
        let free_bits: Vec<u32> = (0..ambient.rank() as u32)
            .filter(|i| pivot_mask >> i & 1 == 0)
            .collect();
        let quotient = ExpTwoGroup::new(free_bits.len())?;
        Ok(QuotientMap {
            ambient,
            basis,
            free_bits,
            quotient,
        })
    }

    pub fn quotient(&self) -> ExpTwoGroup {
        self.quotient
    }

    pub fn ambient(&self) -> ExpTwoGroup {
        self.ambient
    }

    pub fn image(&self, g: u32) -> u32 {
        let mut v = g;
        for &b in &self.basis {
            let pivot = 31 - b.leading_zeros();
            if v >> pivot & 1 == 1 {
                v ^= b;
            }
        }
        self.free_bits
            .iter()
            .enumerate()
            .fold(0, |acc, (j, &bit)| acc | ((v >> bit & 1) << j))
    }

    pub fn apply(&self, a: &GroupRingElem) -> Result<GroupRingElem> {
        check_group(self.ambient, a.group)?;
        let mut coeffs = vec![BigRational::zero(); self.quotient.order()];
        for (g, c) in a.coeffs.iter().enumerate() {
            coeffs[self.image(g as u32) as usize] += c;
        }
        Ok(GroupRingElem {
            group: self.quotient,
            coeffs,
        })
    }
}

fn check_group(a: ExpTwoGroup, b: ExpTwoGroup) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(Error::GroupMismatch {
            left: a.rank(),
            right: b.rank(),
        })
    }
}

/// An element of `Q[G]`, coefficients indexed by group bitmask.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GroupRingElem {
    group: ExpTwoGroup,
    coeffs: Vec<BigRational>,
}

impl GroupRingElem {
    pub fn new(group: ExpTwoGroup, coeffs: Vec<BigRational>) -> Result<Self> {
        if coeffs.len() != group.order() {
            return Err(Error::BadLength {
                len: coeffs.len(),
                order: group.order(),
            });
        }
        Ok(GroupRingElem { group, coeffs })
    }

    pub fn from_ints(group: ExpTwoGroup, coeffs: &[i64]) -> Result<Self> {
        Self::new(
            group,
            coeffs
                .iter()
                .map(|&c| BigRational::from_integer(c.into()))
                .collect(),
        )
    }

    /// Builds an element from a coefficient vector whose length is a power of two.
    pub fn from_vec(coeffs: Vec<BigRational>) -> Result<Self> {
        let len = coeffs.len();
        if !len.is_power_of_two() {
            return Err(Error::BadLength { len, order: 0 });
        }
        let group = ExpTwoGroup::new(len.trailing_zeros() as usize)?;
        Self::new(group, coeffs)
    }

    pub fn zero(group: ExpTwoGroup) -> Self {
        GroupRingElem {
            group,
            coeffs: vec![BigRational::zero(); group.order()],
        }
    }

    pub fn one(group: ExpTwoGroup) -> Self {
        Self::scalar(group, BigRational::one())
    }

    pub fn scalar(group: ExpTwoGroup, c: BigRational) -> Self {
        let mut e = Self::zero(group);
        e.coeffs[0] = c;
        e
    }

    /// The group element `g` viewed in the group ring.
    pub fn basis(group: ExpTwoGroup, g: u32) -> Self {
        let mut e = Self::zero(group);
        e.coeffs[g as usize] = BigRational::one();
        e
    }

    pub fn group(&self) -> ExpTwoGroup {
        self.group
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn coeff(&self, g: u32) -> &BigRational {
        &self.coeffs[g as usize]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn is_integral(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_integer())
    }

    /// Sum of coefficients.
    pub fn augmentation(&self) -> BigRational {
        self.coeffs.iter().fold(BigRational::zero(), |a, c| a + c)
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        GroupRingElem {
            group: self.group,
            coeffs: self.coeffs.iter().map(|x| x * c).collect(),
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        check_group(self.group, other.group)?;
        Ok(GroupRingElem {
            group: self.group,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.try_add(&-other)
    }

    /// Product in `Q[G]`: the XOR convolution of coefficient vectors.
    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        check_group(self.group, other.group)?;
        let n = self.group.order();
        let mut coeffs = vec![BigRational::zero(); n];
        for (x, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (y, b) in other.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                coeffs[x ^ y] += a * b;
            }
        }
        Ok(GroupRingElem {
            group: self.group,
            coeffs,
        })
    }

    /// Values `chi(a) = sum_sigma chi(sigma) a_sigma` for every character, indexed by mask.
    pub fn character_transform(&self) -> Vec<BigRational> {
        let mut v = self.coeffs.clone();
        walsh_hadamard(&mut v);
        v
    }

    /// `sum_chi v_chi e_chi`.
    pub fn inverse_character_transform(group: ExpTwoGroup, v: &[BigRational]) -> Result<Self> {
        if v.len() != group.order() {
            return Err(Error::BadLength {
                len: v.len(),
                order: group.order(),
            });
        }
        let mut coeffs = v.to_vec();
        walsh_hadamard(&mut coeffs);
        let inv = BigRational::new(BigInt::one(), BigInt::from(group.order()));
        for c in coeffs.iter_mut() {
            *c *= &inv;
        }
        Ok(GroupRingElem { group, coeffs })
    }

    /// The idempotent `e_chi = 2^-m sum_sigma chi(sigma) sigma`.
    pub fn idempotent(group: ExpTwoGroup, chi: CharacterIndex) -> Self {
        let n = group.order();
        let coeffs = group
            .elements()
            .map(|g| BigRational::new(BigInt::from(chi.value(g)), BigInt::from(n)))
            .collect();
        GroupRingElem { group, coeffs }
    }

    /// Image in `Z[G/H]` where `H` is generated by `kernel_generators`.
    pub fn project_quotient(&self, kernel_generators: &[u32]) -> Result<Self> {
        QuotientMap::new(self.group, kernel_generators)?.apply(self)
    }

    /// Places an element of `Q[H]` into `Q[G]`, where bit `i` of `H` maps to `generators[i]`.
    pub fn embed_subring(&self, ambient: ExpTwoGroup, generators: &[u32]) -> Result<Self> {
        let (basis, _) = f2_echelon(generators);
        if generators.len() != self.group.rank()
            || basis.len() != generators.len()
            || generators.iter().any(|&g| !ambient.contains(g))
        {
            return Err(Error::NotASubgroup(generators.to_vec()));
        }
        let mut coeffs = vec![BigRational::zero(); ambient.order()];
        for (x, c) in self.coeffs.iter().enumerate() {
            let image = generators
                .iter()
                .enumerate()
                .filter(|(i, _)| x >> i & 1 == 1)
                .fold(0u32, |acc, (_, &g)| acc ^ g);
            coeffs[image as usize] = c.clone();
        }
        Ok(GroupRingElem {
            group: ambient,
            coeffs,
        })
    }

    /// Integer coefficients, when integral.
    pub fn to_integers(&self) -> Option<Vec<BigInt>> {
        self.is_integral()
            .then(|| self.coeffs.iter().map(|c| c.to_integer()).collect())
    }

    pub fn max_abs_denominator(&self) -> BigInt {
        self.coeffs
            .iter()
            .map(|c| c.denom().abs())
            .max()
            .unwrap_or_else(BigInt::one)
    }
}

/// In-place unnormalized Walsh-Hadamard transform.
fn walsh_hadamard(v: &mut [BigRational]) {
    let n = v.len();
    let mut h = 1;
    while h < n {
        for start in (0..n).step_by(2 * h) {
            for i in start..start + h {
                let a = v[i].clone();
                let b = v[i + h].clone();
                v[i] = &a + &b;
                v[i + h] = a - b;
            }
        }
        h *= 2;
    }
}

impl Add for &GroupRingElem {
    type Output = GroupRingElem;
    fn add(self, rhs: &GroupRingElem) -> GroupRingElem {
        self.try_add(rhs)
            .expect("group ring elements over different groups")
    }
}

impl Sub for &GroupRingElem {
    type Output = GroupRingElem;
    fn sub(self, rhs: &GroupRingElem) -> GroupRingElem {
        self.try_sub(rhs)
            .expect("group ring elements over different groups")
    }
}

impl Mul for &GroupRingElem {
    type Output = GroupRingElem;
    fn mul(self, rhs: &GroupRingElem) -> GroupRingElem {
        self.try_mul(rhs)
            .expect("group ring elements over different groups")
    }
}

impl Neg for &GroupRingElem {
    type Output = GroupRingElem;
    fn neg(self) -> GroupRingElem {
        GroupRingElem {
            group: self.group,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct ElemRepr {
    #[serde(with = "crate::serial::rational_vec")]
    coeffs: Vec<BigRational>,
}

impl Serialize for GroupRingElem {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ElemRepr {
            coeffs: self.coeffs.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for GroupRingElem {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = ElemRepr::deserialize(d)?;
        GroupRingElem::from_vec(repr.coeffs).map_err(serde::de::Error::custom)
    }
}
