//! Exact Z-lattices in `Q^n` kept in canonical row Hermite normal form.
//!
//! A lattice is stored as `(1/D) * rowspan_Z(H)` where `H` is an integer matrix in
//! row HNF (strictly increasing pivot columns, positive pivots, entries above each
//! pivot reduced into `[0, pivot)`) and `D` is the smallest positive denominator,
//! i.e. `gcd(D, content(H)) = 1`. Two lattices are equal iff their `(D, H)` agree.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group_ring::{ExpTwoGroup, GroupRingElem};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntegerLattice {
    dim: usize,
    denominator: BigInt,
    hnf: Vec<Vec<BigInt>>,
}

/// Outcome of comparing two lattices of the same ambient dimension.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "relation", rename_all = "snake_case")]
pub enum Comparison {
    Equal,
    /// `left` is a sublattice of `right`; `index` is absent when the ranks differ.
    LeftInRight {
        #[serde(with = "opt_bigint")]
        index: Option<BigInt>,
    },
    RightInLeft {
        #[serde(with = "opt_bigint")]
        index: Option<BigInt>,
    },
    Incomparable,
}

mod opt_bigint {
    use num_bigint::BigInt;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &Option<BigInt>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(n) => s.serialize_some(&n.to_string()),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<BigInt>, D::Error> {
        let v = Option::<String>::deserialize(d)?;
        v.map(|s| s.parse().map_err(serde::de::Error::custom))
            .transpose()
    }
}

/// Incremental row-HNF builder over the integers.
struct HnfBuilder {
    dim: usize,
    slots: Vec<Option<Vec<BigInt>>>,
}

impl HnfBuilder {
    fn new(dim: usize) -> Self {
        HnfBuilder {
            dim,
            slots: vec![None; dim],
        }
    }

    fn insert(&mut self, mut v: Vec<BigInt>) {
        debug_assert_eq!(v.len(), self.dim);
        for c in 0..self.dim {
            if v[c].is_zero() {
                continue;
            }
            match self.slots[c].take() {
                None => {
                    if v[c].is_negative() {
                        v.iter_mut().for_each(|x| *x = -&*x);
                    }
                    self.slots[c] = Some(v);
                    return;
                }
                Some(row) => {
                    let a = row[c].clone();
                    let b = v[c].clone();
                    if (&b % &a).is_zero() {
                        let k = &b / &a;
                        axpy(&mut v, &row, &(-k));
                        self.slots[c] = Some(row);
                    } else {
                        let eg = a.extended_gcd(&b);
                        let (g, s, t) = (eg.gcd, eg.x, eg.y);
                        let (g, s, t) = if g.is_negative() {
                            (-g, -s, -t)
                        } else {
                            (g, s, t)
                        };
                        let a_g = &a / &g;
                        let b_g = &b / &g;
                        let new_row: Vec<BigInt> =
                            row.iter().zip(&v).map(|(r, x)| &s * r + &t * x).collect();
                        let new_v: Vec<BigInt> = row
                            .iter()
                            .zip(&v)
                            .map(|(r, x)| &a_g * x - &b_g * r)
                            .collect();
                        self.slots[c] = Some(new_row);
                        v = new_v;
                    }
                }
            }
        }
    }

    /// Canonical reduced rows, ordered by pivot column.
    fn finish(&self) -> Vec<Vec<BigInt>> {
        let mut rows: Vec<(usize, Vec<BigInt>)> = self
            .slots
            .iter()
            .enumerate()
            .filter_map(|(c, r)| r.clone().map(|r| (c, r)))
            .collect();
        for i in 0..rows.len() {
            let (c, pivot_row) = rows[i].clone();
            let p = &pivot_row[c];
            for row in rows.iter_mut().take(i) {
                let q = row.1[c].div_floor(p);
                if !q.is_zero() {
                    axpy(&mut row.1, &pivot_row, &(-q));
                }
            }
        }
        rows.into_iter().map(|(_, r)| r).collect()
    }

    fn reduce_in_place(&mut self) {
        let rows = self.finish();
        self.slots = vec![None; self.dim];
        for r in rows {
            let c = r.iter().position(|x| !x.is_zero()).unwrap();
            self.slots[c] = Some(r);
        }
    }
}

fn axpy(v: &mut [BigInt], row: &[BigInt], k: &BigInt) {
    for (x, r) in v.iter_mut().zip(row) {
        *x += k * r;
    }
}

fn pivot_col(row: &[BigInt]) -> usize {
    row.iter()
        .position(|x| !x.is_zero())
        .expect("zero row in HNF")
}

/// Determinant of a square integer matrix by fraction-free elimination.
pub fn integer_det(m: &[Vec<BigInt>]) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut a: Vec<Vec<BigInt>> = m.to_vec();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(i, k);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
                a[i][j] = v;
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}

fn lcm_of_denominators<'a>(it: impl Iterator<Item = &'a BigRational>) -> BigInt {
    it.fold(BigInt::one(), |acc, q| acc.lcm(q.denom()))
}

impl IntegerLattice {
    fn from_integer_rows(dim: usize, denominator: BigInt, rows: Vec<Vec<BigInt>>) -> Self {
        let mut b = HnfBuilder::new(dim);
        for r in rows {
            b.insert(r);
        }
        Self::normalized(dim, denominator, b.finish())
    }

    fn normalized(dim: usize, denominator: BigInt, mut hnf: Vec<Vec<BigInt>>) -> Self {
        if hnf.is_empty() {
            return IntegerLattice {
                dim,
                denominator: BigInt::one(),
                hnf,
            };
        }
        let g = hnf
            .iter()
            .flatten()
            .fold(denominator.clone(), |acc, x| acc.gcd(x));
        let mut denominator = denominator;
        if !g.is_one() {
            denominator /= &g;
            for x in hnf.iter_mut().flatten() {
                *x /= &g;
            }
        }
        IntegerLattice {
            dim,
            denominator,
            hnf,
        }
    }

    pub fn zero(dim: usize) -> Self {
        IntegerLattice {
            dim,
            denominator: BigInt::one(),
            hnf: Vec::new(),
        }
    }

    /// `Z^dim`.
    pub fn standard(dim: usize) -> Self {
        let hnf = (0..dim)
            .map(|i| {
                (0..dim)
                    .map(|j| {
                        if i == j {
                            BigInt::one()
                        } else {
                            BigInt::zero()
                        }
                    })
                    .collect()
            })
            .collect();
        IntegerLattice {
            dim,
            denominator: BigInt::one(),
            hnf,
        }
    }

    /// Z-span of rational row vectors of length `dim`.
    pub fn from_rational_rows(dim: usize, rows: &[Vec<BigRational>]) -> Result<Self> {
        if let Some(r) = rows.iter().find(|r| r.len() != dim) {
            return Err(Error::DimensionMismatch {
                left: dim,
                right: r.len(),
            });
        }
        let d = lcm_of_denominators(rows.iter().flatten());
        let int_rows = rows
            .iter()
            .map(|r| {
                r.iter()
                    .map(|q| (q * BigRational::from_integer(d.clone())).to_integer())
                    .collect()
            })
            .collect();
        Ok(Self::from_integer_rows(dim, d, int_rows))
    }

    pub fn from_integers(dim: usize, rows: &[Vec<i64>]) -> Result<Self> {
        let rows: Vec<Vec<BigRational>> = rows
            .iter()
            .map(|r| {
                r.iter()
                    .map(|&x| BigRational::from_integer(x.into()))
                    .collect()
            })
            .collect();
        Self::from_rational_rows(dim, &rows)
    }

    /// Z-span of group ring elements, all over the same group.
    pub fn from_generators(group: ExpTwoGroup, gens: &[GroupRingElem]) -> Result<Self> {
        if let Some(g) = gens.iter().find(|g| g.group() != group) {
            return Err(Error::GroupMismatch {
                left: group.rank(),
                right: g.group().rank(),
            });
        }
        let rows: Vec<Vec<BigRational>> = gens.iter().map(|g| g.coeffs().to_vec()).collect();
        Self::from_rational_rows(group.order(), &rows)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.hnf.len()
    }

    pub fn is_full_rank(&self) -> bool {
        self.rank() == self.dim
    }

    pub fn denominator(&self) -> &BigInt {
        &self.denominator
    }

    pub fn hnf(&self) -> &[Vec<BigInt>] {
        &self.hnf
    }

    /// Basis rows as rational vectors.
    pub fn basis(&self) -> Vec<Vec<BigRational>> {
        self.hnf
            .iter()
            .map(|r| {
                r.iter()
                    .map(|x| BigRational::new(x.clone(), self.denominator.clone()))
                    .collect()
            })
            .collect()
    }

    pub fn basis_elements(&self, group: ExpTwoGroup) -> Result<Vec<GroupRingElem>> {
        self.basis()
            .into_iter()
            .map(|r| GroupRingElem::new(group, r))
            .collect()
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.dim == other.dim {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                left: self.dim,
                right: other.dim,
            })
        }
    }

    pub fn sum(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let mut rows = self.basis();
        rows.extend(other.basis());
        Self::from_rational_rows(self.dim, &rows)
    }

    /// Largest common sublattice, from the integer left kernel of the stacked bases.
    pub fn intersect(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        if self.rank() == 0 || other.rank() == 0 {
            return Ok(Self::zero(self.dim));
        }
        let d = self.denominator.lcm(&other.denominator);
        let s1 = &d / &self.denominator;
        let s2 = &d / &other.denominator;
        let r1 = self.rank();
        let total = r1 + other.rank();
        let width = self.dim + total;
        let stacked = self
            .hnf
            .iter()
            .map(|r| (r, &s1))
            .chain(other.hnf.iter().map(|r| (r, &s2)));
        let mut b = HnfBuilder::new(width);
        for (i, (row, scale)) in stacked.enumerate() {
            let mut aug: Vec<BigInt> = row.iter().map(|x| x * scale).collect();
            aug.extend((0..total).map(|j| {
                if i == j {
                    BigInt::one()
                } else {
                    BigInt::zero()
                }
            }));
            b.insert(aug);
        }
        let kernel: Vec<Vec<BigInt>> = b
            .finish()
            .into_iter()
            .filter(|r| r[..self.dim].iter().all(Zero::is_zero))
            .map(|r| r[self.dim..self.dim + r1].to_vec())
            .collect();
        let rows: Vec<Vec<BigInt>> = kernel
            .iter()
            .map(|x| {
                let mut v = vec![BigInt::zero(); self.dim];
                for (coef, row) in x.iter().zip(&self.hnf) {
                    axpy(&mut v, row, &(coef * &s1));
                }
                v
            })
            .collect();
        Ok(Self::from_integer_rows(self.dim, d, rows))
    }

    /// Lattice generated by `{v * a : v in basis}` under the group ring product.
    pub fn mul_by_ring_element(&self, a: &GroupRingElem) -> Result<Self> {
        if a.group().order() != self.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: a.group().order(),
            });
        }
        let gens: Vec<GroupRingElem> = self
            .basis_elements(a.group())?
            .iter()
            .map(|v| v * a)
            .collect();
        Self::from_generators(a.group(), &gens)
    }

    /// Coordinates of `v` in the HNF basis, if `v` lies in the lattice.
    pub fn coordinates(&self, v: &[BigRational]) -> Option<Vec<BigInt>> {
        if v.len() != self.dim {
            return None;
        }
        let d = BigRational::from_integer(self.denominator.clone());
        let mut x: Vec<BigInt> = Vec::with_capacity(self.dim);
        for q in v {
            let s = q * &d;
            if !s.is_integer() {
                return None;
            }
            x.push(s.to_integer());
        }
        let mut coords = Vec::with_capacity(self.rank());
        for row in &self.hnf {
            let c = pivot_col(row);
            let (k, r) = x[c].div_rem(&row[c]);
            if !r.is_zero() {
                return None;
            }
            if !k.is_zero() {
                axpy(&mut x, row, &(-&k));
            }
            coords.push(k);
        }
        x.iter().all(Zero::is_zero).then_some(coords)
    }

    pub fn contains(&self, v: &[BigRational]) -> bool {
        self.coordinates(v).is_some()
    }

    pub fn contains_element(&self, a: &GroupRingElem) -> bool {
        a.group().order() == self.dim && self.contains(a.coeffs())
    }

    pub fn is_sublattice_of(&self, other: &Self) -> bool {
        self.dim == other.dim && self.basis().iter().all(|v| other.contains(v))
    }

    /// Index of `self` in `sup`; requires `self ⊆ sup` with equal rank.
    pub fn index_in(&self, sup: &Self) -> Result<BigInt> {
        self.check_dim(sup)?;
        if self.rank() != sup.rank() {
            return Err(Error::Incomparable);
        }
        let mut coords = Vec::with_capacity(self.rank());
        for v in self.basis() {
            coords.push(sup.coordinates(&v).ok_or(Error::Incomparable)?);
        }
        Ok(integer_det(&coords).abs())
    }

    pub fn compare(&self, other: &Self) -> Result<Comparison> {
        self.check_dim(other)?;
        if self == other {
            return Ok(Comparison::Equal);
        }
        let index = |small: &Self, big: &Self| {
            (small.rank() == big.rank()).then(|| small.index_in(big).expect("contained"))
        };
        if self.is_sublattice_of(other) {
            Ok(Comparison::LeftInRight {
                index: index(self, other),
            })
        } else if other.is_sublattice_of(self) {
            Ok(Comparison::RightInLeft {
                index: index(other, self),
            })
        } else {
            Ok(Comparison::Incomparable)
        }
    }

    /// `k * L`.
    pub fn scaled(&self, k: &BigRational) -> Self {
        if k.is_zero() {
            return Self::zero(self.dim);
        }
        let rows: Vec<Vec<BigRational>> = self
            .basis()
            .into_iter()
            .map(|r| r.into_iter().map(|x| x * k).collect())
            .collect();
        Self::from_rational_rows(self.dim, &rows).expect("same dimension")
    }

    /// Covolume `|det H| / D^n` of a full-rank lattice.
    pub fn covolume(&self) -> Option<BigRational> {
        self.is_full_rank().then(|| {
            let det = self
                .hnf
                .iter()
                .enumerate()
                .fold(BigInt::one(), |acc, (i, r)| acc * &r[i]);
            BigRational::new(det, num_traits::pow(self.denominator.clone(), self.dim))
        })
    }
}

/// Streaming HNF accumulator that reports whether each batch enlarged the lattice.
pub struct LatticeAccumulator {
    builder: HnfBuilder,
    current: Vec<Vec<BigInt>>,
}

impl LatticeAccumulator {
    pub fn new(dim: usize) -> Self {
        LatticeAccumulator {
            builder: HnfBuilder::new(dim),
            current: Vec::new(),
        }
    }

    /// Adds integer vectors; returns `true` if the lattice changed.
    pub fn extend(&mut self, rows: impl IntoIterator<Item = Vec<BigInt>>) -> bool {
        for r in rows {
            self.builder.insert(r);
        }
        self.builder.reduce_in_place();
        let next = self.builder.finish();
        let changed = next != self.current;
        self.current = next;
        changed
    }

    pub fn lattice(&self) -> IntegerLattice {
        IntegerLattice::normalized(self.builder.dim, BigInt::one(), self.current.clone())
    }
}

#[derive(Serialize, Deserialize)]
struct LatticeRepr {
    ambient_dim: usize,
    #[serde(with = "crate::serial::bigint")]
    denominator: BigInt,
    #[serde(with = "crate::serial::bigint_matrix")]
    hnf: Vec<Vec<BigInt>>,
    rank: usize,
}

impl Serialize for IntegerLattice {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        LatticeRepr {
            ambient_dim: self.dim,
            denominator: self.denominator.clone(),
            hnf: self.hnf.clone(),
            rank: self.rank(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for IntegerLattice {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = LatticeRepr::deserialize(d)?;
        if r.hnf.len() != r.rank || r.hnf.iter().any(|row| row.len() != r.ambient_dim) {
            return Err(serde::de::Error::custom("inconsistent lattice shape"));
        }
        Ok(IntegerLattice::from_integer_rows(
            r.ambient_dim,
            r.denominator,
            r.hnf,
        ))
    }
}
