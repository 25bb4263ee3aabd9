//! Exact values at `s = -1`: quadratic Dirichlet L-functions through generalized Bernoulli
//! numbers, S-truncated zeta values, the equivariant element `theta^S(-1)` and the K2 orders
//! these values predict.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{self, is_positive_fundamental, kronecker};
use crate::error::{Error, Result};
use crate::fields::{places_above_quadratic, w2_minus, MultiQuadField, PlaceSet, W2_RATIONALS};
use crate::group_ring::{CharacterIndex, ExpTwoGroup, GroupRingElem};
use crate::serial;

fn rat(n: i128, d: i128) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn int(n: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(n.into())
}

/// `B2(x) = x^2 - x + 1/6`.
pub fn bernoulli_b2_poly(x: &BigRational) -> BigRational {
    x * x - x + rat(1, 6)
}

/// `B_{2,chi}` for the character of conductor `disc`, summed in closed form.
pub fn generalized_bernoulli_b2(disc: i64) -> Result<BigRational> {
    if !is_positive_fundamental(disc) {
        return Err(Error::NotFundamental(disc));
    }
    let f = disc as i128;
    let (mut s0, mut s1, mut s2) = (0i128, 0i128, 0i128);
    for a in 1..=f {
        let c = kronecker(disc, a as i64) as i128;
        s0 += c;
        s1 += c * a;
        s2 += c * a * a;
    }
    // f * sum chi(a) B2(a/f) = S2/f - S1 + f S0/6
    Ok(rat(s2, f) - int(s1) + rat(f * s0, 6))
}

/// `L(-1, chi) = -B_{2,chi}/2`; `disc = 1` gives `zeta(-1) = -1/12`.
pub fn dirichlet_l_minus1(disc: i64) -> Result<BigRational> {
    Ok(-generalized_bernoulli_b2(disc)? / int(2))
}

/// `1 - chi(p) p`, which is 1 at ramified `p`.
pub fn euler_multiplier(disc: i64, p: u64) -> BigRational {
    int(1 - kronecker(disc, p as i64) as i64 * p as i64)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EulerFactor {
    pub p: u64,
    #[serde(with = "serial::rational")]
    pub multiplier: BigRational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LValueRecord {
    pub chi: CharacterIndex,
    pub disc: i64,
    #[serde(with = "serial::rational")]
    pub raw_l: BigRational,
    pub euler_factors: Vec<EulerFactor>,
    #[serde(with = "serial::rational")]
    pub adjusted_l: BigRational,
}

/// `L^S(-1, chi)` with its Euler factors.
pub fn l_value_record(disc: i64, chi: CharacterIndex, s: &PlaceSet) -> Result<LValueRecord> {
    let raw_l = dirichlet_l_minus1(disc)?;
    let euler_factors: Vec<EulerFactor> = s
        .finite()
        .map(|p| EulerFactor {
            p,
            multiplier: euler_multiplier(disc, p),
        })
        .collect();
    let adjusted_l = euler_factors
        .iter()
        .fold(raw_l.clone(), |acc, e| acc * &e.multiplier);
    Ok(LValueRecord {
        chi,
        disc,
        raw_l,
        euler_factors,
        adjusted_l,
    })
}

/// One record per character of `Gal(E/Q)`, trivial character first.
pub fn l_values(field: &MultiQuadField, s: &PlaceSet) -> Result<Vec<LValueRecord>> {
    s.check_covers(field)?;
    field
        .group()
        .characters()
        .map(|chi| l_value_record(field.discriminant(chi), chi, s))
        .collect()
}

/// `zeta_E^S(-1)` as the product of all `L^S(-1, chi)`.
pub fn zeta_s_minus1(field: &MultiQuadField, s: &PlaceSet) -> Result<BigRational> {
    Ok(l_values(field, s)?
        .into_iter()
        .fold(BigRational::one(), |acc, r| acc * r.adjusted_l))
}

/// `theta^S(-1) = sum_chi L^S(-1, chi) e_chi`.
pub fn theta_minus1(field: &MultiQuadField, s: &PlaceSet) -> Result<GroupRingElem> {
    let v: Vec<BigRational> = l_values(field, s)?
        .into_iter()
        .map(|r| r.adjusted_l)
        .collect();
    GroupRingElem::inverse_character_transform(field.group(), &v)
}

/// `zeta_K(-1)` for a real quadratic field of discriminant `disc`, by Siegel's formula
/// `(1/60) sum_{b^2 < D, b = D mod 2} sigma_1((D - b^2)/4)`; independent of Bernoulli sums.
pub fn siegel_zeta_minus1(disc: i64) -> BigRational {
    let sigma1 = |n: u64| -> u64 {
        arith::factor(n)
            .into_iter()
            .map(|(p, e)| (p.pow(e + 1) - 1) / (p - 1))
            .product()
    };
    let parity = disc.rem_euclid(2);
    let total: u64 = (0..)
        .take_while(|b: &i64| b * b < disc)
        .filter(|b| b % 2 == parity)
        .map(|b| {
            let s = sigma1(((disc - b * b) / 4) as u64);
            if b == 0 {
                s
            } else {
                2 * s
            }
        })
        .sum();
    rat(total as i128, 60)
}

/// Birch-Tate data of one quadratic subfield `E_chi`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubfieldOrders {
    pub chi: CharacterIndex,
    pub d: u64,
    #[serde(with = "serial::rational")]
    pub zeta: BigRational,
    pub places: u64,
    pub w2: u64,
    pub w2_minus: u64,
    pub delta: u64,
    #[serde(with = "serial::bigint")]
    pub k2: BigInt,
    #[serde(with = "serial::bigint")]
    pub k2_minus: BigInt,
}

/// Orders of `K2` of S-integers predicted by `zeta_L^S(-1) = (-1)^{|S_L|} k2 / w2(L)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BTOrders {
    #[serde(with = "serial::rational")]
    pub zeta_f: BigRational,
    #[serde(with = "serial::bigint")]
    pub k2_f: BigInt,
    pub subfields: Vec<SubfieldOrders>,
    #[serde(with = "serial::rational")]
    pub zeta_e: BigRational,
    pub places_e: u64,
    #[serde(with = "serial::bigint")]
    pub k2_e: BigInt,
    pub theta: GroupRingElem,
}

impl BTOrders {
    pub fn subfield(&self, chi: CharacterIndex) -> Option<&SubfieldOrders> {
        self.subfields.iter().find(|o| o.chi == chi)
    }

    /// Diagonal `(k2(F), k2(E_chi)^-, ...)` indexed by character mask.
    pub fn minus_diagonal(&self) -> Vec<BigInt> {
        std::iter::once(self.k2_f.clone())
            .chain(self.subfields.iter().map(|o| o.k2_minus.clone()))
            .collect()
    }
}

/// `w2 * |zeta|`, checking the sign `(-1)^places` and integrality.
fn predicted_order(label: &str, zeta: &BigRational, w2: u64, places: u64) -> Result<BigInt> {
    let expected_negative = places % 2 == 1;
    if zeta.is_zero() || zeta.is_negative() != expected_negative {
        return Err(Error::Falsified(format!(
            "sign of zeta^S(-1) for {label} is {} with {places} places",
            serial::fmt_rational(zeta)
        )));
    }
    let k = zeta.abs() * int(w2);
    if !k.is_integer() {
        return Err(Error::Falsified(format!(
            "w2 * |zeta^S(-1)| = {} is not integral for {label}",
            serial::fmt_rational(&k)
        )));
    }
    Ok(k.to_integer())
}

pub fn bt_orders(field: &MultiQuadField, s: &PlaceSet) -> Result<BTOrders> {
    let records = l_values(field, s)?;
    let zeta_f = records[0].adjusted_l.clone();
    let k2_f = predicted_order("Q", &zeta_f, W2_RATIONALS, s.size())?;
    let mut subfields = Vec::new();
    for r in &records[1..] {
        let d = field.kernel(r.chi);
        let zeta = &zeta_f * &r.adjusted_l;
        let places = places_above_quadratic(r.disc, s);
        let w2 = field.subfield(r.chi)?.w2();
        let (w2m, delta) = w2_minus(d, w2)?;
        let k2 = predicted_order(&format!("Q(√{d})"), &zeta, w2, places)?;
        let (k2_minus, rem) = (&k2 * BigInt::from(if d == 2 { 1 } else { 2 })).div_rem(&k2_f);
        if !rem.is_zero() {
            return Err(Error::Falsified(format!(
                "k2^- for Q(√{d}) is not integral: delta * {k2} / {k2_f}"
            )));
        }
        subfields.push(SubfieldOrders {
            chi: r.chi,
            d,
            zeta,
            places,
            w2,
            w2_minus: w2m,
            delta,
            k2,
            k2_minus,
        });
    }
    let zeta_e = records
        .iter()
        .fold(BigRational::one(), |acc, r| acc * &r.adjusted_l);
    let places_e = field.places_above(s)?;
    let k2_e = predicted_order(&field.to_string(), &zeta_e, field.w2(), places_e)?;
    let theta = GroupRingElem::inverse_character_transform(
        field.group(),
        &records
            .into_iter()
            .map(|r| r.adjusted_l)
            .collect::<Vec<_>>(),
    )?;
    Ok(BTOrders {
        zeta_f,
        k2_f,
        subfields,
        zeta_e,
        places_e,
        k2_e,
        theta,
    })
}

/// `theta^S(-1)` of `E` over the intermediate field `E'` fixed by `H = {1, h}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelativeTheta {
    /// Base character: `E' = E_chi`, or `Q` when trivial.
    pub base: CharacterIndex,
    /// The generator `h` of `Gal(E/E')` inside `G`.
    pub generator: u32,
    pub theta: GroupRingElem,
}

pub fn theta_relative(
    field: &MultiQuadField,
    base: CharacterIndex,
    s: &PlaceSet,
) -> Result<RelativeTheta> {
    let group = field.group();
    let degree = if base.is_trivial() {
        group.order()
    } else {
        group.order() / 2
    };
    if degree != 2 || !group.contains(base.0) {
        return Err(Error::RelativeDegree(degree));
    }
    let generator = base
        .kernel(group)
        .into_iter()
        .find(|&g| g != 0)
        .unwrap_or(0);
    let zeta_base = if base.is_trivial() {
        zeta_s_minus1(&MultiQuadField::rationals(), s)?
    } else {
        zeta_s_minus1(&field.subfield(base)?, s)?
    };
    let zeta_e = zeta_s_minus1(field, s)?;
    let v = [zeta_base.clone(), zeta_e / zeta_base];
    Ok(RelativeTheta {
        base,
        generator,
        theta: GroupRingElem::inverse_character_transform(ExpTwoGroup::new(1)?, &v)?,
    })
}

/// Two exact rationals expected to be equal.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RationalIdentity {
    #[serde(with = "serial::rational")]
    pub lhs: BigRational,
    #[serde(with = "serial::rational")]
    pub rhs: BigRational,
}

impl RationalIdentity {
    pub fn holds(&self) -> bool {
        self.lhs == self.rhs
    }
}

/// `(k2(E)/k2(F)) / (w2(E)/w2(F)) = prod_chi (k2(E_chi)/k2(F)) / (w2(E_chi)/w2(F))`.
pub fn zeta_factorization_check(field: &MultiQuadField, s: &PlaceSet) -> Result<RationalIdentity> {
    let bt = bt_orders(field, s)?;
    let w2f = int(W2_RATIONALS);
    let k2f = int(bt.k2_f.clone());
    let lhs = (int(bt.k2_e.clone()) / &k2f) / (int(field.w2()) / &w2f);
    let rhs = bt.subfields.iter().fold(BigRational::one(), |acc, o| {
        acc * (int(o.k2.clone()) / &k2f) / (int(o.w2) / &w2f)
    });
    Ok(RationalIdentity { lhs, rhs })
}
