//! The ideal lattices of `R = Z[G]`: the annihilator of `W2(E)`, the higher Stickelberger
//! ideal, their extensions to the maximal order `S = sum_chi Z e_chi`, closed forms for
//! biquadratic fields, indices, projections to quotients, relative ideals over quadratic
//! bases, and the position of `Stick` among the possible Fitting ideals.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{self, fundamental_discriminant};
use crate::error::{Error, Result};
use crate::fields::{norm_form_solve, MultiQuadField, PlaceSet};
use crate::group_ring::{CharacterIndex, ExpTwoGroup, GroupRingElem, QuotientMap};
use crate::lattice::{Comparison, IntegerLattice, LatticeAccumulator};
use crate::lvalues::{bt_orders, theta_minus1, theta_relative, BTOrders, RationalIdentity};
use crate::serial;

pub const DEFAULT_PRIME_BOUND: u64 = 5000;
pub const DEFAULT_WINDOW: usize = 25;
/// Search bound on `|y|` for norm-form witnesses.
pub const DEFAULT_Y_BOUND: u64 = 1_000_000;

fn int(n: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(n.into())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnConfig {
    pub prime_bound: u64,
    /// Number of consecutive primes that must leave the lattice unchanged.
    pub window: usize,
}

impl Default for AnnConfig {
    fn default() -> Self {
        AnnConfig {
            prime_bound: DEFAULT_PRIME_BOUND,
            window: DEFAULT_WINDOW,
        }
    }
}

/// Evidence that the generator stream stopped enlarging the lattice.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StabilizationCertificate {
    pub primes_used: usize,
    pub last_change_prime: u64,
    pub last_prime: u64,
    pub window: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stabilized {
    pub lattice: IntegerLattice,
    pub certificate: StabilizationCertificate,
}

/// Feeds one batch of generators per prime until `window` primes in a row add nothing.
fn stabilize<I>(dim: usize, config: AnnConfig, batches: I) -> Result<Stabilized>
where
    I: IntoIterator<Item = (u64, Vec<Vec<BigInt>>)>,
{
    let mut acc = LatticeAccumulator::new(dim);
    let (mut used, mut quiet, mut last_change) = (0usize, 0usize, 0u64);
    for (q, rows) in batches {
        used += 1;
        if acc.extend(rows) {
            quiet = 0;
            last_change = q;
        } else {
            quiet += 1;
        }
        let lattice = acc.lattice();
        if quiet >= config.window && lattice.is_full_rank() {
            return Ok(Stabilized {
                lattice,
                certificate: StabilizationCertificate {
                    primes_used: used,
                    last_change_prime: last_change,
                    last_prime: q,
                    window: config.window,
                },
            });
        }
    }
    Err(Error::Unstable {
        bound: config.prime_bound,
        last_change,
    })
}

/// Primes `q <= bound` prime to `w2(E)` and to every ramified prime.
pub fn admissible_primes(field: &MultiQuadField, bound: u64) -> Vec<u64> {
    let w2 = field.w2();
    let ramified = field.ramified_primes();
    arith::primes_up_to(bound)
        .into_iter()
        .filter(|q| !w2.is_multiple_of(*q) && !ramified.contains(q))
        .collect()
}

/// `g * (sigma - c)` for every `g` in the group, as integer rows.
fn ideal_rows(group: ExpTwoGroup, sigma: u32, c: &BigInt) -> Vec<Vec<BigInt>> {
    group
        .elements()
        .map(|g| {
            let mut row = vec![BigInt::zero(); group.order()];
            row[g as usize] -= c;
            row[(g ^ sigma) as usize] += 1;
            row
        })
        .collect()
}

/// `Ann_R(W2(E))`, spanned by the `G`-translates of `sigma_q - q^2`.
pub fn ann_w2_generators(field: &MultiQuadField, config: AnnConfig) -> Result<Stabilized> {
    if config.prime_bound < 2 {
        return Err(Error::BadSpec(format!(
            "prime bound {}",
            config.prime_bound
        )));
    }
    let group = field.group();
    let batches = admissible_primes(field, config.prime_bound)
        .into_iter()
        .map(move |q| {
            let sigma = field
                .artin_symbol(q)
                .expect("admissible prime is unramified");
            (q, ideal_rows(group, sigma, &BigInt::from(q * q)))
        });
    stabilize(group.order(), config, batches)
}

/// Lattice spanned by `sum_chi c_chi e_chi`, in group coordinates.
pub fn character_lattice(group: ExpTwoGroup, gens: &[Vec<BigRational>]) -> Result<IntegerLattice> {
    let elems: Vec<GroupRingElem> = gens
        .iter()
        .map(|v| GroupRingElem::inverse_character_transform(group, v))
        .collect::<Result<_>>()?;
    IntegerLattice::from_generators(group, &elems)
}

/// `sum_chi Z d_chi e_chi`; zero entries are dropped.
pub fn diagonal_lattice(group: ExpTwoGroup, diag: &[BigRational]) -> Result<IntegerLattice> {
    let gens: Vec<Vec<BigRational>> = diag
        .iter()
        .enumerate()
        .filter(|(_, d)| !d.is_zero())
        .map(|(i, d)| {
            let mut v = vec![BigRational::zero(); diag.len()];
            v[i] = d.clone();
            v
        })
        .collect();
    character_lattice(group, &gens)
}

/// `g_chi`: the generator of the projection of `L` to `Q e_chi`, for every `chi`.
pub fn character_diagonal(lattice: &IntegerLattice, group: ExpTwoGroup) -> Vec<BigRational> {
    let mut g = vec![BigInt::zero(); group.order()];
    for row in lattice.hnf() {
        let coeffs: Vec<BigRational> = row.iter().map(|x| int(x.clone())).collect();
        let t = GroupRingElem::new(group, coeffs)
            .expect("lattice dimension matches group")
            .character_transform();
        for (gc, v) in g.iter_mut().zip(t) {
            *gc = gc.gcd(&v.to_integer());
        }
    }
    g.into_iter()
        .map(|x| BigRational::new(x, lattice.denominator().clone()))
        .collect()
}

/// `L * S`, the smallest `S`-module containing `L`.
pub fn extend_to_maximal_order(
    lattice: &IntegerLattice,
    group: ExpTwoGroup,
) -> Result<IntegerLattice> {
    diagonal_lattice(group, &character_diagonal(lattice, group))
}

/// The maximal order `S` in group coordinates.
pub fn maximal_order(group: ExpTwoGroup) -> IntegerLattice {
    diagonal_lattice(group, &vec![BigRational::one(); group.order()]).expect("valid group")
}

/// `2^{m 2^{m-1}}`.
pub fn maximal_order_index(m: usize) -> BigInt {
    if m == 0 {
        BigInt::one()
    } else {
        BigInt::one() << (m << (m - 1))
    }
}

/// Preimage in `sum_chi Z d_chi e_chi` of an `F2`-subspace of its reduction mod 2.
///
/// Vectors are bitmasks over character masks; `2 d_chi e_chi` is always included.
pub fn mod_two_lattice(
    group: ExpTwoGroup,
    diag: &[BigRational],
    span: &[u32],
) -> Result<IntegerLattice> {
    let n = group.order();
    let mut gens: Vec<Vec<BigRational>> = span
        .iter()
        .map(|&v| {
            (0..n)
                .map(|i| {
                    if v >> i & 1 == 1 {
                        diag[i].clone()
                    } else {
                        BigRational::zero()
                    }
                })
                .collect()
        })
        .collect();
    for i in 0..n {
        let mut v = vec![BigRational::zero(); n];
        v[i] = &diag[i] * int(2);
        gens.push(v);
    }
    character_lattice(group, &gens)
}

/// `(e1, e2, e3)`: the nontrivial characters with the one of `Q(sqrt 2)` first when present.
fn labelled_characters(field: &MultiQuadField) -> Result<[CharacterIndex; 3]> {
    if field.rank() != 2 {
        return Err(Error::NotBiquadratic(field.rank()));
    }
    let mut chars: Vec<CharacterIndex> = field.group().nontrivial_characters().collect();
    if let Some(c) = field.sqrt2_character() {
        chars.retain(|&x| x != c);
        chars.insert(0, c);
    }
    Ok([chars[0], chars[1], chars[2]])
}

fn bit(c: CharacterIndex) -> u32 {
    1 << c.0
}

/// Mod-2 shape of the closed-form biquadratic lattices.
pub fn biquadratic_shape(field: &MultiQuadField) -> Result<Vec<u32>> {
    let [e1, e2, e3] = labelled_characters(field)?;
    Ok(if field.sqrt2_character().is_some() {
        vec![1 | bit(e1) | bit(e2), bit(e2) | bit(e3)]
    } else {
        vec![1, bit(e1) | bit(e2), bit(e1) | bit(e3), bit(e2) | bit(e3)]
    })
}

/// `(w2(F), w2(E_chi)^-, ...)` indexed by character mask.
pub fn w2_diagonal(field: &MultiQuadField) -> Result<Vec<BigRational>> {
    let mut diag = vec![int(crate::fields::W2_RATIONALS)];
    for chi in field.group().nontrivial_characters() {
        diag.push(int(field.subfield_data(chi)?.w2_minus));
    }
    Ok(diag)
}

/// Closed-form `Ann_R(W2(E))` for a biquadratic field.
pub fn ann_closed_biquadratic(field: &MultiQuadField) -> Result<IntegerLattice> {
    mod_two_lattice(
        field.group(),
        &w2_diagonal(field)?,
        &biquadratic_shape(field)?,
    )
}

/// Closed-form `Stick` for a biquadratic field, from predicted `|k2|` values.
pub fn stick_closed_biquadratic(field: &MultiQuadField, bt: &BTOrders) -> Result<IntegerLattice> {
    let diag: Vec<BigRational> = bt.minus_diagonal().into_iter().map(int).collect();
    mod_two_lattice(field.group(), &diag, &biquadratic_shape(field)?)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdealBundle {
    pub field: String,
    pub s: String,
    pub ann: Stabilized,
    pub theta: GroupRingElem,
    pub stick: IntegerLattice,
    pub maximal_order: IntegerLattice,
    pub r: IntegerLattice,
    pub stick_s: IntegerLattice,
    pub fit_s_predicted: IntegerLattice,
    pub bt: BTOrders,
}

impl IdealBundle {
    pub fn group(&self) -> ExpTwoGroup {
        self.theta.group()
    }
}

/// Builds `Stick = Ann * theta` with every derived lattice.
pub fn stick_ideal(field: &MultiQuadField, s: &PlaceSet, config: AnnConfig) -> Result<IdealBundle> {
    let ann = ann_w2_generators(field, config)?;
    stick_ideal_with_ann(field, s, ann)
}

/// As [`stick_ideal`], reusing an annihilator computed earlier for the same field.
pub fn stick_ideal_with_ann(
    field: &MultiQuadField,
    s: &PlaceSet,
    ann: Stabilized,
) -> Result<IdealBundle> {
    let group = field.group();
    let bt = bt_orders(field, s)?;
    let theta = bt.theta.clone();
    let stick = ann.lattice.mul_by_ring_element(&theta)?;
    let r = IntegerLattice::standard(group.order());
    if !stick.is_sublattice_of(&r) {
        return Err(Error::Falsified(format!(
            "Stick is not integral for {field} with S = {s}"
        )));
    }
    let stick_s = extend_to_maximal_order(&stick, group)?;
    let diag: Vec<BigRational> = bt.minus_diagonal().into_iter().map(int).collect();
    let fit_s_predicted = diagonal_lattice(group, &diag)?;
    Ok(IdealBundle {
        field: field.spec(),
        s: s.spec(),
        ann,
        theta,
        stick,
        maximal_order: maximal_order(group),
        r,
        stick_s,
        fit_s_predicted,
        bt,
    })
}

/// Checks `(sigma_q - q^2) theta` is integral for every admissible `q <= bound`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntegralityReport {
    pub primes_checked: usize,
    pub failures: Vec<u64>,
}

pub fn integrality_check(
    field: &MultiQuadField,
    s: &PlaceSet,
    bound: u64,
) -> Result<IntegralityReport> {
    let theta = theta_minus1(field, s)?;
    let group = field.group();
    let primes = admissible_primes(field, bound);
    let mut failures = Vec::new();
    for &q in &primes {
        let sigma = field.artin_symbol(q)?;
        let gen = GroupRingElem::basis(group, sigma)
            .try_sub(&GroupRingElem::scalar(group, int(q * q)))?;
        if !gen.try_mul(&theta)?.is_integral() {
            failures.push(q);
        }
    }
    Ok(IntegralityReport {
        primes_checked: primes.len(),
        failures,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexReport {
    #[serde(with = "serial::bigint")]
    pub s_over_r: BigInt,
    #[serde(with = "serial::bigint")]
    pub s_over_stick_s: BigInt,
    #[serde(with = "serial::bigint")]
    pub stick_s_over_stick: BigInt,
    #[serde(with = "serial::bigint")]
    pub r_over_stick: BigInt,
    #[serde(with = "serial::bigint")]
    pub r_over_ann: BigInt,
    /// `w2(E) |zeta_E^S(-1)|`.
    #[serde(with = "serial::bigint")]
    pub k2_predicted: BigInt,
    /// `(R:Stick)` against `k2 (Stick S:Stick) / (delta 2^{(m-2)2^{m-1}+1})`.
    pub index_formula: RationalIdentity,
    /// `(S:R)(R:Stick) = (S:Stick S)(Stick S:Stick)`.
    pub index_chain: bool,
}

pub fn index_report(field: &MultiQuadField, bundle: &IdealBundle) -> Result<IndexReport> {
    let m = field.rank() as i64;
    let s_over_r = bundle.r.index_in(&bundle.maximal_order)?;
    let s_over_stick_s = bundle.stick_s.index_in(&bundle.maximal_order)?;
    let stick_s_over_stick = bundle.stick.index_in(&bundle.stick_s)?;
    let r_over_stick = bundle.stick.index_in(&bundle.r)?;
    let r_over_ann = bundle.ann.lattice.index_in(&bundle.r)?;
    let k2 = bundle.bt.k2_e.clone();
    let exponent = if m == 0 {
        0
    } else {
        (m - 2) * (1 << (m - 1)) + 1
    };
    let power = if exponent >= 0 {
        int(BigInt::one() << exponent as usize)
    } else {
        BigRational::new(BigInt::one(), BigInt::one() << (-exponent) as usize)
    };
    let rhs = int(&k2 * &stick_s_over_stick) / (int(field.delta()) * power);
    let index_chain = &s_over_r * &r_over_stick == &s_over_stick_s * &stick_s_over_stick;
    Ok(IndexReport {
        index_formula: RationalIdentity {
            lhs: int(r_over_stick.clone()),
            rhs,
        },
        s_over_r,
        s_over_stick_s,
        stick_s_over_stick,
        r_over_stick,
        r_over_ann,
        k2_predicted: k2,
        index_chain,
    })
}

/// Result of projecting `Stick_{E/Q}` to `Q[G/H]` for the field `E^H`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProjectionResult {
    /// Character with kernel `H`, or trivial for `H = G`.
    pub chi: CharacterIndex,
    /// Squarefree `d` with `E^H = Q(sqrt d)`, or 1.
    pub d: u64,
    pub projected: IntegerLattice,
    pub direct: IntegerLattice,
    pub equal: bool,
}

/// Compares the image of `Stick_{E/Q}` in every quotient of order at most 2 with the
/// ideal of the fixed field computed on its own.
pub fn projection_check(
    field: &MultiQuadField,
    s: &PlaceSet,
    bundle: &IdealBundle,
    config: AnnConfig,
) -> Result<Vec<ProjectionResult>> {
    let group = field.group();
    let basis = bundle.stick.basis_elements(group)?;
    let mut out = Vec::new();
    for chi in group.characters() {
        let kernel = if chi.is_trivial() {
            (0..group.rank()).map(|i| 1u32 << i).collect()
        } else {
            chi.kernel_basis(group)
        };
        let map = QuotientMap::new(group, &kernel)?;
        let images: Vec<GroupRingElem> =
            basis.iter().map(|b| map.apply(b)).collect::<Result<_>>()?;
        let projected = IntegerLattice::from_generators(map.quotient(), &images)?;
        let sub = if chi.is_trivial() {
            MultiQuadField::rationals()
        } else {
            field.subfield(chi)?
        };
        let direct = stick_ideal(&sub, s, config)?.stick;
        out.push(ProjectionResult {
            chi,
            d: field.kernel(chi),
            equal: projected == direct,
            projected,
            direct,
        });
    }
    Ok(out)
}

/// `Stick_{E/E'}` embedded in `Q[G]` for one intermediate field `E'`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BaseChangeResult {
    pub base: CharacterIndex,
    pub d: u64,
    pub generator: u32,
    pub relative_ann: Stabilized,
    pub relative_stick: IntegerLattice,
    pub embedded: IntegerLattice,
    pub integral: bool,
    pub contained: bool,
}

/// Relative annihilator in `Z[Gal(E/E')]` for `E' = E_base`, `[E:E'] = 2`.
///
/// A prime `Q` of `E'` over an unramified `q` has `NQ = q` and Frobenius `sigma_q` in
/// `Gal(E/E')` when `q` splits in `E'`; when `q` is inert, `NQ = q^2` and the Frobenius is
/// `sigma_q^2 = 1`.
pub fn relative_ann(
    field: &MultiQuadField,
    base: CharacterIndex,
    generator: u32,
    config: AnnConfig,
) -> Result<Stabilized> {
    let h = ExpTwoGroup::new(1)?;
    let batches = admissible_primes(field, config.prime_bound)
        .into_iter()
        .map(move |q| {
            let sigma = field
                .artin_symbol(q)
                .expect("admissible prime is unramified");
            let split = base.is_trivial() || base.value(sigma) == 1;
            let (local, norm) = if split {
                (u32::from(sigma == generator), q * q)
            } else {
                (0, q * q * q * q)
            };
            (q, ideal_rows(h, local, &BigInt::from(norm)))
        });
    stabilize(2, config, batches)
}

/// For every `E'` with `[E:E'] = 2`, checks `Stick_{E/E'} ⊆ Stick_{E/Q}` inside `Q[G]`.
pub fn base_change_check(
    field: &MultiQuadField,
    s: &PlaceSet,
    bundle: &IdealBundle,
    config: AnnConfig,
) -> Result<Vec<BaseChangeResult>> {
    let group = field.group();
    let bases: Vec<CharacterIndex> = match field.rank() {
        1 => vec![CharacterIndex::TRIVIAL],
        2 => group.nontrivial_characters().collect(),
        m => return Err(Error::NotBiquadratic(m)),
    };
    let mut out = Vec::new();
    for base in bases {
        let rel = theta_relative(field, base, s)?;
        let ann = relative_ann(field, base, rel.generator, config)?;
        let relative_stick = ann.lattice.mul_by_ring_element(&rel.theta)?;
        let gens: Vec<GroupRingElem> = relative_stick
            .basis_elements(rel.theta.group())?
            .iter()
            .map(|b| b.embed_subring(group, &[rel.generator]))
            .collect::<Result<_>>()?;
        let embedded = IntegerLattice::from_generators(group, &gens)?;
        out.push(BaseChangeResult {
            base,
            d: field.kernel(base),
            generator: rel.generator,
            integral: relative_stick.is_sublattice_of(&IntegerLattice::standard(2)),
            contained: embedded.is_sublattice_of(&bundle.stick),
            relative_ann: ann,
            relative_stick,
            embedded,
        });
    }
    Ok(out)
}

/// Sufficient conditions, from one norm witness, for `K2^{1+tau} ∩ K2^{1+tau'}` to exceed
/// `K2^{(1+tau)(1+tau')}` where `tau`, `tau'` fix `Q(sqrt r)` and `Q(sqrt d)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormHypothesis {
    /// `E1 = Q(sqrt d)` containing an element of norm `r`.
    pub d: u64,
    /// `E3 = Q(sqrt r)`.
    pub r: u64,
    /// `(x, y)` with `x^2 - d y^2 = r` (or `= 4r` when `d = 1 mod 4`).
    pub witness: (i64, i64),
}

fn no_prime_one_mod_four(n: u64) -> bool {
    arith::factor(n).iter().all(|&(p, _)| p % 4 != 1)
}

/// Integral element of `Q(sqrt d)` of norm `r`, as in [`NormHypothesis::witness`].
pub fn ring_norm_witness(d: u64, r: u64, y_bound: u64) -> Option<(i64, i64)> {
    let target = if d % 4 == 1 { 4 * r } else { r };
    norm_form_solve(d as i64, target as i64, y_bound)
        .and_then(|(x, y)| Some((x.to_i64()?, y.to_i64()?)))
}

/// All ordered pairs `(E1, E3)` of quadratic subfields meeting the sufficient conditions.
pub fn norm_hypotheses(
    field: &MultiQuadField,
    s: &PlaceSet,
    y_bound: u64,
) -> Result<Vec<NormHypothesis>> {
    let [a, b, c] = labelled_characters(field)?;
    if s.finite().any(|p| p % 4 == 1) {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    for &e1 in &[a, b, c] {
        for &e3 in &[a, b, c] {
            if e1 == e3 {
                continue;
            }
            let (d, r) = (field.kernel(e1), field.kernel(e3));
            let disc = fundamental_discriminant(d as i64) as u64;
            if !no_prime_one_mod_four(disc) || !no_prime_one_mod_four(r) {
                continue;
            }
            if let Some(witness) = ring_norm_witness(d, r, y_bound) {
                out.push(NormHypothesis { d, r, witness });
            }
        }
    }
    Ok(out)
}

/// One candidate for `Fit/(2 Fit S)` inside `Fit S/(2 Fit S)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Candidate {
    pub label: String,
    /// Basis over `F2`, as bitmasks over character masks.
    pub span: Vec<u32>,
    pub dimension: usize,
    #[serde(with = "serial::bigint")]
    pub index_in_fit_s: BigInt,
    pub lattice: IntegerLattice,
    /// Whether the candidate lies in `R`, as a Fitting ideal must.
    pub integral: bool,
    pub stick_relation: Comparison,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaseAnalysis {
    pub contains_sqrt2: bool,
    pub candidates: Vec<Candidate>,
    /// Labels of candidates that are integral and not excluded by a norm hypothesis.
    pub consistent: Vec<String>,
    /// `Stick = Stick S ∩ theta R`.
    pub stick_is_intersection: bool,
    pub hypotheses: Vec<NormHypothesis>,
    /// Case (c) ruled out by a norm hypothesis on `(Q(sqrt 2), E')`.
    pub case_c_excluded: bool,
}

fn f2_rank(vectors: &[u32]) -> usize {
    crate::group_ring::f2_echelon(vectors).0.len()
}

/// Hyperplanes of `F2^4` that map onto every plane spanned by `e0` and one `e_i`.
fn compatible_hyperplanes() -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    for f in 1u32..16 {
        let within_pair = [0b0011u32, 0b0101, 0b1001].iter().any(|&p| f & !p == 0);
        if within_pair {
            continue;
        }
        let basis: Vec<u32> = (1u32..16)
            .filter(|v| (v & f).count_ones() % 2 == 0)
            .collect();
        out.push(crate::group_ring::f2_echelon(&basis).0);
    }
    out
}

pub fn comparison_cases(
    field: &MultiQuadField,
    s: &PlaceSet,
    bundle: &IdealBundle,
    y_bound: u64,
) -> Result<CaseAnalysis> {
    let [e1, e2, e3] = labelled_characters(field)?;
    let group = field.group();
    let diag: Vec<BigRational> = bundle.bt.minus_diagonal().into_iter().map(int).collect();
    let sqrt2 = field.sqrt2_character().is_some();
    let spans: Vec<(String, Vec<u32>)> = if sqrt2 {
        vec![
            ("a".into(), vec![1 | bit(e1), bit(e2), bit(e3)]),
            ("b".into(), vec![1 | bit(e1) | bit(e2), bit(e2) | bit(e3)]),
            ("c".into(), vec![1 | bit(e1), bit(e2) | bit(e3)]),
        ]
    } else {
        let mut v = vec![("a".to_string(), vec![1, bit(e1), bit(e2), bit(e3)])];
        for (i, h) in compatible_hyperplanes().into_iter().enumerate() {
            v.push((format!("b{}", i + 1), h));
        }
        v
    };
    let hypotheses = norm_hypotheses(field, s, y_bound)?;
    let case_c_excluded = sqrt2 && hypotheses.iter().any(|h| h.d == 2 || h.r == 2);
    let mut candidates = Vec::new();
    for (label, span) in spans {
        let lattice = mod_two_lattice(group, &diag, &span)?;
        let dimension = f2_rank(&span);
        candidates.push(Candidate {
            label,
            dimension,
            index_in_fit_s: BigInt::one() << (4 - dimension),
            integral: lattice.is_sublattice_of(&bundle.r),
            stick_relation: bundle.stick.compare(&lattice)?,
            span,
            lattice,
        });
    }
    let consistent = candidates
        .iter()
        .filter(|c| c.integral && !(case_c_excluded && c.label == "c"))
        .map(|c| c.label.clone())
        .collect();
    let theta_r = bundle.r.mul_by_ring_element(&bundle.theta)?;
    let stick_is_intersection = bundle.stick_s.intersect(&theta_r)? == bundle.stick;
    Ok(CaseAnalysis {
        contains_sqrt2: sqrt2,
        candidates,
        consistent,
        stick_is_intersection,
        hypotheses,
        case_c_excluded,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Verified,
    Failed,
    Conditional,
}

/// A checked claim with the two sides that were compared.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub claim: String,
    pub anchor: String,
    pub status: Status,
    pub lhs: String,
    pub rhs: String,
}

impl Verdict {
    pub fn check(
        claim: &str,
        anchor: &str,
        ok: bool,
        lhs: impl ToString,
        rhs: impl ToString,
    ) -> Self {
        Verdict {
            claim: claim.to_string(),
            anchor: anchor.to_string(),
            status: if ok { Status::Verified } else { Status::Failed },
            lhs: lhs.to_string(),
            rhs: rhs.to_string(),
        }
    }

    pub fn conditional(claim: &str, anchor: &str, lhs: impl ToString, rhs: impl ToString) -> Self {
        Verdict {
            claim: claim.to_string(),
            anchor: anchor.to_string(),
            status: Status::Conditional,
            lhs: lhs.to_string(),
            rhs: rhs.to_string(),
        }
    }

    pub fn failed(claim: &str, anchor: &str, err: &Error) -> Self {
        Verdict::check(claim, anchor, false, err, "no error")
    }
}

pub(crate) fn fmt_diag(v: &[BigRational]) -> String {
    let parts: Vec<String> = v.iter().map(serial::fmt_rational).collect();
    format!("({})", parts.join(", "))
}
