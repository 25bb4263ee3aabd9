//! Orchestration behind the command line: single-field analysis, the verification battery,
//! the `Q(sqrt 2, sqrt r)` family search, and report serialization.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith;
use crate::error::{Error, Result};
use crate::fields::{MultiQuadField, PlaceSet, W2_RATIONALS};
use crate::ideals::{
    self, AnnConfig, BaseChangeResult, CaseAnalysis, IdealBundle, IndexReport, IntegralityReport,
    ProjectionResult, Status, Verdict,
};
use crate::lattice::Comparison;
use crate::lvalues::{self, LValueRecord};
use crate::props::{self, PropertyReport};
use crate::serial::fmt_rational;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
/// Environment variable that redirects relative output paths.
pub const OUT_DIR_ENV: &str = "HSTICK_OUT_DIR";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RunConfig {
    pub ann: AnnConfig,
    pub y_bound: u64,
    pub timing: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            ann: AnnConfig::default(),
            y_bound: ideals::DEFAULT_Y_BOUND,
            timing: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Header {
    pub field: String,
    pub s: String,
    pub s_added: Vec<u64>,
    pub warnings: Vec<String>,
    pub rank: usize,
    pub prime_bound: u64,
    pub window: usize,
    pub conventions: BTreeMap<String, String>,
    pub version: String,
}

fn conventions() -> BTreeMap<String, String> {
    [
        (
            "characters",
            "bit i of a character mask selects sqrt(d_i); E_chi = Q(sqrt(d_b))",
        ),
        (
            "group_elements",
            "bit i of an element mask means sqrt(d_i) is negated",
        ),
        (
            "tau",
            "tau_chi is the generator with the lowest set bit of the character mask",
        ),
        (
            "ramified_places",
            "one place of E_chi above each ramified prime",
        ),
        (
            "chi_at_ramified",
            "chi(p) = 0 at ramified p, so the Euler multiplier is 1",
        ),
        ("k2_orders", "BT-predicted: k2 = w2 * |zeta^S(-1)|"),
        ("rationals", "num/den strings"),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_string(), v.to_string()))
    .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub header: Header,
    pub lvalues: Vec<LValueRecord>,
    pub lattices: IdealBundle,
    pub indices: IndexReport,
    pub integrality: IntegralityReport,
    pub projections: Vec<ProjectionResult>,
    pub base_change: Vec<BaseChangeResult>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub cases: Option<CaseAnalysis>,
    pub verdicts: Vec<Verdict>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub timing: Option<BTreeMap<String, f64>>,
}

impl AnalysisReport {
    pub fn exit_code(&self) -> i32 {
        exit_code(&self.verdicts)
    }
}

/// 0 when everything verified, 2 when only conditional findings remain, 1 on any failure.
pub fn exit_code(verdicts: &[Verdict]) -> i32 {
    if verdicts.iter().any(|v| v.status == Status::Failed) {
        1
    } else if verdicts.iter().any(|v| v.status == Status::Conditional) {
        2
    } else {
        0
    }
}

fn int(n: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(n.into())
}

fn sign(places: u64) -> BigRational {
    if places.is_multiple_of(2) {
        BigRational::one()
    } else {
        -BigRational::one()
    }
}

struct Timer {
    on: bool,
    t: Instant,
    stages: BTreeMap<String, f64>,
}

impl Timer {
    fn lap(&mut self, stage: &str) {
        if self.on {
            self.stages
                .insert(stage.to_string(), self.t.elapsed().as_secs_f64());
            self.t = Instant::now();
        }
    }
}

/// Checks on L-values, signs and predicted orders.
fn lvalue_verdicts(
    field: &MultiQuadField,
    s: &PlaceSet,
    bundle: &IdealBundle,
) -> Result<Vec<Verdict>> {
    let mut out = Vec::new();
    let bt = &bundle.bt;
    let v = bt.theta.character_transform();
    let zeta_q = lvalues::zeta_s_minus1(&MultiQuadField::rationals(), s)?;

    let mut lhs = Vec::new();
    let mut rhs = Vec::new();
    for o in &bt.subfields {
        let sub = field.subfield(o.chi)?;
        lhs.push(v[o.chi.0 as usize].clone());
        rhs.push(lvalues::zeta_s_minus1(&sub, s)? / &zeta_q);
    }
    out.push(Verdict::check(
        "l_value_zeta_quotients",
        "L^S(-1,chi) = zeta^S_{E_chi}(-1) / zeta^S_Q(-1)",
        lhs == rhs,
        ideals::fmt_diag(&lhs),
        ideals::fmt_diag(&rhs),
    ));

    let mut lhs = Vec::new();
    let mut rhs = Vec::new();
    for o in &bt.subfields {
        let raw = lvalues::dirichlet_l_minus1(1)?
            * lvalues::dirichlet_l_minus1(field.discriminant(o.chi))?;
        lhs.push(raw);
        rhs.push(lvalues::siegel_zeta_minus1(field.discriminant(o.chi)));
    }
    out.push(Verdict::check(
        "quadratic_zeta_siegel",
        "zeta(-1) L(-1,chi_D) = (1/60) sum sigma_1((D - b^2)/4)",
        lhs == rhs,
        ideals::fmt_diag(&lhs),
        ideals::fmt_diag(&rhs),
    ));

    let product = bt
        .subfields
        .iter()
        .fold(bt.zeta_f.clone(), |acc, o| acc * (&o.zeta / &bt.zeta_f));
    out.push(Verdict::check(
        "zeta_product",
        "zeta^S_E(-1) = zeta^S_Q(-1) prod_chi zeta^S_{E_chi}(-1)/zeta^S_Q(-1)",
        product == bt.zeta_e,
        fmt_rational(&bt.zeta_e),
        fmt_rational(&product),
    ));

    let mut lhs = vec![&sign(s.size()) * &v[0]];
    let mut rhs = vec![int(bt.k2_f.clone()) / int(W2_RATIONALS)];
    for o in &bt.subfields {
        lhs.push(&sign(s.size()) * &v[o.chi.0 as usize]);
        rhs.push(
            sign(o.places) * int(W2_RATIONALS) / int(o.w2) * int(o.k2.clone())
                / int(bt.k2_f.clone()),
        );
    }
    out.push(Verdict::check(
        "theta_sign_law",
        "(-1)^|S| theta = k2(F)/w2(F) e_0 + sum (-1)^|S_{E_chi}| (w2(F)/w2(E_chi)) (k2(E_chi)/k2(F)) e_chi",
        lhs == rhs,
        ideals::fmt_diag(&lhs),
        ideals::fmt_diag(&rhs),
    ));

    let mut lhs = vec![int(W2_RATIONALS) * &v[0]];
    let mut rhs = vec![int(bt.k2_f.clone())];
    for o in &bt.subfields {
        lhs.push(int(o.w2_minus) * &v[o.chi.0 as usize]);
        rhs.push(int(o.k2_minus.clone()));
    }
    let ok = lhs.iter().zip(&rhs).all(|(a, b)| &a.abs() == b);
    out.push(Verdict::check(
        "minus_part_identity",
        "w2(E_chi)^- e_chi theta = ± k2^S(E_chi)^- e_chi and w2(F) e_0 theta = ± k2^S(F) e_0",
        ok,
        ideals::fmt_diag(&lhs),
        ideals::fmt_diag(&rhs),
    ));

    let w2m: Vec<u64> = bt.subfields.iter().map(|o| o.w2_minus).collect();
    out.push(Verdict::check(
        "w2_minus_mod_4",
        "w2(E_chi)^- = 2 mod 4",
        w2m.iter().all(|w| w % 4 == 2),
        format!("{w2m:?}"),
        "all 2 mod 4",
    ));
    out.push(Verdict::check(
        "w2_prime_powers",
        "p^t | w2(E) implies p^t | w2(E_chi) for some chi != chi_0",
        field.w2_prime_powers_covered(),
        field.w2(),
        "covered by quadratic subfields",
    ));
    let id = lvalues::zeta_factorization_check(field, s)?;
    out.push(Verdict::check(
        "k2_w2_factorization",
        "(k2(E)/k2(F))/(w2(E)/w2(F)) = prod_chi (k2(E_chi)/k2(F))/(w2(E_chi)/w2(F))",
        id.holds(),
        fmt_rational(&id.lhs),
        fmt_rational(&id.rhs),
    ));
    out.push(Verdict::check(
        "birch_tate_orders",
        "zeta_L^S(-1) = (-1)^|S_L| k2^S(L)/w2(L) with k2 a positive integer",
        true,
        format!("k2(E) = {}", bt.k2_e),
        format!("|S_E| = {}", bt.places_e),
    ));
    Ok(out)
}

fn lattice_verdicts(
    field: &MultiQuadField,
    bundle: &IdealBundle,
    idx: &IndexReport,
) -> Result<Vec<Verdict>> {
    let g = field.group();
    let mut out = Vec::new();
    let ann_diag = ideals::character_diagonal(&bundle.ann.lattice, g);
    let w2_diag = ideals::w2_diagonal(field)?;
    out.push(Verdict::check(
        "ann_extension_diagonal",
        "Ann_R(W2(E)) S = w2(F) Z e_0 + sum w2(E_chi)^- Z e_chi",
        ann_diag == w2_diag,
        ideals::fmt_diag(&ann_diag),
        ideals::fmt_diag(&w2_diag),
    ));
    out.push(Verdict::check(
        "ann_index",
        "(R : Ann_R(W2(E))) = w2(E)",
        idx.r_over_ann == BigInt::from(field.w2()),
        &idx.r_over_ann,
        field.w2(),
    ));
    let stick_diag = ideals::character_diagonal(&bundle.stick_s, g);
    let fit_diag: Vec<BigRational> = bundle.bt.minus_diagonal().into_iter().map(int).collect();
    out.push(Verdict::check(
        "stick_extension_diagonal",
        "Stick S = Z k2^S(F) e_0 + sum Z k2^S(E_chi)^- e_chi = Fit S",
        stick_diag == fit_diag && bundle.stick_s == bundle.fit_s_predicted,
        ideals::fmt_diag(&stick_diag),
        ideals::fmt_diag(&fit_diag),
    ));
    let odd = |v: &[BigRational]| -> Vec<BigRational> {
        v.iter()
            .map(|x| {
                let mut n = x.numer().abs();
                while (&n % 2u32) == BigInt::from(0) && n != BigInt::from(0) {
                    n /= 2u32;
                }
                BigRational::new(n, x.denom().clone())
            })
            .collect()
    };
    out.push(Verdict::check(
        "odd_part_agreement",
        "Stick and Fit extend to the same ideal of Z[1/2][G]",
        odd(&stick_diag) == odd(&fit_diag),
        ideals::fmt_diag(&odd(&stick_diag)),
        ideals::fmt_diag(&odd(&fit_diag)),
    ));
    out.push(Verdict::check(
        "stick_integral",
        "Ann_R(W2(E)) theta^S(-1) ⊆ Z[G]",
        bundle.stick.is_sublattice_of(&bundle.r),
        format!("denominator {}", bundle.stick.denominator()),
        "1",
    ));
    let expect = ideals::maximal_order_index(field.rank());
    out.push(Verdict::check(
        "maximal_order_index",
        "(S : R) = 2^(m 2^(m-1))",
        idx.s_over_r == expect,
        &idx.s_over_r,
        &expect,
    ));
    out.push(Verdict::check(
        "stick_index_formula",
        "(R : Stick) = k2(E) (Stick S : Stick) / (delta 2^((m-2) 2^(m-1) + 1))",
        idx.index_formula.holds(),
        fmt_rational(&idx.index_formula.lhs),
        fmt_rational(&idx.index_formula.rhs),
    ));
    out.push(Verdict::check(
        "index_chain",
        "(S:R)(R:Stick) = (S:Stick S)(Stick S:Stick)",
        idx.index_chain,
        &idx.s_over_r * &idx.r_over_stick,
        &idx.s_over_stick_s * &idx.stick_s_over_stick,
    ));
    if field.rank() == 2 {
        let delta = field.delta();
        let ann = &bundle.ann.lattice;
        let closed = ideals::ann_closed_biquadratic(field)?;
        let ann_s = ideals::extend_to_maximal_order(ann, g)?;
        let ann_index = ann.index_in(&ann_s)?;
        out.push(Verdict::check(
            "ann_closed_form",
            "Ann_R(W2(E)) equals the displayed basis, of index 2 delta in Ann_R(W2(E)) S",
            *ann == closed && ann_index == BigInt::from(2 * delta),
            format!("index {ann_index}, equal {}", *ann == closed),
            format!("index {}", 2 * delta),
        ));
        let stick_closed = ideals::stick_closed_biquadratic(field, &bundle.bt)?;
        out.push(Verdict::check(
            "stick_closed_form",
            "Stick equals the displayed k2 basis, of index 2 delta in Stick S",
            bundle.stick == stick_closed && idx.stick_s_over_stick == BigInt::from(2 * delta),
            format!(
                "index {}, equal {}",
                idx.stick_s_over_stick,
                bundle.stick == stick_closed
            ),
            format!("index {}", 2 * delta),
        ));
        out.push(Verdict::check(
            "stick_index_equals_k2",
            "(R : Stick) = |K2(O_E^S)| = w2(E) |zeta_E^S(-1)|",
            idx.r_over_stick == idx.k2_predicted,
            &idx.r_over_stick,
            &idx.k2_predicted,
        ));
    }
    Ok(out)
}

fn structure_verdicts(
    field: &MultiQuadField,
    integrality: &IntegralityReport,
    projections: &[ProjectionResult],
    base_change: &[BaseChangeResult],
    cases: Option<&CaseAnalysis>,
) -> Vec<Verdict> {
    let mut out = vec![Verdict::check(
        "generator_integrality",
        "(sigma_q - q^2) theta^S(-1) ∈ Z[G] for admissible q",
        integrality.failures.is_empty(),
        format!(
            "{} primes, failures {:?}",
            integrality.primes_checked, integrality.failures
        ),
        "no failures",
    )];
    for p in projections {
        out.push(Verdict::check(
            &format!("projection_d{}", p.d),
            "pi(Stick_{E/Q}) = Stick_{E'/Q}",
            p.equal,
            format!(
                "rank {} denominator {}",
                p.projected.rank(),
                p.projected.denominator()
            ),
            format!(
                "rank {} denominator {}",
                p.direct.rank(),
                p.direct.denominator()
            ),
        ));
    }
    for b in base_change {
        out.push(Verdict::check(
            &format!("base_change_d{}", b.d),
            "Stick_{E/E'} ⊆ Stick_{E/Q}",
            b.contained && b.integral,
            format!("contained {}, integral {}", b.contained, b.integral),
            "contained true, integral true",
        ));
    }
    if let Some(c) = cases {
        if c.contains_sqrt2 {
            let b = c.candidates.iter().find(|x| x.label == "b");
            out.push(Verdict::check(
                "case_b_basis_is_stick",
                "the case (b) subspace lifts to Stick",
                b.is_some_and(|x| x.stick_relation == Comparison::Equal),
                "Stick",
                "case (b) lattice",
            ));
        } else {
            let equal: Vec<&str> = c
                .candidates
                .iter()
                .filter(|x| x.stick_relation == Comparison::Equal)
                .map(|x| x.label.as_str())
                .collect();
            out.push(Verdict::check(
                "stick_is_compatible_hyperplane",
                "Stick/(2 Stick S) is a hyperplane mapping onto each quadratic quotient",
                equal.len() == 1 && equal[0] != "a",
                format!("{equal:?}"),
                "exactly one b-candidate",
            ));
            out.push(Verdict::check(
                "stick_intersection",
                "Stick = (Stick S) ∩ (theta R)",
                c.stick_is_intersection,
                c.stick_is_intersection,
                true,
            ));
        }
        out.push(Verdict::conditional(
            "fitting_cases_consistent",
            "Fit/(2 Fit S) is one of the listed F2-subspaces",
            format!("{:?}", c.consistent),
            if c.case_c_excluded {
                "case (c) excluded by a norm witness"
            } else {
                "no norm witness"
            },
        ));
    }
    let _ = field;
    out
}

/// Full pipeline for one field; `s` is completed with missing ramified primes.
pub fn analyze(field: &MultiQuadField, s: &PlaceSet, cfg: RunConfig) -> Result<AnalysisReport> {
    let (s, added) = s.completed_for(field);
    let mut warnings = Vec::new();
    if !added.is_empty() {
        warnings.push(format!("added ramified primes {added:?} to S"));
    }
    analyze_exact(field, &s, cfg, added, warnings)
}

fn analyze_exact(
    field: &MultiQuadField,
    s: &PlaceSet,
    cfg: RunConfig,
    s_added: Vec<u64>,
    warnings: Vec<String>,
) -> Result<AnalysisReport> {
    let mut timer = Timer {
        on: cfg.timing,
        t: Instant::now(),
        stages: BTreeMap::new(),
    };
    let lvals = lvalues::l_values(field, s)?;
    timer.lap("lvalues");
    let bundle = ideals::stick_ideal(field, s, cfg.ann)?;
    timer.lap("lattices");
    let indices = ideals::index_report(field, &bundle)?;
    let integrality = ideals::integrality_check(field, s, cfg.ann.prime_bound)?;
    timer.lap("integrality");
    let projections = if field.rank() >= 1 {
        ideals::projection_check(field, s, &bundle, cfg.ann)?
    } else {
        Vec::new()
    };
    let base_change = if (1..=2).contains(&field.rank()) {
        ideals::base_change_check(field, s, &bundle, cfg.ann)?
    } else {
        Vec::new()
    };
    timer.lap("subfields");
    let cases = if field.rank() == 2 {
        Some(ideals::comparison_cases(field, s, &bundle, cfg.y_bound)?)
    } else {
        None
    };
    timer.lap("cases");
    let mut verdicts = lvalue_verdicts(field, s, &bundle)?;
    verdicts.extend(lattice_verdicts(field, &bundle, &indices)?);
    verdicts.extend(structure_verdicts(
        field,
        &integrality,
        &projections,
        &base_change,
        cases.as_ref(),
    ));
    Ok(AnalysisReport {
        header: Header {
            field: field.spec(),
            s: s.spec(),
            s_added,
            warnings,
            rank: field.rank(),
            prime_bound: cfg.ann.prime_bound,
            window: cfg.ann.window,
            conventions: conventions(),
            version: VERSION.to_string(),
        },
        lvalues: lvals,
        lattices: bundle,
        indices,
        integrality,
        projections,
        base_change,
        cases,
        verdicts,
        timing: cfg.timing.then_some(timer.stages),
    })
}

/// One field and one `S` of the verification battery.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BatteryCase {
    pub field: Vec<i64>,
    pub s: Vec<u64>,
}

/// Battery file: `prime_bound`, `window` and a list of `[[case]]` tables.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Battery {
    #[serde(default = "default_prime_bound")]
    pub prime_bound: u64,
    #[serde(default = "default_window")]
    pub window: usize,
    #[serde(rename = "case", default)]
    pub cases: Vec<BatteryCase>,
}

fn default_prime_bound() -> u64 {
    ideals::DEFAULT_PRIME_BOUND
}

fn default_window() -> usize {
    ideals::DEFAULT_WINDOW
}

/// Fields of the built-in battery: biquadratic without and with `sqrt 2`, quadratic, triquadratic.
pub const DEFAULT_FIELDS: &[&[i64]] = &[
    &[3, 7],
    &[3, 5],
    &[5, 13],
    &[7, 11],
    &[13, 17],
    &[3, 11],
    &[5, 7],
    &[6, 10],
    &[2, 5],
    &[2, 3],
    &[2, 7],
    &[2, 13],
    &[3, 6],
    &[2],
    &[5],
    &[3],
    &[13],
    &[2, 3, 5],
    &[3, 7, 11],
];

/// The ramified primes, then that set with the first one and two unramified primes.
pub fn default_s_sets(field: &MultiQuadField) -> Vec<Vec<u64>> {
    let ram = field.ramified_primes();
    let extra: Vec<u64> = arith::primes_up_to(100)
        .into_iter()
        .filter(|p| !ram.contains(p))
        .take(2)
        .collect();
    (0..=2)
        .map(|k| {
            let mut s = ram.clone();
            s.extend(&extra[..k]);
            s.sort_unstable();
            s
        })
        .collect()
}

impl Battery {
    pub fn default_battery() -> Self {
        let cases = DEFAULT_FIELDS
            .iter()
            .flat_map(|g| {
                let f = MultiQuadField::new(g).expect("default battery fields are valid");
                default_s_sets(&f).into_iter().map(move |s| BatteryCase {
                    field: g.to_vec(),
                    s,
                })
            })
            .collect();
        Battery {
            prime_bound: ideals::DEFAULT_PRIME_BOUND,
            window: ideals::DEFAULT_WINDOW,
            cases,
        }
    }

    /// Parses and validates a battery; every `S` must contain the ramified primes.
    pub fn from_toml(text: &str) -> Result<Self> {
        let b: Battery = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        b.validate()?;
        Ok(b)
    }

    pub fn validate(&self) -> Result<()> {
        for c in &self.cases {
            let f = MultiQuadField::new(&c.field)?;
            PlaceSet::for_field(&f, &c.s)?;
        }
        Ok(())
    }

    pub fn ann_config(&self) -> AnnConfig {
        AnnConfig {
            prime_bound: self.prime_bound,
            window: self.window,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaseResult {
    pub field: String,
    pub s: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub error: Option<String>,
    pub verdicts: Vec<Verdict>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClaimTally {
    pub claim: String,
    pub verified: usize,
    pub failed: usize,
    pub conditional: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub prime_bound: u64,
    pub window: usize,
    pub cases: Vec<CaseResult>,
    pub claims: Vec<ClaimTally>,
    pub properties: PropertyReport,
    pub failed: usize,
    pub conditional: usize,
}

impl VerifyReport {
    /// 0 iff no claim failed and every property suite passed.
    pub fn exit_code(&self) -> i32 {
        if self.failed == 0 && self.properties.passed() {
            0
        } else {
            1
        }
    }

    /// Claims by field, one line per claim.
    pub fn table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<34} {:>8} {:>6} {:>11}",
            "claim", "verified", "failed", "conditional"
        );
        for c in &self.claims {
            let _ = writeln!(
                out,
                "{:<34} {:>8} {:>6} {:>11}",
                c.claim, c.verified, c.failed, c.conditional
            );
        }
        let _ = writeln!(out);
        let _ = writeln!(
            out,
            "{:<20} {:<24} {:>8} {:>6} {:>11}",
            "field", "S", "verified", "failed", "conditional"
        );
        for case in &self.cases {
            let n = |st: Status| case.verdicts.iter().filter(|v| v.status == st).count();
            let _ = writeln!(
                out,
                "{:<20} {:<24} {:>8} {:>6} {:>11}",
                case.field,
                case.s,
                n(Status::Verified),
                n(Status::Failed),
                n(Status::Conditional)
            );
        }
        let _ = writeln!(out);
        for case in &self.cases {
            if let Some(e) = &case.error {
                let _ = writeln!(out, "ERROR field {} S {{{}}}: {e}", case.field, case.s);
            }
            for v in case.verdicts.iter().filter(|v| v.status == Status::Failed) {
                let _ = writeln!(
                    out,
                    "FAILED {} field {} S {{{}}}: {} vs {}",
                    v.claim, case.field, case.s, v.lhs, v.rhs
                );
            }
        }
        for s in &self.properties.suites {
            let _ = writeln!(
                out,
                "property suite {:<12} cases {:>3} {}",
                s.name,
                s.cases,
                if s.passed() { "ok" } else { "FAILED" }
            );
            for f in &s.failures {
                let _ = writeln!(out, "  {f}");
            }
        }
        let _ = writeln!(out, "property seed {}", self.properties.seed);
        out
    }
}

/// Claim names with the projection and base-change subfield suffixes collapsed.
fn claim_family(claim: &str) -> String {
    for prefix in ["projection", "base_change"] {
        if claim.starts_with(prefix) {
            return prefix.to_string();
        }
    }
    claim.to_string()
}

pub fn verify(
    battery: &Battery,
    seed: u64,
    property_cases: usize,
    y_bound: u64,
) -> Result<VerifyReport> {
    battery.validate()?;
    let cfg = RunConfig {
        ann: battery.ann_config(),
        y_bound,
        timing: false,
    };
    let cases: Vec<CaseResult> = battery
        .cases
        .par_iter()
        .map(|c| {
            let field = MultiQuadField::new(&c.field).expect("validated");
            let s = PlaceSet::for_field(&field, &c.s).expect("validated");
            match analyze_exact(&field, &s, cfg, Vec::new(), Vec::new()) {
                Ok(r) => CaseResult {
                    field: field.spec(),
                    s: s.spec(),
                    error: None,
                    verdicts: r.verdicts,
                },
                Err(e) => CaseResult {
                    field: field.spec(),
                    s: s.spec(),
                    verdicts: vec![Verdict::failed("pipeline", "analysis completes", &e)],
                    error: Some(e.to_string()),
                },
            }
        })
        .collect();
    let mut tally: BTreeMap<String, ClaimTally> = BTreeMap::new();
    for v in cases.iter().flat_map(|c| &c.verdicts) {
        let name = claim_family(&v.claim);
        let t = tally.entry(name.clone()).or_insert(ClaimTally {
            claim: name,
            verified: 0,
            failed: 0,
            conditional: 0,
        });
        match v.status {
            Status::Verified => t.verified += 1,
            Status::Failed => t.failed += 1,
            Status::Conditional => t.conditional += 1,
        }
    }
    let claims: Vec<ClaimTally> = tally.into_values().collect();
    let properties = props::run_properties(seed, property_cases, battery.ann_config());
    Ok(VerifyReport {
        prime_bound: battery.prime_bound,
        window: battery.window,
        failed: claims.iter().map(|c| c.failed).sum(),
        conditional: claims.iter().map(|c| c.conditional).sum(),
        cases,
        claims,
        properties,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CongruenceCheck {
    /// Every odd prime factor is `-1 mod 8`.
    pub primes_minus_one_mod_8: bool,
    /// `r` is twice an odd product.
    pub twice_product: bool,
    /// Every prime factor is `!= 1 mod 4`.
    pub primes_not_one_mod_4: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilySearchRow {
    pub r: u64,
    pub prime_factorization: Vec<u64>,
    pub congruence_check: CongruenceCheck,
    pub norm_witness: Option<(i64, i64)>,
    pub s_used: PlaceSet,
    /// Finite primes of `S` that are `1 mod 4`, which the family excludes.
    pub s_policy_violations: Vec<u64>,
    pub index_data: IndexReport,
    pub verdicts: Vec<Verdict>,
}

/// `r` is a product of distinct primes `= -1 mod 8`, or twice such a product.
pub fn qualifies(r: u64) -> bool {
    if r < 7 {
        return false;
    }
    let odd = if r.is_multiple_of(2) { r / 2 } else { r };
    if odd % 2 == 0 || odd == 1 {
        return false;
    }
    let f = arith::factor(odd);
    f.iter().all(|&(p, e)| e == 1 && p % 8 == 7)
}

/// Rows for every qualifying `r <= r_max`; `extra_s` adds user primes to the built `S`.
pub fn search(
    r_max: u64,
    y_bound: u64,
    extra_s: &[u64],
    ann: AnnConfig,
) -> Result<Vec<FamilySearchRow>> {
    let rs: Vec<u64> = (7..=r_max).filter(|&r| qualifies(r)).collect();
    rs.par_iter()
        .map(|&r| search_row(r, y_bound, extra_s, ann))
        .collect()
}

fn search_row(r: u64, y_bound: u64, extra_s: &[u64], ann: AnnConfig) -> Result<FamilySearchRow> {
    let field = MultiQuadField::new(&[2, r as i64])?;
    let primes: Vec<u64> = arith::factor(r).into_iter().map(|(p, _)| p).collect();
    let mut s_primes = vec![2];
    s_primes.extend(&primes);
    s_primes.extend(extra_s);
    let s = PlaceSet::for_field(&field, &s_primes)?;
    let s_policy_violations: Vec<u64> = s.finite().filter(|p| p % 4 == 1).collect();
    let norm_witness = ideals::ring_norm_witness(2, r, y_bound)
        .filter(|&(x, y)| (x as i128) * (x as i128) - 2 * (y as i128) * (y as i128) == r as i128);
    let bundle = ideals::stick_ideal(&field, &s, ann)?;
    let index_data = ideals::index_report(&field, &bundle)?;
    let mut verdicts = vec![
        Verdict::check(
            "maximal_order_index",
            "(S : R) = 2^(m 2^(m-1))",
            index_data.s_over_r == BigInt::from(16),
            &index_data.s_over_r,
            16,
        ),
        Verdict::check(
            "stick_index_formula",
            "(R : Stick) = k2(E) (Stick S : Stick) / (delta 2^((m-2) 2^(m-1) + 1))",
            index_data.index_formula.holds(),
            fmt_rational(&index_data.index_formula.lhs),
            fmt_rational(&index_data.index_formula.rhs),
        ),
        Verdict::check(
            "stick_index_equals_k2",
            "(R : Stick) = w2(E) |zeta_E^S(-1)|",
            index_data.r_over_stick == index_data.k2_predicted,
            &index_data.r_over_stick,
            &index_data.k2_predicted,
        ),
        Verdict::check(
            "norm_witness",
            "x^2 - 2 y^2 = r",
            norm_witness.is_some(),
            format!("{norm_witness:?}"),
            r,
        ),
    ];
    let annotation = if s_policy_violations.is_empty() && norm_witness.is_some() {
        "Stick ⊆ Fit with index 1 or 2"
    } else {
        "hypotheses not met: no conclusion"
    };
    verdicts.push(Verdict::conditional(
        "stick_in_fit",
        "Stick ⊆ Fit, index 1 or 2, for r a product of primes = -1 mod 8 or twice one",
        annotation,
        "conditional on K2 data",
    ));
    Ok(FamilySearchRow {
        r,
        congruence_check: CongruenceCheck {
            primes_minus_one_mod_8: primes.iter().filter(|&&p| p != 2).all(|p| p % 8 == 7),
            twice_product: r.is_multiple_of(2),
            primes_not_one_mod_4: primes.iter().all(|p| p % 4 != 1),
        },
        prime_factorization: primes,
        norm_witness,
        s_used: s,
        s_policy_violations,
        index_data,
        verdicts,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EmitFormat {
    Json,
    Csv,
    Markdown,
}

/// Header line of the CSV export, one row per character.
pub const CSV_COLUMNS: &str = "chi,d,disc,raw_l,adjusted_l,w2_minus,k2,k2_minus,stick_s_diagonal";

pub fn emit(report: &AnalysisReport, format: EmitFormat) -> Result<String> {
    match format {
        EmitFormat::Json => to_json(report),
        EmitFormat::Csv => Ok(emit_csv(report)),
        EmitFormat::Markdown => Ok(emit_markdown(report)),
    }
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| Error::Parse(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

pub fn parse_report(text: &str) -> Result<AnalysisReport> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

fn emit_csv(report: &AnalysisReport) -> String {
    let g = report.lattices.group();
    let diag = ideals::character_diagonal(&report.lattices.stick_s, g);
    let mut out = format!("{CSV_COLUMNS}\n");
    for rec in &report.lvalues {
        let i = rec.chi.0 as usize;
        let (d, w2m, k2, k2m) = match report.lattices.bt.subfield(rec.chi) {
            Some(o) => (
                o.d,
                o.w2_minus.to_string(),
                o.k2.to_string(),
                o.k2_minus.to_string(),
            ),
            None => (
                1,
                W2_RATIONALS.to_string(),
                report.lattices.bt.k2_f.to_string(),
                report.lattices.bt.k2_f.to_string(),
            ),
        };
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            rec.chi.0,
            d,
            rec.disc,
            fmt_rational(&rec.raw_l),
            fmt_rational(&rec.adjusted_l),
            w2m,
            k2,
            k2m,
            fmt_rational(&diag[i])
        );
    }
    out
}

fn emit_markdown(report: &AnalysisReport) -> String {
    let h = &report.header;
    let mut out = format!("# Field ({}) with S = {{∞,{}}}\n\n", h.field, h.s);
    out.push_str("| claim | status | lhs | rhs |\n|---|---|---|---|\n");
    for v in &report.verdicts {
        let status = match v.status {
            Status::Verified => "verified",
            Status::Failed => "failed",
            Status::Conditional => "conditional",
        };
        let _ = writeln!(
            out,
            "| {} | {} | {} | {} |",
            v.claim,
            status,
            v.lhs.replace('|', "\\|"),
            v.rhs.replace('|', "\\|")
        );
    }
    out
}
