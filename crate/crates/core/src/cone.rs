//! Scans of the w-Sasaki cone.
//!
//! Rays are parametrized by the slope `t = v2 / v1 > 0`, excluding
//! `t = w2 / w1` where `n = 0`. On the ray `(1, t)` in the `s := 1`
//! convention the admissible data is
//!
//! ```text
//! r = (w1 t - w2) / (w1 t + w2),  m1 = l2,  m2 = l2 t,  sNn = sigma / (l1 (w1 t - w2))
//! ```
//!
//! and the CSC residual `alpha` becomes an exact rational function of `t`.
//! Its positive roots are the CSC rays.

use std::ops::RangeInclusive;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::admissible::{ke_residuals_general, moment_polynomial, positivity, solve_extremal, PositivityStatus};
use crate::arith::{
    bounded_divisors, digits_for_bits, gcd, int, rat, round, serde_rational, sign, to_decimal, two_pow_neg,
};
use crate::error::{Error, Result};
use crate::join::{
    admissible_data_for_ray, admissible_data_unit_s, relative_fano_indices, validate_join, AdmissibleData,
    BaseGeometry, JoinSpec, RayVector, WeightVector,
};
use crate::poly::Polynomial;
use crate::ratfun::RationalFunction;
use crate::sturm::{cauchy_bound, isolate_roots, refine, split_away, RootInterval, SturmSequence};

pub const DEFAULT_PRECISION_BITS: u32 = 64;

/// `t -> alpha(data(1, t))` as a reduced quotient of polynomials.
///
/// The numerator is a primitive integer polynomial with positive leading
/// coefficient. For base dimension `d` its degree is at most `2d + 4`: the
/// moments are polynomials of degree `d` in `r`, and clearing the
/// `(w1 t + w2)` and `t` denominators adds at most four more.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RayFunction {
    pub numerator: Polynomial,
    pub denominator: Polynomial,
    #[serde(with = "serde_rational")]
    pub excluded_t: BigRational,
    /// Monic common factor cancelled between numerator and denominator.
    pub cancelled_factor: Polynomial,
    /// Positive roots of the cancelled factor (shared roots).
    pub shared_roots: Vec<RootInterval>,
}

impl RayFunction {
    /// `alpha` on the ray `(1, t)`, or `None` at a pole.
    pub fn eval(&self, t: &BigRational) -> Option<BigRational> {
        let d = self.denominator.eval(t);
        (!d.is_zero()).then(|| self.numerator.eval(t) / d)
    }

    /// `alpha` for the `s := 1` data of the ray `v`, using
    /// `alpha(v1, v2) = alpha(1, v2/v1) / v1`.
    pub fn eval_at_ray(&self, v: &RayVector) -> Option<BigRational> {
        self.eval(&v.slope()).map(|a| a / &v.v1)
    }
}

fn t_var() -> RationalFunction {
    RationalFunction::from_poly(Polynomial::x())
}

fn konst(c: BigRational) -> RationalFunction {
    RationalFunction::constant(c)
}

/// `r(t) = (w1 t - w2) / (w1 t + w2)`.
fn r_of_t(w: &WeightVector) -> RationalFunction {
    let (w1, w2) = (int(w.w1 as i64), int(w.w2 as i64));
    RationalFunction::new(
        Polynomial::linear(-w2.clone(), w1.clone()),
        Polynomial::linear(w2, w1),
    )
}

fn rf_pow(x: &RationalFunction, k: u32) -> RationalFunction {
    x.pow(k)
}

/// Raw numerator and denominator of `alpha(t)` before cancellation.
fn alpha_parts(join: &JoinSpec) -> (Polynomial, Polynomial) {
    let d = join.base.dn;
    let r = r_of_t(&join.w);
    let one = konst(BigRational::one());
    let l2 = int(join.l2 as i64);
    let inv_m1 = konst(l2.recip());
    let inv_m2 = (&konst(l2.clone()) * &t_var()).recip();
    // s r = sigma / (l1 (w1 t + w2)): the factor w1 t - w2 cancels
    let sr = RationalFunction::new(
        Polynomial::constant(join.base.sigma.clone()),
        Polynomial::linear(
            int((join.l1 * join.w.w2) as i64),
            int((join.l1 * join.w.w1) as i64),
        ),
    );
    let moment = |k: u32, j: u32| r.substitute_into(&moment_polynomial(k, j));
    let plus = rf_pow(&(&one + &r), d);
    let minus = rf_pow(&(&one - &r), d);
    let two = konst(int(2));
    let two_d_sr = &konst(int(2 * d as i64)) * &sr;

    let bp = &(&two * &inv_m1) * &plus;
    let bm = &(&two * &inv_m2) * &minus;
    let b1 = &(&(&konst(int(0)) - &bp) - &bm) - &(&two_d_sr * &moment(d - 1, 0));
    let b2 = &(&bm - &bp) - &(&two_d_sr * &moment(d - 1, 1));

    let a0 = moment(d, 0);
    let a1 = moment(d, 1);
    let a2 = moment(d, 2);
    let num = &(&b1 * &a1) - &(&a0 * &b2);
    let det = &(&a1 * &a1) - &(&a0 * &a2);
    (
        num.numerator() * det.denominator(),
        num.denominator() * det.numerator(),
    )
}

/// Builds the exact CSC residual of the join as a function of `t`.
pub fn build_csc_ray_function(join: &JoinSpec) -> Result<RayFunction> {
    let (raw_num, raw_den) = alpha_parts(join);
    if raw_num.is_zero() {
        return Err(Error::DegenerateFamily(join.to_string()));
    }
    let common = Polynomial::gcd(&raw_num, &raw_den);
    let num = raw_num.exact_div(&common).expect("gcd divides");
    let den = raw_den.exact_div(&common).expect("gcd divides");
    let prim = num.primitive_rational();
    let scale = &prim.leading() / &num.leading();
    let shared_roots = positive_roots(&common);
    Ok(RayFunction {
        numerator: prim,
        denominator: den.scale(&scale),
        excluded_t: join.excluded_t(),
        cancelled_factor: common,
        shared_roots,
    })
}

/// Isolating intervals for the positive real roots of `p`.
fn positive_roots(p: &Polynomial) -> Vec<RootInterval> {
    if p.degree().unwrap_or(0) == 0 {
        return Vec::new();
    }
    let sf = strip_zero_root(&p.squarefree_part());
    if sf.degree().unwrap_or(0) == 0 {
        return Vec::new();
    }
    isolate_roots(&sf, &BigRational::zero(), &cauchy_bound(&sf))
}

fn strip_zero_root(p: &Polynomial) -> Polynomial {
    let mut p = p.clone();
    while p.degree().unwrap_or(0) > 0 && p.coeff(0).is_zero() {
        p = p.exact_div(&Polynomial::x()).expect("t divides");
    }
    p
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RaySide {
    RPositive,
    RNegative,
    /// `t = w2/w1` itself; only reported for the product ray of `w = (1, 1)`,
    /// which is CSC whenever the base is.
    RZero,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RootRecord {
    pub isolating_interval: RootInterval,
    pub approx: String,
    #[serde(with = "serde_rational::option", skip_serializing_if = "Option::is_none")]
    pub rational_value: Option<BigRational>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub algebraic_degree: Option<u32>,
    /// Integer coefficients, lowest degree first.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub minimal_polynomial: Option<Vec<String>>,
    pub side: RaySide,
    /// Whether `alpha` re-solved at the interval ends changes sign (or
    /// vanishes exactly at a rational root).
    pub cross_checked: bool,
}

impl RootRecord {
    pub fn minimal_polynomial_ints(&self) -> Option<Vec<BigInt>> {
        self.minimal_polynomial
            .as_ref()
            .map(|v| v.iter().map(|c| c.parse().expect("integer coefficient")).collect())
    }
}

/// Recognizes `x` in `interval` as rational or quadratic over Q.
///
/// `p` must be a squarefree integer polynomial with `p(0) != 0`. Candidate
/// denominators (and leading / constant coefficients of quadratic factors)
/// come from the bounded divisor lists of `p`'s extreme coefficients, and
/// every candidate is confirmed by exact arithmetic.
fn recognize(p: &Polynomial, sturm: &SturmSequence, interval: &RootInterval) -> (RootInterval, Option<BigRational>, Option<Polynomial>) {
    if let RootInterval::Exact { value } = interval {
        let q = Polynomial::linear(-value.clone(), BigRational::one()).primitive_rational();
        return (interval.clone(), Some(value.clone()), Some(q));
    }
    let ints = p.primitive_integer_coeffs();
    let lead = ints.last().cloned().unwrap_or_else(BigInt::one);
    let constant = ints.first().cloned().unwrap_or_else(BigInt::one);
    let Some(lead_divs) = bounded_divisors(&lead) else {
        return (interval.clone(), None, None);
    };

    let mut iv = interval.clone();
    for q in &lead_divs {
        let qr = BigRational::from_integer(q.clone());
        let need = (&qr * int(2)).recip();
        if iv.width() > need {
            iv = refine(sturm, iv, &need);
        }
        if let RootInterval::Exact { value } = &iv {
            let m = Polynomial::linear(-value.clone(), BigRational::one()).primitive_rational();
            return (iv.clone(), Some(value.clone()), Some(m));
        }
        let cand = BigRational::new(crate::arith::floor(&(iv.lo() * &qr)) + 1, q.clone());
        if iv.contains(&cand) && p.eval(&cand).is_zero() {
            let m = Polynomial::linear(-cand.clone(), BigRational::one()).primitive_rational();
            return (RootInterval::Exact { value: cand.clone() }, Some(cand), Some(m));
        }
    }

    if p.degree().unwrap_or(0) >= 2 {
        if let Some(const_divs) = bounded_divisors(&constant) {
            if let Some(quad) = find_quadratic_factor(p, &iv, &lead_divs, &const_divs) {
                return (iv, None, Some(quad));
            }
        }
    }
    (iv, None, None)
}

fn find_quadratic_factor(
    p: &Polynomial,
    iv: &RootInterval,
    lead_divs: &[BigInt],
    const_divs: &[BigInt],
) -> Option<Polynomial> {
    let x = iv.midpoint();
    if x.is_zero() {
        return None;
    }
    let tol = rat(1, 1000);
    let x2 = &x * &x;
    for a in lead_divs {
        let ar = BigRational::from_integer(a.clone());
        for c0 in const_divs {
            for c in [c0.clone(), -c0.clone()] {
                let cr = BigRational::from_integer(c.clone());
                let b_est = -(&ar * &x2 + &cr) / &x;
                let b = round(&b_est);
                let br = BigRational::from_integer(b.clone());
                if (&b_est - &br).abs() > tol {
                    continue;
                }
                let disc = &b * &b - BigInt::from(4) * a * &c;
                if disc <= BigInt::zero() || is_square(&disc) {
                    continue;
                }
                let quad = Polynomial::new(vec![cr, br, ar.clone()]);
                if sign(&quad.eval(iv.lo())) * sign(&quad.eval(iv.hi())) >= 0 {
                    continue;
                }
                if p.exact_div(&quad).is_some() {
                    return Some(quad);
                }
            }
        }
    }
    None
}

fn is_square(n: &BigInt) -> bool {
    if n.is_negative() {
        return false;
    }
    let s = n.sqrt();
    &(&s * &s) == n
}

fn poly_strings(p: &Polynomial) -> Vec<String> {
    p.primitive_integer_coeffs().iter().map(|c| c.to_string()).collect()
}

/// Confirms the root by re-solving the extremal system on either side.
fn cross_check(join: &JoinSpec, iv: &RootInterval) -> bool {
    let alpha_at = |t: &BigRational| -> Option<BigRational> {
        let v = RayVector::from_slope(t.clone()).ok()?;
        let data = admissible_data_unit_s(join, &v).ok()?;
        solve_extremal(&data).ok().map(|s| s.alpha)
    };
    match iv {
        RootInterval::Exact { value } => alpha_at(value).is_some_and(|a| a.is_zero()),
        RootInterval::Open { lo, hi } => match (alpha_at(lo), alpha_at(hi)) {
            (Some(a), Some(b)) => sign(&a) * sign(&b) < 0,
            _ => false,
        },
    }
}

fn build_record(
    join: &JoinSpec,
    p: &Polynomial,
    sturm: &SturmSequence,
    iv: RootInterval,
    bits: u32,
    check: bool,
) -> RootRecord {
    let iv = refine(sturm, iv, &two_pow_neg(bits));
    let (iv, rational_value, minpoly) = recognize(p, sturm, &iv);
    let excluded = join.excluded_t();
    let side = match &iv {
        RootInterval::Exact { value } if value == &excluded => RaySide::RZero,
        _ if iv.lo() >= &excluded => RaySide::RPositive,
        _ => RaySide::RNegative,
    };
    RootRecord {
        approx: to_decimal(&iv.midpoint(), digits_for_bits(bits)),
        algebraic_degree: minpoly.as_ref().and_then(|m| m.degree()).map(|d| d as u32),
        minimal_polynomial: minpoly.as_ref().map(poly_strings),
        rational_value,
        side,
        cross_checked: check && cross_check(join, &iv),
        isolating_interval: iv,
    }
}

/// Positive roots of `p`, excluding `t = excluded`, as refined records.
fn root_records(join: &JoinSpec, p: &Polynomial, bits: u32, keep_excluded: bool, check: bool) -> (Vec<RootRecord>, bool) {
    let sf = strip_zero_root(&p.squarefree_part()).primitive_rational();
    if sf.degree().unwrap_or(0) == 0 {
        return (Vec::new(), false);
    }
    let sturm = SturmSequence::new(&sf);
    let excluded = join.excluded_t();
    let mut hit_excluded = false;
    let mut out = Vec::new();
    for iv in isolate_roots(&sf, &BigRational::zero(), &cauchy_bound(&sf)) {
        match split_away(&sturm, iv, &excluded) {
            Some(iv) => out.push(build_record(join, &sf, &sturm, iv, bits, check)),
            None => {
                hit_excluded = true;
                if keep_excluded {
                    let iv = RootInterval::Exact { value: excluded.clone() };
                    out.push(build_record(join, &sf, &sturm, iv, bits, false));
                }
            }
        }
    }
    (out, hit_excluded)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RayPositivity {
    pub v1: u64,
    pub v2: u64,
    pub status: PositivityStatus,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ScanReport {
    pub join: JoinSpec,
    pub precision_bits: u32,
    pub ray_function: RayFunction,
    pub roots: Vec<RootRecord>,
    /// The numerator also vanishes at the excluded ray `t = w2/w1`.
    pub excluded_root: bool,
    pub bound_check: bool,
    /// Sampled quasi-regular rays whose extremal polynomial is not positive.
    pub positivity_failures: Vec<RayPositivity>,
}

impl ScanReport {
    pub fn root_count(&self) -> usize {
        self.roots.len()
    }
}

/// Quasi-regular rays sampled for the positivity column of a scan:
/// coprime `(v1, v2)` with both entries at most 4.
pub const POSITIVITY_SAMPLE_MAX: u64 = 4;

/// Isolates all CSC rays of the join and refines them to
/// `2^-precision_bits`. For `w = (1, 1)` the product ray `t = 1` is
/// included as an exact root.
pub fn find_csc_rays(join: &JoinSpec, precision_bits: u32) -> Result<ScanReport> {
    let rf = build_csc_ray_function(join)?;
    let keep = join.w.is_unit();
    let (roots, excluded_root) = root_records(join, &rf.numerator, precision_bits, keep, true);
    let mut positivity_failures = Vec::new();
    for v1 in 1..=POSITIVITY_SAMPLE_MAX {
        for v2 in 1..=POSITIVITY_SAMPLE_MAX {
            if gcd(v1, v2) != 1 || join.w.w1 * v2 == join.w.w2 * v1 {
                continue;
            }
            let v = RayVector::quasi_regular(v1, v2)?;
            let sol = solve_extremal(&admissible_data_for_ray(join, &v)?)?;
            let status = positivity(&sol.f).status;
            if status != PositivityStatus::Positive {
                positivity_failures.push(RayPositivity { v1, v2, status });
            }
        }
    }
    Ok(ScanReport {
        join: join.clone(),
        precision_bits,
        ray_function: rf,
        roots,
        excluded_root,
        bound_check: check_multiplicity_bound(join),
        positivity_failures,
    })
}

/// Sufficient condition for at least three CSC rays on `S^3`-bundles
/// over `S^2`.
pub fn check_multiplicity_bound(join: &JoinSpec) -> bool {
    let (l1, l2) = (join.l1 as i64, join.l2 as i64);
    let (w1, w2) = (join.w.w1 as i64, join.w.w2 as i64);
    if join.w.is_unit() {
        2 * l2 > 11 * l1
    } else {
        2 * l2 > 16 * l1 * w1 - 5 * l1 * w2
    }
}

/// The first `count` coprime rays ordered by `max(v1, v2)`, then `v1`,
/// skipping the ray proportional to `w`.
pub fn ray_grid(w: &WeightVector, count: usize) -> Vec<RayVector> {
    let mut out = Vec::with_capacity(count);
    let mut size = 1u64;
    while out.len() < count {
        let mut shell: Vec<(u64, u64)> = (1..=size)
            .flat_map(|a| [(a, size), (size, a)])
            .filter(|&(a, b)| gcd(a, b) == 1 && w.w1 * b != w.w2 * a)
            .collect();
        shell.sort_unstable();
        shell.dedup();
        for (a, b) in shell {
            if out.len() == count {
                break;
            }
            out.push(RayVector::quasi_regular(a, b).expect("coprime"));
        }
        size += 1;
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExhaustionEntry {
    pub ray: RayVector,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub status: Option<PositivityStatus>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExhaustionReport {
    pub join: JoinSpec,
    pub entries: Vec<ExhaustionEntry>,
    pub positive: usize,
    pub evaluated: usize,
    /// Whether non-negative base scalar curvature predicts every ray positive.
    pub expected_all_positive: bool,
}

impl ExhaustionReport {
    pub fn all_positive(&self) -> bool {
        self.positive == self.evaluated
    }
}

/// Positivity of the extremal polynomial on each grid ray. Degenerate rays
/// are recorded, not fatal.
pub fn exhaustion_scan(join: &JoinSpec, grid: &[RayVector]) -> Result<ExhaustionReport> {
    let mut entries = Vec::with_capacity(grid.len());
    for v in grid {
        let entry = match admissible_data_for_ray(join, v) {
            Ok(data) => {
                let sol = solve_extremal(&data)?;
                ExhaustionEntry {
                    ray: v.clone(),
                    status: Some(positivity(&sol.f).status),
                    error: None,
                }
            }
            Err(e @ Error::DegenerateRay { .. }) => ExhaustionEntry {
                ray: v.clone(),
                status: None,
                error: Some(e.to_string()),
            },
            Err(e) => return Err(e),
        };
        entries.push(entry);
    }
    let evaluated = entries.iter().filter(|e| e.status.is_some()).count();
    let positive = entries
        .iter()
        .filter(|e| e.status == Some(PositivityStatus::Positive))
        .count();
    Ok(ExhaustionReport {
        join: join.clone(),
        entries,
        positive,
        evaluated,
        expected_all_positive: !join.base.sigma.is_negative(),
    })
}

/// Regular-ray datum of a genus-`g` join with `l2 = 1` that fails positivity.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FailingCell {
    pub genus: u32,
    pub l1: u64,
    pub w: WeightVector,
    pub data: AdmissibleData,
    #[serde(with = "serde_rational::option_pair", skip_serializing_if = "Option::is_none")]
    pub witness: Option<(BigRational, BigRational)>,
}

/// Regular-ray data `(dN=1, r=(w1-w2)/(w1+w2), m1=m2=1,
/// sNn=(2-2g)/(l1 (w1-w2)))` over the box `l1 <= l1_max`, `w2 < w1 <= w_max`,
/// keeping the cells whose extremal polynomial is not positive.
pub fn nonexistence_search(genera: RangeInclusive<u32>, l1_max: u64, w_max: u64) -> Result<Vec<FailingCell>> {
    if *genera.start() == 0 {
        return Err(Error::Precondition("genus must be at least 1".into()));
    }
    let mut cells = Vec::new();
    for g in genera {
        for l1 in 1..=l1_max {
            for w1 in 2..=w_max {
                for w2 in 1..w1 {
                    if gcd(w1, w2) == 1 {
                        cells.push((g, l1, w1, w2));
                    }
                }
            }
        }
    }
    let results: Vec<Result<Option<FailingCell>>> = cells
        .par_iter()
        .map(|&(g, l1, w1, w2)| {
            let q = (w1 - w2) as i64;
            let data = AdmissibleData::new(
                1,
                rat(2 - 2 * g as i64, l1 as i64 * q),
                rat(q, (w1 + w2) as i64),
                BigRational::one(),
                BigRational::one(),
            )?;
            let rep = positivity(&solve_extremal(&data)?.f);
            Ok((!rep.is_positive()).then_some(FailingCell {
                genus: g,
                l1,
                w: WeightVector { w1, w2 },
                data,
                witness: rep.witness,
            }))
        })
        .collect();
    let mut out = Vec::new();
    for r in results {
        if let Some(cell) = r? {
            out.push(cell);
        }
    }
    out.sort_by_key(|c| (c.genus, c.l1, c.w.w1, c.w.w2));
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KeCertificate {
    /// The Fano-class condition vanishes identically in `t`.
    pub fano_identically_zero: bool,
    /// The minimal polynomial of the root divides the integral condition.
    pub integral_vanishes_exactly: bool,
    /// Residuals evaluated at the rational midpoint of the isolating interval.
    pub fano_residual_at_midpoint: String,
    pub integral_residual_at_midpoint: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KeRay {
    pub join: JoinSpec,
    /// Numerator of the integral condition as a function of `t`.
    pub integral_condition: Polynomial,
    pub root: RootRecord,
    /// `w = (1, 1)`: the Einstein ray is the product ray `t = 1` where `n = 0`.
    pub product_ray: bool,
    pub certificate: KeCertificate,
    /// Index of the matching root in the CSC scan of the same join.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub csc_root_index: Option<usize>,
}

fn ke_conditions(join: &JoinSpec, index: i64) -> (RationalFunction, RationalFunction) {
    let d = join.base.dn;
    let r = r_of_t(&join.w);
    let one = konst(BigRational::one());
    let l2 = int(join.l2 as i64);
    let inv_m1 = konst(l2.recip());
    let inv_m2 = (&konst(l2) * &t_var()).recip();
    let moment = |k: u32, j: u32| r.substitute_into(&moment_polynomial(k, j));
    let (a0, a1) = (moment(d, 0), moment(d, 1));
    let integral = &(&inv_m2 * &(&a0 - &a1)) - &(&inv_m1 * &(&a0 + &a1));

    let n = RationalFunction::from_poly(Polynomial::linear(
        int(-((join.l1 * join.w.w2) as i64)),
        int((join.l1 * join.w.w1) as i64),
    ));
    let fano = &(&(&(&konst(int(2 * index)) * &r) / &n) - &(&(&one + &r) * &inv_m2)) - &(&(&one - &r) * &inv_m1);
    (fano, integral)
}

/// Finds the Sasaki-Einstein ray of the join with relative Fano indices.
pub fn ke_ray_solve(base: &BaseGeometry, w: &WeightVector, precision_bits: u32) -> Result<KeRay> {
    let index = match (base.kahler_einstein, base.fano_index) {
        (true, Some(i)) if i >= 1 => i,
        _ => {
            return Err(Error::Precondition(format!(
                "{} is not a positive Kähler-Einstein base",
                base.name
            )))
        }
    };
    let (l1, l2) = relative_fano_indices(index as u64, w);
    let join = validate_join(base.clone(), l1, l2, (w.w1, w.w2))?;
    let (fano, integral) = ke_conditions(&join, index);
    let p = integral.numerator().primitive_rational();
    if p.is_zero() {
        return Err(Error::DegenerateFamily(format!("{join}: integral condition vanishes identically")));
    }
    let product_ray = w.is_unit();
    let (mut roots, _) = root_records(&join, &p, precision_bits, product_ray, true);
    if !product_ray {
        roots.retain(|r| r.side != RaySide::RZero);
    }
    let root = match roots.len() {
        0 => return Err(Error::NoPositiveRoot(join.to_string())),
        1 => roots.pop().expect("one root"),
        n => {
            return Err(Error::Consistency(format!(
                "{join}: {n} positive roots of the Einstein condition"
            )))
        }
    };

    let integral_vanishes_exactly = match (&root.rational_value, root.minimal_polynomial_ints()) {
        (Some(v), _) => p.eval(v).is_zero(),
        (None, Some(m)) => {
            let m = Polynomial::new(m.into_iter().map(BigRational::from_integer).collect());
            p.exact_div(&m).is_some()
        }
        _ => false,
    };

    let mid = root.isolating_interval.midpoint();
    let digits = digits_for_bits(precision_bits);
    let (fano_mid, integral_mid) = if product_ray {
        ("0".to_string(), to_decimal(&integral.eval(&mid).unwrap_or_default(), digits))
    } else {
        let v = RayVector::from_slope(mid.clone())?;
        let data = admissible_data_unit_s(&join, &v)?;
        let n = int(join.l1 as i64) * (int(w.w1 as i64) * &mid - int(w.w2 as i64));
        let res = ke_residuals_general(&data, &int(index), &n);
        (
            to_decimal(&res.fano_residual, digits),
            to_decimal(&res.integral_residual, digits),
        )
    };

    let csc_root_index = if product_ray {
        None
    } else {
        let scan = find_csc_rays(&join, precision_bits)?;
        let found = scan.roots.iter().position(|c| {
            c.isolating_interval.overlaps(&root.isolating_interval)
                && (c.minimal_polynomial.is_none()
                    || root.minimal_polynomial.is_none()
                    || c.minimal_polynomial == root.minimal_polynomial)
        });
        match found {
            Some(i) => Some(i),
            None => {
                return Err(Error::Consistency(format!(
                    "{join}: Einstein ray {} is not among the CSC rays",
                    root.approx
                )))
            }
        }
    };

    Ok(KeRay {
        join,
        integral_condition: p,
        root,
        product_ray,
        certificate: KeCertificate {
            fano_identically_zero: fano.is_zero(),
            integral_vanishes_exactly,
            fano_residual_at_midpoint: fano_mid,
            integral_residual_at_midpoint: integral_mid,
        },
        csc_root_index,
    })
}
