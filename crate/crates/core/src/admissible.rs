//! The extremal polynomial boundary-value problem.
//!
//! For admissible data `(d, s, r, m1, m2)` the extremal polynomial `F` is the
//! unique solution of
//!
//! ```text
//! F''(z) = (1 + r z)^(d-1) (2 d s r + (alpha z + beta)(1 + r z))
//! F(-1) = F(1) = 0,  F'(-1) = (2/m2)(1 - r)^d,  F'(1) = -(2/m1)(1 + r)^d
//! ```
//!
//! An admissible extremal metric exists when `F > 0` on `(-1, 1)`; the class
//! carries a CSC metric iff `alpha = 0`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{int, serde_rational, sign, solve_linear, two_pow_neg};
use crate::error::{Error, Result};
use crate::join::AdmissibleData;
use crate::poly::Polynomial;
use crate::sturm::{isolate_roots, refine, SturmSequence};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtremalSolution {
    pub f: Polynomial,
    pub alpha: BigRational,
    pub beta: BigRational,
    pub data: AdmissibleData,
}

/// JSON form of a solved extremal problem.
#[derive(Clone, Debug, Serialize)]
pub struct ExtremalRecord {
    #[serde(rename = "F")]
    pub f: Polynomial,
    #[serde(with = "serde_rational")]
    pub alpha: BigRational,
    #[serde(with = "serde_rational")]
    pub beta: BigRational,
    pub positivity: PositivityReport,
    pub data: AdmissibleData,
}

impl ExtremalSolution {
    pub fn record(&self) -> ExtremalRecord {
        ExtremalRecord {
            f: self.f.clone(),
            alpha: self.alpha.clone(),
            beta: self.beta.clone(),
            positivity: positivity(&self.f),
            data: self.data.clone(),
        }
    }

    /// Right-hand side of the extremal ODE for this solution's constants.
    pub fn second_derivative_rhs(&self) -> Polynomial {
        extremal_rhs(&self.data, &self.alpha, &self.beta)
    }
}

/// `(1 + r z)^(d-1) (2 d s r + (alpha z + beta)(1 + r z))`.
pub fn extremal_rhs(data: &AdmissibleData, alpha: &BigRational, beta: &BigRational) -> Polynomial {
    let d = data.dn;
    let base = Polynomial::one_plus_rx_pow(&data.r, d - 1);
    let lin = Polynomial::linear(beta.clone(), alpha.clone());
    let inner = &Polynomial::constant(int(2 * d as i64) * &data.s_nn * &data.r)
        + &(&lin * &Polynomial::linear(BigRational::one(), data.r.clone()));
    &base * &inner
}

/// Solves the boundary-value problem by integrating the ODE twice and
/// solving the 4x4 system in `(alpha, beta, c1, c0)`.
pub fn solve_extremal(data: &AdmissibleData) -> Result<ExtremalSolution> {
    data.validate()?;
    let d = data.dn;
    let r = &data.r;
    let full = Polynomial::one_plus_rx_pow(r, d);
    let g0 = Polynomial::one_plus_rx_pow(r, d - 1).scale(&(int(2 * d as i64) * &data.s_nn * r));
    let g_alpha = &Polynomial::x() * &full;
    let g_beta = full;

    let f0 = g0.antiderivative().antiderivative();
    let fa = g_alpha.antiderivative().antiderivative();
    let fb = g_beta.antiderivative().antiderivative();
    let (df0, dfa, dfb) = (f0.derivative(), fa.derivative(), fb.derivative());

    let one = BigRational::one();
    let minus_one = -BigRational::one();
    let zero = BigRational::zero();
    let two = int(2);
    let slope_minus = &two / &data.m2 * pow(&(&one - r), d);
    let slope_plus = -(&two / &data.m1 * pow(&(&one + r), d));

    let matrix = vec![
        vec![fa.eval(&one), fb.eval(&one), one.clone(), one.clone()],
        vec![fa.eval(&minus_one), fb.eval(&minus_one), minus_one.clone(), one.clone()],
        vec![dfa.eval(&minus_one), dfb.eval(&minus_one), one.clone(), zero.clone()],
        vec![dfa.eval(&one), dfb.eval(&one), one.clone(), zero],
    ];
    let rhs = vec![
        -f0.eval(&one),
        -f0.eval(&minus_one),
        slope_minus - df0.eval(&minus_one),
        slope_plus - df0.eval(&one),
    ];
    let x = solve_linear(matrix, rhs).ok_or_else(|| Error::SingularSystem(data.to_string()))?;
    let [alpha, beta, c1, c0]: [BigRational; 4] = x.try_into().expect("four unknowns");

    let f = &(&(&f0 + &fa.scale(&alpha)) + &fb.scale(&beta)) + &Polynomial::linear(c0, c1);
    Ok(ExtremalSolution {
        f,
        alpha,
        beta,
        data: data.clone(),
    })
}

fn pow(x: &BigRational, k: u32) -> BigRational {
    (0..k).fold(BigRational::one(), |acc, _| acc * x)
}

/// `∫_{-1}^{1} z^j (1 + r z)^k dz` as a polynomial in `r`.
///
/// Only binomial terms with `i + j` even survive, so there is no `1/r`.
pub fn moment_polynomial(k: u32, j: u32) -> Polynomial {
    let mut coeffs = vec![BigRational::zero(); k as usize + 1];
    let mut binom = BigInt::one();
    for i in 0..=k {
        if (i + j).is_multiple_of(2) {
            coeffs[i as usize] = BigRational::new(binom.clone() * 2, BigInt::from(i + j + 1));
        }
        binom = binom * BigInt::from(k - i) / BigInt::from(i + 1);
    }
    Polynomial::new(coeffs)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PositivityStatus {
    /// `F > 0` on `(-1, 1)` and every endpoint zero is simple.
    Positive,
    /// `F > 0` on `(-1, 1)` but `F` vanishes to order at least two at an
    /// endpoint, so no momentum profile has the required boundary slope.
    BoundaryZeroOnly,
    /// `F <= 0` somewhere in `(-1, 1)`.
    Fails,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PositivityReport {
    pub status: PositivityStatus,
    /// Interval inside `(-1, 1)` containing a point with `F <= 0`.
    #[serde(with = "serde_rational::option_pair", skip_serializing_if = "Option::is_none")]
    pub witness: Option<(BigRational, BigRational)>,
    /// Distinct roots of `F` strictly inside `(-1, 1)`.
    pub interior_roots: usize,
    /// Sturm sign changes at -1 and 1 of `F` with its endpoint factors removed.
    pub sturm_variations: (usize, usize),
    /// Order of vanishing of `F` at -1 and at 1.
    pub endpoint_multiplicities: (u32, u32),
}

impl PositivityReport {
    pub fn is_positive(&self) -> bool {
        self.status == PositivityStatus::Positive
    }
}

fn strip_root(p: &Polynomial, root: i64) -> (Polynomial, u32) {
    let factor = Polynomial::linear(int(-root), BigRational::one());
    let mut p = p.clone();
    let mut k = 0;
    while p.degree().unwrap_or(0) > 0 && p.eval(&int(root)).is_zero() {
        p = p.exact_div(&factor).expect("root divides");
        k += 1;
    }
    (p, k)
}

/// Decides positivity of `F` on `(-1, 1)` exactly by Sturm root counting.
pub fn positivity(f: &Polynomial) -> PositivityReport {
    let zero_point = BigRational::zero();
    if f.is_zero() {
        return PositivityReport {
            status: PositivityStatus::Fails,
            witness: Some((zero_point.clone(), zero_point)),
            interior_roots: 0,
            sturm_variations: (0, 0),
            endpoint_multiplicities: (0, 0),
        };
    }
    let (g, at_plus) = strip_root(f, 1);
    let (g, at_minus) = strip_root(&g, -1);
    let core = g.squarefree_part();
    let sturm = SturmSequence::new(&core);
    let lo = -BigRational::one();
    let hi = BigRational::one();
    let variations = (sturm.variations_at(&lo), sturm.variations_at(&hi));
    let interior_roots = variations.0.saturating_sub(variations.1);

    let (status, witness) = if interior_roots == 0 {
        if sign(&f.eval(&zero_point)) > 0 {
            let status = if at_plus <= 1 && at_minus <= 1 {
                PositivityStatus::Positive
            } else {
                PositivityStatus::BoundaryZeroOnly
            };
            (status, None)
        } else {
            (PositivityStatus::Fails, Some((zero_point.clone(), zero_point)))
        }
    } else {
        let first = isolate_roots(&core, &lo, &hi)
            .into_iter()
            .next()
            .expect("Sturm count is positive");
        let refined = refine(&sturm, first, &two_pow_neg(33));
        (
            PositivityStatus::Fails,
            Some((refined.lo().clone(), refined.hi().clone())),
        )
    };
    PositivityReport {
        status,
        witness,
        interior_roots,
        sturm_variations: variations,
        endpoint_multiplicities: (at_minus, at_plus),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExtremalExistence {
    ExistsAdmissible,
    /// Manifold case with `F` not positive: no extremal metric in the class.
    NoAdmissibleManifoldCase,
    /// Orbifold case with `F` not positive: the converse is not available.
    UnknownOrbifold,
}

pub fn extremal_exists(data: &AdmissibleData) -> Result<ExtremalExistence> {
    let sol = solve_extremal(data)?;
    Ok(if positivity(&sol.f).is_positive() {
        ExtremalExistence::ExistsAdmissible
    } else if data.is_manifold_case() {
        ExtremalExistence::NoAdmissibleManifoldCase
    } else {
        ExtremalExistence::UnknownOrbifold
    })
}

/// `alpha` of the extremal solution; zero iff the class is CSC.
pub fn csc_residual(data: &AdmissibleData) -> Result<BigRational> {
    solve_extremal(data).map(|s| s.alpha)
}

/// Closed-form CSC test. `c` and `residual` use the `c` formula with its
/// `sNn` term multiplied by `r`; the `_literal` fields keep the formula
/// without that factor, which does not vanish at known CSC data.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CscClosedForm {
    #[serde(with = "serde_rational")]
    pub k: BigRational,
    #[serde(with = "serde_rational")]
    pub c: BigRational,
    #[serde(with = "serde_rational")]
    pub residual: BigRational,
    #[serde(with = "serde_rational")]
    pub c_literal: BigRational,
    #[serde(with = "serde_rational")]
    pub residual_literal: BigRational,
}

pub fn csc_closed_form(data: &AdmissibleData) -> CscClosedForm {
    let d = data.dn;
    let (r, s, m1, m2) = (&data.r, &data.s_nn, &data.m1, &data.m2);
    let one = BigRational::one();
    let (p, m) = (&one + r, &one - r);
    let di = int(d as i64);
    let diff = |k: u32| pow(&p, k) - pow(&m, k);

    let k = int(2) * (&di + &one) * r
        * (m2 * pow(&p, d) * (&one + m1 * s) - m1 * pow(&m, d) * (m2 * s - &one))
        / (m1 * m2 * diff(d + 1));

    let c_with = |s_term: BigRational| {
        int(2) * pow(&(&one - r * r), d) * (m2 * &m + m1 * &p - s_term) / (m1 * m2 * diff(d + 1))
    };
    let c = c_with(int(2) * m1 * m2 * s * r);
    let c_literal = c_with(int(2) * m1 * m2 * s);

    let lhs = int(2) * s * diff(d + 1) / (r * (&di + &one))
        - &k * diff(d + 2) / (r * r * (&di + &one) * (&di + int(2)));
    let residual = &lhs + int(2) * &c;
    let residual_literal = &lhs + int(2) * &c_literal;
    CscClosedForm {
        k,
        c,
        residual,
        c_literal,
        residual_literal,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KeResiduals {
    #[serde(with = "serde_rational")]
    pub fano_residual: BigRational,
    #[serde(with = "serde_rational")]
    pub integral_residual: BigRational,
}

impl KeResiduals {
    pub fn vanish(&self) -> bool {
        self.fano_residual.is_zero() && self.integral_residual.is_zero()
    }
}

/// Kähler-Einstein residuals for a positive KE base of index `fano_index`.
pub fn ke_residuals(data: &AdmissibleData, fano_index: i64, n: i64) -> Result<KeResiduals> {
    if n == 0 {
        return Err(Error::InvalidData("n must be nonzero".into()));
    }
    Ok(ke_residuals_general(data, &int(fano_index), &int(n)))
}

/// Same as [`ke_residuals`] for a rational `n`, as in the `s := 1`
/// convention on irregular rays. `n` must be nonzero.
pub fn ke_residuals_general(data: &AdmissibleData, fano_index: &BigRational, n: &BigRational) -> KeResiduals {
    let one = BigRational::one();
    let (r, m1, m2) = (&data.r, &data.m1, &data.m2);
    let fano_residual = int(2) * r * fano_index / n - (&one + r) / m2 - (&one - r) / m1;
    let integrand = &ke_integrand(data) * &Polynomial::one_plus_rx_pow(r, data.dn);
    KeResiduals {
        fano_residual,
        integral_residual: integrand.integrate(&-one.clone(), &one),
    }
}

/// `(1 - z)/m2 - (1 + z)/m1`.
fn ke_integrand(data: &AdmissibleData) -> Polynomial {
    let inv1 = data.m1.recip();
    let inv2 = data.m2.recip();
    Polynomial::linear(&inv2 - &inv1, -(&inv2 + &inv1))
}
