//! Join parameters `(N, l1, l2, w)`, rays of the w-Sasaki cone, and the
//! quotient-orbifold and admissible data attached to each ray.
//!
//! Everything here is exact rational arithmetic.

use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{gcd, int, rat, serde_rational};
use crate::error::{Error, Result};

/// Coprime weights of `S^3_w`, normalized so that `w1 >= w2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct WeightVector {
    pub w1: u64,
    pub w2: u64,
}

impl WeightVector {
    pub fn new(w1: u64, w2: u64) -> Result<Self> {
        if w1 == 0 {
            return Err(Error::NonPositive { name: "w1" });
        }
        if w2 == 0 {
            return Err(Error::NonPositive { name: "w2" });
        }
        let g = gcd(w1, w2);
        if g != 1 {
            return Err(Error::WeightsNotCoprime { w1, w2, gcd: g });
        }
        if w1 < w2 {
            return Err(Error::WeightsUnordered { w1, w2 });
        }
        Ok(WeightVector { w1, w2 })
    }

    /// `|w| = w1 + w2`.
    pub fn norm(&self) -> u64 {
        self.w1 + self.w2
    }

    pub fn is_unit(&self) -> bool {
        self.w1 == 1 && self.w2 == 1
    }
}

impl fmt::Display for WeightVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.w1, self.w2)
    }
}

/// A constant-scalar-curvature Kähler base `N`.
///
/// `sigma` is normalized so that `s_{N_n} = sigma / n`; for quasi-monotone
/// bases it equals the index `I_N`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BaseGeometry {
    pub name: String,
    #[serde(rename = "dN")]
    pub dn: u32,
    #[serde(with = "serde_rational")]
    pub sigma: BigRational,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fano_index: Option<i64>,
    pub kahler_einstein: bool,
}

impl BaseGeometry {
    pub fn cp1() -> Self {
        Self::catalog_entry("CP1", 1, 2)
    }

    pub fn cp2() -> Self {
        Self::catalog_entry("CP2", 2, 3)
    }

    pub fn k3() -> Self {
        Self::catalog_entry("K3", 2, 0)
    }

    /// Genus-`g` Riemann surface with its constant curvature metric.
    pub fn riemann_surface(genus: u32) -> Self {
        let index = 2 - 2 * genus as i64;
        Self::catalog_entry(&format!("Sigma_{genus}"), 1, index)
    }

    fn catalog_entry(name: &str, dn: u32, index: i64) -> Self {
        BaseGeometry {
            name: name.to_string(),
            dn,
            sigma: int(index),
            fano_index: Some(index),
            kahler_einstein: true,
        }
    }

    /// Looks up a built-in base: `cp1`, `cp2`, `k3`, `sigma_<g>` or `genus:<g>`.
    pub fn by_name(name: &str) -> Result<Self> {
        let lower = name.trim().to_ascii_lowercase();
        match lower.as_str() {
            "cp1" => return Ok(Self::cp1()),
            "cp2" => return Ok(Self::cp2()),
            "k3" => return Ok(Self::k3()),
            _ => {}
        }
        let genus = lower
            .strip_prefix("sigma_")
            .or_else(|| lower.strip_prefix("genus:"))
            .and_then(|g| g.parse::<u32>().ok());
        match genus {
            Some(g) => Ok(Self::riemann_surface(g)),
            None => Err(Error::InvalidBase(format!("unknown base {name:?}"))),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.dn == 0 {
            return Err(Error::InvalidBase(format!("{}: dN must be positive", self.name)));
        }
        if self.kahler_einstein {
            match self.fano_index {
                Some(i) if self.sigma == int(i) => {}
                Some(_) => {
                    return Err(Error::InvalidBase(format!(
                        "{}: Kähler-Einstein base needs sigma = fano_index",
                        self.name
                    )))
                }
                None => {
                    return Err(Error::InvalidBase(format!(
                        "{}: Kähler-Einstein base needs a fano_index",
                        self.name
                    )))
                }
            }
        }
        Ok(())
    }
}

/// Parses a base catalog: `[{name, dN, sigma: "p/q", fano_index?, kahler_einstein}]`.
pub fn load_catalog(json: &str) -> Result<Vec<BaseGeometry>> {
    let bases: Vec<BaseGeometry> =
        serde_json::from_str(json).map_err(|e| Error::Catalog(e.to_string()))?;
    for b in &bases {
        b.validate()?;
    }
    Ok(bases)
}

/// Discrete data of the join `M *_{l1,l2} S^3_w`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct JoinSpec {
    pub base: BaseGeometry,
    pub l1: u64,
    pub l2: u64,
    pub w: WeightVector,
}

impl JoinSpec {
    /// Cell key used to sort census output.
    pub fn key(&self) -> (u64, u64, u64, u64) {
        (self.l1, self.l2, self.w.w1, self.w.w2)
    }

    /// `l1 |w|`, the Chern class key.
    pub fn chern_key(&self) -> u64 {
        self.l1 * self.w.norm()
    }

    /// `t = w2/w1`, the ray where `n = 0`.
    pub fn excluded_t(&self) -> BigRational {
        rat(self.w.w2 as i64, self.w.w1 as i64)
    }
}

impl fmt::Display for JoinSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} l=({},{}) w={}", self.base.name, self.l1, self.l2, self.w)
    }
}

/// Checks the join conditions and returns the normalized [`JoinSpec`].
pub fn validate_join(base: BaseGeometry, l1: u64, l2: u64, w: (u64, u64)) -> Result<JoinSpec> {
    if l1 == 0 {
        return Err(Error::NonPositive { name: "l1" });
    }
    if l2 == 0 {
        return Err(Error::NonPositive { name: "l2" });
    }
    base.validate()?;
    let w = WeightVector::new(w.0, w.1)?;
    let product = l1 * w.w1 * w.w2;
    let g = gcd(l2, product);
    if g != 1 {
        return Err(Error::AdmissibilityGcdFailure { l2, product, gcd: g });
    }
    Ok(JoinSpec { base, l1, l2, w })
}

/// Reeb vector `v1 H1 + v2 H2` of the w-Sasaki cone.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RayVector {
    #[serde(with = "serde_rational")]
    pub v1: BigRational,
    #[serde(with = "serde_rational")]
    pub v2: BigRational,
}

impl RayVector {
    /// A quasi-regular ray: coprime positive integers.
    pub fn quasi_regular(v1: u64, v2: u64) -> Result<Self> {
        if v1 == 0 || v2 == 0 || gcd(v1, v2) != 1 {
            return Err(Error::InvalidRay {
                v1: v1.to_string(),
                v2: v2.to_string(),
            });
        }
        Ok(RayVector {
            v1: int(v1 as i64),
            v2: int(v2 as i64),
        })
    }

    /// Any ray with positive rational components.
    pub fn real(v1: BigRational, v2: BigRational) -> Result<Self> {
        if !v1.is_positive() || !v2.is_positive() {
            return Err(Error::InvalidRay {
                v1: v1.to_string(),
                v2: v2.to_string(),
            });
        }
        Ok(RayVector { v1, v2 })
    }

    /// The ray `(1, t)`.
    pub fn from_slope(t: BigRational) -> Result<Self> {
        Self::real(BigRational::one(), t)
    }

    /// `Some((v1, v2))` when the ray is quasi-regular in lowest terms.
    pub fn integer_pair(&self) -> Option<(u64, u64)> {
        if !self.v1.is_integer() || !self.v2.is_integer() {
            return None;
        }
        let a = self.v1.to_integer().to_u64()?;
        let b = self.v2.to_integer().to_u64()?;
        (a > 0 && b > 0 && gcd(a, b) == 1).then_some((a, b))
    }

    /// `t = v2 / v1`.
    pub fn slope(&self) -> BigRational {
        &self.v2 / &self.v1
    }

    fn degenerate(&self) -> Error {
        Error::DegenerateRay {
            v1: self.v1.to_string(),
            v2: self.v2.to_string(),
        }
    }
}

/// Quotient orbifold data of a quasi-regular ray.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiberQuotientData {
    pub q: i64,
    pub s: u64,
    pub m: u64,
    pub m1: u64,
    pub m2: u64,
    pub n: i64,
    #[serde(with = "serde_rational")]
    pub r: BigRational,
}

pub fn fiber_quotient(join: &JoinSpec, v: &RayVector) -> Result<FiberQuotientData> {
    let (v1, v2) = v.integer_pair().ok_or_else(|| Error::InvalidRay {
        v1: v.v1.to_string(),
        v2: v.v2.to_string(),
    })?;
    let (w1, w2) = (join.w.w1 as i64, join.w.w2 as i64);
    let (v1i, v2i) = (v1 as i64, v2 as i64);
    let q = w1 * v2i - w2 * v1i;
    if q == 0 {
        return Err(v.degenerate());
    }
    let s = gcd(q.unsigned_abs(), join.l2);
    let m = join.l2 / s;
    Ok(FiberQuotientData {
        q,
        s,
        m,
        m1: v1 * m,
        m2: v2 * m,
        n: join.l1 as i64 * q / s as i64,
        r: rat(q, w1 * v2i + w2 * v1i),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RayClass {
    Regular,
    AlmostRegular,
    QuasiRegular,
}

pub fn classify_ray(join: &JoinSpec, v: &RayVector) -> Result<RayClass> {
    let data = fiber_quotient(join, v)?;
    let unit = v.integer_pair() == Some((1, 1));
    Ok(match (unit, data.s == join.l2) {
        (true, true) => RayClass::Regular,
        (true, false) => RayClass::AlmostRegular,
        _ => RayClass::QuasiRegular,
    })
}

/// Input `(d_N, s_{N_n}, r, m1, m2)` of the extremal boundary-value problem.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AdmissibleData {
    #[serde(rename = "dN")]
    pub dn: u32,
    #[serde(rename = "sNn", with = "serde_rational")]
    pub s_nn: BigRational,
    #[serde(with = "serde_rational")]
    pub r: BigRational,
    #[serde(with = "serde_rational")]
    pub m1: BigRational,
    #[serde(with = "serde_rational")]
    pub m2: BigRational,
}

impl AdmissibleData {
    pub fn new(dn: u32, s_nn: BigRational, r: BigRational, m1: BigRational, m2: BigRational) -> Result<Self> {
        let data = AdmissibleData { dn, s_nn, r, m1, m2 };
        data.validate()?;
        Ok(data)
    }

    pub fn validate(&self) -> Result<()> {
        if self.dn == 0 {
            return Err(Error::InvalidData("dN must be positive".into()));
        }
        if self.r.is_zero() || self.r.abs() >= BigRational::one() {
            return Err(Error::InvalidData(format!("need 0 < |r| < 1, got r = {}", self.r)));
        }
        if !self.m1.is_positive() || !self.m2.is_positive() {
            return Err(Error::InvalidData(format!(
                "ramification indices must be positive, got m1 = {}, m2 = {}",
                self.m1, self.m2
            )));
        }
        Ok(())
    }

    /// `(m1, m2) = (1, 1)`: no branch divisor.
    pub fn is_manifold_case(&self) -> bool {
        self.m1.is_one() && self.m2.is_one()
    }

    /// `(m1, m2, sNn) -> (m1 / lambda, m2 / lambda, lambda sNn)`.
    pub fn rescaled(&self, lambda: &BigRational) -> Self {
        AdmissibleData {
            dn: self.dn,
            s_nn: &self.s_nn * lambda,
            r: self.r.clone(),
            m1: &self.m1 / lambda,
            m2: &self.m2 / lambda,
        }
    }
}

impl fmt::Display for AdmissibleData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "(dN={}, sNn={}, r={}, m1={}, m2={})",
            self.dn, self.s_nn, self.r, self.m1, self.m2
        )
    }
}

/// Admissible data of a ray. Quasi-regular rays in lowest terms get their
/// true orbifold data; any other ray uses the `s := 1` convention
/// `m_i = v_i l2`, `sNn = sigma / (l1 q)`.
pub fn admissible_data_for_ray(join: &JoinSpec, v: &RayVector) -> Result<AdmissibleData> {
    if v.integer_pair().is_some() {
        let fq = fiber_quotient(join, v)?;
        return AdmissibleData::new(
            join.base.dn,
            &join.base.sigma / int(fq.n),
            fq.r,
            int(fq.m1 as i64),
            int(fq.m2 as i64),
        );
    }
    admissible_data_unit_s(join, v)
}

/// Admissible data in the `s := 1` convention for any positive ray.
pub fn admissible_data_unit_s(join: &JoinSpec, v: &RayVector) -> Result<AdmissibleData> {
    let w1 = int(join.w.w1 as i64);
    let w2 = int(join.w.w2 as i64);
    let q = &w1 * &v.v2 - &w2 * &v.v1;
    if q.is_zero() {
        return Err(v.degenerate());
    }
    let l2 = int(join.l2 as i64);
    let r = &q / (&w1 * &v.v2 + &w2 * &v.v1);
    let s_nn = &join.base.sigma / (int(join.l1 as i64) * &q);
    AdmissibleData::new(join.base.dn, s_nn, r, &v.v1 * &l2, &v.v2 * &l2)
}

/// Relative Fano indices `(l1, l2)` for which the join can carry a
/// Sasaki-Einstein metric.
pub fn relative_fano_indices(fano_index: u64, w: &WeightVector) -> (u64, u64) {
    let g = gcd(w.norm(), fano_index);
    (fano_index / g, w.norm() / g)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContactInvariants {
    /// `c1(D) = c1_coefficient * gamma`.
    pub c1_coefficient: i64,
    /// Second Stiefel-Whitney class, `c1 mod 2`.
    pub w2_class: u8,
}

pub fn contact_invariants(join: &JoinSpec) -> Result<ContactInvariants> {
    let index = join
        .base
        .fano_index
        .ok_or_else(|| Error::NotQuasiMonotone(join.base.name.clone()))?;
    let c1 = join.l2 as i64 * index - join.chern_key() as i64;
    Ok(ContactInvariants {
        c1_coefficient: c1,
        w2_class: c1.rem_euclid(2) as u8,
    })
}

/// Convenience for tests and callers holding integers.
pub fn ray(v1: u64, v2: u64) -> RayVector {
    RayVector::quasi_regular(v1, v2).expect("coprime positive ray")
}
