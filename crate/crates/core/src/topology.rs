//! Topological and contact invariants of joins.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::BigRational;
use serde::Serialize;

use crate::arith::{gcd, rat, serde_rational};
use crate::error::{Error, Result};
use crate::join::{contact_invariants, validate_join, BaseGeometry, JoinSpec, WeightVector};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Generator {
    pub name: String,
    pub degree: u32,
}

/// The relation `coefficient * x^x_exp * y^y_exp = 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Relation {
    pub coefficient: u64,
    pub x_exp: u32,
    pub y_exp: u32,
}

impl Relation {
    fn divides(&self, a: u32, b: u32) -> bool {
        self.x_exp <= a && self.y_exp <= b
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if self.coefficient != 1 {
            parts.push(self.coefficient.to_string());
        }
        for (v, e) in [("x", self.x_exp), ("y", self.y_exp)] {
            match e {
                0 => {}
                1 => parts.push(v.to_string()),
                _ => parts.push(format!("{v}^{e}")),
            }
        }
        f.write_str(&parts.join(""))
    }
}

/// A graded ring `Z[x, y] / (monomial relations)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RingPresentation {
    pub generators: Vec<Generator>,
    pub relations: Vec<Relation>,
    pub ambient_dimension: u32,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl RingPresentation {
    /// The torsion coefficient of the `x^2` relation, if present.
    pub fn torsion_order(&self) -> Option<u64> {
        self.relations
            .iter()
            .find(|r| r.x_exp == 2 && r.y_exp == 0)
            .map(|r| r.coefficient)
    }
}

impl fmt::Display for RingPresentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let gens: Vec<&str> = self.generators.iter().map(|g| g.name.as_str()).collect();
        let rels: Vec<String> = self.relations.iter().map(|r| r.to_string()).collect();
        write!(f, "Z[{}]/({})", gens.join(","), rels.join(", "))
    }
}

/// Finitely generated abelian group `Z^free_rank ⊕ Z_t1 ⊕ ...`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct AbelianGroup {
    pub free_rank: u64,
    pub torsion: Vec<u64>,
}

impl AbelianGroup {
    pub fn free(rank: u64) -> Self {
        Self { free_rank: rank, torsion: Vec::new() }
    }

    pub fn is_trivial(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }

    pub fn direct_sum(&self, other: &Self) -> Self {
        let mut torsion = [self.torsion.clone(), other.torsion.clone()].concat();
        torsion.sort_unstable();
        Self { free_rank: self.free_rank + other.free_rank, torsion }
    }
}

impl fmt::Display for AbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            k => parts.push(format!("Z^{k}")),
        }
        parts.extend(self.torsion.iter().map(|t| format!("Z_{t}")));
        if parts.is_empty() {
            f.write_str("0")
        } else {
            f.write_str(&parts.join(" + "))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GradedGroup {
    pub degree: u32,
    pub free_rank: u64,
    pub torsion: Vec<u64>,
}

impl GradedGroup {
    pub fn group(&self) -> AbelianGroup {
        AbelianGroup { free_rank: self.free_rank, torsion: self.torsion.clone() }
    }
}

/// Cohomology ring of the join `S^{2p+1} * S^3_w`, of dimension `2p + 3`.
///
/// Only `l1` and `w` enter; the base is echoed in a note.
pub fn sphere_join_cohomology(p: i64, join: &JoinSpec) -> Result<RingPresentation> {
    if p <= 1 {
        return Err(Error::UnsupportedDimension(p));
    }
    let p = p as u32;
    let torsion = join.w.w1 * join.w.w2 * join.l1 * join.l1;
    Ok(RingPresentation {
        generators: vec![
            Generator { name: "x".into(), degree: 2 },
            Generator { name: "y".into(), degree: 2 * p + 1 },
        ],
        relations: vec![
            Relation { coefficient: torsion, x_exp: 2, y_exp: 0 },
            Relation { coefficient: 1, x_exp: p + 1, y_exp: 0 },
            Relation { coefficient: 1, x_exp: 2, y_exp: 1 },
            Relation { coefficient: 1, x_exp: 0, y_exp: 2 },
        ],
        ambient_dimension: 2 * p + 3,
        notes: vec![format!(
            "first factor taken as S^{}; the base {} does not enter",
            2 * p + 1,
            join.base.name
        )],
    })
}

/// Additive groups of a two-generator monomial presentation, one per degree
/// `0..=ambient_dimension`.
///
/// Each monomial spans a summand `Z / g` where `g` is the gcd of the
/// coefficients of the relations dividing it (`Z` when none does).
pub fn graded_groups_from_presentation(pres: &RingPresentation) -> Vec<GradedGroup> {
    let dx = pres.generators[0].degree;
    let dy = pres.generators[1].degree;
    let top = pres.ambient_dimension;
    let mut groups: Vec<GradedGroup> = (0..=top)
        .map(|degree| GradedGroup { degree, free_rank: 0, torsion: Vec::new() })
        .collect();
    for b in 0..=top / dy {
        for a in 0..=(top - b * dy) / dx {
            let order = pres
                .relations
                .iter()
                .filter(|r| r.divides(a, b))
                .fold(0u64, |g, r| gcd(g, r.coefficient));
            let deg = (a * dx + b * dy) as usize;
            match order {
                0 => groups[deg].free_rank += 1,
                1 => {}
                n => groups[deg].torsion.push(n),
            }
        }
    }
    for g in &mut groups {
        g.torsion.sort_unstable();
    }
    groups
}

/// Betti numbers of a graded group list.
pub fn betti_vector(groups: &[GradedGroup]) -> Vec<u64> {
    groups.iter().map(|g| g.free_rank).collect()
}

/// Orbifold cohomology of the weighted projective line `CP^1[w]`.
pub fn orb_cohomology_cp1w(w: &WeightVector, degree: u32) -> GradedGroup {
    let (free_rank, torsion) = match degree {
        0 | 2 => (1, Vec::new()),
        d if d % 2 == 1 => (0, Vec::new()),
        _ => {
            let order = w.w1 * w.w2;
            (0, if order > 1 { vec![order] } else { Vec::new() })
        }
    };
    GradedGroup { degree, free_rank, torsion }
}

/// What is known about the first factor `M` of the join.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, serde::Deserialize)]
pub struct MProfile {
    pub simply_connected: bool,
    pub pi2_rank: u64,
    /// Free rank of `pi_3(M)` when known (torsion-free case).
    #[serde(default)]
    pub pi3_rank: Option<u64>,
}

impl MProfile {
    pub fn sphere(dim: u32) -> Self {
        Self {
            simply_connected: dim >= 2,
            pi2_rank: u64::from(dim == 2),
            pi3_rank: Some(u64::from(dim == 3 || dim == 2)),
        }
    }

    /// `k # (S^2 x S^3)`.
    pub fn connected_sum_s2s3(k: u64) -> Self {
        Self { simply_connected: true, pi2_rank: k, pi3_rank: None }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HomotopyReport {
    pub join: JoinSpec,
    pub pi1_statement: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pi1: Option<AbelianGroup>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pi2: Option<AbelianGroup>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pi3: Option<AbelianGroup>,
}

pub fn homotopy_report(join: &JoinSpec, m: &MProfile) -> HomotopyReport {
    let pi1_statement = "pi_1(M) -> pi_1(M * S^3_w) is surjective".to_string();
    if !m.simply_connected {
        return HomotopyReport { join: join.clone(), pi1_statement, pi1: None, pi2: None, pi3: None };
    }
    HomotopyReport {
        join: join.clone(),
        pi1_statement,
        pi1: Some(AbelianGroup::default()),
        pi2: Some(AbelianGroup::free(m.pi2_rank + 1)),
        pi3: m.pi3_rank.map(|k| AbelianGroup::free(k + 1)),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ContactVerdict {
    Contactomorphic,
    DistinctChern,
    Undetermined,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ContactComparison {
    pub verdict: ContactVerdict,
    pub chern_keys: (u64, u64),
    pub gcd_invariants: (u64, u64),
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c1_coefficients: Option<(i64, i64)>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

/// `gcd(l2, l1 (w1 - w2))`.
pub fn gcd_invariant(join: &JoinSpec) -> u64 {
    gcd(join.l2, join.l1 * (join.w.w1 - join.w.w2))
}

/// Sufficient test for the joins to share a contact structure.
pub fn contactomorphism_test(a: &JoinSpec, b: &JoinSpec) -> Result<ContactComparison> {
    if a.base.name != b.base.name || a.base.dn != b.base.dn {
        return Err(Error::BaseMismatch(a.base.name.clone(), b.base.name.clone()));
    }
    let chern_keys = (a.chern_key(), b.chern_key());
    let gcd_invariants = (gcd_invariant(a), gcd_invariant(b));
    let c1 = match (contact_invariants(a), contact_invariants(b)) {
        (Ok(x), Ok(y)) => Some((x.c1_coefficient, y.c1_coefficient)),
        _ => None,
    };
    let mut notes = Vec::new();
    let verdict = if a.l2 == b.l2 && chern_keys.0 == chern_keys.1 && gcd_invariants.0 == gcd_invariants.1 {
        ContactVerdict::Contactomorphic
    } else if c1.is_some_and(|(x, y)| x != y) {
        ContactVerdict::DistinctChern
    } else {
        if a.l2 == b.l2 && chern_keys.0 == chern_keys.1 {
            notes.push("gcd invariants differ; asserted distinct in the literature, not proven by this test".into());
        }
        ContactVerdict::Undetermined
    };
    Ok(ContactComparison { verdict, chern_keys, gcd_invariants, c1_coefficients: c1, notes })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BouquetMember {
    pub l1: u64,
    pub w: WeightVector,
    /// `l1 (w1 - w2) / 2`.
    #[serde(with = "serde_rational")]
    pub m: BigRational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BouquetRecord {
    pub l2: u64,
    pub chern_key: u64,
    pub gcd_invariant: u64,
    /// Every member has a regular ray: `l2 | l1 (w1 - w2)`.
    pub regular: bool,
    /// Sorted by `m`.
    pub members: Vec<BouquetMember>,
    pub cone_dimensions: Vec<u32>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl BouquetRecord {
    /// The member joins over `base`.
    pub fn joins(&self, base: &BaseGeometry) -> Result<Vec<JoinSpec>> {
        self.members
            .iter()
            .map(|m| validate_join(base.clone(), m.l1, self.l2, (m.w.w1, m.w.w2)))
            .collect()
    }
}

/// All `(l1, w)` with `l1 (w1 + w2) = chern_key` admissible for `l2`,
/// grouped by the gcd invariant (ascending).
pub fn enumerate_bouquet(chern_key: u64, l2: u64) -> Result<Vec<BouquetRecord>> {
    if chern_key < 2 {
        return Err(Error::Precondition("chern_key must be at least 2".into()));
    }
    if l2 == 0 {
        return Err(Error::NonPositive { name: "l2" });
    }
    let mut groups: BTreeMap<u64, Vec<BouquetMember>> = BTreeMap::new();
    for l1 in (1..=chern_key / 2).filter(|l1| chern_key.is_multiple_of(*l1)) {
        let norm = chern_key / l1;
        for w2 in 1..=norm / 2 {
            let w1 = norm - w2;
            if gcd(w1, w2) != 1 || gcd(l2, l1 * w1 * w2) != 1 {
                continue;
            }
            let diff = l1 * (w1 - w2);
            groups.entry(gcd(l2, diff)).or_default().push(BouquetMember {
                l1,
                w: WeightVector { w1, w2 },
                m: rat(diff as i64, 2),
            });
        }
    }
    Ok(groups
        .into_iter()
        .map(|(g, mut members)| {
            members.sort_by(|a, b| a.m.cmp(&b.m));
            let mut notes = Vec::new();
            if members.iter().any(|m| m.w.is_unit()) {
                notes.push(
                    "w = (1,1) member: over Sigma_g with g > 0 its cone may be 1-dimensional; not resolved here".into(),
                );
            }
            BouquetRecord {
                l2,
                chern_key,
                gcd_invariant: g,
                regular: g == l2,
                cone_dimensions: vec![2; members.len()],
                members,
                notes,
            }
        })
        .collect())
}

/// Fixed-width table with one row per member, ordered by `m` within groups.
pub fn render_bouquet_table(records: &[BouquetRecord]) -> String {
    let mut out = format!("{:>6} {:>4} {:>10} {:>4} {:>5}\n", "m", "l1", "w", "l2", "gcd");
    for rec in records {
        for m in &rec.members {
            out.push_str(&format!(
                "{:>6} {:>4} {:>10} {:>4} {:>5}\n",
                m.m.to_string(),
                m.l1,
                m.w.to_string(),
                rec.l2,
                rec.gcd_invariant
            ));
        }
    }
    out
}

/// The join over `CP^1` carrying the Sasaki-Einstein structure `Y^{p,q}`.
pub fn ypq_map(p: i64, q: i64) -> Result<JoinSpec> {
    if !(1 <= q && q < p) || gcd(p as u64, q as u64) != 1 {
        return Err(Error::InvalidPQ { p, q });
    }
    let (a, b) = ((p + q) as u64, (p - q) as u64);
    let l1 = gcd(a, b);
    validate_join(BaseGeometry::cp1(), l1, p as u64, (a / l1, b / l1))
}

/// Recovers `(p, q)` from a join in the image of [`ypq_map`].
pub fn ypq_inverse(join: &JoinSpec) -> Result<(i64, i64)> {
    let p = join.l2 as i64;
    let q = (join.l1 * join.w.w1) as i64 - p;
    if (join.l1 * join.w.w2) as i64 != p - q {
        return Err(Error::Precondition(format!("{join} is not a Y^(p,q) join")));
    }
    match ypq_map(p, q) {
        Ok(j) if j.key() == join.key() => Ok((p, q)),
        _ => Err(Error::InvalidPQ { p, q }),
    }
}
