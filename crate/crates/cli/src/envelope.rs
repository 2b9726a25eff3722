use serde::Serialize;
use serde_json::Value;

pub const TOOL_VERSION: &str = concat!("sasaki ", env!("CARGO_PKG_VERSION"));

/// Every successful command prints one of these.
///
/// `input_echo.argv` is the canonical argument list, with defaults taken
/// from the environment made explicit, so the output can be regenerated
/// from the echo alone.
#[derive(Debug, Clone, Serialize)]
pub struct ResultEnvelope {
    pub tool_version: String,
    pub input_echo: InputEcho,
    pub payload: Value,
    pub provenance: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct InputEcho {
    pub command: String,
    pub argv: Vec<String>,
    pub params: Value,
}

impl ResultEnvelope {
    pub fn new(input_echo: InputEcho, payload: Value, provenance: &[&str]) -> Self {
        Self {
            tool_version: TOOL_VERSION.to_string(),
            input_echo,
            payload,
            provenance: provenance.iter().map(|s| s.to_string()).collect(),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("envelope serializes");
        s.push('\n');
        s
    }
}

/// Criteria cited in `provenance`.
pub mod anchors {
    pub const JOIN_CONDITIONS: &str = "join admissibility: gcd(w1,w2) = 1, w1 >= w2, gcd(l2, l1 w1 w2) = 1";
    pub const QUOTIENT: &str = "quasi-regular quotient: s = gcd(|q|, l2), m_i = v_i l2 / s, n = l1 q / s, r = q / (w1 v2 + w2 v1)";
    pub const EXTREMAL_BVP: &str = "extremal polynomial: F'' = (1+rz)^(d-1)(2dsr + (az+b)(1+rz)) with endpoint conditions";
    pub const POSITIVITY: &str = "existence iff F > 0 on (-1,1), decided by Sturm root counting";
    pub const CSC: &str = "constant scalar curvature iff alpha = 0";
    pub const CSC_CLOSED_FORM: &str = "closed-form CSC condition, sNn term of c taken with factor r";
    pub const KE: &str = "Einstein condition: Fano-class identity and the vanishing integral of (1+rz)^d((1-z)/m2 - (1+z)/m1)";
    pub const RAY_SCAN: &str = "CSC rays as positive roots of alpha(1,t), t = v2/v1, excluding t = w2/w1";
    pub const BOUND: &str = "three CSC rays when 2 l2 > 16 l1 w1 - 5 l1 w2 (2 l2 > 11 l1 for w = (1,1))";
    pub const EXHAUSTION: &str = "non-negative base scalar curvature: the w-cone is exhausted by extremal rays";
    pub const NONEXISTENCE: &str = "regular-ray datum (dN=1, m1=m2=1) with F not positive admits no extremal metric";
    pub const RING: &str = "cohomology ring Z[x,y]/(w1 w2 l1^2 x^2, x^(p+1), x^2 y, y^2)";
    pub const ORB: &str = "orbifold cohomology of CP^1[w]: Z, 0, Z, then Z_(w1 w2) in even degrees";
    pub const HOMOTOPY: &str = "homotopy of joins: pi_1 surjection, pi_2 = pi_2(M) + Z, pi_3 = pi_3(M) + pi_3(S^3)";
    pub const CONTACT: &str = "same contact structure when l2, l1|w| and gcd(l2, l1(w1-w2)) agree; c1 = l2 I - l1|w|";
    pub const BOUQUET: &str = "bouquet: joins sharing l2 and l1|w|, grouped by gcd(l2, l1(w1-w2))";
    pub const YPQ: &str = "Y^(p,q): l2 = p, l1 w = (p+q, p-q)";
}
