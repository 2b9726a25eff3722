use std::fs;

use serde::Serialize;
use serde_json::{json, Value};

use sasaki_core::admissible::{csc_closed_form, extremal_exists, ke_residuals, solve_extremal};
use sasaki_core::arith::{format_rational, totient};
use sasaki_core::cone::{
    check_multiplicity_bound, exhaustion_scan, find_csc_rays, ke_ray_solve, nonexistence_search, ray_grid,
    DEFAULT_PRECISION_BITS,
};
use sasaki_core::join::{
    admissible_data_for_ray, classify_ray, contact_invariants, fiber_quotient, load_catalog, validate_join,
    AdmissibleData, BaseGeometry, JoinSpec, RayVector, WeightVector,
};
use sasaki_core::topology::{
    betti_vector, contactomorphism_test, enumerate_bouquet, gcd_invariant, graded_groups_from_presentation,
    homotopy_report, orb_cohomology_cp1w, render_bouquet_table, sphere_join_cohomology, ypq_inverse, ypq_map,
    ContactVerdict, MProfile,
};

use crate::args::*;
use crate::census::{load_config, run_census};
use crate::envelope::{anchors, InputEcho, ResultEnvelope};
use crate::error::{CliError, CliResult};
use crate::output::emit_csv;

pub const PRECISION_ENV: &str = "SASAKI_PRECISION_BITS";
const MAX_PRECISION_BITS: u32 = 4096;

/// Flag, then `$SASAKI_PRECISION_BITS`, then 64.
pub fn resolve_precision(flag: Option<u32>) -> CliResult<u32> {
    let bits = match flag {
        Some(b) => b,
        None => match std::env::var(PRECISION_ENV) {
            Ok(v) => v
                .trim()
                .parse()
                .map_err(|_| CliError::Usage(format!("{PRECISION_ENV}={v:?} is not a positive integer")))?,
            Err(_) => DEFAULT_PRECISION_BITS,
        },
    };
    if bits == 0 || bits > MAX_PRECISION_BITS {
        return Err(CliError::Usage(format!("precision must be in 1..={MAX_PRECISION_BITS} bits")));
    }
    Ok(bits)
}

fn resolve_base(args: &BaseArgs) -> CliResult<BaseGeometry> {
    let Some(path) = &args.catalog else {
        return Ok(BaseGeometry::by_name(&args.base)?);
    };
    let text = fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    load_catalog(&text)?
        .into_iter()
        .find(|b| b.name.eq_ignore_ascii_case(&args.base))
        .ok_or_else(|| sasaki_core::Error::InvalidBase(format!("{:?} not in {}", args.base, path.display())).into())
}

fn join_of(args: &JoinArgs) -> CliResult<JoinSpec> {
    Ok(validate_join(resolve_base(&args.base)?, args.l1, args.l2, args.w)?)
}

fn data_of(args: &DataArgs) -> CliResult<AdmissibleData> {
    let direct = [args.snn.is_some(), args.r.is_some(), args.m1.is_some(), args.m2.is_some()];
    let via_join = [args.l1.is_some(), args.l2.is_some(), args.w.is_some(), args.v.is_some()];
    match (direct.iter().any(|&b| b), via_join.iter().any(|&b| b)) {
        (true, false) if direct.iter().all(|&b| b) => Ok(AdmissibleData::new(
            args.dn.unwrap_or(1),
            args.snn.clone().unwrap_or_default(),
            args.r.clone().unwrap_or_default(),
            args.m1.clone().unwrap_or_default(),
            args.m2.clone().unwrap_or_default(),
        )?),
        (false, true) if via_join.iter().all(|&b| b) && args.dn.is_none() => {
            let (l1, l2, w, v) = (args.l1.unwrap(), args.l2.unwrap(), args.w.unwrap(), args.v.unwrap());
            let join = validate_join(resolve_base(&args.base)?, l1, l2, w)?;
            Ok(admissible_data_for_ray(&join, &RayVector::quasi_regular(v.0, v.1)?)?)
        }
        _ => Err(CliError::Usage(
            "give admissible data (--dn, --snn, --r, --m1, --m2) or a join and ray (--l1, --l2, --w, --v)".into(),
        )),
    }
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("payload serializes")
}

struct Outcome {
    payload: Value,
    provenance: &'static [&'static str],
    /// Resolved precision, appended to the echoed argv when not given.
    precision: Option<(Option<u32>, u32)>,
}

impl Outcome {
    fn new(payload: Value, provenance: &'static [&'static str]) -> Self {
        Self { payload, provenance, precision: None }
    }
}

fn join_cmd(cmd: &JoinCmd) -> CliResult<Outcome> {
    Ok(match cmd {
        JoinCmd::Validate(a) => {
            let j = join_of(a)?;
            Outcome::new(
                json!({
                    "join": j,
                    "chern_key": j.chern_key(),
                    "gcd_invariant": gcd_invariant(&j),
                    "excluded_t": format_rational(&j.excluded_t()),
                    "contact_invariants": contact_invariants(&j).ok(),
                }),
                &[anchors::JOIN_CONDITIONS, anchors::CONTACT],
            )
        }
        JoinCmd::Quotient(a) => {
            let j = join_of(&a.join)?;
            let v = RayVector::quasi_regular(a.v.0, a.v.1)?;
            let fq = fiber_quotient(&j, &v)?;
            let mut payload = to_value(&fq);
            payload["admissible_data"] = to_value(&admissible_data_for_ray(&j, &v)?);
            payload["class"] = to_value(&classify_ray(&j, &v)?);
            Outcome::new(payload, &[anchors::JOIN_CONDITIONS, anchors::QUOTIENT])
        }
        JoinCmd::Classify(a) => {
            let j = join_of(&a.join)?;
            let v = RayVector::quasi_regular(a.v.0, a.v.1)?;
            Outcome::new(
                json!({ "class": classify_ray(&j, &v)?, "quotient": fiber_quotient(&j, &v)? }),
                &[anchors::QUOTIENT],
            )
        }
    })
}

fn extremal_cmd(cmd: &ExtremalCmd) -> CliResult<Outcome> {
    Ok(match cmd {
        ExtremalCmd::Solve(a) => {
            let data = data_of(a)?;
            let sol = solve_extremal(&data)?;
            Outcome::new(
                json!({
                    "solution": sol.record(),
                    "F_display": sol.f.to_string(),
                    "existence": extremal_exists(&data)?,
                }),
                &[anchors::EXTREMAL_BVP, anchors::POSITIVITY],
            )
        }
        ExtremalCmd::Csc(a) => {
            let data = data_of(a)?;
            let sol = solve_extremal(&data)?;
            Outcome::new(
                json!({
                    "data": data,
                    "alpha": format_rational(&sol.alpha),
                    "beta": format_rational(&sol.beta),
                    "is_csc": num_traits::Zero::is_zero(&sol.alpha),
                    "degree": sol.f.degree(),
                    "closed_form": csc_closed_form(&data),
                }),
                &[anchors::EXTREMAL_BVP, anchors::CSC, anchors::CSC_CLOSED_FORM],
            )
        }
        ExtremalCmd::Einstein(a) => {
            if let (Some(w), None) = (a.data.w, a.data.v) {
                let bits = resolve_precision(a.precision.precision_bits)?;
                let base = resolve_base(&a.data.base)?;
                let ke = ke_ray_solve(&base, &WeightVector::new(w.0, w.1)?, bits)?;
                let mut out = Outcome::new(to_value(&ke), &[anchors::KE, anchors::RAY_SCAN]);
                out.precision = Some((a.precision.precision_bits, bits));
                out
            } else {
                let (Some(index), Some(n)) = (a.fano_index, a.n) else {
                    return Err(CliError::Usage("give --w for the Einstein ray, or data with --fano-index and --n".into()));
                };
                let data = data_of(&a.data)?;
                let res = ke_residuals(&data, index, n)?;
                Outcome::new(json!({ "data": data, "residuals": res, "vanish": res.vanish() }), &[anchors::KE])
            }
        }
    })
}

fn cone_cmd(cmd: &ConeCmd) -> CliResult<Outcome> {
    Ok(match cmd {
        ConeCmd::Scan(a) => {
            let bits = resolve_precision(a.precision.precision_bits)?;
            let j = join_of(&a.join)?;
            let scan = find_csc_rays(&j, bits)?;
            let mut payload = to_value(&scan);
            if let Some(path) = &a.csv {
                fs::write(path, emit_csv(&scan, a.samples)?)?;
                payload["csv"] = json!(path.display().to_string());
            }
            let mut out = Outcome::new(payload, &[anchors::RAY_SCAN, anchors::EXTREMAL_BVP, anchors::BOUND]);
            out.precision = Some((a.precision.precision_bits, bits));
            out
        }
        ConeCmd::Bound(a) => {
            let j = join_of(a)?;
            let (l1, w1, w2) = (j.l1 as i64, j.w.w1 as i64, j.w.w2 as i64);
            let rhs = if j.w.is_unit() { 11 * l1 } else { 16 * l1 * w1 - 5 * l1 * w2 };
            Outcome::new(
                json!({ "join": j, "bound": check_multiplicity_bound(&j), "lhs": 2 * j.l2 as i64, "rhs": rhs }),
                &[anchors::BOUND],
            )
        }
        ConeCmd::Exhaust(a) => {
            let j = join_of(&a.join)?;
            let rep = exhaustion_scan(&j, &ray_grid(&j.w, a.rays))?;
            let mut payload = to_value(&rep);
            payload["all_positive"] = json!(rep.all_positive());
            Outcome::new(payload, &[anchors::EXHAUSTION, anchors::POSITIVITY])
        }
        ConeCmd::Nonexist(a) => {
            let cells = nonexistence_search(a.genus_min..=a.genus_max, a.l1_max, a.w_max)?;
            Outcome::new(
                json!({ "count": cells.len(), "failing": cells }),
                &[anchors::NONEXISTENCE, anchors::POSITIVITY],
            )
        }
    })
}

fn m_profile(a: &HomotopyArgs) -> CliResult<MProfile> {
    let mut profile = match a.m.as_deref() {
        None => MProfile { simply_connected: true, pi2_rank: 0, pi3_rank: None },
        Some(text) => {
            let bad = || CliError::Usage(format!("--m expects sphere:<n> or s2s3:<k>, got {text:?}"));
            let (kind, k) = text.split_once(':').ok_or_else(bad)?;
            let k: u64 = k.parse().map_err(|_| bad())?;
            match kind {
                "sphere" => MProfile::sphere(k as u32),
                "s2s3" => MProfile::connected_sum_s2s3(k),
                _ => return Err(bad()),
            }
        }
    };
    if let Some(s) = a.simply_connected {
        profile.simply_connected = s;
    }
    if let Some(r) = a.pi2_rank {
        profile.pi2_rank = r;
    }
    if a.pi3_rank.is_some() {
        profile.pi3_rank = a.pi3_rank;
    }
    Ok(profile)
}

fn topology_cmd(cmd: &TopologyCmd) -> CliResult<Outcome> {
    Ok(match cmd {
        TopologyCmd::Ring(a) => {
            let j = join_of(&a.join)?;
            let pres = sphere_join_cohomology(a.p, &j)?;
            let groups = graded_groups_from_presentation(&pres);
            let display: Vec<String> = groups.iter().map(|g| format!("H^{} = {}", g.degree, g.group())).collect();
            Outcome::new(
                json!({
                    "presentation": pres,
                    "display": pres.to_string(),
                    "groups": groups,
                    "groups_display": display,
                    "betti": betti_vector(&groups),
                }),
                &[anchors::RING],
            )
        }
        TopologyCmd::Orb(a) => {
            let g = orb_cohomology_cp1w(&WeightVector::new(a.w.0, a.w.1)?, a.degree);
            Outcome::new(json!({ "group": g, "display": g.group().to_string() }), &[anchors::ORB])
        }
        TopologyCmd::Homotopy(a) => {
            let j = join_of(&a.join)?;
            let m = m_profile(a)?;
            let rep = homotopy_report(&j, &m);
            let show = |g: &Option<sasaki_core::topology::AbelianGroup>| g.as_ref().map(|g| g.to_string());
            Outcome::new(
                json!({
                    "profile": m,
                    "report": rep,
                    "pi1": show(&rep.pi1),
                    "pi2": show(&rep.pi2),
                    "pi3": show(&rep.pi3),
                }),
                &[anchors::HOMOTOPY],
            )
        }
        TopologyCmd::Contacto(a) => {
            let base = resolve_base(&a.base)?;
            let mk = |(l1, l2, w1, w2): (u64, u64, u64, u64)| validate_join(base.clone(), l1, l2, (w1, w2));
            let (ja, jb) = (mk(a.a)?, mk(a.b)?);
            Outcome::new(
                json!({ "a": ja, "b": jb, "comparison": contactomorphism_test(&ja, &jb)? }),
                &[anchors::CONTACT],
            )
        }
    })
}

fn bouquet_cmd(cmd: &BouquetCmd) -> CliResult<Outcome> {
    Ok(match cmd {
        BouquetCmd::Enumerate(a) => {
            let recs = enumerate_bouquet(a.chern_key, a.l2)?;
            let cp1 = BaseGeometry::cp1();
            let mut pairwise = Vec::with_capacity(recs.len());
            for r in &recs {
                let joins = r.joins(&cp1)?;
                let mut ok = true;
                for x in &joins {
                    for y in &joins {
                        ok &= contactomorphism_test(x, y)?.verdict == ContactVerdict::Contactomorphic;
                    }
                }
                pairwise.push(ok);
            }
            Outcome::new(
                json!({
                    "records": recs,
                    "member_count": recs.iter().map(|r| r.members.len()).sum::<usize>(),
                    "pairwise_contactomorphic": pairwise,
                    "table": render_bouquet_table(&recs),
                }),
                &[anchors::BOUQUET, anchors::CONTACT],
            )
        }
        BouquetCmd::Ypq(a) => match (a.p, a.q, a.from_join) {
            (None, None, Some((l1, l2, w1, w2))) => {
                let j = validate_join(BaseGeometry::cp1(), l1, l2, (w1, w2))?;
                let (p, q) = ypq_inverse(&j)?;
                Outcome::new(json!({ "join": j, "p": p, "q": q }), &[anchors::YPQ])
            }
            (Some(p), Some(q), None) => {
                let j = ypq_map(p, q)?;
                Outcome::new(
                    json!({ "p": p, "q": q, "join": j, "contact_invariants": contact_invariants(&j)? }),
                    &[anchors::YPQ, anchors::CONTACT],
                )
            }
            (Some(p), None, None) => {
                if p < 2 {
                    return Err(sasaki_core::Error::InvalidPQ { p, q: 0 }.into());
                }
                let joins: Vec<Value> = (1..p)
                    .filter(|&q| sasaki_core::arith::gcd(p as u64, q as u64) == 1)
                    .map(|q| ypq_map(p, q).map(|j| json!({ "q": q, "join": j })))
                    .collect::<Result<_, _>>()?;
                Outcome::new(
                    json!({ "p": p, "count": joins.len(), "totient": totient(p as u64), "members": joins }),
                    &[anchors::YPQ, anchors::BOUQUET],
                )
            }
            _ => return Err(CliError::Usage("give --p [--q] or --from-join l1,l2,w1,w2".into())),
        },
    })
}

fn census_cmd(cmd: &CensusCmd) -> CliResult<Outcome> {
    let CensusCmd::Run(a) = cmd;
    let (cfg, dir) = load_config(&a.config)?;
    let summary = run_census(&cfg, &dir, a.workers)?;
    Ok(Outcome::new(
        json!({ "config": cfg, "summary": summary }),
        &[anchors::RAY_SCAN, anchors::BOUND, anchors::POSITIVITY],
    ))
}

fn command_name(cmd: &Command) -> &'static str {
    match cmd {
        Command::Join(JoinCmd::Validate(_)) => "join validate",
        Command::Join(JoinCmd::Quotient(_)) => "join quotient",
        Command::Join(JoinCmd::Classify(_)) => "join classify",
        Command::Extremal(ExtremalCmd::Solve(_)) => "extremal solve",
        Command::Extremal(ExtremalCmd::Csc(_)) => "extremal csc",
        Command::Extremal(ExtremalCmd::Einstein(_)) => "extremal einstein",
        Command::Cone(ConeCmd::Scan(_)) => "cone scan",
        Command::Cone(ConeCmd::Bound(_)) => "cone bound",
        Command::Cone(ConeCmd::Exhaust(_)) => "cone exhaust",
        Command::Cone(ConeCmd::Nonexist(_)) => "cone nonexist",
        Command::Topology(TopologyCmd::Ring(_)) => "topology ring",
        Command::Topology(TopologyCmd::Orb(_)) => "topology orb",
        Command::Topology(TopologyCmd::Homotopy(_)) => "topology homotopy",
        Command::Topology(TopologyCmd::Contacto(_)) => "topology contacto",
        Command::Bouquet(BouquetCmd::Enumerate(_)) => "bouquet enumerate",
        Command::Bouquet(BouquetCmd::Ypq(_)) => "bouquet ypq",
        Command::Census(CensusCmd::Run(_)) => "census run",
    }
}

fn params(cmd: &Command) -> Value {
    match cmd {
        Command::Join(JoinCmd::Validate(a)) => to_value(a),
        Command::Join(JoinCmd::Quotient(a) | JoinCmd::Classify(a)) => to_value(a),
        Command::Extremal(ExtremalCmd::Solve(a) | ExtremalCmd::Csc(a)) => to_value(a),
        Command::Extremal(ExtremalCmd::Einstein(a)) => to_value(a),
        Command::Cone(ConeCmd::Scan(a)) => to_value(a),
        Command::Cone(ConeCmd::Bound(a)) => to_value(a),
        Command::Cone(ConeCmd::Exhaust(a)) => to_value(a),
        Command::Cone(ConeCmd::Nonexist(a)) => to_value(a),
        Command::Topology(TopologyCmd::Ring(a)) => to_value(a),
        Command::Topology(TopologyCmd::Orb(a)) => to_value(a),
        Command::Topology(TopologyCmd::Homotopy(a)) => to_value(a),
        Command::Topology(TopologyCmd::Contacto(a)) => to_value(a),
        Command::Bouquet(BouquetCmd::Enumerate(a)) => to_value(a),
        Command::Bouquet(BouquetCmd::Ypq(a)) => to_value(a),
        Command::Census(CensusCmd::Run(a)) => to_value(a),
    }
}

/// Runs a parsed command. `argv` excludes the program name.
pub fn execute(cmd: &Command, argv: &[String]) -> CliResult<ResultEnvelope> {
    let outcome = match cmd {
        Command::Join(c) => join_cmd(c),
        Command::Extremal(c) => extremal_cmd(c),
        Command::Cone(c) => cone_cmd(c),
        Command::Topology(c) => topology_cmd(c),
        Command::Bouquet(c) => bouquet_cmd(c),
        Command::Census(c) => census_cmd(c),
    }?;
    let mut argv = argv.to_vec();
    let mut params = params(cmd);
    if let Some((None, bits)) = outcome.precision {
        argv.push("--precision-bits".into());
        argv.push(bits.to_string());
        params["precision_bits"] = json!(bits);
    }
    let echo = InputEcho { command: command_name(cmd).to_string(), argv, params };
    Ok(ResultEnvelope::new(echo, outcome.payload, outcome.provenance))
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::Parser;

    fn data(args: &[&str]) -> CliResult<AdmissibleData> {
        let cli = Cli::try_parse_from(["sasaki", "extremal", "solve"].iter().chain(args)).unwrap();
        match cli.command {
            Command::Extremal(ExtremalCmd::Solve(a)) => data_of(&a),
            _ => unreachable!(),
        }
    }

    #[test]
    fn explicit_precision_is_bounded() {
        assert_eq!(resolve_precision(Some(100)).unwrap(), 100);
        assert!(matches!(resolve_precision(Some(0)), Err(CliError::Usage(_))));
        assert!(matches!(resolve_precision(Some(MAX_PRECISION_BITS + 1)), Err(CliError::Usage(_))));
    }

    #[test]
    fn data_sources_are_exclusive() {
        let direct = data(&["--snn", "4", "--r", "1/2", "--m1", "1", "--m2", "1"]).unwrap();
        let via_ray = data(&["--l1", "1", "--l2", "2", "--w", "3,1", "--v", "1,1"]).unwrap();
        assert_eq!(direct.r, via_ray.r);
        assert!(matches!(data(&["--snn", "4", "--r", "1/2"]), Err(CliError::Usage(_))));
        assert!(matches!(
            data(&["--snn", "4", "--r", "1/2", "--m1", "1", "--m2", "1", "--l1", "1"]),
            Err(CliError::Usage(_))
        ));
        assert!(matches!(data(&["--snn", "4", "--r", "3/2", "--m1", "1", "--m2", "1"]), Err(CliError::Core(_))));
    }

    #[test]
    fn homotopy_profile_syntax() {
        let cli = Cli::try_parse_from([
            "sasaki", "topology", "homotopy", "--l1", "1", "--l2", "2", "--w", "3,1", "--m", "s2s3:2",
        ])
        .unwrap();
        let Command::Topology(TopologyCmd::Homotopy(a)) = cli.command else { unreachable!() };
        let m = m_profile(&a).unwrap();
        assert_eq!(m, MProfile::connected_sum_s2s3(2));
        let mut bad = a.clone();
        bad.m = Some("torus:2".into());
        assert!(matches!(m_profile(&bad), Err(CliError::Usage(_))));
    }
}
