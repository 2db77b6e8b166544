//! One function per subcommand. Each returns a [`CommandOutput`] whose
//! `pass` flag drives the exit code; anything that prevents the command from
//! producing an answer at all is a [`CliError`] instead (exit code 2).

use std::fmt::Write as _;
use std::path::Path;

use serde_json::json;

use strata_core::accept;
use strata_core::exact::GaussianRational;
use strata_core::exquo::{
    discrete_oracle, extended_quotient, twisted_extended_quotient, ExtendedQuotient,
};
use strata_core::findim::certify::{verify_certificate, EquivalenceCertificate};
use strata_core::findim::descriptor::{build_fiber, FiberDescriptor};
use strata_core::glue::{
    build_model, distinguishing_invariants, GluedPoint, GluedSpace, ModelInvariants, ModelJson,
    ComparisonVerdict,
};
use strata_core::groups::Cocycle2;
use strata_core::hecke::{associativity_sample, specialization_sample, verify_quadratic};
use strata_core::lattice::{ActionJson, LatticeAction};
use strata_core::weyl::RootSystemSpec;

use crate::input::{
    copy_index, input, load, parse_scalars, point_literals, set_descriptor, split_copy, CliError,
    HeckeCheckRequest,
};
use crate::report::{verdict, CommandOutput};

type Gq = GaussianRational;

fn fmt_point(coords: &[Gq]) -> String {
    let parts: Vec<String> = coords.iter().map(|c| c.to_string()).collect();
    format!("({})", parts.join(","))
}

/// `strata hecke check`: quadratic relation for every affine generator,
/// then seeded associativity and q = 1 specialization samples.
pub fn hecke_check(req: &HeckeCheckRequest) -> Result<CommandOutput, CliError> {
    let spec = RootSystemSpec::parse(&req.spec).map_err(input)?;
    if req.radius < 1 {
        return Err(CliError("radius must be at least 1".into()));
    }
    let quad = verify_quadratic(spec, req.radius).map_err(input)?;
    let assoc = associativity_sample(spec, req.radius, req.triples, req.seed).map_err(input)?;
    let special =
        specialization_sample(spec, req.radius, req.products, req.seed.wrapping_add(1))
            .map_err(input)?;
    let pass = quad.all_pass() && assoc.pass() && special.pass();

    let mut text = String::new();
    let _ = writeln!(text, "hecke check {spec}: radius {}", req.radius);
    let _ = writeln!(
        text,
        "  quadratic relation ({} generators): {}",
        quad.checks.len(),
        verdict(quad.all_pass())
    );
    let _ = writeln!(
        text,
        "  associativity ({} triples, {} failures): {}",
        assoc.trials,
        assoc.failures,
        verdict(assoc.pass())
    );
    let _ = writeln!(
        text,
        "  q = 1 specialization ({} products, {} failures): {}",
        special.trials,
        special.failures,
        verdict(special.pass())
    );
    let _ = write!(text, "result: {}", verdict(pass));

    let json = json!({
        "command": "hecke check",
        "spec": spec.to_string(),
        "radius": req.radius,
        "seed": req.seed,
        "quadratic": { "generators": quad.checks.len(), "pass": quad.all_pass() },
        "associativity": { "trials": assoc.trials, "failures": assoc.failures, "pass": assoc.pass() },
        "specialization": { "trials": special.trials, "failures": special.failures, "pass": special.pass() },
        "pass": pass,
    });
    Ok(CommandOutput { text, json, pass })
}

fn load_quotient(
    action_path: &Path,
    cocycle_path: Option<&Path>,
) -> Result<(LatticeAction, ExtendedQuotient), CliError> {
    let action_json: ActionJson = load(action_path)?;
    let action = LatticeAction::from_json(&action_json).map_err(input)?;
    let eq = match cocycle_path {
        None => extended_quotient(&action).map_err(input)?,
        Some(path) => {
            let cocycle_json = load(path)?;
            let (group, cocycle) = Cocycle2::from_json(&cocycle_json).map_err(input)?;
            if group.to_json() != action.group().to_json() {
                return Err(CliError(format!(
                    "cocycle group in {} differs from the action's group",
                    path.display()
                )));
            }
            twisted_extended_quotient(&action, &cocycle).map_err(input)?
        }
    };
    Ok((action, eq))
}

/// `strata exquo`: stratum table and component census of the (twisted)
/// extended quotient, with an optional torsion-point cross-check.
pub fn exquo(
    action_path: &Path,
    cocycle_path: Option<&Path>,
    m: Option<i64>,
) -> Result<CommandOutput, CliError> {
    let (action, eq) = load_quotient(action_path, cocycle_path)?;
    let rows = eq.report_rows();
    let census = eq.component_census().map_err(input)?;
    let oracle = match m {
        None => None,
        Some(m) => Some(discrete_oracle(&action, eq.twisted_by(), m).map_err(input)?),
    };
    let oracle_ok =
        oracle.as_ref().map_or(true, |c| c.matches && c.unmatched_points == 0);

    let kind = if eq.twisted_by().is_some() { "twisted" } else { "plain" };
    let mut text = String::new();
    let _ = writeln!(text, "{kind} extended quotient: {} strata", rows.len());
    let _ = writeln!(text, "  stratum  stab  conj  rank  torsion      comps  mult");
    for r in &rows {
        let _ = writeln!(
            text,
            "  {:>7}  {:>4}  {:>4}  {:>4}  {:<11}  {:>5}  {:>4}",
            r.stratum,
            r.stabilizer_order,
            r.num_conjugates,
            r.carrier_rank,
            format!("{:?}", r.carrier_torsion),
            r.carrier_components,
            r.multiplicity
        );
    }
    let _ = writeln!(text, "components: {}", census.total);
    if let Some(c) = &oracle {
        let _ = writeln!(
            text,
            "oracle m = {}: {} torsion points, {} unmatched, fiber sizes {}",
            c.m,
            c.total_points,
            c.unmatched_points,
            if oracle_ok { "match" } else { "MISMATCH" }
        );
    }
    let _ = write!(text, "result: {}", verdict(oracle_ok));

    let json = json!({
        "command": "exquo",
        "kind": kind,
        "strata": serde_json::to_value(&rows).map_err(input)?,
        "census": serde_json::to_value(&census).map_err(input)?,
        "oracle": oracle.as_ref().map(serde_json::to_value).transpose().map_err(input)?,
        "pass": oracle_ok,
    });
    Ok(CommandOutput { text, json, pass: oracle_ok })
}

/// `strata fiber`: dimension, radical, block census, and central characters
/// of one fiber of an algebra family.
pub fn fiber(algebra_path: &Path, point_arg: &str) -> Result<CommandOutput, CliError> {
    let desc: FiberDescriptor = load(algebra_path)?;
    desc.validate().map_err(input)?;
    let literals = if point_arg.trim().starts_with('[') {
        serde_json::from_str(point_arg.trim())
            .map_err(|e| CliError(format!("bad inline point {point_arg:?}: {e}")))?
    } else {
        load::<Vec<String>>(Path::new(point_arg))?
    };
    let coords = parse_scalars(&literals)?;
    let alg = build_fiber(&desc, &coords).map_err(input)?;
    let analysis = alg.analyze().map_err(input)?;
    let blocks = analysis.block_dims();

    let mut characters: Vec<(usize, Vec<(String, String)>)> = Vec::new();
    if !alg.marked().is_empty() {
        for b in 0..analysis.block_count() {
            let chars = alg
                .central_character(b)
                .map_err(input)?
                .into_iter()
                .map(|(name, value)| (name, value.to_string()))
                .collect();
            characters.push((b, chars));
        }
    }

    let mut text = String::new();
    let _ = writeln!(text, "fiber at {}: dimension {}", fmt_point(&coords), alg.dim());
    let _ = writeln!(text, "  radical dimension: {}", analysis.radical_dim);
    let _ = writeln!(text, "  blocks: {blocks:?}");
    for (b, chars) in &characters {
        let parts: Vec<String> =
            chars.iter().map(|(name, value)| format!("{name} = {value}")).collect();
        let _ = writeln!(text, "  block {b} central characters: {}", parts.join(", "));
    }
    let _ = write!(text, "result: pass");

    let json = json!({
        "command": "fiber",
        "point": literals,
        "dimension": alg.dim(),
        "radical_dimension": analysis.radical_dim,
        "blocks": blocks,
        "central_characters": characters
            .iter()
            .map(|(b, chars)| json!({ "block": b, "characters": chars }))
            .collect::<Vec<_>>(),
        "pass": true,
    });
    Ok(CommandOutput { text, json, pass: true })
}

/// `strata certify`: verify a stratified-equivalence certificate at the
/// sample points in the samples file.
pub fn certify(certificate_path: &Path, samples_path: &Path) -> Result<CommandOutput, CliError> {
    let cert: EquivalenceCertificate = load(certificate_path)?;
    let raw: Vec<Vec<String>> = load(samples_path)?;
    let samples: Vec<Vec<Gq>> =
        raw.iter().map(|p| parse_scalars(p)).collect::<Result<_, _>>()?;
    let report = verify_certificate(&cert, &samples).map_err(input)?;

    let mut text = String::new();
    let _ = writeln!(
        text,
        "certificate: {} algebras, {} steps; {} samples",
        cert.algebras.len(),
        report.steps.len(),
        samples.len()
    );
    for step in &report.steps {
        let passed = step.verdicts.iter().filter(|v| v.pass).count();
        let _ = writeln!(
            text,
            "  step {} {}: {} ({passed}/{} samples)",
            step.index,
            step.kind,
            verdict(step.pass),
            step.verdicts.len()
        );
        for v in step.verdicts.iter().filter(|v| !v.pass) {
            let _ = writeln!(text, "    {}: {}", v.point, v.witness);
        }
    }
    let _ = write!(text, "result: {}", verdict(report.all_pass));

    let pass = report.all_pass;
    let json = json!({
        "command": "certify",
        "samples": raw,
        "report": serde_json::to_value(&report).map_err(input)?,
        "pass": pass,
    });
    Ok(CommandOutput { text, json, pass })
}

fn load_model(path: &Path) -> Result<(ModelJson, GluedSpace), CliError> {
    let model_json: ModelJson = load(path)?;
    let model = build_model(&model_json).map_err(input)?;
    Ok((model_json, model))
}

/// `strata glue --query multiplicity`: δ at one exact base point.
pub fn glue_multiplicity(
    model_path: &Path,
    piece: usize,
    point_arg: &str,
) -> Result<CommandOutput, CliError> {
    let (_, model) = load_model(model_path)?;
    let base = model.base(piece).map_err(input)?;
    let (body, selector) = split_copy(point_arg);
    if selector.is_some() {
        return Err(CliError("multiplicity queries take a bare point, no copy".into()));
    }
    let literals = point_literals(body, base)?;
    let coords = parse_scalars(&literals)?;
    let delta = model.multiplicity_at(piece, &coords).map_err(input)?;

    let text = format!("multiplicity at {}: {delta}\nresult: pass", fmt_point(&coords));
    let json = json!({
        "command": "glue",
        "query": "multiplicity",
        "piece": piece,
        "point": literals,
        "multiplicity": delta,
        "pass": true,
    });
    Ok(CommandOutput { text, json, pass: true })
}

/// `strata glue --query closure`: is the candidate point in the closure of
/// the set? The answer is the report; a `false` is not a check failure.
pub fn glue_closure(
    model_path: &Path,
    piece: usize,
    set_arg: &str,
    point_arg: &str,
) -> Result<CommandOutput, CliError> {
    let (_, model) = load_model(model_path)?;
    let base = model.base(piece).map_err(input)?;
    let set = set_descriptor(set_arg, base)?;
    let (body, selector) = split_copy(point_arg);
    let copy = copy_index(selector)?;
    let literals = point_literals(body, base)?;
    let coords = parse_scalars(&literals)?;
    let candidate = GluedPoint::new(piece, copy, coords.clone());
    let contains = model.closure_contains(&set, &candidate).map_err(input)?;

    let text = format!(
        "closure of {set_arg} contains {} copy {}: {contains}\nresult: pass",
        fmt_point(&coords),
        copy + 1
    );
    let json = json!({
        "command": "glue",
        "query": "closure",
        "piece": piece,
        "set": serde_json::to_value(&set).map_err(input)?,
        "point": literals,
        "copy": copy + 1,
        "contains": contains,
        "pass": true,
    });
    Ok(CommandOutput { text, json, pass: true })
}

fn fmt_invariants(label: &str, inv: &ModelInvariants) -> String {
    let profile: Vec<String> = inv
        .multiplicity_profile
        .iter()
        .map(|p| format!("(mult {}, dim {})", p.multiplicity, p.dim))
        .collect();
    format!(
        "{label}: components {}, non-separated pair {}, profile [{}]",
        inv.components,
        if inv.has_nonseparated_pair { "yes" } else { "no" },
        profile.join(", ")
    )
}

/// `strata glue --query compare`: counting invariants of two models and the
/// verdict they support.
pub fn glue_compare(model_path: &Path, with_path: &Path) -> Result<CommandOutput, CliError> {
    let (_, left) = load_model(model_path)?;
    let (_, right) = load_model(with_path)?;
    let report = distinguishing_invariants(&left, &right);

    let verdict_line = match &report.verdict {
        ComparisonVerdict::NotHomeomorphic { differing } => {
            format!("not homeomorphic ({})", differing.join(", "))
        }
        ComparisonVerdict::IndistinguishableAtThisResolution => {
            "indistinguishable at this resolution".to_string()
        }
    };
    let text = format!(
        "{}\n{}\nverdict: {verdict_line}\nresult: pass",
        fmt_invariants("left ", &report.left),
        fmt_invariants("right", &report.right)
    );
    let json = json!({
        "command": "glue",
        "query": "compare",
        "report": serde_json::to_value(&report).map_err(input)?,
        "pass": true,
    });
    Ok(CommandOutput { text, json, pass: true })
}

/// `strata selftest`: the built-in acceptance suite, whole or one criterion.
pub fn selftest(criterion: Option<usize>) -> Result<CommandOutput, CliError> {
    let results = match criterion {
        None => accept::run_all(),
        Some(i) => vec![match i {
            1 => accept::criterion_1(),
            2 => accept::criterion_2(),
            3 => accept::criterion_3(),
            4 => accept::criterion_4(),
            5 => accept::criterion_5(),
            6 => accept::criterion_6(),
            7 => accept::criterion_7(),
            8 => accept::criterion_8(),
            9 => accept::criterion_9(),
            10 => accept::criterion_10(),
            _ => return Err(CliError("criterion must be between 1 and 10".into())),
        }],
    };
    let pass = results.iter().all(|r| r.pass);

    let mut text = String::new();
    for r in &results {
        let _ = writeln!(text, "{} criterion {:>2}: {}", verdict(r.pass), r.index, r.name);
        for label in r.failures() {
            let _ = writeln!(text, "       failed: {label}");
        }
    }
    let passed = results.iter().filter(|r| r.pass).count();
    let _ = write!(text, "result: {} ({passed}/{} criteria)", verdict(pass), results.len());

    let json = json!({
        "command": "selftest",
        "criteria": serde_json::to_value(&results).map_err(input)?,
        "pass": pass,
    });
    Ok(CommandOutput { text, json, pass })
}
