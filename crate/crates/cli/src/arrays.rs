use anyhow::{bail, Context, Result};
use drgkit::families::{conjecture_membership, family_array, identify_classical, FamilySpec};
use drgkit::geometric::{
    check_gamma_identity, classify_by_equalities, classify_by_inequalities, delsarte_eigenvalue,
    gamma_prefix_is_one, geometric_candidate, gram_data, near_polygon_check, s_closed_form, Classification,
    NearPolygonCondition, Outcome,
};
use drgkit::params::{Status, Violation, TAG_B_MONOTONE, TAG_C1, TAG_C_BOUND, TAG_C_MONOTONE, TAG_K_INTEGRAL};
use drgkit::scalar::{format_rational, parse_rational, rat};
use drgkit::spectral::{
    characteristic_polynomial, intersection_matrix, multiplicities_integral, multiplicities_integral_with,
    multiplicity, spectrum as exact_spectrum, standard_sequence, FINE_WIDTH, TAG_MULT_INTEGRAL,
};
use drgkit::{basic_feasibility, BigRational, IntersectionArray};
use num_rational::Rational64;
use num_traits::{Signed, Zero};
use serde_json::{json, Value};

use crate::{FamilyCommand, NearPolygon, Report};

fn status_word(s: Status) -> &'static str {
    match s {
        Status::Pass => "pass",
        Status::Fail => "fail",
        Status::Indeterminate => "indeterminate",
    }
}

fn describe(vs: &[&Violation]) -> String {
    vs.iter()
        .map(|v| format!("i={}: {}", v.index, v.value))
        .collect::<Vec<_>>()
        .join("; ")
}

pub fn check(arr: &IntersectionArray) -> Report {
    let basic = basic_feasibility(arr);
    let mut mult = multiplicities_integral(arr);
    let mut rechecked = false;
    if mult.status() == Status::Indeterminate {
        mult = multiplicities_integral_with(arr, &rat(FINE_WIDTH.0, FINE_WIDTH.1));
        rechecked = true;
    }

    let mut tags: Vec<&str> = vec![TAG_C1, TAG_C_MONOTONE, TAG_B_MONOTONE, TAG_K_INTEGRAL, TAG_C_BOUND];
    for v in &basic.violations {
        if !tags.contains(&v.tag.as_str()) {
            tags.push(&v.tag);
        }
    }
    let mut checks = Vec::new();
    let mut text = vec![format!("array {arr}"), format!("v = {}", format_rational(arr.vertex_count()))];
    for tag in tags {
        let hits: Vec<&Violation> = basic.violations.iter().filter(|v| v.tag == tag).collect();
        let status = if hits.is_empty() { "pass" } else { "fail" };
        text.push(if hits.is_empty() {
            format!("{tag}: pass")
        } else {
            format!("{tag}: fail ({})", describe(&hits))
        });
        checks.push(json!({ "check": tag, "status": status, "violations": hits }));
    }
    let mult_status = mult.status();
    let mult_hits: Vec<&Violation> = mult.violations.iter().chain(&mult.undecided).collect();
    text.push(match mult_status {
        Status::Pass => format!("{TAG_MULT_INTEGRAL}: pass"),
        s => format!("{TAG_MULT_INTEGRAL}: {} ({})", status_word(s), describe(&mult_hits)),
    });
    checks.push(json!({
        "check": TAG_MULT_INTEGRAL,
        "status": status_word(mult_status),
        "violations": mult.violations,
        "undecided": mult.undecided,
        "rechecked": rechecked,
    }));

    let overall = match (basic.status(), mult_status) {
        (Status::Pass, Status::Pass) => Status::Pass,
        (Status::Fail, _) | (_, Status::Fail) => Status::Fail,
        _ => Status::Indeterminate,
    };
    text.push(format!("result: {}", status_word(overall)));
    Report {
        json: json!({ "array": arr, "checks": checks, "status": status_word(overall) }),
        text: text.join("\n"),
        csv: None,
        failed: overall != Status::Pass,
    }
}

pub fn spectrum(arr: &IntersectionArray, theta: Option<&str>) -> Result<Report> {
    if let Some(theta) = theta {
        let value = parse_rational(theta).with_context(|| format!("theta {theta:?} is not p or p/q"))?;
        return Ok(sequence_report(arr, value));
    }
    let spec = exact_spectrum(arr)?;
    let total = spec.multiplicity_total().map(|t| t.to_string());
    let poly: Vec<String> = characteristic_polynomial(arr).iter().map(|c| c.to_string()).collect();
    let mut text = vec![format!("array {arr}"), format!("v = {}", format_rational(arr.vertex_count()))];
    text.push("eigenvalue  multiplicity".into());
    for e in &spec.entries {
        text.push(format!("{}  {}", e.value, e.multiplicity));
    }
    text.push(format!(
        "total multiplicity: {}",
        total.as_deref().unwrap_or("not all integral")
    ));
    let mut csv = vec![vec!["eigenvalue".to_string(), "multiplicity".to_string()]];
    csv.extend(spec.entries.iter().map(|e| vec![e.value.to_string(), e.multiplicity.to_string()]));
    Ok(Report {
        json: json!({
            "array": arr,
            "intersection_matrix": intersection_matrix(arr).rows(),
            "characteristic_polynomial": poly,
            "eigenvalues": spec,
            "total_multiplicity": total,
        }),
        text: text.join("\n"),
        csv: Some(csv),
        failed: false,
    })
}

fn sequence_report(arr: &IntersectionArray, theta: BigRational) -> Report {
    let seq = standard_sequence(arr, theta.clone());
    let u = seq.formatted();
    let eigen = seq.is_eigenvalue();
    let m = eigen.then(|| multiplicity(arr, theta.clone()).ok()).flatten();
    let mut text = vec![format!("array {arr}"), format!("theta = {}", format_rational(&theta))];
    for (i, ui) in u.iter().enumerate() {
        text.push(format!("u_{i} = {ui}"));
    }
    text.push(match &m {
        Some(m) => format!("eigenvalue, multiplicity {}", format_rational(m)),
        None => format!("not an eigenvalue (residual {})", format_rational(&seq.residual)),
    });
    let mut csv = vec![vec!["i".to_string(), "u_i".to_string()]];
    csv.extend(u.iter().enumerate().map(|(i, x)| vec![i.to_string(), x.clone()]));
    Report {
        json: json!({
            "array": arr,
            "theta": format_rational(&theta),
            "u": u,
            "residual": format_rational(&seq.residual),
            "eigenvalue": eigen,
            "multiplicity": m.as_ref().map(format_rational),
        }),
        text: text.join("\n"),
        csv: Some(csv),
        failed: !eigen,
    }
}

fn tuple(xs: &[i64]) -> String {
    let parts: Vec<String> = xs.iter().map(i64::to_string).collect();
    format!("({})", parts.join(","))
}

pub fn gamma(arr: &IntersectionArray) -> Report {
    match geometric_candidate(arr) {
        Ok(p) => {
            let u = standard_sequence(arr, p.theta_min.clone()).formatted();
            let identity = check_gamma_identity(arr, &p.gamma).err();
            let text = [
                format!("array {arr}"),
                format!(
                    "a_1 = {}, clique size {}, theta_min = {}",
                    p.a1,
                    p.clique_size,
                    format_rational(&p.theta_min)
                ),
                format!("u = ({})", u.join(", ")),
                format!("gamma = {}", tuple(&p.gamma)),
                format!("near polygon: {}", if p.near_polygon { "yes" } else { "no" }),
                match identity {
                    None => "a_i identity: holds".to_string(),
                    Some(i) => format!("a_i identity: fails at i={i}"),
                },
            ];
            Report {
                json: json!({
                    "array": arr,
                    "geometric": true,
                    "profile": p,
                    "u": u,
                    "identity_failure": identity,
                }),
                text: text.join("\n"),
                csv: None,
                failed: identity.is_some(),
            }
        }
        Err(e) => Report {
            json: json!({ "array": arr, "geometric": false, "reason": e.to_string() }),
            text: format!("array {arr}\nnot geometric: {e}"),
            csv: None,
            failed: true,
        },
    }
}

pub fn sjc(arr: &IntersectionArray, j: Option<usize>) -> Result<Report> {
    let d = arr.diameter();
    let js: Vec<usize> = match j {
        Some(j) => vec![j],
        None if d >= 2 => (2..=d).collect(),
        None => bail!("diameter {d} has no distance j >= 2"),
    };
    let theta = delsarte_eigenvalue(arr);
    let geometric = geometric_candidate(arr).is_ok();
    let mut text = vec![
        format!("array {arr}"),
        format!(
            "theta = -k/(a_1+1) = {}{}",
            format_rational(&theta),
            if geometric { "" } else { " (not the smallest eigenvalue; values are formal)" }
        ),
    ];
    let mut rows = Vec::new();
    let mut negative = false;
    for j in js {
        let g = gram_data(arr, j)?;
        let closed = ((j == 3 || j == 4) && gamma_prefix_is_one(arr, j))
            .then(|| {
                let c4 = if d >= 4 { arr.c(4) } else { 0 };
                s_closed_form::<BigRational>(arr.a(1), arr.c(2), arr.c(3), c4, j).ok()
            })
            .flatten();
        let sign = g.s.as_ref().map(|s| {
            if s.is_negative() {
                "negative"
            } else if s.is_zero() {
                "zero"
            } else {
                "positive"
            }
        });
        negative |= sign == Some("negative");
        let opt = |x: &Option<BigRational>| x.as_ref().map_or("undefined".to_string(), format_rational);
        let mut line = format!(
            "j={j}: <F,F> = {}, <C,F> = {}, <C,C> = {}, S = {}",
            format_rational(&g.ff),
            format_rational(&g.cf),
            opt(&g.cc),
            opt(&g.s)
        );
        if let Some(c) = &closed {
            line.push_str(&format!(" (closed form {})", format_rational(c)));
        }
        if let Some(t) = &g.t {
            line.push_str(&format!(", t = {}", format_rational(t)));
        }
        text.push(line);
        let mut row = serde_json::to_value(&g)?;
        row["closed_form"] = closed.as_ref().map(format_rational).into();
        row["sign"] = sign.into();
        rows.push(row);
    }
    Ok(Report {
        json: json!({
            "array": arr,
            "theta": format_rational(&theta),
            "geometric": geometric,
            "distances": rows,
        }),
        text: text.join("\n"),
        csv: None,
        failed: negative,
    })
}

fn outcome_word(o: Outcome) -> &'static str {
    match o {
        Outcome::TwoA => "TwoA",
        Outcome::BorC => "BorC",
        Outcome::NoMatch => "NoMatch",
        Outcome::NotApplicable => "NotApplicable",
    }
}

fn render_classification(title: &str, c: &Classification, out: &mut Vec<String>) {
    let mut head = format!("{title}: {}", outcome_word(c.outcome));
    if let Some(id) = &c.identified {
        head.push_str(&format!(" [{id}]"));
    }
    if let Some(r) = &c.reason {
        head.push_str(&format!(" ({r})"));
    }
    out.push(head);
    for step in &c.trace {
        out.push(format!(
            "  {} {}: expected {}, got {}",
            if step.passed { "ok  " } else { "FAIL" },
            step.name,
            step.expected,
            step.actual
        ));
    }
}

pub fn classify(arr: &IntersectionArray, np: NearPolygon) -> Report {
    let cond = match np {
        NearPolygon::Adopted => NearPolygonCondition::Adopted,
        NearPolygon::Printed => NearPolygonCondition::Printed,
    };
    let eq = classify_by_equalities(arr, cond);
    let iq = classify_by_inequalities(arr);
    let conj = conjecture_membership(arr);
    let mut text = vec![format!("array {arr}")];
    let label = match cond {
        NearPolygonCondition::Adopted => "a_i = c_i a_1",
        NearPolygonCondition::Printed => "a_i = c_i (a_1+1)",
    };
    render_classification(&format!("equality classifier ({label})"), &eq, &mut text);
    render_classification("inequality classifier", &iq, &mut text);
    text.push(match &conj {
        Some(m) => format!(
            "valency-halving list: clause {} ({}), theta_min <= -k/2: {}",
            m.clause,
            m.family,
            match m.theta_condition {
                Some(true) => "yes",
                Some(false) => "no",
                None => "undecided",
            }
        ),
        None => "valency-halving list: no member".to_string(),
    });
    let matched = |c: &Classification| matches!(c.outcome, Outcome::TwoA | Outcome::BorC);
    let failed = !(matched(&eq) || matched(&iq));
    Report {
        json: json!({
            "array": arr,
            "near_polygon_condition": cond,
            "equalities": eq,
            "inequalities": iq,
            "conjecture": conj,
        }),
        text: text.join("\n"),
        csv: None,
        failed,
    }
}

fn family_spec(cmd: &FamilyCommand) -> Result<FamilySpec> {
    Ok(match *cmd {
        FamilyCommand::DualPolar { q, ref e, d } => {
            let e: Rational64 = e.trim().parse().map_err(|_| anyhow::anyhow!("e {e:?} is not p or p/q"))?;
            FamilySpec::DualPolar { q, e, d }
        }
        FamilyCommand::TwoA { r, d } => FamilySpec::hermitian(r, d),
        FamilyCommand::B { q, d } => FamilySpec::symplectic(q, d),
        FamilyCommand::Hamming { d, q } => FamilySpec::Hamming { d, q },
        FamilyCommand::Johnson { n, d } => FamilySpec::Johnson { n, d },
        FamilyCommand::Odd { k } => FamilySpec::Odd { k },
        FamilyCommand::FoldedCube { m } => FamilySpec::FoldedCube { m },
        FamilyCommand::OddPolygon { d } => FamilySpec::OddPolygon { d },
        FamilyCommand::WittM24 => FamilySpec::WittM24,
        FamilyCommand::Sporadic27 => FamilySpec::Sporadic27,
    })
}

pub fn family(cmd: &FamilyCommand) -> Result<Report> {
    let spec = family_spec(cmd)?;
    let arr = family_array(&spec)?;
    let near_polygon = near_polygon_check(&arr).ok();
    let identified = identify_classical(&arr);
    let conj = conjecture_membership(&arr);
    let mut text = vec![
        format!("{spec}: {arr}"),
        format!("v = {}", format_rational(arr.vertex_count())),
        format!("a = {}", tuple(arr.a_seq())),
    ];
    text.push(format!(
        "near polygon: {}",
        match near_polygon {
            Some(true) => "yes",
            Some(false) => "no",
            None => "not geometric",
        }
    ));
    if let Some(m) = &conj {
        text.push(format!("valency-halving list: clause {} ({})", m.clause, m.family));
    }
    let spec_json: Value = serde_json::to_value(&spec)?;
    Ok(Report {
        json: json!({
            "family": spec.to_string(),
            "spec": spec_json,
            "array": arr,
            "near_polygon": near_polygon,
            "identified": identified,
            "conjecture": conj,
        }),
        text: text.join("\n"),
        csv: None,
        failed: false,
    })
}
