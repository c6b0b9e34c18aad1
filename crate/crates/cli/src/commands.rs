use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use chainlattice::search::{
    certify_with, max_family_exact, max_weight_on_ground, sweep, CacheEntry, CertStatus, Certificate, SearchResult,
    UpperMethod, CERTIFY_EXACT_MAX_N,
};
use chainlattice::{
    chain_pair_ground, check, circle_ground, extremal_formula, hilton_check, parse_family, thm2_decompose,
    threshold_scan, ChainMode, ConstructionSpec, FqVariant, HiltonVerdict, PropertySpec, SetFamily,
};
use serde_json::{json, Value};

use crate::render::{self, Kind};
use crate::{Command, RunConfig};

pub fn dispatch(command: Command, cfg: &RunConfig) -> Result<u8> {
    match command {
        Command::Check { family, property } => {
            let prop = parse_property(&property)?;
            let family = read_family(&family)?;
            let verdict = check(&family, &prop);
            let value = json!({
                "property": prop.to_string(),
                "n": family.n(),
                "size": family.len(),
                "verdict": if verdict.is_satisfied() { "satisfied" } else { "violated" },
                "witness": verdict.witness(),
            });
            emit(cfg, Kind::Check, &value)?;
            Ok(if verdict.is_satisfied() { 0 } else { 1 })
        }
        Command::Construct { spec, out } => {
            let spec: ConstructionSpec = spec.parse()?;
            let family = spec.build()?;
            if let Some(path) = &out {
                fs::write(path, family.to_string()).with_context(|| format!("writing {}", path.display()))?;
            }
            let value = json!({ "spec": spec.to_string(), "n": family.n(), "size": family.len(), "family": family });
            if out.is_some() && cfg.format == crate::Format::Text {
                println!("wrote {} sets to {}", family.len(), out.as_ref().unwrap().display());
            } else {
                emit(cfg, Kind::Construct, &value)?;
            }
            Ok(0)
        }
        Command::Formula { n, mode, p, q } => {
            let mode: ChainMode = mode.parse()?;
            let property = format!("{mode}:{p},{q}");
            let value = cached(cfg, n, &property, "formula", || {
                let reports = extremal_formula(n, mode, p, q)?;
                Ok((json!({ "n": n, "mode": mode, "p": p, "q": q, "reports": reports }), true))
            })?;
            emit(cfg, Kind::Formula, &value)?;
            Ok(0)
        }
        Command::Extremal { n, property } => {
            let prop = parse_property(&property)?;
            let value = cached(cfg, n, &prop.to_string(), "extremal", || {
                let r = max_family_exact(n, &prop, cfg.budget)?;
                Ok(search_value(n, &prop, None, &r))
            })?;
            emit(cfg, Kind::Search, &value)?;
            Ok(0)
        }
        Command::Ground { circle, ordering, n, property, .. } => {
            let prop = parse_property(&property)?;
            let (ground, label) = if circle {
                (circle_ground(n)?, "circle".to_string())
            } else {
                let order = match &ordering {
                    Some(text) => parse_list(text)?,
                    None => (1..=n).collect(),
                };
                let label = format!("chain-pair:{}", join(&order));
                (chain_pair_ground(n, &order)?, label)
            };
            let method = format!("ground:{label}");
            let value = cached(cfg, n, &prop.to_string(), &method, || {
                let r = max_weight_on_ground(&ground, &prop, cfg.budget)?;
                Ok(search_value(n, &prop, Some(&label), &r))
            })?;
            emit(cfg, Kind::Search, &value)?;
            Ok(0)
        }
        Command::Certify { n, property } => {
            let prop = parse_property(&property)?;
            let value = cached(cfg, n, &prop.to_string(), "certify", || {
                let cert = certify_with(n, &prop, cfg.budget)?;
                Ok((serde_json::to_value(&cert)?, complete(&cert)))
            })?;
            emit(cfg, Kind::Certify, &value)?;
            Ok(0)
        }
        Command::Conjecture { which, n, p, q } => {
            let value = if which == 1 {
                let prop = PropertySpec::strong(p, q);
                cached(cfg, n, &prop.to_string(), "conjecture-1", || conjecture_strong(n, p, q, cfg))?
            } else {
                let prop = PropertySpec::total(p, q);
                cached(cfg, n, &prop.to_string(), "conjecture-2", || conjecture_total(n, p, q, cfg))?
            };
            emit(cfg, Kind::Conjecture, &value)?;
            Ok(0)
        }
        Command::Proofcheck { thm2_family, hilton } => {
            if let Some(path) = thm2_family {
                let d = thm2_decompose(&read_family(&path)?);
                let mut value = serde_json::to_value(&d)?;
                value["check"] = json!("thm2");
                value["all_hold"] = json!(d.all_hold());
                emit(cfg, Kind::Proofcheck, &value)?;
                Ok(if d.all_hold() { 0 } else { 1 })
            } else {
                let files = hilton.expect("clap requires one of the two modes");
                let first = read_family(&files[0])?;
                let second = read_family(&files[1])?;
                let verdict = hilton_check(&first, &second)?;
                let holds = matches!(verdict, HiltonVerdict::Holds { .. });
                let value = json!({
                    "check": "hilton",
                    "n": first.n(),
                    "sizes": [first.len(), second.len()],
                    "verdict": verdict,
                    "all_hold": holds,
                });
                emit(cfg, Kind::Proofcheck, &value)?;
                Ok(if holds { 0 } else { 1 })
            }
        }
        Command::Threshold { p, q, nmax } => {
            let property = PropertySpec::strong(p.max(1), q.max(1)).to_string();
            let value = cached(cfg, nmax, &property, "threshold", || {
                Ok((serde_json::to_value(threshold_scan(p, q, nmax)?)?, true))
            })?;
            emit(cfg, Kind::Threshold, &value)?;
            Ok(0)
        }
        Command::Sweep { n_range, properties, out } => {
            let ns = parse_range(&n_range)?;
            let props = properties
                .iter()
                .filter(|s| !s.trim().is_empty())
                .map(|s| parse_property(s))
                .collect::<Result<Vec<_>>>()?;
            let rows = sweep(&ns, &props, cfg.budget, cfg.cache.as_ref(), cfg.force)?;
            let value = json!({ "rows": rows });
            if let Some(path) = &out {
                fs::write(path, render::csv(Kind::Sweep, &value)?).with_context(|| format!("writing {}", path.display()))?;
            }
            emit(cfg, Kind::Sweep, &value)?;
            Ok(0)
        }
    }
}

fn emit(cfg: &RunConfig, kind: Kind, value: &Value) -> Result<()> {
    let text = match cfg.format {
        crate::Format::Json => serde_json::to_string_pretty(value)? + "\n",
        crate::Format::Csv => render::csv(kind, value)?,
        crate::Format::Text => render::text(kind, value),
    };
    print!("{text}");
    Ok(())
}

/// Looks `(n, property, method)` up in the cache, otherwise computes it and
/// stores the result when `compute` marks it as complete.
fn cached(
    cfg: &RunConfig,
    n: usize,
    property: &str,
    method: &str,
    compute: impl FnOnce() -> Result<(Value, bool)>,
) -> Result<Value> {
    if let (Some(cache), false) = (&cfg.cache, cfg.force) {
        if let Some(hit) = cache.get(n, property, method)? {
            return Ok(hit.value);
        }
    }
    let (value, complete) = compute()?;
    if let (Some(cache), true) = (&cfg.cache, complete) {
        if let Some(dir) = cache.path().parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        }
        cache.put(&CacheEntry::new(n, property, method, value.clone()), cfg.force)?;
    }
    Ok(value)
}

/// Search output without wall-clock time, so reruns print the same bytes.
/// Only exhaustive results are worth caching.
fn search_value(n: usize, prop: &PropertySpec, ground: Option<&str>, r: &SearchResult) -> (Value, bool) {
    let value = json!({
        "n": n,
        "property": prop.to_string(),
        "ground": ground,
        "optimum": chainlattice::fmt_weight(&r.optimum),
        "size": r.witness.len(),
        "witness": r.witness,
        "nodes_explored": r.nodes_explored,
        "exhaustive": r.exhaustive,
    });
    (value, r.exhaustive)
}

/// A certificate is reproducible when no bound was cut short by the budget.
fn complete(cert: &Certificate) -> bool {
    let has = |m: UpperMethod| cert.upper_candidates.iter().any(|u| u.method == m);
    (cert.n > CERTIFY_EXACT_MAX_N || has(UpperMethod::ExhaustiveSearch))
        && (cert.n < 2 || has(UpperMethod::CircleGround))
        && has(UpperMethod::ChainPairGround)
}

fn status_text(status: CertStatus) -> &'static str {
    match status {
        CertStatus::Matched => "matched",
        CertStatus::Gap => "gap",
    }
}

/// Where the certified range sits relative to a conjectured value at this
/// one `n`; nothing is claimed beyond it.
fn relation(cert: &Certificate, bound: &chainlattice::BigCount) -> &'static str {
    if cert.lower.value > *bound {
        "bound-exceeded"
    } else if cert.upper.value <= *bound {
        if cert.lower.value == *bound {
            "bound-attained"
        } else {
            "bound-respected"
        }
    } else {
        "undetermined"
    }
}

fn optimum(cert: &Certificate) -> Value {
    match cert.status {
        CertStatus::Matched => json!(cert.upper.value.to_string()),
        CertStatus::Gap => Value::Null,
    }
}

fn conjecture_strong(n: usize, p: usize, q: usize, cfg: &RunConfig) -> Result<(Value, bool)> {
    let report = extremal_formula(n, ChainMode::Strong, p, q)?.remove(0);
    let prop = PropertySpec::strong(p, q);
    let cert = certify_with(n, &prop, cfg.budget)?;
    let value = json!({
        "which": 1,
        "n": n,
        "p": p,
        "q": q,
        "property": prop.to_string(),
        "conjectured_bound": report.maximum.to_string(),
        "attained_by": report.attained_by,
        "lower": cert.lower.value.to_string(),
        "upper": cert.upper.value.to_string(),
        "upper_method": cert.upper.method,
        "certificate": status_text(cert.status),
        "optimum": optimum(&cert),
        "status": relation(&cert, &report.maximum),
    });
    Ok((value, complete(&cert)))
}

fn conjecture_total(n: usize, p: usize, q: usize, cfg: &RunConfig) -> Result<(Value, bool)> {
    if p < q {
        bail!("the total-mode conjecture is stated for p >= q (got p={p}, q={q})");
    }
    let reports = extremal_formula(n, ChainMode::Total, p, q)?;
    let prop = PropertySpec::total(p, q);
    let corrected = reports.iter().find(|r| r.variant == Some(FqVariant::Corrected)).expect("both variants");
    let literal = reports.iter().find(|r| r.variant == Some(FqVariant::Literal)).expect("both variants");

    // Every literal candidate of maximum size, with its verdict.
    let mut literal_checks = Vec::new();
    for c in literal.candidates.iter().filter(|c| c.size == literal.maximum) {
        let family = c.spec.build()?;
        let verdict = check(&family, &prop);
        literal_checks.push(json!({
            "label": c.label,
            "spec": c.spec.to_string(),
            "size": c.size.to_string(),
            "valid": verdict.is_satisfied(),
            "witness": verdict.witness(),
        }));
    }
    let literal_valid = literal_checks.iter().any(|c| c["valid"] == json!(true));

    let cert = certify_with(n, &prop, cfg.budget)?;
    let value = json!({
        "which": 2,
        "n": n,
        "p": p,
        "q": q,
        "property": prop.to_string(),
        "conjectured_bound": corrected.maximum.to_string(),
        "attained_by": corrected.attained_by,
        "literal_bound": literal.maximum.to_string(),
        "literal_valid": literal_valid,
        "literal_candidates": literal_checks,
        "lower": cert.lower.value.to_string(),
        "upper": cert.upper.value.to_string(),
        "upper_method": cert.upper.method,
        "certificate": status_text(cert.status),
        "optimum": optimum(&cert),
        "status": relation(&cert, &corrected.maximum),
    });
    Ok((value, complete(&cert)))
}

fn parse_property(text: &str) -> Result<PropertySpec> {
    text.parse().with_context(|| format!("bad property `{text}`"))
}

fn read_family(path: &Path) -> Result<SetFamily> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_family(&text).with_context(|| format!("{}", path.display()))
}

fn parse_list(text: &str) -> Result<Vec<usize>> {
    text.split(',')
        .map(|t| t.trim().parse::<usize>().with_context(|| format!("bad number `{t}` in `{text}`")))
        .collect()
}

fn join(items: &[usize]) -> String {
    items.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(",")
}

fn parse_range(text: &str) -> Result<Vec<usize>> {
    let text = text.trim();
    let span = text
        .split_once("..=")
        .or_else(|| text.split_once(".."))
        .or_else(|| text.split_once('-'));
    let ns = match span {
        Some((a, b)) => {
            let (a, b): (usize, usize) = (a.trim().parse()?, b.trim().parse()?);
            if a > b {
                bail!("empty range `{text}`");
            }
            (a..=b).collect()
        }
        None => parse_list(text)?,
    };
    Ok(ns)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        assert_eq!(parse_range("3..5").unwrap(), vec![3, 4, 5]);
        assert_eq!(parse_range("3..=5").unwrap(), vec![3, 4, 5]);
        assert_eq!(parse_range("2-3").unwrap(), vec![2, 3]);
        assert_eq!(parse_range("4").unwrap(), vec![4]);
        assert_eq!(parse_range("3,7").unwrap(), vec![3, 7]);
        assert!(parse_range("5..3").is_err());
        assert!(parse_range("x").is_err());
    }
}
