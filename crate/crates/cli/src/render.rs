//! Text and CSV views of the JSON reports. Working from the JSON value means
//! cached results render exactly like fresh ones.

use anyhow::Result;
use chainlattice::proofcheck::THRESHOLD_CSV_HEADER;
use chainlattice::search::SWEEP_CSV_HEADER;
use serde_json::Value;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Check,
    Construct,
    Formula,
    Search,
    Certify,
    Conjecture,
    Proofcheck,
    Threshold,
    Sweep,
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        Value::Bool(_) | Value::Number(_) => v.to_string(),
        other => other.to_string(),
    }
}

/// A set given as a JSON element list, in family-file syntax.
fn set_text(v: &Value) -> String {
    let elems: Vec<String> = v.as_array().map(|a| a.iter().map(|e| e.to_string()).collect()).unwrap_or_default();
    if elems.is_empty() {
        "-".into()
    } else {
        elems.join(",")
    }
}

fn sets(v: &Value) -> Vec<&Value> {
    v.as_array().map(|a| a.iter().collect()).unwrap_or_default()
}

fn family_text(f: &Value) -> String {
    let mut out = format!("n {}\n", f["n"]);
    for s in sets(&f["sets"]) {
        out.push_str(&set_text(s));
        out.push('\n');
    }
    out
}

fn complement_text(v: &Value, n: u64) -> String {
    let inside: Vec<u64> = sets(v).iter().filter_map(|e| e.as_u64()).collect();
    let rest: Vec<String> = (1..=n).filter(|e| !inside.contains(e)).map(|e| e.to_string()).collect();
    if rest.is_empty() {
        "-".into()
    } else {
        rest.join(",")
    }
}

/// One family-file block per chain, so each block parses on its own.
fn witness_text(w: &Value, n: u64) -> String {
    let mut out = String::new();
    let mut block = |title: &str, lines: Vec<String>| {
        out.push_str(&format!("# {title}\nn {n}\n"));
        for l in lines {
            out.push_str(&l);
            out.push('\n');
        }
    };
    let chain = |key: &str| sets(&w[key]).into_iter().map(set_text).collect::<Vec<_>>();
    match w["kind"].as_str() {
        Some("chain_pair") => {
            block("A-chain", chain("a_chain"));
            block("B-chain", chain("b_chain"));
        }
        Some("chain") => block("chain", chain("chain")),
        Some("complemented_chain") => {
            block("chain", chain("chain"));
            block("complements", sets(&w["chain"]).into_iter().map(|s| complement_text(s, n)).collect());
        }
        _ => out.push_str(&format!("# {w}\n")),
    }
    out
}

pub fn text(kind: Kind, v: &Value) -> String {
    match kind {
        Kind::Check => {
            let n = v["n"].as_u64().unwrap_or(0);
            let mut out = format!("{} {} (n={}, {} sets)\n", cell(&v["verdict"]), cell(&v["property"]), n, v["size"]);
            if !v["witness"].is_null() {
                out.push_str(&witness_text(&v["witness"], n));
            }
            out
        }
        Kind::Construct => family_text(&v["family"]),
        Kind::Formula => {
            let mut out = String::new();
            for r in sets(&v["reports"]) {
                let variant = r["variant"].as_str().map(|s| format!(" [{s} F_q]")).unwrap_or_default();
                out.push_str(&format!(
                    "{}:{},{} at n={}{variant}: {}\n",
                    cell(&r["mode"]),
                    r["p"],
                    r["q"],
                    r["n"],
                    cell(&r["maximum"])
                ));
                for c in sets(&r["candidates"]) {
                    out.push_str(&format!("  {:<10} {:<32} {}\n", cell(&c["label"]), cell(&c["spec"]), cell(&c["size"])));
                }
            }
            out
        }
        Kind::Search => {
            let ground = v["ground"].as_str().map(|g| format!(" on {g}")).unwrap_or_default();
            let exhaustive = if v["exhaustive"] == Value::Bool(true) {
                "exhaustive"
            } else {
                "budget exhausted, lower bound only"
            };
            format!(
                "{}{ground} at n={}: optimum {} ({exhaustive}, {} nodes)\n{}",
                cell(&v["property"]),
                v["n"],
                cell(&v["optimum"]),
                v["nodes_explored"],
                family_text(&v["witness"])
            )
        }
        Kind::Certify => {
            let lower = &v["lower"];
            let source = lower["label"].as_str().map(String::from).unwrap_or_else(|| "search witness".into());
            let head = match v["status"].as_str() {
                Some("matched") => format!("matched at {}", cell(&lower["value"])),
                _ => format!("gap: {} <= max <= {}", cell(&lower["value"]), cell(&v["upper"]["value"])),
            };
            let mut out = format!("{} at n={}: {head}\n  lower {} from {source}\n", cell(&v["property"]), v["n"], cell(&lower["value"]));
            for u in sets(&v["upper_candidates"]) {
                let w = u["ground_weight"].as_str().map(|w| format!(" (weight {w})")).unwrap_or_default();
                out.push_str(&format!("  upper {} from {}{w}\n", cell(&u["value"]), cell(&u["method"])));
            }
            out
        }
        Kind::Conjecture => {
            let mut out = format!(
                "{} at n={}: conjectured bound {} ({})\n",
                cell(&v["property"]),
                v["n"],
                cell(&v["conjectured_bound"]),
                sets(&v["attained_by"]).iter().map(|s| cell(s)).collect::<Vec<_>>().join(", ")
            );
            if !v["literal_bound"].is_null() {
                let validity = if v["literal_valid"] == Value::Bool(true) { "valid" } else { "invalid" };
                out.push_str(&format!("  literal F_q bound {}: {validity}\n", cell(&v["literal_bound"])));
                let n = v["n"].as_u64().unwrap_or(0);
                for c in sets(&v["literal_candidates"]).into_iter().filter(|c| !c["witness"].is_null()) {
                    out.push_str(&format!("  {} fails:\n", cell(&c["spec"])));
                    for line in witness_text(&c["witness"], n).lines() {
                        out.push_str(&format!("    {line}\n"));
                    }
                }
            }
            let optimum = if v["optimum"].is_null() {
                format!("between {} and {}", cell(&v["lower"]), cell(&v["upper"]))
            } else {
                cell(&v["optimum"])
            };
            out.push_str(&format!(
                "  exact optimum {optimum} ({}, upper by {})\n  status at this n: {}\n",
                cell(&v["certificate"]),
                cell(&v["upper_method"]),
                cell(&v["status"])
            ));
            out
        }
        Kind::Proofcheck => {
            if v["check"] == "hilton" {
                let verdict = &v["verdict"];
                let detail = match verdict["status"].as_str() {
                    Some("holds") => format!("{} <= {}", verdict["total"], verdict["bound"]),
                    Some("violated") => cell(&verdict["detail"]),
                    _ => sets(&verdict["failed"]).iter().map(|f| cell(&f["hypothesis"])).collect::<Vec<_>>().join(", "),
                };
                format!("hilton {}: {detail}\n", cell(&verdict["status"]))
            } else {
                let size = |k: &str| sets(&v[k]["sets"]).len();
                let mut out = format!(
                    "|F|={} |G|={} |G1|={} |G2|={} |F1|={}\n",
                    size("family"),
                    size("g"),
                    size("g1"),
                    size("g2"),
                    size("f1")
                );
                for flag in ["f1_complement_free", "g2_complement_free", "cross_sperner", "sizes_add_up"] {
                    out.push_str(&format!("{flag}: {}\n", v[flag]));
                }
                out.push_str(&format!("inequality: {}\n", cell(&v["hilton"]["status"])));
                for f in sets(&v["failures"]) {
                    out.push_str(&format!("failure: {}\n", cell(f)));
                }
                out.push_str(if v["all_hold"] == Value::Bool(true) { "all claims hold\n" } else { "some claim fails\n" });
                out
            }
        }
        Kind::Threshold => {
            let mut out = format!("strong ({},{}) up to n={}\n", v["p"], v["q"], v["n_max"]);
            out.push_str(&format!("{:>3} {:>24} {:>24} {:>6} {:>12}\n", "n", "x", "y", "x>y", "bound holds"));
            for r in sets(&v["rows"]) {
                out.push_str(&format!(
                    "{:>3} {:>24} {:>24} {:>6} {:>12}\n",
                    cell(&r["n"]),
                    cell(&r["x"]),
                    cell(&r["y"]),
                    r["x_gt_y"],
                    cell(&r["bound_holds"])
                ));
            }
            let least = |k: &str| v[k].as_u64().map(|n| n.to_string()).unwrap_or_else(|| "none in range".into());
            out.push_str(&format!("least n with x > y: {}\n", least("least_n_x_gt_y")));
            out.push_str(&format!("least n where the rotation bound holds: {}\n", least("least_n_bound_holds")));
            out
        }
        Kind::Sweep => {
            let header: Vec<&str> = SWEEP_CSV_HEADER.split(',').collect();
            let rows: Vec<Vec<String>> =
                sets(&v["rows"]).iter().map(|r| header.iter().map(|k| cell(&r[*k])).collect()).collect();
            let widths: Vec<usize> = (0..header.len())
                .map(|i| rows.iter().map(|r| r[i].len()).chain([header[i].len()]).max().unwrap_or(0))
                .collect();
            let line = |cells: Vec<String>| {
                let padded: Vec<String> = cells.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
                padded.join("  ").trim_end().to_string() + "\n"
            };
            let mut out = line(header.iter().map(|h| h.to_string()).collect());
            for r in rows {
                out.push_str(&line(r));
            }
            out
        }
    }
}

fn table(header: &[&str], rows: &[&Value]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(header.iter().map(|k| cell(&r[*k])))?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

pub fn csv(kind: Kind, v: &Value) -> Result<String> {
    match kind {
        Kind::Sweep => table(&SWEEP_CSV_HEADER.split(',').collect::<Vec<_>>(), &sets(&v["rows"])),
        Kind::Threshold => table(&THRESHOLD_CSV_HEADER.split(',').collect::<Vec<_>>(), &sets(&v["rows"])),
        Kind::Formula => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["n", "mode", "p", "q", "variant", "label", "spec", "size", "maximum"])?;
            for r in sets(&v["reports"]) {
                for c in sets(&r["candidates"]) {
                    w.write_record([
                        cell(&r["n"]),
                        cell(&r["mode"]),
                        cell(&r["p"]),
                        cell(&r["q"]),
                        cell(&r["variant"]),
                        cell(&c["label"]),
                        cell(&c["spec"]),
                        cell(&c["size"]),
                        cell(&r["maximum"]),
                    ])?;
                }
            }
            Ok(String::from_utf8(w.into_inner()?)?)
        }
        Kind::Construct => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["set"])?;
            for s in sets(&v["family"]["sets"]) {
                w.write_record([set_text(s)])?;
            }
            Ok(String::from_utf8(w.into_inner()?)?)
        }
        _ => {
            // field,value for every top-level entry; nested values as JSON
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["field", "value"])?;
            if let Some(map) = v.as_object() {
                for (k, val) in map {
                    w.write_record([k.as_str(), &cell(val)])?;
                }
            }
            Ok(String::from_utf8(w.into_inner()?)?)
        }
    }
}
