use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use anyhow::{bail, Result};
use kcmlab_core::stats::pearson;

use crate::manifest::{read_record, sha256, ManifestRecord};
use crate::Outcome;

struct Check {
    source: String,
    name: String,
    pass: bool,
    detail: String,
}

type Table = Vec<std::collections::HashMap<String, String>>;

fn parse_csv(text: &str) -> Result<Table> {
    let body: String = text.lines().filter(|l| !l.starts_with('#')).map(|l| format!("{l}\n")).collect();
    let mut r = csv::Reader::from_reader(body.as_bytes());
    let headers = r.headers()?.clone();
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        rows.push(headers.iter().zip(rec.iter()).map(|(h, v)| (h.to_string(), v.to_string())).collect());
    }
    Ok(rows)
}

fn num(row: &std::collections::HashMap<String, String>, key: &str) -> Result<f64> {
    let v = row.get(key).ok_or_else(|| anyhow::anyhow!("missing column {key}"))?;
    Ok(v.parse()?)
}

fn evaluate(rec: &ManifestRecord, table: &Table, out: &mut Vec<Check>, source: &str) -> Result<()> {
    let mut push = |name: &str, pass: bool, detail: String| {
        out.push(Check { source: source.to_string(), name: name.to_string(), pass, detail })
    };
    match rec.manifest.experiment.as_str() {
        "estimate" => {
            let censored: f64 = table.iter().map(|r| num(r, "censored")).sum::<Result<f64>>()?;
            push("no censoring", censored == 0.0, format!("{censored} censored replicates"));
            if rec.manifest.params.get("system").map(String::as_str) == Some("single-site") {
                for r in table {
                    let (q, m) = (num(r, "q")?, num(r, "mean_tau")?);
                    let se = (num(r, "ci_high")? - num(r, "ci_low")?) / 3.92;
                    let exact = (1.0 - q) / q;
                    push(
                        "single-site mean",
                        (m - exact).abs() <= 3.0 * se,
                        format!("q={q}: mean {m:.4}, exact {exact:.4}, se {se:.4}"),
                    );
                }
            }
            if table.len() >= 3 {
                let mut pts: Vec<(f64, f64)> =
                    table.iter().map(|r| Ok((num(r, "q")?, num(r, "mean_tau")?))).collect::<Result<_>>()?;
                pts.sort_by(|a, b| b.0.total_cmp(&a.0));
                let increasing = pts.windows(2).all(|w| w[1].1 > w[0].1);
                let x: Vec<f64> = pts.iter().map(|p| 1.0 / p.0).collect();
                let y: Vec<f64> = pts.iter().map(|p| p.1.ln()).collect();
                let r = pearson(&x, &y);
                push(
                    "scaling trend",
                    increasing && r >= 0.98,
                    format!("means increasing: {increasing}, pearson {r:.4}"),
                );
            }
        }
        "events" => {
            if rec.manifest.params.get("mode").map(String::as_str) == Some("harris") {
                let bad = table.iter().filter(|r| r.get("ok").map(String::as_str) != Some("1")).count();
                push("harris", bad == 0, format!("{bad} of {} pairs negatively correlated", table.len()));
            } else {
                for r in table {
                    let Some(exact) = r.get("exact").filter(|e| !e.is_empty()) else { continue };
                    let exact: f64 = exact.parse()?;
                    let (p, lo, hi) = (num(r, "p_hat")?, num(r, "ci_low")?, num(r, "ci_high")?);
                    let half = (hi - lo) / 2.0;
                    push(
                        "oracle agreement",
                        (p - exact).abs() <= 3.0 * half,
                        format!("{} level {}: p_hat {p:.5}, exact {exact:.5}", r["event"], r["level"]),
                    );
                }
            }
        }
        _ => {}
    }
    Ok(())
}

pub fn report(manifests: &[std::path::PathBuf], out: Option<&Path>) -> Result<Outcome> {
    if manifests.is_empty() {
        bail!("no manifests given");
    }
    let mut missing = Vec::new();
    let mut records = Vec::new();
    for m in manifests {
        match read_record(m) {
            Ok(r) => {
                for o in r.output_sha256.keys() {
                    if !Path::new(o).exists() {
                        missing.push(o.clone());
                    }
                }
                records.push((m, r));
            }
            Err(e) => missing.push(format!("{} ({e:#})", m.display())),
        }
    }
    if !missing.is_empty() {
        bail!("missing or unreadable inputs:\n  {}", missing.join("\n  "));
    }
    let mut checks = Vec::new();
    for (m, rec) in &records {
        let source = m.display().to_string();
        for (path, digest) in &rec.output_sha256 {
            let bytes = fs::read(path)?;
            let intact = sha256(&bytes) == *digest;
            let text = String::from_utf8_lossy(&bytes);
            let is_csv = text.starts_with("# manifest sha256=");
            let tagged = !is_csv || text.lines().next() == Some(&format!("# manifest sha256={}", rec.manifest_sha256));
            checks.push(Check {
                source: source.clone(),
                name: "integrity".into(),
                pass: intact && tagged,
                detail: format!("{path}: digest {}, manifest tag {}", ok(intact), ok(tagged)),
            });
            if intact && is_csv {
                match parse_csv(&text) {
                    Ok(t) => {
                        if let Err(e) = evaluate(rec, &t, &mut checks, &source) {
                            checks.push(Check {
                                source: source.clone(),
                                name: "parse".into(),
                                pass: false,
                                detail: e.to_string(),
                            });
                        }
                    }
                    Err(e) => checks.push(Check {
                        source: source.clone(),
                        name: "parse".into(),
                        pass: false,
                        detail: e.to_string(),
                    }),
                }
            }
        }
    }
    let mut doc = String::from("# kcmlab report\n\n");
    for c in &checks {
        writeln!(doc, "- [{}] {} / {}: {}", if c.pass { "PASS" } else { "FAIL" }, c.source, c.name, c.detail)?;
    }
    let failed = checks.iter().filter(|c| !c.pass).count();
    writeln!(doc, "\n{} checks, {failed} failed", checks.len())?;
    match out {
        Some(p) => fs::write(p, &doc)?,
        None => print!("{doc}"),
    }
    Ok(if failed > 0 { Outcome::Failed } else { Outcome::Ok })
}

fn ok(b: bool) -> &'static str {
    if b {
        "ok"
    } else {
        "mismatch"
    }
}
