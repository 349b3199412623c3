//! Text and structured output.

use std::fmt::Write;

use k3cox_core::coxgen::Witness;
use k3cox_core::{DivisorClass, Status};
use serde::Serialize;
use serde_json::{json, Value};

use crate::{Format, Outcome};

pub fn render(outcomes: &[Outcome], format: Format) -> String {
    match format {
        Format::Text => outcomes.iter().map(text).collect::<Vec<_>>().join("\n"),
        Format::Structured => {
            let docs: Vec<Value> = outcomes.iter().map(structured).collect();
            // `Value` objects keep their keys sorted.
            serde_json::to_string_pretty(&Value::Array(docs)).expect("report serializes") + "\n"
        }
    }
}

fn structured(o: &Outcome) -> Value {
    let mut v = serde_json::to_value(&o.report).expect("report serializes");
    if let Some(m) = &o.mismatches {
        v["mismatches"] = json!(m);
    }
    v["stored_answer"] = json!(o.record.stored_answer);
    v
}

/// Serde name of a unit variant.
fn label<T: Serialize>(t: &T) -> String {
    match serde_json::to_value(t) {
        Ok(Value::String(s)) => s,
        other => format!("{other:?}"),
    }
}

fn list(v: &[DivisorClass]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")
}

fn witness(w: &Witness) -> String {
    match w {
        Witness::Pair { a, b } => format!("A = {a}, B = {b}"),
        Witness::Triple { e1, e2, e3 } => format!("E1 = {e1}, E2 = {e2}, E3 = {e3}"),
        Witness::Split { a, b } => format!("A = {a}, B = {b}"),
        Witness::Multiple { base, k } => format!("{k} x {base}"),
        Witness::Fibre { f, d_prime, e1, e2 } => format!("F = {f} = {e1} + {e2}, D' = {d_prime}"),
        Witness::Involution { a, e } => format!("A = {a}, E = {e}"),
    }
}

fn text(o: &Outcome) -> String {
    let r = &o.report;
    let mut out = String::new();
    let mut line = |s: String| {
        out.push_str(&s);
        out.push('\n');
    };
    line(format!("lattice {}", r.lattice));
    if let Some(c) = &r.curves {
        line(format!("curves ({}): {}", c.len(), list(c)));
    }
    if let Some(c) = &r.cones {
        line(format!("E ({}, {}): {}", c.e.len(), label(&r.curves_provenance), list(&c.e)));
        line(format!("BEff ({}): {}", c.beff.len(), list(&c.beff)));
        line(format!("N ({}): {}", c.n.len(), list(&c.n)));
        line(format!("BNef ({}): {}", c.bnef.len(), list(&c.bnef)));
    }
    if let Some(g) = &r.generators {
        line(format!("generators ({}, {}): {}", g.degrees.len(), label(&g.provenance), list(&g.degrees)));
        if !g.l1_unresolved.is_empty() {
            line(format!("l1-unresolved: {}", list(&g.l1_unresolved)));
        }
        let eliminated = g.verdicts.iter().any(|v| !v.status.is_kept());
        if eliminated {
            line("candidates:".into());
            for v in &g.verdicts {
                let status = match &v.status {
                    Status::Eliminated { test, witness: w } => format!("eliminated by {test}: {}", witness(w)),
                    Status::Kept => "kept".into(),
                    Status::KeptL1Unresolved => "kept (l1-unresolved)".into(),
                };
                line(format!("  {} [{}] {status}", v.degree, label(&v.tier)));
            }
        }
    }
    if let Some(m) = &r.minimality {
        line("minimality:".into());
        for v in m {
            let e = &v.evidence;
            let why = if !v.necessary {
                "inconclusive".to_string()
            } else if e.no_writings {
                "necessary: not a sum of other degrees".to_string()
            } else if !e.b1.is_empty() {
                format!("necessary: every writing uses {}", list(&e.b1))
            } else if !e.b2.is_empty() {
                let pairs: Vec<String> = e.b2.iter().map(|(a, b)| format!("{a} or {b}")).collect();
                format!("necessary: every writing uses {}", pairs.join("; "))
            } else if !e.b3.is_empty() {
                let triples: Vec<String> = e.b3.iter().map(|[a, b, c]| format!("{a} or {b} or {c}")).collect();
                format!("necessary: every writing uses {}", triples.join("; "))
            } else if let Some((bound, h0)) = e.dimension {
                format!("necessary: products of other degrees span at most {bound} < h0 = {h0}")
            } else {
                "necessary".to_string()
            };
            line(format!("  {} {why}", v.degree));
        }
    }
    if let Some(ms) = &o.mismatches {
        if ms.is_empty() {
            line("verify: match".into());
        } else {
            line("verify: MISMATCH".into());
            for m in ms {
                line(format!("  {}: missing [{}], extra [{}]", m.field, list(&m.missing), list(&m.extra)));
            }
        }
    }
    let mut timing = String::new();
    for (k, us) in &r.timing_us {
        let _ = write!(timing, " {k}={us}us");
    }
    if !timing.is_empty() {
        line(format!("timing:{timing}"));
    }
    out
}
