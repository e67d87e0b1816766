//! Machine-readable serialization of reports and traces.
//!
//! CSV columns and float formatting are fixed: floats carry 17
//! significant digits so a re-parse reproduces the exact bits, and rows
//! are emitted in the order given (callers sort first). Output is
//! byte-deterministic for a given report list.

use std::collections::BTreeMap;

use serde_json::json;

use crate::extremal::TracePoint;
use crate::identities::IdentityReport;

pub const CSV_HEADER: &str = "name,alpha,beta,fn_label,lhs,rhs,abs_residual,rel_residual,pass";

/// 17 significant digits round-trip any f64 exactly.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn csv_field(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn opt_float(x: Option<f64>) -> String {
    x.map(fmt_float).unwrap_or_default()
}

/// Stable ordering: by name, then parameters, then function label.
pub fn sort_reports(reports: &mut [IdentityReport]) {
    reports.sort_by(|a, b| {
        let key = |r: &IdentityReport| {
            (
                r.name.clone(),
                r.alpha.map(|v| v.to_bits()).unwrap_or(0),
                r.beta.map(|v| v.to_bits()).unwrap_or(0),
                r.fn_label.clone(),
            )
        };
        key(a).cmp(&key(b))
    });
}

pub fn reports_to_csv(reports: &[IdentityReport]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in reports {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            csv_field(&r.name),
            opt_float(r.alpha),
            opt_float(r.beta),
            csv_field(&r.fn_label),
            fmt_float(r.lhs),
            fmt_float(r.rhs),
            fmt_float(r.abs_residual),
            fmt_float(r.rel_residual),
            r.pass,
        ));
    }
    out
}

/// JSON document grouping reports by identity name.
pub fn reports_to_json(reports: &[IdentityReport]) -> String {
    let mut groups: BTreeMap<&str, Vec<&IdentityReport>> = BTreeMap::new();
    for r in reports {
        groups.entry(&r.name).or_default().push(r);
    }
    let doc = json!({
        "schema_version": 1,
        "groups": groups,
    });
    let mut s = serde_json::to_string_pretty(&doc).expect("reports serialize");
    s.push('\n');
    s
}

pub const TRACE_CSV_HEADER: &str = "m_or_iter,ratio,target,gap";

pub fn trace_to_csv(points: &[TracePoint]) -> String {
    let mut out = String::from(TRACE_CSV_HEADER);
    out.push('\n');
    for p in points {
        out.push_str(&format!(
            "{},{},{},{}\n",
            fmt_float(p.param),
            fmt_float(p.ratio),
            fmt_float(p.target),
            fmt_float(p.gap),
        ));
    }
    out
}
