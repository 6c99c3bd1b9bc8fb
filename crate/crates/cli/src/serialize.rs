//! JSON, CSV and text renderings of a report.

use std::fmt::Write as _;

use crate::config::OutputFormat;
use crate::report::{Compared, ReportDocument, Row, RowValues};

/// Significant digits of every CSV number.
pub const SIGNIFICANT_DIGITS: usize = 12;

pub fn serialize(doc: &ReportDocument, format: OutputFormat) -> Vec<u8> {
    match format {
        OutputFormat::Json => {
            let mut out = serde_json::to_vec_pretty(doc).expect("report is serializable");
            out.push(b'\n');
            out
        }
        OutputFormat::Csv => to_csv(&doc.rows),
        OutputFormat::Text => to_text(doc).into_bytes(),
    }
}

pub fn parse_json(bytes: &[u8]) -> serde_json::Result<ReportDocument> {
    serde_json::from_slice(bytes)
}

pub fn format_number(x: f64) -> String {
    format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x)
}

const COMPARED_SUFFIXES: [&str; 3] = ["closed_form", "simulated", "abs_diff"];
const LEADING: [&str; 5] = ["alpha", "beta", "status", "classification", "checks_failed"];
const SETTING_PAIRS: [&str; 4] = ["UU", "UD", "DU", "DD"];
const RESIDUALS: [&str; 8] = [
    "sum_rule_residual",
    "imaginary_residual",
    "coefficient_identity",
    "unitarity",
    "norm",
    "ready_pointer",
    "locality",
    "branch_decomposition",
];

/// Names of the compared triples in column order.
fn compared_names() -> Vec<String> {
    let mut names: Vec<String> = (1..=4).map(|n| format!("item{n}")).collect();
    for s in ["U", "D"] {
        for j in 1..=2 {
            names.push(format!("p{j}_{s}"));
        }
    }
    for s in SETTING_PAIRS {
        for j in 1..=2 {
            for k in 1..=2 {
                names.push(format!("P_{s}_{j}{k}"));
            }
        }
    }
    names.extend(["pseudo_plus", "pseudo_minus", "hardy_joint"].map(String::from));
    names
}

/// Compared triples in the order of [`compared_names`].
fn compared_values(v: &RowValues) -> Vec<Compared> {
    let mut out: Vec<Compared> = v.items.iter().map(|i| i.value).collect();
    out.extend(v.marginals.iter().map(|m| m.value));
    out.extend(v.tables.iter().map(|t| t.value));
    out.extend([v.paradox.pseudo_plus, v.paradox.pseudo_minus, v.paradox.hardy_joint]);
    out
}

fn residual_values(v: &RowValues) -> [f64; 8] {
    let i = &v.invariants;
    [
        v.paradox.sum_rule_residual,
        v.paradox.imaginary_residual,
        i.coefficient_identity,
        i.unitarity,
        i.norm,
        i.ready_pointer,
        i.locality,
        i.branch_decomposition,
    ]
}

pub fn csv_header() -> Vec<String> {
    let mut h: Vec<String> = LEADING.iter().map(|s| s.to_string()).collect();
    for name in compared_names() {
        for suffix in COMPARED_SUFFIXES {
            h.push(format!("{name}_{suffix}"));
        }
    }
    h.extend(RESIDUALS.iter().map(|s| s.to_string()));
    h.push("reason".into());
    h
}

fn csv_record(row: &Row) -> Vec<String> {
    let opt = |x: Option<f64>| x.map(format_number).unwrap_or_default();
    let mut r = vec![
        format_number(row.alpha),
        opt(row.beta),
        serde_json::to_value(row.status).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default(),
        row.values.as_ref().map(|v| v.paradox.classification.clone()).unwrap_or_default(),
        row.failed_checks().to_string(),
    ];
    let triples = compared_names().len();
    match &row.values {
        Some(v) => {
            for c in compared_values(v) {
                r.extend([c.closed_form, c.simulated, c.abs_diff].map(format_number));
            }
            r.extend(residual_values(v).map(format_number));
        }
        None => r.extend(std::iter::repeat_n(String::new(), triples * 3 + RESIDUALS.len())),
    }
    r.push(row.reason.clone().unwrap_or_default());
    r
}

/// Header row, then one row per alpha.
pub fn to_csv(rows: &[Row]) -> Vec<u8> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(csv_header()).expect("in-memory write");
    for row in rows {
        w.write_record(csv_record(row)).expect("in-memory write");
    }
    w.into_inner().expect("in-memory flush")
}

fn short(x: Option<f64>) -> String {
    x.map(|x| format!("{x:.6e}")).unwrap_or_else(|| "-".into())
}

pub fn to_text(doc: &ReportDocument) -> String {
    let mut out = String::new();
    for line in &doc.narrative {
        let _ = writeln!(out, "{line}");
    }
    if !doc.narrative.is_empty() {
        out.push('\n');
    }
    let header = [
        "alpha", "beta", "item1", "item2", "item3", "item4", "p1(D)", "pseudo+", "pseudo-", "joint", "class", "failed",
        "status",
    ];
    let mut table: Vec<Vec<String>> = vec![header.iter().map(|s| s.to_string()).collect()];
    for row in &doc.rows {
        let v = row.values.as_ref();
        let item = |n: usize| short(v.map(|v| v.items[n].value.simulated));
        let p1_d =
            v.and_then(|v| v.marginals.iter().find(|m| m.setting == "D" && m.pointer == 1)).map(|m| m.value.simulated);
        table.push(vec![
            format!("{:.6}", row.alpha),
            row.beta.map(|b| format!("{b:.6}")).unwrap_or_else(|| "-".into()),
            item(0),
            item(1),
            item(2),
            item(3),
            short(p1_d),
            short(v.map(|v| v.paradox.pseudo_plus.simulated)),
            short(v.map(|v| v.paradox.pseudo_minus.simulated)),
            short(v.map(|v| v.paradox.hardy_joint.simulated)),
            v.map(|v| v.paradox.classification.clone()).unwrap_or_else(|| "-".into()),
            row.failed_checks().to_string(),
            match &row.reason {
                Some(r) => format!("degenerate: {r}"),
                None => "ok".into(),
            },
        ]);
    }
    let widths: Vec<usize> =
        (0..header.len()).map(|c| table.iter().map(|r| r[c].chars().count()).max().unwrap_or(0)).collect();
    for r in &table {
        let cells: Vec<String> = r.iter().zip(&widths).map(|(cell, w)| format!("{cell:>w$}")).collect();
        let _ = writeln!(out, "{}", cells.join("  ").trim_end());
    }
    for row in &doc.rows {
        for c in row.checks.iter().filter(|c| !c.passed) {
            let _ = writeln!(out, "FAILED at alpha {}: {} = {:e} > {:e}", row.alpha, c.name, c.value, c.tolerance);
        }
    }
    let s = &doc.summary;
    let _ = writeln!(
        out,
        "\n{} rows, {} checks passed, {} failed, {} degenerate",
        s.rows, s.checks_passed, s.checks_failed, s.degenerate_rows
    );
    out
}
