use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use super::config::OutputFormat;
use super::run::Report;
use crate::model::ConnectionKind;
use crate::submanifold::{SuiteId, Verdict};

/// Renders a report. JSON keeps struct field order, so equal reports give
/// byte-identical output.
pub fn emit_report(r: &Report, format: OutputFormat) -> String {
    match format {
        OutputFormat::Json => {
            let mut s = serde_json::to_string_pretty(r).expect("report serializes");
            s.push('\n');
            s
        }
        OutputFormat::Markdown => markdown(r),
    }
}

pub fn parse_json_report(text: &str) -> Result<Report, serde_json::Error> {
    serde_json::from_str(text)
}

pub fn write_report(r: &Report, format: OutputFormat, path: &Path) -> std::io::Result<()> {
    std::fs::write(path, emit_report(r, format))
}

fn sci(x: f64) -> String {
    format!("{x:.3e}")
}

fn markdown(r: &Report) -> String {
    let mut out = String::new();
    let s = &r.summary;
    let _ = writeln!(out, "# Verification report\n");
    let _ = writeln!(out, "schema version {}\n", r.schema_version);
    let _ = writeln!(out, "| total | passed | failed | skipped | expected failures | errata | inconclusive |");
    let _ = writeln!(out, "|---|---|---|---|---|---|---|");
    let _ = writeln!(
        out,
        "| {} | {} | {} | {} | {} | {} | {} |\n",
        s.total, s.passed, s.failed, s.skipped, s.expected_failures, s.errata, s.inconclusive
    );

    // worst verdict per (connection, suite title)
    let mut verdicts: BTreeMap<(ConnectionKind, SuiteId, String), Verdict> = BTreeMap::new();
    for x in &r.suites {
        let slot = verdicts
            .entry((x.kind, x.suite, x.title()))
            .or_insert(Verdict::Pass);
        *slot = slot.merge(x.verdict);
    }
    for d in &r.derivations {
        verdicts.insert(
            (d.kind, SuiteId::SymbolicDerivation, SuiteId::SymbolicDerivation.title(None)),
            d.verdict,
        );
    }
    let _ = writeln!(out, "## Verdicts\n");
    for ((kind, _, title), v) in &verdicts {
        let _ = writeln!(out, "- {} / {}: {}", kind.name(), title, v.label());
    }
    let _ = writeln!(out);

    let mut groups: BTreeMap<(SuiteId, String), Vec<&crate::submanifold::SuiteReport>> = BTreeMap::new();
    for x in &r.suites {
        groups.entry((x.suite, x.title())).or_default().push(x);
    }
    for ((_, title), rows) in &groups {
        let _ = writeln!(out, "## {title}\n");
        let _ = writeln!(
            out,
            "| connection | n | seed | f1, f2, f3 | samples | max residual | ratio | verdict | detail |"
        );
        let _ = writeln!(out, "|---|---|---|---|---|---|---|---|---|");
        for x in rows {
            let mut detail = Vec::new();
            if let Some(w) = &x.witness {
                detail.push(format!(
                    "witness {} (|.| = {}, {} trials)",
                    if w.found { "found" } else { "none" },
                    sci(w.magnitude),
                    w.trials
                ));
            }
            if let Some(v) = x.secondary_residual {
                detail.push(format!("whole vector {}", sci(v)));
            }
            if let Some(e) = &x.erratum {
                detail.push(e.clone());
            }
            if let Some(n) = &x.note {
                detail.push(n.clone());
            }
            let _ = writeln!(
                out,
                "| {} | {} | {} | {} | {} | {} | {} | {} | {} |",
                x.kind.name(),
                x.n,
                x.seed.map_or("-".to_string(), |s| s.to_string()),
                x.coefficients,
                x.samples,
                sci(x.max_residual),
                sci(x.max_ratio),
                x.verdict.label(),
                detail.join("; ")
            );
        }
        let _ = writeln!(out);
    }

    if !r.derivations.is_empty() {
        let _ = writeln!(out, "## curvature derivation\n");
        for d in &r.derivations {
            let _ = writeln!(out, "### {}\n", d.kind.name());
            let _ = writeln!(out, "- difference tensor: `{}`", d.difference_tensor);
            let _ = writeln!(out, "- derived: `{}`", d.derived);
            let _ = writeln!(out, "- stated: `{}`", d.stated);
            let _ = writeln!(out, "- equal: {}, residual: `{}`", d.equal, d.residual);
            let _ = writeln!(
                out,
                "- numeric cross-check: {} samples, worst ratio {}",
                d.samples,
                sci(d.max_ratio)
            );
            let _ = writeln!(out, "- verdict: {}\n", d.verdict.label());
        }
    }

    if !r.errata.is_empty() {
        let _ = writeln!(out, "## errata\n");
        for e in &r.errata {
            let _ = writeln!(out, "### {}\n", e.id);
            let _ = writeln!(out, "- claim: {}", e.claim);
            let _ = writeln!(out, "- finding: {}", e.finding);
            let _ = writeln!(out, "- counterexample: {}\n", e.counterexample);
        }
    }

    if !r.notes.is_empty() {
        let _ = writeln!(out, "## notes\n");
        for n in &r.notes {
            let _ = writeln!(out, "- {n}");
        }
    }
    out
}
