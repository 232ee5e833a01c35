//! Human and machine renderings of obstruction reports.

use arrgate_core::{ObstructionReport, Outcome, Verdict};
use clap::ValueEnum;
use std::fmt::Write as _;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ReportFormat {
    Table,
    Json,
}

pub fn residue_cell(v: &Verdict) -> String {
    v.residue
        .map_or_else(|| "-".to_string(), |r| format!("{}/{}", r.value, r.modulus))
}

pub fn table(report: &ObstructionReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "subject: {}", report.subject());
    let rows: Vec<[String; 4]> = report
        .verdicts()
        .iter()
        .map(|v| {
            let mut detail = v.reason.clone();
            if let Some(w) = &v.witness {
                let _ = write!(detail, " [{w}]");
            }
            [
                v.check.clone(),
                v.outcome.to_string(),
                residue_cell(v),
                detail,
            ]
        })
        .collect();
    let header = ["check", "outcome", "residue", "detail"];
    let mut widths = header.map(str::len);
    for row in &rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.len());
        }
    }
    let line = |cells: [&str; 4]| {
        format!(
            "{:<w0$}  {:<w1$}  {:<w2$}  {}",
            cells[0],
            cells[1],
            cells[2],
            cells[3],
            w0 = widths[0],
            w1 = widths[1],
            w2 = widths[2],
        )
    };
    let _ = writeln!(out, "{}", line(header).trim_end());
    for row in &rows {
        let _ = writeln!(
            out,
            "{}",
            line([&row[0], &row[1], &row[2], &row[3]]).trim_end()
        );
    }
    let _ = writeln!(out, "overall: {}", report.overall());
    out
}

pub fn json(report: &ObstructionReport) -> String {
    let mut text = serde_json::to_string_pretty(report).expect("reports serialize");
    text.push('\n');
    text
}

pub fn render(report: &ObstructionReport, format: ReportFormat) -> String {
    match format {
        ReportFormat::Table => table(report),
        ReportFormat::Json => json(report),
    }
}

/// `pass` dominates for collections of independent candidates.
pub fn any_pass(outcomes: impl IntoIterator<Item = Outcome>) -> Outcome {
    let mut seen_fail = false;
    for o in outcomes {
        match o {
            Outcome::Pass => return Outcome::Pass,
            Outcome::Fail => seen_fail = true,
            Outcome::NotApplicable => {}
        }
    }
    if seen_fail {
        Outcome::Fail
    } else {
        Outcome::NotApplicable
    }
}
