//! Table-2 style per-day report: `date,phi_disjoint,phi_joint,p_disjoint,p_joint,category`.

use std::fmt::Write as _;

use cojump::{Category, StatReport};

use crate::analyze::{DayOutcome, DayResult};

pub const TABLE2_HEADER: &str = "date,phi_disjoint,phi_joint,p_disjoint,p_joint,category";

#[derive(Debug, Clone, PartialEq)]
pub struct Table2Row {
    pub date: String,
    pub phi_disjoint: f64,
    pub phi_joint: f64,
    pub p_disjoint: f64,
    pub p_joint: f64,
    pub category: Category,
}

impl Table2Row {
    /// Row with the category taken from the p-values at `level`.
    pub fn from_p_values(date: &str, phi_disjoint: f64, phi_joint: f64, p_disjoint: f64, p_joint: f64, level: f64) -> Self {
        Self {
            date: date.into(),
            phi_disjoint,
            phi_joint,
            p_disjoint,
            p_joint,
            category: Category::from_p_values(p_disjoint, p_joint, level),
        }
    }

    pub fn from_report(date: &str, report: &StatReport<f64>) -> Option<Self> {
        Some(Self {
            date: date.into(),
            phi_disjoint: report.phi_disjoint?,
            phi_joint: report.phi_joint?,
            p_disjoint: report.disjoint.p_value?,
            p_joint: report.joint.p_value?,
            category: report.category?,
        })
    }
}

pub fn rows_from_results(results: &[DayResult]) -> Vec<Table2Row> {
    results
        .iter()
        .filter_map(|r| match &r.outcome {
            DayOutcome::Reported(rep) => Table2Row::from_report(&r.label, rep),
            DayOutcome::Skipped { .. } => None,
        })
        .collect()
}

pub fn format_table2(rows: &[Table2Row]) -> String {
    let mut out = format!("{TABLE2_HEADER}\n");
    for r in rows {
        writeln!(
            out,
            "{},{:.4},{:.4},{:.4},{:.4},{}",
            r.date,
            r.phi_disjoint,
            r.phi_joint,
            r.p_disjoint,
            r.p_joint,
            r.category.number()
        )
        .unwrap();
    }
    out
}

pub fn format_skipped(results: &[DayResult]) -> String {
    let mut out = String::from("date,reason,detail\n");
    for r in results {
        if let DayOutcome::Skipped { reason, detail } = &r.outcome {
            writeln!(out, "{},{},\"{}\"", r.label, reason.name(), detail.replace('"', "'")).unwrap();
        }
    }
    out
}

/// Number of rows in categories 1 to 4.
pub fn category_counts(rows: &[Table2Row]) -> [usize; 4] {
    let mut c = [0; 4];
    for r in rows {
        c[r.category.number() as usize - 1] += 1;
    }
    c
}
