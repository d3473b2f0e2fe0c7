//! Rendering of classification rows as json, csv or a text table.

use std::fmt::Write;

use mincodes::classify::{ClassRow, Classification};
use mincodes::feasibility::FeasibilityStatus;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Serialize)]
pub struct Row {
    pub d_structure: String,
    pub generators: String,
    pub feasible: &'static str,
    pub s: Option<usize>,
    pub r: Option<usize>,
    pub s_prime: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub face_dim: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

impl From<&ClassRow> for Row {
    fn from(c: &ClassRow) -> Self {
        let (feasible, reason) = match &c.status {
            FeasibilityStatus::Feasible => ("true", None),
            FeasibilityStatus::Infeasible => ("false", None),
            FeasibilityStatus::Inconclusive { reason } => ("inconclusive", Some(reason.clone())),
        };
        let inv = c.invariants.as_ref();
        Row {
            d_structure: c.d_structure.to_string(),
            generators: c.code.generators_string(),
            feasible,
            s: inv.map(|i| i.s),
            r: inv.map(|i| i.r),
            s_prime: inv.map(|i| i.s_prime),
            face_dim: inv.map(|i| i.face_dim),
            reason,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct Block {
    pub n: usize,
    pub d_structure: String,
    pub candidates_before_filter: usize,
    pub candidates_after_filter: usize,
    pub classes: usize,
    pub rows: Vec<Row>,
}

impl From<&Classification> for Block {
    fn from(c: &Classification) -> Self {
        Block {
            n: c.n,
            d_structure: c.d_structure.to_string(),
            candidates_before_filter: c.stats.candidates_before_filter,
            candidates_after_filter: c.stats.candidates_after_filter,
            classes: c.stats.classes,
            rows: c.rows.iter().map(Row::from).collect(),
        }
    }
}

fn opt(x: Option<usize>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

pub fn csv_rows(rows: &[&Row]) -> String {
    let mut out = String::from("d_structure,generators,feasible,s,r,s_prime\n");
    for r in rows {
        writeln!(out, "{},\"{}\",{},{},{},{}", r.d_structure, r.generators, r.feasible, opt(r.s), opt(r.r), opt(r.s_prime)).unwrap();
    }
    out
}

pub fn text_rows(rows: &[&Row]) -> String {
    let w = rows.iter().map(|r| r.generators.len()).max().unwrap_or(10).max(10);
    let mut out = format!("{:<8} {:<w$} {:<12} {:>5} {:>4} {:>4}\n", "type", "generators", "feasible", "s", "r", "s'");
    for r in rows {
        write!(out, "{:<8} {:<w$} {:<12} {:>5} {:>4} {:>4}", r.d_structure, r.generators, r.feasible, opt(r.s), opt(r.r), opt(r.s_prime))
            .unwrap();
        if let Some(reason) = &r.reason {
            write!(out, "  ({reason})").unwrap();
        }
        out.push('\n');
    }
    out
}

pub fn render_blocks(blocks: &[Block], format: Format) -> String {
    match format {
        Format::Json => serde_json::to_string_pretty(blocks).unwrap() + "\n",
        Format::Csv => csv_rows(&blocks.iter().flat_map(|b| &b.rows).collect::<Vec<_>>()),
        Format::Text => {
            let mut out = String::new();
            for b in blocks {
                writeln!(
                    out,
                    "n = {}, type {}: {} candidates, {} after filter, {} classes",
                    b.n, b.d_structure, b.candidates_before_filter, b.candidates_after_filter, b.classes
                )
                .unwrap();
                out.push_str(&text_rows(&b.rows.iter().collect::<Vec<_>>()));
                out.push('\n');
            }
            out
        }
    }
}
