//! Rendering of reports as JSON, CSV, or aligned text.
//!
//! Output is deterministic: struct fields serialize in declaration order and
//! every number is an exact string.

use std::fmt::Write as _;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::identities::{GridReport, VerificationReport};
use crate::padic::ConvergenceReport;
use crate::quotients::ConsistencyReport;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Json,
    Csv,
    Pretty,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            "pretty" => Ok(Format::Pretty),
            _ => Err(Error::Parse(format!("unknown format {s:?}; expected json, csv or pretty"))),
        }
    }
}

/// Anything the front end prints.
pub trait Render: Serialize {
    fn header(&self) -> Vec<String>;
    fn rows(&self) -> Vec<Vec<String>>;

    fn pretty(&self) -> String {
        table_text(&self.header(), &self.rows())
    }
}

pub fn render<T: Render>(x: &T, format: Format) -> Result<String> {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(x).map_err(|e| Error::Parse(e.to_string()))?;
            s.push('\n');
            Ok(s)
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let io = |e: csv::Error| Error::Parse(e.to_string());
            w.write_record(x.header()).map_err(io)?;
            for row in x.rows() {
                w.write_record(row).map_err(io)?;
            }
            let bytes = w.into_inner().map_err(|e| Error::Parse(e.to_string()))?;
            Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
        }
        Format::Pretty => Ok(x.pretty()),
    }
}

fn table_text(header: &[String], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for row in rows {
        for (i, c) in row.iter().enumerate() {
            if i < widths.len() {
                widths[i] = widths[i].max(c.chars().count());
            }
        }
    }
    let mut out = String::new();
    let line = |out: &mut String, cells: &[String]| {
        let mut s = String::new();
        for (i, c) in cells.iter().enumerate() {
            let pad = widths.get(i).copied().unwrap_or(0).saturating_sub(c.chars().count());
            s.push_str(c);
            if i + 1 < cells.len() {
                s.push_str(&" ".repeat(pad + 2));
            }
        }
        let _ = writeln!(out, "{}", s.trim_end());
    };
    line(&mut out, header);
    for row in rows {
        line(&mut out, row);
    }
    out
}

fn strings(xs: &[&str]) -> Vec<String> {
    xs.iter().map(|s| s.to_string()).collect()
}

/// A plain table with an echo of the parameters that produced it.
#[derive(Clone, Debug, Serialize)]
pub struct Listing {
    pub command: String,
    pub parameters: Vec<(String, String)>,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
    /// Structured form used for JSON output.
    pub data: serde_json::Value,
}

impl Render for Listing {
    fn header(&self) -> Vec<String> {
        self.header.clone()
    }

    fn rows(&self) -> Vec<Vec<String>> {
        self.rows.clone()
    }

    fn pretty(&self) -> String {
        let mut out = String::new();
        let params: Vec<String> = self.parameters.iter().map(|(k, v)| format!("{k}={v}")).collect();
        let _ = writeln!(out, "{} {}", self.command, params.join(" "));
        out.push_str(&table_text(&self.header, &self.rows));
        out
    }
}

impl Render for VerificationReport {
    fn header(&self) -> Vec<String> {
        strings(&["instance", "mode", "side", "weight", "n", "values"])
    }

    fn rows(&self) -> Vec<Vec<String>> {
        let inst = self.instance.to_string();
        let mut rows = Vec::new();
        for s in &self.sides {
            for (n, vals) in s.values.iter().enumerate() {
                let v: Vec<String> = vals.iter().map(|x| x.to_string()).collect();
                rows.push(vec![
                    inst.clone(),
                    self.mode.to_string(),
                    s.label.clone(),
                    s.weight.to_string(),
                    n.to_string(),
                    v.join("; "),
                ]);
            }
        }
        let verdict = if self.pass { "pass".to_string() } else { "fail".to_string() };
        rows.push(vec![inst, self.mode.to_string(), "summary".into(), String::new(), String::new(), verdict]);
        rows
    }

    fn pretty(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{} [{}]", self.instance, self.mode);
        for s in &self.sides {
            let _ = writeln!(out, "  {} (weight {})", s.label, s.weight);
            for (n, vals) in s.values.iter().enumerate() {
                let v: Vec<String> = vals.iter().map(|x| x.to_string()).collect();
                let _ = writeln!(out, "    n={n}: {}", v.join("; "));
            }
        }
        for o in &self.orbits {
            let _ = writeln!(out, "  orbit {} {{{}}}: {}", o.weight, o.sides.join(", "), if o.pass { "equal" } else { "differ" });
        }
        match &self.witness {
            None => {
                let _ = writeln!(out, "pass");
            }
            Some(w) => {
                let y: Vec<String> = w.y.iter().map(|q| q.to_string()).collect();
                let _ = writeln!(
                    out,
                    "fail at n={} y=({}): {} = {} but {} = {}",
                    w.n,
                    y.join(", "),
                    w.sides[0],
                    w.values[0],
                    w.sides[1],
                    w.values[1]
                );
            }
        }
        out
    }
}

impl Render for GridReport {
    fn header(&self) -> Vec<String> {
        strings(&["theorem", "mode", "instances", "passed", "failed", "skipped"])
    }

    fn rows(&self) -> Vec<Vec<String>> {
        let mut rows: Vec<Vec<String>> = self
            .summary
            .iter()
            .map(|s| {
                vec![
                    s.theorem.to_string(),
                    s.mode.to_string(),
                    s.tally.instances.to_string(),
                    s.tally.passed.to_string(),
                    s.tally.failed.to_string(),
                    s.skipped.to_string(),
                ]
            })
            .collect();
        let total = |f: fn(&crate::identities::TheoremSummary) -> usize| self.summary.iter().map(f).sum::<usize>().to_string();
        rows.push(vec![
            "total".into(),
            String::new(),
            total(|s| s.tally.instances),
            total(|s| s.tally.passed),
            total(|s| s.tally.failed),
            total(|s| s.skipped),
        ]);
        rows
    }

    fn pretty(&self) -> String {
        let mut out = table_text(&self.header(), &self.rows());
        for f in self.failures.iter().take(20) {
            let why = match (&f.witness, &f.error) {
                (Some(w), _) => format!("n={} {} vs {}", w.n, w.sides[0], w.sides[1]),
                (None, Some(e)) => e.clone(),
                _ => String::new(),
            };
            let _ = writeln!(out, "fail [{}] {}: {why}", f.mode, f.instance);
        }
        if self.failures.len() > 20 {
            let _ = writeln!(out, "… {} more failures", self.failures.len() - 20);
        }
        out
    }
}

impl Render for ConsistencyReport {
    fn header(&self) -> Vec<String> {
        strings(&["type", "form", "weight", "pass", "n", "expansion", "weighted_closed_form"])
    }

    fn rows(&self) -> Vec<Vec<String>> {
        self.forms
            .iter()
            .map(|f| {
                let (n, a, b) = match &f.mismatch {
                    Some(m) => (m.n.to_string(), m.expansion.to_string(), m.weighted_closed_form.to_string()),
                    None => Default::default(),
                };
                vec![
                    self.qtype.to_string(),
                    f.form.clone(),
                    f.weight.to_string(),
                    f.mismatch.is_none().to_string(),
                    n,
                    a,
                    b,
                ]
            })
            .collect()
    }
}

impl Render for ConvergenceReport {
    fn header(&self) -> Vec<String> {
        strings(&["level", "valuation", "exact"])
    }

    fn rows(&self) -> Vec<Vec<String>> {
        self.rows
            .iter()
            .map(|r| vec![r.level.to_string(), r.valuation.to_string(), r.exact.to_string()])
            .collect()
    }

    fn pretty(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "p={} M={} r={} j={} d={} chi={:?} n={} target={}",
            self.p, self.precision, self.r, self.j, self.d, self.chi, self.n, self.target
        );
        out.push_str(&table_text(&self.header(), &self.rows()));
        let _ = writeln!(out, "{}", if self.pass { "pass" } else { "fail" });
        out
    }
}
