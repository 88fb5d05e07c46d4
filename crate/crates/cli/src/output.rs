//! Report rendering: 6 significant digits in tables, 12 in JSON and CSV.

use std::fmt::Write as _;

use clap::ValueEnum;
use serde_json::{json, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Json,
    Csv,
}

pub const TABLE_DIGITS: usize = 6;
pub const DATA_DIGITS: usize = 12;

fn trim_zeros(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

/// `v` rounded to `sig` significant digits, printed like C's `%g`.
pub fn fmt_sig(v: f64, sig: usize) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return v.to_string();
    }
    let sci = format!("{:.*e}", sig - 1, v);
    let (mant, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= sig as i32 {
        format!("{}e{exp}", trim_zeros(mant))
    } else {
        trim_zeros(&format!("{:.*}", (sig as i32 - 1 - exp) as usize, v))
    }
}

/// JSON number rounded to [`DATA_DIGITS`] significant digits.
pub fn num(v: f64) -> Value {
    json!(fmt_sig(v, DATA_DIGITS).parse::<f64>().unwrap_or(v))
}

fn nums(v: &[f64]) -> Value {
    Value::Array(v.iter().map(|&x| num(x)).collect())
}

#[derive(Debug, Clone)]
pub struct Row {
    pub x: Vec<f64>,
    pub contributions: Vec<f64>,
    pub total: f64,
    pub residual: f64,
    pub standard_error: Option<Vec<f64>>,
    /// Independent reference values (e.g. a closed form), shown alongside.
    pub reference: Option<Vec<f64>>,
}

#[derive(Debug, Clone)]
pub struct Report {
    pub method: String,
    pub d: usize,
    pub rows: Vec<Row>,
    pub notes: Vec<(String, Value)>,
}

impl Report {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Table => self.table(),
            Format::Json => self.json(),
            Format::Csv => self.csv(),
        }
    }

    fn has_se(&self) -> bool {
        self.rows.iter().any(|r| r.standard_error.is_some())
    }

    fn has_reference(&self) -> bool {
        self.rows.iter().any(|r| r.reference.is_some())
    }

    fn table(&self) -> String {
        let g = |v: f64| fmt_sig(v, TABLE_DIGITS);
        let mut out = format!("method: {}\n", self.method);
        for (k, v) in &self.notes {
            let _ = writeln!(out, "{k}: {v}");
        }
        let mut header: Vec<String> = vec!["x".into()];
        header.extend((1..=self.d).map(|i| format!("G{i}")));
        header.push("F(x)".into());
        header.push("residual".into());
        if self.has_se() {
            header.extend((1..=self.d).map(|i| format!("se{i}")));
        }
        if self.has_reference() {
            header.extend((1..=self.d).map(|i| format!("ref{i}")));
        }
        let mut lines = vec![header];
        for r in &self.rows {
            let xs: Vec<String> = r.x.iter().map(|&c| g(c)).collect();
            let mut line = vec![format!("({})", xs.join(", "))];
            line.extend(r.contributions.iter().map(|&c| g(c)));
            line.push(g(r.total));
            line.push(g(r.residual));
            if let Some(se) = &r.standard_error {
                line.extend(se.iter().map(|&c| g(c)));
            }
            if let Some(re) = &r.reference {
                line.extend(re.iter().map(|&c| g(c)));
            }
            lines.push(line);
        }
        let cols = lines[0].len();
        let widths: Vec<usize> = (0..cols)
            .map(|c| lines.iter().filter_map(|l| l.get(c)).map(|s| s.chars().count()).max().unwrap_or(0))
            .collect();
        for l in &lines {
            let cells: Vec<String> = l
                .iter()
                .enumerate()
                .map(|(c, s)| {
                    let pad = widths[c] - s.chars().count();
                    if c == 0 {
                        format!("{s}{}", " ".repeat(pad))
                    } else {
                        format!("{}{s}", " ".repeat(pad))
                    }
                })
                .collect();
            out.push_str(cells.join("  ").trim_end());
            out.push('\n');
        }
        out
    }

    fn json(&self) -> String {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| {
                let mut o = json!({
                    "x": nums(&r.x),
                    "contributions": nums(&r.contributions),
                    "total": num(r.total),
                    "residual": num(r.residual),
                });
                if let Some(se) = &r.standard_error {
                    o["standard_error"] = nums(se);
                }
                if let Some(re) = &r.reference {
                    o["reference"] = nums(re);
                }
                o
            })
            .collect();
        let mut o = json!({ "method": self.method, "d": self.d });
        for (k, v) in &self.notes {
            o[k] = v.clone();
        }
        o["results"] = Value::Array(rows);
        let mut s = serde_json::to_string_pretty(&o).expect("report serializes");
        s.push('\n');
        s
    }

    fn csv(&self) -> String {
        let g = |v: f64| fmt_sig(v, DATA_DIGITS);
        let mut header: Vec<String> = (1..=self.d).map(|i| format!("x{i}")).collect();
        header.extend((1..=self.d).map(|i| format!("G{i}")));
        header.push("total".into());
        header.push("residual".into());
        if self.has_se() {
            header.extend((1..=self.d).map(|i| format!("se{i}")));
        }
        if self.has_reference() {
            header.extend((1..=self.d).map(|i| format!("ref{i}")));
        }
        let mut out = header.join(",");
        out.push('\n');
        for r in &self.rows {
            let mut cells: Vec<String> = r.x.iter().map(|&c| g(c)).collect();
            cells.extend(r.contributions.iter().map(|&c| g(c)));
            cells.push(g(r.total));
            cells.push(g(r.residual));
            if let Some(se) = &r.standard_error {
                cells.extend(se.iter().map(|&c| g(c)));
            }
            if let Some(re) = &r.reference {
                cells.extend(re.iter().map(|&c| g(c)));
            }
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}
