//! Result tables in csv (metadata as `# key = value` lines) or json-lines
//! (metadata as a leading `{"metadata": {...}}` record). Reals are written
//! with 12 significant digits.

use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    JsonLines,
}

impl Format {
    pub fn parse(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(Format::Csv),
            "json-lines" | "jsonl" => Ok(Format::JsonLines),
            other => Err(format!("unknown format {other:?} (csv or json-lines)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(u64),
    Real(f64),
    Text(String),
    Empty,
}

/// `x` with 12 significant digits in the shortest of fixed or exponent form.
pub fn fmt_real(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-5..12).contains(&exp) {
        return format!("{}e{exp}", trim_zeros(mantissa));
    }
    let fixed = format!("{x:.*}", (11 - exp) as usize);
    trim_zeros(&fixed).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Real(v) => fmt_real(*v),
            Cell::Text(s) if s.contains([',', '"', '\n']) => {
                format!("\"{}\"", s.replace('"', "\"\""))
            }
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Real(v) if v.is_finite() => fmt_real(*v),
            Cell::Real(_) | Cell::Empty => "null".into(),
            Cell::Text(s) => serde_json::Value::from(s.as_str()).to_string(),
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Table {
    pub metadata: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: Vec<String>) -> Self {
        Table {
            columns,
            ..Default::default()
        }
    }

    pub fn meta(&mut self, key: impl Into<String>, value: impl Into<String>) {
        self.metadata.push((key.into(), value.into()));
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn render(&self, format: Format) -> String {
        let mut out = String::new();
        match format {
            Format::Csv => {
                for (k, v) in &self.metadata {
                    let v = v.replace('\n', " ");
                    let _ = writeln!(out, "# {k} = {v}");
                }
                out.push_str(&self.columns.join(","));
                out.push('\n');
                for row in &self.rows {
                    let cells: Vec<String> = row.iter().map(Cell::csv).collect();
                    out.push_str(&cells.join(","));
                    out.push('\n');
                }
            }
            Format::JsonLines => {
                let meta: Vec<String> = self
                    .metadata
                    .iter()
                    .map(|(k, v)| {
                        format!(
                            "{}:{}",
                            serde_json::Value::from(k.as_str()),
                            serde_json::Value::from(v.as_str())
                        )
                    })
                    .collect();
                let _ = writeln!(out, "{{\"metadata\":{{{}}}}}", meta.join(","));
                for row in &self.rows {
                    let fields: Vec<String> = self
                        .columns
                        .iter()
                        .zip(row)
                        .map(|(c, v)| {
                            format!("{}:{}", serde_json::Value::from(c.as_str()), v.json())
                        })
                        .collect();
                    let _ = writeln!(out, "{{{}}}", fields.join(","));
                }
            }
        }
        out
    }
}

/// Write `text` to `path`, or to stdout when `path` is `None` or `-`.
pub fn emit(text: &str, path: Option<&Path>) -> CliResult<()> {
    match path {
        Some(p) if p.as_os_str() != "-" => std::fs::write(p, text).map_err(|e| CliError::io(p, e)),
        _ => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| CliError::io("<stdout>", e))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(fmt_real(0.811278124459), "0.811278124459");
        assert_eq!(fmt_real(1.0 / 3.0), "0.333333333333");
        assert_eq!(fmt_real(2.0 / 3.0), "0.666666666667");
        assert_eq!(fmt_real(1.0), "1");
        assert_eq!(fmt_real(-2.5), "-2.5");
        assert_eq!(fmt_real(123456789012345.0), "1.23456789012e14");
        assert_eq!(fmt_real(1.5e-7), "1.5e-7");
        assert_eq!(fmt_real(0.000123), "0.000123");
        assert_eq!(fmt_real(9.999999999999999), "10");
        assert_eq!(fmt_real(f64::NAN), "nan");
        for x in [std::f64::consts::PI, 1e-300, 6.02e23, -0.1] {
            let back: f64 = fmt_real(x).parse().unwrap();
            assert!((back - x).abs() <= 1e-11 * x.abs());
        }
    }

    #[test]
    fn renders_both_formats() {
        let mut t = Table::new(vec!["N".into(), "mean_bits".into()]);
        t.meta("command", "sweep");
        t.push(vec![Cell::Int(2), Cell::Real(0.5)]);
        t.push(vec![Cell::Int(3), Cell::Real(f64::NAN)]);
        assert_eq!(
            t.render(Format::Csv),
            "# command = sweep\nN,mean_bits\n2,0.5\n3,nan\n"
        );
        assert_eq!(
            t.render(Format::JsonLines),
            "{\"metadata\":{\"command\":\"sweep\"}}\n{\"N\":2,\"mean_bits\":0.5}\n{\"N\":3,\"mean_bits\":null}\n"
        );
    }
}
