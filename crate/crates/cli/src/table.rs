//! Self-describing CSV tables.
//!
//! Layout: a `# cv-triparty v1, subcommand=<id>, params=<k=v;...>` line, the
//! column header, one record per row, then optional `# ` summary lines.

use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use crate::CliError;

pub const FORMAT_TAG: &str = "cv-triparty v1";
pub const SIGNIFICANT_DIGITS: usize = 9;

/// `%.9g`-style formatting: shortest of fixed or exponent notation, trailing
/// zeros removed. `-0` prints as `0`.
pub fn format_number(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent marker");
    let exp: i32 = exp.parse().expect("exponent");
    if exp < -4 || exp >= SIGNIFICANT_DIGITS as i32 {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_zeros(mantissa), exp.abs())
    } else {
        let decimals = (SIGNIFICANT_DIGITS as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub subcommand: String,
    /// Ordered `(key, value)` pairs echoed in the header line.
    pub params: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    /// Trailing comment lines, without the leading `# `.
    pub notes: Vec<String>,
}

impl Table {
    pub fn new(subcommand: &str, columns: &[&str]) -> Self {
        Table {
            subcommand: subcommand.into(),
            params: Vec::new(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn param(&mut self, key: &str, value: impl ToString) {
        self.params.push((key.into(), value.to_string()));
    }

    pub fn param_num(&mut self, key: &str, value: f64) {
        self.param(key, format_number(value));
    }

    pub fn push_row(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[k]).collect())
    }

    pub fn header_line(&self) -> String {
        let params: Vec<String> = self.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
        format!("# {FORMAT_TAG}, subcommand={}, params={}", self.subcommand, params.join(";"))
    }

    pub fn to_csv_string(&self) -> Result<String, CliError> {
        let mut out = String::new();
        writeln!(out, "{}", self.header_line()).expect("write to String");
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|x| format_number(*x)))?;
        }
        let body = w.into_inner().map_err(|e| CliError::Io(e.into_error()))?;
        out.push_str(std::str::from_utf8(&body).expect("CSV body is UTF-8"));
        for note in &self.notes {
            writeln!(out, "# {note}").expect("write to String");
        }
        Ok(out)
    }

    /// Writes to `path`, or to stdout when `path` is `None`.
    pub fn write(&self, path: Option<&Path>) -> Result<(), CliError> {
        let text = self.to_csv_string()?;
        match path {
            Some(p) => std::fs::write(p, text)?,
            None => std::io::stdout().lock().write_all(text.as_bytes())?,
        }
        Ok(())
    }

    /// Reads a table written by [`Table::write`] (or any CSV with a header
    /// row and numeric records; `#` lines are skipped).
    pub fn read(path: &Path) -> Result<Table, CliError> {
        let text = std::fs::read_to_string(path)?;
        let mut subcommand = String::new();
        if let Some(first) = text.lines().next() {
            if let Some(rest) = first.strip_prefix(&format!("# {FORMAT_TAG}, subcommand=")) {
                subcommand = rest.split(',').next().unwrap_or("").to_string();
            }
        }
        let mut reader = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .from_reader(text.as_bytes());
        let columns: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
        if columns.is_empty() || columns.iter().all(|c| c.is_empty()) {
            return Err(CliError::Usage(format!("{}: no columns", path.display())));
        }
        let mut rows = Vec::new();
        for (k, rec) in reader.records().enumerate() {
            let rec = rec?;
            let row = rec
                .iter()
                .map(|s| {
                    s.trim().parse::<f64>().map_err(|_| {
                        CliError::Usage(format!("{}: record {}: not a number: {s:?}", path.display(), k + 1))
                    })
                })
                .collect::<Result<Vec<_>, _>>()?;
            rows.push(row);
        }
        Ok(Table {
            subcommand,
            params: Vec::new(),
            columns,
            rows,
            notes: Vec::new(),
        })
    }
}
