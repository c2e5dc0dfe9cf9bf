//! CSV tables that keep every cell's original bytes.
//!
//! Cells are stored exactly as they appear in the file (quotes included), so
//! columns that are not masked are written back byte for byte. Only numeric
//! columns replaced by a masker are re-rendered.

use std::fs;
use std::path::Path;

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Column {
    /// Header cell as written in the file.
    pub raw_name: String,
    pub name: String,
    pub cells: Vec<String>,
}

/// Named columns of equal length.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Dataset {
    columns: Vec<Column>,
    rows: usize,
}

/// Strip RFC 4180 quoting from a raw cell.
pub fn unquote(raw: &str) -> String {
    match raw.strip_prefix('"').and_then(|r| r.strip_suffix('"')) {
        Some(inner) => inner.replace("\"\"", "\""),
        None => raw.to_string(),
    }
}

fn quote_if_needed(value: &str) -> String {
    if value.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", value.replace('"', "\"\""))
    } else {
        value.to_string()
    }
}

/// Split CSV text into records of raw cells. Line breaks inside quoted cells
/// are kept; blank lines are skipped.
fn split_records(text: &str) -> Result<Vec<Vec<String>>, CliError> {
    let mut records = Vec::new();
    let mut record: Vec<String> = Vec::new();
    let mut cell = String::new();
    let mut in_quotes = false;
    let mut chars = text.chars().peekable();

    let finish_record = |record: &mut Vec<String>, cell: &mut String, records: &mut Vec<Vec<String>>| {
        record.push(std::mem::take(cell));
        let r = std::mem::take(record);
        if !(r.len() == 1 && r[0].is_empty()) {
            records.push(r);
        }
    };

    while let Some(c) = chars.next() {
        if in_quotes {
            cell.push(c);
            if c == '"' {
                if chars.peek() == Some(&'"') {
                    cell.push(chars.next().unwrap());
                } else {
                    in_quotes = false;
                }
            }
            continue;
        }
        match c {
            '"' => {
                in_quotes = true;
                cell.push(c);
            }
            ',' => record.push(std::mem::take(&mut cell)),
            '\r' if chars.peek() == Some(&'\n') => {}
            '\n' => finish_record(&mut record, &mut cell, &mut records),
            _ => cell.push(c),
        }
    }
    if in_quotes {
        return Err(CliError::MalformedRecord {
            row: records.len() + 1,
            reason: "unterminated quoted cell".into(),
        });
    }
    if !cell.is_empty() || !record.is_empty() {
        finish_record(&mut record, &mut cell, &mut records);
    }
    Ok(records)
}

impl Dataset {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut records = split_records(text)?.into_iter();
        let header = records
            .next()
            .ok_or_else(|| CliError::MalformedHeader("file has no header row".into()))?;
        let mut columns: Vec<Column> = Vec::with_capacity(header.len());
        for raw_name in header {
            let name = unquote(&raw_name);
            if name.trim().is_empty() {
                return Err(CliError::MalformedHeader("empty column name".into()));
            }
            if columns.iter().any(|c| c.name == name) {
                return Err(CliError::MalformedHeader(format!("duplicate column {name:?}")));
            }
            columns.push(Column {
                raw_name,
                name,
                cells: Vec::new(),
            });
        }
        let mut rows = 0;
        for (i, record) in records.enumerate() {
            if record.len() != columns.len() {
                return Err(CliError::RaggedRows {
                    row: i + 2,
                    expected: columns.len(),
                    found: record.len(),
                });
            }
            for (column, cell) in columns.iter_mut().zip(record) {
                column.cells.push(cell);
            }
            rows += 1;
        }
        Ok(Self { columns, rows })
    }

    /// Empty table with the given column names.
    pub fn with_header(names: &[&str]) -> Self {
        Self {
            columns: names
                .iter()
                .map(|n| Column {
                    raw_name: quote_if_needed(n),
                    name: n.to_string(),
                    cells: Vec::new(),
                })
                .collect(),
            rows: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.rows
    }

    pub fn is_empty(&self) -> bool {
        self.rows == 0
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn column_names(&self) -> Vec<&str> {
        self.columns.iter().map(|c| c.name.as_str()).collect()
    }

    fn index_of(&self, name: &str) -> Result<usize, CliError> {
        self.columns
            .iter()
            .position(|c| c.name == name)
            .ok_or_else(|| CliError::UnknownColumn(name.to_string()))
    }

    /// Parse a column as finite reals. Rows are reported 1-based counting
    /// the header as row 1.
    pub fn numeric_column(&self, name: &str) -> Result<Vec<f64>, CliError> {
        let column = &self.columns[self.index_of(name)?];
        column
            .cells
            .iter()
            .enumerate()
            .map(|(i, raw)| {
                let text = unquote(raw);
                text.trim()
                    .parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| CliError::Parse {
                        row: i + 2,
                        column: name.to_string(),
                        value: text.clone(),
                    })
            })
            .collect()
    }

    pub fn replace_numeric_column(&mut self, name: &str, values: &[f64]) -> Result<(), CliError> {
        let idx = self.index_of(name)?;
        if values.len() != self.rows {
            return Err(CliError::Config(format!(
                "column {name:?} needs {} values, got {}",
                self.rows,
                values.len()
            )));
        }
        self.columns[idx].cells = values.iter().map(|v| format_float(*v)).collect();
        Ok(())
    }

    /// Append a row of already-rendered cells.
    pub fn push_row(&mut self, cells: Vec<String>) -> Result<(), CliError> {
        if cells.len() != self.columns.len() {
            return Err(CliError::RaggedRows {
                row: self.rows + 2,
                expected: self.columns.len(),
                found: cells.len(),
            });
        }
        for (column, cell) in self.columns.iter_mut().zip(cells) {
            column.cells.push(quote_if_needed(&cell));
        }
        self.rows += 1;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut out = String::new();
        let header: Vec<&str> = self.columns.iter().map(|c| c.raw_name.as_str()).collect();
        out.push_str(&header.join(","));
        out.push('\n');
        for row in 0..self.rows {
            for (j, column) in self.columns.iter().enumerate() {
                if j > 0 {
                    out.push(',');
                }
                out.push_str(&column.cells[row]);
            }
            out.push('\n');
        }
        out
    }
}

pub fn load_csv(path: &Path) -> Result<Dataset, CliError> {
    let text = fs::read_to_string(path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => CliError::FileNotFound(path.to_path_buf()),
        _ => CliError::Io(format!("{}: {e}", path.display())),
    })?;
    Dataset::parse(&text)
}

pub fn save_csv(dataset: &Dataset, path: &Path) -> Result<(), CliError> {
    crate::output::write_atomic(path, dataset.to_csv_string().as_bytes())
}

/// Render with 17 significant digits, `%.17g` style: fixed notation for
/// decimal exponents in `[-4, 16]`, scientific otherwise, trailing zeros
/// dropped. Every finite `f64` parses back to the same bits.
pub fn format_float(v: f64) -> String {
    if v == 0.0 {
        return if v.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    if !v.is_finite() {
        return v.to_string();
    }
    let sci = format!("{:.16e}", v);
    let (mantissa, exp) = sci.split_once('e').expect("exponent in {:e} output");
    let exp: i32 = exp.parse().expect("integer exponent");
    let negative = mantissa.starts_with('-');
    let digits: String = mantissa.chars().filter(|c| c.is_ascii_digit()).collect();
    let sign = if negative { "-" } else { "" };

    if !(-4..17).contains(&exp) {
        let mut m = format!("{}.{}", &digits[..1], &digits[1..]);
        trim_fraction(&mut m);
        return format!("{sign}{m}e{exp}");
    }
    let mut body = if exp < 0 {
        format!("0.{}{}", "0".repeat((-exp - 1) as usize), digits)
    } else {
        let point = exp as usize + 1;
        format!("{}.{}", &digits[..point], &digits[point..])
    };
    trim_fraction(&mut body);
    format!("{sign}{body}")
}

fn trim_fraction(s: &mut String) {
    if s.contains('.') {
        while s.ends_with('0') {
            s.pop();
        }
        if s.ends_with('.') {
            s.pop();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_parse() {
        let d = Dataset::parse("id,income\n1,100\n2,200").unwrap();
        assert_eq!(d.len(), 2);
        assert_eq!(d.numeric_column("income").unwrap(), vec![100.0, 200.0]);
        assert_eq!(d.column_names(), vec!["id", "income"]);
    }

    #[test]
    fn parse_error_reports_row() {
        let d = Dataset::parse("id,income\n1,abc\n").unwrap();
        match d.numeric_column("income").unwrap_err() {
            CliError::Parse { row, column, value } => {
                assert_eq!((row, column.as_str(), value.as_str()), (2, "income", "abc"));
            }
            other => panic!("unexpected {other:?}"),
        }
        let d = Dataset::parse("a\n1\nNaN\n").unwrap();
        assert!(matches!(d.numeric_column("a"), Err(CliError::Parse { row: 3, .. })));
        let d = Dataset::parse("a\n1\n\"\"\n").unwrap();
        assert!(matches!(d.numeric_column("a"), Err(CliError::Parse { row: 3, .. })));
    }

    #[test]
    fn header_and_shape_errors() {
        assert!(matches!(Dataset::parse(""), Err(CliError::MalformedHeader(_))));
        assert!(matches!(Dataset::parse("a,a\n1,2\n"), Err(CliError::MalformedHeader(_))));
        assert!(matches!(Dataset::parse("a,,b\n1,2,3\n"), Err(CliError::MalformedHeader(_))));
        assert!(matches!(
            Dataset::parse("a,b\n1,2\n3\n"),
            Err(CliError::RaggedRows { row: 3, expected: 2, found: 1 })
        ));
        assert!(matches!(
            Dataset::parse("a,b\n1,\"open\n"),
            Err(CliError::MalformedRecord { .. })
        ));
        let d = Dataset::parse("a\n1\n").unwrap();
        assert!(matches!(d.numeric_column("b"), Err(CliError::UnknownColumn(_))));
    }

    #[test]
    fn quoted_cells_survive_byte_for_byte() {
        let text = "id,note,\"v\"\r\n1,\"he said \"\"hi\"\", twice\",1.50\r\n2,\"multi\nline\",\"2\"\n";
        let d = Dataset::parse(text).unwrap();
        assert_eq!(d.len(), 2);
        assert_eq!(d.numeric_column("v").unwrap(), vec![1.5, 2.0]);
        let out = d.to_csv_string();
        assert_eq!(
            out,
            "id,note,\"v\"\n1,\"he said \"\"hi\"\", twice\",1.50\n2,\"multi\nline\",\"2\"\n"
        );
        assert_eq!(Dataset::parse(&out).unwrap(), d);
    }

    #[test]
    fn replaced_column_round_trips() {
        let mut d = Dataset::parse("id,x\n1,1\n2,2\n3,3\n").unwrap();
        let values = [0.1, 123456.78901234567, 1e-300];
        d.replace_numeric_column("x", &values).unwrap();
        let back = Dataset::parse(&d.to_csv_string()).unwrap();
        assert_eq!(back.numeric_column("x").unwrap(), values.to_vec());
        assert_eq!(back, d);
    }

    #[test]
    fn empty_dataset_writes_header_only() {
        let d = Dataset::with_header(&["id", "income"]);
        assert_eq!(d.to_csv_string(), "id,income\n");
        let d = Dataset::parse("id,income\n").unwrap();
        assert!(d.is_empty());
        assert_eq!(d.to_csv_string(), "id,income\n");
    }

    #[test]
    fn float_rendering() {
        assert_eq!(format_float(100.0), "100");
        assert_eq!(format_float(0.1), "0.10000000000000001");
        assert_eq!(format_float(-2.5), "-2.5");
        assert_eq!(format_float(1e-7), "9.9999999999999995e-8");
        assert_eq!(format_float(1e20), "1e20");
        assert_eq!(format_float(0.0), "0");
        assert_eq!(format_float(12345.0), "12345");
        assert_eq!(format_float(0.000123), "0.00012300000000000001");
    }
}
