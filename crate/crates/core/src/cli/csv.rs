//! Single-column numeric CSV ingestion.
//!
//! Comma-delimited input goes through the `csv` crate; whitespace-delimited
//! input is split on runs of blanks. An optional header row is detected by a
//! non-numeric field. Blank lines and `#` comments are skipped. Row numbers
//! in errors are 1-based physical line numbers.

use crate::error::{Error, Result};

/// Column selector: 1-based index or header name.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ColumnSel {
    Index(usize),
    Name(String),
}

impl ColumnSel {
    pub fn parse(s: &str) -> Self {
        match s.trim().parse::<usize>() {
            Ok(i) => ColumnSel::Index(i),
            Err(_) => ColumnSel::Name(s.trim().to_string()),
        }
    }
}

type Row = (usize, Vec<String>);

fn clean(field: &str) -> String {
    let f = field.trim();
    f.strip_prefix('"')
        .and_then(|g| g.strip_suffix('"'))
        .unwrap_or(f)
        .trim()
        .to_string()
}

fn comma_rows(text: &str) -> Result<Vec<Row>> {
    let mut reader = ::csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .comment(Some(b'#'))
        .trim(::csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let row = e.position().map_or(0, |p| p.line() as usize);
            Error::Data {
                row,
                message: e.to_string(),
            }
        })?;
        let row = record.position().map_or(0, |p| p.line() as usize);
        if record.iter().all(str::is_empty) {
            continue;
        }
        rows.push((row, record.iter().map(clean).collect()));
    }
    Ok(rows)
}

fn whitespace_rows(text: &str) -> Vec<Row> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| {
            let t = l.trim();
            !t.is_empty() && !t.starts_with('#')
        })
        .map(|(i, l)| (i + 1, l.split_whitespace().map(clean).collect()))
        .collect()
}

fn parse_number(field: &str) -> Option<f64> {
    field.parse::<f64>().ok().filter(|v| v.is_finite())
}

/// Reads the selected numeric column from CSV text.
pub fn read_column(text: &str, column: Option<&ColumnSel>) -> Result<Vec<f64>> {
    let text = text.trim_start_matches('\u{feff}');
    let first = text.lines().find(|l| {
        let t = l.trim();
        !t.is_empty() && !t.starts_with('#')
    });
    let Some(first) = first else {
        return Err(Error::DataSet("input contains no data rows".into()));
    };
    let rows = if first.contains(',') {
        comma_rows(text)?
    } else {
        whitespace_rows(text)
    };
    let Some((_, head)) = rows.first() else {
        return Err(Error::DataSet("input contains no data rows".into()));
    };
    let width = head.len();
    let has_header = head.iter().any(|f| parse_number(f).is_none());

    let col = match column {
        None if width == 1 => 0,
        None => {
            return Err(Error::DataSet(format!(
                "input has {width} columns; choose one with --column"
            )))
        }
        Some(ColumnSel::Index(i)) if (1..=width).contains(i) => i - 1,
        Some(ColumnSel::Index(i)) => {
            return Err(Error::DataSet(format!(
                "column {i} out of range (input has {width} columns)"
            )))
        }
        Some(ColumnSel::Name(name)) if has_header => head
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::DataSet(format!("no column named '{name}' in header")))?,
        Some(ColumnSel::Name(name)) => {
            return Err(Error::DataSet(format!(
                "column name '{name}' given but input has no header"
            )))
        }
    };

    let mut values = Vec::with_capacity(rows.len());
    for (row, fields) in rows.iter().skip(usize::from(has_header)) {
        let row = *row;
        if fields.len() != width {
            return Err(Error::Data {
                row,
                message: format!("expected {width} fields, found {}", fields.len()),
            });
        }
        let field = &fields[col];
        match parse_number(field) {
            Some(v) => values.push(v),
            None => {
                return Err(Error::Data {
                    row,
                    message: format!("value '{field}' is not a finite number"),
                })
            }
        }
    }
    if values.is_empty() {
        return Err(Error::DataSet("input contains no data rows".into()));
    }
    Ok(values)
}
