//! Column schemas of the emitted CSV tables, as read by plotting tools.

use std::fmt;

use fourns_core::diagnostics::csv_header;
use fourns_core::gwp::CALC_HEADER;
use fourns_core::inequality_lab::LAB_HEADER;

use crate::commands::STRICHARTZ_HEADER;

#[derive(Debug, Clone, PartialEq)]
pub enum Schema {
    /// Diagnostics time series for the given cutoffs.
    Diagnostics(Vec<f64>),
    Sweep,
    Lab,
    Strichartz,
    Calc,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SchemaError {
    Empty,
    MissingColumn(String),
    UnexpectedColumn(String),
    RowWidth { line: usize, found: usize, expected: usize },
    NotNumeric { line: usize, column: String, value: String },
    MissingFooter(String),
}

impl fmt::Display for SchemaError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Empty => write!(f, "empty table"),
            Self::MissingColumn(c) => write!(f, "missing column `{c}`"),
            Self::UnexpectedColumn(c) => write!(f, "unexpected column `{c}`"),
            Self::RowWidth { line, found, expected } => {
                write!(f, "line {line}: {found} fields, expected {expected}")
            }
            Self::NotNumeric { line, column, value } => {
                write!(f, "line {line}: column `{column}` is not numeric: {value:?}")
            }
            Self::MissingFooter(k) => write!(f, "missing footer `# {k}=`"),
        }
    }
}

impl std::error::Error for SchemaError {}

/// A parsed table with its `# key=value` footers split off.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
    pub footers: Vec<(String, String)>,
}

impl Table {
    pub fn column(&self, name: &str) -> Option<Vec<&str>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[i].as_str()).collect())
    }

    pub fn numeric(&self, name: &str) -> Result<Vec<f64>, SchemaError> {
        let col = self.column(name).ok_or_else(|| SchemaError::MissingColumn(name.into()))?;
        col.iter()
            .enumerate()
            .map(|(i, v)| {
                v.parse::<f64>().map_err(|_| SchemaError::NotNumeric {
                    line: i + 2,
                    column: name.into(),
                    value: v.to_string(),
                })
            })
            .collect()
    }

    pub fn footer(&self, key: &str) -> Option<&str> {
        self.footers.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }
}

impl Schema {
    pub fn header(&self) -> String {
        match self {
            Self::Diagnostics(n) => csv_header(n),
            Self::Sweep => "N,delta_E_I,fitted_slope".into(),
            Self::Lab => LAB_HEADER.into(),
            Self::Strichartz => STRICHARTZ_HEADER.into(),
            Self::Calc => CALC_HEADER.into(),
        }
    }

    pub fn columns(&self) -> Vec<String> {
        self.header().split(',').map(String::from).collect()
    }

    /// Columns that must parse as numbers (`nan` and `inf` allowed).
    fn numeric_columns(&self) -> Vec<String> {
        match self {
            Self::Diagnostics(_) | Self::Sweep => self.columns(),
            Self::Lab => self.columns().into_iter().filter(|c| c != "case").collect(),
            Self::Strichartz => self.columns(),
            Self::Calc => ["k", "threshold_decimal", "second_threshold_decimal", "split_point_decimal", "s_decimal"]
                .map(String::from)
                .to_vec(),
        }
    }

    fn required_footers(&self) -> &'static [&'static str] {
        match self {
            Self::Sweep => &["fitted_slope", "reference_exponent"],
            _ => &[],
        }
    }

    /// Parses `text` and checks it against the column schema.
    pub fn validate(&self, text: &str) -> Result<Table, SchemaError> {
        let mut lines = text.lines().filter(|l| !l.is_empty());
        let head = lines.next().ok_or(SchemaError::Empty)?;
        let columns: Vec<String> = head.split(',').map(String::from).collect();
        let expected = self.columns();
        if let Some(c) = expected.iter().find(|c| !columns.contains(c)) {
            return Err(SchemaError::MissingColumn(c.clone()));
        }
        if let Some(c) = columns.iter().find(|c| !expected.contains(c)) {
            return Err(SchemaError::UnexpectedColumn(c.clone()));
        }
        let mut rows = Vec::new();
        let mut footers = Vec::new();
        for (i, line) in lines.enumerate() {
            if let Some(rest) = line.strip_prefix('#') {
                if let Some((k, v)) = rest.trim().split_once('=') {
                    footers.push((k.to_string(), v.to_string()));
                }
                continue;
            }
            let fields: Vec<String> = line.split(',').map(String::from).collect();
            if fields.len() != columns.len() {
                return Err(SchemaError::RowWidth {
                    line: i + 2,
                    found: fields.len(),
                    expected: columns.len(),
                });
            }
            rows.push(fields);
        }
        let table = Table { columns, rows, footers };
        for c in self.numeric_columns() {
            table.numeric(&c)?;
        }
        for k in self.required_footers() {
            table.footer(k).ok_or_else(|| SchemaError::MissingFooter(k.to_string()))?;
        }
        Ok(table)
    }
}
