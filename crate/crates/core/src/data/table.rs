use std::collections::HashSet;

use crate::error::{Error, Result};

/// Header plus text cells, exactly as read from the CSV.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawTable {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl RawTable {
    pub fn new(header: Vec<String>, rows: Vec<Vec<String>>) -> Result<Self> {
        for (i, row) in rows.iter().enumerate() {
            if row.len() != header.len() {
                return Err(ragged(i + 1, header.len(), row.len()));
            }
        }
        Ok(RawTable { header, rows })
    }

    pub fn header(&self) -> &[String] {
        &self.header
    }

    pub fn rows(&self) -> &[Vec<String>] {
        &self.rows
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_columns(&self) -> usize {
        self.header.len()
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }

    fn distinct_count(&self, col: usize) -> usize {
        self.rows
            .iter()
            .map(|r| r[col].as_str())
            .collect::<HashSet<_>>()
            .len()
    }

    fn keep_columns(&self, keep: &[usize]) -> RawTable {
        RawTable {
            header: keep.iter().map(|&j| self.header[j].clone()).collect(),
            rows: self
                .rows
                .iter()
                .map(|r| keep.iter().map(|&j| r[j].clone()).collect())
                .collect(),
        }
    }
}

fn ragged(row: usize, expected: usize, got: usize) -> Error {
    Error::Parse(format!("row {row}: expected {expected} cells, got {got}"))
}

/// Parses comma-delimited UTF-8 text with a header row. Cells are trimmed of
/// surrounding whitespace. Data rows are numbered from 1 in error messages.
pub fn parse_csv(bytes: &[u8]) -> Result<RawTable> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(bytes);
    let header: Vec<String> = reader
        .headers()
        .map_err(|e| Error::Parse(format!("header: {e}")))?
        .iter()
        .map(str::to_owned)
        .collect();
    if header.is_empty() || (header.len() == 1 && header[0].is_empty()) {
        return Err(Error::Parse("empty input: no header row".into()));
    }
    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::Parse(format!("row {}: {e}", i + 1)))?;
        if record.len() != header.len() {
            return Err(ragged(i + 1, header.len(), record.len()));
        }
        rows.push(record.iter().map(str::to_owned).collect());
    }
    Ok(RawTable { header, rows })
}

/// Result of dropping single-valued columns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CleanedTable {
    pub table: RawTable,
    /// Dropped column names, in original column order.
    pub removed: Vec<String>,
    /// Set when the label column holds a single value; it is kept regardless.
    pub constant_label: bool,
}

/// Drops every column whose data cells hold fewer than two distinct text
/// values. The column named `label` is never dropped.
pub fn remove_constant_columns(table: &RawTable, label: Option<&str>) -> CleanedTable {
    let mut keep = Vec::with_capacity(table.n_columns());
    let mut removed = Vec::new();
    let mut constant_label = false;
    for (j, name) in table.header.iter().enumerate() {
        let constant = table.distinct_count(j) < 2;
        if Some(name.as_str()) == label {
            constant_label = constant;
            keep.push(j);
        } else if constant {
            removed.push(name.clone());
        } else {
            keep.push(j);
        }
    }
    if constant_label {
        log::warn!("label column {:?} holds a single value", label.unwrap_or_default());
    }
    CleanedTable {
        table: table.keep_columns(&keep),
        removed,
        constant_label,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_header_and_rows() {
        let t = parse_csv(b"a,b,y\n1,2,x\n3,4,z\n").unwrap();
        assert_eq!(t.header(), ["a", "b", "y"]);
        assert_eq!(t.n_rows(), 2);
        assert_eq!(t.rows()[1], ["3", "4", "z"]);
    }

    #[test]
    fn ragged_row_is_named() {
        let err = parse_csv(b"a,b,y\n1,2\n").unwrap_err();
        assert_eq!(err.to_string(), "parse error: row 1: expected 3 cells, got 2");
    }

    #[test]
    fn empty_input_is_an_error() {
        assert!(parse_csv(b"").is_err());
    }

    #[test]
    fn header_only_gives_zero_rows() {
        assert_eq!(parse_csv(b"a,b\n").unwrap().n_rows(), 0);
    }

    #[test]
    fn drops_constant_column() {
        let t = parse_csv(b"a,b,c\n1,x,5\n2,y,5\n3,x,5\n").unwrap();
        let c = remove_constant_columns(&t, None);
        assert_eq!(c.removed, ["c"]);
        assert_eq!(c.table.header(), ["a", "b"]);
        assert_eq!(c.table.rows()[2], ["3", "x"]);
    }

    #[test]
    fn no_constant_column_is_noop() {
        let t = parse_csv(b"a,b\n1,x\n2,y\n").unwrap();
        let c = remove_constant_columns(&t, None);
        assert!(c.removed.is_empty());
        assert_eq!(c.table, t);
    }

    #[test]
    fn constant_label_is_kept_and_flagged() {
        let t = parse_csv(b"a,y\n1,Cad\n2,Cad\n").unwrap();
        let c = remove_constant_columns(&t, Some("y"));
        assert!(c.constant_label);
        assert_eq!(c.table.header(), ["a", "y"]);
    }

    #[test]
    fn idempotent() {
        let t = parse_csv(b"a,b,c,d\n1,x,5,q\n2,x,5,r\n").unwrap();
        let once = remove_constant_columns(&t, Some("d"));
        let twice = remove_constant_columns(&once.table, Some("d"));
        assert_eq!(once.table, twice.table);
        assert!(twice.removed.is_empty());
    }
}
