//! Columnar dataset text format.
//!
//! A CSV file whose header lists the feature names, then `label`, then
//! (for tagged datasets only) `provenance`. Feature cells are reals written
//! in shortest round-trip decimal form, so reading a file back yields
//! bit-identical values. Labels are `1` (positive) or `0` (negative).
//! Provenance cells are `original`, `synthetic_smote` or `reconstruction`.
//!
//! ```text
//! Age,BMI,label,provenance
//! 0.25,0.5,1,original
//! 0.3125,0.4375,0,synthetic_smote
//! ```

use std::io::Write;

use super::{parse_csv, Dataset, Label, Provenance, TaggedDataset};
use crate::error::{Error, Result};
use crate::matrix::Matrix;

pub const LABEL_COLUMN: &str = "label";
pub const PROVENANCE_COLUMN: &str = "provenance";

fn write_impl<W: Write>(out: W, ds: &Dataset, provenance: Option<&[Provenance]>) -> Result<()> {
    for reserved in [LABEL_COLUMN, PROVENANCE_COLUMN] {
        if ds.feature_names().iter().any(|n| n == reserved) {
            return Err(Error::Data(format!("feature name {reserved:?} is reserved")));
        }
    }
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<&str> = ds.feature_names().iter().map(String::as_str).collect();
    header.push(LABEL_COLUMN);
    if provenance.is_some() {
        header.push(PROVENANCE_COLUMN);
    }
    let io_err = |e: csv::Error| Error::Parse(format!("writing dataset: {e}"));
    w.write_record(&header).map_err(io_err)?;
    let mut record: Vec<String> = Vec::with_capacity(header.len());
    for (i, row) in ds.features().iter_rows().enumerate() {
        record.clear();
        record.extend(row.iter().map(|v| v.to_string()));
        record.push(if ds.labels()[i].is_positive() { "1" } else { "0" }.to_owned());
        if let Some(p) = provenance {
            record.push(p[i].as_str().to_owned());
        }
        w.write_record(&record).map_err(io_err)?;
    }
    w.flush()
        .map_err(|e| Error::Parse(format!("writing dataset: {e}")))?;
    Ok(())
}

pub fn write_dataset<W: Write>(out: W, ds: &Dataset) -> Result<()> {
    write_impl(out, ds, None)
}

pub fn write_tagged<W: Write>(out: W, ds: &TaggedDataset) -> Result<()> {
    write_impl(out, &ds.dataset, Some(&ds.provenance))
}

fn read_impl(bytes: &[u8], tagged: bool) -> Result<(Dataset, Option<Vec<Provenance>>)> {
    let table = parse_csv(bytes)?;
    let header = table.header();
    let trailing = if tagged { 2 } else { 1 };
    if header.len() < trailing + 1 {
        return Err(Error::Parse("dataset file has no feature columns".into()));
    }
    let d = header.len() - trailing;
    if header[d] != LABEL_COLUMN || (tagged && header[d + 1] != PROVENANCE_COLUMN) {
        return Err(Error::Parse(format!(
            "dataset header must end with {LABEL_COLUMN:?}{}",
            if tagged { ", \"provenance\"" } else { "" }
        )));
    }
    let mut data = Vec::with_capacity(table.n_rows() * d);
    let mut labels = Vec::with_capacity(table.n_rows());
    let mut provenance = Vec::new();
    for (i, row) in table.rows().iter().enumerate() {
        for (j, cell) in row[..d].iter().enumerate() {
            let v: f64 = cell.parse().map_err(|_| {
                Error::Parse(format!("row {}, column {:?}: bad number {cell:?}", i + 1, header[j]))
            })?;
            data.push(v);
        }
        labels.push(match row[d].as_str() {
            "1" => Label::Positive,
            "0" => Label::Negative,
            other => return Err(Error::Parse(format!("row {}: bad label {other:?}", i + 1))),
        });
        if tagged {
            provenance.push(Provenance::parse(&row[d + 1])?);
        }
    }
    let features = Matrix::from_vec(table.n_rows(), d, data)?;
    let ds = Dataset::new(features, labels, header[..d].to_vec())?;
    Ok((ds, tagged.then_some(provenance)))
}

pub fn read_dataset(bytes: &[u8]) -> Result<Dataset> {
    Ok(read_impl(bytes, false)?.0)
}

pub fn read_tagged(bytes: &[u8]) -> Result<TaggedDataset> {
    let (ds, prov) = read_impl(bytes, true)?;
    TaggedDataset::new(ds, prov.unwrap_or_default())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn writes_documented_layout() {
        let m = Matrix::from_vec(2, 2, vec![0.25, 0.5, 0.3125, 0.4375]).unwrap();
        let ds = Dataset::new(m, vec![Label::Positive, Label::Negative], vec!["Age".into(), "BMI".into()]).unwrap();
        let tagged = TaggedDataset::new(ds, vec![Provenance::Original, Provenance::SyntheticSmote]).unwrap();
        let mut buf = Vec::new();
        write_tagged(&mut buf, &tagged).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "Age,BMI,label,provenance\n0.25,0.5,1,original\n0.3125,0.4375,0,synthetic_smote\n"
        );
    }

    #[test]
    fn rejects_reserved_feature_name() {
        let ds = Dataset::new(Matrix::zeros(1, 1), vec![Label::Positive], vec!["label".into()]).unwrap();
        assert!(write_dataset(Vec::new(), &ds).is_err());
    }

    proptest! {
        #[test]
        fn round_trip_is_bit_exact(
            rows in prop::collection::vec(prop::collection::vec(prop::num::f64::NORMAL | prop::num::f64::ZERO, 3), 1..20),
            flags in prop::collection::vec(any::<bool>(), 20),
        ) {
            let n = rows.len();
            let labels = flags[..n].iter().map(|&b| Label::from_bool(b)).collect();
            let ds = Dataset::new(Matrix::from_rows(&rows).unwrap(), labels, vec!["a".into(), "b b".into(), "c,d".into()]).unwrap();
            let mut buf = Vec::new();
            write_dataset(&mut buf, &ds).unwrap();
            let back = read_dataset(&buf).unwrap();
            prop_assert_eq!(back.feature_names(), ds.feature_names());
            prop_assert_eq!(back.labels(), ds.labels());
            for (a, b) in back.features().as_slice().iter().zip(ds.features().as_slice()) {
                prop_assert_eq!(a.to_bits(), b.to_bits());
            }
        }
    }
}
