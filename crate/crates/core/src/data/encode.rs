use super::{Dataset, DatasetSchema, FeatureKind, Label, RawTable};
use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Converts text cells to reals according to `schema`.
///
/// Feature order follows the table's column order. Schema features missing
/// from the table (for example, removed as constant) are ignored; table
/// columns missing from the schema are an error.
pub fn encode(table: &RawTable, schema: &DatasetSchema) -> Result<Dataset> {
    let label_col = table.column_index(&schema.label_name).ok_or_else(|| {
        Error::Schema(format!("label column {:?} not in table", schema.label_name))
    })?;

    let mut columns = Vec::new();
    for (j, name) in table.header().iter().enumerate() {
        if j == label_col {
            continue;
        }
        let spec = schema
            .feature(name)
            .ok_or_else(|| Error::Schema(format!("column {name:?} is not declared in the schema")))?;
        columns.push((j, spec));
    }
    if columns.is_empty() {
        return Err(Error::Data("no predictor columns left".into()));
    }

    let n = table.n_rows();
    let d = columns.len();
    let mut features = Matrix::zeros(n, d);
    let mut labels = Vec::with_capacity(n);
    for (i, row) in table.rows().iter().enumerate() {
        for (c, (j, spec)) in columns.iter().enumerate() {
            let cell = row[*j].as_str();
            let value = match &spec.kind {
                FeatureKind::Numeric => cell.parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(|| {
                    Error::Parse(format!(
                        "row {}, column {:?}: cannot parse {cell:?} as a number",
                        i + 1,
                        spec.name
                    ))
                })?,
                FeatureKind::Binary { levels } => level_index(levels, cell, i, &spec.name)? as f64,
                FeatureKind::Categorical { levels } => level_index(levels, cell, i, &spec.name)? as f64,
            };
            features.set(i, c, value);
        }
        let label_cell = row[label_col].as_str();
        let positive = label_cell == schema.positive_label;
        if let Some(neg) = &schema.negative_label {
            if !positive && label_cell != neg {
                return Err(Error::Data(format!(
                    "row {}: label {label_cell:?} is neither {:?} nor {neg:?}",
                    i + 1,
                    schema.positive_label
                )));
            }
        }
        labels.push(Label::from_bool(positive));
    }
    let names = columns.iter().map(|(_, s)| s.name.clone()).collect();
    Dataset::new(features, labels, names)
}

fn level_index(levels: &[String], cell: &str, row: usize, column: &str) -> Result<usize> {
    levels.iter().position(|l| l == cell).ok_or_else(|| {
        Error::Data(format!(
            "row {}, column {column:?}: unknown level {cell:?} (declared: {levels:?})",
            row + 1
        ))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::parse_csv;

    fn schema() -> DatasetSchema {
        DatasetSchema::from_toml_str(
            r#"
label = "Cath"
positive_label = "Cad"
[[feature]]
name = "Age"
kind = "numeric"
[[feature]]
name = "Obesity"
kind = "binary"
levels = ["N", "Y"]
[[feature]]
name = "VHD"
kind = "categorical"
levels = ["N", "mild", "Moderate", "Severe"]
[[feature]]
name = "Dropped"
kind = "numeric"
"#,
        )
        .unwrap()
    }

    #[test]
    fn encodes_each_kind() {
        let t = parse_csv(b"Age,Obesity,VHD,Cath\n53,Y,Moderate,Cad\n61,N,N,Normal\n").unwrap();
        let ds = encode(&t, &schema()).unwrap();
        assert_eq!(ds.features().row(0), [53.0, 1.0, 2.0]);
        assert_eq!(ds.features().row(1), [61.0, 0.0, 0.0]);
        assert_eq!(ds.labels(), [Label::Positive, Label::Negative]);
        assert_eq!(ds.feature_names(), ["Age", "Obesity", "VHD"]);
    }

    #[test]
    fn bad_number_names_row_and_column() {
        let t = parse_csv(b"Age,Obesity,VHD,Cath\n5x,Y,N,Cad\n").unwrap();
        let msg = encode(&t, &schema()).unwrap_err().to_string();
        assert!(msg.contains("row 1") && msg.contains("\"Age\""), "{msg}");
    }

    #[test]
    fn unknown_level_names_value() {
        let t = parse_csv(b"Age,Obesity,VHD,Cath\n50,Y,Huge,Cad\n").unwrap();
        let msg = encode(&t, &schema()).unwrap_err().to_string();
        assert!(msg.contains("\"Huge\""), "{msg}");
    }

    #[test]
    fn undeclared_column_is_an_error() {
        let t = parse_csv(b"Age,Other,Cath\n50,1,Cad\n").unwrap();
        assert!(encode(&t, &schema()).is_err());
    }

    #[test]
    fn strict_negative_label() {
        let mut s = schema();
        s.negative_label = Some("Normal".into());
        let t = parse_csv(b"Age,Obesity,VHD,Cath\n50,Y,N,Maybe\n").unwrap();
        assert!(encode(&t, &s).is_err());
    }
}
