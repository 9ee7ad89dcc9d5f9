//! Dataset CSV format: header `u1,...,ud,target`, one sample per row,
//! 17-significant-digit decimal floats, LF line endings. Round-trips every
//! finite value bit-exactly.

use std::path::Path;

use layerwise_core::{Dataset, Provenance, Sample};

use crate::error::{CliError, Result};
use crate::num_fmt::{fmt_f64, parse_f64};

pub fn render_dataset_csv(ds: &Dataset) -> String {
    let mut out = String::new();
    for i in 1..=ds.input_dim() {
        out.push('u');
        out.push_str(&i.to_string());
        out.push(',');
    }
    out.push_str("target\n");
    for sample in ds.samples() {
        for value in &sample.input {
            out.push_str(&fmt_f64(*value));
            out.push(',');
        }
        out.push_str(&fmt_f64(sample.target));
        out.push('\n');
    }
    out
}

/// Parses CSV text; `path` is used only to label errors.
pub fn parse_dataset_csv(text: &str, path: &Path) -> Result<Dataset> {
    let mut lines = text.lines().enumerate();
    let Some((_, header)) = lines.next() else {
        return Err(CliError::parse(path, 1, "missing header"));
    };
    let columns: Vec<&str> = header.split(',').collect();
    if columns.len() < 2 || columns[columns.len() - 1] != "target" {
        return Err(CliError::parse(
            path,
            1,
            format!("expected header `u1,...,ud,target`, got `{header}`"),
        ));
    }
    let dim = columns.len() - 1;
    for (i, column) in columns[..dim].iter().enumerate() {
        let expected = format!("u{}", i + 1);
        if *column != expected {
            return Err(CliError::parse(
                path,
                1,
                format!("expected column `{expected}`, got `{column}`"),
            ));
        }
    }

    let mut samples = Vec::new();
    for (idx, row) in lines {
        let line_no = idx + 1;
        let fields: Vec<&str> = row.split(',').collect();
        if fields.len() != dim + 1 {
            return Err(CliError::parse(
                path,
                line_no,
                format!("expected {} fields, got {}", dim + 1, fields.len()),
            ));
        }
        let mut values = Vec::with_capacity(dim + 1);
        for field in fields {
            let value = parse_f64(field).ok_or_else(|| {
                CliError::parse(path, line_no, format!("invalid float `{field}`"))
            })?;
            values.push(value);
        }
        let target = values.pop().expect("dim + 1 fields");
        samples.push(Sample {
            input: values,
            target,
        });
    }
    if samples.is_empty() {
        return Err(CliError::parse(path, 1, "no data rows"));
    }
    Ok(Dataset::new(samples, Provenance::Raw)?)
}

pub fn write_dataset_csv(ds: &Dataset, path: &Path) -> Result<()> {
    std::fs::write(path, render_dataset_csv(ds))
        .map_err(|e| CliError::io(format!("writing {}", path.display()), e))
}

pub fn read_dataset_csv(path: &Path) -> Result<Dataset> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::io(format!("reading {}", path.display()), e))?;
    parse_dataset_csv(&text, path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use layerwise_core::{generate, GeneratorConfig};

    fn path() -> std::path::PathBuf {
        std::path::PathBuf::from("test.csv")
    }

    #[test]
    fn round_trip_preserves_every_bit() {
        let ds = generate(&GeneratorConfig {
            n: 50,
            ..GeneratorConfig::default()
        })
        .unwrap();
        let text = render_dataset_csv(&ds);
        let back = parse_dataset_csv(&text, &path()).unwrap();
        assert_eq!(back.len(), ds.len());
        assert_eq!(back.input_dim(), ds.input_dim());
        for (a, b) in back.samples().iter().zip(ds.samples()) {
            assert_eq!(a.target.to_bits(), b.target.to_bits());
            for (x, y) in a.input.iter().zip(&b.input) {
                assert_eq!(x.to_bits(), y.to_bits());
            }
        }
    }

    #[test]
    fn file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let file = dir.path().join("data.csv");
        let ds = generate(&GeneratorConfig {
            n: 500,
            ..GeneratorConfig::default()
        })
        .unwrap();
        write_dataset_csv(&ds, &file).unwrap();
        let back = read_dataset_csv(&file).unwrap();
        assert_eq!(back.len(), 500);
        assert_eq!(back.input_dim(), 2);
        for (a, b) in back.samples().iter().zip(ds.samples()) {
            assert_eq!(a, b);
        }
    }

    #[test]
    fn header_and_text_shape() {
        let ds = generate(&GeneratorConfig {
            n: 2,
            ..GeneratorConfig::default()
        })
        .unwrap();
        let text = render_dataset_csv(&ds);
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "u1,u2,target");
        assert_eq!(lines.count(), 2);
        assert!(text.ends_with('\n'));
        assert!(!text.contains('\r'));
    }

    #[test]
    fn header_mismatch_is_a_parse_error() {
        for bad in [
            "x1,x2,target\n1e0,1e0,1e0\n",
            "u1,u2\n1e0,1e0\n",
            "u2,u1,target\n1e0,1e0,1e0\n",
            "u1,u2,label\n1e0,1e0,1e0\n",
            "",
        ] {
            let err = parse_dataset_csv(bad, &path()).unwrap_err();
            assert!(matches!(err, CliError::Parse { line: 1, .. }), "{bad:?}");
        }
    }

    #[test]
    fn malformed_rows_name_their_line() {
        let text = "u1,target\n1.0e0,2.0e0\n1.0e0\n";
        let err = parse_dataset_csv(text, &path()).unwrap_err();
        match err {
            CliError::Parse { line, .. } => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
        let text = "u1,target\n1.0e0,oops\n";
        let err = parse_dataset_csv(text, &path()).unwrap_err();
        match err {
            CliError::Parse { line, msg, .. } => {
                assert_eq!(line, 2);
                assert!(msg.contains("oops"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn header_only_file_is_rejected() {
        let err = parse_dataset_csv("u1,target\n", &path()).unwrap_err();
        assert!(err.to_string().contains("no data rows"));
    }
}
