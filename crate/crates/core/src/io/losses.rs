use std::path::Path;

use crate::error::{Error, Result};
use crate::loss_model::{record_loss, Label, LossRole, LossSet, PredictionRecord};

/// Layout of a loss file, decided by its header.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LossFileKind {
    /// `loss`
    Losses,
    /// `prediction,label`
    Binary,
    /// `p_0,...,p_{C-1},label` with `C >= 2`
    Multiclass(usize),
}

fn detect(header: &csv::StringRecord) -> Option<LossFileKind> {
    let cols: Vec<&str> = header.iter().map(str::trim).collect();
    match cols.as_slice() {
        ["loss"] => Some(LossFileKind::Losses),
        ["prediction", "label"] => Some(LossFileKind::Binary),
        [probs @ .., "label"] if probs.len() >= 2 => probs
            .iter()
            .enumerate()
            .all(|(i, c)| *c == format!("p_{i}"))
            .then_some(LossFileKind::Multiclass(probs.len())),
        _ => None,
    }
}

/// Layout named by the first line of `text`, if recognized.
pub fn header_kind(text: &str) -> Option<LossFileKind> {
    let first = text.lines().next()?;
    detect(&csv::StringRecord::from(first.split(',').collect::<Vec<_>>()))
}

fn parse_f64(field: &str, path: &Path, line: usize, what: &str) -> Result<f64> {
    let v: f64 = field.trim().parse().map_err(|_| Error::Parse {
        path: path.into(),
        line,
        message: format!("{what} `{field}` is not a number"),
    })?;
    if !v.is_finite() {
        return Err(Error::Parse {
            path: path.into(),
            line,
            message: format!("{what} `{field}` is not finite"),
        });
    }
    Ok(v)
}

/// Parses loss-file text. `path` is used only in error messages. Line
/// numbers count the header as line 1.
pub fn parse_loss_csv(text: &str, path: &Path, role: LossRole, clip: bool) -> Result<LossSet> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(text.as_bytes());
    let header = reader.headers().map_err(|e| Error::Parse {
        path: path.into(),
        line: 1,
        message: e.to_string(),
    })?;
    if header.is_empty() || header.iter().all(|h| h.trim().is_empty()) {
        return Err(Error::Parse {
            path: path.into(),
            line: 1,
            message: "file is empty; expected a `loss`, `prediction,label` or `p_0,...,label` header".into(),
        });
    }
    let kind = detect(header).ok_or_else(|| Error::Parse {
        path: path.into(),
        line: 1,
        message: format!(
            "unrecognized header `{}`; expected `loss`, `prediction,label` or `p_0,...,p_{{C-1}},label`",
            header.iter().collect::<Vec<_>>().join(",")
        ),
    })?;
    let mut values = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let line = i + 2;
        let rec = rec.map_err(|e| Error::Parse {
            path: path.into(),
            line,
            message: e.to_string(),
        })?;
        let loss = match kind {
            LossFileKind::Losses => parse_f64(&rec[0], path, line, "loss")?,
            LossFileKind::Binary | LossFileKind::Multiclass(_) => {
                let n = rec.len() - 1;
                let probs = (0..n)
                    .map(|j| parse_f64(&rec[j], path, line, "prediction"))
                    .collect::<Result<Vec<_>>>()?;
                let label: usize = rec[n].trim().parse().map_err(|_| Error::Parse {
                    path: path.into(),
                    line,
                    message: format!("label `{}` is not a class index", &rec[n]),
                })?;
                let record = PredictionRecord::new(probs, Label::Index(label), clip);
                record.and_then(|r| record_loss(&r)).map_err(|e| Error::Parse {
                    path: path.into(),
                    line,
                    message: e.to_string(),
                })?
            }
        };
        values.push(loss);
    }
    let id = path.display().to_string();
    LossSet::new(values, role, id)
}

pub fn read_loss_file(path: &Path, role: LossRole, clip: bool) -> Result<LossSet> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_loss_csv(&text, path, role, clip)
}

/// `loss` header, one value per line with 17 significant digits, so that
/// parsing the text gives back the same `f64` values.
pub fn serialize_losses(values: &[f64]) -> String {
    let mut out = String::with_capacity(24 * (values.len() + 1));
    out.push_str("loss\n");
    for v in values {
        out.push_str(&format!("{v:.16e}\n"));
    }
    out
}

pub fn write_loss_file(path: &Path, values: &[f64]) -> Result<()> {
    super::write_atomic(path, serialize_losses(values).as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn parse(text: &str) -> Result<LossSet> {
        parse_loss_csv(text, Path::new("x.csv"), LossRole::Training, false)
    }

    #[test]
    fn the_three_layouts() {
        assert_eq!(parse("loss\n1.5\n-2\n").unwrap().values(), &[1.5, -2.0]);
        let b = parse("prediction,label\n0.25,1\n0.25,0\n").unwrap();
        assert!((b.values()[0] - 3f64.ln()).abs() < 1e-15);
        assert!((b.values()[1] + 3f64.ln()).abs() < 1e-15);
        let m = parse("p_0,p_1,p_2,label\n0.2,0.5,0.3,1\n").unwrap();
        assert!(m.values()[0].abs() < 1e-15);
    }

    #[test]
    fn hard_errors_carry_line_numbers() {
        for (text, line) in [
            ("loss\n1\nNaN\n", 3),
            ("loss\n1\ninf\n", 3),
            ("loss\nabc\n", 2),
            ("prediction,label\n1.0,1\n", 2),
            ("prediction,label\n0.5,2\n", 2),
            ("value\n1\n", 1),
            ("", 1),
        ] {
            match parse(text) {
                Err(Error::Parse { line: l, .. }) => assert_eq!(l, line, "{text:?}"),
                other => panic!("{text:?} gave {other:?}"),
            }
        }
        assert!(matches!(parse("loss\n"), Err(Error::EmptySample(_))));
    }

    #[test]
    fn clipping_rescues_saturated_predictions() {
        let s = parse_loss_csv("prediction,label\n1.0,1\n", Path::new("x"), LossRole::Training, true).unwrap();
        assert!(s.values()[0].is_finite());
    }

    proptest! {
        #[test]
        fn round_trip_is_identity(values in prop::collection::vec(prop::num::f64::NORMAL | prop::num::f64::SUBNORMAL | prop::num::f64::ZERO, 1..50)) {
            let back = parse(&serialize_losses(&values)).unwrap();
            prop_assert_eq!(back.values(), values.as_slice());
        }
    }
}
