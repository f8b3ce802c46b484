//! Wire formats shared by the library, the CLI and the Python bindings.
//!
//! Matrices are `{"dim": n, "entries": [[re, im], ...]}` in row-major order.
//! Non-square operators (Kraus operators between spaces of different size)
//! carry `"rows"`/`"cols"` instead of `"dim"`. Numbers are written with 17
//! significant digits.

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::value::RawValue;

use crate::error::{shape_err, Result};
use crate::linalg::{c64, ComplexMatrix};

/// A float serialised with 17 significant digits; non-finite values become
/// the strings `"inf"`, `"-inf"` and `"nan"`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Num(pub f64);

pub fn format_num(x: f64) -> String {
    if x.is_nan() {
        "\"nan\"".into()
    } else if x == f64::INFINITY {
        "\"inf\"".into()
    } else if x == f64::NEG_INFINITY {
        "\"-inf\"".into()
    } else {
        format!("{x:.16e}")
    }
}

impl Serialize for Num {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let raw = RawValue::from_string(format_num(self.0)).map_err(serde::ser::Error::custom)?;
        raw.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Num {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(f64),
            Str(String),
        }
        match Repr::deserialize(d)? {
            Repr::Num(x) => Ok(Num(x)),
            Repr::Str(s) => match s.as_str() {
                "inf" => Ok(Num(f64::INFINITY)),
                "-inf" => Ok(Num(f64::NEG_INFINITY)),
                "nan" => Ok(Num(f64::NAN)),
                _ => Err(serde::de::Error::custom(format!("not a number: {s:?}"))),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rows: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cols: Option<usize>,
    pub entries: Vec<[Num; 2]>,
}

impl MatrixJson {
    pub fn from_matrix(m: &ComplexMatrix) -> Self {
        let (rows, cols) = m.shape();
        let entries = (0..rows)
            .flat_map(|r| (0..cols).map(move |c| (r, c)))
            .map(|(r, c)| [Num(m[(r, c)].re), Num(m[(r, c)].im)])
            .collect();
        if rows == cols {
            Self { dim: Some(rows), rows: None, cols: None, entries }
        } else {
            Self { dim: None, rows: Some(rows), cols: Some(cols), entries }
        }
    }

    /// Resolves the shape from `dim`, from `rows`/`cols`, or from the
    /// `fallback` supplied by an enclosing document.
    pub fn to_matrix_with(&self, fallback: Option<(usize, usize)>) -> Result<ComplexMatrix> {
        let (rows, cols) = match (self.dim, self.rows, self.cols) {
            (Some(n), None, None) => (n, n),
            (None, Some(r), Some(c)) => (r, c),
            (None, None, None) => fallback.ok_or_else(|| shape_err!("matrix json has no shape"))?,
            _ => return Err(shape_err!("matrix json must give either dim or rows and cols")),
        };
        if rows * cols != self.entries.len() || rows == 0 || cols == 0 {
            return Err(shape_err!("{} entries for a {rows}x{cols} matrix", self.entries.len()));
        }
        Ok(ComplexMatrix::from_fn(rows, cols, |r, c| {
            let [re, im] = self.entries[r * cols + c];
            c64::new(re.0, im.0)
        }))
    }

    pub fn to_matrix(&self) -> Result<ComplexMatrix> {
        self.to_matrix_with(None)
    }
}

/// Writes one JSON value per line.
pub fn to_line<T: Serialize>(value: &T) -> Result<String> {
    Ok(serde_json::to_string(value)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn num_formatting() {
        assert_eq!(format_num(0.5), "5.0000000000000000e-1");
        assert_eq!(format_num(f64::INFINITY), "\"inf\"");
        let s = serde_json::to_string(&vec![Num(1.0), Num(-2.5e-7)]).unwrap();
        assert_eq!(s, "[1.0000000000000000e0,-2.4999999999999999e-7]");
    }

    #[test]
    fn non_square_matrix() {
        let m = ComplexMatrix::from_fn(2, 3, |r, c| c64::new(r as f64, c as f64));
        let j = MatrixJson::from_matrix(&m);
        assert_eq!(j.dim, None);
        assert_eq!(j.to_matrix().unwrap(), m);
        let bare = MatrixJson { dim: None, rows: None, cols: None, entries: j.entries.clone() };
        assert_eq!(bare.to_matrix_with(Some((2, 3))).unwrap(), m);
        assert!(bare.to_matrix().is_err());
    }

    #[test]
    fn parses_plain_json() {
        let j: MatrixJson = serde_json::from_str(r#"{"dim": 2, "entries": [[1,0],[0,0],[0,0],[0,0]]}"#).unwrap();
        let m = j.to_matrix().unwrap();
        assert_eq!(m[(0, 0)], c64::new(1.0, 0.0));
        let bad: MatrixJson = serde_json::from_str(r#"{"dim": 2, "entries": [[1,0]]}"#).unwrap();
        assert!(bad.to_matrix().is_err());
    }

    proptest! {
        #[test]
        fn seventeen_digits_round_trip(x in proptest::num::f64::NORMAL | proptest::num::f64::SUBNORMAL | proptest::num::f64::ZERO) {
            let s = serde_json::to_string(&Num(x)).unwrap();
            let back: Num = serde_json::from_str(&s).unwrap();
            prop_assert_eq!(back.0.to_bits(), x.to_bits());
        }

        #[test]
        fn matrix_round_trip(vals in proptest::collection::vec(-10.0f64..10.0, 18)) {
            let m = ComplexMatrix::from_fn(3, 3, |r, c| c64::new(vals[2 * (r * 3 + c)], vals[2 * (r * 3 + c) + 1]));
            let s = serde_json::to_string(&MatrixJson::from_matrix(&m)).unwrap();
            let back: MatrixJson = serde_json::from_str(&s).unwrap();
            prop_assert_eq!(back.to_matrix().unwrap(), m);
        }
    }
}
