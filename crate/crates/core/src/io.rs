//! Matrix text format: UTF-8 CSV, one row per line, entries written as
//! decimals or `p/q` rationals. Blank lines and lines starting with `#`
//! are ignored.

use std::path::Path;

use crate::error::{PcmError, Result};
use crate::matrix::{Pcm, Reciprocity};

/// Parses a decimal (`0.25`, `3`, `1e-2`) or rational (`1/9`, `2.5/3`) literal.
///
/// The result is finite; infinities, NaN and zero denominators are rejected.
pub fn parse_rational(s: &str) -> Result<f64> {
    let s = s.trim();
    let number = |part: &str| -> Result<f64> {
        let part = part.trim();
        // `f64::from_str` also accepts "inf" and "nan".
        if part.is_empty() || !part.bytes().all(|b| b.is_ascii_digit() || b"+-.eE".contains(&b)) {
            return Err(literal_error(s));
        }
        part.parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(|| literal_error(s))
    };
    let value = match s.split_once('/') {
        None => number(s)?,
        Some((p, q)) => {
            let (p, q) = (number(p)?, number(q)?);
            if q == 0.0 {
                return Err(PcmError::Parse {
                    line: 0,
                    message: format!("zero denominator in '{s}'"),
                });
            }
            p / q
        }
    };
    if !value.is_finite() {
        return Err(literal_error(s));
    }
    Ok(value)
}

fn literal_error(s: &str) -> PcmError {
    PcmError::Parse {
        line: 0,
        message: format!("'{s}' is not a decimal or p/q literal"),
    }
}

/// Rows of numbers from matrix CSV text. Does not check squareness.
pub fn parse_rows(text: &str) -> Result<Vec<Vec<f64>>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| PcmError::Parse {
            line: e.position().map(|p| p.line() as usize).unwrap_or(0),
            message: e.to_string(),
        })?;
        let line = record.position().map(|p| p.line() as usize).unwrap_or(0);
        if record.iter().all(str::is_empty) {
            continue;
        }
        let row = record
            .iter()
            .map(|field| {
                parse_rational(field).map_err(|e| match e {
                    PcmError::Parse { message, .. } => PcmError::Parse { line, message },
                    other => other,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(PcmError::Empty("matrix file"));
    }
    Ok(rows)
}

/// Parses a matrix. `mode = None` infers reciprocity from the entries.
pub fn parse_matrix(text: &str, mode: Option<Reciprocity>) -> Result<Pcm> {
    let rows = parse_rows(text)?;
    match mode {
        Some(mode) => Pcm::new(rows, mode),
        None => Pcm::from_rows(rows),
    }
}

/// Reads and parses a matrix file.
pub fn load_matrix(path: &Path, mode: Option<Reciprocity>) -> Result<Pcm> {
    let text = std::fs::read_to_string(path).map_err(|e| PcmError::Parse {
        line: 0,
        message: format!("cannot read {}: {e}", path.display()),
    })?;
    parse_matrix(&text, mode)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn literals() {
        assert_eq!(parse_rational("1/2").unwrap(), 0.5);
        assert_eq!(parse_rational(" 7 / 5 ").unwrap(), 1.4);
        assert_eq!(parse_rational("2.5").unwrap(), 2.5);
        assert_eq!(parse_rational("1e-2").unwrap(), 0.01);
        for bad in ["", "1/0", "inf", "NaN", "1/2/3", "x", "1/", "/2", "0x10", "1e400"] {
            assert!(parse_rational(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn reciprocal_example_file() {
        let text = "# R(x)\n1,1,1,2\n1,1,1,2\n1,1,1,2\n1/2,1/2,1/2,1\n";
        let m = parse_matrix(text, None).unwrap();
        assert_eq!(m.mode(), Reciprocity::Reciprocal);
        assert_eq!(m, crate::reference::r_x());
    }

    #[test]
    fn arbitrary_example_inferred() {
        let text = "1,1,1,2\n1/2,1,1,2\n1/2,1,1,2\n1/2,1/2,1/2,1\n";
        let m = parse_matrix(text, None).unwrap();
        assert_eq!(m, crate::reference::a_x());
        assert!(parse_matrix(text, Some(Reciprocity::Reciprocal)).is_err());
    }

    #[test]
    fn line_numbers_in_errors() {
        let err = parse_matrix("1,2\n1/2,abc\n", None).unwrap_err();
        assert!(matches!(err, PcmError::Parse { line: 2, .. }), "{err:?}");
        assert!(matches!(parse_matrix("1,2,3\n1,1\n", None), Err(PcmError::InvalidMatrix(_))));
        assert!(matches!(parse_matrix("# nothing\n", None), Err(PcmError::Empty(_))));
    }

    proptest! {
        #[test]
        fn rational_matches_division(p in 1u32..1000, q in 1u32..1000) {
            let v = parse_rational(&format!("{p}/{q}")).unwrap();
            prop_assert_eq!(v, p as f64 / q as f64);
        }

        #[test]
        fn parser_never_panics(s in "\\PC{0,40}") {
            let _ = parse_rational(&s);
            let _ = parse_matrix(&s, None);
        }
    }
}
