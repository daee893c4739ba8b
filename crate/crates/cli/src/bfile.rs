//! OEIS b-files: one `<index> <value>` pair per line, `#` comments and blank
//! lines ignored, LF or CRLF line endings.

use std::fmt::Write as _;
use std::str::FromStr;

use num_bigint::BigInt;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BFileEntry {
    pub index: i64,
    pub value: BigInt,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

pub fn parse(text: &str) -> Result<Vec<BFileEntry>, ParseError> {
    let mut entries: Vec<BFileEntry> = Vec::new();
    for (i, raw) in text.split('\n').enumerate() {
        let line_no = i + 1;
        let line = raw.strip_suffix('\r').unwrap_or(raw).trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |message: String| ParseError { line: line_no, message };
        let mut fields = line.split_whitespace();
        let (Some(index), Some(value), None) = (fields.next(), fields.next(), fields.next()) else {
            return Err(err(format!("expected `<index> <value>`, got {line:?}")));
        };
        let index = i64::from_str(index).map_err(|_| err(format!("bad index {index:?}")))?;
        let value = BigInt::from_str(value).map_err(|_| err(format!("bad value {value:?}")))?;
        if let Some(prev) = entries.last() {
            if index <= prev.index {
                return Err(err(format!(
                    "index {index} does not increase (previous {})",
                    prev.index
                )));
            }
        }
        entries.push(BFileEntry { index, value });
    }
    Ok(entries)
}

pub fn serialize(entries: &[BFileEntry]) -> String {
    let mut out = String::new();
    for e in entries {
        writeln!(out, "{} {}", e.index, e.value).expect("writing to a String");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_pairs_and_skips_comments() {
        let entries = parse("# A108394\n\n2 43\r\n3 89\n").unwrap();
        assert_eq!(
            entries,
            vec![
                BFileEntry {
                    index: 2,
                    value: 43.into()
                },
                BFileEntry {
                    index: 3,
                    value: 89.into()
                },
            ]
        );
    }

    #[test]
    fn reports_the_offending_line() {
        assert_eq!(parse("2 fortythree").unwrap_err().line, 1);
        assert_eq!(parse("# c\n2 43\n3\n").unwrap_err().line, 3);
        assert_eq!(parse("2 43\n2 89\n").unwrap_err().line, 2);
        assert_eq!(parse("2 43 7\n").unwrap_err().line, 1);
    }

    proptest! {
        #[test]
        fn parse_then_serialize_is_identity(
            start in -50i64..50,
            steps in proptest::collection::vec((1i64..20, any::<i64>()), 0..40),
        ) {
            let mut index = start;
            let mut text = String::new();
            for (step, value) in steps {
                writeln!(text, "{index} {value}").unwrap();
                index += step;
            }
            let parsed = parse(&text).unwrap();
            prop_assert_eq!(serialize(&parsed), text);
        }
    }
}
