//! Embedded reference data: the transcribed relation generators and basis,
//! used for verification and as the fallback basis.

use crate::poly::{ParseError, Polynomial};

pub const POL_27_TEXT: &str =
    include_str!(concat!(env!("CARGO_MANIFEST_DIR"), "/../../fixtures/reference/pol_27.txt"));
pub const B_INF_TEXT: &str = include_str!(concat!(
    env!("CARGO_MANIFEST_DIR"),
    "/../../fixtures/reference/b_inf_printed.txt"
));

/// Error from reading a reference polynomial list.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: {source}")]
pub struct ReferenceError {
    pub line: usize,
    pub source: ParseError,
}

/// Parse a polynomial-list file: one polynomial per line, `#` comments and
/// blank lines ignored.
pub fn parse_reference_list(text: &str) -> Result<Vec<Polynomial>, ReferenceError> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        };
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let p: Polynomial = line.parse().map_err(|e| ReferenceError {
            line: idx + 1,
            source: e,
        })?;
        out.push(p);
    }
    Ok(out)
}

/// The 27 transcribed relation polynomials.
pub fn printed_relations() -> Vec<Polynomial> {
    parse_reference_list(POL_27_TEXT).expect("embedded pol_27 parses")
}

/// The 15 transcribed basis polynomials.
pub fn printed_basis_b_inf() -> Vec<Polynomial> {
    parse_reference_list(B_INF_TEXT).expect("embedded b_inf parses")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn embedded_lists_parse() {
        assert_eq!(printed_relations().len(), 27);
        assert_eq!(printed_basis_b_inf().len(), 15);
    }

    #[test]
    fn parse_list_reports_line() {
        let err = parse_reference_list("A\n\n# ok\nB+?\n").unwrap_err();
        assert_eq!(err.line, 4);
    }
}
