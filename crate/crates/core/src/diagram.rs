//! Shaded link diagrams in crossing-list form.
//!
//! A diagram is a list of typed crossings, each holding four edge-end labels
//! in rotational order, plus a count of crossing-free loop components. The
//! crossing type records the checkerboard shading at the crossing: `X1` when
//! the region swept counterclockwise from overpass to underpass is shaded,
//! `X2` when it is white. Shading is part of the input encoding; it is never
//! computed here.
//!
//! The slot convention ties the four labels `(a, b, c, d)` to the three
//! transitions: `(a,b)+(c,d)` and `(a,d)+(b,c)` are the planar smoothings and
//! `(a,c)+(b,d)` is the virtual transition.

use std::collections::BTreeMap;
use std::fmt;

/// Crossing type from the checkerboard shading.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CrossingKind {
    X1,
    X2,
}

impl fmt::Display for CrossingKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CrossingKind::X1 => write!(f, "X1"),
            CrossingKind::X2 => write!(f, "X2"),
        }
    }
}

/// One crossing: a type and the four edge-end labels in rotational order.
/// A label may repeat within a crossing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Crossing {
    pub kind: CrossingKind,
    pub ends: [String; 4],
}

impl Crossing {
    pub fn new(kind: CrossingKind, ends: [&str; 4]) -> Crossing {
        Crossing {
            kind,
            ends: ends.map(str::to_owned),
        }
    }
}

impl fmt::Display for Crossing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {} {} {} {}",
            self.kind, self.ends[0], self.ends[1], self.ends[2], self.ends[3]
        )
    }
}

/// A link diagram: crossings in input order plus crossing-free loops.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LinkDiagram {
    pub crossings: Vec<Crossing>,
    pub free_loops: usize,
}

/// Error from the link file parser.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("line {line}, column {column}: {msg}")]
pub struct LinkParseError {
    pub line: usize,
    pub column: usize,
    pub msg: String,
}

/// Well-formedness report: every edge label must occur exactly twice.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    /// Labels with an occurrence count other than two.
    pub bad_labels: Vec<(String, usize)>,
    /// Set when the diagram has no crossings and no loops.
    pub empty: bool,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.bad_labels.is_empty() && !self.empty
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_ok() {
            return write!(f, "ok");
        }
        if self.empty {
            write!(f, "empty diagram")?;
            if !self.bad_labels.is_empty() {
                write!(f, "; ")?;
            }
        }
        for (i, (label, count)) in self.bad_labels.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "label '{label}' occurs {count} time(s), expected 2")?;
        }
        Ok(())
    }
}

fn valid_label(tok: &str) -> bool {
    !tok.is_empty() && tok.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl LinkDiagram {
    pub fn crossing_count(&self) -> usize {
        self.crossings.len()
    }

    /// Parse the link file format: one record per line, either
    /// `X1 <l1> <l2> <l3> <l4>`, `X2 <l1> <l2> <l3> <l4>`, `loop`, a
    /// `#` comment, or a blank line.
    pub fn parse(text: &str) -> Result<LinkDiagram, LinkParseError> {
        let mut diagram = LinkDiagram::default();
        for (idx, raw_line) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = match raw_line.find('#') {
                Some(pos) => &raw_line[..pos],
                None => raw_line,
            };
            // tokens with their 1-based byte columns
            let mut tokens: Vec<(usize, &str)> = Vec::new();
            let mut search_from = 0;
            for tok in line.split_whitespace() {
                let at = line[search_from..].find(tok).expect("token in line") + search_from;
                tokens.push((at + 1, tok));
                search_from = at + tok.len();
            }
            let Some(&(_, head)) = tokens.first() else { continue };
            let rest = &tokens[1..];
            match head {
                "loop" => {
                    if let Some(&(col, extra)) = rest.first() {
                        return Err(LinkParseError {
                            line: line_no,
                            column: col,
                            msg: format!("unexpected token '{extra}' after 'loop'"),
                        });
                    }
                    diagram.free_loops += 1;
                }
                "X1" | "X2" => {
                    let kind = if head == "X1" {
                        CrossingKind::X1
                    } else {
                        CrossingKind::X2
                    };
                    if rest.len() < 4 {
                        return Err(LinkParseError {
                            line: line_no,
                            column: line.len() + 1,
                            msg: format!("{head} record needs 4 labels"),
                        });
                    }
                    if let Some(&(col, extra)) = rest.get(4) {
                        return Err(LinkParseError {
                            line: line_no,
                            column: col,
                            msg: format!("unexpected token '{extra}'"),
                        });
                    }
                    for &(col, tok) in &rest[..4] {
                        if !valid_label(tok) {
                            return Err(LinkParseError {
                                line: line_no,
                                column: col,
                                msg: format!("invalid label '{tok}'"),
                            });
                        }
                    }
                    let ends: [String; 4] =
                        [rest[0].1.into(), rest[1].1.into(), rest[2].1.into(), rest[3].1.into()];
                    diagram.crossings.push(Crossing { kind, ends });
                }
                other => {
                    return Err(LinkParseError {
                        line: line_no,
                        column: tokens[0].0,
                        msg: format!("unknown record '{other}'"),
                    })
                }
            }
        }
        Ok(diagram)
    }

    /// Serialize back to the link file format.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for c in &self.crossings {
            out.push_str(&c.to_string());
            out.push('\n');
        }
        for _ in 0..self.free_loops {
            out.push_str("loop\n");
        }
        out
    }

    /// Count label occurrences over all crossing end slots.
    pub fn label_counts(&self) -> BTreeMap<&str, usize> {
        let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
        for c in &self.crossings {
            for end in &c.ends {
                *counts.entry(end.as_str()).or_default() += 1;
            }
        }
        counts
    }

    /// Check that every label occurs exactly twice.
    pub fn validate(&self) -> ValidationReport {
        let bad_labels = self
            .label_counts()
            .into_iter()
            .filter(|&(_, n)| n != 2)
            .map(|(l, n)| (l.to_owned(), n))
            .collect();
        ValidationReport {
            bad_labels,
            empty: self.crossings.is_empty() && self.free_loops == 0,
        }
    }

    /// Append a disjoint crossing-free loop component.
    pub fn with_extra_loop(&self) -> LinkDiagram {
        let mut d = self.clone();
        d.free_loops += 1;
        d
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_single_crossing_line() {
        let d = LinkDiagram::parse("X1 13 20 14 1\n").unwrap();
        assert_eq!(d.crossings.len(), 1);
        assert_eq!(d.crossings[0].kind, CrossingKind::X1);
        assert_eq!(d.crossings[0].ends, ["13", "20", "14", "1"].map(String::from));
        assert_eq!(d.free_loops, 0);
    }

    #[test]
    fn parse_loops_comments_blanks() {
        let d = LinkDiagram::parse("# a comment\n\nloop\nloop # trailing comment\n").unwrap();
        assert_eq!(d.crossings.len(), 0);
        assert_eq!(d.free_loops, 2);
        assert!(d.validate().is_ok());
    }

    #[test]
    fn parse_rejects_malformed_lines() {
        let err = LinkDiagram::parse("X1 a b c\n").unwrap_err();
        assert_eq!(err.line, 1);
        let err = LinkDiagram::parse("X3 a b c d\n").unwrap_err();
        assert_eq!((err.line, err.column), (1, 1));
        let err = LinkDiagram::parse("loop loop\n").unwrap_err();
        assert_eq!((err.line, err.column), (1, 6));
        let err = LinkDiagram::parse("X1 a b c d e\n").unwrap_err();
        assert_eq!(err.column, 12);
        let err = LinkDiagram::parse("X2 a b? c d\n").unwrap_err();
        assert_eq!(err.column, 6);
    }

    #[test]
    fn validate_counts_label_occurrences() {
        let single = LinkDiagram::parse("X1 a b c d\n").unwrap();
        let report = single.validate();
        assert!(!report.is_ok());
        assert_eq!(
            report.bad_labels,
            vec![
                ("a".into(), 1),
                ("b".into(), 1),
                ("c".into(), 1),
                ("d".into(), 1)
            ]
        );

        let kink = LinkDiagram::parse("X1 a a b b\n").unwrap();
        assert!(kink.validate().is_ok());

        let empty = LinkDiagram::parse("").unwrap();
        assert!(empty.validate().empty);
        assert!(!empty.validate().is_ok());
    }

    #[test]
    fn repeated_label_within_crossing_is_fine() {
        let d = LinkDiagram::parse("X1 5 7 6 6\nX1 7 9 8 8\nX1 9 11 10 10\nX1 11 5 12 12\n")
            .unwrap();
        assert!(d.validate().is_ok());
    }

    #[test]
    fn roundtrip_modulo_comments() {
        let src = "# header\nX1 a b c d\nloop\nX2 c d a b\n";
        let d = LinkDiagram::parse(src).unwrap();
        let text = d.to_text();
        assert_eq!(text, "X1 a b c d\nX2 c d a b\nloop\n");
        assert_eq!(LinkDiagram::parse(&text).unwrap(), d);
    }
}
