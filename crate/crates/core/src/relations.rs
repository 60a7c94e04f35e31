//! Reidemeister-move relation polynomials.
//!
//! A move template is a pair of diagram fragments (left and right side of
//! the move) sharing boundary endpoints. Closing the boundary with each
//! perfect matching of its endpoints and taking the difference of the two
//! fragment state sums yields one relation per matching; together they
//! generate the ideal that eta reduces by. Move 2 has 4 boundary points
//! (3 closures), move 3 has 6 (15 closures); with both shading types this
//! gives 36 relations, 27 of them distinct.

use crate::diagram::{Crossing, CrossingKind, LinkDiagram};
use crate::poly::Polynomial;
use crate::statesum::{fragment_state_sum, Compiled};
use std::collections::BTreeMap;

/// One Reidemeister move: left and right fragments over a shared boundary.
/// `right_pairs` are direct strand connections on the right side (move 2
/// has no crossings there).
#[derive(Clone, Debug)]
pub struct MoveTemplate {
    pub name: &'static str,
    pub left: Vec<Crossing>,
    pub right: Vec<Crossing>,
    pub right_pairs: Vec<[&'static str; 2]>,
    pub boundary: Vec<&'static str>,
}

/// The four move templates: both shadings of move 2 and move 3.
pub fn move_templates() -> Vec<MoveTemplate> {
    use CrossingKind::{X1, X2};
    vec![
        MoveTemplate {
            name: "move2-type1",
            left: vec![
                Crossing::new(X1, ["a", "b", "f", "e"]),
                Crossing::new(X2, ["d", "e", "f", "c"]),
            ],
            right: vec![],
            right_pairs: vec![["a", "d"], ["b", "c"]],
            boundary: vec!["a", "b", "c", "d"],
        },
        MoveTemplate {
            name: "move2-type2",
            left: vec![
                Crossing::new(X2, ["a", "b", "f", "e"]),
                Crossing::new(X1, ["d", "e", "f", "c"]),
            ],
            right: vec![],
            right_pairs: vec![["a", "d"], ["b", "c"]],
            boundary: vec!["a", "b", "c", "d"],
        },
        MoveTemplate {
            name: "move3-type1",
            left: vec![
                Crossing::new(X1, ["a", "b", "h", "g"]),
                Crossing::new(X2, ["i", "e", "f", "g"]),
                Crossing::new(X2, ["h", "c", "d", "i"]),
            ],
            right: vec![
                Crossing::new(X1, ["a", "i", "h", "f"]),
                Crossing::new(X1, ["c", "g", "i", "b"]),
                Crossing::new(X2, ["h", "g", "d", "e"]),
            ],
            right_pairs: vec![],
            boundary: vec!["a", "b", "c", "d", "e", "f"],
        },
        MoveTemplate {
            name: "move3-type2",
            left: vec![
                Crossing::new(X2, ["a", "b", "h", "g"]),
                Crossing::new(X1, ["i", "e", "f", "g"]),
                Crossing::new(X1, ["h", "c", "d", "i"]),
            ],
            right: vec![
                Crossing::new(X2, ["a", "i", "h", "f"]),
                Crossing::new(X2, ["c", "g", "i", "b"]),
                Crossing::new(X1, ["h", "g", "d", "e"]),
            ],
            right_pairs: vec![],
            boundary: vec!["a", "b", "c", "d", "e", "f"],
        },
    ]
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum RelationError {
    #[error("boundary has odd size {0}")]
    OddBoundary(usize),
    #[error("matching does not cover the template boundary exactly")]
    MatchingMismatch,
    #[error("edge label '{0}' does not occur exactly twice")]
    BadEdge(String),
}

/// All perfect matchings of the boundary labels, in a fixed order: the
/// first remaining label is paired with each later label in turn, recursing
/// on the rest. `(2n-1)!!` matchings for `2n` labels.
pub fn exterior_matchings<'a>(
    boundary: &[&'a str],
) -> Result<Vec<Vec<(&'a str, &'a str)>>, RelationError> {
    if boundary.len() % 2 != 0 {
        return Err(RelationError::OddBoundary(boundary.len()));
    }
    let mut out = Vec::new();
    let mut current = Vec::new();
    fn recurse<'a>(
        rest: &[&'a str],
        current: &mut Vec<(&'a str, &'a str)>,
        out: &mut Vec<Vec<(&'a str, &'a str)>>,
    ) {
        if rest.is_empty() {
            out.push(current.clone());
            return;
        }
        let first = rest[0];
        for i in 1..rest.len() {
            let partner = rest[i];
            let remaining: Vec<&str> = rest[1..]
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i - 1)
                .map(|(_, &l)| l)
                .collect();
            current.push((first, partner));
            recurse(&remaining, current, out);
            current.pop();
        }
    }
    recurse(boundary, &mut current, &mut out);
    Ok(out)
}

fn compile_fragment(crossings: &[Crossing], pairs: &[(&str, &str)]) -> Compiled {
    let mut ids: BTreeMap<String, u32> = BTreeMap::new();
    let intern = |label: &str, ids: &mut BTreeMap<String, u32>| -> u32 {
        let next = ids.len() as u32;
        *ids.entry(label.to_owned()).or_insert(next)
    };
    let mut compiled_crossings = Vec::with_capacity(crossings.len());
    for c in crossings {
        let mut ends = [0u32; 4];
        for (slot, label) in c.ends.iter().enumerate() {
            ends[slot] = intern(label, &mut ids);
        }
        compiled_crossings.push((c.kind, ends));
    }
    let fixed_pairs = pairs
        .iter()
        .map(|&(a, b)| (intern(a, &mut ids), intern(b, &mut ids)))
        .collect();
    Compiled {
        crossings: compiled_crossings,
        fixed_pairs,
        label_count: ids.len(),
        free_loops: 0,
    }
}

/// The relation of one template under one exterior matching: the difference
/// of the closed left and right fragment state sums.
pub fn move_relation(
    template: &MoveTemplate,
    matching: &[(&str, &str)],
) -> Result<Polynomial, RelationError> {
    let mut seen: Vec<&str> = matching
        .iter()
        .flat_map(|&(a, b)| [a, b])
        .collect();
    seen.sort_unstable();
    let mut boundary = template.boundary.clone();
    boundary.sort_unstable();
    if seen != boundary {
        return Err(RelationError::MatchingMismatch);
    }

    let left = fragment_state_sum(&compile_fragment(&template.left, matching));
    let mut right_pairs: Vec<(&str, &str)> =
        template.right_pairs.iter().map(|p| (p[0], p[1])).collect();
    right_pairs.extend_from_slice(matching);
    let right = fragment_state_sum(&compile_fragment(&template.right, &right_pairs));
    Ok(left.sub(&right))
}

/// One generated relation with its provenance.
#[derive(Clone, Debug)]
pub struct MoveRelation {
    pub template: &'static str,
    pub matching: Vec<(&'static str, &'static str)>,
    pub polynomial: Polynomial,
}

/// All 36 template-matching relations in deterministic order: templates as
/// listed by `move_templates`, matchings in `exterior_matchings` order.
pub fn all_move_relations() -> Vec<MoveRelation> {
    let mut out = Vec::with_capacity(36);
    for template in move_templates() {
        let matchings = exterior_matchings(&template.boundary).expect("even boundary");
        for matching in matchings {
            let polynomial = move_relation(&template, &matching).expect("matching fits");
            out.push(MoveRelation {
                template: template.name,
                matching,
                polynomial,
            });
        }
    }
    out
}

/// The distinct relation polynomials, canonicalized (integer content
/// removed, leading sign preserved) and deduplicated in first-occurrence
/// order. There are exactly 27.
pub fn generate_all_relations() -> Vec<Polynomial> {
    let mut out: Vec<Polynomial> = Vec::new();
    for rel in all_move_relations() {
        let canon = rel.polynomial.primitive_part();
        if !canon.is_zero() && !out.contains(&canon) {
            out.push(canon);
        }
    }
    out
}

/// Closing a template side with a matching yields an ordinary diagram. Each
/// chain of direct connections collapses to a single edge label; a chain
/// that closes on itself without touching a crossing becomes a free loop.
pub fn closure_diagram(
    crossings: &[Crossing],
    extra_pairs: &[[&'static str; 2]],
    matching: &[(&str, &str)],
) -> LinkDiagram {
    let joins: Vec<(String, String)> = extra_pairs
        .iter()
        .map(|p| (p[0].to_owned(), p[1].to_owned()))
        .chain(matching.iter().map(|&(a, b)| (a.to_owned(), b.to_owned())))
        .collect();

    // group labels by the chains of joins
    let mut group: BTreeMap<String, String> = BTreeMap::new();
    let find = |group: &BTreeMap<String, String>, label: &str| -> String {
        let mut cur = label.to_owned();
        while let Some(up) = group.get(&cur) {
            if *up == cur {
                break;
            }
            cur = up.clone();
        }
        cur
    };
    for (a, b) in &joins {
        for l in [a, b] {
            group.entry(l.clone()).or_insert_with(|| l.clone());
        }
        let ra = find(&group, a);
        let rb = find(&group, b);
        if ra != rb {
            // deterministic representative: the smaller label
            let (keep, drop) = if ra < rb { (ra, rb) } else { (rb, ra) };
            group.insert(drop, keep);
        }
    }

    let mut crossing_occurrences: BTreeMap<String, usize> = BTreeMap::new();
    for c in crossings {
        for end in &c.ends {
            *crossing_occurrences.entry(end.clone()).or_default() += 1;
        }
    }

    // chains with no crossing end are closed loops
    let mut free_loops = 0;
    let mut roots: Vec<String> = group
        .keys()
        .map(|l| find(&group, l))
        .collect();
    roots.sort_unstable();
    roots.dedup();
    for root in &roots {
        let members: Vec<&String> = group.keys().filter(|l| find(&group, l) == *root).collect();
        let touches_crossing = members
            .iter()
            .any(|l| crossing_occurrences.contains_key(*l));
        if !touches_crossing {
            free_loops += 1;
        }
    }

    let mut diagram = LinkDiagram {
        crossings: Vec::with_capacity(crossings.len()),
        free_loops,
    };
    for c in crossings {
        let ends = [
            find(&group, &c.ends[0]),
            find(&group, &c.ends[1]),
            find(&group, &c.ends[2]),
            find(&group, &c.ends[3]),
        ];
        diagram.crossings.push(Crossing { kind: c.kind, ends });
    }
    diagram
}

/// Which of the two move-2 shadings to use when inserting a crossing pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum R2Template {
    /// X1 then X2.
    Type1,
    /// X2 then X1.
    Type2,
}

/// Insert a cancelling crossing pair along the edge `label`: the edge is cut
/// and one of its halves is pushed over the other, per the chosen move-2
/// template. The result is regular-isotopic to the input, so eta is
/// unchanged at every level.
pub fn insert_r2(
    d: &LinkDiagram,
    label: &str,
    template: R2Template,
) -> Result<LinkDiagram, RelationError> {
    let mut occurrences = Vec::new();
    for (ci, c) in d.crossings.iter().enumerate() {
        for (slot, end) in c.ends.iter().enumerate() {
            if end == label {
                occurrences.push((ci, slot));
            }
        }
    }
    if occurrences.len() != 2 {
        return Err(RelationError::BadEdge(label.to_owned()));
    }

    let used = d.label_counts();
    let fresh = |tag: &str, n: usize| -> String {
        let mut i = 0;
        loop {
            let candidate = format!("{label}_{tag}{}", i + n);
            if !used.contains_key(candidate.as_str()) {
                return candidate;
            }
            i += 1;
        }
    };
    let la = fresh("a", 0);
    let lc = fresh("c", 100);
    let lg = fresh("g", 200);
    let le = fresh("e", 300);
    let lf = fresh("f", 400);

    let mut out = d.clone();
    let (c1, s1) = occurrences[0];
    let (c2, s2) = occurrences[1];
    out.crossings[c1].ends[s1] = la.clone();
    out.crossings[c2].ends[s2] = lc.clone();

    // LeftMove2 fragment X?[a,b,f,e] X?[d,e,f,c] with the b and d ends
    // joined into one edge g, leaving a and c open
    let (k1, k2) = match template {
        R2Template::Type1 => (CrossingKind::X1, CrossingKind::X2),
        R2Template::Type2 => (CrossingKind::X2, CrossingKind::X1),
    };
    out.crossings.push(Crossing {
        kind: k1,
        ends: [la, lg.clone(), lf.clone(), le.clone()],
    });
    out.crossings.push(Crossing {
        kind: k2,
        ends: [lg, le, lf, lc],
    });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::statesum::{state_sum, Level};

    #[test]
    fn boundaries_are_the_once_occurring_labels() {
        for t in move_templates() {
            let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
            for c in t.left.iter().chain(t.right.iter()) {
                for end in &c.ends {
                    *counts.entry(end.as_str()).or_default() += 1;
                }
            }
            for p in &t.right_pairs {
                for l in p {
                    *counts.entry(l).or_default() += 1;
                }
            }
            // right side counts double (left and right share the boundary)
            let left_only: BTreeMap<&str, usize> = {
                let mut m: BTreeMap<&str, usize> = BTreeMap::new();
                for c in &t.left {
                    for end in &c.ends {
                        *m.entry(end.as_str()).or_default() += 1;
                    }
                }
                m
            };
            let once: Vec<&str> = left_only
                .iter()
                .filter(|&(_, &n)| n == 1)
                .map(|(&l, _)| l)
                .collect();
            let mut boundary = t.boundary.clone();
            boundary.sort_unstable();
            assert_eq!(once, boundary, "template {}", t.name);
        }
    }

    #[test]
    fn matching_counts_are_double_factorials() {
        let labels = ["a", "b", "c", "d", "e", "f", "g", "h"];
        assert_eq!(exterior_matchings(&labels[..2]).unwrap().len(), 1);
        assert_eq!(exterior_matchings(&labels[..4]).unwrap().len(), 3);
        assert_eq!(exterior_matchings(&labels[..6]).unwrap().len(), 15);
        assert_eq!(exterior_matchings(&labels[..8]).unwrap().len(), 105);
        assert!(matches!(
            exterior_matchings(&labels[..3]),
            Err(RelationError::OddBoundary(3))
        ));
    }

    #[test]
    fn four_point_matchings_exactly() {
        let m = exterior_matchings(&["a", "b", "c", "d"]).unwrap();
        assert_eq!(
            m,
            vec![
                vec![("a", "b"), ("c", "d")],
                vec![("a", "c"), ("b", "d")],
                vec![("a", "d"), ("b", "c")],
            ]
        );
    }

    #[test]
    fn identical_sides_cancel() {
        let t = move_templates().into_iter().nth(2).unwrap();
        let mirror = MoveTemplate {
            name: "self",
            left: t.left.clone(),
            right: t.left.clone(),
            right_pairs: vec![],
            boundary: t.boundary.clone(),
        };
        for matching in exterior_matchings(&mirror.boundary).unwrap() {
            assert!(move_relation(&mirror, &matching).unwrap().is_zero());
        }
    }

    #[test]
    fn matching_mismatch_is_rejected() {
        let t = &move_templates()[0];
        assert!(matches!(
            move_relation(t, &[("a", "b"), ("c", "x")]),
            Err(RelationError::MatchingMismatch)
        ));
    }

    #[test]
    fn move2_gives_five_distinct_of_six() {
        let rels: Vec<Polynomial> = all_move_relations()
            .into_iter()
            .filter(|r| r.template.starts_with("move2"))
            .map(|r| r.polynomial)
            .collect();
        assert_eq!(rels.len(), 6);
        let mut distinct: Vec<&Polynomial> = Vec::new();
        for r in &rels {
            if !distinct.contains(&r) {
                distinct.push(r);
            }
        }
        assert_eq!(distinct.len(), 5);
    }

    #[test]
    fn twenty_seven_distinct_relations() {
        let rels = generate_all_relations();
        assert_eq!(rels.len(), 27);
        // raw relations are already primitive, so canonicalization does not
        // change them
        for r in all_move_relations() {
            assert_eq!(r.polynomial.primitive_part(), r.polynomial);
        }
    }

    #[test]
    fn move3_relation_agrees_with_diagram_route() {
        let templates = move_templates();
        let t = &templates[2];
        let matchings = exterior_matchings(&t.boundary).unwrap();
        let matching = &matchings[7];
        let direct = move_relation(t, matching).unwrap();

        let left = closure_diagram(&t.left, &[], matching);
        let right = closure_diagram(&t.right, &t.right_pairs, matching);
        assert!(left.validate().is_ok());
        assert!(right.validate().is_ok());
        let via_diagrams = state_sum(&left, Level::Full)
            .unwrap()
            .sub(&state_sum(&right, Level::Full).unwrap());
        assert_eq!(direct, via_diagrams);
    }

    #[test]
    fn closure_of_crossing_free_side_counts_loops() {
        // two parallel strands closed in parallel: two loops; closed in
        // series: one loop
        let pairs = [["a", "d"], ["b", "c"]];
        let parallel = closure_diagram(&[], &pairs, &[("a", "d"), ("b", "c")]);
        assert_eq!(parallel.free_loops, 2);
        let series = closure_diagram(&[], &pairs, &[("a", "b"), ("c", "d")]);
        assert_eq!(series.free_loops, 1);
        let cross = closure_diagram(&[], &pairs, &[("a", "c"), ("b", "d")]);
        assert_eq!(cross.free_loops, 1);
    }

    #[test]
    fn insert_r2_produces_valid_diagram() {
        let d = LinkDiagram::parse("X1 a b c d\nX2 c d a b\n").unwrap();
        for template in [R2Template::Type1, R2Template::Type2] {
            let bigger = insert_r2(&d, "c", template).unwrap();
            assert!(bigger.validate().is_ok());
            assert_eq!(bigger.crossings.len(), d.crossings.len() + 2);
        }
        assert!(matches!(
            insert_r2(&d, "nope", R2Template::Type1),
            Err(RelationError::BadEdge(_))
        ));
    }
}
