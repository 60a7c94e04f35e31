//! State sums of the 3-fold crossing expansion.
//!
//! Every crossing is resolved in one of three ways. For an `X1` crossing on
//! ends `(a, b, c, d)` the transitions carry weights `M*A` for the smoothing
//! `(a,b)+(c,d)`, `M*B` for `(a,d)+(b,c)` and `F` for the virtual transition
//! `(a,c)+(b,d)`; for `X2` the weights are `M*X`, `M*Y` and `Z`. A state's
//! chosen pairs form a 2-regular multigraph on the edge labels whose
//! connected components are the closed polygons of the resolved diagram;
//! each contributes a factor `o`.
//!
//! Truncating at level `k` keeps only the states with at most `k`
//! non-virtual transitions, which is exactly the state sum mod `M^(k+1)`.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::diagram::{CrossingKind, LinkDiagram, ValidationReport};
use crate::poly::{Monomial, Polynomial, Rational, Var};

/// One of the three transitions at a crossing.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Resolution {
    /// Pairs `(a,b)` and `(c,d)`.
    Smooth1,
    /// Pairs `(a,d)` and `(b,c)`.
    Smooth2,
    /// Pairs `(a,c)` and `(b,d)`; carries no `M` factor.
    Virtual,
}

impl Resolution {
    pub const ALL: [Resolution; 3] = [Resolution::Smooth1, Resolution::Smooth2, Resolution::Virtual];

    pub(crate) fn slot_pairs(self) -> [(usize, usize); 2] {
        match self {
            Resolution::Smooth1 => [(0, 1), (2, 3)],
            Resolution::Smooth2 => [(0, 3), (1, 2)],
            Resolution::Virtual => [(0, 2), (1, 3)],
        }
    }

    /// Weight variable and whether the transition carries an `M` factor.
    pub(crate) fn weight(self, kind: CrossingKind) -> (Var, bool) {
        match (kind, self) {
            (CrossingKind::X1, Resolution::Smooth1) => (Var::A, true),
            (CrossingKind::X1, Resolution::Smooth2) => (Var::B, true),
            (CrossingKind::X1, Resolution::Virtual) => (Var::F, false),
            (CrossingKind::X2, Resolution::Smooth1) => (Var::X, true),
            (CrossingKind::X2, Resolution::Smooth2) => (Var::Y, true),
            (CrossingKind::X2, Resolution::Virtual) => (Var::Z, false),
        }
    }
}

/// One resolution per crossing, in crossing order.
pub type State = Vec<Resolution>;

/// Enumeration level: all `3^n` states, or only those with at most `k`
/// non-virtual transitions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Level {
    K(u32),
    Full,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum StateSumError {
    #[error("invalid diagram: {0}")]
    InvalidDiagram(ValidationReport),
    #[error("state has {got} resolutions but the diagram has {want} crossings")]
    StateLength { got: usize, want: usize },
}

/// Disjoint-set structure with path halving, tracking the component count.
pub(crate) struct UnionFind {
    parent: Vec<u32>,
    components: usize,
}

impl UnionFind {
    pub(crate) fn new(len: usize) -> UnionFind {
        UnionFind {
            parent: (0..len as u32).collect(),
            components: len,
        }
    }

    pub(crate) fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let up = self.parent[self.parent[x as usize] as usize];
            self.parent[x as usize] = up;
            x = up;
        }
        x
    }

    pub(crate) fn union(&mut self, a: u32, b: u32) {
        let ra = self.find(a);
        let rb = self.find(b);
        if ra != rb {
            self.parent[ra as usize] = rb;
            self.components -= 1;
        }
    }

    pub(crate) fn component_count(&self) -> usize {
        self.components
    }

    pub(crate) fn reset(&mut self) {
        for (i, p) in self.parent.iter_mut().enumerate() {
            *p = i as u32;
        }
        self.components = self.parent.len();
    }
}

/// Diagram compiled to interned label ids for fast state evaluation.
pub(crate) struct Compiled {
    pub(crate) crossings: Vec<(CrossingKind, [u32; 4])>,
    pub(crate) fixed_pairs: Vec<(u32, u32)>,
    pub(crate) label_count: usize,
    pub(crate) free_loops: usize,
}

impl Compiled {
    pub(crate) fn from_diagram(d: &LinkDiagram) -> Compiled {
        let mut ids: BTreeMap<&str, u32> = BTreeMap::new();
        let mut crossings = Vec::with_capacity(d.crossings.len());
        for c in &d.crossings {
            let mut ends = [0u32; 4];
            for (slot, label) in c.ends.iter().enumerate() {
                let next = ids.len() as u32;
                ends[slot] = *ids.entry(label.as_str()).or_insert(next);
            }
            crossings.push((c.kind, ends));
        }
        Compiled {
            crossings,
            fixed_pairs: Vec::new(),
            label_count: ids.len(),
            free_loops: d.free_loops,
        }
    }

    /// Weight monomial of one state: the product of transition weights times
    /// `o^(polygons + free loops)`.
    pub(crate) fn eval(&self, state: &[Resolution], uf: &mut UnionFind) -> Monomial {
        debug_assert_eq!(state.len(), self.crossings.len());
        uf.reset();
        let mut exps = [0u32; 8];
        for ((kind, ends), &res) in self.crossings.iter().zip(state) {
            let (var, has_m) = res.weight(*kind);
            exps[var.index()] += 1;
            if has_m {
                exps[Var::M.index()] += 1;
            }
            for (i, j) in res.slot_pairs() {
                uf.union(ends[i], ends[j]);
            }
        }
        for &(a, b) in &self.fixed_pairs {
            uf.union(a, b);
        }
        exps[Var::O.index()] = (uf.component_count() + self.free_loops) as u32;
        Monomial::from_exponents(exps)
    }
}

/// Evaluate a single state of a valid diagram.
pub fn evaluate_state(d: &LinkDiagram, state: &[Resolution]) -> Result<Polynomial, StateSumError> {
    let report = d.validate();
    if !report.is_ok() {
        return Err(StateSumError::InvalidDiagram(report));
    }
    if state.len() != d.crossings.len() {
        return Err(StateSumError::StateLength {
            got: state.len(),
            want: d.crossings.len(),
        });
    }
    let compiled = Compiled::from_diagram(d);
    let mut uf = UnionFind::new(compiled.label_count);
    Ok(Polynomial::monomial(compiled.eval(state, &mut uf)))
}

/// Iterator over the states of a diagram at a given level, in a fixed
/// deterministic order: at level `k`, grouped by the number of non-virtual
/// transitions (ascending), then by the set of smoothed crossings
/// (lexicographic), then by the smoothing choices (binary counting with
/// `Smooth1 = 0`, `Smooth2 = 1`).
pub struct StateIter {
    n: usize,
    mode: IterMode,
}

enum IterMode {
    Full { digits: Option<Vec<Resolution>> },
    Trunc(TruncIter),
}

struct TruncIter {
    k: usize,
    // current number of smoothed crossings
    level: usize,
    subset: Vec<usize>,
    bits: u64,
    done: bool,
}

impl StateIter {
    fn new(n: usize, level: Level) -> StateIter {
        let mode = match level {
            Level::Full => IterMode::Full {
                digits: Some(vec![Resolution::Virtual; n]),
            },
            Level::K(k) => {
                let k = (k as usize).min(n);
                IterMode::Trunc(TruncIter {
                    k,
                    level: 0,
                    subset: Vec::new(),
                    bits: 0,
                    done: false,
                })
            }
        };
        StateIter { n, mode }
    }
}

impl Iterator for StateIter {
    type Item = State;

    fn next(&mut self) -> Option<State> {
        match &mut self.mode {
            IterMode::Full { digits } => {
                let current = digits.as_ref()?.clone();
                // advance the base-3 odometer, last crossing fastest
                let ds = digits.as_mut().unwrap();
                let mut i = self.n;
                loop {
                    if i == 0 {
                        *digits = None;
                        break;
                    }
                    i -= 1;
                    ds[i] = match ds[i] {
                        Resolution::Virtual => Resolution::Smooth1,
                        Resolution::Smooth1 => Resolution::Smooth2,
                        Resolution::Smooth2 => {
                            ds[i] = Resolution::Virtual;
                            continue;
                        }
                    };
                    break;
                }
                Some(current)
            }
            IterMode::Trunc(it) => {
                if it.done {
                    return None;
                }
                let mut state = vec![Resolution::Virtual; self.n];
                for (j, &pos) in it.subset.iter().enumerate() {
                    state[pos] = if it.bits >> j & 1 == 0 {
                        Resolution::Smooth1
                    } else {
                        Resolution::Smooth2
                    };
                }
                it.advance(self.n);
                Some(state)
            }
        }
    }
}

impl TruncIter {
    fn advance(&mut self, n: usize) {
        self.bits += 1;
        if self.bits < 1u64 << self.level {
            return;
        }
        self.bits = 0;
        // next subset of the current size, lexicographic
        if next_combination(&mut self.subset, n) {
            return;
        }
        // next size
        self.level += 1;
        if self.level > self.k {
            self.done = true;
            return;
        }
        self.subset = (0..self.level).collect();
    }
}

/// Advance `subset` to the next combination of the same size drawn from
/// `0..n`; false when exhausted.
fn next_combination(subset: &mut [usize], n: usize) -> bool {
    let len = subset.len();
    let mut i = len;
    loop {
        if i == 0 {
            return false;
        }
        i -= 1;
        if subset[i] < n - (len - i) {
            subset[i] += 1;
            for j in i + 1..len {
                subset[j] = subset[j - 1] + 1;
            }
            return true;
        }
    }
}

/// All states of `d` at the given level.
pub fn enumerate_states(d: &LinkDiagram, level: Level) -> StateIter {
    StateIter::new(d.crossings.len(), level)
}

/// Closed-form count of the states at a level: `3^n` for the full expansion
/// (or whenever `k >= n`), otherwise the sum over `l <= k` of
/// `binomial(n, l) * 2^l`.
pub fn count_states(n: u64, level: Level) -> BigUint {
    match level {
        Level::Full => BigUint::from(3u32).pow(u32::try_from(n).expect("crossing count")),
        Level::K(k) => {
            let k = (k as u64).min(n);
            let mut total = BigUint::zero();
            let mut binom = BigUint::one();
            let mut pow2 = BigUint::one();
            for l in 0..=k {
                if l > 0 {
                    binom = binom * BigUint::from(n - l + 1) / BigUint::from(l);
                    pow2 *= BigUint::from(2u32);
                }
                total += &binom * &pow2;
            }
            total
        }
    }
}

fn sum_monomials(counts: BTreeMap<Monomial, u64>) -> Polynomial {
    Polynomial::from_terms(
        counts
            .into_iter()
            .map(|(m, c)| (m, Rational::from_integer(c.into()))),
    )
}

const PARALLEL_THRESHOLD: u64 = 1 << 17;
const CHUNK: usize = 1 << 13;

/// State sum of a diagram at a level. At level `k` this equals the full
/// state sum truncated at M-degree `k`. Large enumerations are evaluated in
/// parallel; exact arithmetic makes the result identical to the sequential
/// sum.
pub fn state_sum(d: &LinkDiagram, level: Level) -> Result<Polynomial, StateSumError> {
    let states = count_states(d.crossings.len() as u64, level);
    state_sum_with(d, level, states > BigUint::from(PARALLEL_THRESHOLD))
}

/// State sum with explicit control over parallel evaluation.
pub fn state_sum_with(
    d: &LinkDiagram,
    level: Level,
    parallel: bool,
) -> Result<Polynomial, StateSumError> {
    let report = d.validate();
    if !report.is_ok() {
        return Err(StateSumError::InvalidDiagram(report));
    }
    let compiled = Compiled::from_diagram(d);
    let mut states = enumerate_states(d, level);
    let mut counts: BTreeMap<Monomial, u64> = BTreeMap::new();
    if parallel {
        loop {
            let chunk: Vec<State> = states.by_ref().take(CHUNK).collect();
            if chunk.is_empty() {
                break;
            }
            let partial = chunk
                .par_chunks(256)
                .map(|part| {
                    let mut uf = UnionFind::new(compiled.label_count);
                    let mut local: BTreeMap<Monomial, u64> = BTreeMap::new();
                    for s in part {
                        *local.entry(compiled.eval(s, &mut uf)).or_default() += 1;
                    }
                    local
                })
                .reduce(BTreeMap::new, merge_counts);
            counts = merge_counts(counts, partial);
        }
    } else {
        let mut uf = UnionFind::new(compiled.label_count);
        for s in states {
            let m = compiled.eval(&s, &mut uf);
            *counts.entry(m).or_default() += 1;
        }
    }
    Ok(sum_monomials(counts))
}

fn merge_counts(
    mut into: BTreeMap<Monomial, u64>,
    from: BTreeMap<Monomial, u64>,
) -> BTreeMap<Monomial, u64> {
    for (m, c) in from {
        *into.entry(m).or_default() = into.get(&m).copied().unwrap_or(0).checked_add(c).expect("state count overflow");
    }
    into
}

/// Full state sum of a fragment: explicit crossings plus fixed connection
/// pairs, all over interned labels. Used for the move-relation generators.
pub(crate) fn fragment_state_sum(compiled: &Compiled) -> Polynomial {
    let n = compiled.crossings.len();
    let mut counts: BTreeMap<Monomial, u64> = BTreeMap::new();
    let mut uf = UnionFind::new(compiled.label_count);
    for s in StateIter::new(n, Level::Full) {
        *counts.entry(compiled.eval(&s, &mut uf)).or_default() += 1;
    }
    sum_monomials(counts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::LinkDiagram;

    fn d(src: &str) -> LinkDiagram {
        LinkDiagram::parse(src).unwrap()
    }

    fn p(s: &str) -> Polynomial {
        s.parse().unwrap()
    }

    #[test]
    fn evaluate_state_hand_examples() {
        let kink = d("X1 a b a b\n");
        assert_eq!(
            evaluate_state(&kink, &[Resolution::Virtual]).unwrap(),
            p("F*o^2")
        );
        assert_eq!(
            evaluate_state(&kink, &[Resolution::Smooth1]).unwrap(),
            p("M*A*o")
        );
        let kink2 = d("X1 a a b b\n");
        assert_eq!(
            evaluate_state(&kink2, &[Resolution::Smooth1]).unwrap(),
            p("M*A*o^2")
        );
    }

    #[test]
    fn evaluate_state_rejects_bad_input() {
        let open = d("X1 a b c d\n");
        assert!(matches!(
            evaluate_state(&open, &[Resolution::Virtual]),
            Err(StateSumError::InvalidDiagram(_))
        ));
        let kink = d("X1 a b a b\n");
        assert!(matches!(
            evaluate_state(&kink, &[]),
            Err(StateSumError::StateLength { got: 0, want: 1 })
        ));
    }

    #[test]
    fn state_sum_hand_examples() {
        assert_eq!(
            state_sum(&d("X1 a b a b\n"), Level::Full).unwrap(),
            p("M*A*o + M*B*o + F*o^2")
        );
        assert_eq!(
            state_sum(&d("X1 a a b b\n"), Level::Full).unwrap(),
            p("M*A*o^2 + M*B*o + F*o")
        );
        assert_eq!(state_sum(&d("X1 a a b b\n"), Level::K(0)).unwrap(), p("F*o"));
    }

    #[test]
    fn enumeration_counts() {
        let two = d("X1 a b c d\nX2 c d a b\n");
        assert_eq!(enumerate_states(&two, Level::Full).count(), 9);
        assert_eq!(enumerate_states(&two, Level::K(1)).count(), 5);
        assert_eq!(count_states(2, Level::K(1)), BigUint::from(5u32));
        assert_eq!(count_states(20, Level::K(2)), BigUint::from(801u32));
        assert_eq!(count_states(500, Level::K(2)), BigUint::from(500_001u32));
        assert_eq!(count_states(3, Level::K(5)), BigUint::from(27u32));
    }

    #[test]
    fn truncated_enumeration_starts_all_virtual() {
        let two = d("X1 a b c d\nX2 c d a b\n");
        let states: Vec<State> = enumerate_states(&two, Level::K(1)).collect();
        assert_eq!(states[0], vec![Resolution::Virtual, Resolution::Virtual]);
        assert_eq!(states.len(), 5);
        for s in &states[1..] {
            let smoothed = s.iter().filter(|r| **r != Resolution::Virtual).count();
            assert_eq!(smoothed, 1);
        }
    }

    #[test]
    fn count_matches_enumeration_small() {
        for src in ["X1 a b a b\n", "X1 a b c d\nX2 c d a b\n", "X1 a b c d\nX1 c d e f\nX1 e f a b\n"] {
            let diagram = d(src);
            let n = diagram.crossings.len() as u64;
            for k in 0..=(n as u32 + 2) {
                let counted = count_states(n, Level::K(k));
                let walked = enumerate_states(&diagram, Level::K(k)).count();
                assert_eq!(counted, BigUint::from(walked));
            }
            assert_eq!(
                count_states(n, Level::Full),
                BigUint::from(enumerate_states(&diagram, Level::Full).count())
            );
        }
    }

    #[test]
    fn truncation_consistency() {
        let diagrams = [
            "X1 a b a b\n",
            "X1 a a b b\nloop\n",
            "X1 a b c d\nX2 c d a b\n",
            "X1 a b c d\nX1 c d e f\nX1 e f a b\n",
            "X2 a b c d\nX1 d c b a\n",
        ];
        for src in diagrams {
            let diagram = d(src);
            let full = state_sum(&diagram, Level::Full).unwrap();
            for k in 0..=3 {
                assert_eq!(
                    state_sum(&diagram, Level::K(k)).unwrap(),
                    full.truncate_m(k),
                    "level {k} of {src:?}"
                );
            }
        }
    }

    #[test]
    fn disjoint_loop_multiplies_by_o() {
        let base = d("X1 a b c d\nX2 c d a b\n");
        let with_loop = base.with_extra_loop();
        let o = Polynomial::variable(Var::O);
        assert_eq!(
            state_sum(&with_loop, Level::Full).unwrap(),
            o.mul(&state_sum(&base, Level::Full).unwrap())
        );
    }

    #[test]
    fn parallel_equals_sequential() {
        let diagram = d("X1 a b c d\nX1 c d e f\nX1 e f g h\nX2 g h i j\nX2 i j a b\n");
        for level in [Level::Full, Level::K(2)] {
            let seq = state_sum_with(&diagram, level, false).unwrap();
            let par = state_sum_with(&diagram, level, true).unwrap();
            assert_eq!(seq, par);
        }
    }

    /// Independent polygon counter: walk the pairing multigraph by DFS
    /// instead of union-find.
    fn dfs_components(pairs: &[(u32, u32)], nlabels: usize) -> usize {
        let mut adj = vec![Vec::new(); nlabels];
        for &(a, b) in pairs {
            adj[a as usize].push(b);
            adj[b as usize].push(a);
        }
        let mut seen = vec![false; nlabels];
        let mut comps = 0;
        for start in 0..nlabels {
            if seen[start] {
                continue;
            }
            comps += 1;
            let mut stack = vec![start as u32];
            seen[start] = true;
            while let Some(v) = stack.pop() {
                for &w in &adj[v as usize] {
                    if !seen[w as usize] {
                        seen[w as usize] = true;
                        stack.push(w);
                    }
                }
            }
        }
        comps
    }

    #[test]
    fn o_exponent_matches_graph_traversal() {
        let diagram = d("X1 a b c d\nX2 d a b c\nX1 5 7 6 6\nX1 7 5 8 8\n");
        let compiled = Compiled::from_diagram(&diagram);
        let mut uf = UnionFind::new(compiled.label_count);
        for state in enumerate_states(&diagram, Level::Full) {
            let m = compiled.eval(&state, &mut uf);
            let mut pairs = Vec::new();
            for ((_, ends), &res) in compiled.crossings.iter().zip(&state) {
                for (i, j) in res.slot_pairs() {
                    pairs.push((ends[i], ends[j]));
                }
            }
            let expect = dfs_components(&pairs, compiled.label_count);
            assert_eq!(m.exponent(Var::O) as usize, expect);
        }
    }
}
