//! Buchberger's algorithm and multivariate division for the fixed lex order,
//! plus the cached level bases.
//!
//! The relation ideal is generated once (relations module); the basis for a
//! level adjoins `M^(k+1)`. Bases are reduced and monic, so each ideal has a
//! unique basis here and normal forms are canonical.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};
use std::time::{Duration, Instant};

use crate::poly::{Monomial, ParseError, Polynomial, Rational, Var};
use crate::relations;

/// Basis level: the full relation ideal, or the level-k ideal with
/// `M^(k+1)` adjoined.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BasisLevel {
    K(u32),
    Inf,
}

impl fmt::Display for BasisLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BasisLevel::K(k) => write!(f, "{k}"),
            BasisLevel::Inf => write!(f, "inf"),
        }
    }
}

/// A reduced, monic Groebner basis for the fixed lex order, sorted by
/// ascending leading monomial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroebnerBasis {
    pub level: BasisLevel,
    pub polys: Vec<Polynomial>,
    /// Set when the basis was loaded from the transcribed reference because
    /// the computation budget was exceeded.
    pub provisional: bool,
}

#[derive(Debug, thiserror::Error)]
pub enum GroebnerError {
    #[error("s-polynomial of zero polynomial")]
    ZeroInput,
    #[error("basis computation exceeded the time budget of {0:?}")]
    BudgetExceeded(Duration),
    #[error("cache i/o: {0}")]
    CacheIo(#[from] std::io::Error),
    #[error("cache file {path}: {msg}")]
    CacheFormat { path: PathBuf, msg: String },
    #[error("cache file {path}, line {line}: {source}")]
    CacheParse {
        path: PathBuf,
        line: usize,
        source: ParseError,
    },
    #[error("provisional basis rejected: generated relation does not reduce to 0")]
    FallbackRejected,
}

/// Fully reduce `p` by the list: no remaining term is divisible by any
/// leading monomial of `basis`. For an actual Groebner basis this is the
/// unique normal form.
pub fn reduce(p: &Polynomial, basis: &[Polynomial]) -> Polynomial {
    let leads: Vec<(&Monomial, &Rational)> =
        basis.iter().filter_map(|b| b.leading_term()).collect();
    let mut remainder = Polynomial::zero();
    let mut work = p.clone();
    'outer: while let Some((lm, lc)) = work.leading_term() {
        for (i, (bm, bc)) in leads.iter().enumerate() {
            if bm.divides(lm) {
                let q = bm.divide(lm).expect("divisibility checked");
                let factor = lc / *bc;
                work.sub_scaled(&basis[i], &q, &factor);
                continue 'outer;
            }
        }
        let (m, c) = work.pop_leading().expect("nonempty");
        remainder.add_term(m, c);
    }
    remainder
}

/// S-polynomial: `(lcm/lt(p))*p - (lcm/lt(q))*q`, cancelling leading terms.
pub fn s_polynomial(p: &Polynomial, q: &Polynomial) -> Result<Polynomial, GroebnerError> {
    let (pm, pc) = p.leading_term().ok_or(GroebnerError::ZeroInput)?;
    let (qm, qc) = q.leading_term().ok_or(GroebnerError::ZeroInput)?;
    let lcm = pm.lcm(qm);
    let mut s = p.mul_term(
        &pm.divide(&lcm).expect("lcm divisible"),
        &pc.clone().recip(),
    );
    s.sub_scaled(
        q,
        &qm.divide(&lcm).expect("lcm divisible"),
        &qc.clone().recip(),
    );
    Ok(s)
}

/// Reduced monic Groebner basis of the generated ideal, deterministic for a
/// given generator sequence. Normal selection strategy: pending pairs are
/// processed by smallest leading-monomial lcm, ties broken by generation
/// index. Buchberger's coprimality and chain criteria prune pairs.
pub fn buchberger(generators: &[Polynomial]) -> Vec<Polynomial> {
    buchberger_with_budget(generators, None).expect("no budget set")
}

pub fn buchberger_with_budget(
    generators: &[Polynomial],
    budget: Option<Duration>,
) -> Result<Vec<Polynomial>, GroebnerError> {
    let start = Instant::now();
    let mut basis: Vec<Polynomial> = Vec::new();
    for g in generators {
        if !g.is_zero() {
            basis.push(g.primitive_part());
        }
    }

    // pending pairs keyed by (lcm, i, j); processed pairs kept for the
    // chain criterion
    let mut pending: BTreeSet<(Monomial, usize, usize)> = BTreeSet::new();
    let mut considered: BTreeSet<(usize, usize)> = BTreeSet::new();
    let lcm_of = |basis: &[Polynomial], i: usize, j: usize| -> Monomial {
        basis[i]
            .leading_monomial()
            .unwrap()
            .lcm(basis[j].leading_monomial().unwrap())
    };
    for i in 0..basis.len() {
        for j in i + 1..basis.len() {
            pending.insert((lcm_of(&basis, i, j), i, j));
        }
    }

    while let Some(entry) = pending.iter().next().cloned() {
        if let Some(limit) = budget {
            if start.elapsed() > limit {
                return Err(GroebnerError::BudgetExceeded(limit));
            }
        }
        pending.remove(&entry);
        let (lcm, i, j) = entry;
        considered.insert((i, j));

        let lm_i = basis[i].leading_monomial().unwrap();
        let lm_j = basis[j].leading_monomial().unwrap();
        // product criterion
        if lm_i.is_coprime_with(lm_j) {
            continue;
        }
        // chain criterion: some k with lm_k | lcm and both (i,k), (j,k)
        // already handled
        let chained = (0..basis.len()).any(|k| {
            k != i
                && k != j
                && basis[k].leading_monomial().unwrap().divides(&lcm)
                && considered.contains(&key(i, k))
                && considered.contains(&key(j, k))
        });
        if chained {
            continue;
        }

        let s = s_polynomial(&basis[i], &basis[j]).expect("basis elements nonzero");
        let r = reduce(&s, &basis).primitive_part();
        if r.is_zero() {
            continue;
        }
        let new_idx = basis.len();
        basis.push(r);
        for t in 0..new_idx {
            pending.insert((lcm_of(&basis, t, new_idx), t, new_idx));
        }
    }

    Ok(interreduce(basis))
}

fn key(a: usize, b: usize) -> (usize, usize) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Minimalize and tail-reduce a Groebner basis; output is monic and sorted
/// ascending by leading monomial.
fn interreduce(mut basis: Vec<Polynomial>) -> Vec<Polynomial> {
    // drop elements whose leading monomial is divisible by another's
    basis.sort_by(|a, b| {
        a.leading_monomial()
            .unwrap()
            .cmp(b.leading_monomial().unwrap())
    });
    let mut minimal: Vec<Polynomial> = Vec::new();
    for g in basis.into_iter() {
        let lm = *g.leading_monomial().unwrap();
        if !minimal
            .iter()
            .any(|h| h.leading_monomial().unwrap().divides(&lm))
        {
            minimal.retain(|h| !lm.divides(h.leading_monomial().unwrap()));
            minimal.push(g);
        }
    }
    // tail-reduce each element against the rest until stable
    loop {
        let mut changed = false;
        for i in 0..minimal.len() {
            let others: Vec<Polynomial> = minimal
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, g)| g.clone())
                .collect();
            let r = reduce(&minimal[i], &others);
            if r != minimal[i] {
                minimal[i] = r.primitive_part();
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let mut out: Vec<Polynomial> = minimal.iter().map(Polynomial::monic).collect();
    out.sort_by(|a, b| {
        a.leading_monomial()
            .unwrap()
            .cmp(b.leading_monomial().unwrap())
    });
    out
}

/// Outcome of checking a computed basis against a transcribed reference
/// list: mutual ideal membership by normal forms.
#[derive(Clone, Debug, Default)]
pub struct VerifyReport {
    /// For each reference polynomial: does it reduce to 0 modulo the basis?
    pub reference_in_basis: Vec<bool>,
    /// For each basis polynomial: does it reduce to 0 divided by the
    /// reference list?
    pub basis_in_reference: Vec<bool>,
}

impl VerifyReport {
    pub fn all_pass(&self) -> bool {
        self.reference_in_basis.iter().all(|&b| b)
            && self.basis_in_reference.iter().all(|&b| b)
    }
}

pub fn verify_against_reference(basis: &GroebnerBasis, reference: &[Polynomial]) -> VerifyReport {
    VerifyReport {
        reference_in_basis: reference
            .iter()
            .map(|r| reduce(r, &basis.polys).is_zero())
            .collect(),
        basis_in_reference: basis
            .polys
            .iter()
            .map(|b| reduce(b, reference).is_zero())
            .collect(),
    }
}

pub const CACHE_HEADER_PREFIX: &str = "vse-gb v1 order=lex vars=A,B,F,X,Y,Z,M,o";

/// Configuration for basis computation and caching.
#[derive(Clone, Debug)]
pub struct BasisConfig {
    /// Directory for cached bases; `None` disables the cache.
    pub cache_dir: Option<PathBuf>,
    /// Time budget for Buchberger; exceeding it falls back to the
    /// transcribed reference basis (level inf only).
    pub time_budget: Option<Duration>,
}

impl Default for BasisConfig {
    fn default() -> Self {
        BasisConfig {
            cache_dir: default_cache_dir(),
            time_budget: Some(Duration::from_secs(600)),
        }
    }
}

/// `$VSE_GB_CACHE`, else the platform cache directory, else a local
/// `.vse-cache`.
pub fn default_cache_dir() -> Option<PathBuf> {
    if let Ok(dir) = std::env::var("VSE_GB_CACHE") {
        if !dir.is_empty() {
            return Some(PathBuf::from(dir));
        }
    }
    if let Ok(xdg) = std::env::var("XDG_CACHE_HOME") {
        if !xdg.is_empty() {
            return Some(Path::new(&xdg).join("vse"));
        }
    }
    if let Ok(home) = std::env::var("HOME") {
        if !home.is_empty() {
            return Some(Path::new(&home).join(".cache").join("vse"));
        }
    }
    Some(PathBuf::from(".vse-cache"))
}

/// Computes and caches the level bases; cheap to clone handles via `Arc`.
pub struct BasisProvider {
    config: BasisConfig,
    memo: Mutex<HashMap<BasisLevel, Arc<GroebnerBasis>>>,
}

impl BasisProvider {
    pub fn new(config: BasisConfig) -> BasisProvider {
        BasisProvider {
            config,
            memo: Mutex::new(HashMap::new()),
        }
    }

    pub fn config(&self) -> &BasisConfig {
        &self.config
    }

    /// The reduced basis for a level: from memory, then the disk cache,
    /// then computed (and cached).
    pub fn basis(&self, level: BasisLevel) -> Result<Arc<GroebnerBasis>, GroebnerError> {
        if let Some(hit) = self.memo.lock().unwrap().get(&level) {
            return Ok(hit.clone());
        }
        let basis = Arc::new(self.load_or_compute(level)?);
        self.memo
            .lock()
            .unwrap()
            .insert(level, basis.clone());
        Ok(basis)
    }

    fn cache_path(&self, level: BasisLevel) -> Option<PathBuf> {
        self.config.cache_dir.as_ref().map(|dir| {
            dir.join(format!(
                "vse-gb-v1-{}-level-{}.txt",
                env!("CARGO_PKG_VERSION"),
                level
            ))
        })
    }

    fn load_or_compute(&self, level: BasisLevel) -> Result<GroebnerBasis, GroebnerError> {
        if let Some(path) = self.cache_path(level) {
            if path.exists() {
                return read_cache(&path, level);
            }
        }
        let basis = compute_basis(level, self.config.time_budget)?;
        if let Some(path) = self.cache_path(level) {
            // a failed cache write is reported, not fatal: the basis is
            // already in memory
            write_cache(&path, &basis)?;
        }
        Ok(basis)
    }
}

/// Generators of the level ideal: the move relations, plus `M^(k+1)` at a
/// finite level.
pub fn level_generators(level: BasisLevel) -> Vec<Polynomial> {
    let mut gens = relations::generate_all_relations();
    if let BasisLevel::K(k) = level {
        gens.push(Polynomial::monomial(Monomial::var_pow(Var::M, k + 1)));
    }
    gens
}

fn compute_basis(
    level: BasisLevel,
    budget: Option<Duration>,
) -> Result<GroebnerBasis, GroebnerError> {
    let gens = level_generators(level);
    match buchberger_with_budget(&gens, budget) {
        Ok(polys) => Ok(GroebnerBasis {
            level,
            polys,
            provisional: false,
        }),
        Err(GroebnerError::BudgetExceeded(limit)) if level == BasisLevel::Inf => {
            let reference = crate::reference::printed_basis_b_inf();
            // accept the transcription only if the generated relations all
            // reduce to 0 against it
            if gens.iter().any(|g| !reduce(g, &reference).is_zero()) {
                return Err(GroebnerError::FallbackRejected);
            }
            let _ = limit;
            Ok(GroebnerBasis {
                level,
                polys: interreduce(reference),
                provisional: true,
            })
        }
        Err(e) => Err(e),
    }
}

fn read_cache(path: &Path, level: BasisLevel) -> Result<GroebnerBasis, GroebnerError> {
    let text = std::fs::read_to_string(path)?;
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or_else(|| GroebnerError::CacheFormat {
        path: path.to_owned(),
        msg: "empty cache file".into(),
    })?;
    let expected = format!("{CACHE_HEADER_PREFIX} level={level} count=");
    let count: usize = header
        .strip_prefix(&expected)
        .and_then(|rest| rest.parse().ok())
        .ok_or_else(|| GroebnerError::CacheFormat {
            path: path.to_owned(),
            msg: format!("bad header '{header}'"),
        })?;
    let mut polys = Vec::with_capacity(count);
    for (idx, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let p: Polynomial = line.parse().map_err(|e| GroebnerError::CacheParse {
            path: path.to_owned(),
            line: idx + 1,
            source: e,
        })?;
        polys.push(p);
    }
    if polys.len() != count {
        return Err(GroebnerError::CacheFormat {
            path: path.to_owned(),
            msg: format!("expected {count} polynomials, found {}", polys.len()),
        });
    }
    Ok(GroebnerBasis {
        level,
        polys,
        provisional: false,
    })
}

/// Serialize a basis to the cache format: one header line, then one
/// canonical polynomial per line.
pub fn format_cache(basis: &GroebnerBasis) -> String {
    let mut out = format!(
        "{CACHE_HEADER_PREFIX} level={} count={}\n",
        basis.level,
        basis.polys.len()
    );
    for p in &basis.polys {
        out.push_str(&p.to_string());
        out.push('\n');
    }
    out
}

fn write_cache(path: &Path, basis: &GroebnerBasis) -> Result<(), GroebnerError> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    // single-writer atomic replace
    let tmp = path.with_extension(format!("tmp.{}", std::process::id()));
    {
        let mut fh = std::fs::File::create(&tmp)?;
        fh.write_all(format_cache(basis).as_bytes())?;
        fh.sync_all()?;
    }
    std::fs::rename(&tmp, path)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Polynomial {
        s.parse().unwrap()
    }

    #[test]
    fn s_polynomial_examples() {
        let s = s_polynomial(&p("A-B"), &p("B-F")).unwrap();
        assert_eq!(s, p("A*F-B^2"));
        let q = p("A^2*B-o");
        assert!(s_polynomial(&q, &q).unwrap().is_zero());
        assert!(matches!(
            s_polynomial(&Polynomial::zero(), &q),
            Err(GroebnerError::ZeroInput)
        ));
    }

    #[test]
    fn coprime_s_poly_reduces_to_zero() {
        let basis = vec![p("A"), p("B")];
        let s = s_polynomial(&basis[0], &basis[1]).unwrap();
        assert!(reduce(&s, &basis).is_zero());
    }

    #[test]
    fn buchberger_small_cases() {
        assert_eq!(buchberger(&[p("A")]), vec![p("A")]);
        assert_eq!(buchberger(&[p("A-B"), p("B-F")]), vec![p("B-F"), p("A-F")]);
        assert_eq!(buchberger(&[]), Vec::<Polynomial>::new());
        // 3*A and A generate the same ideal; output is monic
        assert_eq!(buchberger(&[p("3*A"), p("A^2")]), vec![p("A")]);
    }

    #[test]
    fn buchberger_lex_elimination() {
        // textbook case: {A^2 - o, A*o - 1} in lex A > o
        let gb = buchberger(&[p("A^2-o"), p("A*o-1")]);
        assert_eq!(gb, vec![p("o^3-1"), p("A-o^2")]);
        for g in &gb {
            for h in &gb {
                let s = s_polynomial(g, h).unwrap();
                assert!(reduce(&s, &gb).is_zero());
            }
        }
    }

    #[test]
    fn reduce_basics() {
        let basis = vec![p("A-B")];
        assert_eq!(reduce(&p("A"), &basis), p("B"));
        assert!(reduce(&Polynomial::zero(), &basis).is_zero());
        // linearity
        let q = p("A^2+3*B");
        let r = p("A*B-o");
        let lhs = reduce(&q.scale(&crate::poly::ratio(2, 3)).add(&r.scale(&crate::poly::ratio(-5, 1))), &basis);
        let rhs = reduce(&q, &basis)
            .scale(&crate::poly::ratio(2, 3))
            .add(&reduce(&r, &basis).scale(&crate::poly::ratio(-5, 1)));
        assert_eq!(lhs, rhs);
        // idempotence
        let nf = reduce(&q, &basis);
        assert_eq!(reduce(&nf, &basis), nf);
    }

    #[test]
    fn cache_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let basis = GroebnerBasis {
            level: BasisLevel::K(1),
            polys: vec![p("M^2"), p("A-1/2*B*o")],
            provisional: false,
        };
        let path = dir.path().join("basis.txt");
        write_cache(&path, &basis).unwrap();
        let back = read_cache(&path, BasisLevel::K(1)).unwrap();
        assert_eq!(back, basis);
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("vse-gb v1 order=lex vars=A,B,F,X,Y,Z,M,o level=1 count=2\n"));
    }

    #[test]
    fn cache_rejects_bad_header() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("basis.txt");
        std::fs::write(&path, "bogus\nA\n").unwrap();
        assert!(matches!(
            read_cache(&path, BasisLevel::K(1)),
            Err(GroebnerError::CacheFormat { .. })
        ));
    }
}
