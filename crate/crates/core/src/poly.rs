//! Exact sparse multivariate polynomial arithmetic over the rationals in the
//! fixed ring Q[A, B, F, X, Y, Z, M, o], with the lexicographic monomial
//! order (A compared first, then B, F, X, Y, Z, M, o).

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Rational = BigRational;

/// Construct a rational from an integer pair. Panics if `den` is zero.
pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// The eight ring variables, in the order used for monomial comparison.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Var {
    A,
    B,
    F,
    X,
    Y,
    Z,
    M,
    O,
}

impl Var {
    pub const ALL: [Var; 8] = [
        Var::A,
        Var::B,
        Var::F,
        Var::X,
        Var::Y,
        Var::Z,
        Var::M,
        Var::O,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn symbol(self) -> char {
        match self {
            Var::A => 'A',
            Var::B => 'B',
            Var::F => 'F',
            Var::X => 'X',
            Var::Y => 'Y',
            Var::Z => 'Z',
            Var::M => 'M',
            Var::O => 'o',
        }
    }

    pub fn from_symbol(c: char) -> Option<Var> {
        match c {
            'A' => Some(Var::A),
            'B' => Some(Var::B),
            'F' => Some(Var::F),
            'X' => Some(Var::X),
            'Y' => Some(Var::Y),
            'Z' => Some(Var::Z),
            'M' => Some(Var::M),
            'o' => Some(Var::O),
            _ => None,
        }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.symbol())
    }
}

/// Exponent vector over (A, B, F, X, Y, Z, M, o). The derived `Ord` compares
/// the A exponent first, which is exactly the lexicographic order with
/// A > B > F > X > Y > Z > M > o.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial([u32; 8]);

impl Monomial {
    pub const ONE: Monomial = Monomial([0; 8]);

    pub fn from_exponents(exps: [u32; 8]) -> Monomial {
        Monomial(exps)
    }

    pub fn var(v: Var) -> Monomial {
        Monomial::var_pow(v, 1)
    }

    pub fn var_pow(v: Var, e: u32) -> Monomial {
        let mut exps = [0; 8];
        exps[v.index()] = e;
        Monomial(exps)
    }

    pub fn exponents(&self) -> &[u32; 8] {
        &self.0
    }

    pub fn exponent(&self, v: Var) -> u32 {
        self.0[v.index()]
    }

    pub fn is_one(&self) -> bool {
        self.0 == [0; 8]
    }

    pub fn total_degree(&self) -> u64 {
        self.0.iter().map(|&e| e as u64).sum()
    }

    pub fn mul(&self, rhs: &Monomial) -> Monomial {
        let mut exps = [0; 8];
        for i in 0..8 {
            exps[i] = self.0[i]
                .checked_add(rhs.0[i])
                .expect("monomial exponent overflow");
        }
        Monomial(exps)
    }

    pub fn pow(&self, e: u32) -> Monomial {
        let mut exps = [0; 8];
        for i in 0..8 {
            exps[i] = self.0[i]
                .checked_mul(e)
                .expect("monomial exponent overflow");
        }
        Monomial(exps)
    }

    /// Whether `self` divides `rhs`.
    pub fn divides(&self, rhs: &Monomial) -> bool {
        self.0.iter().zip(rhs.0.iter()).all(|(a, b)| a <= b)
    }

    /// `rhs / self`, if divisible.
    pub fn divide(&self, rhs: &Monomial) -> Option<Monomial> {
        let mut exps = [0; 8];
        for i in 0..8 {
            exps[i] = rhs.0[i].checked_sub(self.0[i])?;
        }
        Some(Monomial(exps))
    }

    pub fn lcm(&self, rhs: &Monomial) -> Monomial {
        let mut exps = [0; 8];
        for i in 0..8 {
            exps[i] = self.0[i].max(rhs.0[i]);
        }
        Monomial(exps)
    }

    /// True when the two monomials share no variable.
    pub fn is_coprime_with(&self, rhs: &Monomial) -> bool {
        self.0.iter().zip(rhs.0.iter()).all(|(a, b)| *a == 0 || *b == 0)
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_one() {
            return write!(f, "1");
        }
        let mut first = true;
        for v in Var::ALL {
            let e = self.exponent(v);
            if e == 0 {
                continue;
            }
            if !first {
                write!(f, "*")?;
            }
            first = false;
            write!(f, "{}", v.symbol())?;
            if e > 1 {
                write!(f, "^{e}")?;
            }
        }
        Ok(())
    }
}

/// Sparse polynomial: finite map from monomial to nonzero rational
/// coefficient. The map order is the monomial order, so the last entry is
/// the leading term.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Polynomial {
    terms: BTreeMap<Monomial, Rational>,
}

impl Polynomial {
    pub fn zero() -> Polynomial {
        Polynomial::default()
    }

    pub fn one() -> Polynomial {
        Polynomial::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Polynomial {
        Polynomial::term(Monomial::ONE, c)
    }

    pub fn from_int(n: i64) -> Polynomial {
        Polynomial::constant(ratio(n, 1))
    }

    pub fn variable(v: Var) -> Polynomial {
        Polynomial::monomial(Monomial::var(v))
    }

    pub fn monomial(m: Monomial) -> Polynomial {
        Polynomial::term(m, Rational::one())
    }

    pub fn term(m: Monomial, c: Rational) -> Polynomial {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Polynomial { terms }
    }

    pub fn from_terms<I: IntoIterator<Item = (Monomial, Rational)>>(iter: I) -> Polynomial {
        let mut p = Polynomial::zero();
        for (m, c) in iter {
            p.add_term(m, c);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in ascending monomial order.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    /// Terms in descending monomial order (canonical print order).
    pub fn terms_desc(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter().rev()
    }

    pub fn coeff(&self, m: &Monomial) -> Option<&Rational> {
        self.terms.get(m)
    }

    pub fn leading_monomial(&self) -> Option<&Monomial> {
        self.terms.last_key_value().map(|(m, _)| m)
    }

    pub fn leading_coeff(&self) -> Option<&Rational> {
        self.terms.last_key_value().map(|(_, c)| c)
    }

    pub fn leading_term(&self) -> Option<(&Monomial, &Rational)> {
        self.terms.last_key_value()
    }

    /// Remove and return the leading term.
    pub fn pop_leading(&mut self) -> Option<(Monomial, Rational)> {
        self.terms.pop_last()
    }

    /// In-place `self -= c * m * other`.
    pub fn sub_scaled(&mut self, other: &Polynomial, m: &Monomial, c: &Rational) {
        for (tm, tc) in other.terms() {
            self.add_term(tm.mul(m), -(tc * c));
        }
    }

    /// Add `c * m` in place, removing the entry if it cancels.
    pub fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add(&self, rhs: &Polynomial) -> Polynomial {
        let (big, small) = if self.num_terms() >= rhs.num_terms() {
            (self, rhs)
        } else {
            (rhs, self)
        };
        let mut out = big.clone();
        for (m, c) in small.terms() {
            out.add_term(*m, c.clone());
        }
        out
    }

    pub fn sub(&self, rhs: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        for (m, c) in rhs.terms() {
            out.add_term(*m, -c.clone());
        }
        out
    }

    pub fn negate(&self) -> Polynomial {
        Polynomial {
            terms: self.terms.iter().map(|(m, c)| (*m, -c.clone())).collect(),
        }
    }

    pub fn mul(&self, rhs: &Polynomial) -> Polynomial {
        let mut out = Polynomial::zero();
        for (m1, c1) in self.terms() {
            for (m2, c2) in rhs.terms() {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }

    /// Multiply by a single term `c * m`.
    pub fn mul_term(&self, m: &Monomial, c: &Rational) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero();
        }
        Polynomial {
            terms: self
                .terms
                .iter()
                .map(|(tm, tc)| (tm.mul(m), tc * c))
                .collect(),
        }
    }

    pub fn scale(&self, c: &Rational) -> Polynomial {
        self.mul_term(&Monomial::ONE, c)
    }

    pub fn pow(&self, e: u32) -> Polynomial {
        let mut out = Polynomial::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                out = out.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        out
    }

    /// Simultaneous substitution of polynomials for variables; variables not
    /// present in the assignment are left alone.
    pub fn substitute(&self, assignment: &BTreeMap<Var, Polynomial>) -> Polynomial {
        let mut out = Polynomial::zero();
        for (m, c) in self.terms() {
            let mut term = Polynomial::constant(c.clone());
            for v in Var::ALL {
                let e = m.exponent(v);
                if e == 0 {
                    continue;
                }
                match assignment.get(&v) {
                    Some(repl) => term = term.mul(&repl.pow(e)),
                    None => term = term.mul_term(&Monomial::var_pow(v, e), &Rational::one()),
                }
            }
            out = out.add(&term);
        }
        out
    }

    /// Delete every term whose M exponent exceeds `k`.
    pub fn truncate_m(&self, k: u32) -> Polynomial {
        Polynomial {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.exponent(Var::M) <= k)
                .map(|(m, c)| (*m, c.clone()))
                .collect(),
        }
    }

    /// Largest exponent of `v` appearing in any term (0 for the zero
    /// polynomial).
    pub fn degree_in(&self, v: Var) -> u32 {
        self.terms.keys().map(|m| m.exponent(v)).max().unwrap_or(0)
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.is_one())
    }

    /// The positive rational `g` such that `self / g` has coprime integer
    /// coefficients. Zero for the zero polynomial.
    pub fn content(&self) -> Rational {
        let mut num_gcd = BigInt::zero();
        let mut den_lcm = BigInt::one();
        for c in self.terms.values() {
            num_gcd = num_gcd.gcd(c.numer());
            den_lcm = den_lcm.lcm(c.denom());
        }
        if num_gcd.is_zero() {
            Rational::zero()
        } else {
            Rational::new(num_gcd, den_lcm)
        }
    }

    /// Divide out the content, keeping the sign of the leading coefficient.
    pub fn primitive_part(&self) -> Polynomial {
        let content = self.content();
        if content.is_zero() || content.is_one() {
            return self.clone();
        }
        self.scale(&content.recip())
    }

    /// Scale so the leading coefficient is 1. Zero stays zero.
    pub fn monic(&self) -> Polynomial {
        match self.leading_coeff() {
            None => Polynomial::zero(),
            Some(lc) if lc.is_one() => self.clone(),
            Some(lc) => self.scale(&lc.clone().recip()),
        }
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        Polynomial::add(self, rhs)
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        Polynomial::sub(self, rhs)
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        Polynomial::mul(self, rhs)
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        self.negate()
    }
}

impl PartialOrd for Polynomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Order polynomials by leading monomial, then lower terms; used only to fix
/// deterministic output orders (basis listings, dedup).
impl Ord for Polynomial {
    fn cmp(&self, other: &Self) -> Ordering {
        let mut a = self.terms_desc();
        let mut b = other.terms_desc();
        loop {
            match (a.next(), b.next()) {
                (None, None) => return Ordering::Equal,
                (None, Some(_)) => return Ordering::Less,
                (Some(_), None) => return Ordering::Greater,
                (Some((ma, ca)), Some((mb, cb))) => {
                    match ma.cmp(mb).then_with(|| ca.cmp(cb)) {
                        Ordering::Equal => continue,
                        ord => return ord,
                    }
                }
            }
        }
    }
}

fn write_rational(f: &mut fmt::Formatter<'_>, c: &Rational) -> fmt::Result {
    if c.denom().is_one() {
        write!(f, "{}", c.numer())
    } else {
        write!(f, "{}/{}", c.numer(), c.denom())
    }
}

impl fmt::Display for Polynomial {
    /// Canonical text form: terms in strictly descending monomial order,
    /// `*` between factors, magnitude-1 coefficients elided on non-constant
    /// terms, zero printed as `0`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms_desc().enumerate() {
            let neg = c.is_negative();
            if i == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if neg { "-" } else { "+" })?;
            }
            let mag = c.abs();
            if m.is_one() {
                write_rational(f, &mag)?;
            } else {
                if !mag.is_one() {
                    write_rational(f, &mag)?;
                    write!(f, "*")?;
                }
                write!(f, "{m}")?;
            }
        }
        Ok(())
    }
}

/// Error from the polynomial parser, with the byte offset of the failure.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("syntax error at offset {pos}: {msg}")]
pub struct ParseError {
    pub pos: usize,
    pub msg: String,
}

impl FromStr for Polynomial {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Polynomial, ParseError> {
        Parser::new(s).parse()
    }
}

/// Recursive-descent parser for polynomial expressions.
///
/// Accepts a superset of the canonical form: whitespace, parentheses (with
/// optional `^` powers), implicit multiplication, and the Unicode minus
/// sign. `parse(format(p)) == p` for every polynomial.
struct Parser<'a> {
    src: &'a str,
    chars: Vec<(usize, char)>,
    pos: usize,
}

const MAX_EXPONENT: u32 = 1_000_000;

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Parser<'a> {
        Parser {
            src,
            chars: src.char_indices().collect(),
            pos: 0,
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).map(|&(_, c)| c)
    }

    fn offset(&self) -> usize {
        self.chars
            .get(self.pos)
            .map(|&(o, _)| o)
            .unwrap_or(self.src.len())
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek();
        if c.is_some() {
            self.pos += 1;
        }
        c
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(c) if c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn error<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError {
            pos: self.offset(),
            msg: msg.into(),
        })
    }

    fn parse(mut self) -> Result<Polynomial, ParseError> {
        let p = self.expr()?;
        self.skip_ws();
        if self.peek().is_some() {
            return self.error("trailing input");
        }
        Ok(p)
    }

    fn is_minus(c: char) -> bool {
        c == '-' || c == '\u{2212}'
    }

    fn expr(&mut self) -> Result<Polynomial, ParseError> {
        let mut total = Polynomial::zero();
        let mut first = true;
        loop {
            self.skip_ws();
            let mut negative = false;
            let mut saw_sign = false;
            while let Some(c) = self.peek() {
                if Self::is_minus(c) {
                    negative = !negative;
                    saw_sign = true;
                    self.bump();
                    self.skip_ws();
                } else if c == '+' {
                    saw_sign = true;
                    self.bump();
                    self.skip_ws();
                } else {
                    break;
                }
            }
            if !first && !saw_sign {
                break;
            }
            if first && !saw_sign && self.peek().is_none() {
                return self.error("empty input");
            }
            let term = self.term()?;
            total = if negative {
                total.sub(&term)
            } else {
                total.add(&term)
            };
            first = false;
            self.skip_ws();
            match self.peek() {
                Some(c) if c == '+' || Self::is_minus(c) => continue,
                _ => break,
            }
        }
        Ok(total)
    }

    fn term(&mut self) -> Result<Polynomial, ParseError> {
        let mut product = self.factor()?;
        loop {
            self.skip_ws();
            match self.peek() {
                Some('*') => {
                    self.bump();
                    self.skip_ws();
                    let rhs = self.factor()?;
                    product = product.mul(&rhs);
                }
                // implicit multiplication: a factor immediately follows
                Some(c) if c.is_ascii_digit() || c == '(' || Var::from_symbol(c).is_some() => {
                    let rhs = self.factor()?;
                    product = product.mul(&rhs);
                }
                _ => break,
            }
        }
        Ok(product)
    }

    fn factor(&mut self) -> Result<Polynomial, ParseError> {
        let base = self.primary()?;
        self.skip_ws();
        if self.peek() == Some('^') {
            self.bump();
            self.skip_ws();
            let e = self.uint()?;
            Ok(base.pow(e))
        } else {
            Ok(base)
        }
    }

    fn primary(&mut self) -> Result<Polynomial, ParseError> {
        self.skip_ws();
        match self.peek() {
            Some('(') => {
                self.bump();
                let inner = self.expr()?;
                self.skip_ws();
                if self.peek() != Some(')') {
                    return self.error("expected ')'");
                }
                self.bump();
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() => {
                let num = self.bigint()?;
                self.skip_ws();
                if self.peek() == Some('/') {
                    self.bump();
                    self.skip_ws();
                    match self.peek() {
                        Some(c) if c.is_ascii_digit() => {
                            let den = self.bigint()?;
                            if den.is_zero() {
                                return self.error("zero denominator");
                            }
                            Ok(Polynomial::constant(Rational::new(num, den)))
                        }
                        _ => self.error("expected denominator digits"),
                    }
                } else {
                    Ok(Polynomial::constant(Rational::from(num)))
                }
            }
            Some(c) => match Var::from_symbol(c) {
                Some(v) => {
                    self.bump();
                    Ok(Polynomial::variable(v))
                }
                None => self.error(format!("unexpected character '{c}'")),
            },
            None => self.error("unexpected end of input"),
        }
    }

    fn bigint(&mut self) -> Result<BigInt, ParseError> {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.bump();
        }
        if self.pos == start {
            return self.error("expected digits");
        }
        let digits: String = self.chars[start..self.pos].iter().map(|&(_, c)| c).collect();
        digits
            .parse::<BigInt>()
            .map_err(|e| ParseError {
                pos: self.chars[start].0,
                msg: format!("bad integer: {e}"),
            })
    }

    fn uint(&mut self) -> Result<u32, ParseError> {
        let at = self.offset();
        let n = self.bigint()?;
        let e: u32 = n.try_into().map_err(|_| ParseError {
            pos: at,
            msg: "exponent out of range".into(),
        })?;
        if e > MAX_EXPONENT {
            return Err(ParseError {
                pos: at,
                msg: "exponent out of range".into(),
            });
        }
        Ok(e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Polynomial {
        s.parse().unwrap_or_else(|e| panic!("parse {s:?}: {e}"))
    }

    #[test]
    fn add_identity_and_cancellation() {
        let q = p("A^2*B-3*o");
        assert_eq!(q.add(&Polynomial::zero()), q);
        assert_eq!(p("A+B").add(&p("A-B")), p("2*A"));
        assert_eq!(p("1/2*o").add(&p("1/2*o")), p("o"));
    }

    #[test]
    fn mul_basics() {
        assert_eq!(p("A+B").mul(&p("A-B")), p("A^2-B^2"));
        assert_eq!(p("M").mul(&p("M")), p("M^2"));
        assert_eq!(p("Z*o^2").mul(&p("Z^2")), p("Z^3*o^2"));
        assert_eq!(p("A-2*B").mul(&Polynomial::one()), p("A-2*B"));
    }

    #[test]
    fn substitute_examples() {
        let bracket: BTreeMap<Var, Polynomial> = [
            (Var::M, Polynomial::one()),
            (Var::X, p("A")),
            (Var::F, Polynomial::zero()),
        ]
        .into_iter()
        .collect();
        assert_eq!(p("M*X+F").substitute(&bracket), p("A"));

        let sub2: BTreeMap<Var, Polynomial> =
            [(Var::M, Polynomial::one()), (Var::Y, p("B"))].into_iter().collect();
        assert_eq!(p("M^2*Y^2").substitute(&sub2), p("B^2"));

        let sub3: BTreeMap<Var, Polynomial> =
            [(Var::M, Polynomial::one()), (Var::F, Polynomial::zero())]
                .into_iter()
                .collect();
        assert_eq!(p("M*A*o+M*B*o+F*o^2").substitute(&sub3), p("A*o+B*o"));
    }

    #[test]
    fn truncate_m_examples() {
        assert_eq!(p("M^2*X+M*Z+F").truncate_m(1), p("M*Z+F"));
        let q = p("M^3*Y+M*X-2");
        assert_eq!(q.truncate_m(17), q);
        assert_eq!(p("M^3*Y^3+6*M^2*Z*Y^2").truncate_m(2), p("6*Y^2*Z*M^2"));
    }

    #[test]
    fn monomial_order() {
        let a = Monomial::var(Var::A);
        let b = Monomial::var(Var::B);
        assert!(a > b);
        let z3o4 = Monomial::from_exponents([0, 0, 0, 0, 0, 3, 0, 4]);
        let zo9 = Monomial::from_exponents([0, 0, 0, 0, 0, 1, 0, 9]);
        assert!(z3o4 > zo9);
        assert_eq!(z3o4.cmp(&z3o4), Ordering::Equal);
        assert!(Monomial::ONE < Monomial::var(Var::O));
    }

    #[test]
    fn monomial_order_is_multiplicative() {
        let m1 = Monomial::from_exponents([0, 1, 0, 2, 0, 0, 1, 0]);
        let m2 = Monomial::from_exponents([0, 1, 1, 0, 0, 0, 0, 3]);
        let m = Monomial::from_exponents([2, 0, 1, 0, 4, 0, 0, 1]);
        assert!(m1 < m2);
        assert!(m1.mul(&m) < m2.mul(&m));
    }

    #[test]
    fn format_canonical() {
        assert_eq!(p("-1/2*o*Z").to_string(), "-1/2*Z*o");
        assert_eq!(p("0").to_string(), "0");
        assert_eq!(p("B*A").to_string(), "A*B");
        assert_eq!(p("o + 1").to_string(), "o+1");
        assert_eq!(p("3-3").to_string(), "0");
        assert_eq!(Polynomial::from_int(-7).to_string(), "-7");
    }

    #[test]
    fn parse_superset_forms() {
        assert_eq!(p("o(o-1)"), p("o^2-o"));
        assert_eq!(p("2XY"), p("2*X*Y"));
        assert_eq!(p("(1-2Z^2)^2"), p("4*Z^4-4*Z^2+1"));
        assert_eq!(p("-(1/2)o(2-2o)"), p("o^2-o"));
        assert_eq!(p("M\u{2212}o"), p("M-o"));
    }

    #[test]
    fn parse_errors_carry_position() {
        let err = "A+?".parse::<Polynomial>().unwrap_err();
        assert_eq!(err.pos, 2);
        let err = "(A".parse::<Polynomial>().unwrap_err();
        assert_eq!(err.pos, 2);
        assert!("".parse::<Polynomial>().is_err());
        assert!("A^99999999".parse::<Polynomial>().is_err());
        assert!("1/0".parse::<Polynomial>().is_err());
    }

    #[test]
    fn content_and_primitive_part() {
        let q = p("6*A-9*B");
        assert_eq!(q.content(), ratio(3, 1));
        assert_eq!(q.primitive_part(), p("2*A-3*B"));
        let r = p("-4*A+2*B");
        assert_eq!(r.primitive_part(), p("-2*A+B"));
        let s = p("1/2*A+3/4");
        assert_eq!(s.content(), ratio(1, 4));
        assert_eq!(s.primitive_part(), p("2*A+3"));
        assert_eq!(Polynomial::zero().primitive_part(), Polynomial::zero());
    }

    #[test]
    fn monic_divides_leading_coeff() {
        let q = p("3*A*B-6*o");
        assert_eq!(q.monic(), p("A*B-2*o"));
        assert_eq!(Polynomial::zero().monic(), Polynomial::zero());
    }

    #[test]
    fn pow_and_degree() {
        assert_eq!(p("A+1").pow(3), p("A^3+3*A^2+3*A+1"));
        assert_eq!(p("A+1").pow(0), Polynomial::one());
        assert_eq!(p("M^3*Y+M*X").degree_in(Var::M), 3);
        assert_eq!(Polynomial::zero().degree_in(Var::M), 0);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn arb_rational() -> impl Strategy<Value = Rational> {
            (-20i64..=20, 1i64..=6).prop_map(|(n, d)| ratio(n, d))
        }

        fn arb_monomial() -> impl Strategy<Value = Monomial> {
            proptest::array::uniform8(0u32..4).prop_map(Monomial::from_exponents)
        }

        fn arb_poly() -> impl Strategy<Value = Polynomial> {
            proptest::collection::vec((arb_monomial(), arb_rational()), 0..6)
                .prop_map(Polynomial::from_terms)
        }

        proptest! {
            #[test]
            fn ring_axioms(a in arb_poly(), b in arb_poly(), c in arb_poly()) {
                prop_assert_eq!(a.add(&b), b.add(&a));
                prop_assert_eq!(a.add(&b).add(&c), a.add(&b.add(&c)));
                prop_assert_eq!(a.mul(&b), b.mul(&a));
                prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
                prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
                prop_assert_eq!(a.sub(&a), Polynomial::zero());
            }

            #[test]
            fn truncate_is_multiplicative(a in arb_poly(), b in arb_poly(), k in 0u32..5) {
                let lhs = a.mul(&b).truncate_m(k);
                let rhs = a.truncate_m(k).mul(&b.truncate_m(k)).truncate_m(k);
                prop_assert_eq!(lhs, rhs);
            }

            #[test]
            fn format_parse_roundtrip(a in arb_poly()) {
                let text = a.to_string();
                let back: Polynomial = text.parse().unwrap();
                prop_assert_eq!(back, a);
            }

            #[test]
            fn monomial_order_total_and_multiplicative(
                m1 in arb_monomial(), m2 in arb_monomial(), m in arb_monomial()
            ) {
                let ord = m1.cmp(&m2);
                prop_assert_eq!(m2.cmp(&m1), ord.reverse());
                prop_assert_eq!(m1.mul(&m).cmp(&m2.mul(&m)), ord);
            }
        }
    }
}
