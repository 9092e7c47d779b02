//! Sparse multivariate polynomials over [`Rational`] in named formal parameters.
//!
//! Normal-form coefficients are polynomials in the input coefficients
//! (`a[l,mu,k]` in 3D, `a[l,m]` in 2D), so they are carried as [`ParamPoly`]
//! and compared exactly.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::exactnum::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SymCoeffError {
    #[error("syntax error at byte {pos}: {message}")]
    Syntax { pos: usize, message: String },
    #[error("no value assigned to parameter {0}")]
    MissingSymbol(String),
}

/// Ring elements usable as coefficients of coordinate polynomials and Lie
/// combinations: a commutative ring containing the rationals.
pub trait Coefficient:
    Clone + PartialEq + fmt::Debug + fmt::Display + Send + Sync + 'static
{
    fn zero() -> Self;
    fn is_zero(&self) -> bool;
    fn from_rational(r: Rational) -> Self;
    fn add_ref(&self, other: &Self) -> Self;
    fn mul_ref(&self, other: &Self) -> Self;
    fn scale(&self, r: &Rational) -> Self;
    fn neg_ref(&self) -> Self;

    fn one() -> Self {
        Self::from_rational(Rational::one())
    }

    fn add_assign_ref(&mut self, other: &Self) {
        *self = self.add_ref(other);
    }

    fn sub_ref(&self, other: &Self) -> Self {
        self.add_ref(&other.neg_ref())
    }
}

impl Coefficient for Rational {
    fn zero() -> Self {
        Rational::zero()
    }
    fn is_zero(&self) -> bool {
        Rational::is_zero(self)
    }
    fn from_rational(r: Rational) -> Self {
        r
    }
    fn add_ref(&self, other: &Self) -> Self {
        self + other
    }
    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }
    fn scale(&self, r: &Rational) -> Self {
        self * r
    }
    fn neg_ref(&self) -> Self {
        -self
    }
    fn add_assign_ref(&mut self, other: &Self) {
        *self += other;
    }
}

/// A formal parameter such as `a[1,1,0]` or `eps`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ParamSymbol(Arc<str>);

impl ParamSymbol {
    pub fn new(name: impl AsRef<str>) -> Self {
        let name = name.as_ref();
        assert!(!name.is_empty(), "parameter names are nonempty");
        ParamSymbol(Arc::from(name))
    }

    /// Canonical coefficient name of a 3D basis element, `a[l,mu,k]`.
    pub fn coeff3(l: u32, mu: u32, k: u32) -> Self {
        ParamSymbol::new(format!("a[{l},{mu},{k}]"))
    }

    /// Canonical coefficient name of a 2D basis element, `a[l,m]`.
    pub fn coeff2(l: u32, m: u32) -> Self {
        ParamSymbol::new(format!("a[{l},{m}]"))
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for ParamSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for ParamSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Power product of parameters. Factors are kept sorted by symbol and never
/// carry a zero exponent; the empty product is the unit monomial.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct ParamMonomial(Vec<(ParamSymbol, u32)>);

impl ParamMonomial {
    pub fn one() -> Self {
        ParamMonomial(Vec::new())
    }

    pub fn var(sym: ParamSymbol) -> Self {
        ParamMonomial(vec![(sym, 1)])
    }

    pub fn from_factors(factors: impl IntoIterator<Item = (ParamSymbol, u32)>) -> Self {
        let mut map: BTreeMap<ParamSymbol, u32> = BTreeMap::new();
        for (s, e) in factors {
            *map.entry(s).or_insert(0) += e;
        }
        ParamMonomial(map.into_iter().filter(|(_, e)| *e > 0).collect())
    }

    pub fn factors(&self) -> &[(ParamSymbol, u32)] {
        &self.0
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|(_, e)| e).sum()
    }

    pub fn exponent(&self, sym: &ParamSymbol) -> u32 {
        self.0
            .binary_search_by(|(s, _)| s.cmp(sym))
            .map(|i| self.0[i].1)
            .unwrap_or(0)
    }

    pub fn mul(&self, other: &Self) -> Self {
        let (a, b) = (&self.0, &other.0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Less => {
                    out.push(a[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(b[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((a[i].0.clone(), a[i].1 + b[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        ParamMonomial(out)
    }
}

// Graded lexicographic: higher total degree is larger; ties are broken by the
// exponent of the alphabetically first symbol where the monomials differ.
impl Ord for ParamMonomial {
    fn cmp(&self, other: &Self) -> Ordering {
        match self.degree().cmp(&other.degree()) {
            Ordering::Equal => {}
            ord => return ord,
        }
        let (a, b) = (&self.0, &other.0);
        let (mut i, mut j) = (0, 0);
        loop {
            match (a.get(i), b.get(j)) {
                (None, None) => return Ordering::Equal,
                (Some(_), None) => return Ordering::Greater,
                (None, Some(_)) => return Ordering::Less,
                (Some((sa, ea)), Some((sb, eb))) => match sa.cmp(sb) {
                    Ordering::Less => return Ordering::Greater,
                    Ordering::Greater => return Ordering::Less,
                    Ordering::Equal => {
                        if ea != eb {
                            return ea.cmp(eb);
                        }
                        i += 1;
                        j += 1;
                    }
                },
            }
        }
    }
}

impl PartialOrd for ParamMonomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for ParamMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        for (idx, (s, e)) in self.0.iter().enumerate() {
            if idx > 0 {
                f.write_str("*")?;
            }
            if *e == 1 {
                write!(f, "{s}")?;
            } else {
                write!(f, "{s}^{e}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for ParamMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Polynomial in formal parameters with exact rational coefficients. Zero
/// coefficients are never stored, so structural equality is polynomial
/// equality.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct ParamPoly {
    terms: BTreeMap<ParamMonomial, Rational>,
}

impl ParamPoly {
    pub fn zero() -> Self {
        ParamPoly::default()
    }

    pub fn one() -> Self {
        ParamPoly::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        let mut p = ParamPoly::zero();
        p.add_term(ParamMonomial::one(), c);
        p
    }

    pub fn symbol(sym: ParamSymbol) -> Self {
        let mut p = ParamPoly::zero();
        p.add_term(ParamMonomial::var(sym), Rational::one());
        p
    }

    pub fn var(name: &str) -> Self {
        ParamPoly::symbol(ParamSymbol::new(name))
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (ParamMonomial, Rational)>) -> Self {
        let mut p = ParamPoly::zero();
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in ascending graded-lex order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&ParamMonomial, &Rational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &ParamMonomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().next_back().map(ParamMonomial::degree)
    }

    /// The value when the polynomial has no parameters.
    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => {
                let (m, c) = self.terms.iter().next()?;
                m.is_one().then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn is_constant(&self) -> bool {
        self.as_constant().is_some()
    }

    pub fn symbols(&self) -> Vec<ParamSymbol> {
        let mut out: Vec<ParamSymbol> = self
            .terms
            .keys()
            .flat_map(|m| m.factors().iter().map(|(s, _)| s.clone()))
            .collect();
        out.sort();
        out.dedup();
        out
    }

    pub fn add_term(&mut self, m: ParamMonomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += &c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn scale(&self, r: &Rational) -> Self {
        if r.is_zero() {
            return ParamPoly::zero();
        }
        ParamPoly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * r)).collect(),
        }
    }

    /// Exact substitution of rational values for every parameter.
    pub fn eval(
        &self,
        assignment: &HashMap<ParamSymbol, Rational>,
    ) -> Result<Rational, SymCoeffError> {
        let mut total = Rational::zero();
        for (m, c) in &self.terms {
            let mut value = c.clone();
            for (s, e) in m.factors() {
                let x = assignment
                    .get(s)
                    .ok_or_else(|| SymCoeffError::MissingSymbol(s.to_string()))?;
                value = value * x.pow(*e);
            }
            total += value;
        }
        Ok(total)
    }

    /// Substitutes polynomials for some parameters; the rest stay symbolic.
    pub fn substitute(&self, assignment: &HashMap<ParamSymbol, ParamPoly>) -> ParamPoly {
        let mut out = ParamPoly::zero();
        for (m, c) in &self.terms {
            let mut term = ParamPoly::constant(c.clone());
            for (s, e) in m.factors() {
                let factor = match assignment.get(s) {
                    Some(p) => p.clone(),
                    None => ParamPoly::symbol(s.clone()),
                };
                for _ in 0..*e {
                    term = &term * &factor;
                }
            }
            out = out + term;
        }
        out
    }
}

impl fmt::Display for ParamPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (idx, (m, c)) in self.terms.iter().rev().enumerate() {
            let negative = c.is_negative();
            let mag = c.abs();
            if idx == 0 {
                if negative {
                    f.write_str("-")?;
                }
            } else if negative {
                f.write_str(" - ")?;
            } else {
                f.write_str(" + ")?;
            }
            if m.is_one() {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{mag}*{m}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for ParamPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ParamPoly({self})")
    }
}

impl Coefficient for ParamPoly {
    fn zero() -> Self {
        ParamPoly::zero()
    }
    fn is_zero(&self) -> bool {
        ParamPoly::is_zero(self)
    }
    fn from_rational(r: Rational) -> Self {
        ParamPoly::constant(r)
    }
    fn add_ref(&self, other: &Self) -> Self {
        self + other
    }
    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }
    fn scale(&self, r: &Rational) -> Self {
        ParamPoly::scale(self, r)
    }
    fn neg_ref(&self) -> Self {
        -self
    }
    fn add_assign_ref(&mut self, other: &Self) {
        for (m, c) in &other.terms {
            self.add_term(m.clone(), c.clone());
        }
    }
}

impl From<Rational> for ParamPoly {
    fn from(r: Rational) -> Self {
        ParamPoly::constant(r)
    }
}

impl From<i64> for ParamPoly {
    fn from(n: i64) -> Self {
        ParamPoly::constant(Rational::from(n))
    }
}

impl Add<&ParamPoly> for &ParamPoly {
    type Output = ParamPoly;
    fn add(self, rhs: &ParamPoly) -> ParamPoly {
        let mut out = self.clone();
        out.add_assign_ref(rhs);
        out
    }
}

impl Add for ParamPoly {
    type Output = ParamPoly;
    fn add(mut self, rhs: ParamPoly) -> ParamPoly {
        self.add_assign_ref(&rhs);
        self
    }
}

impl Sub<&ParamPoly> for &ParamPoly {
    type Output = ParamPoly;
    fn sub(self, rhs: &ParamPoly) -> ParamPoly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c);
        }
        out
    }
}

impl Sub for ParamPoly {
    type Output = ParamPoly;
    fn sub(self, rhs: ParamPoly) -> ParamPoly {
        &self - &rhs
    }
}

impl Mul<&ParamPoly> for &ParamPoly {
    type Output = ParamPoly;
    fn mul(self, rhs: &ParamPoly) -> ParamPoly {
        let mut out = ParamPoly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }
}

impl Mul for ParamPoly {
    type Output = ParamPoly;
    fn mul(self, rhs: ParamPoly) -> ParamPoly {
        &self * &rhs
    }
}

impl Mul<&Rational> for &ParamPoly {
    type Output = ParamPoly;
    fn mul(self, rhs: &Rational) -> ParamPoly {
        self.scale(rhs)
    }
}

impl Neg for &ParamPoly {
    type Output = ParamPoly;
    fn neg(self) -> ParamPoly {
        ParamPoly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

impl Neg for ParamPoly {
    type Output = ParamPoly;
    fn neg(self) -> ParamPoly {
        -&self
    }
}

impl Serialize for ParamPoly {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ParamPoly {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

impl FromStr for ParamPoly {
    type Err = SymCoeffError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let terms = parse_terms(text)?;
        Ok(ParamPoly::from_terms(terms))
    }
}

/// Parses the shared polynomial grammar: signed terms joined by `+`/`-`, each
/// term a product of rationals and `symbol^exp` factors separated by `*` or
/// whitespace. Symbols are identifiers, optionally followed by a bracketed
/// integer list (`a[1,0,2]`).
pub(crate) fn parse_terms(text: &str) -> Result<Vec<(ParamMonomial, Rational)>, SymCoeffError> {
    Parser {
        src: text.as_bytes(),
        pos: 0,
    }
    .polynomial()
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn err<T>(&self, message: impl Into<String>) -> Result<T, SymCoeffError> {
        Err(SymCoeffError::Syntax {
            pos: self.pos,
            message: message.into(),
        })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn polynomial(&mut self) -> Result<Vec<(ParamMonomial, Rational)>, SymCoeffError> {
        let mut terms = Vec::new();
        let mut sign = Rational::one();
        match self.peek() {
            Some(b'-') => {
                sign = -Rational::one();
                self.pos += 1;
            }
            Some(b'+') => self.pos += 1,
            None => return self.err("empty polynomial"),
            _ => {}
        }
        loop {
            let (m, c) = self.term()?;
            terms.push((m, c * &sign));
            match self.peek() {
                None => break,
                Some(b'+') => {
                    sign = Rational::one();
                    self.pos += 1;
                }
                Some(b'-') => {
                    sign = -Rational::one();
                    self.pos += 1;
                }
                Some(c) => return self.err(format!("unexpected character {:?}", c as char)),
            }
        }
        Ok(terms)
    }

    fn term(&mut self) -> Result<(ParamMonomial, Rational), SymCoeffError> {
        let mut coeff = Rational::one();
        let mut factors = Vec::new();
        let mut expect_factor = true;
        loop {
            match self.peek() {
                Some(c) if c.is_ascii_digit() => {
                    coeff = coeff * self.rational()?;
                }
                Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                    let sym = self.symbol()?;
                    let exp = if self.peek() == Some(b'^') {
                        self.pos += 1;
                        self.skip_ws();
                        self.unsigned()?
                    } else {
                        1
                    };
                    factors.push((sym, exp));
                }
                _ if expect_factor => return self.err("expected a number or a symbol"),
                _ => break,
            }
            expect_factor = false;
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    expect_factor = true;
                }
                Some(c) if c.is_ascii_alphanumeric() || c == b'_' => {}
                _ => break,
            }
        }
        Ok((ParamMonomial::from_factors(factors), coeff))
    }

    fn unsigned(&mut self) -> Result<u32, SymCoeffError> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected an integer");
        }
        let digits = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        match digits.parse() {
            Ok(n) => Ok(n),
            Err(_) => {
                self.pos = start;
                self.err("integer out of range")
            }
        }
    }

    fn rational(&mut self) -> Result<Rational, SymCoeffError> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos < self.src.len() && self.src[self.pos] == b'/' {
            self.pos += 1;
            let den_start = self.pos;
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            if den_start == self.pos {
                return self.err("expected a denominator");
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
        text.parse::<Rational>().or_else(|_| {
            self.pos = start;
            self.err(format!("invalid rational {text:?}"))
        })
    }

    fn symbol(&mut self) -> Result<ParamSymbol, SymCoeffError> {
        let start = self.pos;
        while self.pos < self.src.len()
            && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
        {
            self.pos += 1;
        }
        let mut name = String::from_utf8_lossy(&self.src[start..self.pos]).into_owned();
        if self.pos < self.src.len() && self.src[self.pos] == b'[' {
            self.pos += 1;
            let mut parts = Vec::new();
            loop {
                self.skip_ws();
                parts.push(self.unsigned()?.to_string());
                match self.peek() {
                    Some(b',') => self.pos += 1,
                    Some(b']') => {
                        self.pos += 1;
                        break;
                    }
                    _ => return self.err("expected ',' or ']' in symbol index"),
                }
            }
            name = format!("{name}[{}]", parts.join(","));
        }
        Ok(ParamSymbol::new(name))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> ParamPoly {
        s.parse().unwrap()
    }

    #[test]
    fn arithmetic_examples() {
        let a = ParamPoly::var("a");
        assert!((&a + &(-&a)).is_zero());
        let one = ParamPoly::one();
        assert_eq!(&(&a + &one) * &(&a - &one), p("a^2 - 1"));
        assert_eq!(p("2*a + 4").scale(&Rational::new(1, 2)), p("a + 2"));
    }

    #[test]
    fn eval_examples() {
        let mut env = HashMap::new();
        env.insert(ParamSymbol::new("a"), Rational::from(2));
        assert_eq!(p("a^2 + 1").eval(&env).unwrap(), Rational::from(5));
        assert_eq!(
            ParamPoly::zero().eval(&HashMap::new()).unwrap(),
            Rational::zero()
        );
        env.insert(ParamSymbol::new("a"), Rational::new(1, 3));
        env.insert(ParamSymbol::new("b"), Rational::from(2));
        assert_eq!(p("3*a*b").eval(&env).unwrap(), Rational::from(2));
    }

    #[test]
    fn eval_reports_missing_symbol() {
        let err = p("a*b[1,2]").eval(&HashMap::new()).unwrap_err();
        match err {
            SymCoeffError::MissingSymbol(name) => assert!(name == "a" || name == "b[1,2]"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn parse_examples() {
        let q = p("3/2*a[1,1,0]");
        assert_eq!(q.len(), 1);
        assert_eq!(
            q.coeff(&ParamMonomial::var(ParamSymbol::coeff3(1, 1, 0))),
            Rational::new(3, 2)
        );
        let r = p("a^2 - 1");
        assert_eq!(r.coeff(&ParamMonomial::one()), Rational::from(-1));
        assert!(p("0").is_zero());
        assert_eq!(p("a b"), p("a*b"));
        assert_eq!(p("-a + a"), ParamPoly::zero());
    }

    #[test]
    fn parse_errors_carry_position() {
        match "a + * b".parse::<ParamPoly>() {
            Err(SymCoeffError::Syntax { pos, .. }) => assert_eq!(pos, 4),
            other => panic!("unexpected {other:?}"),
        }
        assert!("".parse::<ParamPoly>().is_err());
        assert!("a^".parse::<ParamPoly>().is_err());
        assert!("a[1,".parse::<ParamPoly>().is_err());
        assert!("3/".parse::<ParamPoly>().is_err());
    }

    #[test]
    fn printing_is_graded_lex_descending() {
        assert_eq!(p("1 - a + a^2").to_string(), "a^2 - a + 1");
        assert_eq!(p("b*a + a^2 + b^2").to_string(), "a^2 + a*b + b^2");
        assert_eq!(p("-3/2*a[0,1,1]").to_string(), "-3/2*a[0,1,1]");
    }

    #[test]
    fn constant_detection() {
        assert_eq!(p("7/3").as_constant(), Some(Rational::new(7, 3)));
        assert_eq!(ParamPoly::zero().as_constant(), Some(Rational::zero()));
        assert_eq!(p("a + 1").as_constant(), None);
    }
}
