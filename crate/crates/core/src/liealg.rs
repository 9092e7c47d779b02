//! The Euler-family Lie algebras spanned by `A^l_{mu,k} = N^l(zeta^mu) delta^k E`
//! (3D) and `A^l_m = N^l(zeta^m) E` (2D), with closed-form brackets.
//!
//! Since `[fE, gE] = (deg g - deg f) fg E`, every bracket is a product of
//! orbit functions scaled by a degree difference, and the product expansion
//! comes from [`crate::cgc::product_orbit`].

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, OnceLock, RwLock};

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::cgc::product_orbit;
use crate::exactnum::Rational;
use crate::polyvf::{n_op, Dim, VectorField};
use crate::sl2rep::{realize, OrbitFunction};
use crate::symcoeff::{Coefficient, ParamPoly};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LieError {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(Dim, Dim),
    #[error("{0} is outside its orbit")]
    InvalidElement(OrbitElement),
    #[error("cannot parse {text:?}: {reason}")]
    Parse { text: String, reason: String },
    #[error("the delta filtration only exists in three dimensions")]
    NoFiltration,
}

/// Basis vector `A^l_{mu,k}`; in 2D `k = 0` and `mu` is the subscript `m`.
///
/// Ordered by `(dim, mu, k, l)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OrbitElement {
    pub dim: Dim,
    pub mu: u32,
    pub k: u32,
    pub l: u32,
}

impl OrbitElement {
    pub fn new3(l: u32, mu: u32, k: u32) -> Self {
        OrbitElement {
            dim: Dim::Three,
            mu,
            k,
            l,
        }
    }

    pub fn new2(l: u32, m: u32) -> Self {
        OrbitElement {
            dim: Dim::Two,
            mu: m,
            k: 0,
            l,
        }
    }

    pub fn new(dim: Dim, l: u32, mu: u32, k: u32) -> Self {
        OrbitElement { dim, mu, k, l }
    }

    /// Largest admissible `l`: `2 mu` in 3D, `mu` in 2D.
    pub fn top(&self) -> u32 {
        match self.dim {
            Dim::Two => self.mu,
            Dim::Three => 2 * self.mu,
        }
    }

    pub fn is_valid(&self) -> bool {
        self.l <= self.top() && (self.dim == Dim::Three || self.k == 0)
    }

    /// Polynomial degree of the scalar factor.
    pub fn grade_delta0(&self) -> u32 {
        self.mu + 2 * self.k
    }

    pub fn h_weight(&self) -> i64 {
        i64::from(self.top()) - 2 * i64::from(self.l)
    }

    pub fn orbit_function(&self) -> OrbitFunction {
        OrbitFunction::new(self.dim, self.l, self.mu, self.k)
    }

    pub fn with_l(&self, l: u32) -> Self {
        OrbitElement { l, ..*self }
    }
}

impl fmt::Display for OrbitElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.dim {
            Dim::Two => write!(f, "A[{},{}]", self.l, self.mu),
            Dim::Three => write!(f, "A[{},{},{}]", self.l, self.mu, self.k),
        }
    }
}

impl FromStr for OrbitElement {
    type Err = LieError;

    /// `A[l,mu,k]` is 3D, `A[l,m]` is 2D.
    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let err = |reason: &str| LieError::Parse {
            text: text.to_string(),
            reason: reason.to_string(),
        };
        let inner = text
            .trim()
            .strip_prefix("A[")
            .and_then(|s| s.strip_suffix(']'))
            .ok_or_else(|| err("expected A[l,mu,k] or A[l,m]"))?;
        let nums = inner
            .split(',')
            .map(|s| s.trim().parse::<u32>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|_| err("indices must be nonnegative integers"))?;
        let e = match nums[..] {
            [l, m] => OrbitElement::new2(l, m),
            [l, mu, k] => OrbitElement::new3(l, mu, k),
            _ => return Err(err("expected two or three indices")),
        };
        if !e.is_valid() {
            return Err(LieError::InvalidElement(e));
        }
        Ok(e)
    }
}

impl Serialize for OrbitElement {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for OrbitElement {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

/// Bracket expansion of two basis vectors.
pub type Expansion = Arc<[(OrbitElement, Rational)]>;

type BracketCache = RwLock<HashMap<(OrbitElement, OrbitElement), Expansion>>;

fn bracket_cache() -> &'static BracketCache {
    static CACHE: OnceLock<BracketCache> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// Closed-form bracket `[e1, e2]`, memoized.
pub fn bracket(e1: &OrbitElement, e2: &OrbitElement) -> Result<Expansion, LieError> {
    if e1.dim != e2.dim {
        return Err(LieError::DimensionMismatch(e1.dim, e2.dim));
    }
    for e in [e1, e2] {
        if !e.is_valid() {
            return Err(LieError::InvalidElement(*e));
        }
    }
    if let Some(r) = bracket_cache().read().expect("cache lock").get(&(*e1, *e2)) {
        return Ok(r.clone());
    }
    let diff = i64::from(e2.grade_delta0()) - i64::from(e1.grade_delta0());
    let out: Expansion = if diff == 0 {
        Arc::from(Vec::new())
    } else {
        let factor = Rational::from(diff);
        let prod = product_orbit(e1.dim, &e1.orbit_function(), &e2.orbit_function())
            .expect("valid orbit functions");
        let terms: Vec<(OrbitElement, Rational)> = prod
            .into_iter()
            .rev()
            .map(|(o, c)| {
                (
                    OrbitElement::new(o.base.dim, o.l, o.base.mu, o.base.k),
                    c * &factor,
                )
            })
            .collect();
        Arc::from(terms)
    };
    bracket_cache()
        .write()
        .expect("cache lock")
        .insert((*e1, *e2), out.clone());
    Ok(out)
}

/// Bracket modulo `delta^(kmax+1)` (3D only).
pub fn bracket_filtered(
    e1: &OrbitElement,
    e2: &OrbitElement,
    kmax: u32,
) -> Result<LieComb<Rational>, LieError> {
    if e1.dim != Dim::Three || e2.dim != Dim::Three {
        return Err(LieError::NoFiltration);
    }
    let mut out = LieComb::new(Dim::Three);
    for (e, c) in bracket(e1, e2)?.iter() {
        if e.k <= kmax {
            out.add_term(*e, c.clone());
        }
    }
    Ok(out)
}

/// Element of the affine algebra `c N + sum c_e A_e` with `c` either 0 or 1.
#[derive(Clone, PartialEq)]
pub struct LieComb<C = ParamPoly> {
    dim: Dim,
    n_flag: bool,
    terms: BTreeMap<OrbitElement, C>,
}

impl<C: Coefficient> LieComb<C> {
    pub fn new(dim: Dim) -> Self {
        LieComb {
            dim,
            n_flag: false,
            terms: BTreeMap::new(),
        }
    }

    /// Just `N`.
    pub fn nilpotent(dim: Dim) -> Self {
        LieComb {
            dim,
            n_flag: true,
            terms: BTreeMap::new(),
        }
    }

    pub fn single(e: OrbitElement, c: C) -> Self {
        let mut out = Self::new(e.dim);
        out.add_term(e, c);
        out
    }

    pub fn from_terms(
        dim: Dim,
        n_flag: bool,
        terms: impl IntoIterator<Item = (OrbitElement, C)>,
    ) -> Self {
        let mut out = LieComb {
            dim,
            n_flag,
            terms: BTreeMap::new(),
        };
        for (e, c) in terms {
            out.add_term(e, c);
        }
        out
    }

    pub fn dim(&self) -> Dim {
        self.dim
    }

    pub fn has_n(&self) -> bool {
        self.n_flag
    }

    pub fn set_n(&mut self, flag: bool) {
        self.n_flag = flag;
    }

    pub fn is_zero(&self) -> bool {
        !self.n_flag && self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&OrbitElement, &C)> {
        self.terms.iter()
    }

    pub fn coeff(&self, e: &OrbitElement) -> C {
        self.terms.get(e).cloned().unwrap_or_else(C::zero)
    }

    pub fn add_term(&mut self, e: OrbitElement, c: C) {
        assert_eq!(e.dim, self.dim, "dimension mismatch");
        if c.is_zero() || !e.is_valid() {
            return;
        }
        match self.terms.entry(e) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                o.get_mut().add_assign_ref(&c);
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    /// Sum of the nonlinear parts; the result carries `N` if either does.
    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        let mut out = self.clone();
        out.n_flag |= other.n_flag;
        for (e, c) in &other.terms {
            out.add_term(*e, c.clone());
        }
        out
    }

    /// Nonlinear part of `self - other`; `N` flags must agree or `other`
    /// must have none.
    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        if other.n_flag {
            assert!(self.n_flag, "cannot subtract N from a field without N");
            out.n_flag = false;
        }
        for (e, c) in &other.terms {
            out.add_term(*e, c.neg_ref());
        }
        out
    }

    /// Scales the nonlinear part; `N` is dropped unless `r = 1`.
    pub fn scale(&self, r: &Rational) -> Self {
        let mut out = Self::new(self.dim);
        out.n_flag = self.n_flag && r.is_one();
        for (e, c) in &self.terms {
            out.add_term(*e, c.scale(r));
        }
        out
    }

    pub fn scale_by(&self, c: &C) -> Self {
        let mut out = Self::new(self.dim);
        for (e, x) in &self.terms {
            out.add_term(*e, x.mul_ref(c));
        }
        out
    }

    /// Keeps the terms with `keep(e)`; `N` is kept as is.
    pub fn filter(&self, keep: impl Fn(&OrbitElement) -> bool) -> Self {
        LieComb {
            dim: self.dim,
            n_flag: self.n_flag,
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| keep(e))
                .map(|(e, c)| (*e, c.clone()))
                .collect(),
        }
    }

    /// Drops every term of degree above `max_grade`.
    pub fn truncate(&self, max_grade: u32) -> Self {
        self.filter(|e| e.grade_delta0() <= max_grade)
    }

    /// The nonlinear part alone.
    pub fn nonlinear(&self) -> Self {
        LieComb {
            n_flag: false,
            ..self.clone()
        }
    }

    pub fn map_coeffs<D: Coefficient>(&self, f: impl Fn(&C) -> D) -> LieComb<D> {
        let mut out = LieComb::new(self.dim);
        out.n_flag = self.n_flag;
        for (e, c) in &self.terms {
            out.add_term(*e, f(c));
        }
        out
    }
}

impl LieComb<Rational> {
    pub fn lift<C: Coefficient>(&self) -> LieComb<C> {
        self.map_coeffs(|c| C::from_rational(c.clone()))
    }
}

impl LieComb<ParamPoly> {
    /// The same element with rational coefficients, if every coefficient is
    /// a constant.
    pub fn to_numeric(&self) -> Option<LieComb<Rational>> {
        let mut out = LieComb::new(self.dim);
        out.n_flag = self.n_flag;
        for (e, c) in &self.terms {
            out.add_term(*e, c.as_constant()?);
        }
        Some(out)
    }
}

/// Bilinear bracket, with `[N, A^l] = A^(l+1)` (zero past the orbit top).
pub fn comb_bracket<C: Coefficient>(
    u: &LieComb<C>,
    v: &LieComb<C>,
) -> Result<LieComb<C>, LieError> {
    comb_bracket_truncated(u, v, u32::MAX)
}

/// [`comb_bracket`] keeping only terms of degree at most `max_grade`.
pub fn comb_bracket_truncated<C: Coefficient>(
    u: &LieComb<C>,
    v: &LieComb<C>,
    max_grade: u32,
) -> Result<LieComb<C>, LieError> {
    if u.dim != v.dim {
        return Err(LieError::DimensionMismatch(u.dim, v.dim));
    }
    let mut out = LieComb::new(u.dim);
    for (a, ca) in &u.terms {
        for (b, cb) in &v.terms {
            if a.grade_delta0().saturating_add(b.grade_delta0()) > max_grade {
                continue;
            }
            let exp = bracket(a, b)?;
            if exp.is_empty() {
                continue;
            }
            let cab = ca.mul_ref(cb);
            for (e, r) in exp.iter() {
                out.add_term(*e, cab.scale(r));
            }
        }
    }
    if u.n_flag {
        for (b, cb) in &v.terms {
            if b.grade_delta0() <= max_grade {
                out.add_term(b.with_l(b.l + 1), cb.clone());
            }
        }
    }
    if v.n_flag {
        for (a, ca) in &u.terms {
            if a.grade_delta0() <= max_grade {
                out.add_term(a.with_l(a.l + 1), ca.neg_ref());
            }
        }
    }
    Ok(out)
}

/// Realizes `u` as a polynomial vector field.
pub fn comb_to_vectorfield<C: Coefficient>(u: &LieComb<C>) -> VectorField<C> {
    let dim = u.dim;
    let mut field = if u.n_flag {
        n_op(dim)
    } else {
        VectorField::zero(dim)
    };
    for (e, c) in &u.terms {
        let f = realize(&e.orbit_function()).expect("stored elements are valid");
        let fe = VectorField::euler_times(&f.map_coeffs(|r| c.scale(r)));
        field = field.add(&fe).expect("same dimension");
    }
    field
}

impl<C: Coefficient> fmt::Display for LieComb<C> {
    /// Terms by descending `(mu, k, l)`, e.g. `N + 2/3 * A[1,3,0] - a * A[0,1,0]`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        if self.n_flag {
            f.write_str("N")?;
            first = false;
        }
        for (e, c) in self.terms.iter().rev() {
            let mut cs = c.to_string();
            let negative = cs.starts_with('-') && !cs[1..].contains([' ', '+']);
            if negative {
                cs.remove(0);
            }
            if cs.contains(' ') {
                cs = format!("({cs})");
            }
            match (first, negative) {
                (true, true) => f.write_str("-")?,
                (true, false) => {}
                (false, true) => f.write_str(" - ")?,
                (false, false) => f.write_str(" + ")?,
            }
            first = false;
            write!(f, "{cs} * {e}")?;
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

impl<C: Coefficient> fmt::Debug for LieComb<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LieComb[{}]({self})", self.dim)
    }
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    l: u32,
    mu: u32,
    #[serde(default)]
    k: u32,
    coeff: String,
}

#[derive(Serialize, Deserialize)]
struct LieCombJson {
    dim: Dim,
    #[serde(rename = "N", default)]
    n: bool,
    terms: Vec<TermJson>,
}

impl<C: Coefficient> Serialize for LieComb<C> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        LieCombJson {
            dim: self.dim,
            n: self.n_flag,
            terms: self
                .terms
                .iter()
                .rev()
                .map(|(e, c)| TermJson {
                    l: e.l,
                    mu: e.mu,
                    k: e.k,
                    coeff: c.to_string(),
                })
                .collect(),
        }
        .serialize(serializer)
    }
}

impl<'de, C> Deserialize<'de> for LieComb<C>
where
    C: Coefficient + FromStr,
    C::Err: fmt::Display,
{
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let raw = LieCombJson::deserialize(deserializer)?;
        let mut out = LieComb::new(raw.dim);
        out.n_flag = raw.n;
        for t in raw.terms {
            if raw.dim == Dim::Two && t.k != 0 {
                return Err(D::Error::custom("2D terms have k = 0"));
            }
            let e = OrbitElement::new(raw.dim, t.l, t.mu, t.k);
            if !e.is_valid() {
                return Err(D::Error::custom(format!("{e} is outside its orbit")));
            }
            let c: C = t
                .coeff
                .parse()
                .map_err(|err| D::Error::custom(format!("{err}")))?;
            out.add_term(e, c);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyvf::oracle_bracket;

    fn q(a: i64, b: i64) -> Rational {
        Rational::new(a, b)
    }

    fn coeff(exp: &Expansion, e: OrbitElement) -> Rational {
        exp.iter()
            .find(|(x, _)| *x == e)
            .map(|(_, c)| c.clone())
            .unwrap_or_default()
    }

    #[test]
    fn reference_structure_constants() {
        let b = bracket(&OrbitElement::new3(2, 3, 0), &OrbitElement::new3(14, 13, 0)).unwrap();
        assert_eq!(b.len(), 4);
        assert_eq!(b[0], (OrbitElement::new3(16, 16, 0), q(325, 16182)));
        assert_eq!(coeff(&b, OrbitElement::new3(14, 14, 1)), q(-208, 93));
        assert_eq!(coeff(&b, OrbitElement::new3(12, 12, 2)), q(-7192640, 2001));
        assert_eq!(coeff(&b, OrbitElement::new3(10, 10, 3)), q(146578432, 23));
        let b = bracket(&OrbitElement::new3(8, 7, 2), &OrbitElement::new3(5, 7, 1)).unwrap();
        assert_eq!(coeff(&b, OrbitElement::new3(13, 14, 3)), q(-1001, 4011660));
    }

    #[test]
    fn two_dimensional_kernel_brackets() {
        for nu in 1..5 {
            for m in 1..7 {
                let b = bracket(&OrbitElement::new2(0, nu), &OrbitElement::new2(0, m)).unwrap();
                let expect = i64::from(m) - i64::from(nu);
                if expect == 0 {
                    assert!(b.is_empty());
                } else {
                    assert_eq!(
                        &b[..],
                        &[(OrbitElement::new2(0, m + nu), Rational::from(expect))]
                    );
                }
            }
        }
    }

    #[test]
    fn filtered_bracket_drops_delta_terms() {
        let a = OrbitElement::new3(0, 1, 0);
        let b = OrbitElement::new3(2, 2, 0);
        let f = bracket_filtered(&a, &b, 0).unwrap();
        assert_eq!(f.len(), 1);
        assert_eq!(f.coeff(&OrbitElement::new3(2, 3, 0)), q(2, 5));
        let full = bracket_filtered(&a, &b, u32::MAX).unwrap();
        assert_eq!(full.len(), bracket(&a, &b).unwrap().len());
        assert!(bracket_filtered(&OrbitElement::new2(0, 1), &OrbitElement::new2(0, 2), 0).is_err());
    }

    #[test]
    fn nilpotent_flag_shifts_orbits() {
        let d = Dim::Three;
        let n = LieComb::<Rational>::nilpotent(d);
        let top = LieComb::single(OrbitElement::new3(4, 2, 1), q(1, 1));
        assert!(comb_bracket(&n, &top).unwrap().is_zero());
        let a = LieComb::single(OrbitElement::new3(0, 1, 0), q(3, 1));
        let r = comb_bracket(&n, &a).unwrap();
        assert_eq!(r, LieComb::single(OrbitElement::new3(1, 1, 0), q(3, 1)));
        let u = n.add(&a);
        assert!(comb_bracket(&u, &u).unwrap().is_zero());
    }

    #[test]
    fn realization_examples() {
        let d = Dim::Three;
        let z = comb_to_vectorfield(&LieComb::single(OrbitElement::new3(0, 1, 0), q(1, 1)));
        assert_eq!(z.to_string(), "(x*z, y*z, z^2)");
        let n = comb_to_vectorfield(&LieComb::<Rational>::nilpotent(d));
        assert_eq!(n, n_op(d));
        let a1 = comb_to_vectorfield(&LieComb::single(OrbitElement::new3(1, 1, 0), q(1, 1)));
        assert_eq!(a1.to_string(), "(2*x*y, 2*y^2, 2*y*z)");
    }

    #[test]
    fn closed_form_matches_oracle_on_small_pairs() {
        let d = Dim::Three;
        let elems: Vec<_> = (0..=2)
            .flat_map(|mu| {
                (0..=1).flat_map(move |k| (0..=2 * mu).map(move |l| OrbitElement::new3(l, mu, k)))
            })
            .collect();
        for a in &elems {
            for b in &elems {
                let closed = LieComb::from_terms(d, false, bracket(a, b).unwrap().iter().cloned());
                let va = comb_to_vectorfield(&LieComb::single(*a, Rational::one()));
                let vb = comb_to_vectorfield(&LieComb::single(*b, Rational::one()));
                assert_eq!(
                    comb_to_vectorfield(&closed),
                    oracle_bracket(&va, &vb).unwrap(),
                    "[{a}, {b}]"
                );
            }
        }
    }

    #[test]
    fn text_and_json_round_trip() {
        let e: OrbitElement = "A[2,3,0]".parse().unwrap();
        assert_eq!(e, OrbitElement::new3(2, 3, 0));
        assert_eq!(e.to_string(), "A[2,3,0]");
        assert_eq!(
            "A[1,4]".parse::<OrbitElement>().unwrap(),
            OrbitElement::new2(1, 4)
        );
        assert!("A[3,1,0]".parse::<OrbitElement>().is_err());
        assert!("B[1,1]".parse::<OrbitElement>().is_err());

        let mut u = LieComb::<ParamPoly>::nilpotent(Dim::Three);
        u.add_term(OrbitElement::new3(0, 1, 0), "a + 1".parse().unwrap());
        u.add_term(OrbitElement::new3(1, 2, 0), "-3/2".parse().unwrap());
        let js = serde_json::to_string(&u).unwrap();
        assert_eq!(
            js,
            r#"{"dim":3,"N":true,"terms":[{"l":1,"mu":2,"k":0,"coeff":"-3/2"},{"l":0,"mu":1,"k":0,"coeff":"a + 1"}]}"#
        );
        let back: LieComb<ParamPoly> = serde_json::from_str(&js).unwrap();
        assert_eq!(back, u);
        assert_eq!(u.to_string(), "N - 3/2 * A[1,2,0] + (a + 1) * A[0,1,0]");
    }
}
