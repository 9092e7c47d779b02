//! Coordinate polynomials, polynomial vector fields and the direct Lie bracket.
//!
//! [`oracle_bracket`] differentiates components term by term. It is slow but
//! has no structure built in, which makes it the reference every closed-form
//! bracket and product formula is checked against.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exactnum::Rational;
use crate::symcoeff::{parse_terms, Coefficient, ParamMonomial, ParamPoly, SymCoeffError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyVfError {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(Dim, Dim),
    #[error(transparent)]
    Parse(#[from] SymCoeffError),
    #[error("variable {0} does not exist in dimension {1}")]
    UnknownVariable(String, Dim),
}

/// Ambient dimension of the phase space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum Dim {
    Two,
    Three,
}

impl Dim {
    pub fn n(self) -> usize {
        match self {
            Dim::Two => 2,
            Dim::Three => 3,
        }
    }
}

impl TryFrom<u8> for Dim {
    type Error = String;
    fn try_from(n: u8) -> Result<Self, String> {
        match n {
            2 => Ok(Dim::Two),
            3 => Ok(Dim::Three),
            other => Err(format!("unsupported dimension {other}, expected 2 or 3")),
        }
    }
}

impl From<Dim> for u8 {
    fn from(d: Dim) -> u8 {
        d.n() as u8
    }
}

impl fmt::Display for Dim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}D", self.n())
    }
}

const VARS: [&str; 3] = ["x", "y", "z"];

/// Exponent vector `(e_x, e_y, e_z)`; `e_z` stays 0 in two dimensions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct CoordMonomial(pub [u32; 3]);

impl CoordMonomial {
    pub fn new(ex: u32, ey: u32, ez: u32) -> Self {
        CoordMonomial([ex, ey, ez])
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn mul(&self, other: &Self) -> Self {
        CoordMonomial([
            self.0[0] + other.0[0],
            self.0[1] + other.0[1],
            self.0[2] + other.0[2],
        ])
    }

    /// All monomials of total degree `d` in the given dimension, in ascending
    /// order.
    pub fn of_degree(dim: Dim, d: u32) -> Vec<CoordMonomial> {
        let mut out = Vec::new();
        match dim {
            Dim::Two => {
                for ex in 0..=d {
                    out.push(CoordMonomial([ex, d - ex, 0]));
                }
            }
            Dim::Three => {
                for ex in 0..=d {
                    for ey in 0..=d - ex {
                        out.push(CoordMonomial([ex, ey, d - ex - ey]));
                    }
                }
            }
        }
        out.sort();
        out
    }
}

impl Ord for CoordMonomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for CoordMonomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for CoordMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.degree() == 0 {
            return f.write_str("1");
        }
        let mut first = true;
        for (v, e) in VARS.iter().zip(self.0) {
            if e == 0 {
                continue;
            }
            if !first {
                f.write_str("*")?;
            }
            first = false;
            if e == 1 {
                f.write_str(v)?;
            } else {
                write!(f, "{v}^{e}")?;
            }
        }
        Ok(())
    }
}

/// Polynomial in the phase-space coordinates with coefficients in `C`.
#[derive(Clone, PartialEq)]
pub struct CoordPoly<C = ParamPoly> {
    dim: Dim,
    terms: BTreeMap<CoordMonomial, C>,
}

impl<C: Coefficient> CoordPoly<C> {
    pub fn zero(dim: Dim) -> Self {
        CoordPoly {
            dim,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(dim: Dim, c: C) -> Self {
        Self::monomial(dim, CoordMonomial::default(), c)
    }

    pub fn one(dim: Dim) -> Self {
        Self::constant(dim, C::one())
    }

    /// Coordinate function `x_i` (0 = x, 1 = y, 2 = z).
    pub fn var(dim: Dim, i: usize) -> Self {
        assert!(i < dim.n(), "coordinate index out of range");
        let mut e = [0; 3];
        e[i] = 1;
        Self::monomial(dim, CoordMonomial(e), C::one())
    }

    pub fn monomial(dim: Dim, m: CoordMonomial, c: C) -> Self {
        let mut p = Self::zero(dim);
        p.add_term(m, c);
        p
    }

    pub fn dim(&self) -> Dim {
        self.dim
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

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&CoordMonomial, &C)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &CoordMonomial) -> C {
        self.terms.get(m).cloned().unwrap_or_else(C::zero)
    }

    /// Largest total degree of a stored term; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().next_back().map(CoordMonomial::degree)
    }

    pub fn min_degree(&self) -> Option<u32> {
        self.terms.keys().next().map(CoordMonomial::degree)
    }

    pub fn is_homogeneous(&self) -> bool {
        self.degree() == self.min_degree()
    }

    pub fn homogeneous_part(&self, d: u32) -> Self {
        CoordPoly {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree() == d)
                .map(|(m, c)| (*m, c.clone()))
                .collect(),
        }
    }

    pub fn add_term(&mut self, m: CoordMonomial, c: C) {
        debug_assert!(self.dim == Dim::Three || m.0[2] == 0);
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                e.get_mut().add_assign_ref(&c);
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    fn check(&self, other: &Self) -> Result<(), PolyVfError> {
        if self.dim == other.dim {
            Ok(())
        } else {
            Err(PolyVfError::DimensionMismatch(self.dim, other.dim))
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, PolyVfError> {
        self.check(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(*m, c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, PolyVfError> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Result<Self, PolyVfError> {
        self.check(other)?;
        let mut out = Self::zero(self.dim);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), ca.mul_ref(cb));
            }
        }
        Ok(out)
    }

    pub fn scale(&self, r: &Rational) -> Self {
        if r.is_zero() {
            return Self::zero(self.dim);
        }
        CoordPoly {
            dim: self.dim,
            terms: self.terms.iter().map(|(m, c)| (*m, c.scale(r))).collect(),
        }
    }

    pub fn scale_by(&self, c: &C) -> Self {
        let mut out = Self::zero(self.dim);
        for (m, x) in &self.terms {
            out.add_term(*m, x.mul_ref(c));
        }
        out
    }

    pub fn neg(&self) -> Self {
        CoordPoly {
            dim: self.dim,
            terms: self.terms.iter().map(|(m, c)| (*m, c.neg_ref())).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut out = Self::one(self.dim);
        for _ in 0..e {
            out = out.mul(self).expect("same dimension");
        }
        out
    }

    /// Partial derivative with respect to coordinate `i`.
    pub fn derivative(&self, i: usize) -> Self {
        let mut out = Self::zero(self.dim);
        for (m, c) in &self.terms {
            let e = m.0[i];
            if e == 0 {
                continue;
            }
            let mut dm = *m;
            dm.0[i] -= 1;
            out.add_term(dm, c.scale(&Rational::from(i64::from(e))));
        }
        out
    }

    /// Exact quotient by the coordinate `x_i`, if every term is divisible.
    pub fn div_var(&self, i: usize) -> Option<Self> {
        let mut out = Self::zero(self.dim);
        for (m, c) in &self.terms {
            if m.0[i] == 0 {
                return None;
            }
            let mut dm = *m;
            dm.0[i] -= 1;
            out.add_term(dm, c.clone());
        }
        Some(out)
    }

    pub fn map_coeffs<D: Coefficient>(&self, f: impl Fn(&C) -> D) -> CoordPoly<D> {
        let mut out = CoordPoly::zero(self.dim);
        for (m, c) in &self.terms {
            out.add_term(*m, f(c));
        }
        out
    }
}

impl CoordPoly<Rational> {
    /// Embeds a rational polynomial into any coefficient ring.
    pub fn lift<C: Coefficient>(&self) -> CoordPoly<C> {
        self.map_coeffs(|c| C::from_rational(c.clone()))
    }
}

impl CoordPoly<ParamPoly> {
    /// Parses text such as `"x*z - y^2"` or `"3/2*a*x^2"`. The names `x`, `y`
    /// and (in 3D) `z` are coordinates; every other symbol is a parameter.
    pub fn parse(dim: Dim, text: &str) -> Result<Self, PolyVfError> {
        let mut out = CoordPoly::zero(dim);
        for (pm, c) in parse_terms(text)? {
            let mut exps = [0u32; 3];
            let mut rest = Vec::new();
            for (s, e) in pm.factors() {
                match VARS.iter().position(|v| *v == s.name()) {
                    Some(i) if i < dim.n() => exps[i] += e,
                    Some(_) => return Err(PolyVfError::UnknownVariable(s.name().to_string(), dim)),
                    None => rest.push((s.clone(), *e)),
                }
            }
            let coeff = ParamPoly::from_terms([(ParamMonomial::from_factors(rest), c)]);
            out.add_term(CoordMonomial(exps), coeff);
        }
        Ok(out)
    }
}

impl FromStr for CoordPoly<ParamPoly> {
    type Err = PolyVfError;
    /// Parses in three dimensions; use [`CoordPoly::parse`] for 2D.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        CoordPoly::parse(Dim::Three, s)
    }
}

impl<C: Coefficient> fmt::Display for CoordPoly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (idx, (m, c)) in self.terms.iter().rev().enumerate() {
            let mut cs = c.to_string();
            let negative = cs.starts_with('-') && !cs[1..].contains([' ', '+']);
            if negative {
                cs.remove(0);
            }
            if cs.contains(' ') {
                cs = format!("({cs})");
            }
            match (idx, negative) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            if m.degree() == 0 {
                f.write_str(&cs)?;
            } else if cs == "1" {
                write!(f, "{m}")?;
            } else {
                write!(f, "{cs}*{m}")?;
            }
        }
        Ok(())
    }
}

impl<C: Coefficient> fmt::Debug for CoordPoly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CoordPoly[{}]({self})", self.dim)
    }
}

/// Polynomial vector field `sum_i v_i d/dx_i`.
#[derive(Clone, PartialEq)]
pub struct VectorField<C = ParamPoly> {
    components: Vec<CoordPoly<C>>,
}

impl<C: Coefficient> VectorField<C> {
    pub fn new(components: Vec<CoordPoly<C>>) -> Result<Self, PolyVfError> {
        let dim = components.first().map_or(Dim::Three, CoordPoly::dim);
        if components.len() != dim.n() {
            return Err(PolyVfError::DimensionMismatch(
                dim,
                if components.len() == 2 {
                    Dim::Two
                } else {
                    Dim::Three
                },
            ));
        }
        for c in &components {
            if c.dim() != dim {
                return Err(PolyVfError::DimensionMismatch(dim, c.dim()));
            }
        }
        Ok(VectorField { components })
    }

    pub fn zero(dim: Dim) -> Self {
        VectorField {
            components: vec![CoordPoly::zero(dim); dim.n()],
        }
    }

    pub fn dim(&self) -> Dim {
        self.components[0].dim()
    }

    pub fn components(&self) -> &[CoordPoly<C>] {
        &self.components
    }

    pub fn component(&self, i: usize) -> &CoordPoly<C> {
        &self.components[i]
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(CoordPoly::is_zero)
    }

    pub fn add(&self, other: &Self) -> Result<Self, PolyVfError> {
        let components = self
            .components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| a.add(b))
            .collect::<Result<_, _>>()?;
        if self.dim() != other.dim() {
            return Err(PolyVfError::DimensionMismatch(self.dim(), other.dim()));
        }
        Ok(VectorField { components })
    }

    pub fn sub(&self, other: &Self) -> Result<Self, PolyVfError> {
        self.add(&other.scale(&-Rational::one()))
    }

    pub fn scale(&self, r: &Rational) -> Self {
        VectorField {
            components: self.components.iter().map(|c| c.scale(r)).collect(),
        }
    }

    /// The field `f * v`.
    pub fn mul_function(&self, f: &CoordPoly<C>) -> Result<Self, PolyVfError> {
        let components = self
            .components
            .iter()
            .map(|c| f.mul(c))
            .collect::<Result<_, _>>()?;
        Ok(VectorField { components })
    }

    /// `F * E` for the Euler field `E = sum x_i d/dx_i`.
    pub fn euler_times(f: &CoordPoly<C>) -> Self {
        let dim = f.dim();
        VectorField {
            components: (0..dim.n())
                .map(|i| f.mul(&CoordPoly::var(dim, i)).expect("same dimension"))
                .collect(),
        }
    }

    pub fn map_coeffs<D: Coefficient>(&self, f: impl Fn(&C) -> D + Copy) -> VectorField<D> {
        VectorField {
            components: self.components.iter().map(|c| c.map_coeffs(f)).collect(),
        }
    }
}

impl VectorField<Rational> {
    pub fn lift<C: Coefficient>(&self) -> VectorField<C> {
        self.map_coeffs(|c| C::from_rational(c.clone()))
    }
}

impl<C: Coefficient> fmt::Display for VectorField<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, c) in self.components.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str(")")
    }
}

impl<C: Coefficient> fmt::Debug for VectorField<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "VectorField{self}")
    }
}

/// `v(f) = sum_i v_i * df/dx_i`.
pub fn apply_derivation<C: Coefficient>(
    v: &VectorField<C>,
    f: &CoordPoly<C>,
) -> Result<CoordPoly<C>, PolyVfError> {
    if v.dim() != f.dim() {
        return Err(PolyVfError::DimensionMismatch(v.dim(), f.dim()));
    }
    let mut out = CoordPoly::zero(f.dim());
    for (i, vi) in v.components.iter().enumerate() {
        if vi.is_zero() {
            continue;
        }
        let d = f.derivative(i);
        if d.is_zero() {
            continue;
        }
        out = out.add(&vi.mul(&d)?)?;
    }
    Ok(out)
}

/// Lie bracket `[v, w]_i = v(w_i) - w(v_i)`. With this sign the sl2 triples
/// below satisfy `[M, N] = H`.
pub fn oracle_bracket<C: Coefficient>(
    v: &VectorField<C>,
    w: &VectorField<C>,
) -> Result<VectorField<C>, PolyVfError> {
    if v.dim() != w.dim() {
        return Err(PolyVfError::DimensionMismatch(v.dim(), w.dim()));
    }
    let components = (0..v.dim().n())
        .map(|i| {
            apply_derivation(v, &w.components[i])?.sub(&apply_derivation(w, &v.components[i])?)
        })
        .collect::<Result<_, _>>()?;
    Ok(VectorField { components })
}

/// Returns `F` when `v = F * E`, otherwise `None`.
pub fn euler_factor<C: Coefficient>(v: &VectorField<C>) -> Option<CoordPoly<C>> {
    let dim = v.dim();
    if v.is_zero() {
        return Some(CoordPoly::zero(dim));
    }
    let f = v.components[0].div_var(0)?;
    (VectorField::euler_times(&f) == *v).then_some(f)
}

fn field<C: Coefficient>(dim: Dim, comps: &[&[(i64, usize)]]) -> VectorField<C> {
    // each component is a sum of c * x_i
    VectorField {
        components: comps
            .iter()
            .map(|terms| {
                let mut p = CoordPoly::zero(dim);
                for &(c, i) in terms.iter() {
                    p = p
                        .add(&CoordPoly::var(dim, i).scale(&Rational::from(c)))
                        .expect("same dimension");
                }
                p
            })
            .collect(),
    }
}

/// Nilpotent part: `x d/dy` (2D) or `x d/dy + 2y d/dz` (3D).
pub fn n_op<C: Coefficient>(dim: Dim) -> VectorField<C> {
    match dim {
        Dim::Two => field(dim, &[&[], &[(1, 0)]]),
        Dim::Three => field(dim, &[&[], &[(1, 0)], &[(2, 1)]]),
    }
}

/// Semisimple element: `y d/dy - x d/dx` (2D) or `2z d/dz - 2x d/dx` (3D).
pub fn h_op<C: Coefficient>(dim: Dim) -> VectorField<C> {
    match dim {
        Dim::Two => field(dim, &[&[(-1, 0)], &[(1, 1)]]),
        Dim::Three => field(dim, &[&[(-2, 0)], &[], &[(2, 2)]]),
    }
}

/// Lowering partner: `y d/dx` (2D) or `z d/dy + 2y d/dx` (3D).
pub fn m_op<C: Coefficient>(dim: Dim) -> VectorField<C> {
    match dim {
        Dim::Two => field(dim, &[&[(1, 1)], &[]]),
        Dim::Three => field(dim, &[&[(2, 1)], &[(1, 2)], &[]]),
    }
}

/// Euler field `sum x_i d/dx_i`.
pub fn e_op<C: Coefficient>(dim: Dim) -> VectorField<C> {
    match dim {
        Dim::Two => field(dim, &[&[(1, 0)], &[(1, 1)]]),
        Dim::Three => field(dim, &[&[(1, 0)], &[(1, 1)], &[(1, 2)]]),
    }
}

/// The weight-raising kernel generator of M: `y` in 2D, `z` in 3D.
pub fn zeta<C: Coefficient>(dim: Dim) -> CoordPoly<C> {
    match dim {
        Dim::Two => CoordPoly::var(dim, 1),
        Dim::Three => CoordPoly::var(dim, 2),
    }
}

/// The quadratic invariant `xz - y^2` (3D only).
pub fn delta<C: Coefficient>() -> CoordPoly<C> {
    let d = Dim::Three;
    let xz = CoordPoly::var(d, 0).mul(&CoordPoly::var(d, 2)).expect("3D");
    let yy = CoordPoly::var(d, 1).pow(2);
    xz.sub(&yy).expect("3D")
}

#[cfg(test)]
mod tests {
    use super::*;

    type P = CoordPoly<Rational>;

    fn p3(s: &str) -> P {
        CoordPoly::parse(Dim::Three, s)
            .unwrap()
            .map_coeffs(|c| c.as_constant().expect("numeric"))
    }

    #[test]
    fn sl2_relations_hold_in_both_dimensions() {
        for dim in [Dim::Two, Dim::Three] {
            let (n, h, m, e) = (
                n_op::<Rational>(dim),
                h_op::<Rational>(dim),
                m_op::<Rational>(dim),
                e_op::<Rational>(dim),
            );
            assert_eq!(oracle_bracket(&m, &n).unwrap(), h, "{dim}");
            assert_eq!(
                oracle_bracket(&h, &n).unwrap(),
                n.scale(&Rational::from(-2))
            );
            assert_eq!(oracle_bracket(&h, &m).unwrap(), m.scale(&Rational::from(2)));
            for x in [&n, &h, &m] {
                assert!(oracle_bracket(&e, x).unwrap().is_zero());
            }
        }
    }

    #[test]
    fn derivation_examples() {
        let n = n_op::<Rational>(Dim::Three);
        assert_eq!(apply_derivation(&n, &p3("z")).unwrap(), p3("2*y"));
        assert_eq!(apply_derivation(&n, &p3("z^2")).unwrap(), p3("4*y*z"));
        let m = m_op::<Rational>(Dim::Three);
        assert!(apply_derivation(&m, &delta()).unwrap().is_zero());
    }

    #[test]
    fn euler_factor_examples() {
        let d = Dim::Three;
        let v = VectorField::new(vec![p3("x^2"), p3("x*y"), p3("x*z")]).unwrap();
        assert_eq!(euler_factor(&v), Some(p3("x")));
        assert_eq!(euler_factor(&e_op::<Rational>(d)), Some(P::one(d)));
        assert_eq!(euler_factor(&n_op::<Rational>(d)), None);
    }

    #[test]
    fn arithmetic_examples() {
        let z = p3("z");
        assert_eq!(z.mul(&z).unwrap(), p3("z^2"));
        assert_eq!(p3("x*z").add(&p3("-y^2")).unwrap(), delta());
        assert_eq!(p3("2*y").scale(&Rational::new(1, 2)), p3("y"));
    }

    #[test]
    fn parse_and_print() {
        let q = CoordPoly::parse(Dim::Three, "a*x^2 - 3/2*y*z + 1").unwrap();
        assert_eq!(q.to_string(), "a*x^2 - 3/2*y*z + 1");
        assert!(CoordPoly::parse(Dim::Two, "z").is_err());
        let r = CoordPoly::parse(Dim::Three, "(x").unwrap_err();
        assert!(matches!(r, PolyVfError::Parse(_)));
    }

    #[test]
    fn bracket_rejects_mixed_dimensions() {
        let a = n_op::<Rational>(Dim::Two);
        let b = n_op::<Rational>(Dim::Three);
        assert!(oracle_bracket(&a, &b).is_err());
    }
}
