//! Rational Clebsch-Gordan coefficients, transvectants and the product
//! coefficients of orbit functions.
//!
//! Weights are the integers `m`, `n` of two irreducible sl2 modules with unit
//! norm highest-weight vectors. Tensor terms use the divided-power basis
//! `v^(i) = N^i v / i!`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exactnum::{binom, factorial_q, Rational};
use crate::polyvf::{CoordPoly, Dim};
use crate::sl2rep::{realize, OrbitFunction};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CgcError {
    #[error("index {name} = {value} outside 0..={max}")]
    Range {
        name: &'static str,
        value: i64,
        max: i64,
    },
    #[error("orbit functions have different dimensions")]
    DimensionMismatch,
}

fn check(name: &'static str, value: i64, max: i64) -> Result<(), CgcError> {
    if (0..=max).contains(&value) {
        Ok(())
    } else {
        Err(CgcError::Range { name, value, max })
    }
}

/// `sum c_ij v^(i) (x) w^(j)` for weights `(m, n)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TensorExpansion {
    pub m: i64,
    pub n: i64,
    pub terms: BTreeMap<(i64, i64), Rational>,
}

impl TensorExpansion {
    pub fn new(m: i64, n: i64) -> Self {
        TensorExpansion {
            m,
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn add_term(&mut self, i: i64, j: i64, c: Rational) {
        debug_assert!((0..=self.m).contains(&i) && (0..=self.n).contains(&j));
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry((i, j)).or_insert_with(Rational::zero);
        *e += &c;
        if e.is_zero() {
            self.terms.remove(&(i, j));
        }
    }

    pub fn get(&self, i: i64, j: i64) -> Rational {
        self.terms
            .get(&(i, j))
            .cloned()
            .unwrap_or_else(Rational::zero)
    }
}

/// `sum c_pk  bowtie^(k)_{m+n-2p}` for weights `(m, n)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitCoords {
    pub m: i64,
    pub n: i64,
    pub terms: BTreeMap<(i64, i64), Rational>,
}

impl OrbitCoords {
    /// Expands back into the tensor basis through [`orbit_transvectant`].
    pub fn expand(&self) -> TensorExpansion {
        let mut out = TensorExpansion::new(self.m, self.n);
        for ((p, k), c) in &self.terms {
            let t = orbit_transvectant(self.m, self.n, *p, *k).expect("stored indices are valid");
            for ((i, j), x) in t.terms {
                out.add_term(i, j, c * &x);
            }
        }
        out
    }
}

/// The rational 3j-symbol. Zero unless `i + j = k + p`; summands with a
/// vanishing denominator binomial are skipped.
pub fn cgc_3j(m: i64, n: i64, p: i64, i: i64, j: i64, k: i64) -> Rational {
    if i + j != k + p || [m, n, p, i, j, k].iter().any(|&v| v < 0) {
        return Rational::zero();
    }
    let mut total = Rational::zero();
    for q in 0..=k {
        let r = k - q;
        let den = binom(m, i - q) * binom(n, j - r);
        if den.is_zero() {
            continue;
        }
        let num = binom(p, i - q) * binom(i, q) * binom(j, r);
        if num.is_zero() {
            continue;
        }
        let term = num / den;
        if (i - k + r).rem_euclid(2) == 1 {
            total -= term;
        } else {
            total += term;
        }
    }
    total
}

/// The `p`-th transvectant of `v_m (x) w_n`.
pub fn transvectant(m: i64, n: i64, p: i64) -> Result<TensorExpansion, CgcError> {
    orbit_transvectant(m, n, p, 0)
}

/// `N`-orbit element `k` of the `p`-th transvectant, in divided powers.
pub fn orbit_transvectant(m: i64, n: i64, p: i64, k: i64) -> Result<TensorExpansion, CgcError> {
    check("m", m, i64::MAX)?;
    check("n", n, i64::MAX)?;
    check("p", p, m.min(n))?;
    check("k", k, m + n - 2 * p)?;
    let mut out = TensorExpansion::new(m, n);
    for i in 0..=m.min(k + p) {
        let j = k + p - i;
        if j > n {
            continue;
        }
        out.add_term(i, j, cgc_3j(m, n, p, i, j, k));
    }
    Ok(out)
}

/// Squared norm of the `p`-th transvectant for unit base vectors.
pub fn transvectant_norm_sq(m: i64, n: i64, p: i64) -> Result<Rational, CgcError> {
    check("p", p, m.min(n))?;
    Ok(binom(m + n - p + 1, p) / (binom(m, p) * binom(n, p)))
}

/// The same norm evaluated as a sum over the transvectant's terms.
pub fn transvectant_norm_sq_direct(m: i64, n: i64, p: i64) -> Result<Rational, CgcError> {
    check("p", p, m.min(n))?;
    Ok((0..=p)
        .filter(|i| *i <= m && p - i <= n)
        .map(|i| binom(p, i) * binom(p, i) / (binom(m, i) * binom(n, p - i)))
        .sum())
}

/// Expresses the tensor `v^(i) (x) w^(j)` in the transvectant orbit basis.
pub fn invert_tensor(m: i64, n: i64, i: i64, j: i64) -> Result<OrbitCoords, CgcError> {
    check("i", i, m)?;
    check("j", j, n)?;
    let mut terms = BTreeMap::new();
    for p in 0..=m.min(n).min(i + j) {
        let k = i + j - p;
        if k > m + n - 2 * p {
            continue;
        }
        let c = cgc_3j(m, n, p, i, j, k) * binom(m, i) * binom(n, j) * binom(m, p) * binom(n, p)
            / (binom(m + n - 2 * p, k) * binom(m + n - p + 1, p));
        if !c.is_zero() {
            terms.insert((p, k), c);
        }
    }
    Ok(OrbitCoords { m, n, terms })
}

/// Coefficient of `N^k zeta^(mu1+mu2-2 rho) delta^rho` in the product
/// `N^l1 zeta^mu1 * N^l2 zeta^mu2` (3D), with `p = 2 rho`, `k = l1 + l2 - p`.
pub fn lambda_coeff(l1: i64, mu1: i64, l2: i64, mu2: i64, rho: i64) -> Rational {
    let (m1, m2, p) = (2 * mu1, 2 * mu2, 2 * rho);
    let k = l1 + l2 - p;
    if k < 0 || rho < 0 || [l1, mu1, l2, mu2].iter().any(|&v| v < 0) {
        return Rational::zero();
    }
    let den = binom(m1 + m2 - 2 * p, k) * binom(m1 + m2 - p + 1, p) * binom(p, rho);
    if den.is_zero() {
        return Rational::zero();
    }
    let inv = cgc_3j(m1, m2, p, l1, l2, k) * binom(m1, l1) * binom(m2, l2) / den;
    if inv.is_zero() {
        return inv;
    }
    let contraction = Rational::from(2).pow(p as u32)
        * binom(mu1 + mu2 - rho, rho)
        * binom(mu1, rho)
        * binom(mu2, rho);
    inv * contraction * factorial_q(l1) * factorial_q(l2) / factorial_q(k)
}

/// Closed form of [`lambda_coeff`] at `rho = 0`.
pub fn lambda_rho0(l1: i64, mu1: i64, l2: i64, mu2: i64) -> Rational {
    let (m1, m2) = (2 * mu1, 2 * mu2);
    binom(m1 + m2 - l1 - l2, m1 - l1) / binom(m1 + m2, m1)
}

/// Closed form of [`lambda_coeff`] at `l1 = 0`.
pub fn lambda_l1_zero(mu1: i64, l2: i64, mu2: i64, rho: i64) -> Rational {
    let (m1, m2, p) = (2 * mu1, 2 * mu2, 2 * rho);
    let den = binom(p, rho) * binom(m1 + m2 - 2 * p, l2 - p) * binom(m1 + m2 - p + 1, p);
    if den.is_zero() {
        return Rational::zero();
    }
    Rational::from(2).pow(p as u32)
        * factorial_q(p)
        * binom(mu1, rho)
        * binom(mu2, rho)
        * binom(l2, p)
        * binom(m2 - p, m2 - l2)
        * binom(mu1 + mu2 - rho, rho)
        / den
}

/// Closed form of the `p`-th transvectant of `zeta^mu1 (x) zeta^mu2`, pushed
/// down to polynomials: the scalar in front of `zeta^(mu1+mu2-p) delta^rho`.
/// Odd `p` contract to zero.
pub fn contraction_coeff(mu1: i64, mu2: i64, p: i64) -> Rational {
    if p % 2 == 1 {
        return Rational::zero();
    }
    let rho = p / 2;
    let den = binom(2 * mu1, p) * binom(2 * mu2, p) * binom(p, rho);
    if den.is_zero() {
        return Rational::zero();
    }
    Rational::from(2).pow(p as u32)
        * binom(mu1 + mu2 - rho, rho)
        * binom(mu1, rho)
        * binom(mu2, rho)
        / den
}

/// The same contraction computed directly from polynomials (3D).
pub fn contraction_poly(mu1: u32, mu2: u32, p: i64) -> Result<CoordPoly<Rational>, CgcError> {
    let t = transvectant(2 * i64::from(mu1), 2 * i64::from(mu2), p)?;
    let d = Dim::Three;
    let mut out = CoordPoly::zero(d);
    for ((i, j), c) in &t.terms {
        let a = realize(&OrbitFunction::new(d, *i as u32, mu1, 0)).expect("valid");
        let b = realize(&OrbitFunction::new(d, *j as u32, mu2, 0)).expect("valid");
        let scale = c / &(factorial_q(*i) * factorial_q(*j));
        out = out.add(&a.mul(&b).expect("3D").scale(&scale)).expect("3D");
    }
    Ok(out)
}

/// Expansion of the product of two orbit functions over the orbit basis.
pub fn product_orbit(
    dim: Dim,
    o1: &OrbitFunction,
    o2: &OrbitFunction,
) -> Result<BTreeMap<OrbitFunction, Rational>, CgcError> {
    if o1.base.dim != dim || o2.base.dim != dim {
        return Err(CgcError::DimensionMismatch);
    }
    for o in [o1, o2] {
        check("l", i64::from(o.l), i64::from(o.base.weight()))?;
    }
    let (l1, mu1) = (i64::from(o1.l), i64::from(o1.base.mu));
    let (l2, mu2) = (i64::from(o2.l), i64::from(o2.base.mu));
    let mut out = BTreeMap::new();
    match dim {
        Dim::Two => {
            let c = binom(mu1 + mu2 - l1 - l2, mu1 - l1) / binom(mu1 + mu2, mu1);
            if !c.is_zero() {
                out.insert(
                    OrbitFunction::new(dim, o1.l + o2.l, o1.base.mu + o2.base.mu, 0),
                    c,
                );
            }
        }
        Dim::Three => {
            for rho in 0..=(l1 + l2) / 2 {
                if 2 * rho > mu1 + mu2 {
                    break;
                }
                let c = lambda_coeff(l1, mu1, l2, mu2, rho);
                if c.is_zero() {
                    continue;
                }
                let o = OrbitFunction::new(
                    dim,
                    (l1 + l2 - 2 * rho) as u32,
                    (mu1 + mu2 - 2 * rho) as u32,
                    o1.base.k + o2.base.k + rho as u32,
                );
                debug_assert!(o.is_valid());
                out.insert(o, c);
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(a: i64, b: i64) -> Rational {
        Rational::new(a, b)
    }

    #[test]
    fn cgc_examples() {
        assert_eq!(cgc_3j(2, 2, 1, 1, 1, 1), Rational::zero());
        for (m, n) in [(3, 4), (5, 2)] {
            for i in 0..=m {
                for j in 0..=n {
                    assert_eq!(cgc_3j(m, n, 0, i, j, i + j), Rational::one());
                }
            }
        }
        // i = 0 special case
        for (m, n, p) in [(4, 5, 2), (3, 3, 1)] {
            for j in p..=n {
                let k = j - p;
                assert_eq!(cgc_3j(m, n, p, 0, j, k), binom(j, k) / binom(n, p));
            }
        }
        assert_eq!(cgc_3j(4, 4, 0, 2, 1, 3), Rational::one());
    }

    #[test]
    fn transvectant_examples() {
        let t = transvectant(1, 1, 1).unwrap();
        assert_eq!(t.terms.len(), 2);
        assert_eq!(t.get(0, 1), q(1, 1));
        assert_eq!(t.get(1, 0), q(-1, 1));
        let t = transvectant(3, 5, 0).unwrap();
        assert_eq!(t.terms.len(), 1);
        assert_eq!(t.get(0, 0), q(1, 1));
        let t = transvectant(2, 2, 2).unwrap();
        assert_eq!(t.get(0, 2), q(1, 1));
        assert_eq!(t.get(1, 1), q(-1, 2));
        assert_eq!(t.get(2, 0), q(1, 1));
        assert!(transvectant(1, 2, 2).is_err());
    }

    #[test]
    fn orbit_transvectant_examples() {
        let t = orbit_transvectant(1, 1, 0, 1).unwrap();
        assert_eq!(t.get(0, 1), q(1, 1));
        assert_eq!(t.get(1, 0), q(1, 1));
        let t = orbit_transvectant(2, 4, 0, 4).unwrap();
        assert_eq!(t.terms.len(), 3);
        assert!(t.terms.iter().all(|((i, j), c)| i + j == 4 && c.is_one()));
        assert_eq!(
            orbit_transvectant(3, 4, 2, 0).unwrap(),
            transvectant(3, 4, 2).unwrap()
        );
    }

    #[test]
    fn norm_examples() {
        assert_eq!(transvectant_norm_sq(1, 1, 1).unwrap(), q(2, 1));
        assert_eq!(transvectant_norm_sq(4, 7, 0).unwrap(), q(1, 1));
        // C(3,2) / (C(2,2) C(2,2)) = 3; the direct sum agrees: 1 + 1/4 * 4 + 1
        assert_eq!(transvectant_norm_sq(2, 2, 2).unwrap(), q(3, 1));
        assert_eq!(transvectant_norm_sq_direct(2, 2, 2).unwrap(), q(3, 1));
    }

    #[test]
    fn invert_examples() {
        let c = invert_tensor(3, 2, 0, 0).unwrap();
        assert_eq!(c.terms.len(), 1);
        assert_eq!(c.terms[&(0, 0)], q(1, 1));
        let c = invert_tensor(1, 1, 1, 0).unwrap();
        let back = c.expand();
        assert_eq!(back.terms.len(), 1);
        assert_eq!(back.get(1, 0), q(1, 1));
        // i = 0 closed form
        let (m, n, j) = (3, 4, 3);
        let c = invert_tensor(m, n, 0, j).unwrap();
        for p in 0..=j.min(m) {
            let expect = binom(j, p) * binom(n, j) * binom(m, p)
                / (binom(m + n - 2 * p, j - p) * binom(m + n - p + 1, p));
            assert_eq!(
                c.terms.get(&(p, j - p)).cloned().unwrap_or_default(),
                expect
            );
        }
    }

    #[test]
    fn lambda_examples() {
        assert_eq!(lambda_coeff(2, 3, 14, 13, 0), q(65, 32364));
        assert_eq!(lambda_coeff(0, 1, 4, 2, 0), q(1, 15));
        assert_eq!(lambda_coeff(0, 1, 4, 2, 1), q(48, 5));
        assert_eq!(lambda_coeff(0, 1, 2, 2, 0), q(2, 5));
        assert_eq!(lambda_coeff(0, 1, 2, 2, 1), q(8, 5));
        assert_eq!(lambda_coeff(0, 1, 1, 2, 0), q(2, 3));
        assert_eq!(lambda_coeff(0, 1, 3, 2, 1), q(24, 5));
        assert_eq!(lambda_coeff(3, 1, 0, 1, 2), Rational::zero());
    }

    #[test]
    fn product_examples() {
        let d = Dim::Three;
        let z = OrbitFunction::new(d, 0, 1, 0);
        let p = product_orbit(d, &z, &z).unwrap();
        assert_eq!(p.len(), 1);
        assert_eq!(p[&OrbitFunction::new(d, 0, 2, 0)], q(1, 1));
        let p = product_orbit(d, &z, &OrbitFunction::new(d, 4, 2, 0)).unwrap();
        assert_eq!(p.len(), 2);
        assert_eq!(p[&OrbitFunction::new(d, 4, 3, 0)], q(1, 15));
        assert_eq!(p[&OrbitFunction::new(d, 2, 1, 1)], q(48, 5));
        let d2 = Dim::Two;
        let p = product_orbit(
            d2,
            &OrbitFunction::new(d2, 0, 1, 0),
            &OrbitFunction::new(d2, 1, 1, 0),
        )
        .unwrap();
        assert_eq!(p[&OrbitFunction::new(d2, 1, 2, 0)], q(1, 2));
    }

    #[test]
    fn contraction_of_linear_forms() {
        let d = contraction_poly(1, 1, 2).unwrap();
        assert_eq!(d, crate::polyvf::delta::<Rational>().scale(&q(2, 1)));
        assert_eq!(contraction_coeff(1, 1, 2), q(2, 1));
        assert!(contraction_poly(1, 1, 1).unwrap().is_zero());
    }
}
