//! The sl2 orbit basis of polynomial functions.
//!
//! Kernel elements of `M` are monomials in `zeta` and (in 3D) `delta`; applying
//! `N` repeatedly walks along the orbit until it leaves the representation.
//! Together these orbits span every homogeneous polynomial space, and
//! [`to_orbit_coords`] inverts that spanning set degree by degree.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, OnceLock, RwLock};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exactnum::Rational;
use crate::linalg::{inverse, LinalgError};
use crate::polyvf::{apply_derivation, delta, m_op, n_op, zeta, CoordMonomial, CoordPoly, Dim};
use crate::symcoeff::Coefficient;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Sl2Error {
    #[error("orbit exhausted: l = {l} exceeds weight {weight}")]
    OrbitExhausted { l: u32, weight: u32 },
    #[error("orbit basis of degree {degree} is not invertible: {source}")]
    Internal { degree: u32, source: LinalgError },
}

/// `zeta^mu * delta^k`, a kernel element of `M`. In 2D `k` is always 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct KerMMonomial {
    pub dim: Dim,
    pub mu: u32,
    pub k: u32,
}

impl KerMMonomial {
    pub fn new(dim: Dim, mu: u32, k: u32) -> Self {
        assert!(dim == Dim::Three || k == 0, "no delta in two dimensions");
        KerMMonomial { dim, mu, k }
    }

    /// H-eigenvalue of the monomial, i.e. the length of its orbit minus one.
    pub fn weight(&self) -> u32 {
        match self.dim {
            Dim::Two => self.mu,
            Dim::Three => 2 * self.mu,
        }
    }

    pub fn degree(&self) -> u32 {
        self.mu + 2 * self.k
    }
}

/// `N^l (zeta^mu) * delta^k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct OrbitFunction {
    pub base: KerMMonomial,
    pub l: u32,
}

impl OrbitFunction {
    pub fn new(dim: Dim, l: u32, mu: u32, k: u32) -> Self {
        OrbitFunction {
            base: KerMMonomial::new(dim, mu, k),
            l,
        }
    }

    pub fn is_valid(&self) -> bool {
        self.l <= self.base.weight()
    }

    pub fn degree(&self) -> u32 {
        self.base.degree()
    }

    pub fn h_weight(&self) -> i64 {
        i64::from(self.base.weight()) - 2 * i64::from(self.l)
    }
}

type RealizeCache = RwLock<HashMap<OrbitFunction, Arc<CoordPoly<Rational>>>>;

fn realize_cache() -> &'static RealizeCache {
    static CACHE: OnceLock<RealizeCache> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// The polynomial `N^l(zeta^mu) * delta^k`. Memoized; the orbit is built by
/// repeated differentiation, so every entry is exact by construction.
pub fn realize(o: &OrbitFunction) -> Result<Arc<CoordPoly<Rational>>, Sl2Error> {
    if !o.is_valid() {
        return Err(Sl2Error::OrbitExhausted {
            l: o.l,
            weight: o.base.weight(),
        });
    }
    if let Some(p) = realize_cache().read().expect("cache lock").get(o) {
        return Ok(p.clone());
    }
    let dim = o.base.dim;
    let poly = if o.l == 0 {
        let mut p = zeta::<Rational>(dim).pow(o.base.mu);
        if o.base.k > 0 {
            p = p.mul(&delta::<Rational>().pow(o.base.k)).expect("3D");
        }
        p
    } else {
        // delta is N-invariant, so N acts on the whole product
        let prev = realize(&OrbitFunction { l: o.l - 1, ..*o })?;
        apply_derivation(&n_op(dim), &prev).expect("same dimension")
    };
    let poly = Arc::new(poly);
    realize_cache()
        .write()
        .expect("cache lock")
        .insert(*o, poly.clone());
    Ok(poly)
}

/// Whether `M f = 0`.
pub fn ker_m_test<C: Coefficient>(f: &CoordPoly<C>) -> bool {
    apply_derivation(&m_op(f.dim()), f)
        .expect("same dimension")
        .is_zero()
}

/// Kernel monomials of total degree `d`, by descending `mu`.
pub fn ker_m_basis(dim: Dim, d: u32) -> Vec<KerMMonomial> {
    match dim {
        Dim::Two => vec![KerMMonomial::new(dim, d, 0)],
        Dim::Three => (0..=d / 2)
            .map(|k| KerMMonomial::new(dim, d - 2 * k, k))
            .collect(),
    }
}

/// Outcome of [`h_weight`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HWeight {
    Eigen(i64),
    /// The polynomial is not an H-eigenvector.
    Mixed,
    /// The zero polynomial, an eigenvector for every eigenvalue.
    Zero,
}

pub fn h_weight<C: Coefficient>(f: &CoordPoly<C>) -> HWeight {
    // H is diagonal on monomials, so f is an eigenvector iff all its
    // monomials share one eigenvalue
    let mono_weight = |m: &CoordMonomial| -> i64 {
        let [ex, ey, ez] = m.0.map(i64::from);
        match f.dim() {
            Dim::Two => ey - ex,
            Dim::Three => 2 * (ez - ex),
        }
    };
    let mut weights = f.terms().map(|(m, _)| mono_weight(m));
    let Some(w) = weights.next() else {
        return HWeight::Zero;
    };
    if weights.all(|v| v == w) {
        HWeight::Eigen(w)
    } else {
        HWeight::Mixed
    }
}

/// All orbit functions of total degree `d`: kernel monomials by descending
/// `mu`, each followed by its orbit in increasing `l`.
pub fn orbit_basis(dim: Dim, d: u32) -> Vec<OrbitFunction> {
    ker_m_basis(dim, d)
        .into_iter()
        .flat_map(|base| (0..=base.weight()).map(move |l| OrbitFunction { base, l }))
        .collect()
}

struct DegreeInverse {
    basis: Vec<OrbitFunction>,
    monomials: BTreeMap<CoordMonomial, usize>,
    // inv[j][i]: coordinate j from monomial coefficient i
    inv: Vec<Vec<Rational>>,
}

type InverseCache = RwLock<HashMap<(Dim, u32), Arc<DegreeInverse>>>;

fn degree_inverse(dim: Dim, d: u32) -> Result<Arc<DegreeInverse>, Sl2Error> {
    static CACHE: OnceLock<InverseCache> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(e) = cache.read().expect("cache lock").get(&(dim, d)) {
        return Ok(e.clone());
    }
    let basis = orbit_basis(dim, d);
    let monos = CoordMonomial::of_degree(dim, d);
    let monomials: BTreeMap<CoordMonomial, usize> =
        monos.iter().enumerate().map(|(i, m)| (*m, i)).collect();
    let n = monos.len();
    let mut a = vec![vec![Rational::zero(); basis.len()]; n];
    for (j, o) in basis.iter().enumerate() {
        for (m, c) in realize(o)?.terms() {
            a[monomials[m]][j] = c.clone();
        }
    }
    let inv = inverse(&a).map_err(|source| Sl2Error::Internal { degree: d, source })?;
    let entry = Arc::new(DegreeInverse {
        basis,
        monomials,
        inv,
    });
    cache
        .write()
        .expect("cache lock")
        .insert((dim, d), entry.clone());
    Ok(entry)
}

/// Unique expansion `f = sum c_o realize(o)` over the orbit basis.
pub fn to_orbit_coords<C: Coefficient>(
    f: &CoordPoly<C>,
) -> Result<BTreeMap<OrbitFunction, C>, Sl2Error> {
    let mut by_degree: BTreeMap<u32, Vec<(CoordMonomial, C)>> = BTreeMap::new();
    for (m, c) in f.terms() {
        by_degree
            .entry(m.degree())
            .or_default()
            .push((*m, c.clone()));
    }
    let mut out = BTreeMap::new();
    for (d, terms) in by_degree {
        let di = degree_inverse(f.dim(), d)?;
        for (j, o) in di.basis.iter().enumerate() {
            let mut acc = C::zero();
            for (m, c) in &terms {
                let w = &di.inv[j][di.monomials[m]];
                if !w.is_zero() {
                    acc.add_assign_ref(&c.scale(w));
                }
            }
            if !acc.is_zero() {
                out.insert(*o, acc);
            }
        }
    }
    Ok(out)
}

/// Inverse of [`to_orbit_coords`].
pub fn from_orbit_coords<C: Coefficient>(
    dim: Dim,
    coords: &BTreeMap<OrbitFunction, C>,
) -> Result<CoordPoly<C>, Sl2Error> {
    let mut out = CoordPoly::zero(dim);
    for (o, c) in coords {
        for (m, r) in realize(o)?.terms() {
            out.add_term(*m, c.scale(r));
        }
    }
    Ok(out)
}
