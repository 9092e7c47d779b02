//! Reference computations that avoid the closed forms under test: orbit
//! functions and brackets are built directly from coordinate derivatives.

#![allow(dead_code)]

use nilnorm::liealg::{LieComb, OrbitElement};
use nilnorm::polyvf::{CoordPoly, Dim};
use nilnorm::{Coefficient, Rational};

pub fn q(a: i64, b: i64) -> Rational {
    Rational::new(a, b)
}

/// Pascal's triangle up to row `n`, as rationals.
pub fn pascal(n: usize) -> Vec<Vec<Rational>> {
    let mut rows: Vec<Vec<Rational>> = vec![vec![Rational::one()]];
    for i in 1..=n {
        let prev = &rows[i - 1];
        let mut row = vec![Rational::one(); i + 1];
        for j in 1..i {
            row[j] = &prev[j - 1] + &prev[j];
        }
        rows.push(row);
    }
    rows
}

/// `binom(n, k)` from a table, zero outside the triangle.
pub fn choose(table: &[Vec<Rational>], n: i64, k: i64) -> Rational {
    if n < 0 || k < 0 || k > n {
        return Rational::zero();
    }
    table[n as usize][k as usize].clone()
}

/// `N f` with `N = x d/dy (+ 2y d/dz in 3D)`.
pub fn apply_n<C: Coefficient>(f: &CoordPoly<C>) -> CoordPoly<C> {
    let dim = f.dim();
    let x = CoordPoly::var(dim, 0);
    let mut out = x.mul(&f.derivative(1)).unwrap();
    if dim == Dim::Three {
        let two_y = CoordPoly::var(dim, 1).scale(&Rational::from(2));
        out = out.add(&two_y.mul(&f.derivative(2)).unwrap()).unwrap();
    }
    out
}

/// `N^l(zeta^mu) delta^k`, zeta being the last coordinate.
pub fn orbit_poly(e: &OrbitElement) -> CoordPoly<Rational> {
    let dim = e.dim;
    let zeta: CoordPoly<Rational> = CoordPoly::var(dim, dim.n() - 1);
    let mut f = zeta.pow(e.mu);
    for _ in 0..e.l {
        f = apply_n(&f);
    }
    if e.k > 0 {
        let xz = CoordPoly::var(dim, 0).mul(&CoordPoly::var(dim, 2)).unwrap();
        let yy = CoordPoly::var(dim, 1).pow(2);
        f = f.mul(&xz.sub(&yy).unwrap().pow(e.k)).unwrap();
    }
    f
}

pub type Field<C> = Vec<CoordPoly<C>>;

pub fn euler_times<C: Coefficient>(f: &CoordPoly<C>) -> Field<C> {
    (0..f.dim().n())
        .map(|i| f.mul(&CoordPoly::var(f.dim(), i)).unwrap())
        .collect()
}

pub fn nilpotent<C: Coefficient>(dim: Dim) -> Field<C> {
    let mut v = vec![CoordPoly::zero(dim), CoordPoly::var(dim, 0)];
    if dim == Dim::Three {
        v.push(CoordPoly::var(dim, 1).scale(&Rational::from(2)));
    }
    v
}

/// `v(f) = sum v_i df/dx_i`.
pub fn derive<C: Coefficient>(v: &Field<C>, f: &CoordPoly<C>) -> CoordPoly<C> {
    let mut out = CoordPoly::zero(f.dim());
    for (i, vi) in v.iter().enumerate() {
        out = out.add(&vi.mul(&f.derivative(i)).unwrap()).unwrap();
    }
    out
}

/// `[v, w]_i = v(w_i) - w(v_i)`.
pub fn field_bracket<C: Coefficient>(v: &Field<C>, w: &Field<C>) -> Field<C> {
    (0..v.len())
        .map(|i| derive(v, &w[i]).sub(&derive(w, &v[i])).unwrap())
        .collect()
}

pub fn field_add<C: Coefficient>(v: &Field<C>, w: &Field<C>) -> Field<C> {
    v.iter().zip(w).map(|(a, b)| a.add(b).unwrap()).collect()
}

pub fn field_scale<C: Coefficient>(v: &Field<C>, r: &Rational) -> Field<C> {
    v.iter().map(|a| a.scale(r)).collect()
}

/// Drops every monomial of degree above `max_deg`.
pub fn field_truncate<C: Coefficient>(v: &Field<C>, max_deg: u32) -> Field<C> {
    v.iter()
        .map(|a| {
            let mut out = CoordPoly::zero(a.dim());
            for (m, c) in a.terms() {
                if m.degree() <= max_deg {
                    out.add_term(*m, c.clone());
                }
            }
            out
        })
        .collect()
}

/// Realizes a combination through [`orbit_poly`].
pub fn realize_comb<C: Coefficient>(u: &LieComb<C>) -> Field<C> {
    let dim = u.dim();
    let mut out: Field<C> = if u.has_n() {
        nilpotent(dim)
    } else {
        vec![CoordPoly::zero(dim); dim.n()]
    };
    for (e, c) in u.terms() {
        let f = orbit_poly(e).map_coeffs(|r| c.scale(r));
        out = field_add(&out, &euler_times(&f));
    }
    out
}

/// `exp(ad_T) v` on realized fields, truncated at component degree
/// `max_grade + 1`.
pub fn exp_action<C: Coefficient>(t: &Field<C>, v: &Field<C>, max_grade: u32) -> Field<C> {
    let cap = max_grade + 1;
    let mut total = field_truncate(v, cap);
    let mut term = total.clone();
    for j in 1.. {
        term = field_scale(&field_truncate(&field_bracket(t, &term), cap), &q(1, j));
        if term.iter().all(|c| c.is_zero()) {
            break;
        }
        total = field_add(&total, &term);
    }
    total
}
