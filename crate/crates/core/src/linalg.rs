//! Exact linear algebra: fraction-free (Bareiss) elimination for square
//! systems and an incremental row echelon over sparse rational vectors.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::exactnum::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is singular")]
    Singular,
    #[error("right-hand side has {got} rows, expected {expected}")]
    ShapeMismatch { expected: usize, got: usize },
}

/// Solves `A X = B` over the integers by Bareiss elimination.
///
/// Returns `(X', d)` with `X = X' / d`, where `d = det(A)` up to sign. Every
/// intermediate division is exact, so entries never grow beyond the size of
/// the minors of `A`.
pub fn bareiss_solve(
    a: &[Vec<BigInt>],
    b: &[Vec<BigInt>],
) -> Result<(Vec<Vec<BigInt>>, BigInt), LinalgError> {
    let n = a.len();
    if let Some(row) = a.iter().find(|r| r.len() != n) {
        return Err(LinalgError::NotSquare {
            rows: n,
            cols: row.len(),
        });
    }
    if b.len() != n {
        return Err(LinalgError::ShapeMismatch {
            expected: n,
            got: b.len(),
        });
    }
    let extra = b.first().map_or(0, Vec::len);
    let mut m: Vec<Vec<BigInt>> = a
        .iter()
        .zip(b)
        .map(|(ra, rb)| ra.iter().chain(rb.iter()).cloned().collect())
        .collect();
    let width = n + extra;
    let mut prev = BigInt::one();
    for col in 0..n {
        let pivot = (col..n)
            .find(|&r| !m[r][col].is_zero())
            .ok_or(LinalgError::Singular)?;
        m.swap(col, pivot);
        for r in col + 1..n {
            for c in col + 1..width {
                let v = &m[col][col] * &m[r][c] - &m[r][col] * &m[col][c];
                m[r][c] = v / &prev;
            }
            m[r][col] = BigInt::zero();
        }
        prev = m[col][col].clone();
    }
    let det = prev;
    // back substitution: x_i = (det * b_i - sum a_ij x_j) / a_ii stays integral
    let mut x = vec![vec![BigInt::zero(); extra]; n];
    for c in 0..extra {
        for i in (0..n).rev() {
            let mut acc = &det * &m[i][n + c];
            for j in i + 1..n {
                acc -= &m[i][j] * &x[j][c];
            }
            let (q, r) = acc.div_rem(&m[i][i]);
            debug_assert!(r.is_zero(), "Bareiss back substitution must be exact");
            x[i][c] = q;
        }
    }
    Ok((x, det))
}

/// Inverse of a square rational matrix, computed fraction-free after clearing
/// denominators row by row.
pub fn inverse(a: &[Vec<Rational>]) -> Result<Vec<Vec<Rational>>, LinalgError> {
    let n = a.len();
    let mut ai = Vec::with_capacity(n);
    let mut scales = Vec::with_capacity(n);
    for row in a {
        if row.len() != n {
            return Err(LinalgError::NotSquare {
                rows: n,
                cols: row.len(),
            });
        }
        let l = row.iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
        ai.push(
            row.iter()
                .map(|q| q.numer() * (&l / q.denom()))
                .collect::<Vec<_>>(),
        );
        scales.push(l);
    }
    // (D A) X = D  with D = diag(scales)  =>  X = A^{-1}
    let rhs: Vec<Vec<BigInt>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        scales[i].clone()
                    } else {
                        BigInt::zero()
                    }
                })
                .collect()
        })
        .collect();
    let (x, det) = bareiss_solve(&ai, &rhs)?;
    Ok(x.into_iter()
        .map(|row| {
            row.into_iter()
                .map(|v| Rational::from_big(v, det.clone()))
                .collect()
        })
        .collect())
}

/// Rank of a rational matrix given as rows.
pub fn rank(rows: &[Vec<Rational>]) -> usize {
    let mut ech: Echelon<usize> = Echelon::new();
    for row in rows {
        let v: BTreeMap<usize, Rational> = row
            .iter()
            .enumerate()
            .filter(|(_, q)| !q.is_zero())
            .map(|(i, q)| (i, q.clone()))
            .collect();
        ech.insert(v);
    }
    ech.rank()
}

/// Sparse vector keyed by an ordered coordinate type.
pub type SparseVec<K> = BTreeMap<K, Rational>;

/// Result of inserting a vector into an [`Echelon`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Insertion<K> {
    /// The vector was independent and now owns this pivot coordinate.
    Pivot(K),
    /// The vector reduced to zero; the map expresses it as a combination of
    /// previously inserted vectors (by insertion index), `v = sum c_i v_i`.
    Dependent(BTreeMap<usize, Rational>),
}

#[derive(Debug, Clone)]
struct EchelonRow<K> {
    pivot: K,
    // normalized so the pivot entry is 1
    vector: SparseVec<K>,
    // row = sum_i combo[i] * original_i
    combo: BTreeMap<usize, Rational>,
}

/// Incremental row echelon over sparse rational vectors.
///
/// The pivot of a new row is the smallest nonzero coordinate of its reduced
/// form, so the ordering of `K` is the pivot preference. Each row remembers
/// which combination of the inserted vectors produced it.
#[derive(Debug, Clone)]
pub struct Echelon<K> {
    rows: Vec<EchelonRow<K>>,
    inserted: usize,
}

impl<K: Ord + Clone> Default for Echelon<K> {
    fn default() -> Self {
        Self::new()
    }
}

fn axpy<K: Ord + Clone>(acc: &mut SparseVec<K>, c: &Rational, v: &SparseVec<K>) {
    for (k, x) in v {
        let e = acc.entry(k.clone()).or_insert_with(Rational::zero);
        *e += c * x;
        if e.is_zero() {
            acc.remove(k);
        }
    }
}

impl<K: Ord + Clone> Echelon<K> {
    pub fn new() -> Self {
        Echelon {
            rows: Vec::new(),
            inserted: 0,
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn pivots(&self) -> impl Iterator<Item = &K> {
        self.rows.iter().map(|r| &r.pivot)
    }

    /// Reduces `v` against all rows. Returns the remainder, which is zero at
    /// every pivot, and the combination `c` with `v = remainder + sum c_i v_i`.
    pub fn reduce(&self, v: &SparseVec<K>) -> (SparseVec<K>, BTreeMap<usize, Rational>) {
        let mut rem = v.clone();
        let mut combo = BTreeMap::new();
        for row in &self.rows {
            let Some(c) = rem.get(&row.pivot).cloned() else {
                continue;
            };
            axpy(&mut rem, &-&c, &row.vector);
            axpy(&mut combo, &c, &row.combo);
        }
        (rem, combo)
    }

    pub fn insert(&mut self, v: SparseVec<K>) -> Insertion<K> {
        let index = self.inserted;
        self.inserted += 1;
        let (rem, combo) = self.reduce(&v);
        let Some((pivot, lead)) = rem.iter().next().map(|(k, c)| (k.clone(), c.clone())) else {
            return Insertion::Dependent(combo);
        };
        let scale = lead.inv().expect("nonzero lead");
        let vector: SparseVec<K> = rem.into_iter().map(|(k, c)| (k, c * &scale)).collect();
        // row = (v - sum combo_i v_i) * scale
        let mut row_combo: BTreeMap<usize, Rational> =
            combo.into_iter().map(|(i, c)| (i, -(c * &scale))).collect();
        row_combo.insert(index, scale);
        self.rows.push(EchelonRow {
            pivot: pivot.clone(),
            vector,
            combo: row_combo,
        });
        Insertion::Pivot(pivot)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> Rational {
        Rational::from(n)
    }

    #[test]
    fn bareiss_small_system() {
        let a = vec![
            vec![BigInt::from(2), BigInt::from(1)],
            vec![BigInt::from(1), BigInt::from(3)],
        ];
        let b = vec![vec![BigInt::from(3)], vec![BigInt::from(5)]];
        let (x, d) = bareiss_solve(&a, &b).unwrap();
        let x0 = Rational::from_big(x[0][0].clone(), d.clone());
        let x1 = Rational::from_big(x[1][0].clone(), d);
        assert_eq!(x0, Rational::new(4, 5));
        assert_eq!(x1, Rational::new(7, 5));
    }

    #[test]
    fn bareiss_needs_row_swap() {
        let a = vec![
            vec![BigInt::from(0), BigInt::from(1)],
            vec![BigInt::from(1), BigInt::from(0)],
        ];
        let b = vec![vec![BigInt::from(7)], vec![BigInt::from(9)]];
        let (x, d) = bareiss_solve(&a, &b).unwrap();
        assert_eq!(Rational::from_big(x[0][0].clone(), d.clone()), q(9));
        assert_eq!(Rational::from_big(x[1][0].clone(), d), q(7));
    }

    #[test]
    fn singular_is_reported() {
        let a = vec![vec![q(1), q(2)], vec![q(2), q(4)]];
        assert_eq!(inverse(&a), Err(LinalgError::Singular));
        assert_eq!(rank(&a), 1);
    }

    #[test]
    #[allow(clippy::needless_range_loop)]
    fn inverse_of_rational_matrix() {
        let a = vec![
            vec![Rational::new(1, 2), q(1), q(0)],
            vec![q(0), Rational::new(1, 3), q(1)],
            vec![q(1), q(0), q(2)],
        ];
        let inv = inverse(&a).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let s: Rational = (0..3).map(|k| &a[i][k] * &inv[k][j]).sum();
                assert_eq!(s, if i == j { q(1) } else { q(0) });
            }
        }
    }

    #[test]
    fn echelon_tracks_dependencies() {
        let mut e: Echelon<u32> = Echelon::new();
        let v0: SparseVec<u32> = [(0, q(1)), (1, q(2))].into_iter().collect();
        let v1: SparseVec<u32> = [(1, q(1)), (2, q(1))].into_iter().collect();
        let v2: SparseVec<u32> = [(0, q(2)), (1, q(7)), (2, q(3))].into_iter().collect();
        assert_eq!(e.insert(v0), Insertion::Pivot(0));
        assert_eq!(e.insert(v1), Insertion::Pivot(1));
        match e.insert(v2) {
            Insertion::Dependent(c) => {
                assert_eq!(c[&0], q(2));
                assert_eq!(c[&1], q(3));
            }
            other => panic!("expected dependency, got {other:?}"),
        }
        let target: SparseVec<u32> = [(0, q(1)), (2, q(5))].into_iter().collect();
        let (rem, combo) = e.reduce(&target);
        assert!(!rem.contains_key(&0) && !rem.contains_key(&1));
        // target = rem + sum combo_i v_i
        let mut back = rem.clone();
        let vs = [
            [(0u32, q(1)), (1, q(2))]
                .into_iter()
                .collect::<SparseVec<u32>>(),
            [(1u32, q(1)), (2, q(1))].into_iter().collect(),
        ];
        for (i, c) in &combo {
            axpy(&mut back, c, &vs[*i]);
        }
        assert_eq!(back, target);
    }
}
