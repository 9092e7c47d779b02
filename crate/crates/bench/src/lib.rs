//! Benchmark inputs shared by the criterion targets.

use nilnorm::normalform::{Mode, NFProblem};
use nilnorm::{Dim, LieComb, OrbitElement, ParamPoly, ParamSymbol, Rational};

/// `N + A^0_1 + sum c A^l_m` with small integer coefficients, every basis
/// element of degree 2..=max_grade present.
pub fn dense_2d(nu: u32, max_grade: u32) -> NFProblem {
    let mut v = LieComb::nilpotent(Dim::Two);
    v.add_term(OrbitElement::new2(0, nu), Rational::one());
    for m in nu + 1..=max_grade {
        for l in 0..=m {
            let c = i64::from((3 * m + 5 * l) % 7) - 3;
            v.add_term(OrbitElement::new2(l, m), Rational::from(c));
        }
    }
    NFProblem::new(v.lift(), max_grade, Mode::Numeric)
}

/// The generic three-dimensional field with one symbol per basis element.
pub fn symbolic_3d(max_grade: u32) -> NFProblem {
    let mut v: LieComb<ParamPoly> = LieComb::nilpotent(Dim::Three);
    for e in nilnorm::normalform::basis_up_to(Dim::Three, max_grade) {
        v.add_term(e, ParamPoly::symbol(ParamSymbol::coeff3(e.l, e.mu, e.k)));
    }
    NFProblem::new(v, max_grade, Mode::Symbolic)
}
