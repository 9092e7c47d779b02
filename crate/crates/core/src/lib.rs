//! Exact orbit-basis computations for nilpotent vector fields in two and three
//! dimensions: rational arithmetic, sl2 orbit bases, Clebsch-Gordan inversion,
//! Euler-family structure constants and multi-level normal forms.

pub mod cgc;
pub mod exactnum;
pub mod liealg;
pub mod linalg;
pub mod normalform;
pub mod polyvf;
pub mod sl2rep;
pub mod symcoeff;

pub use exactnum::{binom, factorial, ExactNumError, Rational};
pub use liealg::{bracket, comb_bracket, LieComb, LieError, OrbitElement};
pub use normalform::{NFProblem, NFReport, NormalFormError};
pub use polyvf::{CoordPoly, Dim, VectorField};
pub use symcoeff::{Coefficient, ParamMonomial, ParamPoly, ParamSymbol, SymCoeffError};
