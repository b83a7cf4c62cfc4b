//! Numerical building blocks: quadrature, root finding, small dense solves and
//! exact rational polynomials.

pub mod linalg;
pub mod poly;
pub mod quadrature;
pub mod roots;
