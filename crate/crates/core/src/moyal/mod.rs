//! Exact Weyl algebra: polynomial symbols in (q, p) with a formal hbar, the
//! Moyal product, Poisson brackets and exponentials of linear forms.

pub mod coeff;
mod explinear;
mod star;
mod symbol;
mod text;

pub use explinear::{star_exp_linear, ExpLinear};
pub use star::{commutator, i_hbar, poisson, star, weyl_order_polynomial, Generator, OmegaConvention};
pub use symbol::{Monomial, NumericPoly, PolySymbol, MAX_DOF, MAX_EXPONENT};
pub use text::{parse, parse_with_dim, print};
