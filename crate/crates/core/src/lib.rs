//! Exact computation in the Schur algebras `S(2,d)`, presented as quotients
//! of the enveloping algebra of `gl2`, with normal-order straightening,
//! truncation, structure constants and matrix oracles.

pub mod exactmath;
pub mod expr;
pub mod linalg;
pub mod oracle;
pub mod schur;
pub mod straighten;

pub use exactmath::{IVPoly, Rational, Var};
pub use expr::{parse, parse_element, Expr, ParseError};
pub use linalg::Poly;
pub use schur::{SchurContext, StructureTable};
pub use straighten::{Element, Flavor, Generator, Mode, NormalMonomial, Rules};
