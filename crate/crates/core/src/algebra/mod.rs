//! Coefficient fields, Witt scalars, polynomials and the truncated series model.

pub mod field;
pub mod matrix;
pub mod poly;
pub mod ram;
pub mod ring;
pub mod valuation;
pub mod witt;
pub mod zp;

pub use field::{Field, FieldElem, FieldParams};
pub use matrix::Mat;
pub use poly::{PolyRing, PolySeries, Polynomial, WittPoly};
pub use ram::{Comparison, EpsilonModel, RamRing, RamSeries};
pub use ring::CoeffRing;
pub use valuation::Valuation;
pub use witt::{WittRing, WittScalar};
pub use zp::ZpInt;
