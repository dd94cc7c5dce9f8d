//! Finite extensions, their Galois groups and the split algebras `L_K`.

pub mod field;
pub mod algebra;
pub mod galois;
pub mod lnr;
pub mod tensor;
pub mod tower;

pub use field::{Field, FieldSpec};
pub use lnr::{LnrElem, LnrRing, Poly};
pub use tower::{Context, Ext};
pub use algebra::{Algebra, Lk, RelGroup};
