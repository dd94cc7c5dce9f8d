//! Truncated arithmetic in the base field and its unramified extensions.

pub mod base;
pub mod residue;
pub mod unramified;

pub use base::{BaseField, BaseKind, BaseRing, Precision, LOSS_BUDGET};
pub use residue::{Fq, ResidueField};
pub use unramified::{Rm, TruncatedUnramified, UnramRing, Valuation};
