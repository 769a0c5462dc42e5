// `!(x > 0.0)` deliberately rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod homeo;
pub mod mobius;
pub mod norms;
pub mod preschwarzian;
pub mod quadrature;
pub mod rigged;
pub mod schiffer;
pub mod series;
pub mod stencil;
pub mod uniformize;
pub mod verify;
pub mod welding;

pub use error::{Error, Result};
pub use series::{PowerSeries, SeriesKind, C64};
