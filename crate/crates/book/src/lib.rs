//! Guide chapters compiled as doctests.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/dominance.md")]
pub mod dominance {}

#[doc = include_str!("../../../book/src/directions.md")]
pub mod directions {}

#[doc = include_str!("../../../book/src/line_search.md")]
pub mod line_search {}

#[doc = include_str!("../../../book/src/front_descent.md")]
pub mod front_descent {}

#[doc = include_str!("../../../book/src/hypervolume.md")]
pub mod hypervolume {}

#[doc = include_str!("../../../book/src/metrics.md")]
pub mod metrics {}

#[doc = include_str!("../../../book/src/problems.md")]
pub mod problems {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
