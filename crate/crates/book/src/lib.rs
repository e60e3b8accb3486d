//! Compiles every Rust block in `book/src` as a doc-test, so the guide
//! cannot drift from the library.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/distributions.md")]
pub mod distributions {}

#[doc = include_str!("../../../book/src/prediction_intervals.md")]
pub mod prediction_intervals {}

#[doc = include_str!("../../../book/src/interval_scores.md")]
pub mod interval_scores {}

#[doc = include_str!("../../../book/src/specified_intervals.md")]
pub mod specified_intervals {}

#[doc = include_str!("../../../book/src/vorobev.md")]
pub mod vorobev {}

#[doc = include_str!("../../../book/src/lab.md")]
pub mod lab {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}

#[doc = include_str!("../../../README.md")]
pub mod readme {}
