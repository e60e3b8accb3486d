//! Consistent scoring and identification for set-valued forecasts.
//!
//! The crate covers two kinds of set-valued functionals:
//!
//! * **prediction intervals** of level α, handled either selectively (one
//!   interval claimed to cover with probability α) or exhaustively (the whole
//!   family `ℐ_α(F)` of such intervals, represented by its boundary function
//!   `Γ_α(F)`);
//! * **Vorob'ev quantiles** of random closed sets on finite grids.
//!
//! Distributions come from a small mixture family with exact CDF arithmetic
//! ([`Distribution`]). The [`lab`] module reproduces the classical
//! counterexamples numerically.
//!
//! ```
//! use setscore::{Distribution, interval_family::gamma_alpha};
//!
//! let f = Distribution::uniform(0.0, 1.0).unwrap();
//! let b = gamma_alpha(&f, 0.75, -0.3).unwrap();
//! assert_eq!(b, 0.75);
//! ```

pub mod dist;
pub mod error;
pub mod ext;
pub mod interval_family;
pub mod interval_scores;
pub mod lab;
pub mod quadrature;
pub mod specified_intervals;
pub mod vorobev;
pub mod util;

pub use dist::{Distribution, QuantileSet};
pub use error::{Error, Result};
pub use ext::ExtReal;
pub use interval_family::{Interval, IntervalFamily, ShortestIntervals};
pub use interval_scores::{PointMeasure, ScoreReport};
pub use vorobev::{Grid, GridRandomSet, GridSet};
