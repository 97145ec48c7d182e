//! Geostatistics and dialectometry toolkit.
//!
//! The crate covers the whole path from per-site observations to maps and
//! prediction scores:
//!
//! - [`geo`]: great-circle distances, site sets, prediction grids.
//! - [`interpolation`]: nearest-neighbour and inverse distance weighting.
//! - [`variogram`]: empirical variograms and weighted least-squares model fits.
//! - [`kriging`]: ordinary and regression kriging.
//! - [`dialectometry`]: length-normalised DTW between acoustic feature
//!   sequences, site-level linguistic distances, classical MDS and RGB maps.
//! - [`text_metrics`]: multi-reference corpus chrF and BLEU.
//! - [`eval`]: seeded splits, grid search, RMSE, learning curves and
//!   correlation statistics.
//! - [`synthetic`]: seeded synthetic fields with a known trend, used by the
//!   examples and the acceptance suite.
//! - [`io`] and [`cli`]: CSV/GeoJSON formats and the `geodialect` binary.
//!
//! Runnable walkthroughs for each capability live in `examples/`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod dialectometry;
pub mod error;
pub mod eval;
pub mod geo;
pub mod interpolation;
pub mod io;
pub mod kriging;
pub mod synthetic;
pub mod text_metrics;
pub mod variogram;

mod numeric;

pub use error::{Error, Result};
pub use geo::{DistanceMatrix, GeoPoint, Site};
