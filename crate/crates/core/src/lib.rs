// SPDX-License-Identifier: MIT OR Apache-2.0

//! Self-normalized Wilcoxon change-point test for long-range dependent
//! time series.
//!
//! The crate is organised bottom-up:
//!
//! * [`fgn`] draws exact fractional Gaussian noise by circulant embedding.
//! * [`rankstat`] turns a series into ranks and the Wilcoxon partial-sum
//!   profile together with the prefix moments of that profile.
//! * [`sntest`] evaluates the self-normalized statistic `G_n(k)` in O(1) per
//!   `k` and its supremum `T_n` over a trimmed window.
//! * [`limitdist`] simulates the fractional Brownian motion limit of `T_n`
//!   and derives critical values.
//! * [`montecarlo`] runs size, power, consistency and local-alternative
//!   experiments.
//! * [`cli`] is the command-line front end.
//!
//! ```
//! use lrd_cp::rankstat::TimeSeries;
//! use lrd_cp::sntest::{tn_statistic, TestWindow};
//!
//! let series = TimeSeries::new(vec![0.1, -0.4, 0.3, 0.2, 2.1, 1.8, 2.4, 1.9]).unwrap();
//! let window = TestWindow::new(0.25, 0.75).unwrap();
//! let result = tn_statistic(&series, &window).unwrap();
//! assert_eq!(result.argmax_k, 4);
//! ```

#![forbid(unsafe_code)]

pub mod cli;
pub mod error;
pub mod fgn;
pub mod limitdist;
pub mod montecarlo;
pub mod rankstat;
pub mod rng;
pub mod sntest;

pub use error::{Error, Result};
