//! Closed-form linear receive beamforming for continuous aperture arrays in
//! uplink multiuser channels.
//!
//! A continuous receive surface observes the superposition of K users'
//! spherical-wave channels plus white noise; a linear beamformer is a
//! function `w_k(r)` over the surface. This crate implements the three
//! classic combiners in their closed forms — all weighted sums of the
//! users' channels with weights drawn from the channel correlation matrix
//! `R`:
//!
//! | scheme | weight matrix | per-user SINR |
//! |--------|---------------|----------------|
//! | MRC    | `I`           | `p a / (r^H P r / a + 1)` |
//! | ZF     | `R^-1`        | `p / [R^-1]_{kk}` |
//! | MMSE   | `(I + P R)^-1`| `p (a - r^H (P^-1 + R)^-1 r)` |
//!
//! plus a matched spatially discrete baseline array, a numerical
//! verification suite for the operator identities behind the MMSE
//! derivation (inverse kernels, projection kernels, whitening), and a
//! seeded Monte Carlo experiment driver that emits CSV trend tables.
//!
//! # Quick start
//!
//! ```
//! use capa::beamforming::Scheme;
//! use capa::metrics::report;
//! use capa::scenario::Scenario;
//!
//! let sc = Scenario::default();
//! let grid = sc.grid().unwrap();
//! let (_layout, _h, r) = sc.channel_for_trial(1, 0, &grid).unwrap();
//! let p = sc.power_profile().unwrap();
//!
//! let zf = report(Scheme::Zf, &r, &p).unwrap();
//! let mmse = report(Scheme::Mmse, &r, &p).unwrap();
//! assert!(mmse.sum_rate >= zf.sum_rate);
//! ```
//!
//! The `examples/` directory demonstrates each capability end to end; the
//! `capa` binary exposes the sweep and verification drivers as a CLI.

pub mod beamforming;
pub mod error;
pub mod experiment;
pub mod geometry;
pub mod identities;
pub mod kernels;
pub mod linalg;
pub mod metrics;
pub mod quadrature;
pub mod scenario;
pub mod spda;

pub use error::{Error, Result};
