//! Pseudospectral solver for the Zakharov-Kuznetsov-Burgers equation
//! `u_t + u_xxx + u_xyy + u u_x - delta (u_xx + u_yy) = 0` on a strip with
//! Dirichlet walls in `y` and a periodized `x` direction, together with
//! energy-identity audits and decay-rate diagnostics.

// `!(x > 0.0)` is used deliberately so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod audit;
pub mod calibration;
pub mod config;
pub mod domain;
pub mod dynamics;
pub mod error;
pub mod experiments;
pub mod flux;
pub mod functionals;
pub mod initial;
pub mod io;
pub mod oracle;
pub mod phi;
pub mod semigroup;
pub mod trajectory;

pub use domain::{plan_domain, Axis, DomainConfig, GridField, SpectralField};
pub use error::{Error, Result};
