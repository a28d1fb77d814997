//! Second-order and finite-blocklength performance bounds for the MIMO
//! Rayleigh block-fading channel, with a seeded Monte Carlo lab for the
//! mutual information density.
//!
//! Rates are in nats per channel use per transmit antenna. SNR is `1/σ²`.

// `!(x > 0.0)` is used on purpose so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod finite;
pub mod mc;
pub mod mp;
pub mod normal;
pub mod quadrature;
pub mod second_order;
pub mod validate;

pub use error::{Error, Result};
pub use finite::{delta_star, finite_upper, sweep, FiniteBound, SweepKind, SweepRow};
pub use mp::{delta0, delta0_prime, delta_gamma_tables, mp_measure_integral, MpPoint};
pub use normal::normal_cdf;
pub use quadrature::{integrate, tail_quadrature, QuadratureSpec};
pub use second_order::{
    asymptotic_limits, capacity, compute_stats, outage_bounds, pe_bounds, sigma2_from_snr_db,
    snr_db_from_sigma2, InputSpread, SecondOrderStats, SystemGeometry,
};
