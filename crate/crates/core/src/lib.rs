//! Bit error rate of two-hop decode-and-forward cooperative links with
//! threshold-based best-relay selection, including the effect of relays
//! forwarding wrongly decoded symbols.
//!
//! The crate provides three independent views of the same link:
//!
//! * [`analytic`]: the closed-form/MGF formula chain for the end-to-end BER,
//! * [`montecarlo`]: a link-level BPSK simulator of the two-phase protocol,
//! * [`optimizer`]: the BER-minimizing selection threshold per SNR point.
//!
//! The [`cli`] module backs the `dfrelay` binary.

pub mod analytic;
pub mod cli;
pub mod error;
pub mod montecarlo;
pub mod optimizer;
pub mod quadrature;
pub mod slope;
pub mod special;
pub mod units;

pub use analytic::{BerEstimate, EstimateKind, LinkBudget, SystemConfig};
pub use error::{Error, Result};
