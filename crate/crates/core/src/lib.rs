//! Outage analysis for an energy-harvesting user that transmits to a base
//! station through an active reconfigurable intelligent surface (RIS).
//!
//! The user harvests RF energy from a power station for a fraction `α` of
//! each coherence interval, then spends it on an uplink that reaches the base
//! station only via the surface, whose `M` elements co-phase and amplify the
//! reflected signal. All links are Rayleigh fading.
//!
//! Two independent routes to the outage probability are provided:
//!
//! * [`analytic`]: a gamma fit to the aligned cascade gain reduced to a
//!   `K`-node Chebyshev sum, plus an adaptive reference integral of the same
//!   fit.
//! * [`montecarlo`]: direct simulation of the link with reproducible,
//!   worker-count-independent random substreams.
//!
//! [`sweepcli`] turns both into parameter sweeps, CSV/JSON output and a
//! self-validation report.

pub mod analytic;
pub mod channel;
pub mod exec;
pub mod montecarlo;
pub mod params;
pub mod quadrature;
pub mod special;
pub mod sweepcli;
pub mod sysmodel;

pub use analytic::{outage_closed_form, outage_reference, OutageResult};
pub use montecarlo::{estimate_outage, McConfig, OutageEstimate};
pub use params::{derive, validate, DerivedParams, SystemParams};
