//! Secure and energy-efficient beamforming for a two-transmitter network in
//! which an ISAC base station (BS1) serves a legitimate receiver while
//! sensing a target, and an RSMA base station (BS2) serves `N` users whose
//! signals double as interference against an eavesdropper.
//!
//! The optimizer alternates between the echo receive filter
//! ([`echo_bf`]), the BS1 transmit covariances ([`bs1_bf`]) and the BS2
//! covariances ([`bs2_bf`]) under [`alternating`], maximizing the security
//! energy efficiency computed in [`metrics`] for channels from [`sysmodel`].
//! [`harness`] drives Monte Carlo sweeps and the `isac` command line.

pub mod alternating;
pub mod bs1_bf;
pub mod bs2_bf;
pub mod echo_bf;
pub mod harness;
pub mod linalg;
pub mod metrics;
pub mod problem;
pub mod sysmodel;
