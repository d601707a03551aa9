//! Simulation and baseband signal-processing core for industrial wireless
//! studies: a deterministic discrete-event engine, an IEEE 802.11 channel
//! access simulator (DCF, PCF, HCCA), a GFDM modem, two-way-ranging
//! localization, and random-forest LOS/NLOS identification.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, command-line
//! handling and threading live in the `fabnet` companion crate.
#![no_std]
#![warn(missing_debug_implementations)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod event;
pub mod loc;
pub mod mac;
pub mod math;
pub mod nlos;
pub mod phy;
pub mod rng;

pub use num_complex::Complex64;
