//! Mean square displacement of a thermalized free quantum particle.
//!
//! A particle of mass `m` in a thermal random-phase state is propagated
//! coherently in a periodic super-cell of length `L`. The crate evaluates its
//! MSD several ways:
//!
//! * [`ideal`]: closed form for `L -> inf`,
//! * [`exact`]: the coherent double sum over a truncated plane-wave
//!   [`basis`] and its decohered plateau,
//! * [`closed_forms`]: the analytic plateau and a velocity-averaged
//!   collision model,
//! * [`montecarlo`]: explicit sampling of random-phase wave packets.
//!
//! [`scattering`] holds the ideal-gas pair correlation function, intermediate
//! scattering function and dynamic structure factor.

pub mod basis;
pub mod cli;
pub mod closed_forms;
pub mod curve;
pub mod error;
pub mod exact;
pub mod grid;
pub mod ideal;
pub mod montecarlo;
pub mod quadrature;
pub mod scattering;
pub mod summation;
pub mod units;

pub use basis::{build_basis, partition_function, EigenBasis};
pub use curve::{Method, MsdCurve};
pub use error::{MsdError, Result};
pub use grid::{GridSpec, TimeGrid};
pub use units::{derive_scales, CharacteristicScales, PhysicalSystem};
