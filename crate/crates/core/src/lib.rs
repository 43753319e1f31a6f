//! Numerical simulator for spatial light modulation in EIT (electromagnetically
//! induced transparency) vapor cells.
//!
//! The pipeline is: a coupling-field pattern ([`patterns`]) sets a per-pixel
//! Rabi frequency, the Λ-system response ([`medium`]) turns that into a
//! complex susceptibility, the thin cell ([`cell`]) imprints phase and
//! absorption on a probe beam ([`optics`]), and the result is propagated to
//! the far field and checked for vortex content ([`analysis`]). Switching
//! speed estimates live in [`dynamics`].
//!
//! All quantities are SI internally. [`constants`] has the conversions used
//! at the file/CLI boundary.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod cell;
pub mod config;
pub mod constants;
pub mod dynamics;
pub mod error;
pub mod grid;
pub mod io;
pub mod medium;
pub mod optics;
pub mod patterns;
pub mod pipeline;

pub use error::{EitError, ErrorKind, Result};
pub use grid::GridSpec;
