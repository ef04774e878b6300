//! Direct and inverse acoustic scattering by flat sound-soft screens.
//!
//! A screen is a planar domain `Ω₀ × {0}` in ℝ³. The direct solver computes
//! the jump density of the scattered field's normal derivative from the
//! single-layer equation, the far-field module maps densities to far-field
//! patterns and disk spectra, and the inverse module recovers the screen's
//! support from one far-field.

#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x > 0.0)` also rejects NaN.

pub mod direct;
pub mod error;
pub mod farfield;
pub mod geometry;
pub mod inverse;
pub mod kernel;
pub mod verify;

pub use error::{Error, Result};
