//! Far-field patterns and the disk spectrum of the density.

pub mod grid;
pub mod pattern;
pub mod spectrum;

pub use grid::{Direction, DirectionGrid, FarField};
pub use pattern::{
    default_radii, farfield_of_density, loglog_slope, verify_asymptotics, AsymptoticsRow,
    AsymptoticsTable,
};
pub use spectrum::{
    density_spectrum, density_spectrum_direct, exp_divided_difference, interpolate_farfield,
    lattice_axis, spectrum_from_farfield, triangle_fourier, DiskLattice, DiskSpectrum,
};
