//! Screen shapes and their triangulations.

pub mod mesh;
pub mod shape;

pub use mesh::{mesh_shape, Panel, ScreenMesh};
pub use shape::{make_shape, FourierTerm, ScreenShape, ShapeDescriptor};
