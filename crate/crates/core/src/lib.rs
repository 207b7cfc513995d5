//! Tightening of polygonal knots and the constrained magnetic energy of
//! knotted flux tubes built on them.
//!
//! The pipeline runs from geometry to spectra:
//!
//! - [`initializers`] builds circles, torus knots and reads coordinate files;
//! - [`tightener`] shrinks a knot towards its ideal shape;
//! - [`geometry`] measures thickness, ropelength and writhe;
//! - [`energy`] maps ropelength and framing to the minimum energy;
//! - [`spectrum`] aggregates knot families into energy levels;
//! - [`fieldverify`] checks the field construction by quadrature.

pub mod energy;
pub mod error;
pub mod fieldverify;
pub mod geometry;
pub mod grid;
pub mod initializers;
pub mod spectrum;
pub mod tightener;

pub use error::{Error, Result};
pub use geometry::{PolygonalKnot, TubeGeometry, Vec3};
pub use tightener::{tighten, TightenConfig, TightenReport};
