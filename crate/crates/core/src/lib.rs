//! Exact combinatorics of veering triangulations: validation, cusp ladders,
//! cohomology, the cone of carried classes with certificates, carried
//! surfaces and the Thurston norm, and transversality with blowup graphs.

pub mod carry;
pub mod cover;
pub mod cusp;
pub mod error;
pub mod flowgraph;
pub mod homology;
pub mod linalg;
pub mod lp;
pub mod transverse;
pub mod tri;

pub use carry::{CarriedSurface, Completion, TubeModel};
pub use cusp::{build_cusps, CuspComplex, Cusps, TubeSystem};
pub use error::{Error, Result};
pub use flowgraph::ConeCertificate;
pub use homology::{Cocycle, HomologySummary};
pub use transverse::{ArcSystem, BlowupGraph, TransversalityReport};
pub use tri::{parse_triangulation, validate, Triangulation, VeeringTriangulation};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
