//! Reference simplices, quadrature and curved element maps.

pub mod curved;
pub mod quadrature;
pub mod reference;

pub use curved::{affine_map, face_projection_y, lambda_star, rho, CurvedElementMap, FaceGeometry};
pub use quadrature::{make_quadrature, QuadratureRule};
pub use reference::ReferenceElement;
