//! Hermitian varieties over `F_{q^2}` and their intersections with
//! hyperplanes, linear subspaces and cubic hypersurfaces.

pub mod cubics;
pub mod error;
pub mod field;
pub mod hermitian;
pub mod linalg;
pub mod poly;
pub mod projgeom;
pub mod search;
pub mod sequences;
pub mod suites;

pub use error::{Error, Result};
pub use field::{Elem, FieldCtx};
pub use hermitian::{HermitianForm, SectionType, Tangency, TangencyReport};
pub use linalg::{Coords, Mat};
pub use projgeom::{Hyperplane, LinearSubspace, PointSpace, ProjPoint};
