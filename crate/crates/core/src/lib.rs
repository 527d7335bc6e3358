//! Differentiation matrices of arbitrary order on arbitrary one-dimensional
//! meshes.
//!
//! Each row of `D_s` comes from differentiating the Lagrange interpolant of a
//! stencil of `M` contiguous mesh points. With `M = N` the matrices are the
//! global (spectral) collocation matrices of the mesh; with odd `M < N` on a
//! uniform mesh the interior rows are the classical central differences.
//!
//! ```
//! use diffmat::{assemble, uniform};
//!
//! let mesh = uniform(5, 0.0, 4.0).unwrap();
//! let set = assemble(&mesh, 3, 2).unwrap();
//! let d2 = set.matrix(2);
//! assert_eq!(d2.row(2).1, &[1.0, -2.0, 1.0]);
//! ```

pub mod assembly;
pub mod error;
pub mod mesh;
pub mod stencil;
pub mod verify;

pub use assembly::{
    apply, assemble, kron_lift, placement, DiffMatrixSet, KronOperand, Placement,
    SparseBandMatrix, StencilCase,
};
pub use error::{Error, Result};
pub use mesh::{chebyshev_gauss_lobatto, legendre_gauss_lobatto, uniform, Mesh, MeshKind};
pub use stencil::{
    build_factor_vector, stable_quotients, stencil_rows, FactorVector, QuotientVector, Stencil,
    StencilRows,
};
pub use verify::StencilWidth;
