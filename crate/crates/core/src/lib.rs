//! Canonical equivariant extensions of closed invariant forms.
//!
//! Given a compact manifold with a torus action, an invariant Riemannian
//! metric and a closed invariant form `α`, the extension
//! `α̂ = Σ_m P^m α` with `P = d*G∂` is a Cartan-closed element of
//! `R_G ⊗ Ω_inv(M)` whose constant term is `α`. When some `∂P^m α` has a
//! nonzero harmonic part, no extension exists and the loop reports that
//! stage instead.
//!
//! The exact backends ([`SphereBackend`], [`TorusBackend`],
//! [`ProductBackend`]) work over [`Rational`]; [`DecBackend`] is a
//! floating-point discretization of the round sphere.

pub mod backend;
pub mod derham;
pub mod equivariant;
pub mod error;
pub mod io;
pub mod linalg;
pub mod scalar;
pub mod scenario;

pub use backend::{BackendSpec, DecBackend, ExactBackend, ProductBackend, SphereBackend, SymmetricMesh, TorusBackend};
pub use derham::{BackendId, DeRhamBackend, HodgeEngine, HodgeSplit, InvariantForm, Norm};
pub use equivariant::{
    Cartan, EquivariantElement, ExtensionReport, ExtensionStatus, GeneratorSpec, Monomial,
};
pub use error::{Error, Result};
pub use scalar::{Rational, Scalar};
