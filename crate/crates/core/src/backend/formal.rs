//! Backends with user-supplied generators of arbitrary even degree.
//!
//! The engine never constructs contractions for generators of degree above
//! two; a caller that has them supplies one operator per generator together
//! with the degree bookkeeping, and this wrapper binds them to an existing
//! backend's Hodge data.

use std::fmt;
use std::sync::Arc;

use super::BackendSpec;
use crate::derham::{BackendId, DeRhamBackend};
use crate::equivariant::GeneratorSpec;
use crate::error::{Error, Result};

/// `(form degree, coefficients) -> coefficients` of degree `degree - deg(t_j) + 1`.
pub type ContractionFn<S> = Arc<dyn Fn(usize, &[S]) -> Result<Vec<S>> + Send + Sync>;

pub struct FormalGenerators<B: DeRhamBackend + ?Sized> {
    id: BackendId,
    inner: Arc<B>,
    generators: GeneratorSpec,
    contractions: Vec<ContractionFn<B::Scalar>>,
}

impl<B: DeRhamBackend + ?Sized> FormalGenerators<B> {
    pub fn new(inner: Arc<B>, generators: GeneratorSpec, contractions: Vec<ContractionFn<B::Scalar>>) -> Result<Self> {
        if contractions.len() != generators.rank() {
            return Err(Error::InvalidGenerators(format!(
                "{} contraction operators for {} generators",
                contractions.len(),
                generators.rank()
            )));
        }
        Ok(Self {
            id: BackendId::fresh(),
            inner,
            generators,
            contractions,
        })
    }

    pub fn inner(&self) -> &Arc<B> {
        &self.inner
    }
}

impl<B: DeRhamBackend + ?Sized> fmt::Debug for FormalGenerators<B> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FormalGenerators")
            .field("inner", &self.inner)
            .field("generators", &self.generators)
            .finish_non_exhaustive()
    }
}

impl<B: DeRhamBackend + ?Sized> DeRhamBackend for FormalGenerators<B> {
    type Scalar = B::Scalar;

    fn id(&self) -> BackendId {
        self.id
    }

    fn spec(&self) -> BackendSpec {
        self.inner.spec()
    }

    fn manifold_dim(&self) -> usize {
        self.inner.manifold_dim()
    }

    fn dimension(&self, degree: usize) -> usize {
        self.inner.dimension(degree)
    }

    fn generators(&self) -> &GeneratorSpec {
        &self.generators
    }

    fn pi_power(&self) -> u32 {
        self.inner.pi_power()
    }

    fn tolerance(&self) -> f64 {
        self.inner.tolerance()
    }

    fn apply_d(&self, degree: usize, w: &[Self::Scalar]) -> Result<Vec<Self::Scalar>> {
        self.inner.apply_d(degree, w)
    }

    fn apply_star(&self, degree: usize, w: &[Self::Scalar]) -> Result<Vec<Self::Scalar>> {
        self.inner.apply_star(degree, w)
    }

    fn apply_codifferential(&self, degree: usize, w: &[Self::Scalar]) -> Result<Vec<Self::Scalar>> {
        self.inner.apply_codifferential(degree, w)
    }

    fn apply_contraction(&self, generator: usize, degree: usize, w: &[Self::Scalar]) -> Result<Vec<Self::Scalar>> {
        let op = self.contractions.get(generator).ok_or(Error::UnboundGenerator {
            index: generator,
            rank: self.generators.rank(),
        })?;
        let drop = self.generators.contraction_drop(generator)?;
        let target = degree.checked_sub(drop as usize).ok_or(Error::DegreeMismatch {
            expected: drop,
            found: degree as i32,
        })?;
        let out = op(degree, w)?;
        if out.len() != self.inner.dimension(target) {
            return Err(Error::LengthMismatch {
                degree: target as i32,
                expected: self.inner.dimension(target),
                found: out.len(),
            });
        }
        Ok(out)
    }

    fn inner_product(&self, degree: usize, a: &[Self::Scalar], b: &[Self::Scalar]) -> Self::Scalar {
        self.inner.inner_product(degree, a, b)
    }

    fn harmonic_basis(&self, degree: usize) -> Vec<Vec<Self::Scalar>> {
        self.inner.harmonic_basis(degree)
    }

    fn harmonic_projection(&self, degree: usize, w: &[Self::Scalar]) -> Result<Vec<Self::Scalar>> {
        self.inner.harmonic_projection(degree, w)
    }

    fn apply_green(&self, degree: usize, w: &[Self::Scalar]) -> Result<Vec<Self::Scalar>> {
        self.inner.apply_green(degree, w)
    }
}
