//! The contract a model manifold implements, and invariant forms over it.
//!
//! A backend presents a finite-dimensional graded space of invariant forms
//! together with `d`, the Hodge star, the inner product, the contraction
//! operators bound to the generators of `R_G`, an explicit harmonic basis and
//! Green's operator. Everything else (codifferential, Laplacian, harmonic
//! projection, Hodge decomposition) is derived in [`hodge`].

pub mod hodge;

use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};

use num_traits::Zero;

use crate::backend::BackendSpec;
use crate::equivariant::GeneratorSpec;
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::Scalar;

pub use hodge::{DenseGreen, HodgeEngine, HodgeSplit, Norm};

/// Identity of a backend instance. Forms only combine within one instance.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BackendId(u64);

impl BackendId {
    pub fn fresh() -> Self {
        static NEXT: AtomicU64 = AtomicU64::new(1);
        Self(NEXT.fetch_add(1, Ordering::Relaxed))
    }

    pub fn get(self) -> u64 {
        self.0
    }
}

/// A model manifold with its invariant de Rham complex.
///
/// Coefficient-level methods receive vectors already validated against
/// [`dimension`](Self::dimension) and degrees inside `0..=manifold_dim`;
/// the form-level API in [`HodgeEngine`] does that validation.
pub trait DeRhamBackend: Send + Sync + fmt::Debug {
    type Scalar: Scalar;

    fn id(&self) -> BackendId;

    /// Parameters sufficient to rebuild an identical backend.
    fn spec(&self) -> BackendSpec;

    fn manifold_dim(&self) -> usize;

    /// Dimension of the invariant q-forms at the active truncation.
    fn dimension(&self, degree: usize) -> usize;

    fn generators(&self) -> &GeneratorSpec;

    /// Inner products are reported as `value * pi^pi_power`.
    fn pi_power(&self) -> u32 {
        0
    }

    /// Norms at or below this are zero. Exact backends use 0.
    fn tolerance(&self) -> f64 {
        0.0
    }

    /// Exterior derivative from degree `degree` to `degree + 1`.
    fn apply_d(&self, degree: usize, w: &[Self::Scalar]) -> Result<Vec<Self::Scalar>>;

    fn apply_star(&self, degree: usize, w: &[Self::Scalar]) -> Result<Vec<Self::Scalar>>;

    /// Codifferential from `degree >= 1` to `degree - 1`. The default is
    /// `(-1)^(n(q+1)+1) * d *`, i.e. `-*d*` in even dimension.
    fn apply_codifferential(&self, degree: usize, w: &[Self::Scalar]) -> Result<Vec<Self::Scalar>> {
        let n = self.manifold_dim();
        let starred = self.apply_star(degree, w)?;
        let differentiated = self.apply_d(n - degree, &starred)?;
        let back = self.apply_star(n - degree + 1, &differentiated)?;
        if (n * (degree + 1) + 1) % 2 == 1 {
            Ok(back.into_iter().map(|v| -v).collect())
        } else {
            Ok(back)
        }
    }

    /// Contraction `i_j` bound to generator `generator`, lowering the degree by
    /// `deg(t_j) - 1`. Only called when the target degree is non-negative.
    fn apply_contraction(
        &self,
        generator: usize,
        degree: usize,
        w: &[Self::Scalar],
    ) -> Result<Vec<Self::Scalar>>;

    fn inner_product(&self, degree: usize, a: &[Self::Scalar], b: &[Self::Scalar]) -> Self::Scalar;

    /// Explicit basis of harmonic forms of the given degree.
    fn harmonic_basis(&self, degree: usize) -> Vec<Vec<Self::Scalar>>;

    /// Orthogonal projection onto the harmonic basis.
    fn harmonic_projection(&self, degree: usize, w: &[Self::Scalar]) -> Result<Vec<Self::Scalar>> {
        project_onto(self, degree, &self.harmonic_basis(degree), w)
    }

    /// Green's operator: zero on harmonics, inverse of the Laplacian on their
    /// orthogonal complement.
    fn apply_green(&self, degree: usize, w: &[Self::Scalar]) -> Result<Vec<Self::Scalar>>;
}

/// Orthogonal projection of `w` onto `span(basis)` for the backend inner product.
pub fn project_onto<B: DeRhamBackend + ?Sized>(
    backend: &B,
    degree: usize,
    basis: &[Vec<B::Scalar>],
    w: &[B::Scalar],
) -> Result<Vec<B::Scalar>> {
    let dim = w.len();
    if basis.is_empty() {
        return Ok(vec![B::Scalar::zero(); dim]);
    }
    let k = basis.len();
    let mut gram = Matrix::zeros(k, k);
    for i in 0..k {
        for j in 0..k {
            gram[(i, j)] = backend.inner_product(degree, &basis[i], &basis[j]);
        }
    }
    let rhs: Vec<_> = basis
        .iter()
        .map(|h| backend.inner_product(degree, h, w))
        .collect();
    let lu = gram
        .lu()
        .ok_or_else(|| Error::Unsupported("harmonic basis is linearly dependent".into()))?;
    let weights = lu.solve(&rhs);
    let mut out = vec![B::Scalar::zero(); dim];
    for (c, h) in weights.iter().zip(basis) {
        if c.is_zero() {
            continue;
        }
        for (o, v) in out.iter_mut().zip(h) {
            *o = o.clone() + c.clone() * v.clone();
        }
    }
    Ok(out)
}

/// An invariant differential form in a backend's coefficient basis.
///
/// Degrees outside `0..=n` are allowed and denote the zero-dimensional space,
/// so `d*` of a 0-form or a contraction of a function is simply an empty form.
#[derive(Clone, Debug, PartialEq)]
pub struct InvariantForm<S> {
    backend: BackendId,
    degree: i32,
    coeffs: Vec<S>,
}

impl<S: Scalar> InvariantForm<S> {
    pub fn new<B>(backend: &B, degree: i32, coeffs: Vec<S>) -> Result<Self>
    where
        B: DeRhamBackend<Scalar = S> + ?Sized,
    {
        let expected = dimension_of(backend, degree);
        if coeffs.len() != expected {
            return Err(Error::LengthMismatch {
                degree,
                expected,
                found: coeffs.len(),
            });
        }
        Ok(Self {
            backend: backend.id(),
            degree,
            coeffs,
        })
    }

    pub fn zero<B>(backend: &B, degree: i32) -> Self
    where
        B: DeRhamBackend<Scalar = S> + ?Sized,
    {
        Self {
            backend: backend.id(),
            degree,
            coeffs: vec![S::zero(); dimension_of(backend, degree)],
        }
    }

    pub(crate) fn from_parts(backend: BackendId, degree: i32, coeffs: Vec<S>) -> Self {
        Self {
            backend,
            degree,
            coeffs,
        }
    }

    pub fn backend(&self) -> BackendId {
        self.backend
    }

    pub fn degree(&self) -> i32 {
        self.degree
    }

    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<S> {
        self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.backend != other.backend {
            return Err(Error::BackendMismatch {
                expected: self.backend.get(),
                found: other.backend.get(),
            });
        }
        if self.degree != other.degree {
            return Err(Error::DegreeMismatch {
                expected: self.degree,
                found: other.degree,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(self.zip_with(other, |a, b| a.clone() + b.clone()))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(self.zip_with(other, |a, b| a.clone() - b.clone()))
    }

    pub fn scale(&self, factor: &S) -> Self {
        Self {
            backend: self.backend,
            degree: self.degree,
            coeffs: self.coeffs.iter().map(|c| c.clone() * factor.clone()).collect(),
        }
    }

    pub fn neg(&self) -> Self {
        Self {
            backend: self.backend,
            degree: self.degree,
            coeffs: self.coeffs.iter().map(|c| -c.clone()).collect(),
        }
    }

    fn zip_with(&self, other: &Self, f: impl Fn(&S, &S) -> S) -> Self {
        Self {
            backend: self.backend,
            degree: self.degree,
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| f(a, b)).collect(),
        }
    }

    /// Largest absolute coefficient, for diagnostics.
    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.to_f64().abs()).fold(0.0, f64::max)
    }
}

/// Dimension of degree-`degree` forms, zero outside `0..=n`.
pub fn dimension_of<B: DeRhamBackend + ?Sized>(backend: &B, degree: i32) -> usize {
    if degree < 0 || degree as usize > backend.manifold_dim() {
        0
    } else {
        backend.dimension(degree as usize)
    }
}
