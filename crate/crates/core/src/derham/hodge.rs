//! Hodge engine: form-level operators, Laplacian, harmonic projection,
//! Green's operator and the Hodge decomposition, built on [`DeRhamBackend`].

use std::sync::OnceLock;

use num_traits::Zero;

use super::{dimension_of, DeRhamBackend, InvariantForm};
use crate::error::{Error, Result};
use crate::linalg::{Lu, Matrix};
use crate::scalar::Scalar;

/// A squared norm carried as `squared * pi^pi_power`, so exact backends keep
/// an exact zero test.
#[derive(Clone, Debug, PartialEq)]
pub struct Norm<S> {
    pub squared: S,
    pub pi_power: u32,
}

impl<S: Scalar> Norm<S> {
    pub fn zero() -> Self {
        Self {
            squared: S::zero(),
            pi_power: 0,
        }
    }

    /// The norm as a float.
    pub fn value(&self) -> f64 {
        (self.squared.to_f64() * std::f64::consts::PI.powi(self.pi_power as i32))
            .max(0.0)
            .sqrt()
    }

    /// Zero within `tolerance` (exactly zero when the scalar field is exact).
    pub fn is_negligible(&self, tolerance: f64) -> bool {
        if S::EXACT {
            self.squared.is_zero()
        } else {
            self.value() <= tolerance
        }
    }

    /// Sum of two squared norms with the same π power.
    pub fn combine(&self, other: &Self) -> Self {
        if self.squared.is_zero() {
            return other.clone();
        }
        if other.squared.is_zero() {
            return self.clone();
        }
        debug_assert_eq!(self.pi_power, other.pi_power);
        Self {
            squared: self.squared.clone() + other.squared.clone(),
            pi_power: self.pi_power,
        }
    }
}

/// Harmonic, exact and coexact parts of a form.
#[derive(Clone, Debug, PartialEq)]
pub struct HodgeSplit<S> {
    pub harmonic: InvariantForm<S>,
    pub exact: InvariantForm<S>,
    pub coexact: InvariantForm<S>,
}

impl<S: Scalar> HodgeSplit<S> {
    pub fn reconstruct(&self) -> Result<InvariantForm<S>> {
        self.harmonic.add(&self.exact)?.add(&self.coexact)
    }
}

fn in_range<B: DeRhamBackend + ?Sized>(backend: &B, degree: i32) -> Option<usize> {
    (degree >= 0 && degree as usize <= backend.manifold_dim()).then_some(degree as usize)
}

/// Form-level operators available on every backend.
pub trait HodgeEngine: DeRhamBackend {
    /// Wraps raw coefficients as a form of this backend.
    fn form(&self, degree: i32, coeffs: Vec<Self::Scalar>) -> Result<InvariantForm<Self::Scalar>> {
        InvariantForm::new(self, degree, coeffs)
    }

    fn zero_form(&self, degree: i32) -> InvariantForm<Self::Scalar> {
        InvariantForm::zero(self, degree)
    }

    fn check_form(&self, w: &InvariantForm<Self::Scalar>) -> Result<()> {
        if w.backend() != self.id() {
            return Err(Error::BackendMismatch {
                expected: self.id().get(),
                found: w.backend().get(),
            });
        }
        let expected = dimension_of(self, w.degree());
        if w.coeffs().len() != expected {
            return Err(Error::LengthMismatch {
                degree: w.degree(),
                expected,
                found: w.coeffs().len(),
            });
        }
        Ok(())
    }

    fn d(&self, w: &InvariantForm<Self::Scalar>) -> Result<InvariantForm<Self::Scalar>> {
        self.check_form(w)?;
        let target = w.degree() + 1;
        match (in_range(self, w.degree()), in_range(self, target)) {
            (Some(q), Some(_)) => Ok(InvariantForm::from_parts(self.id(), target, self.apply_d(q, w.coeffs())?)),
            _ => Ok(self.zero_form(target)),
        }
    }

    fn codifferential(&self, w: &InvariantForm<Self::Scalar>) -> Result<InvariantForm<Self::Scalar>> {
        self.check_form(w)?;
        let target = w.degree() - 1;
        match (in_range(self, w.degree()), in_range(self, target)) {
            (Some(q), Some(_)) => Ok(InvariantForm::from_parts(
                self.id(),
                target,
                self.apply_codifferential(q, w.coeffs())?,
            )),
            _ => Ok(self.zero_form(target)),
        }
    }

    fn star(&self, w: &InvariantForm<Self::Scalar>) -> Result<InvariantForm<Self::Scalar>> {
        self.check_form(w)?;
        let q = in_range(self, w.degree())
            .ok_or(Error::DegreeMismatch { expected: 0, found: w.degree() })?;
        let target = (self.manifold_dim() - q) as i32;
        Ok(InvariantForm::from_parts(self.id(), target, self.apply_star(q, w.coeffs())?))
    }

    /// `Δ = d d* + d* d`.
    fn laplacian(&self, w: &InvariantForm<Self::Scalar>) -> Result<InvariantForm<Self::Scalar>> {
        let a = self.d(&self.codifferential(w)?)?;
        let b = self.codifferential(&self.d(w)?)?;
        a.add(&b)
    }

    /// Contraction with the operator bound to generator `j`.
    fn contraction(&self, j: usize, w: &InvariantForm<Self::Scalar>) -> Result<InvariantForm<Self::Scalar>> {
        self.check_form(w)?;
        let gens = self.generators();
        let drop = gens.contraction_drop(j)?;
        let target = w.degree() - drop;
        match (in_range(self, w.degree()), in_range(self, target)) {
            (Some(q), Some(_)) => {
                let out = self.apply_contraction(j, q, w.coeffs())?;
                let expected = dimension_of(self, target);
                if out.len() != expected {
                    return Err(Error::LengthMismatch {
                        degree: target,
                        expected,
                        found: out.len(),
                    });
                }
                Ok(InvariantForm::from_parts(self.id(), target, out))
            }
            _ => Ok(self.zero_form(target)),
        }
    }

    fn inner(&self, a: &InvariantForm<Self::Scalar>, b: &InvariantForm<Self::Scalar>) -> Result<Self::Scalar> {
        self.check_form(a)?;
        self.check_form(b)?;
        if a.degree() != b.degree() {
            return Err(Error::DegreeMismatch {
                expected: a.degree(),
                found: b.degree(),
            });
        }
        Ok(match in_range(self, a.degree()) {
            Some(q) => self.inner_product(q, a.coeffs(), b.coeffs()),
            None => Self::Scalar::zero(),
        })
    }

    fn norm(&self, w: &InvariantForm<Self::Scalar>) -> Result<Norm<Self::Scalar>> {
        Ok(Norm {
            squared: self.inner(w, w)?,
            pi_power: self.pi_power(),
        })
    }

    fn harmonic_forms(&self, degree: i32) -> Vec<InvariantForm<Self::Scalar>> {
        match in_range(self, degree) {
            Some(q) => self
                .harmonic_basis(q)
                .into_iter()
                .map(|c| InvariantForm::from_parts(self.id(), degree, c))
                .collect(),
            None => Vec::new(),
        }
    }

    fn harmonic_part(&self, w: &InvariantForm<Self::Scalar>) -> Result<InvariantForm<Self::Scalar>> {
        self.check_form(w)?;
        match in_range(self, w.degree()) {
            Some(q) => Ok(InvariantForm::from_parts(
                self.id(),
                w.degree(),
                self.harmonic_projection(q, w.coeffs())?,
            )),
            None => Ok(w.clone()),
        }
    }

    fn green(&self, w: &InvariantForm<Self::Scalar>) -> Result<InvariantForm<Self::Scalar>> {
        self.check_form(w)?;
        match in_range(self, w.degree()) {
            Some(q) => Ok(InvariantForm::from_parts(self.id(), w.degree(), self.apply_green(q, w.coeffs())?)),
            None => Ok(w.clone()),
        }
    }

    /// `w = H w + d d* G w + d* d G w`.
    fn hodge_decompose(&self, w: &InvariantForm<Self::Scalar>) -> Result<HodgeSplit<Self::Scalar>> {
        let g = self.green(w)?;
        let exact = self.d(&self.codifferential(&g)?)?;
        let coexact = self.codifferential(&self.d(&g)?)?;
        let harmonic = w.sub(&exact)?.sub(&coexact)?;
        Ok(HodgeSplit {
            harmonic,
            exact,
            coexact,
        })
    }

    /// Norm of the harmonic projection of a closed form: zero iff it is exact.
    fn obstruction_residual(&self, beta: &InvariantForm<Self::Scalar>) -> Result<Norm<Self::Scalar>> {
        let closure = self.norm(&self.d(beta)?)?;
        if !closure.is_negligible(self.tolerance()) {
            return Err(Error::NotClosed {
                residual: closure.value(),
            });
        }
        self.norm(&self.harmonic_part(beta)?)
    }
}

impl<B: DeRhamBackend + ?Sized> HodgeEngine for B {}

/// Green's operator by a direct solve, for backends whose basis does not
/// diagonalize the Laplacian.
///
/// Solves `(Δ + Σ h_i ⟨h_i, ·⟩) x = w - H w`: the rank-k correction makes the
/// system nonsingular without changing solutions orthogonal to the harmonics.
/// Factorizations are cached per degree.
#[derive(Debug)]
pub struct DenseGreen<S> {
    factors: Vec<OnceLock<Option<Lu<S>>>>,
}

impl<S: Scalar> DenseGreen<S> {
    pub fn new(manifold_dim: usize) -> Self {
        Self {
            factors: (0..=manifold_dim).map(|_| OnceLock::new()).collect(),
        }
    }

    pub fn apply<B>(&self, backend: &B, degree: usize, w: &[S]) -> Result<Vec<S>>
    where
        B: DeRhamBackend<Scalar = S> + ?Sized,
    {
        let lu = self.factors[degree].get_or_init(|| Self::factor(backend, degree).ok().flatten());
        let lu = lu.as_ref().ok_or(Error::SolverFailure {
            iterations: 0,
            residual: f64::INFINITY,
        })?;
        let harmonic = backend.harmonic_projection(degree, w)?;
        let rhs: Vec<S> = w
            .iter()
            .zip(&harmonic)
            .map(|(a, h)| a.clone() - h.clone())
            .collect();
        Ok(lu.solve(&rhs))
    }

    fn factor<B>(backend: &B, degree: usize) -> Result<Option<Lu<S>>>
    where
        B: DeRhamBackend<Scalar = S> + ?Sized,
    {
        let dim = backend.dimension(degree);
        let basis = backend.harmonic_basis(degree);
        let n = backend.manifold_dim();
        let shifted = Matrix::from_operator(dim, dim, |x| {
            let mut out = vec![S::zero(); dim];
            if degree > 0 {
                let down = backend.apply_codifferential(degree, x)?;
                out = backend.apply_d(degree - 1, &down)?;
            }
            if degree < n {
                let up = backend.apply_d(degree, x)?;
                let back = backend.apply_codifferential(degree + 1, &up)?;
                for (o, v) in out.iter_mut().zip(back) {
                    *o = o.clone() + v;
                }
            }
            for h in &basis {
                let c = backend.inner_product(degree, h, x);
                if !c.is_zero() {
                    for (o, v) in out.iter_mut().zip(h) {
                        *o = o.clone() + c.clone() * v.clone();
                    }
                }
            }
            Ok::<_, Error>(out)
        })?;
        Ok(shifted.lu())
    }
}
