//! The small (Cartan, for tori) model `R_G ⊗ Ω_inv(M)` and the canonical
//! extension `α̂ = (I - P)^{-1} α` with `P = d* G ∂`.
//!
//! Sign convention: the equivariant differential is `d_G = I⊗d - ∂` with
//! `∂ = Σ_j t_j ⊗ i_j`. Much of the literature writes `d + ∂` instead; with
//! that convention the extension of `dz∧dφ` would carry `+t·z`.

mod element;
mod extend;
mod generators;

pub use element::{EquivariantElement, Monomial};
pub use extend::{ExtensionReport, ExtensionStatus};
pub use generators::GeneratorSpec;

use num_traits::Zero;

use crate::derham::{DeRhamBackend, HodgeEngine, InvariantForm, Norm};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Equivariant operators over one backend.
#[derive(Debug)]
pub struct Cartan<'a, B: ?Sized> {
    backend: &'a B,
}

impl<B: ?Sized> Clone for Cartan<'_, B> {
    fn clone(&self) -> Self {
        *self
    }
}

impl<B: ?Sized> Copy for Cartan<'_, B> {}

impl<'a, B: DeRhamBackend + ?Sized> Cartan<'a, B> {
    pub fn new(backend: &'a B) -> Self {
        Self { backend }
    }

    pub fn backend(&self) -> &'a B {
        self.backend
    }

    pub fn generators(&self) -> &'a GeneratorSpec {
        self.backend.generators()
    }

    fn rank(&self) -> usize {
        self.generators().rank()
    }

    /// `1 ⊗ form`.
    pub fn element(&self, form: InvariantForm<B::Scalar>) -> Result<EquivariantElement<B::Scalar>> {
        self.backend.check_form(&form)?;
        Ok(EquivariantElement::from_form(form, self.rank()))
    }

    /// Builds an element from `(monomial, form)` pairs of equal total degree.
    pub fn element_from_terms(
        &self,
        total_degree: i32,
        terms: impl IntoIterator<Item = (Monomial, InvariantForm<B::Scalar>)>,
    ) -> Result<EquivariantElement<B::Scalar>> {
        let mut out = EquivariantElement::zero(self.backend.id(), self.rank(), total_degree);
        for (mono, form) in terms {
            self.backend.check_form(&form)?;
            out.add_term(self.generators(), mono, form)?;
        }
        Ok(out)
    }

    fn check(&self, x: &EquivariantElement<B::Scalar>) -> Result<()> {
        if x.backend() != self.backend.id() {
            return Err(Error::BackendMismatch {
                expected: self.backend.id().get(),
                found: x.backend().get(),
            });
        }
        if x.rank() != self.rank() {
            return Err(Error::UnboundGenerator {
                index: x.rank(),
                rank: self.rank(),
            });
        }
        Ok(())
    }

    fn empty(&self, total_degree: i32) -> EquivariantElement<B::Scalar> {
        EquivariantElement::zero(self.backend.id(), self.rank(), total_degree)
    }

    /// `I ⊗ d`.
    pub fn exterior_d(&self, x: &EquivariantElement<B::Scalar>) -> Result<EquivariantElement<B::Scalar>> {
        self.check(x)?;
        let mut out = self.empty(x.total_degree() + 1);
        for (mono, form) in x.terms() {
            out.add_term(self.generators(), mono.clone(), self.backend.d(form)?)?;
        }
        Ok(out)
    }

    /// `∂ = Σ_j t_j ⊗ i_j`.
    pub fn partial_d(&self, x: &EquivariantElement<B::Scalar>) -> Result<EquivariantElement<B::Scalar>> {
        self.check(x)?;
        let gens = self.generators();
        let mut out = self.empty(x.total_degree() + 1);
        for (mono, form) in x.terms() {
            for j in 0..gens.rank() {
                let contracted = self.backend.contraction(j, form)?;
                out.add_term(gens, mono.times_generator(j), contracted)?;
            }
        }
        Ok(out)
    }

    /// `d_G = I⊗d - ∂`.
    pub fn cartan_d(&self, x: &EquivariantElement<B::Scalar>) -> Result<EquivariantElement<B::Scalar>> {
        self.exterior_d(x)?.sub(&self.partial_d(x)?)
    }

    /// `I ⊗ d*G`, applied coefficient-wise.
    pub fn codifferential_green(&self, x: &EquivariantElement<B::Scalar>) -> Result<EquivariantElement<B::Scalar>> {
        self.check(x)?;
        let mut out = self.empty(x.total_degree() - 1);
        for (mono, form) in x.terms() {
            let solved = self.backend.codifferential(&self.backend.green(form)?)?;
            out.add_term(self.generators(), mono.clone(), solved)?;
        }
        Ok(out)
    }

    /// `P = (I ⊗ d*G) ∂`.
    pub fn p_operator(&self, x: &EquivariantElement<B::Scalar>) -> Result<EquivariantElement<B::Scalar>> {
        self.codifferential_green(&self.partial_d(x)?)
    }

    /// `Σ_I ‖coefficient_I‖²`.
    pub fn norm(&self, x: &EquivariantElement<B::Scalar>) -> Result<Norm<B::Scalar>> {
        self.check(x)?;
        let mut total = Norm {
            squared: B::Scalar::zero(),
            pi_power: self.backend.pi_power(),
        };
        for (_, form) in x.terms() {
            total = total.combine(&self.backend.norm(form)?);
        }
        Ok(total)
    }

    /// `Σ_I ‖H(coefficient_I)‖²`: zero iff every coefficient of a closed
    /// element is exact.
    pub fn harmonic_residual(&self, x: &EquivariantElement<B::Scalar>) -> Result<Norm<B::Scalar>> {
        self.check(x)?;
        let mut total = Norm {
            squared: B::Scalar::zero(),
            pi_power: self.backend.pi_power(),
        };
        for (_, form) in x.terms() {
            total = total.combine(&self.backend.norm(&self.backend.harmonic_part(form)?)?);
        }
        Ok(total)
    }

    /// Norm of the harmonic projection of a closed form.
    pub fn obstruction_residual(&self, beta: &InvariantForm<B::Scalar>) -> Result<Norm<B::Scalar>> {
        self.backend.obstruction_residual(beta)
    }

    fn is_negligible(&self, norm: &Norm<B::Scalar>) -> bool {
        norm.is_negligible(self.backend.tolerance())
    }

    fn elements_agree(&self, a: &EquivariantElement<B::Scalar>, b: &EquivariantElement<B::Scalar>) -> Result<bool> {
        if <B::Scalar as Scalar>::EXACT {
            return Ok(a.sub(b)?.is_zero());
        }
        Ok(self.is_negligible(&self.norm(&a.sub(b)?)?))
    }
}
