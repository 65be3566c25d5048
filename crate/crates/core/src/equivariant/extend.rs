use serde::{Deserialize, Serialize};

use super::{Cartan, EquivariantElement};
use crate::derham::{DeRhamBackend, HodgeEngine, InvariantForm, Norm};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExtensionStatus {
    Extended,
    Obstructed,
}

/// Outcome of the extension loop.
#[derive(Clone, Debug)]
pub struct ExtensionReport<S> {
    /// The closed invariant form being extended.
    pub input: InvariantForm<S>,
    /// `P^0 α, P^1 α, ...`, without the trailing zero term.
    pub terms: Vec<EquivariantElement<S>>,
    /// Harmonic residual of `∂ P^m α` for each stage `m` that was examined.
    pub stage_obstructions: Vec<Norm<S>>,
    /// `‖d_G α̂‖` for the sum of the reported terms.
    pub final_residual: Norm<S>,
    /// First `m` with `P^m α = 0`, or the stage at which an obstruction was found.
    pub terminated_at_stage: usize,
    pub status: ExtensionStatus,
}

impl<S: crate::scalar::Scalar> ExtensionReport<S> {
    /// `α̂ = Σ_m P^m α`.
    pub fn sum(&self) -> Result<EquivariantElement<S>> {
        let mut iter = self.terms.iter();
        let first = iter.next().cloned().expect("report always holds the input term");
        iter.try_fold(first, |acc, t| acc.add(t))
    }

    pub fn is_extended(&self) -> bool {
        self.status == ExtensionStatus::Extended
    }

    /// The obstruction that stopped the loop, if any.
    pub fn obstruction(&self) -> Option<(usize, f64)> {
        match self.status {
            ExtensionStatus::Obstructed => Some((
                self.terminated_at_stage,
                self.stage_obstructions
                    .last()
                    .map(Norm::value)
                    .unwrap_or(f64::NAN),
            )),
            ExtensionStatus::Extended => None,
        }
    }
}

impl<B: DeRhamBackend + ?Sized> Cartan<'_, B> {
    /// Runs the extension loop and returns its report, obstructed or not.
    ///
    /// Before each application of Green's operator the harmonic part of
    /// `∂ P^m α` is measured; a nonzero value means that coefficient is not
    /// exact, so no extension exists for this input and the loop stops there
    /// instead of projecting the harmonic part away.
    pub fn extension_report(&self, alpha: &InvariantForm<B::Scalar>) -> Result<ExtensionReport<B::Scalar>> {
        let backend = self.backend();
        backend.check_form(alpha)?;
        let closure = backend.norm(&backend.d(alpha)?)?;
        if !closure.is_negligible(backend.tolerance()) {
            return Err(Error::NotClosed {
                residual: closure.value(),
            });
        }

        let gens = self.generators();
        let min_drop = (0..gens.rank())
            .map(|j| gens.contraction_drop(j))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .min()
            .unwrap_or(1);

        let first = self.element(alpha.clone())?;
        let mut terms = vec![first];
        let mut stage_obstructions = Vec::new();
        let mut status = ExtensionStatus::Extended;
        let mut stage = 0;
        loop {
            let current = &terms[stage];
            if current.is_zero() {
                break;
            }
            // every contraction would land below degree 0
            if current.max_form_degree().unwrap_or(-1) < min_drop {
                stage += 1;
                break;
            }
            let boundary = self.partial_d(current)?;
            let residual = self.harmonic_residual(&boundary)?;
            let obstructed = !self.is_negligible(&residual);
            stage_obstructions.push(residual);
            if obstructed {
                status = ExtensionStatus::Obstructed;
                break;
            }
            let next = self.codifferential_green(&boundary)?;
            stage += 1;
            if next.is_zero() {
                break;
            }
            terms.push(next);
        }

        let mut report = ExtensionReport {
            input: alpha.clone(),
            terms,
            stage_obstructions,
            final_residual: Norm::zero(),
            terminated_at_stage: stage,
            status,
        };
        report.final_residual = self.norm(&self.cartan_d(&report.sum()?)?)?;
        Ok(report)
    }

    /// Canonical equivariant extension of a closed invariant form.
    ///
    /// Errors with [`Error::ObstructionDetected`] when some stage has a
    /// nonzero harmonic residual; use [`extension_report`](Self::extension_report)
    /// to inspect the partial terms in that case.
    pub fn extend(&self, alpha: &InvariantForm<B::Scalar>) -> Result<ExtensionReport<B::Scalar>> {
        let report = self.extension_report(alpha)?;
        match report.obstruction() {
            Some((stage, residual)) => Err(Error::ObstructionDetected { stage, residual }),
            None => Ok(report),
        }
    }

    /// Recomputes `‖d_G α̂‖` from the reported terms alone.
    pub fn verify_extension(&self, report: &ExtensionReport<B::Scalar>) -> Result<Norm<B::Scalar>> {
        let mut total = self.element(report.input.clone())?;
        for term in report.terms.iter().skip(1) {
            total = total.add(term)?;
        }
        self.norm(&self.cartan_d(&total)?)
    }

    /// Continues a partial extension `a_0..a_m` (with `d a_0 = 0` and
    /// `d a_j = ∂ a_{j-1}`) by `a_{m+1} = P(a_m)`.
    pub fn extend_partial(
        &self,
        a_terms: &[EquivariantElement<B::Scalar>],
        m: usize,
    ) -> Result<EquivariantElement<B::Scalar>> {
        let a_m = a_terms.get(m).ok_or(Error::PreconditionViolated {
            index: a_terms.len(),
        })?;
        let first = &a_terms[0];
        let closure = self.norm(&self.exterior_d(first)?)?;
        if !self.is_negligible(&closure) {
            return Err(Error::PreconditionViolated { index: 0 });
        }
        for j in 1..=m {
            let lhs = self.exterior_d(&a_terms[j])?;
            let rhs = self.partial_d(&a_terms[j - 1])?;
            if !self.elements_agree(&lhs, &rhs)? {
                return Err(Error::PreconditionViolated { index: j });
            }
        }
        let boundary = self.partial_d(a_m)?;
        let residual = self.harmonic_residual(&boundary)?;
        if !self.is_negligible(&residual) {
            return Err(Error::ObstructionDetected {
                stage: m,
                residual: residual.value(),
            });
        }
        self.codifferential_green(&boundary)
    }

    /// Zero-average moment map `μ = d*G(i_V ω)` of a closed invariant 2-form
    /// under a circle action, so that `dμ = i_V ω`.
    pub fn moment_map(&self, omega: &InvariantForm<B::Scalar>) -> Result<InvariantForm<B::Scalar>> {
        let gens = self.generators();
        if gens.rank() != 1 || gens.degree(0)? != 2 {
            return Err(Error::Unsupported(
                "moment maps need a circle action (one generator of degree 2)".into(),
            ));
        }
        let backend = self.backend();
        backend.check_form(omega)?;
        if omega.degree() != 2 {
            return Err(Error::DegreeMismatch {
                expected: 2,
                found: omega.degree(),
            });
        }
        let closure = backend.norm(&backend.d(omega)?)?;
        if !closure.is_negligible(backend.tolerance()) {
            return Err(Error::NotClosed {
                residual: closure.value(),
            });
        }
        let contracted = backend.contraction(0, omega)?;
        let residual = backend.norm(&backend.harmonic_part(&contracted)?)?;
        if !residual.is_negligible(backend.tolerance()) {
            return Err(Error::ObstructionDetected {
                stage: 0,
                residual: residual.value(),
            });
        }
        backend.codifferential(&backend.green(&contracted)?)
    }
}
