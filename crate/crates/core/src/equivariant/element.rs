use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::GeneratorSpec;
use crate::derham::{BackendId, InvariantForm};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Monomial `t_1^{e_1} ... t_r^{e_r}`; ordered lexicographically on exponents.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn one(rank: usize) -> Self {
        Self(vec![0; rank])
    }

    pub fn from_exponents(exponents: Vec<u32>) -> Self {
        Self(exponents)
    }

    pub fn generator(rank: usize, j: usize) -> Self {
        let mut e = vec![0; rank];
        e[j] = 1;
        Self(e)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    /// Number of generator factors, counted with multiplicity.
    pub fn order(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn times_generator(&self, j: usize) -> Self {
        let mut e = self.0.clone();
        e[j] += 1;
        Self(e)
    }

    /// Degree in `R_G`: `Σ e_j deg(t_j)`.
    pub fn degree(&self, gens: &GeneratorSpec) -> i32 {
        self.0
            .iter()
            .zip(gens.degrees())
            .map(|(&e, &d)| (e * d) as i32)
            .sum()
    }

    pub fn display<'a>(&'a self, gens: &'a GeneratorSpec) -> impl fmt::Display + 'a {
        MonomialDisplay { mono: self, gens }
    }
}

struct MonomialDisplay<'a> {
    mono: &'a Monomial,
    gens: &'a GeneratorSpec,
}

impl fmt::Display for MonomialDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.mono.is_one() {
            return write!(f, "1");
        }
        let mut first = true;
        for (j, &e) in self.mono.0.iter().enumerate() {
            if e == 0 {
                continue;
            }
            if !first {
                write!(f, "*")?;
            }
            first = false;
            write!(f, "{}", self.gens.label(j))?;
            if e > 1 {
                write!(f, "^{e}")?;
            }
        }
        Ok(())
    }
}

/// A homogeneous element of `R_G ⊗ Ω_inv(M)`: monomials mapped to forms.
///
/// Zero coefficients are never stored, so an empty map is the zero element.
#[derive(Clone, Debug, PartialEq)]
pub struct EquivariantElement<S> {
    backend: BackendId,
    rank: usize,
    total_degree: i32,
    terms: BTreeMap<Monomial, InvariantForm<S>>,
}

impl<S: Scalar> EquivariantElement<S> {
    pub fn zero(backend: BackendId, rank: usize, total_degree: i32) -> Self {
        Self {
            backend,
            rank,
            total_degree,
            terms: BTreeMap::new(),
        }
    }

    /// `1 ⊗ form`.
    pub fn from_form(form: InvariantForm<S>, rank: usize) -> Self {
        let mut out = Self::zero(form.backend(), rank, form.degree());
        if !form.is_zero() {
            out.terms.insert(Monomial::one(rank), form);
        }
        out
    }

    pub fn backend(&self) -> BackendId {
        self.backend
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn total_degree(&self) -> i32 {
        self.total_degree
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &InvariantForm<S>)> {
        self.terms.iter()
    }

    pub fn get(&self, mono: &Monomial) -> Option<&InvariantForm<S>> {
        self.terms.get(mono)
    }

    /// The coefficient of the monomial `1`, if nonzero.
    pub fn constant_part(&self) -> Option<&InvariantForm<S>> {
        self.terms.get(&Monomial::one(self.rank))
    }

    /// Adds `mono ⊗ form`, checking backend and homogeneity.
    pub fn add_term(&mut self, gens: &GeneratorSpec, mono: Monomial, form: InvariantForm<S>) -> Result<()> {
        if form.backend() != self.backend {
            return Err(Error::BackendMismatch {
                expected: self.backend.get(),
                found: form.backend().get(),
            });
        }
        if mono.rank() != self.rank || gens.rank() != self.rank {
            return Err(Error::UnboundGenerator {
                index: mono.rank().max(gens.rank()),
                rank: self.rank,
            });
        }
        let degree = mono.degree(gens) + form.degree();
        if degree != self.total_degree {
            return Err(Error::NotHomogeneous {
                expected: self.total_degree,
                found: degree,
            });
        }
        if form.is_zero() {
            return Ok(());
        }
        let merged = match self.terms.remove(&mono) {
            Some(existing) => existing.add(&form)?,
            None => form,
        };
        if !merged.is_zero() {
            self.terms.insert(mono, merged);
        }
        Ok(())
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.backend != other.backend {
            return Err(Error::BackendMismatch {
                expected: self.backend.get(),
                found: other.backend.get(),
            });
        }
        if self.total_degree != other.total_degree && !self.is_zero() && !other.is_zero() {
            return Err(Error::NotHomogeneous {
                expected: self.total_degree,
                found: other.total_degree,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        if self.is_zero() {
            out.total_degree = other.total_degree;
        }
        for (mono, form) in &other.terms {
            let merged = match out.terms.remove(mono) {
                Some(existing) => existing.add(form)?,
                None => form.clone(),
            };
            if !merged.is_zero() {
                out.terms.insert(mono.clone(), merged);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, factor: &S) -> Self {
        let mut out = Self::zero(self.backend, self.rank, self.total_degree);
        if factor.is_zero() {
            return out;
        }
        for (mono, form) in &self.terms {
            out.terms.insert(mono.clone(), form.scale(factor));
        }
        out
    }

    pub fn neg(&self) -> Self {
        self.scale(&-S::one())
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    /// Largest form degree among the stored coefficients.
    pub fn max_form_degree(&self) -> Option<i32> {
        self.terms.values().map(InvariantForm::degree).max()
    }

    /// Human-readable listing of the nonzero terms.
    pub fn describe(&self, gens: &GeneratorSpec) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        self.terms
            .iter()
            .map(|(m, f)| format!("{} ⊗ [deg {}]", m.display(gens), f.degree()))
            .collect::<Vec<_>>()
            .join(" + ")
    }
}
