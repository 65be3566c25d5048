//! Flat torus `T^n` (n ≤ 3) with a circle subaction generated by a constant
//! integer vector field `V = Σ v_i ∂_i`.
//!
//! Invariant forms are `Σ_I f_I dx_I` with `f_I` in the real trigonometric
//! span of the modes `k` with `|k_i| ≤ K` and `k·v = 0`. Every flat operator
//! preserves the mode, so the truncation is closed under all of them and the
//! Laplacian is diagonal with eigenvalue `|k|²`. Inner products carry the
//! volume `(2π)^n` as `π^n` times an exact rational.

use std::collections::HashMap;

use num_traits::Zero;

use super::BackendSpec;
use crate::derham::{BackendId, DeRhamBackend};
use crate::equivariant::GeneratorSpec;
use crate::error::{Error, Result};
use crate::scalar::{Rational, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Phase {
    Cos,
    Sin,
}

/// One trigonometric basis function: `cos(k·x)` or `sin(k·x)` for a
/// canonical mode `k` (first nonzero entry positive).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TorusBasisIndex {
    pub mode: Vec<i64>,
    pub phase: Phase,
    /// Sorted coordinate indices of `dx_I`.
    pub coords: Vec<usize>,
}

#[derive(Debug)]
pub struct TorusBackend {
    id: BackendId,
    dim: usize,
    truncation: usize,
    action: Vec<i64>,
    modes: Vec<Vec<i64>>,
    /// (mode index, phase) for each function slot.
    functions: Vec<(usize, Phase)>,
    slot_of: HashMap<(usize, Phase), usize>,
    /// `subsets[q]` lists the coordinate sets of size `q`, lexicographically.
    subsets: Vec<Vec<Vec<usize>>>,
    generators: GeneratorSpec,
}

fn combinations(n: usize, q: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, q: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == q {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, q, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, q, &mut Vec::new(), &mut out);
    out
}

/// Sign of the permutation that sorts `seq` (entries distinct).
fn sort_sign(seq: &[usize]) -> i64 {
    let mut inversions = 0;
    for i in 0..seq.len() {
        for j in i + 1..seq.len() {
            if seq[i] > seq[j] {
                inversions += 1;
            }
        }
    }
    if inversions % 2 == 0 {
        1
    } else {
        -1
    }
}

impl TorusBackend {
    pub fn new(dim: usize, truncation: usize, action: &[i64]) -> Result<Self> {
        if !(1..=3).contains(&dim) {
            return Err(Error::InvalidParameters(format!("torus dimension {dim} not in 1..=3")));
        }
        if truncation < 1 {
            return Err(Error::InvalidParameters("torus truncation K must be >= 1".into()));
        }
        if action.len() != dim || action.iter().all(|&v| v == 0) {
            return Err(Error::InvalidParameters(format!(
                "action vector must be a nonzero vector of length {dim}"
            )));
        }
        let k = truncation as i64;
        let mut modes: Vec<Vec<i64>> = Vec::new();
        let width = 2 * k + 1;
        for code in 0..width.pow(dim as u32) {
            let mode: Vec<i64> = (0..dim)
                .map(|i| (code / width.pow(i as u32)) % width - k)
                .collect();
            let dot: i64 = mode.iter().zip(action).map(|(a, b)| a * b).sum();
            let canonical = mode.iter().find(|&&c| c != 0).map_or(true, |&c| c > 0);
            if dot == 0 && canonical {
                modes.push(mode);
            }
        }
        modes.sort_by_key(|m| (m.iter().map(|c| c * c).sum::<i64>(), m.clone()));
        let mut functions = Vec::new();
        for (i, m) in modes.iter().enumerate() {
            functions.push((i, Phase::Cos));
            if m.iter().any(|&c| c != 0) {
                functions.push((i, Phase::Sin));
            }
        }
        let slot_of = functions.iter().enumerate().map(|(s, &f)| (f, s)).collect();
        Ok(Self {
            id: BackendId::fresh(),
            dim,
            truncation,
            action: action.to_vec(),
            modes,
            functions,
            slot_of,
            subsets: (0..=dim).map(|q| combinations(dim, q)).collect(),
            generators: GeneratorSpec::torus(1),
        })
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    pub fn action(&self) -> &[i64] {
        &self.action
    }

    fn n_functions(&self) -> usize {
        self.functions.len()
    }

    fn subset_index(&self, coords: &[usize]) -> usize {
        self.subsets[coords.len()]
            .iter()
            .position(|s| s == coords)
            .expect("coordinate set is sorted and in range")
    }

    /// Position of a basis element in the degree-`coords.len()` coefficient vector.
    pub fn index_of(&self, mode: &[i64], phase: Phase, coords: &[usize]) -> Option<usize> {
        let m = self.modes.iter().position(|x| x == mode)?;
        let slot = *self.slot_of.get(&(m, phase))?;
        let mut sorted = coords.to_vec();
        sorted.sort_unstable();
        Some(self.subset_index(&sorted) * self.n_functions() + slot)
    }

    pub fn basis_index(&self, degree: usize, index: usize) -> TorusBasisIndex {
        let nf = self.n_functions();
        let (m, phase) = self.functions[index % nf];
        TorusBasisIndex {
            mode: self.modes[m].clone(),
            phase,
            coords: self.subsets[degree][index / nf].clone(),
        }
    }

    /// Laplacian eigenvalue `|k|²` of basis element `index`.
    pub fn eigenvalue(&self, index: usize) -> i64 {
        let (m, _) = self.functions[index % self.n_functions()];
        self.modes[m].iter().map(|c| c * c).sum()
    }

    /// Unit form `cos(k·x) dx_I` or `sin(k·x) dx_I`.
    pub fn basis_form(&self, mode: &[i64], phase: Phase, coords: &[usize]) -> Result<Vec<Rational>> {
        let degree = coords.len();
        let index = self
            .index_of(mode, phase, coords)
            .ok_or_else(|| Error::InvalidParameters(format!("mode {mode:?} is not in the invariant basis")))?;
        let mut out = vec![Rational::zero(); self.dimension(degree)];
        out[index] = Rational::from_i64(1);
        Ok(out)
    }

    /// `∂_i` on a single function slot: `(coefficient, target slot)`.
    fn partial(&self, slot: usize, coord: usize) -> Option<(i64, usize)> {
        let (m, phase) = self.functions[slot];
        let k = self.modes[m][coord];
        if k == 0 {
            return None;
        }
        match phase {
            Phase::Cos => Some((-k, self.slot_of[&(m, Phase::Sin)])),
            Phase::Sin => Some((k, self.slot_of[&(m, Phase::Cos)])),
        }
    }
}

impl DeRhamBackend for TorusBackend {
    type Scalar = Rational;

    fn id(&self) -> BackendId {
        self.id
    }

    fn spec(&self) -> BackendSpec {
        BackendSpec::Torus {
            dim: self.dim,
            truncation: self.truncation,
            action: self.action.clone(),
        }
    }

    fn manifold_dim(&self) -> usize {
        self.dim
    }

    fn dimension(&self, degree: usize) -> usize {
        self.subsets[degree].len() * self.n_functions()
    }

    fn generators(&self) -> &GeneratorSpec {
        &self.generators
    }

    fn pi_power(&self) -> u32 {
        self.dim as u32
    }

    fn apply_d(&self, degree: usize, w: &[Rational]) -> Result<Vec<Rational>> {
        let nf = self.n_functions();
        let mut out = vec![Rational::zero(); self.dimension(degree + 1)];
        for (s_idx, coords) in self.subsets[degree].iter().enumerate() {
            for slot in 0..nf {
                let c = &w[s_idx * nf + slot];
                if c.is_zero() {
                    continue;
                }
                for i in (0..self.dim).filter(|i| !coords.contains(i)) {
                    let Some((factor, target)) = self.partial(slot, i) else {
                        continue;
                    };
                    let mut seq = vec![i];
                    seq.extend_from_slice(coords);
                    let sign = sort_sign(&seq);
                    seq.sort_unstable();
                    let t = self.subset_index(&seq) * nf + target;
                    out[t] = out[t].clone() + c.clone() * Rational::from_i64(sign * factor);
                }
            }
        }
        Ok(out)
    }

    fn apply_star(&self, degree: usize, w: &[Rational]) -> Result<Vec<Rational>> {
        let nf = self.n_functions();
        let mut out = vec![Rational::zero(); self.dimension(self.dim - degree)];
        for (s_idx, coords) in self.subsets[degree].iter().enumerate() {
            let complement: Vec<usize> = (0..self.dim).filter(|i| !coords.contains(i)).collect();
            let mut seq = coords.clone();
            seq.extend_from_slice(&complement);
            let sign = Rational::from_i64(sort_sign(&seq));
            let t_idx = self.subset_index(&complement);
            for slot in 0..nf {
                out[t_idx * nf + slot] = w[s_idx * nf + slot].clone() * sign.clone();
            }
        }
        Ok(out)
    }

    fn apply_contraction(&self, generator: usize, degree: usize, w: &[Rational]) -> Result<Vec<Rational>> {
        if generator != 0 {
            return Err(Error::UnboundGenerator {
                index: generator,
                rank: 1,
            });
        }
        let nf = self.n_functions();
        let mut out = vec![Rational::zero(); self.dimension(degree - 1)];
        for (s_idx, coords) in self.subsets[degree].iter().enumerate() {
            for (p, &i) in coords.iter().enumerate() {
                let v = self.action[i];
                if v == 0 {
                    continue;
                }
                let sign = if p % 2 == 0 { v } else { -v };
                let rest: Vec<usize> = coords.iter().copied().filter(|&c| c != i).collect();
                let t_idx = self.subset_index(&rest);
                for slot in 0..nf {
                    let c = &w[s_idx * nf + slot];
                    if !c.is_zero() {
                        let t = t_idx * nf + slot;
                        out[t] = out[t].clone() + c.clone() * Rational::from_i64(sign);
                    }
                }
            }
        }
        Ok(out)
    }

    fn inner_product(&self, _degree: usize, a: &[Rational], b: &[Rational]) -> Rational {
        let nf = self.n_functions();
        let full = Rational::from_i64(1 << self.dim);
        let half = Rational::from_i64(1 << (self.dim - 1));
        a.iter()
            .zip(b)
            .enumerate()
            .filter(|(_, (x, y))| !x.is_zero() && !y.is_zero())
            .map(|(i, (x, y))| {
                let w = if self.eigenvalue(i % nf) == 0 { &full } else { &half };
                x.clone() * y.clone() * w.clone()
            })
            .fold(Rational::zero(), |acc, v| acc + v)
    }

    fn harmonic_basis(&self, degree: usize) -> Vec<Vec<Rational>> {
        let nf = self.n_functions();
        let constant = self.slot_of[&(0, Phase::Cos)];
        (0..self.subsets[degree].len())
            .map(|s| {
                let mut v = vec![Rational::zero(); self.dimension(degree)];
                v[s * nf + constant] = Rational::from_i64(1);
                v
            })
            .collect()
    }

    fn harmonic_projection(&self, _degree: usize, w: &[Rational]) -> Result<Vec<Rational>> {
        Ok(w.iter()
            .enumerate()
            .map(|(i, c)| if self.eigenvalue(i) == 0 { c.clone() } else { Rational::zero() })
            .collect())
    }

    fn apply_green(&self, _degree: usize, w: &[Rational]) -> Result<Vec<Rational>> {
        Ok(w.iter()
            .enumerate()
            .map(|(i, c)| match self.eigenvalue(i) {
                0 => Rational::zero(),
                lambda => c.clone() / Rational::from_i64(lambda),
            })
            .collect())
    }
}
