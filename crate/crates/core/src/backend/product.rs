//! Riemannian product `M₁ × M₂` of two exact backends with the product torus
//! action; generators are those of the first factor followed by those of the
//! second.
//!
//! Degree-q forms are stored block-wise over the splittings `q = p + r`, each
//! block a `dim₁(p) × dim₂(r)` row-major array of pure-tensor coefficients.
//! Every operator is assembled from factor matrices plus the Koszul rule: an
//! operator of degree `e` acting on the second factor picks up `(-1)^{p·e}`,
//! and `*(a⊗b) = (-1)^{r(n₁-p)} *a ⊗ *b`.

use std::sync::Arc;

use super::BackendSpec;
use crate::derham::{BackendId, DeRhamBackend, DenseGreen};
use crate::equivariant::GeneratorSpec;
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::{Rational, Scalar};

/// A factor operator as a dense matrix; columns whose image left the factor's
/// truncation are flagged and raise an error when hit by a nonzero input.
#[derive(Debug)]
struct FactorMatrix<S> {
    matrix: Matrix<S>,
    overflow: Vec<Option<Error>>,
}

impl<S: Scalar> FactorMatrix<S> {
    fn build(rows: usize, cols: usize, apply: impl Fn(&[S]) -> Result<Vec<S>>) -> Result<Self> {
        let mut matrix = Matrix::zeros(rows, cols);
        let mut overflow = vec![None; cols];
        let mut unit = vec![S::zero(); cols];
        for j in 0..cols {
            unit[j] = S::one();
            match apply(&unit) {
                Ok(col) => {
                    for (i, v) in col.into_iter().enumerate() {
                        matrix[(i, j)] = v;
                    }
                }
                Err(e @ Error::TruncationExceeded { .. }) => overflow[j] = Some(e),
                Err(e) => return Err(e),
            }
            unit[j] = S::zero();
        }
        Ok(Self { matrix, overflow })
    }

    fn check_column(&self, j: usize) -> Result<()> {
        match &self.overflow[j] {
            Some(e) => Err(e.clone()),
            None => Ok(()),
        }
    }
}

#[derive(Clone, Copy, Debug)]
struct Block {
    /// Degree on the first factor.
    p: usize,
    offset: usize,
    rows: usize,
    cols: usize,
}

#[derive(Debug)]
pub struct ProductBackend<S: Scalar = Rational> {
    id: BackendId,
    first: Arc<dyn DeRhamBackend<Scalar = S>>,
    second: Arc<dyn DeRhamBackend<Scalar = S>>,
    n1: usize,
    n2: usize,
    generators: GeneratorSpec,
    blocks: Vec<Vec<Block>>,
    d1: Vec<FactorMatrix<S>>,
    d2: Vec<FactorMatrix<S>>,
    star1: Vec<FactorMatrix<S>>,
    star2: Vec<FactorMatrix<S>>,
    /// `contraction1[j][p]` for generator `j` of the first factor.
    contraction1: Vec<Vec<Option<FactorMatrix<S>>>>,
    contraction2: Vec<Vec<Option<FactorMatrix<S>>>>,
    gram1: Vec<Matrix<S>>,
    gram2: Vec<Matrix<S>>,
    green: DenseGreen<S>,
}

fn factor_matrices<S: Scalar>(
    b: &dyn DeRhamBackend<Scalar = S>,
) -> Result<(Vec<FactorMatrix<S>>, Vec<FactorMatrix<S>>, Vec<Vec<Option<FactorMatrix<S>>>>, Vec<Matrix<S>>)> {
    let n = b.manifold_dim();
    let d = (0..n)
        .map(|p| FactorMatrix::build(b.dimension(p + 1), b.dimension(p), |x| b.apply_d(p, x)))
        .collect::<Result<Vec<_>>>()?;
    let star = (0..=n)
        .map(|p| FactorMatrix::build(b.dimension(n - p), b.dimension(p), |x| b.apply_star(p, x)))
        .collect::<Result<Vec<_>>>()?;
    let gens = b.generators();
    let mut contraction = Vec::new();
    for j in 0..gens.rank() {
        let drop = gens.contraction_drop(j)? as usize;
        let per_degree = (0..=n)
            .map(|p| {
                if p < drop {
                    Ok(None)
                } else {
                    FactorMatrix::build(b.dimension(p - drop), b.dimension(p), |x| b.apply_contraction(j, p, x))
                        .map(Some)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        contraction.push(per_degree);
    }
    let gram = (0..=n)
        .map(|p| {
            let dim = b.dimension(p);
            let mut g = Matrix::zeros(dim, dim);
            let mut ei = vec![S::zero(); dim];
            let mut ej = vec![S::zero(); dim];
            for i in 0..dim {
                ei[i] = S::one();
                for j in 0..dim {
                    ej[j] = S::one();
                    g[(i, j)] = b.inner_product(p, &ei, &ej);
                    ej[j] = S::zero();
                }
                ei[i] = S::zero();
            }
            g
        })
        .collect();
    Ok((d, star, contraction, gram))
}

impl<S: Scalar> ProductBackend<S> {
    pub fn new(first: Arc<dyn DeRhamBackend<Scalar = S>>, second: Arc<dyn DeRhamBackend<Scalar = S>>) -> Result<Self> {
        if !S::EXACT {
            return Err(Error::InvalidParameters(
                "product backends need exact factors".into(),
            ));
        }
        let n1 = first.manifold_dim();
        let n2 = second.manifold_dim();
        let mut blocks = Vec::new();
        for q in 0..=n1 + n2 {
            let mut offset = 0;
            let mut list = Vec::new();
            for p in q.saturating_sub(n2)..=q.min(n1) {
                let rows = first.dimension(p);
                let cols = second.dimension(q - p);
                list.push(Block { p, offset, rows, cols });
                offset += rows * cols;
            }
            blocks.push(list);
        }
        let (d1, star1, contraction1, gram1) = factor_matrices(first.as_ref())?;
        let (d2, star2, contraction2, gram2) = factor_matrices(second.as_ref())?;
        let generators = first.generators().concat(second.generators());
        Ok(Self {
            id: BackendId::fresh(),
            first,
            second,
            n1,
            n2,
            generators,
            blocks,
            d1,
            d2,
            star1,
            star2,
            contraction1,
            contraction2,
            gram1,
            gram2,
            green: DenseGreen::new(n1 + n2),
        })
    }

    pub fn first(&self) -> &Arc<dyn DeRhamBackend<Scalar = S>> {
        &self.first
    }

    pub fn second(&self) -> &Arc<dyn DeRhamBackend<Scalar = S>> {
        &self.second
    }

    fn block(&self, q: usize, p: usize) -> Option<Block> {
        self.blocks.get(q)?.iter().copied().find(|b| b.p == p)
    }

    /// Coefficients of the pure tensor `a ⊗ b` (degrees `p` and `r`).
    pub fn tensor(&self, p: usize, a: &[S], r: usize, b: &[S]) -> Result<Vec<S>> {
        let q = p + r;
        let block = self
            .block(q, p)
            .ok_or_else(|| Error::InvalidParameters(format!("no ({p}, {r}) block in the product")))?;
        if a.len() != block.rows || b.len() != block.cols {
            return Err(Error::LengthMismatch {
                degree: q as i32,
                expected: block.rows * block.cols,
                found: a.len() * b.len(),
            });
        }
        let mut out = vec![S::zero(); self.dimension(q)];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                out[block.offset + i * block.cols + j] = x.clone() * y.clone();
            }
        }
        Ok(out)
    }

    /// `out_block += sign · A · C` with `A` acting on the first factor.
    fn left_apply(
        op: &FactorMatrix<S>,
        src: &[S],
        sb: Block,
        out: &mut [S],
        tb: Block,
        negate: bool,
    ) -> Result<()> {
        for i in 0..sb.rows {
            for j in 0..sb.cols {
                let c = &src[sb.offset + i * sb.cols + j];
                if c.is_zero() {
                    continue;
                }
                op.check_column(i)?;
                for k in 0..tb.rows {
                    let a = &op.matrix[(k, i)];
                    if a.is_zero() {
                        continue;
                    }
                    let v = a.clone() * c.clone();
                    let slot = &mut out[tb.offset + k * tb.cols + j];
                    *slot = if negate { slot.clone() - v } else { slot.clone() + v };
                }
            }
        }
        Ok(())
    }

    /// `out_block += sign · C · Bᵀ` with `B` acting on the second factor.
    fn right_apply(
        op: &FactorMatrix<S>,
        src: &[S],
        sb: Block,
        out: &mut [S],
        tb: Block,
        negate: bool,
    ) -> Result<()> {
        for i in 0..sb.rows {
            for j in 0..sb.cols {
                let c = &src[sb.offset + i * sb.cols + j];
                if c.is_zero() {
                    continue;
                }
                op.check_column(j)?;
                for k in 0..tb.cols {
                    let b = &op.matrix[(k, j)];
                    if b.is_zero() {
                        continue;
                    }
                    let v = b.clone() * c.clone();
                    let slot = &mut out[tb.offset + i * tb.cols + k];
                    *slot = if negate { slot.clone() - v } else { slot.clone() + v };
                }
            }
        }
        Ok(())
    }
}

impl<S: Scalar> DeRhamBackend for ProductBackend<S> {
    type Scalar = S;

    fn id(&self) -> BackendId {
        self.id
    }

    fn spec(&self) -> BackendSpec {
        BackendSpec::Product {
            first: Box::new(self.first.spec()),
            second: Box::new(self.second.spec()),
        }
    }

    fn manifold_dim(&self) -> usize {
        self.n1 + self.n2
    }

    fn dimension(&self, degree: usize) -> usize {
        self.blocks[degree].iter().map(|b| b.rows * b.cols).sum()
    }

    fn generators(&self) -> &GeneratorSpec {
        &self.generators
    }

    fn pi_power(&self) -> u32 {
        self.first.pi_power() + self.second.pi_power()
    }

    fn apply_d(&self, degree: usize, w: &[S]) -> Result<Vec<S>> {
        let q = degree;
        let mut out = vec![S::zero(); self.dimension(q + 1)];
        for &sb in &self.blocks[q] {
            let (p, r) = (sb.p, q - sb.p);
            if p < self.n1 {
                let tb = self.block(q + 1, p + 1).expect("target block exists");
                Self::left_apply(&self.d1[p], w, sb, &mut out, tb, false)?;
            }
            if r < self.n2 {
                let tb = self.block(q + 1, p).expect("target block exists");
                Self::right_apply(&self.d2[r], w, sb, &mut out, tb, p % 2 == 1)?;
            }
        }
        Ok(out)
    }

    fn apply_star(&self, degree: usize, w: &[S]) -> Result<Vec<S>> {
        let q = degree;
        let n = self.n1 + self.n2;
        let mut out = vec![S::zero(); self.dimension(n - q)];
        for &sb in &self.blocks[q] {
            let (p, r) = (sb.p, q - sb.p);
            let tb = self.block(n - q, self.n1 - p).expect("target block exists");
            // *a ⊗ *b via a scratch block holding (*a) ⊗ b
            let mid = Block {
                p: self.n1 - p,
                offset: 0,
                rows: tb.rows,
                cols: sb.cols,
            };
            let mut scratch = vec![S::zero(); mid.rows * mid.cols];
            Self::left_apply(&self.star1[p], w, sb, &mut scratch, mid, false)?;
            let negate = (r * (self.n1 - p)) % 2 == 1;
            Self::right_apply(&self.star2[r], &scratch, mid, &mut out, tb, negate)?;
        }
        Ok(out)
    }

    fn apply_contraction(&self, generator: usize, degree: usize, w: &[S]) -> Result<Vec<S>> {
        let q = degree;
        let r1 = self.first.generators().rank();
        let drop = self.generators.contraction_drop(generator)? as usize;
        let mut out = vec![S::zero(); self.dimension(q - drop)];
        for &sb in &self.blocks[q] {
            let (p, r) = (sb.p, q - sb.p);
            if generator < r1 {
                if let Some(op) = self.contraction1[generator][p].as_ref() {
                    let tb = self.block(q - drop, p - drop).expect("target block exists");
                    Self::left_apply(op, w, sb, &mut out, tb, false)?;
                }
            } else if let Some(op) = self.contraction2[generator - r1][r].as_ref() {
                let tb = self.block(q - drop, p).expect("target block exists");
                Self::right_apply(op, w, sb, &mut out, tb, (p * drop) % 2 == 1)?;
            }
        }
        Ok(out)
    }

    fn inner_product(&self, degree: usize, a: &[S], b: &[S]) -> S {
        let mut total = S::zero();
        for &blk in &self.blocks[degree] {
            let (p, r) = (blk.p, degree - blk.p);
            let g1 = &self.gram1[p];
            let g2 = &self.gram2[r];
            for i in 0..blk.rows {
                for j in 0..blk.cols {
                    let x = &a[blk.offset + i * blk.cols + j];
                    if x.is_zero() {
                        continue;
                    }
                    for k in 0..blk.rows {
                        let m1 = &g1[(i, k)];
                        if m1.is_zero() {
                            continue;
                        }
                        for l in 0..blk.cols {
                            let y = &b[blk.offset + k * blk.cols + l];
                            let m2 = &g2[(j, l)];
                            if !y.is_zero() && !m2.is_zero() {
                                total = total + x.clone() * y.clone() * m1.clone() * m2.clone();
                            }
                        }
                    }
                }
            }
        }
        total
    }

    fn harmonic_basis(&self, degree: usize) -> Vec<Vec<S>> {
        let mut out = Vec::new();
        for blk in &self.blocks[degree] {
            let (p, r) = (blk.p, degree - blk.p);
            for h1 in self.first.harmonic_basis(p) {
                for h2 in self.second.harmonic_basis(r) {
                    out.push(self.tensor(p, &h1, r, &h2).expect("harmonic factors have block shape"));
                }
            }
        }
        out
    }

    fn apply_green(&self, degree: usize, w: &[S]) -> Result<Vec<S>> {
        self.green.apply(self, degree, w)
    }
}
