//! Rotation-invariant forms on the round `S²` in coordinates `(z, φ)`.
//!
//! The metric is `(1-z²)⁻¹dz² + (1-z²)dφ²` with volume form `dz∧dφ`, and the
//! circle acts by `V = ∂φ`. Invariant forms reduce to polynomials in `z`
//! (monomial basis, exact rationals):
//!
//! | degree | form                        | coefficients        |
//! |--------|-----------------------------|---------------------|
//! | 0      | `f(z)`                      | `f`, z-degree ≤ N   |
//! | 1      | `a(z)dz + b(z)(1-z²)dφ`     | `a`, `b`, ≤ N-1     |
//! | 2      | `c(z) dz∧dφ`                | `c`, ≤ N            |
//!
//! The explicit `(1-z²)` factor keeps the `dφ` component smooth at the poles.
//! With these caps `d`, `*`, `d*`, `Δ` and `G` are closed; only the
//! contraction can leave the truncation (`i_V` of `b(1-z²)dφ` gains two
//! degrees, `i_V` of `c dz∧dφ` needs `deg c ≤ N-1`) and reports
//! [`Error::TruncationExceeded`] instead of clipping.

use num_traits::Zero;

use super::BackendSpec;
use crate::derham::{BackendId, DeRhamBackend};
use crate::equivariant::GeneratorSpec;
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::{Rational, Scalar};

#[derive(Debug)]
pub struct SphereBackend {
    id: BackendId,
    truncation: usize,
    /// Column `l` holds the monomial coefficients of the Legendre polynomial `P_l`.
    legendre: Matrix<Rational>,
    generators: GeneratorSpec,
}

fn int(v: i64) -> Rational {
    Rational::from_i64(v)
}

fn derivative(p: &[Rational]) -> Vec<Rational> {
    p.iter()
        .enumerate()
        .skip(1)
        .map(|(k, c)| c.clone() * int(k as i64))
        .collect()
}

/// `p(z)·(1-z²)`.
fn times_one_minus_z2(p: &[Rational]) -> Vec<Rational> {
    let mut out = vec![Rational::zero(); p.len() + 2];
    for (k, c) in p.iter().enumerate() {
        out[k] = out[k].clone() + c.clone();
        out[k + 2] = out[k + 2].clone() - c.clone();
    }
    out
}

/// Highest index holding a nonzero coefficient.
fn z_degree(p: &[Rational]) -> Option<usize> {
    p.iter().rposition(|c| !c.is_zero())
}

/// Resizes `p` to `len`, failing if a nonzero coefficient would be dropped.
fn fit(p: Vec<Rational>, len: usize, operation: &'static str, degree: i32) -> Result<Vec<Rational>> {
    if let Some(top) = z_degree(&p) {
        if top >= len {
            return Err(Error::TruncationExceeded {
                operation,
                degree,
                needed: top,
                available: len.saturating_sub(1),
            });
        }
    }
    let mut p = p;
    p.resize(len, Rational::zero());
    Ok(p)
}

/// `∫_{-1}^{1} p(z) dz`.
fn integrate(p: &[Rational]) -> Rational {
    p.iter()
        .enumerate()
        .filter(|(k, c)| k % 2 == 0 && !c.is_zero())
        .map(|(k, c)| c.clone() * Rational::from_frac(2, k as i64 + 1))
        .fold(Rational::zero(), |a, b| a + b)
}

fn multiply(p: &[Rational], q: &[Rational]) -> Vec<Rational> {
    if p.is_empty() || q.is_empty() {
        return Vec::new();
    }
    let mut out = vec![Rational::zero(); p.len() + q.len() - 1];
    for (i, a) in p.iter().enumerate() {
        if a.is_zero() {
            continue;
        }
        for (j, b) in q.iter().enumerate() {
            if !b.is_zero() {
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
    }
    out
}

/// Monomial coefficients of `P_0..P_n` as matrix columns.
fn legendre_table(n: usize) -> Matrix<Rational> {
    let mut m = Matrix::zeros(n + 1, n + 1);
    m[(0, 0)] = int(1);
    if n >= 1 {
        m[(1, 1)] = int(1);
    }
    for l in 1..n {
        // (l+1) P_{l+1} = (2l+1) z P_l - l P_{l-1}
        for k in 0..=n {
            let mut v = Rational::zero();
            if k >= 1 {
                v = v + m[(k - 1, l)].clone() * int(2 * l as i64 + 1);
            }
            v = v - m[(k, l - 1)].clone() * int(l as i64);
            m[(k, l + 1)] = v / int(l as i64 + 1);
        }
    }
    m
}

impl SphereBackend {
    pub fn new(truncation: usize) -> Result<Self> {
        if truncation < 2 {
            return Err(Error::InvalidParameters(format!(
                "sphere truncation N must be >= 2, got {truncation}"
            )));
        }
        Ok(Self {
            id: BackendId::fresh(),
            truncation,
            legendre: legendre_table(truncation),
            generators: GeneratorSpec::torus(1),
        })
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    /// Smallest truncation in which the extension of a 2-form `c(z)dz∧dφ`
    /// with `deg c = z_degree` stays inside the basis: the contraction needs
    /// `deg c ≤ N-1` and `d*` then raises the degree by one into `Ω⁰`.
    pub fn truncation_for_extension(z_degree: usize) -> usize {
        (z_degree + 1).max(2)
    }

    fn len(&self, degree: usize) -> usize {
        match degree {
            1 => self.truncation,
            _ => self.truncation + 1,
        }
    }

    fn split<'w>(&self, w: &'w [Rational]) -> (&'w [Rational], &'w [Rational]) {
        w.split_at(self.truncation)
    }

    /// `f(z)` from monomial coefficients `f_0, f_1, ...`.
    pub fn function(&self, coeffs: &[Rational]) -> Result<Vec<Rational>> {
        fit(coeffs.to_vec(), self.len(0), "function", 0)
    }

    /// `a(z)dz + b(z)(1-z²)dφ`.
    pub fn one_form(&self, a: &[Rational], b: &[Rational]) -> Result<Vec<Rational>> {
        let mut out = fit(a.to_vec(), self.len(1), "one_form", 1)?;
        out.extend(fit(b.to_vec(), self.len(1), "one_form", 1)?);
        Ok(out)
    }

    /// `c(z) dz∧dφ`.
    pub fn two_form(&self, c: &[Rational]) -> Result<Vec<Rational>> {
        fit(c.to_vec(), self.len(2), "two_form", 2)
    }

    /// Legendre polynomial `P_l` as monomial coefficients of length `N+1`.
    pub fn legendre(&self, l: usize) -> Vec<Rational> {
        self.legendre.column(l)
    }

    fn to_legendre(&self, p: &[Rational]) -> Vec<Rational> {
        // upper triangular back substitution: p = Σ_l x_l P_l
        let n = self.truncation;
        let mut x = vec![Rational::zero(); n + 1];
        for l in (0..=n).rev() {
            let mut v = p[l].clone();
            for m in l + 1..=n {
                if !x[m].is_zero() {
                    v = v - self.legendre[(l, m)].clone() * x[m].clone();
                }
            }
            x[l] = v / self.legendre[(l, l)].clone();
        }
        x
    }

    fn from_legendre(&self, x: &[Rational]) -> Vec<Rational> {
        self.legendre.mul_vec(x)
    }

    /// `G` on functions (and on `c` for 2-forms): divide the Legendre
    /// coefficient of `P_l` by `l(l+1)` and drop the constant.
    fn green_scalar(&self, p: &[Rational]) -> Vec<Rational> {
        let mut x = self.to_legendre(p);
        x[0] = Rational::zero();
        for (l, c) in x.iter_mut().enumerate().skip(1) {
            *c = c.clone() / int((l * (l + 1)) as i64);
        }
        self.from_legendre(&x)
    }

    /// Inverts `T(u) = -(u(1-z²))''` on polynomials of length `len`, using
    /// `T(z^k) = (k+1)(k+2) z^k - k(k-1) z^{k-2}`.
    fn green_component(y: &[Rational]) -> Vec<Rational> {
        let n = y.len();
        let mut x = vec![Rational::zero(); n];
        for k in (0..n).rev() {
            let mut v = y[k].clone() / int(((k + 1) * (k + 2)) as i64);
            if k + 2 < n {
                v = v + x[k + 2].clone();
            }
            x[k] = v;
        }
        x
    }
}

impl DeRhamBackend for SphereBackend {
    type Scalar = Rational;

    fn id(&self) -> BackendId {
        self.id
    }

    fn spec(&self) -> BackendSpec {
        BackendSpec::Sphere {
            truncation: self.truncation,
        }
    }

    fn manifold_dim(&self) -> usize {
        2
    }

    fn dimension(&self, degree: usize) -> usize {
        match degree {
            1 => 2 * self.truncation,
            _ => self.truncation + 1,
        }
    }

    fn generators(&self) -> &GeneratorSpec {
        &self.generators
    }

    fn pi_power(&self) -> u32 {
        1
    }

    fn apply_d(&self, degree: usize, w: &[Rational]) -> Result<Vec<Rational>> {
        match degree {
            0 => {
                let mut a = derivative(w);
                a.resize(self.len(1), Rational::zero());
                a.extend(vec![Rational::zero(); self.len(1)]);
                Ok(a)
            }
            1 => {
                let (_, b) = self.split(w);
                fit(derivative(&times_one_minus_z2(b)), self.len(2), "d", 1)
            }
            _ => Ok(Vec::new()),
        }
    }

    fn apply_star(&self, degree: usize, w: &[Rational]) -> Result<Vec<Rational>> {
        match degree {
            1 => {
                let (a, b) = self.split(w);
                let mut out: Vec<Rational> = b.iter().map(|c| -c.clone()).collect();
                out.extend_from_slice(a);
                Ok(out)
            }
            _ => Ok(w.to_vec()),
        }
    }

    fn apply_contraction(&self, generator: usize, degree: usize, w: &[Rational]) -> Result<Vec<Rational>> {
        if generator != 0 {
            return Err(Error::UnboundGenerator {
                index: generator,
                rank: 1,
            });
        }
        match degree {
            // i_V(a dz + b(1-z²)dφ) = b(1-z²)
            1 => {
                let (_, b) = self.split(w);
                fit(times_one_minus_z2(b), self.len(0), "contraction", 1)
            }
            // i_V(c dz∧dφ) = -c dz
            2 => {
                let a: Vec<Rational> = w.iter().map(|c| -c.clone()).collect();
                let mut out = fit(a, self.len(1), "contraction", 2)?;
                out.extend(vec![Rational::zero(); self.len(1)]);
                Ok(out)
            }
            _ => Err(Error::DegreeMismatch {
                expected: 1,
                found: degree as i32,
            }),
        }
    }

    fn inner_product(&self, degree: usize, x: &[Rational], y: &[Rational]) -> Rational {
        // ∫ over φ contributes 2π; π is carried separately
        let two = int(2);
        match degree {
            1 => {
                let (xa, xb) = self.split(x);
                let (ya, yb) = self.split(y);
                let mut p = multiply(xa, ya);
                let pb = multiply(xb, yb);
                if p.len() < pb.len() {
                    p.resize(pb.len(), Rational::zero());
                }
                for (i, c) in pb.into_iter().enumerate() {
                    p[i] = p[i].clone() + c;
                }
                two * integrate(&times_one_minus_z2(&p))
            }
            _ => two * integrate(&multiply(x, y)),
        }
    }

    fn harmonic_basis(&self, degree: usize) -> Vec<Vec<Rational>> {
        match degree {
            1 => Vec::new(),
            _ => {
                let mut one = vec![Rational::zero(); self.len(degree)];
                one[0] = int(1);
                vec![one]
            }
        }
    }

    fn harmonic_projection(&self, degree: usize, w: &[Rational]) -> Result<Vec<Rational>> {
        let mut out = vec![Rational::zero(); w.len()];
        if degree != 1 {
            out[0] = integrate(w) / int(2);
        }
        Ok(out)
    }

    fn apply_green(&self, degree: usize, w: &[Rational]) -> Result<Vec<Rational>> {
        match degree {
            1 => {
                let (a, b) = self.split(w);
                let mut out = Self::green_component(a);
                out.extend(Self::green_component(b));
                Ok(out)
            }
            _ => Ok(self.green_scalar(w)),
        }
    }
}
