//! Dense floating-point oracle for the exact backends.
//!
//! Each basis form is realized as actual component functions. `d`, `*` and
//! `i_V` act pointwise (derivatives by finite differences), results are fit
//! back onto the basis by least squares, and inner products come from
//! quadrature. `d*`, `Δ`, `H`, `G` and `P` are then derived by dense linear
//! algebra from those matrices alone, so nothing here reuses library
//! operator code.

use std::rc::Rc;

use equihodge::backend::torus::Phase;
use equihodge::{Cartan, DeRhamBackend, HodgeEngine, Monomial, Rational, Scalar, SphereBackend, TorusBackend};
use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_traits::Zero;

type Scalar1 = Rc<dyn Fn(f64) -> f64>;
type ScalarN = Rc<dyn Fn(&[f64]) -> f64>;

const STEP: f64 = 1e-3;
const FIT_TOLERANCE: f64 = 1e-7;

fn derivative(f: &dyn Fn(f64) -> f64, x: f64) -> f64 {
    let h = STEP;
    (8.0 * (f(x + h) - f(x - h)) - (f(x + 2.0 * h) - f(x - 2.0 * h))) / (12.0 * h)
}

/// Gauss–Legendre nodes and weights on [-1, 1] (Golub–Welsch).
fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut jacobi = DMatrix::<f64>::zeros(n, n);
    for k in 1..n {
        let b = k as f64 / ((4 * k * k - 1) as f64).sqrt();
        jacobi[(k, k - 1)] = b;
        jacobi[(k - 1, k)] = b;
    }
    let eigen = SymmetricEigen::new(jacobi);
    (0..n)
        .map(|i| (eigen.eigenvalues[i], 2.0 * eigen.eigenvectors[(0, i)].powi(2)))
        .collect()
}

/// Least-squares coefficients of `values` over `columns`, or `None` when the
/// fit leaves a residual (the function is outside the span).
fn fit(columns: &DMatrix<f64>, values: &DVector<f64>) -> Option<DVector<f64>> {
    let svd = columns.clone().svd(true, true);
    let c = svd.solve(values, 1e-12).ok()?;
    let residual = (columns * &c - values).amax();
    (residual <= FIT_TOLERANCE * (1.0 + values.amax())).then_some(c)
}

/// Operator matrices assembled by a model; `None` columns leave the basis.
pub struct Assembled {
    pub n: usize,
    pub d: Vec<DMatrix<f64>>,
    pub star: Vec<DMatrix<f64>>,
    pub contraction: Vec<Vec<Option<DVector<f64>>>>,
    pub gram: Vec<DMatrix<f64>>,
}

fn full(rows: usize, columns: Vec<Option<DVector<f64>>>, what: &str) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(rows, columns.len());
    for (j, c) in columns.into_iter().enumerate() {
        let c = c.unwrap_or_else(|| panic!("oracle {what} column {j} is not representable"));
        m.set_column(j, &c);
    }
    m
}

// ---------------------------------------------------------------- sphere

/// Components in the coordinate coframe: `f`, `(A, B)` for `A dz + B dφ`, or `C` for `C dz∧dφ`.
#[derive(Clone)]
struct SphereField(Vec<Scalar1>);

pub struct SphereModel {
    truncation: usize,
    nodes: Vec<f64>,
    quadrature: Vec<(f64, f64)>,
}

impl SphereModel {
    pub fn new(truncation: usize) -> Self {
        let m = 4 * truncation + 8;
        let nodes = (0..m)
            .map(|i| ((2 * i + 1) as f64 * std::f64::consts::PI / (2 * m) as f64).cos())
            .collect();
        Self {
            truncation,
            nodes,
            quadrature: gauss_legendre(24),
        }
    }

    fn monomial(k: usize) -> Scalar1 {
        Rc::new(move |z: f64| z.powi(k as i32))
    }

    fn zero() -> Scalar1 {
        Rc::new(|_| 0.0)
    }

    fn basis(&self, q: usize, j: usize) -> SphereField {
        let n = self.truncation;
        match q {
            1 if j < n => SphereField(vec![Self::monomial(j), Self::zero()]),
            1 => {
                let k = j - n;
                SphereField(vec![Self::zero(), Rc::new(move |z: f64| z.powi(k as i32) * (1.0 - z * z))])
            }
            _ => SphereField(vec![Self::monomial(j)]),
        }
    }

    fn dim(&self, q: usize) -> usize {
        if q == 1 {
            2 * self.truncation
        } else {
            self.truncation + 1
        }
    }

    fn d(q: usize, w: &SphereField) -> SphereField {
        match q {
            0 => {
                let f = w.0[0].clone();
                SphereField(vec![Rc::new(move |z| derivative(&*f, z)), Self::zero()])
            }
            // d(A dz + B dφ) = ∂_z B dz∧dφ since nothing depends on φ
            _ => {
                let b = w.0[1].clone();
                SphereField(vec![Rc::new(move |z| derivative(&*b, z))])
            }
        }
    }

    /// Metric `diag(1/(1-z²), 1-z²)`, `√g = 1`, orientation `dz∧dφ`.
    fn star(q: usize, w: &SphereField) -> SphereField {
        match q {
            1 => {
                let (a, b) = (w.0[0].clone(), w.0[1].clone());
                SphereField(vec![
                    Rc::new(move |z| -b(z) / (1.0 - z * z)),
                    Rc::new(move |z| (1.0 - z * z) * a(z)),
                ])
            }
            _ => w.clone(),
        }
    }

    /// `V = ∂φ`: `i_V(A dz + B dφ) = B`, `i_V(C dz∧dφ) = -C dz`.
    fn contraction(q: usize, w: &SphereField) -> SphereField {
        match q {
            1 => SphereField(vec![w.0[1].clone()]),
            _ => {
                let c = w.0[0].clone();
                SphereField(vec![Rc::new(move |z| -c(z)), Self::zero()])
            }
        }
    }

    fn project(&self, q: usize, w: &SphereField) -> Option<DVector<f64>> {
        let n = self.truncation;
        let poly_fit = |g: &dyn Fn(f64) -> f64, len: usize| {
            let cols = DMatrix::from_fn(self.nodes.len(), len, |i, k| self.nodes[i].powi(k as i32));
            let vals = DVector::from_iterator(self.nodes.len(), self.nodes.iter().map(|&z| g(z)));
            fit(&cols, &vals)
        };
        match q {
            1 => {
                let a = poly_fit(&*w.0[0], n)?;
                let b_comp = w.0[1].clone();
                let b = poly_fit(&move |z: f64| b_comp(z) / (1.0 - z * z), n)?;
                Some(DVector::from_iterator(2 * n, a.iter().chain(b.iter()).copied()))
            }
            _ => poly_fit(&*w.0[0], n + 1),
        }
    }

    /// `∫ g(a, b) dz dφ` in units of π.
    fn inner(&self, q: usize, a: &SphereField, b: &SphereField) -> f64 {
        let density = |z: f64| match q {
            1 => (1.0 - z * z) * a.0[0](z) * b.0[0](z) + a.0[1](z) * b.0[1](z) / (1.0 - z * z),
            _ => a.0[0](z) * b.0[0](z),
        };
        2.0 * self.quadrature.iter().map(|&(z, w)| w * density(z)).sum::<f64>()
    }

    pub fn assemble(&self) -> Assembled {
        let n = 2;
        let mut out = Assembled {
            n,
            d: Vec::new(),
            star: Vec::new(),
            contraction: Vec::new(),
            gram: Vec::new(),
        };
        for q in 0..=n {
            let basis: Vec<SphereField> = (0..self.dim(q)).map(|j| self.basis(q, j)).collect();
            let d_cols = basis
                .iter()
                .map(|w| if q < n { self.project(q + 1, &Self::d(q, w)) } else { Some(DVector::zeros(0)) })
                .collect();
            out.d.push(full(if q < n { self.dim(q + 1) } else { 0 }, d_cols, "d"));
            let star_cols = basis.iter().map(|w| self.project(n - q, &Self::star(q, w))).collect();
            out.star.push(full(self.dim(n - q), star_cols, "star"));
            out.contraction.push(
                basis
                    .iter()
                    .map(|w| if q > 0 { self.project(q - 1, &Self::contraction(q, w)) } else { None })
                    .collect(),
            );
            out.gram
                .push(DMatrix::from_fn(basis.len(), basis.len(), |i, j| self.inner(q, &basis[i], &basis[j])));
        }
        out
    }
}

// ---------------------------------------------------------------- torus

fn subsets(n: usize, q: usize) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = (0u32..1 << n)
        .filter(|m| m.count_ones() as usize == q)
        .map(|m| (0..n).filter(|i| m >> i & 1 == 1).collect())
        .collect();
    out.sort();
    out
}

fn permutation_sign(seq: &[usize]) -> f64 {
    let mut sign = 1.0;
    for i in 0..seq.len() {
        for j in i + 1..seq.len() {
            if seq[i] > seq[j] {
                sign = -sign;
            }
        }
    }
    sign
}

/// Components `F_I` of `Σ F_I dx_I` over sorted coordinate sets.
#[derive(Clone)]
struct TorusField {
    degree: usize,
    comps: Vec<ScalarN>,
}

pub struct TorusModel {
    n: usize,
    action: Vec<f64>,
    /// Per degree: (mode, phase, coordinate set) of each basis slot.
    labels: Vec<Vec<(Vec<f64>, Phase, Vec<usize>)>>,
    grid: Vec<Vec<f64>>,
}

impl TorusModel {
    pub fn new(t: &TorusBackend) -> Self {
        let n = t.manifold_dim();
        let labels = (0..=n)
            .map(|q| {
                (0..t.dimension(q))
                    .map(|i| {
                        let b = t.basis_index(q, i);
                        (b.mode.iter().map(|&k| k as f64).collect(), b.phase, b.coords)
                    })
                    .collect()
            })
            .collect();
        let m = 8;
        let total = m_pow(m, n);
        let grid = (0..total)
            .map(|code| {
                (0..n)
                    .map(|i| 2.0 * std::f64::consts::PI * ((code / m_pow(m, i)) % m) as f64 / m as f64)
                    .collect()
            })
            .collect();
        Self {
            n,
            action: t.action().iter().map(|&v| v as f64).collect(),
            labels,
            grid,
        }
    }

    fn wave(mode: &[f64], phase: Phase) -> ScalarN {
        let mode = mode.to_vec();
        Rc::new(move |x: &[f64]| {
            let arg: f64 = mode.iter().zip(x).map(|(k, x)| k * x).sum();
            match phase {
                Phase::Cos => arg.cos(),
                Phase::Sin => arg.sin(),
            }
        })
    }

    fn zero_field(&self, degree: usize) -> TorusField {
        TorusField {
            degree,
            comps: (0..subsets(self.n, degree).len()).map(|_| Rc::new(|_: &[f64]| 0.0) as ScalarN).collect(),
        }
    }

    fn basis(&self, q: usize, j: usize) -> TorusField {
        let (mode, phase, coords) = &self.labels[q][j];
        let mut w = self.zero_field(q);
        let pos = subsets(self.n, q).iter().position(|s| s == coords).unwrap();
        w.comps[pos] = Self::wave(mode, *phase);
        w
    }

    fn d(&self, w: &TorusField) -> TorusField {
        let q = w.degree;
        let source = subsets(self.n, q);
        let target = subsets(self.n, q + 1);
        let comps = target
            .iter()
            .map(|set| {
                let mut terms: Vec<(f64, usize, ScalarN)> = Vec::new();
                for (p, &i) in set.iter().enumerate() {
                    let rest: Vec<usize> = set.iter().copied().filter(|&c| c != i).collect();
                    let pos = source.iter().position(|s| *s == rest).unwrap();
                    let sign = if p % 2 == 0 { 1.0 } else { -1.0 };
                    terms.push((sign, i, w.comps[pos].clone()));
                }
                Rc::new(move |x: &[f64]| {
                    terms
                        .iter()
                        .map(|(sign, i, f)| {
                            let along = |s: f64| {
                                let mut y = x.to_vec();
                                y[*i] = s;
                                f(&y)
                            };
                            sign * derivative(&along, x[*i])
                        })
                        .sum()
                }) as ScalarN
            })
            .collect();
        TorusField { degree: q + 1, comps }
    }

    fn star(&self, w: &TorusField) -> TorusField {
        let q = w.degree;
        let source = subsets(self.n, q);
        let mut out = self.zero_field(self.n - q);
        let target = subsets(self.n, self.n - q);
        for (pos, set) in source.iter().enumerate() {
            let complement: Vec<usize> = (0..self.n).filter(|c| !set.contains(c)).collect();
            let order: Vec<usize> = set.iter().chain(&complement).copied().collect();
            let sign = permutation_sign(&order);
            let f = w.comps[pos].clone();
            let tpos = target.iter().position(|s| *s == complement).unwrap();
            out.comps[tpos] = Rc::new(move |x: &[f64]| sign * f(x));
        }
        out
    }

    fn contraction(&self, w: &TorusField) -> TorusField {
        let q = w.degree;
        let source = subsets(self.n, q);
        let target = subsets(self.n, q - 1);
        let comps = target
            .iter()
            .map(|rest| {
                let mut terms: Vec<(f64, ScalarN)> = Vec::new();
                for (pos, set) in source.iter().enumerate() {
                    if !rest.iter().all(|c| set.contains(c)) {
                        continue;
                    }
                    let i = *set.iter().find(|c| !rest.contains(c)).unwrap();
                    let p = set.iter().position(|&c| c == i).unwrap();
                    let sign = if p % 2 == 0 { 1.0 } else { -1.0 };
                    terms.push((sign * self.action[i], w.comps[pos].clone()));
                }
                Rc::new(move |x: &[f64]| terms.iter().map(|(c, f)| c * f(x)).sum()) as ScalarN
            })
            .collect();
        TorusField { degree: q - 1, comps }
    }

    fn mean(&self, f: impl Fn(&[f64]) -> f64) -> f64 {
        self.grid.iter().map(|x| f(x)).sum::<f64>() / self.grid.len() as f64
    }

    fn project(&self, w: &TorusField) -> Option<DVector<f64>> {
        let q = w.degree;
        let sets = subsets(self.n, q);
        let values: Vec<Vec<f64>> = w.comps.iter().map(|f| self.grid.iter().map(|x| f(x)).collect()).collect();
        let mut rebuilt = vec![vec![0.0; self.grid.len()]; sets.len()];
        let mut c = DVector::zeros(self.labels[q].len());
        for (j, (mode, phase, coords)) in self.labels[q].iter().enumerate() {
            let pos = sets.iter().position(|s| s == coords).unwrap();
            let wave = Self::wave(mode, *phase);
            let samples: Vec<f64> = self.grid.iter().map(|x| wave(x)).collect();
            let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
            c[j] = dot(&values[pos], &samples) / dot(&samples, &samples);
            for (r, s) in rebuilt[pos].iter_mut().zip(&samples) {
                *r += c[j] * s;
            }
        }
        // the fit must reproduce every component on the grid
        let residual = rebuilt
            .iter()
            .flatten()
            .zip(values.iter().flatten())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        (residual <= FIT_TOLERANCE).then_some(c)
    }

    /// `Σ_I ∫ F_I G_I` over `[0, 2π]^n`, in units of `π^n`.
    fn inner(&self, a: &TorusField, b: &TorusField) -> f64 {
        let volume = 2f64.powi(self.n as i32);
        (0..a.comps.len())
            .map(|i| volume * self.mean(|x| a.comps[i](x) * b.comps[i](x)))
            .sum()
    }

    pub fn assemble(&self) -> Assembled {
        let n = self.n;
        let dim = |q: usize| self.labels[q].len();
        let mut out = Assembled {
            n,
            d: Vec::new(),
            star: Vec::new(),
            contraction: Vec::new(),
            gram: Vec::new(),
        };
        for q in 0..=n {
            let basis: Vec<TorusField> = (0..dim(q)).map(|j| self.basis(q, j)).collect();
            let d_cols = basis
                .iter()
                .map(|w| if q < n { self.project(&self.d(w)) } else { Some(DVector::zeros(0)) })
                .collect();
            out.d.push(full(if q < n { dim(q + 1) } else { 0 }, d_cols, "d"));
            let star_cols = basis.iter().map(|w| self.project(&self.star(w))).collect();
            out.star.push(full(dim(n - q), star_cols, "star"));
            out.contraction.push(
                basis
                    .iter()
                    .map(|w| if q > 0 { self.project(&self.contraction(w)) } else { None })
                    .collect(),
            );
            out.gram.push(DMatrix::from_fn(basis.len(), basis.len(), |i, j| self.inner(&basis[i], &basis[j])));
        }
        out
    }
}

fn m_pow(m: usize, e: usize) -> usize {
    m.pow(e as u32)
}

// ---------------------------------------------------------------- derived operators

pub trait Model {
    fn assemble(&self) -> Assembled;
}

impl Model for SphereModel {
    fn assemble(&self) -> Assembled {
        SphereModel::assemble(self)
    }
}

impl Model for TorusModel {
    fn assemble(&self) -> Assembled {
        TorusModel::assemble(self)
    }
}

struct Derived {
    codifferential: Vec<DMatrix<f64>>,
    laplacian: Vec<DMatrix<f64>>,
    harmonic: Vec<DMatrix<f64>>,
    green: Vec<DMatrix<f64>>,
}

fn derive(a: &Assembled) -> Derived {
    let n = a.n;
    let dim = |q: usize| a.gram[q].nrows();
    // d*_q = M_{q-1}^{-1} d_{q-1}^T M_q, the adjoint of d in the quadrature inner products
    let codifferential: Vec<DMatrix<f64>> = (0..=n)
        .map(|q| {
            if q == 0 {
                DMatrix::zeros(0, dim(0))
            } else {
                let inv = a.gram[q - 1].clone().try_inverse().expect("Gram matrix invertible");
                inv * a.d[q - 1].transpose() * &a.gram[q]
            }
        })
        .collect();
    let laplacian: Vec<DMatrix<f64>> = (0..=n)
        .map(|q| {
            let mut l = DMatrix::zeros(dim(q), dim(q));
            if q > 0 {
                l += &a.d[q - 1] * &codifferential[q];
            }
            if q < n {
                l += &codifferential[q + 1] * &a.d[q];
            }
            l
        })
        .collect();
    let harmonic: Vec<DMatrix<f64>> = (0..=n)
        .map(|q| {
            let svd = laplacian[q].clone().svd(false, true);
            let v_t = svd.v_t.expect("right singular vectors");
            let scale = 1.0 + laplacian[q].amax();
            let kernel: Vec<DVector<f64>> = (0..svd.singular_values.len())
                .filter(|&i| svd.singular_values[i] < 1e-8 * scale)
                .map(|i| v_t.row(i).transpose())
                .collect();
            if kernel.is_empty() {
                return DMatrix::zeros(dim(q), dim(q));
            }
            let k = DMatrix::from_columns(&kernel);
            let m = &a.gram[q];
            let small = (k.transpose() * m * &k).try_inverse().expect("kernel Gram invertible");
            &k * small * k.transpose() * m
        })
        .collect();
    let green = (0..=n)
        .map(|q| {
            let id = DMatrix::identity(dim(q), dim(q));
            let shifted = (&laplacian[q] + &harmonic[q]).try_inverse().expect("Δ + H invertible");
            shifted * (id - &harmonic[q])
        })
        .collect();
    Derived {
        codifferential,
        laplacian,
        harmonic,
        green,
    }
}

fn to_f64(v: &[Rational]) -> DVector<f64> {
    DVector::from_iterator(v.len(), v.iter().map(|x| x.to_f64()))
}

fn library_matrix(
    rows: usize,
    cols: usize,
    mut column: impl FnMut(&[Rational]) -> equihodge::Result<Vec<Rational>>,
) -> Vec<Option<DVector<f64>>> {
    (0..cols)
        .map(|j| {
            let mut e = vec![Rational::zero(); cols];
            e[j] = Rational::from_i64(1);
            column(&e).ok().map(|c| {
                assert_eq!(c.len(), rows);
                to_f64(&c)
            })
        })
        .collect()
}

fn agree(name: &str, q: usize, library: &[Option<DVector<f64>>], oracle: &[Option<DVector<f64>>]) -> Result<(), String> {
    if library.len() != oracle.len() {
        return Err(format!("{name} on degree {q}: {} columns vs {}", library.len(), oracle.len()));
    }
    let scale = 1.0 + oracle.iter().flatten().map(|c| c.amax()).fold(0.0, f64::max);
    for (j, (lib, ora)) in library.iter().zip(oracle).enumerate() {
        match (lib, ora) {
            (Some(l), Some(o)) => {
                let diff = (l - o).amax();
                if diff > 1e-6 * scale {
                    return Err(format!("{name} on degree {q}, column {j}: off by {diff:e}\nlibrary {l}\noracle {o}"));
                }
            }
            (None, None) => {}
            (l, _) => {
                return Err(format!(
                    "{name} on degree {q}, column {j}: library {} the truncation, oracle disagrees",
                    if l.is_some() { "stays inside" } else { "leaves" }
                ))
            }
        }
    }
    Ok(())
}

fn columns(m: &DMatrix<f64>) -> Vec<Option<DVector<f64>>> {
    (0..m.ncols()).map(|j| Some(m.column(j).into_owned())).collect()
}

/// Compares d, star, d*, Δ, H, G, i_V and P of `backend` with the oracle;
/// returns the number of matrices compared.
pub fn compare<B>(backend: &B, model: &dyn Model) -> Result<usize, String>
where
    B: DeRhamBackend<Scalar = Rational>,
{
    let spec = backend.spec();
    let a = model.assemble();
    let derived = derive(&a);
    let n = a.n;
    let dim = |q: usize| backend.dimension(q);
    let cartan = Cartan::new(backend);
    let t = Monomial::generator(1, 0);
    let mut count = 0;
    let mut check = |name: &str, q: usize, lib: Vec<Option<DVector<f64>>>, ora: Vec<Option<DVector<f64>>>| {
        count += 1;
        agree(name, q, &lib, &ora).map_err(|e| format!("{spec}: {e}"))
    };
    for q in 0..=n {
        if q < n {
            check("d", q, library_matrix(dim(q + 1), dim(q), |x| backend.apply_d(q, x)), columns(&a.d[q]))?;
        }
        check("star", q, library_matrix(dim(n - q), dim(q), |x| backend.apply_star(q, x)), columns(&a.star[q]))?;
        if q > 0 {
            check(
                "d*",
                q,
                library_matrix(dim(q - 1), dim(q), |x| backend.apply_codifferential(q, x)),
                columns(&derived.codifferential[q]),
            )?;
            check(
                "i_V",
                q,
                library_matrix(dim(q - 1), dim(q), |x| backend.apply_contraction(0, q, x)),
                a.contraction[q].clone(),
            )?;
        }
        check(
            "Δ",
            q,
            library_matrix(dim(q), dim(q), |x| Ok(backend.laplacian(&backend.form(q as i32, x.to_vec())?)?.into_coeffs())),
            columns(&derived.laplacian[q]),
        )?;
        check(
            "H",
            q,
            library_matrix(dim(q), dim(q), |x| backend.harmonic_projection(q, x)),
            columns(&derived.harmonic[q]),
        )?;
        check("G", q, library_matrix(dim(q), dim(q), |x| backend.apply_green(q, x)), columns(&derived.green[q]))?;
        if q >= 1 {
            // P on a q-form: the t-coefficient d*G(i_V α), a (q-2)-form
            let oracle_p: Vec<Option<DVector<f64>>> = a.contraction[q]
                .iter()
                .map(|c| {
                    c.as_ref().map(|c| {
                        if q >= 2 {
                            &derived.codifferential[q - 1] * (&derived.green[q - 1] * c)
                        } else {
                            DVector::zeros(0)
                        }
                    })
                })
                .collect();
            let target = if q >= 2 { dim(q - 2) } else { 0 };
            let library_p = library_matrix(target, dim(q), |x| {
                let element = cartan.element(backend.form(q as i32, x.to_vec())?)?;
                let p = cartan.p_operator(&element)?;
                Ok(match p.get(&t) {
                    Some(f) => f.coeffs().to_vec(),
                    None => vec![Rational::zero(); target],
                })
            });
            check("P", q, library_p, oracle_p)?;
        }
    }
    Ok(count)
}

/// Convenience for tests that want the oracle on one sphere.
pub fn sphere_agrees(truncation: usize) -> Result<usize, String> {
    compare(&SphereBackend::new(truncation).unwrap(), &SphereModel::new(truncation))
}
