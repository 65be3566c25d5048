//! Shared fixtures for the integration tests and the acceptance runner.
//!
//! Every `acN` function checks one acceptance criterion and returns a short
//! detail line on success or a description of the first violation.

#![allow(dead_code)]

pub mod oracle;

use std::sync::Arc;
use std::time::{Duration, Instant};

use equihodge::backend::torus::Phase;
use equihodge::linalg::Matrix;
use equihodge::scalar::q;
use equihodge::scenario::convergence_study;
use equihodge::{
    BackendSpec, Cartan, DeRhamBackend, EquivariantElement, Error, HodgeEngine, InvariantForm, Monomial, ProductBackend,
    Rational, Scalar, SphereBackend, TorusBackend,
};
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Check = Result<String, String>;
pub type Exact = dyn DeRhamBackend<Scalar = Rational>;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_rational(rng: &mut impl Rng) -> Rational {
    q(rng.gen_range(-4..=4), rng.gen_range(1..=3))
}

/// Random polynomial with `len` coefficients (z-degree < len).
pub fn random_poly(rng: &mut impl Rng, len: usize) -> Vec<Rational> {
    (0..len).map(|_| random_rational(rng)).collect()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err(e: Error) -> String {
    e.to_string()
}

pub fn same<S: Scalar>(a: &EquivariantElement<S>, b: &EquivariantElement<S>) -> bool {
    a.sub(b).map(|d| d.is_zero()).unwrap_or(false)
}

// ---------------------------------------------------------------- sphere

pub fn omega(s: &SphereBackend) -> InvariantForm<Rational> {
    s.form(2, s.two_form(&[q(1, 1)]).unwrap()).unwrap()
}

pub fn height(s: &SphereBackend) -> InvariantForm<Rational> {
    s.form(0, s.function(&[q(0, 1), q(1, 1)]).unwrap()).unwrap()
}

/// Random sphere form of the given degree whose z-degree is at most
/// `max_degree` and whose contraction stays inside the truncation.
pub fn random_sphere_form(rng: &mut impl Rng, s: &SphereBackend, degree: usize, max_degree: usize) -> InvariantForm<Rational> {
    let n = s.truncation();
    let coeffs = match degree {
        0 => s.function(&random_poly(rng, (max_degree + 1).min(n + 1))).unwrap(),
        1 => s
            .one_form(
                &random_poly(rng, (max_degree + 1).min(n)),
                &random_poly(rng, (max_degree.saturating_sub(1)).min(n.saturating_sub(1))),
            )
            .unwrap(),
        _ => s.two_form(&random_poly(rng, (max_degree + 1).min(n))).unwrap(),
    };
    s.form(degree as i32, coeffs).unwrap()
}

/// Random closed sphere form: a constant, an exact `df`, or any 2-form.
pub fn random_closed_sphere_form(rng: &mut impl Rng, s: &SphereBackend, degree: usize, max_degree: usize) -> InvariantForm<Rational> {
    match degree {
        0 => s.form(0, s.function(&[random_rational(rng)]).unwrap()).unwrap(),
        1 => {
            let f = s.form(0, s.function(&random_poly(rng, (max_degree + 2).min(s.truncation() + 1))).unwrap()).unwrap();
            s.d(&f).unwrap()
        }
        _ => random_sphere_form(rng, s, 2, max_degree),
    }
}

// ---------------------------------------------------------------- product

pub struct SpherePair {
    pub first: Arc<SphereBackend>,
    pub second: Arc<SphereBackend>,
    pub product: ProductBackend,
}

pub fn sphere_pair(truncation: usize) -> SpherePair {
    let first = Arc::new(SphereBackend::new(truncation).unwrap());
    let second = Arc::new(SphereBackend::new(truncation).unwrap());
    let product = ProductBackend::new(first.clone(), second.clone()).unwrap();
    SpherePair { first, second, product }
}

impl SpherePair {
    pub fn tensor(&self, a: &InvariantForm<Rational>, b: &InvariantForm<Rational>) -> InvariantForm<Rational> {
        let (p, r) = (a.degree() as usize, b.degree() as usize);
        let coeffs = self.product.tensor(p, a.coeffs(), r, b.coeffs()).unwrap();
        self.product.form((p + r) as i32, coeffs).unwrap()
    }

    /// `ω₁∧ω₂`.
    pub fn volume(&self) -> InvariantForm<Rational> {
        self.tensor(&omega(&self.first), &omega(&self.second))
    }

    /// Random closed form of degree `q` with factor z-degrees at most `max_degree`:
    /// closed pure tensors plus an exact part.
    pub fn random_closed(&self, rng: &mut impl Rng, q: usize, max_degree: usize) -> InvariantForm<Rational> {
        let mut total = self.product.zero_form(q as i32);
        for p in q.saturating_sub(2)..=q.min(2) {
            let a = random_closed_sphere_form(rng, &self.first, p, max_degree);
            let b = random_closed_sphere_form(rng, &self.second, q - p, max_degree);
            total = total.add(&self.tensor(&a, &b)).unwrap();
        }
        if q > 0 {
            let beta = self.random_form(rng, q - 1, max_degree);
            total = total.add(&self.product.d(&beta).unwrap()).unwrap();
        }
        total
    }

    pub fn random_form(&self, rng: &mut impl Rng, q: usize, max_degree: usize) -> InvariantForm<Rational> {
        let mut total = self.product.zero_form(q as i32);
        for p in q.saturating_sub(2)..=q.min(2) {
            let a = random_sphere_form(rng, &self.first, p, max_degree);
            let b = random_sphere_form(rng, &self.second, q - p, max_degree);
            total = total.add(&self.tensor(&a, &b)).unwrap();
        }
        total
    }
}

// ---------------------------------------------------------------- torus

pub fn torus_free() -> TorusBackend {
    TorusBackend::new(2, 2, &[1, 0]).unwrap()
}

pub fn torus_form(t: &TorusBackend, mode: &[i64], phase: Phase, coords: &[usize]) -> InvariantForm<Rational> {
    t.form(coords.len() as i32, t.basis_form(mode, phase, coords).unwrap()).unwrap()
}

pub fn random_form(rng: &mut impl Rng, backend: &Exact, degree: usize) -> InvariantForm<Rational> {
    let dim = backend.dimension(degree);
    let coeffs = (0..dim)
        .map(|_| if rng.gen_bool(0.4) { random_rational(rng) } else { Rational::zero() })
        .collect();
    backend.form(degree as i32, coeffs).unwrap()
}

// ---------------------------------------------------------------- matrices

/// Exact operator matrices of one backend, indexed by source degree.
pub struct OperatorMatrices {
    pub n: usize,
    pub d: Vec<Matrix<Rational>>,
    pub codifferential: Vec<Matrix<Rational>>,
    pub laplacian: Vec<Matrix<Rational>>,
    pub green: Vec<Matrix<Rational>>,
    pub harmonic: Vec<Matrix<Rational>>,
    pub star: Vec<Matrix<Rational>>,
    pub gram: Vec<Matrix<Rational>>,
}

fn matrix_of(rows: usize, cols: usize, f: impl FnMut(&[Rational]) -> equihodge::Result<Vec<Rational>>) -> Result<Matrix<Rational>, String> {
    Matrix::from_operator(rows, cols, f).map_err(err)
}

impl OperatorMatrices {
    pub fn build(b: &Exact) -> Result<Self, String> {
        let n = b.manifold_dim();
        let dim = |q: i64| if q < 0 || q as usize > n { 0 } else { b.dimension(q as usize) };
        let mut m = OperatorMatrices {
            n,
            d: Vec::new(),
            codifferential: Vec::new(),
            laplacian: Vec::new(),
            green: Vec::new(),
            harmonic: Vec::new(),
            star: Vec::new(),
            gram: Vec::new(),
        };
        for q in 0..=n {
            let qi = q as i64;
            m.d.push(if q < n {
                matrix_of(dim(qi + 1), dim(qi), |x| b.apply_d(q, x))?
            } else {
                Matrix::zeros(0, dim(qi))
            });
            m.codifferential.push(if q > 0 {
                matrix_of(dim(qi - 1), dim(qi), |x| b.apply_codifferential(q, x))?
            } else {
                Matrix::zeros(0, dim(0))
            });
            m.laplacian.push(matrix_of(dim(qi), dim(qi), |x| {
                Ok(b.laplacian(&b.form(q as i32, x.to_vec())?)?.into_coeffs())
            })?);
            m.green.push(matrix_of(dim(qi), dim(qi), |x| b.apply_green(q, x))?);
            m.harmonic.push(matrix_of(dim(qi), dim(qi), |x| b.harmonic_projection(q, x))?);
            m.star.push(matrix_of(dim(n as i64 - qi), dim(qi), |x| b.apply_star(q, x))?);
            m.gram.push(matrix_of(dim(qi), dim(qi), |x| {
                Ok((0..dim(qi))
                    .map(|i| {
                        let mut e = vec![Rational::zero(); dim(qi)];
                        e[i] = Rational::from_i64(1);
                        b.inner_product(q, &e, x)
                    })
                    .collect())
            })?);
        }
        Ok(m)
    }
}

/// Exhaustive exact Hodge identities on one backend.
pub fn hodge_identities(b: &Exact) -> Result<(), String> {
    let m = OperatorMatrices::build(b)?;
    let n = m.n;
    let spec = b.spec();
    for q in 0..=n {
        let id = Matrix::identity(b.dimension(q));
        if q + 1 < n {
            ensure(m.d[q + 1].matmul(&m.d[q]).is_zero(), || format!("{spec}: d∘d ≠ 0 on degree {q}"))?;
        }
        if q >= 2 {
            ensure(m.codifferential[q - 1].matmul(&m.codifferential[q]).is_zero(), || {
                format!("{spec}: d*∘d* ≠ 0 on degree {q}")
            })?;
        }
        let mut lap = Matrix::zeros(b.dimension(q), b.dimension(q));
        if q > 0 {
            lap = lap.add(&m.d[q - 1].matmul(&m.codifferential[q]));
        }
        if q < n {
            lap = lap.add(&m.codifferential[q + 1].matmul(&m.d[q]));
            // <d a, c> = <a, d* c> for every basis pair
            let lhs = m.d[q].transpose().matmul(&m.gram[q + 1]);
            let rhs = m.gram[q].matmul(&m.codifferential[q + 1]);
            ensure(lhs == rhs, || format!("{spec}: d and d* are not adjoint on degree {q}"))?;
        }
        ensure(lap == m.laplacian[q], || format!("{spec}: Δ ≠ dd* + d*d on degree {q}"))?;
        ensure(m.laplacian[q].matmul(&m.green[q]) == id.sub(&m.harmonic[q]), || {
            format!("{spec}: ΔG ≠ I - H on degree {q}")
        })?;
        ensure(m.green[q].matmul(&m.harmonic[q]).is_zero(), || format!("{spec}: GH ≠ 0 on degree {q}"))?;
        ensure(m.harmonic[q].matmul(&m.green[q]).is_zero(), || format!("{spec}: HG ≠ 0 on degree {q}"))?;
        if q < n {
            ensure(m.green[q + 1].matmul(&m.d[q]) == m.d[q].matmul(&m.green[q]), || {
                format!("{spec}: Gd ≠ dG on degree {q}")
            })?;
        }
        if q > 0 {
            ensure(
                m.green[q - 1].matmul(&m.codifferential[q]) == m.codifferential[q].matmul(&m.green[q]),
                || format!("{spec}: Gd* ≠ d*G on degree {q}"),
            )?;
        }
        let sign = if (q * (n - q)) % 2 == 0 { 1 } else { -1 };
        ensure(m.star[n - q].matmul(&m.star[q]) == id.scale(&Rational::from_i64(sign)), || {
            format!("{spec}: ** ≠ {sign} on degree {q}")
        })?;
        let betti = match &spec {
            BackendSpec::Sphere { .. } => [1, 0, 1][q],
            _ => binomial(n, q),
        };
        ensure(b.harmonic_basis(q).len() == betti, || format!("{spec}: harmonic dimension in degree {q} is not {betti}"))?;
        for h in b.harmonic_basis(q) {
            ensure(m.laplacian[q].mul_vec(&h).iter().all(Zero::is_zero), || {
                format!("{spec}: declared harmonic form of degree {q} is not in ker Δ")
            })?;
        }
    }
    Ok(())
}

// ---------------------------------------------------------------- criteria

fn timed(limit: Duration, start: Instant, detail: String) -> Check {
    let elapsed = start.elapsed();
    if elapsed > limit {
        Err(format!("{detail}; took {elapsed:.2?}, limit {limit:?}"))
    } else {
        Ok(format!("{detail} in {elapsed:.2?}"))
    }
}

/// Rotation of the sphere: two terms `ω, -t·z`, zero residual, `μ = -z`.
pub fn ac1() -> Check {
    let start = Instant::now();
    let s = SphereBackend::new(4).map_err(err)?;
    let cartan = Cartan::new(&s);
    let w = omega(&s);
    let report = cartan.extend(&w).map_err(err)?;
    let minus_z = height(&s).neg();
    let t = Monomial::generator(1, 0);
    let expected = vec![
        cartan.element(w.clone()).map_err(err)?,
        cartan.element_from_terms(2, [(t, minus_z.clone())]).map_err(err)?,
    ];
    ensure(report.terms.len() == 2, || format!("expected 2 terms, got {}", report.terms.len()))?;
    for (i, (got, want)) in report.terms.iter().zip(&expected).enumerate() {
        ensure(same(got, want), || format!("term {i} is {}", got.describe(cartan.generators())))?;
    }
    let residual = cartan.verify_extension(&report).map_err(err)?;
    ensure(residual.squared.is_zero(), || format!("verify_extension = {}", residual.value()))?;
    let mu = cartan.moment_map(&w).map_err(err)?;
    ensure(mu == minus_z, || format!("moment map is {:?}", mu.coeffs()))?;
    let harmonic = s.harmonic_part(&mu).map_err(err)?;
    ensure(harmonic.is_zero(), || "moment map has a nonzero average".into())?;
    timed(Duration::from_secs(1), start, "terms [ω, -t·z], residual 0, μ = -z".into())
}

fn check_extension_closed(cartan: &Cartan<'_, Exact>, alpha: &InvariantForm<Rational>, label: &str) -> Result<(), String> {
    let report = cartan.extend(alpha).map_err(|e| format!("{label}: {e}"))?;
    let total = report.sum().map_err(err)?;
    let closure = cartan.cartan_d(&total).map_err(err)?;
    ensure(closure.is_zero(), || format!("{label}: d_G α̂ ≠ 0"))?;
    let verified = cartan.verify_extension(&report).map_err(err)?;
    ensure(verified.squared.is_zero(), || format!("{label}: verify_extension ≠ 0"))?;
    ensure(total.constant_part() == Some(alpha) || alpha.is_zero(), || {
        format!("{label}: t-free part of α̂ differs from the input")
    })?;
    Ok(())
}

/// Random closed forms extend with `d_G α̂ = 0` exactly.
pub fn ac2() -> Check {
    let start = Instant::now();
    let mut rng = rng(2);
    let sphere = SphereBackend::new(SphereBackend::truncation_for_extension(8)).map_err(err)?;
    let sphere_cartan = Cartan::new(&sphere as &Exact);
    let mut count = 0;
    for i in 0..40 {
        let degree = [2, 2, 2, 1, 0][i % 5];
        let alpha = random_closed_sphere_form(&mut rng, &sphere, degree, 8);
        check_extension_closed(&sphere_cartan, &alpha, &format!("sphere form #{i}"))?;
        count += 1;
    }
    let pair = sphere_pair(6);
    let product_cartan = Cartan::new(&pair.product as &Exact);
    for i in 0..20 {
        let degree = [4, 3, 2, 2, 1][i % 5];
        let alpha = pair.random_closed(&mut rng, degree, 4);
        check_extension_closed(&product_cartan, &alpha, &format!("product form #{i}"))?;
        count += 1;
    }
    timed(Duration::from_secs(30), start, format!("{count} random closed forms closed exactly"))
}

pub fn hodge_backends() -> Vec<Box<Exact>> {
    let mut out: Vec<Box<Exact>> = Vec::new();
    for n in 2..=6 {
        out.push(Box::new(SphereBackend::new(n).unwrap()));
    }
    for (dim, k, v) in [
        (1, 6, vec![1]),
        (2, 3, vec![1, 0]),
        (2, 3, vec![1, 1]),
        (2, 6, vec![1, 2]),
        (3, 2, vec![0, 0, 1]),
        (3, 2, vec![1, -1, 0]),
    ] {
        out.push(Box::new(TorusBackend::new(dim, k, &v).unwrap()));
    }
    out
}

/// Exact Hodge identities on torus and sphere backends at truncation ≤ 6.
pub fn ac3() -> Check {
    let backends = hodge_backends();
    for b in &backends {
        hodge_identities(b.as_ref())?;
    }
    Ok(format!("all identities exact on {} backends", backends.len()))
}

/// Legendre eigenfunctions on the sphere, Fourier modes on the torus.
pub fn ac4() -> Check {
    let s = SphereBackend::new(6).map_err(err)?;
    for l in 1..=6usize {
        let eigen = Rational::from_i64((l * (l + 1)) as i64);
        for degree in [0, 2] {
            let p = s.form(degree, s.legendre(l)).map_err(err)?;
            ensure(s.laplacian(&p).map_err(err)? == p.scale(&eigen), || format!("ΔP_{l} ≠ {eigen}P_{l}"))?;
            let inverse = Rational::from_i64(1) / eigen.clone();
            ensure(s.green(&p).map_err(err)? == p.scale(&inverse), || format!("GP_{l} ≠ P_{l}/{eigen}"))?;
        }
    }
    let mut checked = 0;
    for (dim, v) in [(2, vec![0, 1]), (3, vec![0, 0, 1])] {
        let t = TorusBackend::new(dim, 5, &v).map_err(err)?;
        for degree in 0..=dim {
            for index in 0..t.dimension(degree) {
                let basis = t.basis_index(degree, index);
                let k2: i64 = basis.mode.iter().map(|c| c * c).sum();
                if k2 > 25 {
                    continue;
                }
                let mut coeffs = vec![Rational::zero(); t.dimension(degree)];
                coeffs[index] = Rational::from_i64(1);
                let form = t.form(degree as i32, coeffs).map_err(err)?;
                ensure(t.laplacian(&form).map_err(err)? == form.scale(&Rational::from_i64(k2)), || {
                    format!("Δ on mode {:?} is not |k|² = {k2}", basis.mode)
                })?;
                checked += 1;
            }
        }
    }
    Ok(format!("P_1..P_6 and {checked} torus basis forms with |k| ≤ 5"))
}

fn termination_case(cartan: &Cartan<'_, Exact>, alpha: &InvariantForm<Rational>, label: &str) -> Result<(), String> {
    let q = alpha.degree() as usize;
    let mut x = cartan.element(alpha.clone()).map_err(err)?;
    for m in 1..=q + 2 {
        x = cartan.p_operator(&x).map_err(|e| format!("{label}: {e}"))?;
        if 2 * m > q {
            ensure(x.is_zero(), || format!("{label}: P^{m} α ≠ 0 for a {q}-form"))?;
        }
    }
    if cartan.backend().norm(&cartan.backend().d(alpha).map_err(err)?).map_err(err)?.squared.is_zero() {
        let report = cartan.extension_report(alpha).map_err(err)?;
        ensure(report.terminated_at_stage <= q / 2 + 1 && report.terms.len() <= q / 2 + 1, || {
            format!(
                "{label}: loop ran to stage {} with {} terms for a {q}-form",
                report.terminated_at_stage,
                report.terms.len()
            )
        })?;
    }
    Ok(())
}

/// `P^m α = 0` for `2m > q` and the loop stops by stage `⌊q/2⌋ + 1`.
pub fn ac5() -> Check {
    let mut rng = rng(5);
    let mut count = 0;
    let sphere = SphereBackend::new(6).map_err(err)?;
    let c = Cartan::new(&sphere as &Exact);
    for i in 0..30 {
        let degree = i % 3;
        let alpha = if i % 2 == 0 {
            random_sphere_form(&mut rng, &sphere, degree, 4)
        } else {
            random_closed_sphere_form(&mut rng, &sphere, degree, 4)
        };
        termination_case(&c, &alpha, &format!("sphere #{i}"))?;
        count += 1;
    }
    for t in [TorusBackend::new(2, 2, &[1, 0]).unwrap(), TorusBackend::new(3, 1, &[1, 1, 0]).unwrap()] {
        let c = Cartan::new(&t as &Exact);
        for i in 0..20 {
            let degree = i % (t.manifold_dim() + 1);
            let alpha = random_form(&mut rng, &t, degree);
            termination_case(&c, &alpha, &format!("{} #{i}", t.spec()))?;
            count += 1;
        }
    }
    let pair = sphere_pair(5);
    let c = Cartan::new(&pair.product as &Exact);
    for i in 0..15 {
        let degree = i % 5;
        let alpha = if i % 2 == 0 {
            pair.random_form(&mut rng, degree, 2)
        } else {
            pair.random_closed(&mut rng, degree, 2)
        };
        termination_case(&c, &alpha, &format!("product #{i}"))?;
        count += 1;
    }
    Ok(format!("{count} forms on sphere, torus and product backends"))
}

/// Random homogeneous element `Σ t^a ⊗ form` of the given total degree.
pub fn random_element(
    rng: &mut impl Rng,
    cartan: &Cartan<'_, Exact>,
    total_degree: usize,
    mut form: impl FnMut(&mut ChaCha8Rng, usize) -> InvariantForm<Rational>,
) -> EquivariantElement<Rational> {
    let rank = cartan.generators().rank();
    let n = cartan.backend().manifold_dim();
    let mut inner = ChaCha8Rng::seed_from_u64(rng.gen());
    let choices: Vec<usize> = (0..=n.min(total_degree))
        .filter(|q| (total_degree - q) % 2 == 0)
        .collect();
    let mut x = cartan
        .element_from_terms(total_degree as i32, Vec::<(Monomial, InvariantForm<Rational>)>::new())
        .unwrap();
    for _ in 0..3 {
        let Some(&form_degree) = choices.get(inner.gen_range(0..choices.len().max(1))) else {
            break;
        };
        let mut exponents = vec![0u32; rank];
        for _ in 0..(total_degree - form_degree) / 2 {
            exponents[inner.gen_range(0..rank)] += 1;
        }
        let f = form(&mut inner, form_degree);
        let term = cartan
            .element_from_terms(total_degree as i32, [(Monomial::from_exponents(exponents), f)])
            .unwrap();
        x = x.add(&term).unwrap();
    }
    x
}

fn p_after_boundary(cartan: &Cartan<'_, Exact>, x: &EquivariantElement<Rational>, label: &str) -> Result<(), String> {
    let boundary = cartan.partial_d(x).map_err(|e| format!("{label}: {e}"))?;
    let p = cartan.p_operator(&boundary).map_err(|e| format!("{label}: {e}"))?;
    ensure(p.is_zero(), || format!("{label}: P∂x ≠ 0"))
}

/// `P∂x = 0` for random homogeneous elements on every exact backend.
pub fn ac6() -> Check {
    let mut rng = rng(6);
    let per_backend = 25;
    let sphere = SphereBackend::new(6).map_err(err)?;
    let c = Cartan::new(&sphere as &Exact);
    for i in 0..per_backend {
        let x = random_element(&mut rng, &c, i % 7, |r, q| random_sphere_form(r, &sphere, q, 4));
        p_after_boundary(&c, &x, &format!("sphere #{i}"))?;
    }
    let tori = [TorusBackend::new(2, 2, &[1, 0]).unwrap(), TorusBackend::new(3, 1, &[1, 1, 0]).unwrap()];
    for t in &tori {
        let c = Cartan::new(t as &Exact);
        for i in 0..per_backend {
            let x = random_element(&mut rng, &c, i % 7, |r, q| random_form(r, t, q));
            p_after_boundary(&c, &x, &format!("{} #{i}", t.spec()))?;
        }
    }
    let pair = sphere_pair(5);
    let c = Cartan::new(&pair.product as &Exact);
    for i in 0..per_backend {
        let x = random_element(&mut rng, &c, i % 9, |r, q| pair.random_form(r, q, 2));
        p_after_boundary(&c, &x, &format!("product #{i}"))?;
    }
    Ok(format!("{per_backend} random elements on each of 4 exact backends"))
}

/// Free rotation of the torus: both dx∧dy and dx are obstructed at stage 0.
pub fn ac7() -> Check {
    let t = torus_free();
    let c = Cartan::new(&t);
    let mut details = Vec::new();
    for (name, coords) in [("dx∧dy", vec![0, 1]), ("dx", vec![0])] {
        let alpha = torus_form(&t, &[0, 0], Phase::Cos, &coords);
        match c.extend(&alpha) {
            Err(Error::ObstructionDetected { stage: 0, residual }) if residual > 0.0 => {
                details.push(format!("{name} at stage 0 (residual {residual:.4})"));
            }
            other => return Err(format!("extend({name}) gave {other:?}")),
        }
        let report = c.extension_report(&alpha).map_err(err)?;
        ensure(report.terms.len() == 1, || format!("{name}: obstructed report carries projected terms"))?;
    }
    Ok(format!("obstructed: {}", details.join(", ")))
}

/// `ω₁∧ω₂` on S²×S² extends with a nonzero `t₁t₂` coefficient.
pub fn ac8() -> Check {
    let pair = sphere_pair(3);
    let c = Cartan::new(&pair.product);
    let report = c.extend(&pair.volume()).map_err(err)?;
    let residual = c.verify_extension(&report).map_err(err)?;
    ensure(residual.squared.is_zero(), || format!("verify_extension = {}", residual.value()))?;
    ensure(report.terminated_at_stage <= 3, || format!("terminated at stage {}", report.terminated_at_stage))?;
    let total = report.sum().map_err(err)?;
    let mixed = total.get(&Monomial::from_exponents(vec![1, 1]));
    ensure(mixed.is_some_and(|f| !f.is_zero()), || "t₁t₂ coefficient is zero".into())?;
    Ok(format!(
        "terminated at stage {}, t₁t₂ coefficient nonzero",
        report.terminated_at_stage
    ))
}

fn continuation_case(cartan: &Cartan<'_, Exact>, alpha: &InvariantForm<Rational>, label: &str) -> Result<usize, String> {
    let report = cartan.extend(alpha).map_err(|e| format!("{label}: {e}"))?;
    for m in 0..report.terms.len() {
        let next = cartan
            .extend_partial(&report.terms[..=m], m)
            .map_err(|e| format!("{label}: {e}"))?;
        let lhs = cartan.exterior_d(&next).map_err(err)?;
        let rhs = cartan.partial_d(&report.terms[m]).map_err(err)?;
        ensure(same(&lhs, &rhs), || format!("{label}: d(a_{}) ≠ ∂(a_{m})", m + 1))?;
    }
    let mut terms = vec![cartan.element(alpha.clone()).map_err(err)?];
    loop {
        let m = terms.len() - 1;
        let next = cartan.extend_partial(&terms, m).map_err(|e| format!("{label}: {e}"))?;
        if next.is_zero() {
            break;
        }
        terms.push(next);
        ensure(terms.len() <= report.terms.len(), || format!("{label}: continuation overruns the extension"))?;
    }
    ensure(terms.len() == report.terms.len(), || {
        format!("{label}: continuation gave {} terms, extension {}", terms.len(), report.terms.len())
    })?;
    for (i, (a, b)) in terms.iter().zip(&report.terms).enumerate() {
        ensure(same(a, b), || format!("{label}: continued term {i} differs"))?;
    }
    Ok(terms.len())
}

/// Partial extensions continue correctly and reproduce the full extension.
pub fn ac9() -> Check {
    let mut rng = rng(9);
    let sphere = SphereBackend::new(6).map_err(err)?;
    let c = Cartan::new(&sphere as &Exact);
    continuation_case(&c, &omega(&sphere), "sphere ω")?;
    for i in 0..5 {
        let alpha = random_closed_sphere_form(&mut rng, &sphere, 2, 5);
        continuation_case(&c, &alpha, &format!("sphere #{i}"))?;
    }
    let pair = sphere_pair(4);
    let c = Cartan::new(&pair.product as &Exact);
    let longest = continuation_case(&c, &pair.volume(), "ω₁∧ω₂")?;
    for i in 0..3 {
        let alpha = pair.random_closed(&mut rng, 4, 2);
        continuation_case(&c, &alpha, &format!("product #{i}"))?;
    }
    Ok(format!("prefixes continue exactly; ω₁∧ω₂ rebuilt from {longest} terms"))
}

/// Levels used for the DEC convergence study.
pub const DEC_LEVELS: [usize; 4] = [0, 1, 2, 3];

/// DEC extension residual and moment map error under refinement.
pub fn ac10() -> Check {
    let start = Instant::now();
    let rows = convergence_study(8, &DEC_LEVELS, None).map_err(err)?;
    let residuals: Vec<String> = rows.iter().map(|r| format!("{:.2e}", r.residual)).collect();
    let errors: Vec<String> = rows.iter().map(|r| format!("{:.2e}", r.moment_map_error)).collect();
    let summary = format!("residuals [{}], μ errors [{}]", residuals.join(", "), errors.join(", "));
    for w in rows.windows(2) {
        let ratio = w[1].residual / w[0].residual;
        ensure(ratio <= 0.7, || {
            format!("{summary}: residual ratio {ratio:.3} from level {} to {}", w[0].level, w[1].level)
        })?;
        ensure(w[1].moment_map_error < w[0].moment_map_error, || {
            format!("{summary}: μ error grows from level {} to {}", w[0].level, w[1].level)
        })?;
    }
    timed(Duration::from_secs(120), start, summary)
}

/// Every operator matrix matches the independently assembled dense oracle.
pub fn ac11() -> Check {
    let sphere = SphereBackend::new(3).map_err(err)?;
    let mut checked = oracle::compare(&sphere, &oracle::SphereModel::new(3))?;
    for v in [vec![1, 0], vec![1, 1], vec![0, 0, 1]] {
        let t = TorusBackend::new(v.len(), 2, &v).map_err(err)?;
        checked += oracle::compare(&t, &oracle::TorusModel::new(&t))?;
    }
    Ok(format!("{checked} operator matrices match the dense oracle"))
}

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}
