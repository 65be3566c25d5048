//! Discrete exterior calculus on symmetric sphere meshes.
//!
//! Forms are real cochains on the oriented simplices. `d` is the integer
//! coboundary, the inner products use the diagonal circumcentric star
//! (`*0` = dual cell area, `*1` = dual/primal length ratio, `*2` = 1/area),
//! and the codifferential is the adjoint `M_{q-1}^{-1} Dᵀ M_q`.
//!
//! Every geometric coefficient is computed once per `σ`-orbit and copied to
//! the rest of the orbit, and sparse row sums are taken in a canonical
//! order, so all operators commute with the symmetry bit for bit.

mod mesh;

use std::sync::Arc;

pub use mesh::{Point, SymmetricMesh};

use mesh::{cross, dot, length, scale, sub};

use super::BackendSpec;
use crate::derham::{BackendId, DeRhamBackend};
use crate::equivariant::GeneratorSpec;
use crate::error::{Error, Result};
use crate::linalg::{canonical_sum, CsrMatrix};

/// Default zero threshold for norms.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;
/// Relative residual at which the Green solve stops.
pub const DEFAULT_SOLVER_TOLERANCE: f64 = 1e-10;
pub const DEFAULT_MAX_ITERATIONS: usize = 20_000;

/// Rotational Killing field `∂φ` at a point.
fn rotation_field(p: Point) -> Point {
    [-p[1], p[0], 0.0]
}

#[derive(Debug)]
pub struct DecBackend {
    id: BackendId,
    mesh: Arc<SymmetricMesh>,
    generators: GeneratorSpec,
    tolerance: f64,
    solver_tolerance: f64,
    max_iterations: usize,
    coboundary: [CsrMatrix; 2],
    coboundary_t: [CsrMatrix; 2],
    star: [Vec<f64>; 3],
    /// `contraction[0]` maps 1-cochains to 0-cochains, `contraction[1]` 2 to 1.
    contraction: [CsrMatrix; 2],
    area: Vec<f64>,
}

impl DecBackend {
    pub fn new(mesh: Arc<SymmetricMesh>) -> Result<Self> {
        let coboundary = [coboundary_0(&mesh), coboundary_1(&mesh)];
        let coboundary_t = [coboundary[0].transpose(), coboundary[1].transpose()];
        let area = per_orbit(&mesh, 2, |t| mesh.flat_area(t));
        let star = [
            per_orbit(&mesh, 0, |v| dual_area(&mesh, v)),
            per_orbit(&mesh, 1, |e| {
                0.5 * mesh
                    .edge_triangles(e)
                    .iter()
                    .map(|&t| mesh.cotangent_at(t, mesh.opposite_vertex(t, e)))
                    .sum::<f64>()
            }),
            area.iter().map(|a| 1.0 / a).collect(),
        ];
        for (q, weights) in star.iter().enumerate() {
            if let Some(i) = weights.iter().position(|w| !(w.is_finite() && *w > 0.0)) {
                return Err(Error::InvalidParameters(format!(
                    "mesh is not well centered: star weight {} of degree {q} at simplex {i}",
                    weights[i]
                )));
            }
        }
        let contraction = [contraction_1(&mesh), contraction_2(&mesh)];
        Ok(Self {
            id: BackendId::fresh(),
            mesh,
            generators: GeneratorSpec::torus(1),
            tolerance: DEFAULT_TOLERANCE,
            solver_tolerance: DEFAULT_SOLVER_TOLERANCE,
            max_iterations: DEFAULT_MAX_ITERATIONS,
            coboundary,
            coboundary_t,
            star,
            contraction,
            area,
        })
    }

    /// Symmetric mesh with `n_sym`-fold rotation symmetry at refinement `level`.
    pub fn sphere(n_sym: usize, level: usize) -> Result<Self> {
        Self::new(Arc::new(SymmetricMesh::build(n_sym, level)?))
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Result<Self> {
        if !(tolerance.is_finite() && tolerance >= 0.0) {
            return Err(Error::InvalidParameters(format!("invalid tolerance {tolerance}")));
        }
        self.tolerance = tolerance;
        Ok(self)
    }

    pub fn with_solver(mut self, relative_tolerance: f64, max_iterations: usize) -> Result<Self> {
        if !(relative_tolerance.is_finite() && relative_tolerance > 0.0) || max_iterations == 0 {
            return Err(Error::InvalidParameters("invalid solver settings".into()));
        }
        self.solver_tolerance = relative_tolerance;
        self.max_iterations = max_iterations;
        Ok(self)
    }

    pub fn mesh(&self) -> &Arc<SymmetricMesh> {
        &self.mesh
    }

    /// Diagonal of the Hodge star on q-cochains.
    pub fn star_weights(&self, degree: usize) -> &[f64] {
        &self.star[degree]
    }

    pub fn coboundary(&self, degree: usize) -> &CsrMatrix {
        &self.coboundary[degree]
    }

    /// Sparse matrix of the contraction from `degree` to `degree - 1`.
    pub fn contraction_matrix(&self, degree: usize) -> &CsrMatrix {
        &self.contraction[degree - 1]
    }

    /// De Rham map of the area form `dz∧dφ`: exact spherical triangle areas.
    pub fn volume_form(&self) -> Vec<f64> {
        per_orbit(&self.mesh, 2, |t| self.mesh.spherical_area(t))
    }

    /// The height function `z` at the vertices.
    pub fn height(&self) -> Vec<f64> {
        per_orbit(&self.mesh, 0, |v| self.mesh.point(v)[2])
    }

    /// Permutes a q-cochain by the mesh symmetry.
    pub fn rotate(&self, degree: usize, w: &[f64]) -> Vec<f64> {
        let sigma = self.mesh.sigma(degree);
        let mut out = vec![0.0; w.len()];
        for (i, &v) in w.iter().enumerate() {
            out[sigma[i]] = v;
        }
        out
    }

    fn laplacian(&self, degree: usize, w: &[f64]) -> Result<Vec<f64>> {
        let mut out = vec![0.0; w.len()];
        if degree < 2 {
            let up = self.apply_codifferential(degree + 1, &self.apply_d(degree, w)?)?;
            for (o, v) in out.iter_mut().zip(up) {
                *o += v;
            }
        }
        if degree > 0 {
            let down = self.apply_d(degree - 1, &self.apply_codifferential(degree, w)?)?;
            for (o, v) in out.iter_mut().zip(down) {
                *o += v;
            }
        }
        Ok(out)
    }

    fn deflate(&self, degree: usize, w: &mut [f64]) -> Result<()> {
        let h = self.harmonic_projection(degree, w)?;
        for (x, y) in w.iter_mut().zip(h) {
            *x -= y;
        }
        Ok(())
    }
}

/// Evaluates `f` on each orbit representative and copies it along the orbit.
fn per_orbit(mesh: &SymmetricMesh, degree: usize, f: impl Fn(usize) -> f64) -> Vec<f64> {
    let n = mesh.count(degree);
    let mut out = vec![f64::NAN; n];
    for s in 0..n {
        let (rep, _) = mesh.orbit(degree, s);
        out[s] = if rep == s { f(s) } else { out[rep] };
    }
    out
}

/// Builds sparse rows at orbit representatives and transports them.
fn rows_per_orbit(
    mesh: &SymmetricMesh,
    row_degree: usize,
    col_degree: usize,
    f: impl Fn(usize) -> Vec<(usize, f64)>,
) -> CsrMatrix {
    let n = mesh.count(row_degree);
    let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    for s in 0..n {
        if mesh.orbit(row_degree, s).0 == s {
            rows[s] = f(s);
        }
    }
    for s in 0..n {
        let (rep, k) = mesh.orbit(row_degree, s);
        if rep != s {
            rows[s] = rows[rep]
                .iter()
                .map(|&(c, v)| (mesh.sigma_pow(col_degree, c, k), v))
                .collect();
        }
    }
    CsrMatrix::from_rows(mesh.count(col_degree), rows)
}

fn coboundary_0(mesh: &SymmetricMesh) -> CsrMatrix {
    let rows = mesh.edges().iter().map(|&[a, b]| vec![(a, -1.0), (b, 1.0)]).collect();
    CsrMatrix::from_rows(mesh.count(0), rows)
}

fn coboundary_1(mesh: &SymmetricMesh) -> CsrMatrix {
    let rows = (0..mesh.count(2))
        .map(|t| {
            let tri = mesh.triangles()[t];
            let mut row = Vec::with_capacity(3);
            for (a, b) in [(tri[0], tri[1]), (tri[1], tri[2]), (tri[2], tri[0])] {
                let e = mesh.vertex_edges(a)
                    .iter()
                    .copied()
                    .find(|&e| mesh.edges()[e].contains(&b))
                    .expect("triangle edges are listed");
                row.push((e, mesh.edge_sign_in(t, e)));
            }
            row
        })
        .collect();
    CsrMatrix::from_rows(mesh.count(1), rows)
}

/// Circumcentric dual cell area of a vertex.
fn dual_area(mesh: &SymmetricMesh, v: usize) -> f64 {
    mesh.vertex_triangles(v)
        .iter()
        .map(|&t| {
            let tri = mesh.triangles()[t];
            let i = tri.iter().position(|&u| u == v).expect("incident triangle");
            let (b, c) = (tri[(i + 1) % 3], tri[(i + 2) % 3]);
            let p = mesh.point(v);
            let vb = sub(mesh.point(b), p);
            let vc = sub(mesh.point(c), p);
            (dot(vb, vb) * mesh.cotangent_at(t, c) + dot(vc, vc) * mesh.cotangent_at(t, b)) / 8.0
        })
        .sum()
}

/// 2-cochain to 1-cochain: each adjacent triangle's constant density is
/// contracted with the rotation field at its circumcenter and integrated
/// along the edge; the two triangles are averaged.
fn contraction_2(mesh: &SymmetricMesh) -> CsrMatrix {
    rows_per_orbit(mesh, 1, 2, |e| {
        let [a, b] = mesh.edges()[e];
        let along = sub(mesh.point(b), mesh.point(a));
        mesh.edge_triangles(e)
            .iter()
            .map(|&t| {
                let field = rotation_field(mesh.circumcenter(t));
                let value = dot(mesh.inward_normal(t), cross(field, along));
                (t, 0.5 * value / mesh.flat_area(t))
            })
            .collect()
    })
}

/// 1-cochain to 0-cochain: a least-squares tangent covector fitted to the
/// incident edge values, evaluated on the rotation field at the vertex.
fn contraction_1(mesh: &SymmetricMesh) -> CsrMatrix {
    rows_per_orbit(mesh, 0, 1, |v| {
        let p = mesh.point(v);
        let field = rotation_field(p);
        if length(field) == 0.0 {
            return Vec::new();
        }
        let normal = scale(p, 1.0 / length(p));
        let seed = if normal[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
        let u1 = sub(seed, scale(normal, dot(seed, normal)));
        let u1 = scale(u1, 1.0 / length(u1));
        let u2 = cross(normal, u1);
        let incident: Vec<(usize, f64, [f64; 2])> = mesh
            .vertex_edges(v)
            .iter()
            .map(|&e| {
                let [a, b] = mesh.edges()[e];
                let (other, sign) = if a == v { (b, 1.0) } else { (a, -1.0) };
                let t = sub(mesh.point(other), p);
                (e, sign, [dot(t, u1), dot(t, u2)])
            })
            .collect();
        let (mut g00, mut g01, mut g11) = (0.0, 0.0, 0.0);
        for (_, _, q) in &incident {
            g00 += q[0] * q[0];
            g01 += q[0] * q[1];
            g11 += q[1] * q[1];
        }
        let det = g00 * g11 - g01 * g01;
        let w = [dot(field, u1), dot(field, u2)];
        // wᵀ G⁻¹
        let y = [(w[0] * g11 - w[1] * g01) / det, (w[1] * g00 - w[0] * g01) / det];
        incident
            .into_iter()
            .map(|(e, sign, q)| (e, sign * (y[0] * q[0] + y[1] * q[1])))
            .collect()
    })
}

fn weighted_dot(weights: &[f64], a: &[f64], b: &[f64]) -> f64 {
    let mut terms: Vec<f64> = a.iter().zip(b).zip(weights).map(|((x, y), w)| x * y * w).collect();
    canonical_sum(&mut terms)
}

impl DeRhamBackend for DecBackend {
    type Scalar = f64;

    fn id(&self) -> BackendId {
        self.id
    }

    fn spec(&self) -> BackendSpec {
        BackendSpec::Dec {
            n_sym: self.mesh.n_sym(),
            level: self.mesh.level(),
        }
    }

    fn manifold_dim(&self) -> usize {
        2
    }

    fn dimension(&self, degree: usize) -> usize {
        self.mesh.count(degree)
    }

    fn generators(&self) -> &GeneratorSpec {
        &self.generators
    }

    fn tolerance(&self) -> f64 {
        self.tolerance
    }

    fn apply_d(&self, degree: usize, w: &[f64]) -> Result<Vec<f64>> {
        Ok(match degree {
            0 | 1 => self.coboundary[degree].mul_vec(w),
            _ => Vec::new(),
        })
    }

    fn apply_star(&self, _degree: usize, _w: &[f64]) -> Result<Vec<f64>> {
        Err(Error::Unsupported(
            "the DEC star maps primal to dual cochains; use star_weights".into(),
        ))
    }

    fn apply_codifferential(&self, degree: usize, w: &[f64]) -> Result<Vec<f64>> {
        let weighted: Vec<f64> = w.iter().zip(&self.star[degree]).map(|(x, s)| x * s).collect();
        let pulled = self.coboundary_t[degree - 1].mul_vec(&weighted);
        Ok(pulled
            .into_iter()
            .zip(&self.star[degree - 1])
            .map(|(x, s)| x / s)
            .collect())
    }

    fn apply_contraction(&self, _generator: usize, degree: usize, w: &[f64]) -> Result<Vec<f64>> {
        Ok(self.contraction[degree - 1].mul_vec(w))
    }

    fn inner_product(&self, degree: usize, a: &[f64], b: &[f64]) -> f64 {
        weighted_dot(&self.star[degree], a, b)
    }

    fn harmonic_basis(&self, degree: usize) -> Vec<Vec<f64>> {
        match degree {
            0 => vec![vec![1.0; self.mesh.count(0)]],
            2 => vec![self.area.clone()],
            _ => Vec::new(),
        }
    }

    /// Conjugate gradients in the star-weighted inner product, on the
    /// orthogonal complement of the harmonic cochains.
    fn apply_green(&self, degree: usize, w: &[f64]) -> Result<Vec<f64>> {
        let weights = &self.star[degree];
        let mut r = w.to_vec();
        self.deflate(degree, &mut r)?;
        let target = weighted_dot(weights, &r, &r).sqrt();
        let mut x = vec![0.0; w.len()];
        if target == 0.0 {
            return Ok(x);
        }
        let mut p = r.clone();
        let mut rr = target * target;
        for iteration in 1..=self.max_iterations {
            let ap = self.laplacian(degree, &p)?;
            let curvature = weighted_dot(weights, &p, &ap);
            if !(curvature > 0.0) {
                return Err(Error::SolverFailure {
                    iterations: iteration,
                    residual: rr.sqrt() / target,
                });
            }
            let alpha = rr / curvature;
            for i in 0..x.len() {
                x[i] += alpha * p[i];
                r[i] -= alpha * ap[i];
            }
            self.deflate(degree, &mut r)?;
            let rr_next = weighted_dot(weights, &r, &r);
            if rr_next.sqrt() <= self.solver_tolerance * target {
                self.deflate(degree, &mut x)?;
                return Ok(x);
            }
            let beta = rr_next / rr;
            for i in 0..p.len() {
                p[i] = r[i] + beta * p[i];
            }
            rr = rr_next;
        }
        Err(Error::SolverFailure {
            iterations: self.max_iterations,
            residual: rr.sqrt() / target,
        })
    }
}
