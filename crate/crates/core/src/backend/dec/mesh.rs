//! Triangulated unit spheres carrying an exact cyclic rotation symmetry.
//!
//! `σ` is the rotation by `2π/n_sym` about the z-axis, recorded as a vertex
//! permutation and propagated to edges and triangles. Simplex orientations
//! are chosen orbit by orbit so that `σ` preserves them; triangles are
//! oriented so that `(b - a) × (c - a)` points into the sphere, which is the
//! orientation in which `dz∧dφ` is positive.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};

pub type Point = [f64; 3];

pub(crate) fn sub(a: Point, b: Point) -> Point {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub(crate) fn dot(a: Point, b: Point) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub(crate) fn cross(a: Point, b: Point) -> Point {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub(crate) fn scale(a: Point, s: f64) -> Point {
    [a[0] * s, a[1] * s, a[2] * s]
}

pub(crate) fn add(a: Point, b: Point) -> Point {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

pub(crate) fn length(a: Point) -> f64 {
    dot(a, a).sqrt()
}

fn normalized(a: Point) -> Point {
    scale(a, 1.0 / length(a))
}

fn sorted2(e: [usize; 2]) -> [usize; 2] {
    if e[0] <= e[1] {
        e
    } else {
        [e[1], e[0]]
    }
}

fn sorted3(mut t: [usize; 3]) -> [usize; 3] {
    t.sort_unstable();
    t
}

/// True when `b` is a cyclic rotation of `a`.
fn same_cycle(a: [usize; 3], b: [usize; 3]) -> bool {
    (0..3).any(|r| a == [b[r], b[(r + 1) % 3], b[(r + 2) % 3]])
}

#[derive(Clone, Debug, PartialEq)]
pub struct SymmetricMesh {
    n_sym: usize,
    level: usize,
    positions: Vec<Point>,
    edges: Vec<[usize; 2]>,
    triangles: Vec<[usize; 3]>,
    /// `σ` acting on vertices, edges and triangles.
    sigma: [Vec<usize>; 3],
    /// For each simplex, its orbit representative `r` and the power `k` with `σ^k(r)` equal to it.
    orbit: [Vec<(usize, usize)>; 3],
    edge_triangles: Vec<[usize; 2]>,
    vertex_triangles: Vec<Vec<usize>>,
    vertex_edges: Vec<Vec<usize>>,
}

impl SymmetricMesh {
    /// Two poles joined by rings of `n_sym` vertices, staggered by half a
    /// step from ring to ring, then `level` rounds of midpoint subdivision
    /// with the new vertices pushed onto the sphere.
    pub fn build(n_sym: usize, level: usize) -> Result<Self> {
        if n_sym < 3 {
            return Err(Error::InvalidParameters(format!("n_sym must be at least 3, got {n_sym}")));
        }
        if level > 6 {
            return Err(Error::InvalidParameters(format!("refinement level {level} is too large (max 6)")));
        }
        let n = n_sym;
        let rings = (n / 2).saturating_sub(1).max(1);
        let mut positions = vec![[0.0, 0.0, 1.0]];
        let mut sigma_v = vec![0];
        let ring_vertex = |r: usize, i: usize| 1 + r * n + i % n;
        for r in 0..rings {
            let theta = std::f64::consts::PI * (r + 1) as f64 / (rings + 1) as f64;
            for i in 0..n {
                let phi = 2.0 * std::f64::consts::PI * (i as f64 + r as f64 / 2.0) / n as f64;
                positions.push([theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()]);
                sigma_v.push(ring_vertex(r, i + 1));
            }
        }
        let south = positions.len();
        positions.push([0.0, 0.0, -1.0]);
        sigma_v.push(south);

        let mut triangles = Vec::new();
        for i in 0..n {
            triangles.push([0, ring_vertex(0, i), ring_vertex(0, i + 1)]);
            triangles.push([south, ring_vertex(rings - 1, i + 1), ring_vertex(rings - 1, i)]);
            for r in 0..rings - 1 {
                let (a0, a1) = (ring_vertex(r, i), ring_vertex(r, i + 1));
                let (b0, b1) = (ring_vertex(r + 1, i), ring_vertex(r + 1, i + 1));
                triangles.push([a0, b0, a1]);
                triangles.push([a1, b0, b1]);
            }
        }

        for _ in 0..level {
            let mut midpoint: HashMap<[usize; 2], usize> = HashMap::new();
            let mut next = Vec::with_capacity(triangles.len() * 4);
            let mut mid = |a: usize, b: usize, positions: &mut Vec<Point>| -> usize {
                *midpoint.entry(sorted2([a, b])).or_insert_with(|| {
                    positions.push(normalized(add(positions[a], positions[b])));
                    positions.len() - 1
                })
            };
            for &[a, b, c] in &triangles {
                let ab = mid(a, b, &mut positions);
                let bc = mid(b, c, &mut positions);
                let ca = mid(c, a, &mut positions);
                next.extend([[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]);
            }
            let old = sigma_v.len();
            sigma_v.resize(positions.len(), usize::MAX);
            for (&[a, b], &m) in &midpoint {
                sigma_v[m] = midpoint[&sorted2([sigma_v[a], sigma_v[b]])];
            }
            debug_assert!(sigma_v[old..].iter().all(|&s| s != usize::MAX));
            triangles = next;
        }

        let (edges, triangles) = canonical_orientation(&positions, &triangles, &sigma_v)?;
        Self::assemble(n_sym, level, positions, edges, triangles, sigma_v)
    }

    /// Validates oriented simplices and a vertex symmetry, and derives the
    /// induced permutations and incidence tables.
    pub fn assemble(
        n_sym: usize,
        level: usize,
        positions: Vec<Point>,
        edges: Vec<[usize; 2]>,
        triangles: Vec<[usize; 3]>,
        sigma_v: Vec<usize>,
    ) -> Result<Self> {
        let bad = |msg: String| Error::InvalidParameters(msg);
        let nv = positions.len();
        if sigma_v.len() != nv {
            return Err(bad("symmetry permutation length differs from the vertex count".into()));
        }
        let mut seen = vec![false; nv];
        for &s in &sigma_v {
            if s >= nv || std::mem::replace(&mut seen[s], true) {
                return Err(bad("symmetry is not a permutation of the vertices".into()));
            }
        }
        for v in 0..nv {
            let mut u = v;
            for _ in 0..n_sym {
                u = sigma_v[u];
            }
            if u != v {
                return Err(bad(format!("symmetry does not have order {n_sym}")));
            }
        }
        for k in (1..n_sym).filter(|k| n_sym % k == 0) {
            let fixed = (0..nv).all(|v| (0..k).fold(v, |u, _| sigma_v[u]) == v);
            if fixed {
                return Err(bad(format!("symmetry has order {k}, expected {n_sym}")));
            }
        }
        for p in &positions {
            if (length(*p) - 1.0).abs() > 1e-9 {
                return Err(bad("vertex is not on the unit sphere".into()));
            }
        }

        let mut edge_index = HashMap::new();
        for (i, &e) in edges.iter().enumerate() {
            if e[0] == e[1] || e[0] >= nv || e[1] >= nv {
                return Err(bad(format!("edge {i} is degenerate or out of range")));
            }
            if edge_index.insert(sorted2(e), i).is_some() {
                return Err(bad(format!("edge {i} is listed twice")));
            }
        }
        let mut triangle_index = HashMap::new();
        for (i, &t) in triangles.iter().enumerate() {
            if t.iter().any(|&v| v >= nv) || sorted3(t).windows(2).any(|w| w[0] == w[1]) {
                return Err(bad(format!("triangle {i} is degenerate or out of range")));
            }
            if triangle_index.insert(sorted3(t), i).is_some() {
                return Err(bad(format!("triangle {i} is listed twice")));
            }
        }

        let sigma_e = edges
            .iter()
            .map(|&[a, b]| {
                let image = [sigma_v[a], sigma_v[b]];
                let j = *edge_index
                    .get(&sorted2(image))
                    .ok_or_else(|| bad("symmetry does not map edges to edges".into()))?;
                if edges[j] != image {
                    return Err(bad("symmetry reverses an edge orientation".into()));
                }
                Ok(j)
            })
            .collect::<Result<Vec<_>>>()?;
        let sigma_t = triangles
            .iter()
            .map(|&[a, b, c]| {
                let image = [sigma_v[a], sigma_v[b], sigma_v[c]];
                let j = *triangle_index
                    .get(&sorted3(image))
                    .ok_or_else(|| bad("symmetry does not map triangles to triangles".into()))?;
                if !same_cycle(triangles[j], image) {
                    return Err(bad("symmetry reverses a triangle orientation".into()));
                }
                Ok(j)
            })
            .collect::<Result<Vec<_>>>()?;

        let mut edge_triangles = vec![[usize::MAX; 2]; edges.len()];
        let mut vertex_triangles = vec![Vec::new(); nv];
        for (ti, &t) in triangles.iter().enumerate() {
            let tri_edges = [[t[0], t[1]], [t[1], t[2]], [t[2], t[0]]];
            for e in tri_edges {
                let ei = *edge_index
                    .get(&sorted2(e))
                    .ok_or_else(|| bad(format!("triangle {ti} has an unlisted edge")))?;
                // the two triangles on an edge must induce opposite orientations
                let slot = usize::from(edges[ei] != e);
                if edge_triangles[ei][slot] != usize::MAX {
                    return Err(bad(format!("edge {ei} is not shared by two coherently oriented triangles")));
                }
                edge_triangles[ei][slot] = ti;
            }
            for v in t {
                vertex_triangles[v].push(ti);
            }
            let centroid = add(add(positions[t[0]], positions[t[1]]), positions[t[2]]);
            let normal = cross(sub(positions[t[1]], positions[t[0]]), sub(positions[t[2]], positions[t[0]]));
            if dot(centroid, normal) >= 0.0 {
                return Err(bad(format!("triangle {ti} is not oriented inward")));
            }
        }
        if edge_triangles.iter().any(|p| p.contains(&usize::MAX)) {
            return Err(bad("mesh is not a closed surface".into()));
        }
        let mut vertex_edges = vec![Vec::new(); nv];
        for (ei, &[a, b]) in edges.iter().enumerate() {
            vertex_edges[a].push(ei);
            vertex_edges[b].push(ei);
        }
        if nv as i64 - edges.len() as i64 + triangles.len() as i64 != 2 {
            return Err(bad("Euler characteristic is not 2".into()));
        }

        let orbit = [orbits(&sigma_v), orbits(&sigma_e), orbits(&sigma_t)];
        Ok(Self {
            n_sym,
            level,
            positions,
            edges,
            triangles,
            sigma: [sigma_v, sigma_e, sigma_t],
            orbit,
            edge_triangles,
            vertex_triangles,
            vertex_edges,
        })
    }

    pub fn n_sym(&self) -> usize {
        self.n_sym
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn positions(&self) -> &[Point] {
        &self.positions
    }

    pub fn edges(&self) -> &[[usize; 2]] {
        &self.edges
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    /// Number of q-simplices.
    pub fn count(&self, degree: usize) -> usize {
        match degree {
            0 => self.positions.len(),
            1 => self.edges.len(),
            2 => self.triangles.len(),
            _ => 0,
        }
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.count(0) as i64 - self.count(1) as i64 + self.count(2) as i64
    }

    /// The symmetry as a permutation of q-simplices.
    pub fn sigma(&self, degree: usize) -> &[usize] {
        &self.sigma[degree]
    }

    /// `(representative, k)` with `σ^k(representative) = simplex`.
    pub fn orbit(&self, degree: usize, simplex: usize) -> (usize, usize) {
        self.orbit[degree][simplex]
    }

    /// `σ^k` applied to a q-simplex index.
    pub fn sigma_pow(&self, degree: usize, simplex: usize, k: usize) -> usize {
        (0..k).fold(simplex, |s, _| self.sigma[degree][s])
    }

    pub fn edge_triangles(&self, edge: usize) -> [usize; 2] {
        self.edge_triangles[edge]
    }

    pub fn vertex_triangles(&self, vertex: usize) -> &[usize] {
        &self.vertex_triangles[vertex]
    }

    pub fn vertex_edges(&self, vertex: usize) -> &[usize] {
        &self.vertex_edges[vertex]
    }

    /// Sign of edge `edge` in the boundary of triangle `triangle`.
    pub fn edge_sign_in(&self, triangle: usize, edge: usize) -> f64 {
        let t = self.triangles[triangle];
        let e = self.edges[edge];
        if [[t[0], t[1]], [t[1], t[2]], [t[2], t[0]]].contains(&e) {
            1.0
        } else {
            -1.0
        }
    }

    pub fn point(&self, vertex: usize) -> Point {
        self.positions[vertex]
    }

    /// Flat area of a triangle.
    pub fn flat_area(&self, triangle: usize) -> f64 {
        let [a, b, c] = self.triangles[triangle].map(|v| self.positions[v]);
        0.5 * length(cross(sub(b, a), sub(c, a)))
    }

    /// Area of the geodesic triangle on the unit sphere spanned by the same vertices.
    pub fn spherical_area(&self, triangle: usize) -> f64 {
        let [a, b, c] = self.triangles[triangle].map(|v| self.positions[v]);
        // Van Oosterom–Strackee
        let numerator = dot(a, cross(b, c)).abs();
        let denominator = 1.0 + dot(a, b) + dot(b, c) + dot(c, a);
        2.0 * numerator.atan2(denominator)
    }

    /// Unit normal pointing into the sphere.
    pub fn inward_normal(&self, triangle: usize) -> Point {
        let [a, b, c] = self.triangles[triangle].map(|v| self.positions[v]);
        normalized(cross(sub(b, a), sub(c, a)))
    }

    /// Circumcenter of the flat triangle.
    pub fn circumcenter(&self, triangle: usize) -> Point {
        let [a, b, c] = self.triangles[triangle].map(|v| self.positions[v]);
        let (u, v) = (sub(b, a), sub(c, a));
        let w = cross(u, v);
        let num = add(scale(cross(w, u), dot(v, v)), scale(cross(v, w), dot(u, u)));
        add(a, scale(num, 1.0 / (2.0 * dot(w, w))))
    }

    /// Cotangent of the interior angle at `vertex` of `triangle`.
    pub fn cotangent_at(&self, triangle: usize, vertex: usize) -> f64 {
        let t = self.triangles[triangle];
        let i = t.iter().position(|&v| v == vertex).expect("vertex belongs to the triangle");
        let p = self.positions[t[i]];
        let u = sub(self.positions[t[(i + 1) % 3]], p);
        let v = sub(self.positions[t[(i + 2) % 3]], p);
        dot(u, v) / length(cross(u, v))
    }

    /// Vertex of `triangle` not on `edge`.
    pub fn opposite_vertex(&self, triangle: usize, edge: usize) -> usize {
        let e = self.edges[edge];
        *self.triangles[triangle]
            .iter()
            .find(|v| !e.contains(v))
            .expect("triangle contains the edge")
    }

    /// Text form with header `# equihodge mesh v1`.
    pub fn to_text(&self) -> String {
        let mut out = String::from("# equihodge mesh v1\n");
        let _ = writeln!(out, "n_sym {}", self.n_sym);
        let _ = writeln!(out, "level {}", self.level);
        let _ = writeln!(out, "vertices {}", self.positions.len());
        for p in &self.positions {
            let _ = writeln!(out, "{:?} {:?} {:?}", p[0], p[1], p[2]);
        }
        let _ = writeln!(out, "edges {}", self.edges.len());
        for e in &self.edges {
            let _ = writeln!(out, "{} {}", e[0], e[1]);
        }
        let _ = writeln!(out, "triangles {}", self.triangles.len());
        for t in &self.triangles {
            let _ = writeln!(out, "{} {} {}", t[0], t[1], t[2]);
        }
        let sigma: Vec<String> = self.sigma[0].iter().map(usize::to_string).collect();
        let _ = writeln!(out, "sigma {}", sigma.join(" "));
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty());
        let err = |line: usize, message: String| Error::Parse { line, message };
        match lines.next() {
            Some((_, "# equihodge mesh v1")) => {}
            Some((line, other)) => return Err(err(line, format!("expected header `# equihodge mesh v1`, got `{other}`"))),
            None => return Err(err(0, "empty mesh document".into())),
        }
        let mut next = |key: &str| -> Result<(usize, Vec<String>)> {
            let (line, text) = lines.next().ok_or_else(|| err(0, format!("missing `{key}` section")))?;
            let mut words = text.split_whitespace().map(str::to_string);
            if key.is_empty() {
                return Ok((line, words.collect()));
            }
            match words.next() {
                Some(w) if w == key => Ok((line, words.collect())),
                _ => Err(err(line, format!("expected `{key}`"))),
            }
        };
        fn parse_all<T: std::str::FromStr>(line: usize, words: &[String], want: usize) -> Result<Vec<T>> {
            if words.len() != want {
                return Err(Error::Parse {
                    line,
                    message: format!("expected {want} values, found {}", words.len()),
                });
            }
            words
                .iter()
                .map(|w| {
                    w.parse().map_err(|_| Error::Parse {
                        line,
                        message: format!("invalid number `{w}`"),
                    })
                })
                .collect()
        }
        let (line, w) = next("n_sym")?;
        let n_sym = parse_all::<usize>(line, &w, 1)?[0];
        let (line, w) = next("level")?;
        let level = parse_all::<usize>(line, &w, 1)?[0];

        let (line, w) = next("vertices")?;
        let nv = parse_all::<usize>(line, &w, 1)?[0];
        let mut positions = Vec::with_capacity(nv);
        for _ in 0..nv {
            let (line, w) = next("")?;
            let p = parse_all::<f64>(line, &w, 3)?;
            positions.push([p[0], p[1], p[2]]);
        }
        let (line, w) = next("edges")?;
        let ne = parse_all::<usize>(line, &w, 1)?[0];
        let mut edges = Vec::with_capacity(ne);
        for _ in 0..ne {
            let (line, w) = next("")?;
            let e = parse_all::<usize>(line, &w, 2)?;
            edges.push([e[0], e[1]]);
        }
        let (line, w) = next("triangles")?;
        let nt = parse_all::<usize>(line, &w, 1)?[0];
        let mut triangles = Vec::with_capacity(nt);
        for _ in 0..nt {
            let (line, w) = next("")?;
            let t = parse_all::<usize>(line, &w, 3)?;
            triangles.push([t[0], t[1], t[2]]);
        }
        let (line, w) = next("sigma")?;
        let sigma = parse_all::<usize>(line, &w, nv)?;
        if let Some((line, _)) = lines.next() {
            return Err(err(line, "trailing content after `sigma`".into()));
        }
        Self::assemble(n_sym, level, positions, edges, triangles, sigma)
    }
}

/// Orbit representative and power for every element of a permutation.
fn orbits(sigma: &[usize]) -> Vec<(usize, usize)> {
    let mut out = vec![(usize::MAX, 0); sigma.len()];
    for start in 0..sigma.len() {
        if out[start].0 != usize::MAX {
            continue;
        }
        let (mut cur, mut k) = (start, 0);
        while out[cur].0 == usize::MAX {
            out[cur] = (start, k);
            cur = sigma[cur];
            k += 1;
        }
    }
    out
}

/// Orients one representative per `σ`-orbit (edges low-to-high index,
/// triangles inward) and transports the orientation along the orbit.
fn canonical_orientation(
    positions: &[Point],
    triangles: &[[usize; 3]],
    sigma_v: &[usize],
) -> Result<(Vec<[usize; 2]>, Vec<[usize; 3]>)> {
    let mut edge_keys = Vec::new();
    let mut edge_index = HashMap::new();
    for &[a, b, c] in triangles {
        for e in [[a, b], [b, c], [c, a]] {
            let key = sorted2(e);
            edge_index.entry(key).or_insert_with(|| {
                edge_keys.push(key);
                edge_keys.len() - 1
            });
        }
    }
    let mut edges: Vec<Option<[usize; 2]>> = vec![None; edge_keys.len()];
    for i in 0..edge_keys.len() {
        if edges[i].is_some() {
            continue;
        }
        let mut cur = edge_keys[i];
        loop {
            let j = edge_index[&sorted2(cur)];
            match edges[j] {
                Some(existing) if existing == cur => break,
                Some(_) => {
                    return Err(Error::InvalidParameters(
                        "symmetry reverses an edge orbit".into(),
                    ))
                }
                None => edges[j] = Some(cur),
            }
            cur = cur.map(|v| sigma_v[v]);
        }
    }

    let triangle_index: HashMap<[usize; 3], usize> =
        triangles.iter().enumerate().map(|(i, &t)| (sorted3(t), i)).collect();
    let mut oriented: Vec<Option<[usize; 3]>> = vec![None; triangles.len()];
    for i in 0..triangles.len() {
        if oriented[i].is_some() {
            continue;
        }
        let [a, b, c] = triangles[i];
        let (pa, pb, pc) = (positions[a], positions[b], positions[c]);
        let normal = cross(sub(pb, pa), sub(pc, pa));
        let mut cur = if dot(add(add(pa, pb), pc), normal) < 0.0 {
            [a, b, c]
        } else {
            [a, c, b]
        };
        loop {
            let j = triangle_index[&sorted3(cur)];
            match oriented[j] {
                Some(existing) if same_cycle(existing, cur) => break,
                Some(_) => {
                    return Err(Error::InvalidParameters(
                        "symmetry reverses a triangle orbit".into(),
                    ))
                }
                None => oriented[j] = Some(cur),
            }
            cur = cur.map(|v| sigma_v[v]);
        }
    }
    Ok((
        edges.into_iter().map(|e| e.expect("every edge oriented")).collect(),
        oriented.into_iter().map(|t| t.expect("every triangle oriented")).collect(),
    ))
}
