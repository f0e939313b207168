//! Rotation systems (combinatorial maps), face tracing, Euler genus,
//! exhaustive minimal genus for tiny graphs, and triangulation extension
//! with a bounded-valence chord pattern.

use std::fmt::Write as _;

use itertools::Itertools;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::Graph;

/// Cellular embedding of a multigraph in an orientable surface, encoded as a
/// combinatorial map. Edge `e` owns darts `2e` and `2e+1`; the involution
/// `alpha` pairing them is `d ^ 1`. `sigma` maps each dart to the next dart
/// counterclockwise around its vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RotationSystem {
    vertex_count: usize,
    sigma: Vec<usize>,
    sigma_inv: Vec<usize>,
    vertex_of: Vec<usize>,
    edges: Vec<(usize, usize)>,
}

/// Orbit decomposition of the face permutation `phi = sigma . alpha`.
#[derive(Debug, Clone)]
pub struct FaceTrace {
    /// Closed dart walks, each starting at its smallest dart, ordered by
    /// smallest dart.
    pub faces: Vec<Vec<usize>>,
}

impl FaceTrace {
    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    pub fn lengths(&self) -> Vec<usize> {
        self.faces.iter().map(|f| f.len()).collect()
    }
}

impl RotationSystem {
    /// Builds a rotation system from per-vertex cyclic dart orders. Dart `2e`
    /// sits at `edges[e].0` and dart `2e+1` at `edges[e].1`.
    pub fn new(n: usize, edges: &[(usize, usize)], rotations: &[Vec<usize>]) -> Result<Self> {
        if rotations.len() != n {
            return Err(Error::InvalidParameter("one rotation per vertex required".into()));
        }
        let dart_count = 2 * edges.len();
        let mut vertex_of = vec![usize::MAX; dart_count];
        for (e, &(u, v)) in edges.iter().enumerate() {
            if u >= n || v >= n {
                return Err(Error::EndpointOutOfRange { endpoint: u.max(v), count: n });
            }
            vertex_of[2 * e] = u;
            vertex_of[2 * e + 1] = v;
        }
        let mut sigma = vec![usize::MAX; dart_count];
        let mut seen = vec![false; dart_count];
        for (v, rot) in rotations.iter().enumerate() {
            for (k, &d) in rot.iter().enumerate() {
                if d >= dart_count || vertex_of[d] != v || seen[d] {
                    return Err(Error::InvalidParameter(format!(
                        "dart {d} invalid in rotation of vertex {v}"
                    )));
                }
                seen[d] = true;
                sigma[d] = rot[(k + 1) % rot.len()];
            }
        }
        if seen.iter().any(|&s| !s) {
            return Err(Error::InvalidParameter("rotations do not cover all darts".into()));
        }
        let mut sigma_inv = vec![usize::MAX; dart_count];
        for d in 0..dart_count {
            sigma_inv[sigma[d]] = d;
        }
        Ok(RotationSystem { vertex_count: n, sigma, sigma_inv, vertex_of, edges: edges.to_vec() })
    }

    /// Rotation system with rotations taken in adjacency order.
    pub fn from_graph_default(g: &Graph) -> Result<Self> {
        let rotations = default_rotations(g);
        RotationSystem::new(g.vertex_count(), g.edges(), &rotations)
    }

    /// Uniformly random rotation at every vertex.
    pub fn random<R: Rng>(g: &Graph, rng: &mut R) -> Result<Self> {
        let mut rotations = default_rotations(g);
        for rot in &mut rotations {
            rot.shuffle(rng);
        }
        RotationSystem::new(g.vertex_count(), g.edges(), &rotations)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn dart_count(&self) -> usize {
        self.sigma.len()
    }

    pub fn alpha(&self, d: usize) -> usize {
        d ^ 1
    }

    pub fn sigma(&self, d: usize) -> usize {
        self.sigma[d]
    }

    pub fn vertex_of(&self, d: usize) -> usize {
        self.vertex_of[d]
    }

    /// Valence of `v` in the map: number of darts at `v` (loops count twice).
    pub fn valence(&self, v: usize) -> usize {
        self.vertex_of.iter().filter(|&&w| w == v).count()
    }

    pub fn max_valence(&self) -> usize {
        let mut count = vec![0usize; self.vertex_count];
        for &v in &self.vertex_of {
            count[v] += 1;
        }
        count.into_iter().max().unwrap_or(0)
    }

    /// Underlying multigraph reconstructed from (alpha, vertex_of).
    pub fn underlying_graph(&self) -> Graph {
        Graph::new(self.vertex_count, &self.edges).expect("valid by construction")
    }

    /// Per-vertex cyclic dart order, starting at the smallest dart at each
    /// vertex. Deterministic serialization form.
    pub fn rotations(&self) -> Vec<Vec<usize>> {
        let mut first = vec![usize::MAX; self.vertex_count];
        for d in 0..self.dart_count() {
            let v = self.vertex_of[d];
            if first[v] == usize::MAX {
                first[v] = d;
            }
        }
        let mut out = vec![Vec::new(); self.vertex_count];
        for (v, &start) in first.iter().enumerate() {
            if start == usize::MAX {
                continue;
            }
            let mut d = start;
            loop {
                out[v].push(d);
                d = self.sigma[d];
                if d == start {
                    break;
                }
            }
        }
        out
    }

    /// Orbits of phi = sigma . alpha; every dart lies in exactly one face.
    pub fn trace_faces(&self) -> FaceTrace {
        let m = self.dart_count();
        let mut seen = vec![false; m];
        let mut faces = Vec::new();
        for start in 0..m {
            if seen[start] {
                continue;
            }
            let mut walk = Vec::new();
            let mut d = start;
            loop {
                seen[d] = true;
                walk.push(d);
                d = self.sigma[self.alpha(d)];
                if d == start {
                    break;
                }
            }
            faces.push(walk);
        }
        FaceTrace { faces }
    }

    /// Genus of the embedded surface via V - E + F = 2 - 2g.
    pub fn euler_genus(&self) -> Result<usize> {
        if !self.underlying_graph().is_connected() {
            return Err(Error::Disconnected);
        }
        let v = self.vertex_count as i64;
        let e = self.edges.len() as i64;
        let f = self.trace_faces().face_count() as i64;
        let defect = 2 - (v - e + f);
        if defect < 0 || defect % 2 != 0 {
            return Err(Error::OddEulerDefect(defect));
        }
        Ok((defect / 2) as usize)
    }

    /// Adds an edge between the corners of darts `a` and `b`, which must lie
    /// in one common face. Returns the new darts `(x, y)` with `x` at
    /// `vertex_of(a)` and `y` at `vertex_of(b)`. The face splits into
    /// `(y, a, ..)` and `(x, b, ..)`.
    fn split_face(&mut self, a: usize, b: usize) -> (usize, usize) {
        let x = self.dart_count();
        let y = x + 1;
        let (va, vb) = (self.vertex_of[a], self.vertex_of[b]);
        self.edges.push((va, vb));
        self.vertex_of.push(va);
        self.vertex_of.push(vb);
        self.sigma.push(0);
        self.sigma.push(0);
        self.sigma_inv.push(0);
        self.sigma_inv.push(0);
        // insert x just before a in the rotation at va, y just before b at vb
        for (nd, target) in [(x, a), (y, b)] {
            let pred = self.sigma_inv[target];
            self.sigma[pred] = nd;
            self.sigma[nd] = target;
            self.sigma_inv[target] = nd;
            self.sigma_inv[nd] = pred;
        }
        (x, y)
    }

    /// Serializes as: header "V E", then per vertex one line of incident
    /// darts in cyclic order (empty line for isolated vertices).
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{} {}", self.vertex_count, self.edges.len());
        for &(u, v) in &self.edges {
            let _ = writeln!(out, "{u} {v}");
        }
        for rot in self.rotations() {
            let line = rot.iter().map(|d| d.to_string()).join(" ");
            let _ = writeln!(out, "{line}");
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| Error::Parse("empty rotation system".into()))?;
        let mut it = header.split_whitespace();
        let n: usize = it
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| Error::Parse("invalid vertex count".into()))?;
        let m: usize = it
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| Error::Parse("invalid edge count".into()))?;
        let mut edges = Vec::with_capacity(m);
        for _ in 0..m {
            let line = lines.next().ok_or_else(|| Error::Parse("truncated edge list".into()))?;
            let mut it = line.split_whitespace();
            let u: usize = it
                .next()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| Error::Parse("invalid edge".into()))?;
            let v: usize = it
                .next()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| Error::Parse("invalid edge".into()))?;
            edges.push((u, v));
        }
        let mut rotations = Vec::with_capacity(n);
        for _ in 0..n {
            let line = lines.next().ok_or_else(|| Error::Parse("truncated rotations".into()))?;
            let rot: std::result::Result<Vec<usize>, _> =
                line.split_whitespace().map(|t| t.parse()).collect();
            rotations.push(rot.map_err(|_| Error::Parse("invalid dart".into()))?);
        }
        RotationSystem::new(n, &edges, &rotations)
    }
}

fn default_rotations(g: &Graph) -> Vec<Vec<usize>> {
    let mut rotations = vec![Vec::new(); g.vertex_count()];
    let mut loop_toggle = vec![false; g.edge_count()];
    for v in 0..g.vertex_count() {
        for &(u, e) in g.adjacency(v) {
            let dart = if g.edges()[e].0 == v && g.edges()[e].1 == v {
                // loop: adjacency lists it twice; hand out both darts
                let d = if loop_toggle[e] { 2 * e + 1 } else { 2 * e };
                loop_toggle[e] = !loop_toggle[e];
                d
            } else if g.edges()[e].0 == v {
                2 * e
            } else {
                debug_assert_eq!(g.edges()[e].1, v);
                let _ = u;
                2 * e + 1
            };
            rotations[v].push(dart);
        }
    }
    rotations
}

/// Diagonal chords (corner-index pairs) triangulating an n-gon in the
/// alternating-ends pattern, so every corner meets at most 2 chords and the
/// triangulated polygon has valence at most 4.
pub fn zigzag_triangulate_polygon(n: usize) -> Result<Vec<(usize, usize)>> {
    if n < 3 {
        return Err(Error::FaceTooShort(n));
    }
    let mut chords = Vec::with_capacity(n - 3);
    let (mut a, mut b) = (1, n - 1);
    let mut from_low = true;
    while chords.len() < n - 3 {
        chords.push((a, b));
        if from_low {
            b -= 1;
        } else {
            a += 1;
        }
        from_low = !from_low;
    }
    Ok(chords)
}

/// Extends a cellular embedding to a triangulation of the same surface by
/// inserting chords into every face of length > 3: no new vertices, every
/// input edge kept, per-vertex valence at most tripled, genus unchanged.
pub fn triangulate_fill(rs: &RotationSystem, d: usize) -> Result<RotationSystem> {
    if rs.max_valence() > d {
        return Err(Error::InvalidParameter(format!(
            "input valence {} exceeds declared bound {d}",
            rs.max_valence()
        )));
    }
    let faces = rs.trace_faces();
    if let Some(len) = faces.lengths().iter().find(|&&l| l < 3) {
        return Err(Error::FaceTooShort(*len));
    }
    let mut out = rs.clone();
    for face in &faces.faces {
        let mut walk = face.clone();
        // Alternating ear cuts: each cut removes one triangle, and each
        // original corner ends up in at most 2 chords.
        let mut from_far = true;
        while walk.len() > 3 {
            if from_far {
                let (a, b) = (walk[1], walk[walk.len() - 1]);
                let (_x, y) = out.split_face(a, b);
                // triangle (x, b, walk[0]) cut off; keep (y, walk[1..len-1])
                let mut next = vec![y];
                next.extend_from_slice(&walk[1..walk.len() - 1]);
                walk = next;
            } else {
                let (a, b) = (walk[0], walk[2]);
                let (x, _y) = out.split_face(a, b);
                // triangle (y, walk[0], walk[1]) cut off; keep (x, walk[2..])
                let mut next = vec![x];
                next.extend_from_slice(&walk[2..]);
                walk = next;
            }
            from_far = !from_far;
        }
    }
    Ok(out)
}

const DEFAULT_GENUS_BUDGET: u128 = 50_000_000;

/// Minimal orientable genus by exhausting all rotation systems. Practical
/// only for tiny graphs; the work is Prod_v (deg(v)-1)!.
pub fn min_genus_exhaustive(g: &Graph) -> Result<usize> {
    min_genus_exhaustive_with_budget(g, DEFAULT_GENUS_BUDGET)
}

pub fn min_genus_exhaustive_with_budget(g: &Graph, budget: u128) -> Result<usize> {
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let base = default_rotations(g);
    let mut work: u128 = 1;
    for rot in &base {
        let k = rot.len().saturating_sub(1) as u128;
        let mut f: u128 = 1;
        for i in 2..=k {
            f = f.saturating_mul(i);
        }
        work = work.saturating_mul(f);
        if work > budget {
            return Err(Error::BudgetExceeded(format!(
                "rotation-system count exceeds budget {budget}"
            )));
        }
    }
    // Fix the first dart of each rotation (cyclic orders), permute the rest.
    let per_vertex: Vec<Vec<Vec<usize>>> = base
        .iter()
        .map(|rot| {
            if rot.len() <= 1 {
                vec![rot.clone()]
            } else {
                let head = rot[0];
                rot[1..]
                    .iter()
                    .copied()
                    .permutations(rot.len() - 1)
                    .map(|tail| {
                        let mut full = vec![head];
                        full.extend(tail);
                        full
                    })
                    .collect()
            }
        })
        .collect();
    let mut best = usize::MAX;
    let mut choice = vec![0usize; g.vertex_count()];
    loop {
        let rotations: Vec<Vec<usize>> =
            choice.iter().enumerate().map(|(v, &c)| per_vertex[v][c].clone()).collect();
        let rs = RotationSystem::new(g.vertex_count(), g.edges(), &rotations)?;
        best = best.min(rs.euler_genus()?);
        if best == 0 {
            return Ok(0);
        }
        // odometer
        let mut i = 0;
        loop {
            if i == choice.len() {
                return Ok(best);
            }
            choice[i] += 1;
            if choice[i] < per_vertex[i].len() {
                break;
            }
            choice[i] = 0;
            i += 1;
        }
    }
}

/// Empirical bilipschitz and density constants for an inclusion of `sub`
/// into `super_g` mapping every sub edge to a super edge.
#[derive(Debug, Clone, Copy)]
pub struct MetricStretch {
    /// max over vertex pairs of d_sub / d_super
    pub sub_over_super: f64,
    /// max over image pairs of d_super / d_sub
    pub super_over_sub: f64,
    /// max distance from a super vertex to the image of sub
    pub density: usize,
    pub exact: bool,
}

const STRETCH_EXACT_CAP: usize = 512;

pub fn metric_stretch(
    sub: &Graph,
    super_g: &Graph,
    inclusion: &[usize],
    sample: usize,
    seed: u64,
) -> Result<MetricStretch> {
    use rand::SeedableRng;
    if inclusion.len() != sub.vertex_count() {
        return Err(Error::InvalidParameter("inclusion must map every sub vertex".into()));
    }
    let mut seen = std::collections::HashSet::new();
    for &img in inclusion {
        if img >= super_g.vertex_count() {
            return Err(Error::VertexOutOfRange { vertex: img, count: super_g.vertex_count() });
        }
        if !seen.insert(img) {
            return Err(Error::InvalidParameter("inclusion must be injective".into()));
        }
    }
    for &(u, v) in sub.edges() {
        if u != v && !super_g.has_edge_between(inclusion[u], inclusion[v]) {
            return Err(Error::NotEdgePreserving(u, v));
        }
    }
    let n = sub.vertex_count();
    let exact = n <= STRETCH_EXACT_CAP;
    let pairs: Vec<(usize, usize)> = if exact {
        (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect()
    } else {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        (0..sample)
            .map(|_| {
                let u = rng.gen_range(0..n);
                let mut v = rng.gen_range(0..n);
                while v == u {
                    v = rng.gen_range(0..n);
                }
                (u.min(v), u.max(v))
            })
            .collect()
    };
    let sources: std::collections::BTreeSet<usize> = pairs.iter().map(|&(u, _)| u).collect();
    let mut up: f64 = 1.0;
    let mut down: f64 = 1.0;
    for &u in &sources {
        let ds = sub.distances_from(u)?;
        let dt = super_g.distances_from(inclusion[u])?;
        for &(s, v) in pairs.iter().filter(|&&(s, _)| s == u) {
            debug_assert_eq!(s, u);
            let (a, b) = match (ds[v], dt[inclusion[v]]) {
                (Some(a), Some(b)) => (a as f64, b as f64),
                _ => continue,
            };
            if b > 0.0 {
                up = up.max(a / b);
            }
            if a > 0.0 {
                down = down.max(b / a);
            }
        }
    }
    // multi-source BFS from the image for the density radius
    let mut dist = vec![usize::MAX; super_g.vertex_count()];
    let mut queue = std::collections::VecDeque::new();
    for &img in inclusion {
        dist[img] = 0;
        queue.push_back(img);
    }
    while let Some(v) = queue.pop_front() {
        for &(u, _) in super_g.adjacency(v) {
            if dist[u] == usize::MAX {
                dist[u] = dist[v] + 1;
                queue.push_back(u);
            }
        }
    }
    let density = dist.into_iter().filter(|&d| d != usize::MAX).max().unwrap_or(0);
    Ok(MetricStretch { sub_over_super: up, super_over_sub: down, density, exact })
}
