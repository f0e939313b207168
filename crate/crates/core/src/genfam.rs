//! Generators for the graph families the experiments contrast: grids with
//! their standard embeddings, trees, cycles, complete graphs and random
//! regular graphs from the pairing model.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::embedding::RotationSystem;
use crate::error::{Error, Result};
use crate::graph::Graph;

/// Declarative family description, expressible in CLI config files.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FamilySpec {
    PlanarGrid { n: usize },
    TorusGrid { n: usize },
    Path { n: usize },
    Cycle { n: usize },
    Complete { n: usize },
    BinaryTree { depth: usize },
    RandomRegular { n: usize, d: usize, seed: u64 },
}

impl FamilySpec {
    pub fn generate(&self) -> Result<Graph> {
        match *self {
            FamilySpec::PlanarGrid { n } => Ok(planar_grid(n)?.0),
            FamilySpec::TorusGrid { n } => Ok(torus_grid(n)?.0),
            FamilySpec::Path { n } => path(n),
            FamilySpec::Cycle { n } => cycle(n),
            FamilySpec::Complete { n } => complete(n),
            FamilySpec::BinaryTree { depth } => binary_tree(depth),
            FamilySpec::RandomRegular { n, d, seed } => random_regular(n, d, seed),
        }
    }

    pub fn label(&self) -> String {
        match *self {
            FamilySpec::PlanarGrid { n } => format!("planar_grid({n})"),
            FamilySpec::TorusGrid { n } => format!("torus_grid({n})"),
            FamilySpec::Path { n } => format!("path({n})"),
            FamilySpec::Cycle { n } => format!("cycle({n})"),
            FamilySpec::Complete { n } => format!("complete({n})"),
            FamilySpec::BinaryTree { depth } => format!("binary_tree({depth})"),
            FamilySpec::RandomRegular { n, d, seed } => format!("random_regular({n},{d};seed={seed})"),
        }
    }
}

/// Path on `n` vertices (n-1 edges).
pub fn path(n: usize) -> Result<Graph> {
    if n < 1 {
        return Err(Error::InvalidParameter("path needs n >= 1".into()));
    }
    let edges: Vec<_> = (0..n.saturating_sub(1)).map(|i| (i, i + 1)).collect();
    Graph::new(n, &edges)
}

pub fn cycle(n: usize) -> Result<Graph> {
    if n < 3 {
        return Err(Error::InvalidParameter("cycle needs n >= 3".into()));
    }
    let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
    Graph::new(n, &edges)
}

pub fn complete(n: usize) -> Result<Graph> {
    if n < 1 {
        return Err(Error::InvalidParameter("complete graph needs n >= 1".into()));
    }
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            edges.push((u, v));
        }
    }
    Graph::new(n, &edges)
}

/// Complete binary tree with levels 0..=depth, so 2^(depth+1) - 1 vertices.
pub fn binary_tree(depth: usize) -> Result<Graph> {
    if depth > 30 {
        return Err(Error::InvalidParameter("binary tree depth too large".into()));
    }
    let n = (1usize << (depth + 1)) - 1;
    let edges: Vec<_> = (1..n).map(|v| ((v - 1) / 2, v)).collect();
    Graph::new(n, &edges)
}

/// n x n torus grid C_n x C_n with the standard genus-1 rotation system.
pub fn torus_grid(n: usize) -> Result<(Graph, RotationSystem)> {
    if n < 3 {
        return Err(Error::InvalidParameter("torus grid needs n >= 3".into()));
    }
    let id = |i: usize, j: usize| (i % n) * n + (j % n);
    let mut edges = Vec::with_capacity(2 * n * n);
    // edge (i*n + j): east edge of (i,j); edge n^2 + i*n + j: north edge.
    for i in 0..n {
        for j in 0..n {
            edges.push((id(i, j), id(i, j + 1)));
        }
    }
    for i in 0..n {
        for j in 0..n {
            edges.push((id(i, j), id(i + 1, j)));
        }
    }
    let g = Graph::new(n * n, &edges)?;
    // Counterclockwise rotation (E, N, W, S) at every vertex.
    let east_out = |i: usize, j: usize| 2 * (i * n + j);
    let north_out = |i: usize, j: usize| 2 * (n * n + i * n + j);
    let west_in = |i: usize, j: usize| 2 * (i * n + (j + n - 1) % n) + 1;
    let south_in = |i: usize, j: usize| 2 * (n * n + ((i + n - 1) % n) * n + j) + 1;
    let mut rotations = vec![Vec::new(); n * n];
    for i in 0..n {
        for j in 0..n {
            rotations[id(i, j)] = vec![east_out(i, j), north_out(i, j), west_in(i, j), south_in(i, j)];
        }
    }
    let rs = RotationSystem::new(n * n, &edges, &rotations)?;
    Ok((g, rs))
}

/// n x n planar grid with its genus-0 rotation system.
pub fn planar_grid(n: usize) -> Result<(Graph, RotationSystem)> {
    if n < 2 {
        return Err(Error::InvalidParameter("planar grid needs n >= 2".into()));
    }
    let id = |i: usize, j: usize| i * n + j;
    let mut edges = Vec::new();
    let mut east = vec![usize::MAX; n * n];
    let mut north = vec![usize::MAX; n * n];
    for i in 0..n {
        for j in 0..n {
            if j + 1 < n {
                east[id(i, j)] = edges.len();
                edges.push((id(i, j), id(i, j + 1)));
            }
            if i + 1 < n {
                north[id(i, j)] = edges.len();
                edges.push((id(i, j), id(i + 1, j)));
            }
        }
    }
    let g = Graph::new(n * n, &edges)?;
    let mut rotations = vec![Vec::new(); n * n];
    for i in 0..n {
        for j in 0..n {
            let v = id(i, j);
            let mut rot = Vec::new();
            if east[v] != usize::MAX {
                rot.push(2 * east[v]);
            }
            if north[v] != usize::MAX {
                rot.push(2 * north[v]);
            }
            if j > 0 {
                rot.push(2 * east[id(i, j - 1)] + 1);
            }
            if i > 0 {
                rot.push(2 * north[id(i - 1, j)] + 1);
            }
            rotations[v] = rot;
        }
    }
    let rs = RotationSystem::new(n * n, &edges, &rotations)?;
    Ok((g, rs))
}

const PAIRING_RESTART_CAP: usize = 10_000;

/// Simple d-regular graph on n vertices via the pairing (configuration)
/// model with rejection of loops and parallel edges.
pub fn random_regular(n: usize, d: usize, seed: u64) -> Result<Graph> {
    if n * d % 2 != 0 {
        return Err(Error::InvalidParameter(format!(
            "n*d must be even for a {d}-regular graph on {n} vertices"
        )));
    }
    if d < 3 {
        return Err(Error::InvalidParameter("random_regular needs d >= 3".into()));
    }
    if n <= d {
        return Err(Error::InvalidParameter("random_regular needs n > d".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut stubs: Vec<usize> = (0..n * d).map(|s| s / d).collect();
    for _ in 0..PAIRING_RESTART_CAP {
        stubs.shuffle(&mut rng);
        let mut edges = Vec::with_capacity(n * d / 2);
        let mut seen = std::collections::HashSet::with_capacity(n * d / 2);
        let mut ok = true;
        for pair in stubs.chunks_exact(2) {
            let (u, v) = (pair[0], pair[1]);
            if u == v || !seen.insert((u.min(v), u.max(v))) {
                ok = false;
                break;
            }
            edges.push((u, v));
        }
        if ok {
            return Graph::new(n, &edges);
        }
    }
    Err(Error::BudgetExceeded(format!(
        "pairing model failed to produce a simple graph in {PAIRING_RESTART_CAP} restarts"
    )))
}
