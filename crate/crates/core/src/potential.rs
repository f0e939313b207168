//! Discrete potential theory: p-capacity between vertex sets, effective
//! resistance, capacity profiles along ball exhaustions, random-walk escape
//! probabilities and p-modulus of explicit path families.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;

/// Source set at potential 1, ground set at potential 0, exponent p > 1.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CapacityProblem {
    pub graph: Graph,
    pub source: Vec<usize>,
    pub ground: Vec<usize>,
    pub p: f64,
}

impl CapacityProblem {
    pub fn new(graph: Graph, source: Vec<usize>, ground: Vec<usize>, p: f64) -> Result<Self> {
        if !(p > 1.0) {
            return Err(Error::InvalidParameter("exponent p must be > 1".into()));
        }
        if source.is_empty() || ground.is_empty() {
            return Err(Error::InvalidParameter("source and ground must be non-empty".into()));
        }
        let n = graph.vertex_count();
        for &v in source.iter().chain(&ground) {
            if v >= n {
                return Err(Error::VertexOutOfRange { vertex: v, count: n });
            }
        }
        if source.iter().any(|v| ground.contains(v)) {
            return Err(Error::InvalidParameter("source and ground must be disjoint".into()));
        }
        Ok(CapacityProblem { graph, source, ground, p })
    }
}

/// Minimizing potential with its p-energy (the capacity value).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PotentialSolution {
    pub u: Vec<f64>,
    pub energy: f64,
    pub iterations: usize,
    pub residual: f64,
}

impl PotentialSolution {
    /// Recomputes the p-energy of the stored potential.
    pub fn recompute_energy(&self, g: &Graph, p: f64) -> f64 {
        energy(g, &self.u, p)
    }
}

fn energy(g: &Graph, u: &[f64], p: f64) -> f64 {
    g.edges().iter().map(|&(a, b)| (u[a] - u[b]).abs().powf(p)).sum()
}

/// Relative KKT residual: max interior gradient of the p-energy, normalized.
fn kkt_residual(g: &Graph, u: &[f64], p: f64, fixed: &[Option<f64>]) -> f64 {
    let mut max_grad: f64 = 0.0;
    let mut max_drop: f64 = 0.0;
    for v in 0..g.vertex_count() {
        if fixed[v].is_some() {
            continue;
        }
        let mut grad = 0.0;
        for &(w, _) in g.adjacency(v) {
            if w == v {
                continue;
            }
            let drop = u[v] - u[w];
            grad += p * drop.signum() * drop.abs().powf(p - 1.0);
            max_drop = max_drop.max(drop.abs());
        }
        max_grad = max_grad.max(grad.abs());
    }
    max_grad / (p * max_drop.powf(p - 1.0)).max(1e-300)
}

const CG_TOL: f64 = 1e-13;

/// Dirichlet solve of the weighted Laplacian by preconditioned CG.
/// `fixed[v] = Some(value)` pins boundary vertices; weights are per edge.
fn solve_dirichlet(g: &Graph, fixed: &[Option<f64>], w: &[f64]) -> Vec<f64> {
    let n = g.vertex_count();
    let unknown: Vec<usize> = (0..n).filter(|&v| fixed[v].is_none()).collect();
    let mut local = vec![usize::MAX; n];
    for (i, &v) in unknown.iter().enumerate() {
        local[v] = i;
    }
    let k = unknown.len();
    let mut u: Vec<f64> = (0..n).map(|v| fixed[v].unwrap_or(0.0)).collect();
    if k == 0 {
        return u;
    }
    let matvec = |x: &[f64], y: &mut [f64]| {
        for (i, &v) in unknown.iter().enumerate() {
            let mut acc = 0.0;
            for &(nb, e) in g.adjacency(v) {
                if nb == v {
                    continue;
                }
                let xn = if local[nb] == usize::MAX { 0.0 } else { x[local[nb]] };
                acc += w[e] * (x[i] - xn);
            }
            y[i] = acc;
        }
    };
    let mut b = vec![0.0; k];
    for (i, &v) in unknown.iter().enumerate() {
        for &(nb, e) in g.adjacency(v) {
            if nb != v {
                if let Some(val) = fixed[nb] {
                    b[i] += w[e] * val;
                }
            }
        }
    }
    let mut diag = vec![0.0; k];
    for (i, &v) in unknown.iter().enumerate() {
        for &(nb, e) in g.adjacency(v) {
            if nb != v {
                diag[i] += w[e];
            }
        }
        if diag[i] <= 0.0 {
            diag[i] = 1.0;
        }
    }
    let mut x = vec![0.0; k];
    let mut r = b.clone();
    let mut z: Vec<f64> = r.iter().zip(&diag).map(|(ri, di)| ri / di).collect();
    let mut pdir = z.clone();
    let mut rz: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
    let bnorm = b.iter().map(|v| v * v).sum::<f64>().sqrt().max(1e-300);
    let mut ap = vec![0.0; k];
    for _ in 0..50 * k.max(50) {
        let rnorm = r.iter().map(|v| v * v).sum::<f64>().sqrt();
        if rnorm <= CG_TOL * bnorm {
            break;
        }
        matvec(&pdir, &mut ap);
        let pap: f64 = pdir.iter().zip(&ap).map(|(a, b)| a * b).sum();
        if pap <= 0.0 {
            break;
        }
        let alpha = rz / pap;
        for i in 0..k {
            x[i] += alpha * pdir[i];
            r[i] -= alpha * ap[i];
        }
        for i in 0..k {
            z[i] = r[i] / diag[i];
        }
        let rz_new: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..k {
            pdir[i] = z[i] + beta * pdir[i];
        }
    }
    for (i, &v) in unknown.iter().enumerate() {
        u[v] = x[i];
    }
    u
}

const IRLS_ITER_CAP: usize = 4000;
const IRLS_PLATEAU: f64 = 1e-10;
const IRLS_PLATEAU_STREAK: usize = 32;

/// Minimizes the p-energy with u = 1 on the source and u = 0 on the ground.
/// p = 2 reduces to one linear Laplacian solve; other exponents use damped,
/// eps-regularized iteratively reweighted least squares started from the
/// harmonic solution.
pub fn p_capacity(prob: &CapacityProblem, tol: f64) -> Result<PotentialSolution> {
    let g = &prob.graph;
    let n = g.vertex_count();
    let mut fixed: Vec<Option<f64>> = vec![None; n];
    for &v in &prob.source {
        fixed[v] = Some(1.0);
    }
    for &v in &prob.ground {
        fixed[v] = Some(0.0);
    }
    // If no ground vertex is reachable from the source, the capacity is 0
    // with a locally constant potential.
    let mut reach = vec![false; n];
    let mut queue: std::collections::VecDeque<usize> = prob.source.iter().copied().collect();
    for &v in &prob.source {
        reach[v] = true;
    }
    let mut hits_ground = false;
    while let Some(v) = queue.pop_front() {
        if fixed[v] == Some(0.0) {
            hits_ground = true;
            continue;
        }
        for &(u, _) in g.adjacency(v) {
            if !reach[u] {
                reach[u] = true;
                queue.push_back(u);
            }
        }
    }
    if !hits_ground {
        let u: Vec<f64> = (0..n).map(|v| if reach[v] { 1.0 } else { 0.0 }).collect();
        return Ok(PotentialSolution { u, energy: 0.0, iterations: 0, residual: 0.0 });
    }
    let ones = vec![1.0; g.edge_count()];
    let mut u = solve_dirichlet(g, &fixed, &ones);
    clamp_unit(&mut u);
    if prob.p == 2.0 {
        let e = energy(g, &u, 2.0);
        let residual = kkt_residual(g, &u, 2.0, &fixed);
        return Ok(PotentialSolution { u, energy: e, iterations: 1, residual });
    }
    let p = prob.p;
    let alpha = (1.0 / (p - 1.0)).min(1.0).max(0.25);
    let mut eps: f64 = 1e-3;
    let mut prev_energy = energy(g, &u, p);
    let mut streak = 0usize;
    let mut iterations = 0usize;
    let mut weights = vec![0.0; g.edge_count()];
    for it in 0..IRLS_ITER_CAP {
        iterations = it + 1;
        for (e, &(a, b)) in g.edges().iter().enumerate() {
            let d2 = (u[a] - u[b]).powi(2);
            weights[e] = (d2 + eps * eps).powf((p - 2.0) / 2.0);
        }
        let v = solve_dirichlet(g, &fixed, &weights);
        for (ui, vi) in u.iter_mut().zip(&v) {
            *ui += alpha * (vi - *ui);
        }
        clamp_unit(&mut u);
        eps = (eps * 0.85).max(1e-10);
        let e = energy(g, &u, p);
        let rel = (prev_energy - e).abs() / prev_energy.abs().max(1e-300);
        if rel < IRLS_PLATEAU && eps <= 1e-9 {
            streak += 1;
            if streak >= IRLS_PLATEAU_STREAK {
                break;
            }
        } else {
            streak = 0;
        }
        prev_energy = e;
    }
    let residual = kkt_residual(g, &u, p, &fixed);
    if streak < IRLS_PLATEAU_STREAK && residual > tol {
        return Err(Error::NonConvergence { residual });
    }
    let e = energy(g, &u, p);
    Ok(PotentialSolution { u, energy: e, iterations, residual })
}

fn clamp_unit(u: &mut [f64]) {
    for x in u {
        *x = x.clamp(0.0, 1.0);
    }
}

/// Effective resistance between vertex sets: 1 / cap_2(S; Z).
pub fn effective_resistance(g: &Graph, source: &[usize], ground: &[usize]) -> Result<f64> {
    let prob = CapacityProblem::new(g.clone(), source.to_vec(), ground.to_vec(), 2.0)?;
    let sol = p_capacity(&prob, 1e-10)?;
    if sol.energy <= 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(1.0 / sol.energy)
}

/// Capacity profile along a ball exhaustion and its decay diagnostics.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProfileReport {
    pub radii: Vec<usize>,
    pub caps: Vec<f64>,
    /// slope of the linear fit of cap against ln r
    pub log_slope: f64,
    pub first: f64,
    pub last: f64,
    pub verdict: String,
}

/// cap_p from the closed unit ball at `root` to the vertices at distance
/// at least r, for each radius r in the increasing list.
pub fn parabolicity_profile(
    g: &Graph,
    root: usize,
    radii: &[usize],
    p: f64,
) -> Result<ProfileReport> {
    if radii.is_empty() || radii.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter("radii must be strictly increasing".into()));
    }
    if radii[0] < 2 {
        return Err(Error::InvalidParameter("radii must start at 2".into()));
    }
    let dist = g.distances_from(root)?;
    let ecc = g.eccentricity(root)?;
    let max_r = *radii.last().unwrap();
    if max_r > ecc {
        return Err(Error::InvalidParameter(format!(
            "radius {max_r} exceeds the component (eccentricity {ecc})"
        )));
    }
    let source: Vec<usize> =
        (0..g.vertex_count()).filter(|&v| dist[v].map_or(false, |d| d <= 1)).collect();
    let mut caps = Vec::with_capacity(radii.len());
    for &r in radii {
        let ground: Vec<usize> =
            (0..g.vertex_count()).filter(|&v| dist[v].map_or(false, |d| d >= r)).collect();
        let prob = CapacityProblem::new(g.clone(), source.clone(), ground, p)?;
        caps.push(p_capacity(&prob, 1e-8)?.energy);
    }
    let xs: Vec<f64> = radii.iter().map(|&r| (r as f64).ln()).collect();
    let log_slope = linear_fit_slope(&xs, &caps);
    let first = caps[0];
    let last = *caps.last().unwrap();
    let verdict = if last < 0.5 * first && log_slope < 0.0 {
        "decaying toward 0".to_string()
    } else {
        "bounded away from 0".to_string()
    };
    Ok(ProfileReport { radii: radii.to_vec(), caps, log_slope, first, last, verdict })
}

fn linear_fit_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        0.0
    } else {
        sxy / sxx
    }
}

/// Fraction of simple-random-walk runs from `root` that hit the boundary
/// before returning to the root, with its binomial standard error.
pub fn escape_probability_mc(
    g: &Graph,
    root: usize,
    boundary: &[usize],
    trials: usize,
    seed: u64,
) -> Result<(f64, f64)> {
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be positive".into()));
    }
    if boundary.is_empty() {
        return Err(Error::InvalidParameter("boundary must be non-empty".into()));
    }
    let n = g.vertex_count();
    if root >= n {
        return Err(Error::VertexOutOfRange { vertex: root, count: n });
    }
    let mut is_boundary = vec![false; n];
    for &v in boundary {
        if v >= n {
            return Err(Error::VertexOutOfRange { vertex: v, count: n });
        }
        is_boundary[v] = true;
    }
    if is_boundary[root] {
        return Err(Error::InvalidParameter("root must not lie on the boundary".into()));
    }
    let dist = g.distances_from(root)?;
    if !boundary.iter().any(|&v| dist[v].is_some()) {
        return Err(Error::InvalidParameter("boundary unreachable from root".into()));
    }
    if g.degree(root) == 0 {
        return Err(Error::InvalidParameter("root is isolated".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut hits = 0usize;
    for _ in 0..trials {
        let mut cur = root;
        loop {
            let adj = g.adjacency(cur);
            cur = adj[rng.gen_range(0..adj.len())].0;
            if is_boundary[cur] {
                hits += 1;
                break;
            }
            if cur == root {
                break;
            }
        }
    }
    let est = hits as f64 / trials as f64;
    let se = (est * (1.0 - est) / trials as f64).sqrt();
    Ok((est, se))
}

/// Family of self-avoiding paths on a graph, given as vertex sequences.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PathFamily {
    pub vertex_count: usize,
    pub paths: Vec<Vec<usize>>,
}

impl PathFamily {
    pub fn new(g: &Graph, paths: Vec<Vec<usize>>) -> Result<Self> {
        for path in &paths {
            if path.is_empty() {
                return Err(Error::InvalidParameter("empty path".into()));
            }
            let mut seen = std::collections::HashSet::new();
            for &v in path {
                if v >= g.vertex_count() {
                    return Err(Error::VertexOutOfRange { vertex: v, count: g.vertex_count() });
                }
                if !seen.insert(v) {
                    return Err(Error::InvalidParameter("path is not self-avoiding".into()));
                }
            }
            for w in path.windows(2) {
                if !g.has_edge_between(w[0], w[1]) {
                    return Err(Error::InvalidParameter(format!(
                        "consecutive path vertices {} and {} are not adjacent",
                        w[0], w[1]
                    )));
                }
            }
        }
        Ok(PathFamily { vertex_count: g.vertex_count(), paths })
    }
}

const MODULUS_PATH_CAP: usize = 200_000;
const MODULUS_ITER_CAP: usize = 200_000;

/// Vertex p-modulus of an explicit path family: inf of sum rho(v)^p over
/// densities with sum rho >= 1 along every path. Solved by projected dual
/// ascent with Armijo backtracking; the returned rho is admissible.
pub fn modulus_small(fam: &PathFamily, p: f64) -> Result<(f64, Vec<f64>)> {
    if !(p > 1.0) {
        return Err(Error::InvalidParameter("exponent p must be > 1".into()));
    }
    if fam.paths.is_empty() {
        // no constraints: inf over the empty constraint set is 0
        return Ok((0.0, vec![0.0; fam.vertex_count]));
    }
    if fam.paths.len() > MODULUS_PATH_CAP {
        return Err(Error::BudgetExceeded(format!("more than {MODULUS_PATH_CAP} paths")));
    }
    let m = fam.paths.len();
    let mut paths_of: Vec<Vec<usize>> = vec![Vec::new(); fam.vertex_count];
    for (i, path) in fam.paths.iter().enumerate() {
        for &v in path {
            paths_of[v].push(i);
        }
    }
    let q = p / (p - 1.0);
    let rho_of = |sigma: f64| (sigma / p).powf(1.0 / (p - 1.0));
    let dual = |lambda: &[f64], sigma: &[f64]| -> f64 {
        let sum_l: f64 = lambda.iter().sum();
        let pen: f64 = sigma.iter().map(|&s| (s / p).powf(q)).sum();
        sum_l - (p - 1.0) * pen
    };
    let compute_sigma = |lambda: &[f64], sigma: &mut [f64]| {
        for s in sigma.iter_mut() {
            *s = 0.0;
        }
        for (i, path) in fam.paths.iter().enumerate() {
            for &v in path {
                sigma[v] += lambda[i];
            }
        }
    };
    let mut lambda = vec![1.0 / fam.paths[0].len() as f64; m];
    let mut sigma = vec![0.0; fam.vertex_count];
    compute_sigma(&lambda, &mut sigma);
    let mut gval = dual(&lambda, &sigma);
    let mut step = 1.0;
    let mut best = f64::INFINITY;
    let mut best_rho = vec![0.0; fam.vertex_count];
    for _ in 0..MODULUS_ITER_CAP {
        let rho: Vec<f64> = sigma.iter().map(|&s| rho_of(s)).collect();
        // primal candidate: scale to admissibility
        let min_sum = fam
            .paths
            .iter()
            .map(|path| path.iter().map(|&v| rho[v]).sum::<f64>())
            .fold(f64::INFINITY, f64::min);
        if min_sum > 0.0 {
            let scaled: Vec<f64> = rho.iter().map(|r| r / min_sum).collect();
            let primal: f64 = scaled.iter().map(|r| r.powf(p)).sum();
            if primal < best {
                best = primal;
                best_rho = scaled;
            }
            if best - gval <= 1e-11 * best.max(1e-30) {
                break;
            }
        }
        let grad: Vec<f64> = fam
            .paths
            .iter()
            .map(|path| 1.0 - path.iter().map(|&v| rho[v]).sum::<f64>())
            .collect();
        // backtracking projected ascent
        let mut accepted = false;
        for _ in 0..60 {
            let cand: Vec<f64> =
                lambda.iter().zip(&grad).map(|(l, g)| (l + step * g).max(0.0)).collect();
            compute_sigma(&cand, &mut sigma);
            let gc = dual(&cand, &sigma);
            let lin: f64 =
                cand.iter().zip(&lambda).zip(&grad).map(|((c, l), g)| (c - l) * g).sum();
            if gc >= gval + 1e-4 * lin {
                lambda = cand;
                gval = gc;
                step *= 1.2;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    // nudge to strict admissibility
    for r in &mut best_rho {
        *r *= 1.0 + 1e-12;
    }
    let modulus: f64 = best_rho.iter().map(|r| r.powf(p)).sum();
    Ok((modulus, best_rho))
}

/// Side-by-side capacity and vertex-modulus of the self-avoiding paths from
/// S to the distance-r sphere, with the valence-dependent comparison band.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CapModComparison {
    pub cap: f64,
    pub modulus: f64,
    pub ratio: f64,
    /// band constant c = 2 (max valence + 1); ratio is asserted in [1/c, c]
    pub band: f64,
    pub within_band: bool,
    pub path_count: usize,
}

const PATH_ENUM_CAP: usize = 200_000;

pub fn compare_cap_mod(g: &Graph, source: &[usize], r: usize, p: f64) -> Result<CapModComparison> {
    if source.is_empty() {
        return Err(Error::InvalidParameter("source must be non-empty".into()));
    }
    if r < 1 {
        return Err(Error::InvalidParameter("radius must be >= 1".into()));
    }
    let n = g.vertex_count();
    let mut dist = vec![usize::MAX; n];
    let mut queue = std::collections::VecDeque::new();
    for &s in source {
        if s >= n {
            return Err(Error::VertexOutOfRange { vertex: s, count: n });
        }
        dist[s] = 0;
        queue.push_back(s);
    }
    while let Some(v) = queue.pop_front() {
        for &(u, _) in g.adjacency(v) {
            if dist[u] == usize::MAX {
                dist[u] = dist[v] + 1;
                queue.push_back(u);
            }
        }
    }
    let ground: Vec<usize> = (0..n).filter(|&v| dist[v] != usize::MAX && dist[v] >= r).collect();
    if ground.is_empty() {
        return Err(Error::InvalidParameter("sphere of radius r is empty".into()));
    }
    let prob = CapacityProblem::new(g.clone(), source.to_vec(), ground, p)?;
    let cap = p_capacity(&prob, 1e-8)?.energy;
    // enumerate self-avoiding paths from S to the sphere {d = r}; interior
    // vertices stay strictly inside and outside S
    let in_source: Vec<bool> = (0..n).map(|v| source.contains(&v)).collect();
    let mut paths = Vec::new();
    let mut visited = vec![false; n];
    for &s in source {
        let mut stack = vec![s];
        visited[s] = true;
        dfs_paths(g, &dist, &in_source, r, &mut stack, &mut visited, &mut paths)?;
        visited[s] = false;
    }
    let fam = PathFamily::new(g, paths)?;
    let (modulus, _) = modulus_small(&fam, p)?;
    let ratio = if modulus > 0.0 { cap / modulus } else { f64::INFINITY };
    let band = 2.0 * (g.max_degree() as f64 + 1.0);
    let within_band = ratio >= 1.0 / band && ratio <= band;
    Ok(CapModComparison { cap, modulus, ratio, band, within_band, path_count: fam.paths.len() })
}

fn dfs_paths(
    g: &Graph,
    dist: &[usize],
    in_source: &[bool],
    r: usize,
    stack: &mut Vec<usize>,
    visited: &mut Vec<bool>,
    paths: &mut Vec<Vec<usize>>,
) -> Result<()> {
    let cur = *stack.last().unwrap();
    for &(u, _) in g.adjacency(cur) {
        if visited[u] || in_source[u] || dist[u] == usize::MAX {
            continue;
        }
        if dist[u] >= r {
            if dist[u] == r {
                let mut path = stack.clone();
                path.push(u);
                paths.push(path);
                if paths.len() > PATH_ENUM_CAP {
                    return Err(Error::BudgetExceeded("path enumeration cap".into()));
                }
            }
            continue;
        }
        stack.push(u);
        visited[u] = true;
        dfs_paths(g, dist, in_source, r, stack, visited, paths)?;
        visited[u] = false;
        stack.pop();
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::genfam;

    fn path_cap(l: usize, p: f64) -> PotentialSolution {
        let g = genfam::path(l + 1).unwrap();
        let prob = CapacityProblem::new(g, vec![0], vec![l], p).unwrap();
        p_capacity(&prob, 1e-8).unwrap()
    }

    #[test]
    fn path_capacity_closed_form() {
        for &p in &[1.5, 2.0, 3.0] {
            for l in [2usize, 5, 16] {
                let sol = path_cap(l, p);
                let expect = (l as f64).powf(1.0 - p);
                assert!(
                    (sol.energy - expect).abs() <= 1e-6 * expect,
                    "L={l} p={p}: {} vs {expect}",
                    sol.energy
                );
            }
        }
    }

    #[test]
    fn single_edge_capacity_is_one() {
        for &p in &[1.5, 2.0, 3.0] {
            let sol = path_cap(1, p);
            assert!((sol.energy - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn p3_midpoint_is_half() {
        let sol = path_cap(2, 2.0);
        assert!((sol.u[1] - 0.5).abs() < 1e-10);
        assert!((sol.energy - 0.5).abs() < 1e-10);
    }

    #[test]
    fn maximum_principle_and_energy_recompute() {
        let g = genfam::torus_grid(6).unwrap().0;
        let prob = CapacityProblem::new(g.clone(), vec![0], vec![20, 21], 3.0).unwrap();
        let sol = p_capacity(&prob, 1e-6).unwrap();
        assert!(sol.u.iter().all(|&x| (0.0..=1.0).contains(&x)));
        let re = sol.recompute_energy(&g, 3.0);
        assert!((re - sol.energy).abs() <= 1e-12 * sol.energy.max(1e-300));
    }

    #[test]
    fn disconnected_source_ground_gives_zero() {
        let g = Graph::new(4, &[(0, 1), (2, 3)]).unwrap();
        let prob = CapacityProblem::new(g, vec![0], vec![2], 2.0).unwrap();
        let sol = p_capacity(&prob, 1e-8).unwrap();
        assert_eq!(sol.energy, 0.0);
        assert_eq!(sol.u, vec![1.0, 1.0, 0.0, 0.0]);
    }

    #[test]
    fn resistance_series_and_parallel() {
        let g = genfam::path(6).unwrap();
        let r = effective_resistance(&g, &[0], &[5]).unwrap();
        assert!((r - 5.0).abs() < 1e-8);
        let g = Graph::new(2, &[(0, 1), (0, 1)]).unwrap();
        let r = effective_resistance(&g, &[0], &[1]).unwrap();
        assert!((r - 0.5).abs() < 1e-10);
    }

    #[test]
    fn grid_corner_resistance() {
        // 3x3 grid, opposite corners: R = 3/2
        let g = genfam::planar_grid(3).unwrap().0;
        let r = effective_resistance(&g, &[0], &[8]).unwrap();
        assert!((r - 1.5).abs() < 1e-8, "{r}");
    }

    #[test]
    fn capacity_consistency_with_resistance() {
        let g = genfam::torus_grid(5).unwrap().0;
        let prob = CapacityProblem::new(g.clone(), vec![0], vec![12], 2.0).unwrap();
        let sol = p_capacity(&prob, 1e-10).unwrap();
        let r = effective_resistance(&g, &[0], &[12]).unwrap();
        assert!((sol.energy * r - 1.0).abs() < 1e-8);
    }

    #[test]
    fn profile_on_path_is_inverse_r_minus_one() {
        let g = genfam::path(40).unwrap();
        let radii: Vec<usize> = (2..=12).collect();
        let rep = parabolicity_profile(&g, 0, &radii, 2.0).unwrap();
        for (&r, &cap) in radii.iter().zip(&rep.caps) {
            let expect = 1.0 / (r as f64 - 1.0);
            assert!((cap - expect).abs() < 1e-9, "r={r}: {cap} vs {expect}");
        }
        assert_eq!(rep.verdict, "decaying toward 0");
    }

    #[test]
    fn profile_monotone_on_torus() {
        let g = genfam::torus_grid(16).unwrap().0;
        let radii = vec![2, 3, 4, 5, 6, 7];
        let rep = parabolicity_profile(&g, 0, &radii, 2.0).unwrap();
        for w in rep.caps.windows(2) {
            assert!(w[1] <= w[0] + 1e-10);
        }
    }

    #[test]
    fn profile_radius_exceeding_component_errors() {
        let g = genfam::path(5).unwrap();
        assert!(parabolicity_profile(&g, 0, &[2, 10], 2.0).is_err());
    }

    #[test]
    fn escape_forced_cases() {
        let g = genfam::path(2).unwrap();
        let (est, _) = escape_probability_mc(&g, 0, &[1], 1000, 1).unwrap();
        assert_eq!(est, 1.0);
        let g = genfam::cycle(5).unwrap();
        let (est, _) = escape_probability_mc(&g, 0, &[1, 4], 1000, 1).unwrap();
        assert_eq!(est, 1.0);
        assert!(escape_probability_mc(&g, 0, &[1], 0, 1).is_err());
        assert!(escape_probability_mc(&g, 0, &[], 10, 1).is_err());
        assert!(escape_probability_mc(&g, 0, &[0], 10, 1).is_err());
    }

    #[test]
    fn escape_matches_electrical_identity_on_cycle() {
        let g = genfam::cycle(10).unwrap();
        let (est, se) = escape_probability_mc(&g, 0, &[5], 200_000, 7).unwrap();
        let r = effective_resistance(&g, &[0], &[5]).unwrap();
        let expect = 1.0 / (2.0 * r);
        assert!((est - expect).abs() <= 3.0 * se.max(1e-4), "{est} vs {expect}");
    }

    #[test]
    fn modulus_single_and_disjoint_paths() {
        let g = genfam::path(4).unwrap();
        let fam = PathFamily::new(&g, vec![vec![0, 1, 2, 3]]).unwrap();
        for &p in &[1.5, 2.0, 3.0] {
            let (m, rho) = modulus_small(&fam, p).unwrap();
            let expect = 4f64.powf(1.0 - p);
            assert!((m - expect).abs() < 1e-6 * expect, "p={p}: {m} vs {expect}");
            let s: f64 = fam.paths[0].iter().map(|&v| rho[v]).sum();
            assert!(s >= 1.0 - 1e-9);
        }
        // two vertex-disjoint copies
        let g = Graph::new(8, &[(0, 1), (1, 2), (2, 3), (4, 5), (5, 6), (6, 7)]).unwrap();
        let fam = PathFamily::new(&g, vec![vec![0, 1, 2, 3], vec![4, 5, 6, 7]]).unwrap();
        let (m, _) = modulus_small(&fam, 2.0).unwrap();
        assert!((m - 0.5).abs() < 1e-6);
    }

    #[test]
    fn modulus_empty_family_is_zero() {
        let g = genfam::path(3).unwrap();
        let fam = PathFamily::new(&g, vec![]).unwrap();
        assert_eq!(modulus_small(&fam, 2.0).unwrap().0, 0.0);
    }

    #[test]
    fn compare_cap_mod_examples() {
        // P4, S = {0}, sphere {3}: cap 1/3, modulus 1/4, ratio 4/3
        let g = genfam::path(4).unwrap();
        let c = compare_cap_mod(&g, &[0], 3, 2.0).unwrap();
        assert!((c.cap - 1.0 / 3.0).abs() < 1e-8);
        assert!((c.modulus - 0.25).abs() < 1e-6);
        assert!((c.ratio - 4.0 / 3.0).abs() < 1e-5);
        assert!(c.within_band);
        // star K_{1,3} from the center: cap 3
        let g = Graph::new(4, &[(0, 1), (0, 2), (0, 3)]).unwrap();
        let c = compare_cap_mod(&g, &[0], 1, 2.0).unwrap();
        assert!((c.cap - 3.0).abs() < 1e-8);
        assert!(c.within_band);
        // single edge: cap 1, modulus 1/2, ratio 2
        let g = genfam::path(2).unwrap();
        let c = compare_cap_mod(&g, &[0], 1, 2.0).unwrap();
        assert!((c.cap - 1.0).abs() < 1e-10);
        assert!((c.modulus - 0.5).abs() < 1e-6);
        assert!((c.ratio - 2.0).abs() < 1e-5);
    }

    #[test]
    fn capacity_monotone_under_edge_deletion() {
        // removing edges never increases cap_p of the same (S, Z)
        use rand::seq::SliceRandom;
        let g = genfam::torus_grid(5).unwrap().0;
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for &p in &[2.0, 3.0] {
            let prob = CapacityProblem::new(g.clone(), vec![0], vec![12], p).unwrap();
            let full = p_capacity(&prob, 1e-7).unwrap().energy;
            for _ in 0..5 {
                let mut edges: Vec<_> = g.edges().to_vec();
                edges.shuffle(&mut rng);
                edges.truncate(g.edge_count() - 4);
                let h = Graph::new(g.vertex_count(), &edges).unwrap();
                let dist = h.distances_from(0).unwrap();
                if dist[12].is_none() {
                    continue;
                }
                let prob = CapacityProblem::new(h, vec![0], vec![12], p).unwrap();
                let sub = p_capacity(&prob, 1e-7).unwrap().energy;
                assert!(sub <= full * (1.0 + 1e-6), "p={p}: {sub} > {full}");
            }
        }
    }

    #[test]
    fn problem_and_solution_json_round_trip() {
        let g = genfam::cycle(5).unwrap();
        let prob = CapacityProblem::new(g, vec![0], vec![2, 3], 2.5).unwrap();
        let sol = p_capacity(&prob, 1e-8).unwrap();
        let pj = serde_json::to_string(&prob).unwrap();
        let sj = serde_json::to_string(&sol).unwrap();
        let prob2: CapacityProblem = serde_json::from_str(&pj).unwrap();
        let sol2: PotentialSolution = serde_json::from_str(&sj).unwrap();
        assert_eq!(prob.source, prob2.source);
        assert_eq!(prob.p, prob2.p);
        assert_eq!(sol.u, sol2.u);
        assert_eq!(sol.energy, sol2.energy);
        assert_eq!(serde_json::to_string(&prob2).unwrap(), pj);
    }
}
