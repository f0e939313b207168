//! Cheeger constants (exact by enumeration on small graphs, bounded via
//! spectral sweep cuts on large ones) and expander certification.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::graph::Graph;

/// A vertex cut A with |A| <= |V|/2 and its edge-boundary ratio.
#[derive(Debug, Clone)]
pub struct CutResult {
    pub boundary: usize,
    pub size: usize,
    pub value: f64,
    pub witness: Vec<usize>,
}

impl CutResult {
    fn new(g: &Graph, witness: Vec<usize>) -> Self {
        let boundary = boundary_edges(g, &witness);
        let size = witness.len();
        CutResult { boundary, size, value: boundary as f64 / size as f64, witness }
    }

    /// Recomputes |dA|/|A| from the witness; must reproduce `value` exactly.
    pub fn recompute(&self, g: &Graph) -> f64 {
        boundary_edges(g, &self.witness) as f64 / self.witness.len() as f64
    }
}

/// Number of edges between the vertex set and its complement.
pub fn boundary_edges(g: &Graph, set: &[usize]) -> usize {
    let mut inside = vec![false; g.vertex_count()];
    for &v in set {
        inside[v] = true;
    }
    g.edges().iter().filter(|&&(u, v)| inside[u] != inside[v]).count()
}

const CHEEGER_EXACT_CAP: usize = 24;

/// Global minimum of |dA|/|A| over non-empty A with |A| <= |V|/2, by Gray-code
/// subset enumeration with incremental boundary updates. Ties are broken by
/// the lexicographically smallest witness.
pub fn cheeger_exact(g: &Graph) -> Result<CutResult> {
    let n = g.vertex_count();
    if n > CHEEGER_EXACT_CAP {
        return Err(Error::SizeCapExceeded(format!(
            "cheeger_exact is capped at {CHEEGER_EXACT_CAP} vertices"
        )));
    }
    if n < 2 || !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let mut in_set = vec![false; n];
    let mut cut = 0usize;
    let mut size = 0usize;
    // best = (boundary, size, witness mask); fractions compared exactly
    let mut best: Option<(usize, usize, u32)> = None;
    let mut mask: u32 = 0;
    for k in 1u64..(1u64 << n) {
        let v = k.trailing_zeros() as usize;
        // flip v
        let mut to_in = 0usize;
        let mut to_out = 0usize;
        for &(u, _) in g.adjacency(v) {
            if u == v {
                continue;
            }
            if in_set[u] {
                to_in += 1;
            } else {
                to_out += 1;
            }
        }
        if in_set[v] {
            in_set[v] = false;
            mask &= !(1 << v);
            size -= 1;
            cut = cut + to_in - to_out;
        } else {
            in_set[v] = true;
            mask |= 1 << v;
            size += 1;
            cut = cut + to_out - to_in;
        }
        if size >= 1 && 2 * size <= n {
            let better = match best {
                None => true,
                Some((bb, bs, bm)) => {
                    // cut/size < bb/bs, exactly
                    let lhs = cut * bs;
                    let rhs = bb * size;
                    lhs < rhs || (lhs == rhs && lex_smaller(mask, bm))
                }
            };
            if better {
                best = Some((cut, size, mask));
            }
        }
    }
    let (_, _, bm) = best.expect("n >= 2 guarantees a candidate");
    let witness: Vec<usize> = (0..n).filter(|&v| bm >> v & 1 == 1).collect();
    Ok(CutResult::new(g, witness))
}

/// Lexicographic order on the sorted vertex lists of two bitmask sets.
fn lex_smaller(a: u32, b: u32) -> bool {
    if a == b {
        return false;
    }
    let mut x = a;
    let mut y = b;
    loop {
        match (x == 0, y == 0) {
            (true, _) => return y != 0,
            (false, true) => return false,
            _ => {}
        }
        let i = x.trailing_zeros();
        let j = y.trailing_zeros();
        if i != j {
            return i < j;
        }
        x &= x - 1;
        y &= y - 1;
    }
}

/// Which Laplacian `lambda2` refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LaplacianKind {
    Combinatorial,
    Normalized,
}

fn laplacian_matvec(g: &Graph, kind: LaplacianKind, x: &[f64], y: &mut [f64]) {
    let n = g.vertex_count();
    match kind {
        LaplacianKind::Combinatorial => {
            for v in 0..n {
                let mut acc = g.degree(v) as f64 * x[v];
                for &(u, _) in g.adjacency(v) {
                    acc -= x[u];
                }
                y[v] = acc;
            }
        }
        LaplacianKind::Normalized => {
            let isq: Vec<f64> = (0..n).map(|v| 1.0 / (g.degree(v) as f64).sqrt()).collect();
            for v in 0..n {
                let mut acc = x[v];
                for &(u, _) in g.adjacency(v) {
                    acc -= isq[v] * isq[u] * x[u];
                }
                y[v] = acc;
            }
        }
    }
}

fn kernel_vector(g: &Graph, kind: LaplacianKind) -> Vec<f64> {
    let n = g.vertex_count();
    let mut k: Vec<f64> = match kind {
        LaplacianKind::Combinatorial => vec![1.0; n],
        LaplacianKind::Normalized => (0..n).map(|v| (g.degree(v) as f64).sqrt()).collect(),
    };
    let norm = k.iter().map(|x| x * x).sum::<f64>().sqrt();
    for x in &mut k {
        *x /= norm;
    }
    k
}

fn dense_laplacian(g: &Graph, kind: LaplacianKind) -> DMatrix<f64> {
    let n = g.vertex_count();
    let mut m = DMatrix::zeros(n, n);
    for v in 0..n {
        let mut e = DVector::zeros(n);
        e[v] = 1.0;
        let mut col = vec![0.0; n];
        laplacian_matvec(g, kind, e.as_slice(), &mut col);
        for u in 0..n {
            m[(u, v)] = col[u];
        }
    }
    // symmetrize roundoff
    for i in 0..n {
        for j in i + 1..n {
            let avg = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = avg;
            m[(j, i)] = avg;
        }
    }
    m
}

const DENSE_EIG_CAP: usize = 64;
const LANCZOS_TOL: f64 = 1e-8;
const LANCZOS_MAX_STEPS: usize = 600;

/// Second-smallest Laplacian eigenvalue of a connected graph.
///
/// Dense solve up to 64 vertices; otherwise Lanczos with full
/// reorthogonalization, deflating the known kernel vector, to relative
/// tolerance 1e-8.
pub fn lambda2(g: &Graph, kind: LaplacianKind) -> Result<f64> {
    Ok(fiedler_pair(g, kind)?.0)
}

/// Fiedler scores: an eigenvector attaining lambda2, for sweep cuts.
pub fn fiedler_vector(g: &Graph, kind: LaplacianKind) -> Result<Vec<f64>> {
    Ok(fiedler_pair(g, kind)?.1)
}

fn fiedler_pair(g: &Graph, kind: LaplacianKind) -> Result<(f64, Vec<f64>)> {
    let n = g.vertex_count();
    if n < 2 || !g.is_connected() {
        return Err(Error::Disconnected);
    }
    if n <= DENSE_EIG_CAP {
        return dense_lambda2(g, kind);
    }
    lanczos_lambda2(g, kind)
}

/// Dense-eigensolver route; also serves as the internal oracle for the
/// iterative path.
pub fn dense_lambda2(g: &Graph, kind: LaplacianKind) -> Result<(f64, Vec<f64>)> {
    let m = dense_laplacian(g, kind);
    let eig = m.symmetric_eigen();
    let mut idx: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    idx.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap());
    let second = idx[1];
    let vec: Vec<f64> = eig.eigenvectors.column(second).iter().copied().collect();
    Ok((eig.eigenvalues[second].max(0.0), vec))
}

fn lanczos_lambda2(g: &Graph, kind: LaplacianKind) -> Result<(f64, Vec<f64>)> {
    use rand::Rng;
    use rand::SeedableRng;
    let n = g.vertex_count();
    let kernel = kernel_vector(g, kind);
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x5eed_1a2c);
    let mut v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    orthogonalize(&mut v, std::slice::from_ref(&kernel));
    normalize(&mut v);
    let mut basis: Vec<Vec<f64>> = vec![v.clone()];
    let mut alphas: Vec<f64> = Vec::new();
    let mut betas: Vec<f64> = Vec::new();
    let mut w = vec![0.0; n];
    let mut prev_theta = f64::INFINITY;
    for step in 0..LANCZOS_MAX_STEPS.min(n) {
        laplacian_matvec(g, kind, &basis[step], &mut w);
        let alpha = dot(&w, &basis[step]);
        alphas.push(alpha);
        for (wi, bi) in w.iter_mut().zip(&basis[step]) {
            *wi -= alpha * bi;
        }
        if step > 0 {
            let beta_prev = betas[step - 1];
            for (wi, bi) in w.iter_mut().zip(&basis[step - 1]) {
                *wi -= beta_prev * bi;
            }
        }
        // full reorthogonalization against the kernel and the whole basis
        orthogonalize(&mut w, std::slice::from_ref(&kernel));
        orthogonalize(&mut w, &basis);
        let beta = dot(&w, &w).sqrt();
        let breakdown = beta < 1e-13;
        let check = breakdown || step + 1 == LANCZOS_MAX_STEPS.min(n) || (step + 1) % 5 == 0;
        if check && !alphas.is_empty() {
            let (theta, s) = tridiag_smallest(&alphas, &betas);
            let converged = (theta - prev_theta).abs() <= LANCZOS_TOL * theta.abs().max(1e-300);
            if breakdown || converged {
                let mut vec = vec![0.0; n];
                for (coef, b) in s.iter().zip(&basis) {
                    for (vi, bi) in vec.iter_mut().zip(b) {
                        *vi += coef * bi;
                    }
                }
                return Ok((theta.max(0.0), vec));
            }
            prev_theta = theta;
        }
        if breakdown {
            break;
        }
        betas.push(beta);
        let next: Vec<f64> = w.iter().map(|x| x / beta).collect();
        basis.push(next);
    }
    let (theta, _) = tridiag_smallest(&alphas, &betas);
    Err(Error::NonConvergence { residual: (theta - prev_theta).abs() })
}

fn tridiag_smallest(alphas: &[f64], betas: &[f64]) -> (f64, Vec<f64>) {
    let k = alphas.len();
    let mut t = DMatrix::zeros(k, k);
    for i in 0..k {
        t[(i, i)] = alphas[i];
        if i + 1 < k {
            t[(i, i + 1)] = betas[i];
            t[(i + 1, i)] = betas[i];
        }
    }
    let eig = t.symmetric_eigen();
    let mut best = 0;
    for i in 1..k {
        if eig.eigenvalues[i] < eig.eigenvalues[best] {
            best = i;
        }
    }
    (eig.eigenvalues[best], eig.eigenvectors.column(best).iter().copied().collect())
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn normalize(v: &mut [f64]) {
    let n = dot(v, v).sqrt();
    for x in v {
        *x /= n;
    }
}

fn orthogonalize(v: &mut [f64], basis: &[Vec<f64>]) {
    for b in basis {
        let c = dot(v, b);
        for (vi, bi) in v.iter_mut().zip(b) {
            *vi -= c * bi;
        }
    }
}

/// Best prefix cut of the score-sorted vertex order by |dA|/|A| with
/// |A| <= |V|/2. Constant scores fall back to BFS order from vertex 0.
pub fn sweep_cut(g: &Graph, scores: &[f64]) -> Result<CutResult> {
    let n = g.vertex_count();
    if scores.len() != n {
        return Err(Error::InvalidParameter("one score per vertex required".into()));
    }
    if scores.iter().any(|s| !s.is_finite()) {
        return Err(Error::InvalidParameter("scores must be finite".into()));
    }
    let constant = scores.windows(2).all(|w| w[0] == w[1]);
    let order: Vec<usize> = if constant {
        bfs_order(g, 0)
    } else {
        let mut idx: Vec<usize> = (0..n).collect();
        idx.sort_by(|&a, &b| scores[a].partial_cmp(&scores[b]).unwrap().then(a.cmp(&b)));
        idx
    };
    let mut in_set = vec![false; n];
    let mut cut = 0usize;
    let mut best: Option<(usize, usize, usize)> = None; // (boundary, size, prefix len)
    for (k, &v) in order.iter().enumerate() {
        for &(u, _) in g.adjacency(v) {
            if u == v {
                continue;
            }
            if in_set[u] {
                cut -= 1;
            } else {
                cut += 1;
            }
        }
        in_set[v] = true;
        let size = k + 1;
        if 2 * size <= n {
            let better = match best {
                None => true,
                Some((bb, bs, _)) => cut * bs < bb * size,
            };
            if better {
                best = Some((cut, size, size));
            }
        }
    }
    let (_, _, len) =
        best.ok_or_else(|| Error::InvalidParameter("graph too small for a sweep cut".into()))?;
    let mut witness: Vec<usize> = order[..len].to_vec();
    witness.sort_unstable();
    Ok(CutResult::new(g, witness))
}

fn bfs_order(g: &Graph, start: usize) -> Vec<usize> {
    let mut order = Vec::with_capacity(g.vertex_count());
    let mut seen = vec![false; g.vertex_count()];
    let mut queue = std::collections::VecDeque::from([start]);
    seen[start] = true;
    while let Some(v) = queue.pop_front() {
        order.push(v);
        for &(u, _) in g.adjacency(v) {
            if !seen[u] {
                seen[u] = true;
                queue.push_back(u);
            }
        }
    }
    for v in 0..g.vertex_count() {
        if !seen[v] {
            order.push(v);
        }
    }
    order
}

/// Certificate that lambda2/2 is a lower bound on the Cheeger constant.
#[derive(Debug, Clone, Copy)]
pub struct ExpanderCertificate {
    pub lambda2: f64,
    pub bound: f64,
    pub certified: bool,
}

/// Certifies h(G) >= eps via the rigorous bound lambda2/2 <= h.
pub fn expander_certify(g: &Graph, eps: f64) -> Result<ExpanderCertificate> {
    let l2 = lambda2(g, LaplacianKind::Combinatorial)?;
    let bound = l2 / 2.0;
    Ok(ExpanderCertificate { lambda2: l2, bound, certified: bound >= eps })
}
