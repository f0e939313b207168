//! Independent oracles for the acceptance suite. These deliberately avoid the
//! library's own algorithms: the Cheeger oracle enumerates subsets by plain
//! bitmask, the isomorphism oracle is a backtracking permutation search, and
//! the support oracle is the quadratic definition taken literally.

use graphlim::graph::{Graph, RootedSubgraph};
use graphlim::pointsupport::{CenterMode, FiniteMetric};
use rand::Rng;

/// Minimum of |dA|/|A| over all non-empty A with |A| <= |V|/2, by direct
/// enumeration of bitmasks and edge counting.
pub fn brute_cheeger(g: &Graph) -> f64 {
    let n = g.vertex_count();
    assert!(n >= 2 && n <= 20, "oracle is exponential; keep instances small");
    let mut best = f64::INFINITY;
    for mask in 1u32..(1 << n) {
        let size = mask.count_ones() as usize;
        if 2 * size > n {
            continue;
        }
        let boundary = g
            .edges()
            .iter()
            .filter(|&&(a, b)| (mask >> a) & 1 != (mask >> b) & 1)
            .count();
        let value = boundary as f64 / size as f64;
        if value < best {
            best = value;
        }
    }
    best
}

fn multiplicity_matrix(g: &Graph) -> Vec<Vec<usize>> {
    let n = g.vertex_count();
    let mut m = vec![vec![0usize; n]; n];
    for &(a, b) in g.edges() {
        m[a][b] += 1;
        if a != b {
            m[b][a] += 1;
        }
    }
    m
}

/// Root-preserving isomorphism of multigraphs by exhaustive backtracking over
/// vertex bijections, pruned only by degree and partial-map consistency.
pub fn rooted_isomorphic(a: &RootedSubgraph, b: &RootedSubgraph) -> bool {
    let (ga, gb) = (&a.graph, &b.graph);
    let n = ga.vertex_count();
    if n != gb.vertex_count() || ga.edge_count() != gb.edge_count() {
        return false;
    }
    let (ma, mb) = (multiplicity_matrix(ga), multiplicity_matrix(gb));
    // place the root first, then the remaining vertices in index order
    let mut order = vec![a.root];
    order.extend((0..n).filter(|&v| v != a.root));
    let mut map = vec![usize::MAX; n];
    let mut used = vec![false; n];
    map[a.root] = b.root;
    used[b.root] = true;
    if ga.degree(a.root) != gb.degree(b.root) || ma[a.root][a.root] != mb[b.root][b.root] {
        return false;
    }
    extend_map(&ma, &mb, ga, gb, &order, 1, &mut map, &mut used)
}

#[allow(clippy::too_many_arguments)]
fn extend_map(
    ma: &[Vec<usize>],
    mb: &[Vec<usize>],
    ga: &Graph,
    gb: &Graph,
    order: &[usize],
    k: usize,
    map: &mut [usize],
    used: &mut [bool],
) -> bool {
    if k == order.len() {
        return true;
    }
    let v = order[k];
    for img in 0..map.len() {
        if used[img]
            || ga.degree(v) != gb.degree(img)
            || ma[v][v] != mb[img][img]
            || order[..k].iter().any(|&u| ma[v][u] != mb[img][map[u]])
        {
            continue;
        }
        map[v] = img;
        used[img] = true;
        if extend_map(ma, mb, ga, gb, order, k + 1, map, used) {
            return true;
        }
        map[v] = usize::MAX;
        used[img] = false;
    }
    false
}

/// The support number straight from the definition: min over every center p
/// in C of how many points survive in B(w, rho/delta) minus B(p, f*delta*rho).
pub fn support_number_oracle(
    c: &FiniteMetric,
    w: usize,
    delta: f64,
    mode: CenterMode,
) -> usize {
    let n = c.len();
    let rho = (0..n)
        .filter(|&z| z != w)
        .map(|z| c.distance(w, z))
        .fold(f64::INFINITY, f64::min);
    let factor = match mode {
        CenterMode::Necessary => 1.0,
        CenterMode::Sufficient => 2.0,
    };
    let outer: Vec<usize> = (0..n).filter(|&z| c.distance(w, z) <= rho / delta).collect();
    (0..n)
        .map(|p| outer.iter().filter(|&&z| c.distance(p, z) > factor * delta * rho).count())
        .min()
        .expect("non-empty point set")
}

/// Random connected simple graph: a random spanning tree plus extra edges.
pub fn random_connected_graph<R: Rng>(rng: &mut R, n_min: usize, n_max: usize) -> Graph {
    let n = rng.gen_range(n_min..=n_max);
    let mut edges = Vec::new();
    for v in 1..n {
        edges.push((rng.gen_range(0..v), v));
    }
    if n >= 3 {
        for _ in 0..rng.gen_range(0..=n) {
            let a = rng.gen_range(0..n);
            let b = rng.gen_range(0..n);
            if a != b && !edges.contains(&(a, b)) && !edges.contains(&(b, a)) {
                edges.push((a, b));
            }
        }
    }
    Graph::new(n, &edges).expect("valid edges by construction")
}

/// The same graph with vertices relabeled by `perm` (old id -> new id).
pub fn permute_graph(g: &Graph, perm: &[usize]) -> Graph {
    let edges: Vec<(usize, usize)> =
        g.edges().iter().map(|&(a, b)| (perm[a], perm[b])).collect();
    Graph::new(g.vertex_count(), &edges).expect("permutation preserves validity")
}

/// A uniformly random permutation of 0..n.
pub fn random_permutation<R: Rng>(rng: &mut R, n: usize) -> Vec<usize> {
    let mut perm: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        perm.swap(i, rng.gen_range(0..=i));
    }
    perm
}
