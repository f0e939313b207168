//! Benjamini–Schramm sampling: canonical codes for rooted balls, empirical
//! neighborhood distributions, total-variation comparison and Cauchy
//! diagnostics for graph sequences.

use std::collections::BTreeMap;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, RootedSubgraph};

const CODE_VERTEX_CAP: usize = 64;

/// Canonical byte string identifying a rooted multigraph up to rooted
/// isomorphism. Equal codes iff rooted-isomorphic; comparisons look at the
/// code alone, since the extraction depth is not a property of the rooted
/// graph itself.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RootedBallCode {
    pub code: Vec<u8>,
    pub vertex_count: usize,
    pub depth: usize,
}

impl PartialEq for RootedBallCode {
    fn eq(&self, other: &Self) -> bool {
        self.code == other.code
    }
}

impl Eq for RootedBallCode {}

impl PartialOrd for RootedBallCode {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for RootedBallCode {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.code.cmp(&other.code)
    }
}

impl std::hash::Hash for RootedBallCode {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.code.hash(state);
    }
}

impl RootedBallCode {
    pub fn to_hex(&self) -> String {
        self.code.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn from_hex(hex: &str, depth: usize) -> Result<Self> {
        if hex.len() % 2 != 0 || hex.is_empty() {
            return Err(Error::Parse("hex code must have even, positive length".into()));
        }
        let code: Vec<u8> = (0..hex.len() / 2)
            .map(|i| u8::from_str_radix(&hex[2 * i..2 * i + 2], 16))
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::Parse("invalid hex digit in code".into()))?;
        let vertex_count = code[0] as usize;
        Ok(RootedBallCode { code, vertex_count, depth })
    }
}

/// Canonical code of a rooted ball: iterated distance-and-degree color
/// refinement from the root, then an exact lexicographic-minimum search over
/// vertex orderings compatible with the refined colors.
pub fn canonical_code(b: &RootedSubgraph) -> Result<RootedBallCode> {
    let g = &b.graph;
    let n = g.vertex_count();
    if n > CODE_VERTEX_CAP {
        return Err(Error::SizeCapExceeded(format!(
            "ball has {n} vertices, canonical coding caps at {CODE_VERTEX_CAP}"
        )));
    }
    if n == 0 {
        return Err(Error::InvalidParameter("empty ball".into()));
    }
    // multiplicity matrix and loop counts
    let mut mult = vec![vec![0u8; n]; n];
    let mut loops = vec![0u8; n];
    for &(u, v) in g.edges() {
        if u == v {
            loops[u] += 1;
        } else {
            mult[u][v] += 1;
            mult[v][u] += 1;
        }
    }
    let colors = refine_colors(g, b.root, &mult, &loops);
    let mut search = CodeSearch {
        n,
        mult: &mult,
        loops: &loops,
        colors: &colors,
        placed: Vec::with_capacity(n),
        is_placed: vec![false; n],
        current: Vec::new(),
        best: None,
    };
    search.current.push(n as u8);
    search.run();
    let code = search.best.expect("search always places all vertices");
    Ok(RootedBallCode { code, vertex_count: n, depth: b.depth })
}

/// Stable color refinement seeded by (distance from root, degree, loops);
/// refinement signatures are multisets of (neighbor color, multiplicity).
fn refine_colors(g: &Graph, root: usize, mult: &[Vec<u8>], loops: &[u8]) -> Vec<usize> {
    let n = g.vertex_count();
    let dist = g.distances_from(root).expect("root validated by ball extraction");
    let init: Vec<(usize, usize, u8)> = (0..n)
        .map(|v| (dist[v].unwrap_or(usize::MAX), g.degree(v), loops[v]))
        .collect();
    let mut colors = assign_ids(&init);
    loop {
        let sigs: Vec<(usize, Vec<(usize, u8)>)> = (0..n)
            .map(|v| {
                let mut nb: Vec<(usize, u8)> = (0..n)
                    .filter(|&u| mult[v][u] > 0)
                    .map(|u| (colors[u], mult[v][u]))
                    .collect();
                nb.sort_unstable();
                (colors[v], nb)
            })
            .collect();
        let next = assign_ids(&sigs);
        if next == colors {
            return colors;
        }
        colors = next;
    }
}

fn assign_ids<T: Ord + Clone>(keys: &[T]) -> Vec<usize> {
    let mut sorted: Vec<&T> = keys.iter().collect();
    sorted.sort();
    sorted.dedup();
    keys.iter().map(|k| sorted.binary_search(&k).unwrap()).collect()
}

struct CodeSearch<'a> {
    n: usize,
    mult: &'a [Vec<u8>],
    loops: &'a [u8],
    colors: &'a [usize],
    placed: Vec<usize>,
    is_placed: Vec<bool>,
    current: Vec<u8>,
    best: Option<Vec<u8>>,
}

impl CodeSearch<'_> {
    /// Depth-first search over orderings. At each position only vertices
    /// whose (color, loops, row-to-placed) key is minimal can extend a
    /// lexicographically minimal code, so only those are branched on;
    /// pairwise-interchangeable candidates are collapsed to one.
    fn run(&mut self) {
        if self.placed.len() == self.n {
            if self.best.as_ref().map_or(true, |b| self.current < *b) {
                self.best = Some(self.current.clone());
            }
            return;
        }
        let mut min_key: Option<Vec<u8>> = None;
        let mut cands: Vec<usize> = Vec::new();
        for v in 0..self.n {
            if self.is_placed[v] {
                continue;
            }
            let mut key = Vec::with_capacity(2 + self.placed.len());
            key.push(self.colors[v] as u8);
            key.push(self.loops[v]);
            for &p in &self.placed {
                key.push(self.mult[v][p]);
            }
            match &min_key {
                Some(mk) if key > *mk => {}
                Some(mk) if key == *mk => cands.push(v),
                _ => {
                    min_key = Some(key);
                    cands = vec![v];
                }
            }
        }
        let key = min_key.unwrap();
        // prefix bound against the best code found so far
        if let Some(best) = &self.best {
            let end = self.current.len() + key.len();
            if end <= best.len() {
                let cmp = (self.current.as_slice(), key.as_slice());
                let bpref = (&best[..self.current.len()], &best[self.current.len()..end]);
                if cmp > bpref {
                    return;
                }
            }
        }
        // collapse candidates that are pairwise swappable by an automorphism
        if cands.len() > 1 && self.all_interchangeable(&cands) {
            cands.truncate(1);
        }
        let mark = self.current.len();
        self.current.extend_from_slice(&key);
        for v in cands {
            self.placed.push(v);
            self.is_placed[v] = true;
            self.run();
            self.is_placed[v] = false;
            self.placed.pop();
        }
        self.current.truncate(mark);
    }

    /// True when every transposition within `set` is an automorphism of the
    /// whole multigraph, i.e. the members are mutual twins.
    fn all_interchangeable(&self, set: &[usize]) -> bool {
        for (i, &u) in set.iter().enumerate() {
            for &w in &set[i + 1..] {
                if self.loops[u] != self.loops[w] {
                    return false;
                }
                for x in 0..self.n {
                    if x == u || x == w {
                        continue;
                    }
                    if self.mult[u][x] != self.mult[w][x] {
                        return false;
                    }
                }
            }
        }
        true
    }
}

/// Probability distribution over rooted-ball codes at a fixed depth.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalDistribution {
    pub weights: BTreeMap<RootedBallCode, f64>,
    pub depth: usize,
    pub source_size: usize,
}

impl EmpiricalDistribution {
    /// Sorted "code_hex probability" lines; round-trips bit-exactly.
    pub fn to_text(&self) -> String {
        use std::fmt::Write as _;
        let mut out = String::new();
        let _ = writeln!(out, "{} {}", self.depth, self.source_size);
        for (code, w) in &self.weights {
            let _ = writeln!(out, "{} {}", code.to_hex(), w);
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| Error::Parse("empty distribution".into()))?;
        let mut it = header.split_whitespace();
        let depth: usize = parse(it.next(), "depth")?;
        let source_size: usize = parse(it.next(), "source size")?;
        let mut weights = BTreeMap::new();
        for line in lines {
            let mut it = line.split_whitespace();
            let hex = it.next().ok_or_else(|| Error::Parse("missing code".into()))?;
            let w: f64 = parse(it.next(), "probability")?;
            weights.insert(RootedBallCode::from_hex(hex, depth)?, w);
        }
        Ok(EmpiricalDistribution { weights, depth, source_size })
    }

    pub fn total_mass(&self) -> f64 {
        self.weights.values().sum()
    }
}

fn parse<T: std::str::FromStr>(tok: Option<&str>, what: &str) -> Result<T> {
    tok.ok_or_else(|| Error::Parse(format!("missing {what}")))?
        .parse()
        .map_err(|_| Error::Parse(format!("invalid {what}")))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SamplingMode {
    Exact,
    Sampled { k: usize, seed: u64 },
}

/// Depth-r neighborhood distribution of a graph: the law of the canonical
/// code of the r-ball around a uniform vertex.
pub fn neighborhood_distribution(
    g: &Graph,
    r: usize,
    mode: SamplingMode,
) -> Result<EmpiricalDistribution> {
    let n = g.vertex_count();
    if n == 0 {
        return Err(Error::InvalidParameter("empty graph".into()));
    }
    let roots: Vec<usize> = match mode {
        SamplingMode::Exact => (0..n).collect(),
        SamplingMode::Sampled { k, seed } => {
            if k == 0 {
                return Err(Error::InvalidParameter("sample size must be positive".into()));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..k).map(|_| rng.gen_range(0..n)).collect()
        }
    };
    let total = roots.len();
    let mut counts: BTreeMap<RootedBallCode, usize> = BTreeMap::new();
    let mut cache: std::collections::HashMap<Vec<usize>, RootedBallCode> =
        std::collections::HashMap::new();
    for root in roots {
        let ball = g.ball(root, r)?;
        // cheap memo: identical (member set, root) pairs recur often
        let mut key = ball.original_ids.clone();
        key.push(ball.original_ids[ball.root]);
        let code = match cache.get(&key) {
            Some(c) => c.clone(),
            None => {
                let c = canonical_code(&ball)?;
                cache.insert(key, c.clone());
                c
            }
        };
        *counts.entry(code).or_insert(0) += 1;
    }
    // dividing integer counts once keeps transitive cases exactly 1.0
    let weights = counts.into_iter().map(|(c, k)| (c, k as f64 / total as f64)).collect();
    Ok(EmpiricalDistribution { weights, depth: r, source_size: n })
}

/// Total-variation distance between two equal-depth distributions.
pub fn tv_distance(a: &EmpiricalDistribution, b: &EmpiricalDistribution) -> Result<f64> {
    if a.depth != b.depth {
        return Err(Error::InvalidParameter(format!(
            "depth mismatch: {} vs {}",
            a.depth, b.depth
        )));
    }
    let mut total = 0.0;
    for (code, &wa) in &a.weights {
        let wb = b.weights.get(code).copied().unwrap_or(0.0);
        total += (wa - wb).abs();
    }
    for (code, &wb) in &b.weights {
        if !a.weights.contains_key(code) {
            total += wb;
        }
    }
    Ok(total / 2.0)
}

/// Pairwise depth-r TV distances across a graph sequence, plus the Cauchy
/// indicator: the largest TV among the last ceil(len/2) members.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConvergenceDiagnostic {
    pub tv: Vec<Vec<f64>>,
    pub cauchy_indicator: f64,
    pub depth: usize,
}

pub fn convergence_diagnostic(gs: &[Graph], r: usize) -> Result<ConvergenceDiagnostic> {
    if gs.len() < 2 {
        return Err(Error::InvalidParameter("need at least 2 graphs".into()));
    }
    let dists: Vec<EmpiricalDistribution> = gs
        .iter()
        .map(|g| neighborhood_distribution(g, r, SamplingMode::Exact))
        .collect::<Result<_>>()?;
    let m = dists.len();
    let mut tv = vec![vec![0.0; m]; m];
    for i in 0..m {
        for j in i + 1..m {
            let d = tv_distance(&dists[i], &dists[j])?;
            tv[i][j] = d;
            tv[j][i] = d;
        }
    }
    let tail_start = m - m.div_ceil(2);
    let mut cauchy_indicator: f64 = 0.0;
    for i in tail_start..m {
        for j in i + 1..m {
            cauchy_indicator = cauchy_indicator.max(tv[i][j]);
        }
    }
    Ok(ConvergenceDiagnostic { tv, cauchy_indicator, depth: r })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::genfam;
    use itertools::Itertools;

    fn code_of(g: &Graph, root: usize, r: usize) -> RootedBallCode {
        canonical_code(&g.ball(root, r).unwrap()).unwrap()
    }

    /// Brute-force rooted isomorphism by permutation search (root fixed).
    fn rooted_iso_oracle(a: &RootedSubgraph, b: &RootedSubgraph) -> bool {
        let (ga, gb) = (&a.graph, &b.graph);
        let n = ga.vertex_count();
        if n != gb.vertex_count() || ga.edge_count() != gb.edge_count() {
            return false;
        }
        let mult = |g: &Graph| {
            let mut m = vec![vec![0usize; n]; n];
            for &(u, v) in g.edges() {
                m[u][v] += 1;
                if u != v {
                    m[v][u] += 1;
                }
            }
            m
        };
        let (ma, mb) = (mult(ga), mult(gb));
        let others: Vec<usize> = (0..n).filter(|&v| v != a.root).collect();
        for perm in others.iter().permutations(others.len()) {
            let mut map = vec![usize::MAX; n];
            map[a.root] = b.root;
            let mut targets: Vec<usize> = (0..n).filter(|&v| v != b.root).collect();
            for (&&src, tgt) in perm.iter().zip(targets.drain(..)) {
                map[src] = tgt;
            }
            if (0..n).all(|u| (u..n).all(|v| ma[u][v] == mb[map[u]][map[v]])) {
                return true;
            }
        }
        false
    }

    #[test]
    fn relabeling_invariance() {
        let g = genfam::torus_grid(4).unwrap().0;
        let ball = g.ball(5, 2).unwrap();
        let code = canonical_code(&ball).unwrap();
        // relabel by reversing vertex ids
        let n = ball.graph.vertex_count();
        let edges: Vec<_> =
            ball.graph.edges().iter().map(|&(u, v)| (n - 1 - u, n - 1 - v)).collect();
        let relabeled = RootedSubgraph {
            graph: Graph::new(n, &edges).unwrap(),
            root: n - 1 - ball.root,
            depth: ball.depth,
            original_ids: (0..n).collect(),
        };
        assert_eq!(canonical_code(&relabeled).unwrap(), code);
    }

    #[test]
    fn p3_root_position_distinguishes() {
        let g = genfam::path(3).unwrap();
        assert_ne!(code_of(&g, 0, 2), code_of(&g, 1, 2));
        assert_eq!(code_of(&g, 0, 2), code_of(&g, 2, 2));
    }

    #[test]
    fn torus_is_single_code() {
        for n in [6usize, 7] {
            let g = genfam::torus_grid(n).unwrap().0;
            let r = 2;
            assert!(n >= 2 * r + 2);
            let codes: std::collections::HashSet<_> =
                (0..g.vertex_count()).map(|v| code_of(&g, v, r)).collect();
            assert_eq!(codes.len(), 1, "torus_grid({n}) radius {r}");
        }
    }

    #[test]
    fn parallel_edges_distinguished_from_simple() {
        let simple = Graph::new(2, &[(0, 1)]).unwrap();
        let double = Graph::new(2, &[(0, 1), (0, 1)]).unwrap();
        assert_ne!(code_of(&simple, 0, 1), code_of(&double, 0, 1));
    }

    #[test]
    fn loops_distinguished() {
        let plain = Graph::new(2, &[(0, 1)]).unwrap();
        let looped = Graph::new(2, &[(0, 1), (1, 1)]).unwrap();
        assert_ne!(code_of(&plain, 0, 1), code_of(&looped, 0, 1));
    }

    #[test]
    fn symmetric_extremes_terminate() {
        // complete and edgeless balls exercise the twin-collapsing branch
        let g = genfam::complete(9).unwrap();
        let c = code_of(&g, 0, 1);
        assert_eq!(c.vertex_count, 9);
        let e = Graph::new(1, &[]).unwrap();
        assert_eq!(code_of(&e, 0, 3).vertex_count, 1);
        let tree = genfam::binary_tree(4).unwrap();
        assert_eq!(code_of(&tree, 0, 4).vertex_count, 31);
    }

    #[test]
    fn agrees_with_permutation_oracle() {
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let mut balls = Vec::new();
        for _ in 0..14 {
            let n = rng.gen_range(2..=6);
            let m = rng.gen_range(1..=8);
            let edges: Vec<(usize, usize)> =
                (0..m).map(|_| (rng.gen_range(0..n), rng.gen_range(0..n))).collect();
            let g = Graph::new(n, &edges).unwrap();
            let root = rng.gen_range(0..n);
            balls.push(g.ball(root, n).unwrap());
        }
        for i in 0..balls.len() {
            for j in i..balls.len() {
                let same_code =
                    canonical_code(&balls[i]).unwrap() == canonical_code(&balls[j]).unwrap();
                let iso = rooted_iso_oracle(&balls[i], &balls[j]);
                assert_eq!(same_code, iso, "pair ({i},{j})");
            }
        }
    }

    #[test]
    fn cap_exceeded() {
        let g = genfam::torus_grid(12).unwrap().0;
        let ball = g.ball(0, 8).unwrap();
        assert!(ball.graph.vertex_count() > 64);
        assert!(matches!(canonical_code(&ball), Err(Error::SizeCapExceeded(_))));
    }

    #[test]
    fn k4_and_c10_distributions() {
        let g = genfam::complete(4).unwrap();
        let d = neighborhood_distribution(&g, 1, SamplingMode::Exact).unwrap();
        assert_eq!(d.weights.len(), 1);
        assert!((d.total_mass() - 1.0).abs() < 1e-12);
        let g = genfam::cycle(10).unwrap();
        let d = neighborhood_distribution(&g, 2, SamplingMode::Exact).unwrap();
        assert_eq!(d.weights.len(), 1);
    }

    #[test]
    fn path_distribution_weights() {
        for n in [6usize, 10] {
            let g = genfam::path(n).unwrap();
            let d = neighborhood_distribution(&g, 1, SamplingMode::Exact).unwrap();
            assert_eq!(d.weights.len(), 2);
            let mut ws: Vec<f64> = d.weights.values().copied().collect();
            ws.sort_by(|a, b| a.partial_cmp(b).unwrap());
            assert!((ws[0] - 2.0 / n as f64).abs() < 1e-12);
            assert!((ws[1] - (n - 2) as f64 / n as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn sampled_mode_approximates_exact() {
        let g = genfam::path(40).unwrap();
        let exact = neighborhood_distribution(&g, 2, SamplingMode::Exact).unwrap();
        let k = 4000;
        let sampled =
            neighborhood_distribution(&g, 2, SamplingMode::Sampled { k, seed: 3 }).unwrap();
        let tv = tv_distance(&exact, &sampled).unwrap();
        let bound = 3.0 * (exact.weights.len() as f64 / k as f64).sqrt();
        assert!(tv <= bound, "tv={tv} bound={bound}");
    }

    #[test]
    fn tv_path_doubling_formula() {
        for (n, r) in [(8usize, 2usize), (16, 3), (16, 5)] {
            let a = neighborhood_distribution(&genfam::path(n).unwrap(), r, SamplingMode::Exact)
                .unwrap();
            let b =
                neighborhood_distribution(&genfam::path(2 * n).unwrap(), r, SamplingMode::Exact)
                    .unwrap();
            let tv = tv_distance(&a, &b).unwrap();
            assert!((tv - r as f64 / n as f64).abs() < 1e-12, "n={n} r={r}: {tv}");
        }
    }

    #[test]
    fn tv_is_a_metric_on_samples() {
        let mk = |n: usize| {
            neighborhood_distribution(&genfam::path(n).unwrap(), 2, SamplingMode::Exact).unwrap()
        };
        let (a, b, c) = (mk(8), mk(12), mk(20));
        assert_eq!(tv_distance(&a, &a).unwrap(), 0.0);
        assert_eq!(tv_distance(&a, &b).unwrap(), tv_distance(&b, &a).unwrap());
        let (ab, bc, ac) =
            (tv_distance(&a, &b).unwrap(), tv_distance(&b, &c).unwrap(), tv_distance(&a, &c).unwrap());
        assert!(ac <= ab + bc + 1e-15);
        // disjoint supports
        let k = neighborhood_distribution(&genfam::complete(5).unwrap(), 2, SamplingMode::Exact)
            .unwrap();
        assert_eq!(tv_distance(&a, &k).unwrap(), 1.0);
        // depth mismatch
        let deep =
            neighborhood_distribution(&genfam::path(8).unwrap(), 3, SamplingMode::Exact).unwrap();
        assert!(tv_distance(&a, &deep).is_err());
    }

    #[test]
    fn diagnostic_constant_sequence_is_zero() {
        let g = genfam::cycle(12).unwrap();
        let diag = convergence_diagnostic(&[g.clone(), g.clone(), g], 2).unwrap();
        assert!(diag.tv.iter().flatten().all(|&x| x == 0.0));
        assert_eq!(diag.cauchy_indicator, 0.0);
    }

    #[test]
    fn diagnostic_torus_doubling_is_exact_zero() {
        let a = genfam::torus_grid(6).unwrap().0;
        let b = genfam::torus_grid(12).unwrap().0;
        let diag = convergence_diagnostic(&[a, b], 2).unwrap();
        assert_eq!(diag.tv[0][1], 0.0);
    }

    #[test]
    fn diagnostic_path_powers_tail_decreases() {
        let gs: Vec<Graph> = (4..=8).map(|k| genfam::path(1 << k).unwrap()).collect();
        let diag = convergence_diagnostic(&gs, 2).unwrap();
        // TV(P_a, P_b) at radius 2 is 4/a - 4/b for a < b
        for i in 0..gs.len() {
            for j in i + 1..gs.len() {
                let expect = 4.0 / (1usize << (4 + i)) as f64 - 4.0 / (1usize << (4 + j)) as f64;
                assert!((diag.tv[i][j] - expect).abs() < 1e-12);
            }
        }
        assert!((diag.cauchy_indicator - (4.0 / 64.0 - 4.0 / 256.0)).abs() < 1e-12);
    }

    #[test]
    fn distribution_text_round_trip() {
        let g = genfam::path(9).unwrap();
        let d = neighborhood_distribution(&g, 2, SamplingMode::Exact).unwrap();
        let text = d.to_text();
        let d2 = EmpiricalDistribution::from_text(&text).unwrap();
        assert_eq!(d, d2);
        assert_eq!(text, d2.to_text());
    }
}
