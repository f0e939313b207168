//! Finite undirected multigraphs with adjacency lists, BFS balls and nets.

use std::collections::VecDeque;
use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Finite undirected multigraph. Parallel edges and loops are permitted and
/// flagged; vertices are `0..vertex_count`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    /// Per-vertex list of (neighbor, edge id). A loop contributes two entries.
    adj: Vec<Vec<(usize, usize)>>,
    has_parallel: bool,
    has_loop: bool,
}

impl Graph {
    /// Builds a graph from a vertex count and an edge list.
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut adj = vec![Vec::new(); n];
        let mut has_loop = false;
        for (id, &(u, v)) in edges.iter().enumerate() {
            for &w in &[u, v] {
                if w >= n {
                    return Err(Error::EndpointOutOfRange { endpoint: w, count: n });
                }
            }
            adj[u].push((v, id));
            adj[v].push((u, id));
            if u == v {
                has_loop = true;
            }
        }
        let mut has_parallel = false;
        let mut seen = std::collections::HashSet::new();
        for &(u, v) in edges {
            let key = (u.min(v), u.max(v));
            if !seen.insert(key) {
                has_parallel = true;
            }
        }
        Ok(Graph { n, edges: edges.to_vec(), adj, has_parallel, has_loop })
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Degree of `v`; a loop counts twice.
    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn max_degree(&self) -> usize {
        (0..self.n).map(|v| self.degree(v)).max().unwrap_or(0)
    }

    /// Adjacency entries of `v` as (neighbor, edge id); loops appear twice.
    pub fn adjacency(&self, v: usize) -> &[(usize, usize)] {
        &self.adj[v]
    }

    pub fn has_parallel_edges(&self) -> bool {
        self.has_parallel
    }

    pub fn has_loops(&self) -> bool {
        self.has_loop
    }

    pub fn is_simple(&self) -> bool {
        !self.has_parallel && !self.has_loop
    }

    pub fn has_edge_between(&self, u: usize, v: usize) -> bool {
        self.adj[u].iter().any(|&(w, _)| w == v)
    }

    /// Exact BFS distances from `source`; `None` marks unreachable vertices.
    pub fn distances_from(&self, source: usize) -> Result<Vec<Option<usize>>> {
        if source >= self.n {
            return Err(Error::VertexOutOfRange { vertex: source, count: self.n });
        }
        let mut dist = vec![None; self.n];
        dist[source] = Some(0);
        let mut queue = VecDeque::from([source]);
        while let Some(v) = queue.pop_front() {
            let d = dist[v].unwrap();
            for &(u, _) in &self.adj[v] {
                if dist[u].is_none() {
                    dist[u] = Some(d + 1);
                    queue.push_back(u);
                }
            }
        }
        Ok(dist)
    }

    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        self.distances_from(0).unwrap().iter().all(|d| d.is_some())
    }

    pub fn eccentricity(&self, v: usize) -> Result<usize> {
        let dist = self.distances_from(v)?;
        dist.iter()
            .map(|d| d.ok_or(Error::Disconnected))
            .try_fold(0, |acc, d| d.map(|d| acc.max(d)))
    }

    /// Closed metric ball of radius `r` around `root`, as an induced rooted
    /// subgraph. Vertices are relabeled; `original_ids` maps back.
    pub fn ball(&self, root: usize, r: usize) -> Result<RootedSubgraph> {
        if root >= self.n {
            return Err(Error::VertexOutOfRange { vertex: root, count: self.n });
        }
        let mut dist = vec![None; self.n];
        dist[root] = Some(0usize);
        let mut queue = VecDeque::from([root]);
        let mut members = vec![root];
        while let Some(v) = queue.pop_front() {
            let d = dist[v].unwrap();
            if d == r {
                continue;
            }
            for &(u, _) in &self.adj[v] {
                if dist[u].is_none() {
                    dist[u] = Some(d + 1);
                    members.push(u);
                    queue.push_back(u);
                }
            }
        }
        members.sort_unstable();
        let mut local = vec![usize::MAX; self.n];
        for (i, &v) in members.iter().enumerate() {
            local[v] = i;
        }
        let sub_edges: Vec<(usize, usize)> = self
            .edges
            .iter()
            .filter(|&&(u, v)| local[u] != usize::MAX && local[v] != usize::MAX)
            .map(|&(u, v)| (local[u], local[v]))
            .collect();
        let graph = Graph::new(members.len(), &sub_edges)?;
        Ok(RootedSubgraph { graph, root: local[root], depth: r, original_ids: members })
    }

    /// Greedy maximal r-net: pairwise distances >= r, and no vertex can be
    /// added. The greedy scan order is a seeded shuffle of the vertices.
    pub fn maximal_net(&self, r: usize, seed: u64) -> Result<Vec<usize>> {
        let mut order: Vec<usize> = (0..self.n).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        order.shuffle(&mut rng);
        self.maximal_net_with_order(r, &order)
    }

    /// Greedy maximal r-net scanning vertices in the given order.
    pub fn maximal_net_with_order(&self, r: usize, order: &[usize]) -> Result<Vec<usize>> {
        if r < 1 {
            return Err(Error::InvalidParameter("net separation r must be >= 1".into()));
        }
        // dist_to_net[v] = min distance to a chosen net point, capped at r.
        let mut dist_to_net = vec![usize::MAX; self.n];
        let mut net = Vec::new();
        for &v in order {
            if v >= self.n {
                return Err(Error::VertexOutOfRange { vertex: v, count: self.n });
            }
            if dist_to_net[v] < r {
                continue;
            }
            net.push(v);
            // BFS from v up to depth r-1 updating the cap.
            let mut queue = VecDeque::from([(v, 0usize)]);
            dist_to_net[v] = 0;
            while let Some((w, d)) = queue.pop_front() {
                if d == r.saturating_sub(1) {
                    continue;
                }
                for &(u, _) in &self.adj[w] {
                    if dist_to_net[u] > d + 1 {
                        dist_to_net[u] = d + 1;
                        queue.push_back((u, d + 1));
                    }
                }
            }
        }
        net.sort_unstable();
        Ok(net)
    }

    /// Serializes to the edge-list text format: "n m" then one "u v" per edge.
    pub fn to_edge_list_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{} {}", self.n, self.edges.len());
        for &(u, v) in &self.edges {
            let _ = writeln!(out, "{u} {v}");
        }
        out
    }

    /// Parses the edge-list text format.
    pub fn from_edge_list_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| Error::Parse("empty edge list".into()))?;
        let mut it = header.split_whitespace();
        let n: usize = parse_token(it.next(), "vertex count")?;
        let m: usize = parse_token(it.next(), "edge count")?;
        let mut edges = Vec::with_capacity(m);
        for _ in 0..m {
            let line = lines.next().ok_or_else(|| Error::Parse("truncated edge list".into()))?;
            let mut it = line.split_whitespace();
            let u: usize = parse_token(it.next(), "edge endpoint")?;
            let v: usize = parse_token(it.next(), "edge endpoint")?;
            edges.push((u, v));
        }
        Graph::new(n, &edges)
    }
}

impl serde::Serialize for Graph {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut s = ser.serialize_struct("Graph", 2)?;
        s.serialize_field("n", &self.n)?;
        s.serialize_field("edges", &self.edges)?;
        s.end()
    }
}

impl<'de> serde::Deserialize<'de> for Graph {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        #[derive(serde::Deserialize)]
        struct Raw {
            n: usize,
            edges: Vec<(usize, usize)>,
        }
        let raw = Raw::deserialize(de)?;
        Graph::new(raw.n, &raw.edges).map_err(serde::de::Error::custom)
    }
}

fn parse_token<T: std::str::FromStr>(tok: Option<&str>, what: &str) -> Result<T> {
    tok.ok_or_else(|| Error::Parse(format!("missing {what}")))?
        .parse()
        .map_err(|_| Error::Parse(format!("invalid {what}")))
}

/// Induced subgraph of a closed ball, rooted at the center.
#[derive(Debug, Clone)]
pub struct RootedSubgraph {
    pub graph: Graph,
    pub root: usize,
    pub depth: usize,
    /// Maps local vertex ids back to the parent graph.
    pub original_ids: Vec<usize>,
}
